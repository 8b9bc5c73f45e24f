use std::sync::Arc;

use serde::Serialize;

use super::ArithmeticFixture;
use crate::error::Result;
use crate::lattice::{annihilator, SubgroupPresentation};
use crate::module::GModule;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict { pass: true, witness: None }
    }

    pub fn fail(witness: impl Into<String>) -> Self {
        Verdict { pass: false, witness: Some(witness.into()) }
    }

    pub fn from_bool(ok: bool, witness: impl FnOnce() -> String) -> Self {
        if ok {
            Self::pass()
        } else {
            Self::fail(witness())
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModuleValidation {
    pub module: String,
    /// Local duality, one verdict per place.
    pub local_duality: Vec<Verdict>,
    /// Unramified orthogonality, one verdict per place. Informational.
    pub unramified_orthogonality: Vec<Verdict>,
    pub global_duality: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub fixture: String,
    pub reciprocity: Verdict,
    pub modules: Vec<ModuleValidation>,
}

impl ValidationReport {
    pub fn local_duality_holds(&self) -> bool {
        self.modules.iter().all(|m| m.local_duality.iter().all(|v| v.pass))
    }

    pub fn global_duality_holds(&self) -> bool {
        self.modules.iter().all(|m| m.global_duality.pass)
    }

    /// Reciprocity and local duality for every module.
    pub fn core_pass(&self) -> bool {
        self.reciprocity.pass && self.local_duality_holds()
    }

    /// Everything the pairing theorems consume.
    pub fn theorem_ready(&self) -> bool {
        self.core_pass() && self.global_duality_holds()
    }
}

fn show(x: &[i64]) -> String {
    format!("{x:?}")
}

fn reciprocity(f: &ArithmeticFixture) -> Result<Verdict> {
    let c = f.coefficient().module();
    let h2 = f.global(c, 2)?;
    let n = f.n();
    for (k, z) in h2.representatives().iter().enumerate() {
        let mut total = 0;
        for v in 0..f.places().len() {
            total = (total + f.invariant(v, &z.restrict(&f.places()[v].decomposition)?)?) % n;
        }
        if total != 0 {
            return Ok(Verdict::fail(format!("generator {k} of H²(G, C) has invariant sum {total}/{n}")));
        }
    }
    Ok(Verdict::pass())
}

fn local_duality(f: &ArithmeticFixture, v: usize, m: &Arc<GModule>) -> Result<Verdict> {
    let p = f.local_pairing(v, m)?;
    if p.left.order() != p.right.order() {
        return Ok(Verdict::fail(format!("|H¹(G_v, M)| = {} but |H¹(G_v, M^∨)| = {}", p.left.order(), p.right.order())));
    }
    let lk = p.left_kernel();
    if let Some(x) = lk.generators().into_iter().find(|g| !p.left.is_zero(g)) {
        return Ok(Verdict::fail(format!("left kernel contains {}", show(&x))));
    }
    let rk = p.right_kernel();
    if let Some(x) = rk.generators().into_iter().find(|g| !p.right.is_zero(g)) {
        return Ok(Verdict::fail(format!("right kernel contains {}", show(&x))));
    }
    Ok(Verdict::pass())
}

fn unramified_orthogonality(f: &ArithmeticFixture, v: usize, m: &Arc<GModule>) -> Result<Verdict> {
    let dual = f.dual(m)?;
    let p = f.local_pairing(v, m)?;
    let unr = f.unramified_subgroup(v, m)?;
    let unr_dual = f.unramified_subgroup(v, &dual)?;
    let ann = annihilator(&p, &unr)?;
    if let Some(x) = unr_dual.generators().into_iter().find(|g| !ann.contains(g)) {
        return Ok(Verdict::fail(format!("unramified dual class {} pairs nontrivially", show(&x))));
    }
    Ok(Verdict::from_bool(ann.same_as(&unr_dual)?, || {
        "unramified subgroups are orthogonal but not exact complements".to_string()
    }))
}

fn global_duality(f: &ArithmeticFixture, m: &Arc<GModule>) -> Result<Verdict> {
    let dual = f.dual(m)?;
    let total = f.total_pairing(m)?;
    let image: SubgroupPresentation = f.global_image(m)?;
    let image_dual = f.global_image(&dual)?;
    let perp = annihilator(&total, &image)?;
    if let Some(x) = image_dual.generators().into_iter().find(|g| !perp.contains(g)) {
        return Ok(Verdict::fail(format!("global dual class localizing to {} is not orthogonal", show(&x))));
    }
    if let Some(x) = perp.generators().into_iter().find(|g| !image_dual.contains(g)) {
        return Ok(Verdict::fail(format!("orthogonal tuple {} is not global", show(&x))));
    }
    Ok(Verdict::pass())
}

/// Checks reciprocity, local duality, unramified orthogonality and global duality.
pub fn validate_fixture(f: &ArithmeticFixture, modules: &[(String, Arc<GModule>)]) -> Result<ValidationReport> {
    let reciprocity = reciprocity(f)?;
    let mut out = Vec::with_capacity(modules.len());
    for (label, m) in modules {
        let places = 0..f.places().len();
        out.push(ModuleValidation {
            module: label.clone(),
            local_duality: places.clone().map(|v| local_duality(f, v, m)).collect::<Result<_>>()?,
            unramified_orthogonality: places.map(|v| unramified_orthogonality(f, v, m)).collect::<Result<_>>()?,
            global_duality: global_duality(f, m)?,
        });
    }
    Ok(ValidationReport { fixture: f.id.clone(), reciprocity, modules: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::Place;
    use crate::group::{FiniteGroup, Subgroup};
    use crate::module::CoefficientModule;

    fn mu(f: &ArithmeticFixture, k: i64) -> (String, Arc<GModule>) {
        (format!("mu{k}"), Arc::new(f.coefficient().torsion(k)))
    }

    #[test]
    fn dbl4_passes() {
        let f = ArithmeticFixture::dbl4();
        let r = validate_fixture(&f, &[mu(&f, 2), mu(&f, 4)]).unwrap();
        assert!(r.theorem_ready(), "{r:?}");
    }

    #[test]
    fn single_place_breaks_reciprocity() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let c = CoefficientModule::new(g.clone(), 4, vec![1, 3]).unwrap();
        let whole = Arc::new(Subgroup::whole(g.clone()));
        let place = Place { label: "v".into(), decomposition: whole.clone(), inertia: whole, invariant: vec![2] };
        let f = ArithmeticFixture::new("broken", g, c, vec![place]).unwrap();
        let r = validate_fixture(&f, &[mu(&f, 2)]).unwrap();
        assert!(!r.reciprocity.pass);
        assert!(r.reciprocity.witness.is_some());
    }

    #[test]
    fn zero_module_is_vacuous() {
        let f = ArithmeticFixture::dbl4();
        let zero = Arc::new(GModule::zero(f.group().clone()));
        let r = validate_fixture(&f, &[("0".into(), zero)]).unwrap();
        assert!(r.theorem_ready());
        assert!(r.modules[0].unramified_orthogonality.iter().all(|v| v.pass));
    }

    #[test]
    fn three_places_break_global_duality() {
        let f = ArithmeticFixture::doubled(3);
        let r = validate_fixture(&f, &[mu(&f, 2)]).unwrap();
        assert!(!r.reciprocity.pass || !r.global_duality_holds());
    }
}
