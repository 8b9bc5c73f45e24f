//! Finite arithmetic fixtures: a group `G`, a coefficient module `C = Z/N`
//! and finitely many places with decomposition/inertia subgroups and
//! invariant maps on `H²(G_v, C)`.

mod io;
mod resolve;
mod search;
mod validate;

use std::sync::Arc;

use num_integer::Integer;

pub use io::{CoefficientSpec, ConditionSpec, FixtureFile, ModuleSpec, PlaceSpec, RefinementValue, SequenceSpec, ThetaSpec};
pub use resolve::{ResolvedSequence, ResolvedTheta};
pub use search::{search_fixtures, SearchBounds, SearchHit};
pub use validate::{validate_fixture, ModuleValidation, ValidationReport, Verdict};

use crate::cochain::Cochain;
use crate::cohomology::{CohomologyCache, CohomologyGroup};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Subgroup};
use crate::lattice::{AbHom, BilinearForm, FiniteAbelianGroup, SubgroupPresentation};
use crate::module::{dual_module, evaluation_pairing, CoefficientModule, GModule, GModuleHom, ModulePairing};

#[derive(Clone, Debug)]
pub struct Place {
    pub label: String,
    pub decomposition: Arc<Subgroup>,
    pub inertia: Arc<Subgroup>,
    /// Values of `inv_v` on the generators of the computed `H²(G_v, C)`, as residues mod `N`.
    pub invariant: Vec<i64>,
}

#[derive(Debug)]
pub struct ArithmeticFixture {
    pub id: String,
    group: Arc<FiniteGroup>,
    whole: Arc<Subgroup>,
    coefficient: CoefficientModule,
    places: Vec<Place>,
    cache: CohomologyCache,
}

/// `⊕_v H^i(G_v, M)` with the blocks laid out in place order.
#[derive(Clone, Debug)]
pub struct LocalSum {
    pub group: FiniteAbelianGroup,
    pub parts: Vec<Arc<CohomologyGroup>>,
    offsets: Vec<usize>,
}

impl LocalSum {
    pub fn component<'a>(&self, x: &'a [i64], v: usize) -> &'a [i64] {
        &x[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn join(&self, parts: &[Vec<i64>]) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.group.rank());
        for p in parts {
            out.extend_from_slice(p);
        }
        self.group.reduce(&out)
    }

    /// The element supported at place `v` only.
    pub fn embed(&self, v: usize, x: &[i64]) -> Vec<i64> {
        let mut out = self.group.zero();
        out[self.offsets[v]..self.offsets[v + 1]].copy_from_slice(x);
        out
    }

    pub fn places(&self) -> usize {
        self.parts.len()
    }
}

impl ArithmeticFixture {
    pub fn new(id: impl Into<String>, group: Arc<FiniteGroup>, coefficient: CoefficientModule, places: Vec<Place>) -> Result<Self> {
        if places.is_empty() {
            return Err(Error::InvalidGroup("a fixture needs at least one place".into()));
        }
        if **coefficient.group() != *group {
            return Err(Error::GroupMismatch);
        }
        let whole = Arc::new(Subgroup::whole(group.clone()));
        let fixture = ArithmeticFixture { id: id.into(), group, whole, coefficient, places: Vec::new(), cache: CohomologyCache::default() };
        let mut checked = Vec::with_capacity(places.len());
        for p in places {
            if **p.decomposition.parent() != *fixture.group || !p.inertia.is_subgroup_of(&p.decomposition) {
                return Err(Error::NotASubgroup);
            }
            let h2 = fixture.cache.cohomology(&p.decomposition, fixture.coefficient.module(), 2)?;
            if p.invariant.len() != h2.carrier.rank() {
                return Err(Error::Parse(format!(
                    "place {}: invariant has {} entries but H² has {} generators",
                    p.label,
                    p.invariant.len(),
                    h2.carrier.rank()
                )));
            }
            let n = fixture.coefficient.n();
            let invariant: Vec<i64> = p.invariant.iter().map(|x| x.mod_floor(&n)).collect();
            AbHom::new(h2.carrier.clone(), FiniteAbelianGroup::cyclic(n), vec![invariant.clone()])
                .map_err(|_| Error::Parse(format!("place {}: invariant is not a homomorphism", p.label)))?;
            checked.push(Place { invariant, ..p });
        }
        Ok(ArithmeticFixture { places: checked, ..fixture })
    }

    /// Gal(Q(i)/Q)-style fixture: `G = Z/2`, `C = Z/4` with the generator acting by `-1`,
    /// two places with full decomposition and inertia and invariant `1/2` each.
    pub fn dbl4() -> Self {
        Self::doubled(2)
    }

    /// As [`Self::dbl4`] with `count` places; the invariants alternate so that they sum to zero.
    pub fn doubled(count: usize) -> Self {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let c = CoefficientModule::new(g.clone(), 4, vec![1, 3]).expect("coefficient");
        let whole = Arc::new(Subgroup::whole(g.clone()));
        let places = (0..count)
            .map(|k| Place {
                label: format!("v{}", k + 1),
                decomposition: whole.clone(),
                inertia: whole.clone(),
                invariant: vec![2],
            })
            .collect();
        let id = if count == 2 { "dbl4".to_string() } else { format!("dbl4x{count}") };
        Self::new(id, g, c, places).expect("doubled fixture")
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn whole(&self) -> &Arc<Subgroup> {
        &self.whole
    }

    pub fn coefficient(&self) -> &CoefficientModule {
        &self.coefficient
    }

    pub fn n(&self) -> i64 {
        self.coefficient.n()
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn cache(&self) -> &CohomologyCache {
        &self.cache
    }

    pub fn dual(&self, m: &GModule) -> Result<Arc<GModule>> {
        Ok(Arc::new(dual_module(m, &self.coefficient)?))
    }

    pub fn evaluation(&self, m: &Arc<GModule>) -> Result<ModulePairing> {
        evaluation_pairing(m.clone(), self.dual(m)?, &self.coefficient)
    }

    pub fn global(&self, m: &Arc<GModule>, degree: usize) -> Result<Arc<CohomologyGroup>> {
        self.cache.cohomology(&self.whole, m, degree)
    }

    pub fn local(&self, v: usize, m: &Arc<GModule>, degree: usize) -> Result<Arc<CohomologyGroup>> {
        self.cache.cohomology(&self.places[v].decomposition, m, degree)
    }

    pub fn local_sum(&self, m: &Arc<GModule>, degree: usize) -> Result<LocalSum> {
        let parts = (0..self.places.len()).map(|v| self.local(v, m, degree)).collect::<Result<Vec<_>>>()?;
        let mut moduli = Vec::new();
        let mut offsets = vec![0];
        for p in &parts {
            moduli.extend_from_slice(p.carrier.moduli());
            offsets.push(moduli.len());
        }
        Ok(LocalSum { group: FiniteAbelianGroup::diagonal(moduli), parts, offsets })
    }

    /// `inv_v` of a 2-cocycle on `G_v` with values in `C`.
    pub fn invariant(&self, v: usize, z: &Cochain) -> Result<i64> {
        let h2 = self.local(v, self.coefficient.module(), 2)?;
        let x = h2.reduce(z)?;
        let n = self.n();
        Ok(x.iter().zip(&self.places[v].invariant).fold(0, |acc, (a, b)| (acc + a * b).mod_floor(&n)))
    }

    /// The class of `c` restricted to `G_v`.
    pub fn localize_cocycle(&self, v: usize, c: &Cochain) -> Result<Vec<i64>> {
        let local = self.local(v, c.module(), c.degree())?;
        local.reduce(&c.restrict(&self.places[v].decomposition)?)
    }

    /// `H^i(G, M) → ⊕_v H^i(G_v, M)`.
    pub fn localization_map(&self, m: &Arc<GModule>, degree: usize) -> Result<AbHom> {
        let global = self.global(m, degree)?;
        let sum = self.local_sum(m, degree)?;
        let images = global
            .representatives()
            .iter()
            .map(|rep| {
                let parts = (0..self.places.len()).map(|v| self.localize_cocycle(v, rep)).collect::<Result<Vec<_>>>()?;
                Ok(sum.join(&parts))
            })
            .collect::<Result<Vec<_>>>()?;
        AbHom::from_images(global.carrier.clone(), sum.group.clone(), &images)
    }

    /// Localization of a global class.
    pub fn localize(&self, m: &Arc<GModule>, phi: &[i64]) -> Result<Vec<i64>> {
        Ok(self.localization_map(m, 1)?.apply(phi))
    }

    /// Restriction `H^i(G_v, M) → H^i(I_v, M)`.
    pub fn inertia_restriction(&self, v: usize, m: &Arc<GModule>) -> Result<AbHom> {
        let src = self.local(v, m, 1)?;
        let tgt = self.cache.cohomology(&self.places[v].inertia, m, 1)?;
        let images = src
            .representatives()
            .iter()
            .map(|r| tgt.reduce(&r.restrict(&self.places[v].inertia)?))
            .collect::<Result<Vec<_>>>()?;
        AbHom::from_images(src.carrier.clone(), tgt.carrier.clone(), &images)
    }

    pub fn unramified_subgroup(&self, v: usize, m: &Arc<GModule>) -> Result<SubgroupPresentation> {
        let r = self.inertia_restriction(v, m)?;
        Ok(if r.target().rank() == 0 { SubgroupPresentation::whole(r.source()) } else { r.kernel() })
    }

    /// Sum of the unramified subgroups inside the local sum.
    pub fn unramified_conditions(&self, m: &Arc<GModule>) -> Result<SubgroupPresentation> {
        let sum = self.local_sum(m, 1)?;
        let mut gens = Vec::new();
        for v in 0..self.places.len() {
            for g in self.unramified_subgroup(v, m)?.generators() {
                gens.push(sum.embed(v, &g));
            }
        }
        Ok(crate::lattice::subgroup(&sum.group, &gens))
    }

    /// `inv_v(a ∪ b)` on `H¹(G_v, M) × H¹(G_v, M^∨)` through the evaluation pairing.
    pub fn local_pairing(&self, v: usize, m: &Arc<GModule>) -> Result<BilinearForm> {
        let dual = self.dual(m)?;
        let p = evaluation_pairing(m.clone(), dual.clone(), &self.coefficient)?;
        self.local_pairing_with(v, &p)
    }

    /// `inv_v(a ∪_P b)` for any pairing `P: L × R → C`.
    pub fn local_pairing_with(&self, v: usize, p: &ModulePairing) -> Result<BilinearForm> {
        let left = self.local(v, &p.left, 1)?;
        let right = self.local(v, &p.right, 1)?;
        let mut table = Vec::with_capacity(left.carrier.rank());
        for a in left.representatives() {
            let mut row = Vec::with_capacity(right.carrier.rank());
            for b in right.representatives() {
                row.push(self.invariant(v, &a.cup(b, p)?)?);
            }
            table.push(row);
        }
        BilinearForm::new(left.carrier.clone(), right.carrier.clone(), self.n(), table)
    }

    /// Sum over places of the local pairings, on `⊕_v H¹(G_v, M) × ⊕_v H¹(G_v, M^∨)`.
    pub fn total_pairing(&self, m: &Arc<GModule>) -> Result<BilinearForm> {
        let dual = self.dual(m)?;
        let p = evaluation_pairing(m.clone(), dual, &self.coefficient)?;
        self.total_pairing_with(&p)
    }

    pub fn total_pairing_with(&self, p: &ModulePairing) -> Result<BilinearForm> {
        let left = self.local_sum(&p.left, 1)?;
        let right = self.local_sum(&p.right, 1)?;
        let mut table = vec![vec![0; right.group.rank()]; left.group.rank()];
        for v in 0..self.places.len() {
            let local = self.local_pairing_with(v, p)?;
            for (i, row) in local.table.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    table[left.offsets[v] + i][right.offsets[v] + j] = *x;
                }
            }
        }
        BilinearForm::new(left.group.clone(), right.group.clone(), self.n(), table)
    }

    /// Image of the global classes in the local sum.
    pub fn global_image(&self, m: &Arc<GModule>) -> Result<SubgroupPresentation> {
        Ok(self.localization_map(m, 1)?.image())
    }

    /// Map on local sums induced by a module map.
    pub fn local_map(&self, f: &GModuleHom, degree: usize) -> Result<AbHom> {
        let src = self.local_sum(&f.source, degree)?;
        let tgt = self.local_sum(&f.target, degree)?;
        let mut images = Vec::with_capacity(src.group.rank());
        for (v, part) in src.parts.iter().enumerate() {
            for rep in part.representatives() {
                let y = tgt.parts[v].reduce(&rep.map(f)?)?;
                images.push(tgt.embed(v, &y));
            }
        }
        AbHom::from_images(src.group.clone(), tgt.group.clone(), &images)
    }

    /// Map on global cohomology induced by a module map.
    pub fn global_map(&self, f: &GModuleHom, degree: usize) -> Result<AbHom> {
        let src = self.global(&f.source, degree)?;
        let tgt = self.global(&f.target, degree)?;
        let images = src.representatives().iter().map(|r| tgt.reduce(&r.map(f)?)).collect::<Result<Vec<_>>>()?;
        AbHom::from_images(src.carrier.clone(), tgt.carrier.clone(), &images)
    }

    /// Kernel of localization in degree `i` (the Ш group).
    pub fn sha(&self, m: &Arc<GModule>, degree: usize) -> Result<SubgroupPresentation> {
        let loc = self.localization_map(m, degree)?;
        Ok(if loc.target().rank() == 0 { SubgroupPresentation::whole(loc.source()) } else { loc.kernel() })
    }

    /// Per-place `(|G_v|, |I_v|, inv_v)`, for comparing fixtures up to relabelling.
    pub fn shape(&self) -> Vec<(usize, usize, Vec<i64>)> {
        self.places.iter().map(|p| (p.decomposition.order(), p.inertia.order(), p.invariant.clone())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu(f: &ArithmeticFixture, k: i64) -> Arc<GModule> {
        Arc::new(f.coefficient().torsion(k))
    }

    #[test]
    fn dbl4_local_pairing_is_perfect() {
        let f = ArithmeticFixture::dbl4();
        let m = mu(&f, 2);
        let p = f.local_pairing(0, &m).unwrap();
        assert_eq!(p.table, vec![vec![2]]);
        assert!(p.is_perfect());
    }

    #[test]
    fn dbl4_total_pairing_vanishes_on_split_support() {
        let f = ArithmeticFixture::dbl4();
        let m = mu(&f, 2);
        let t = f.total_pairing(&m).unwrap();
        assert_eq!(t.eval(&[1, 0], &[0, 1]), 0);
        assert_eq!(t.eval(&[1, 0], &[1, 0]), 2);
    }

    #[test]
    fn full_inertia_kills_unramified() {
        let f = ArithmeticFixture::dbl4();
        let m = mu(&f, 2);
        assert!(f.unramified_subgroup(0, &m).unwrap().is_trivial());
    }

    #[test]
    fn trivial_inertia_keeps_everything() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let c = CoefficientModule::new(g.clone(), 4, vec![1, 3]).unwrap();
        let whole = Arc::new(Subgroup::whole(g.clone()));
        let triv = Arc::new(Subgroup::trivial(g.clone()));
        let place = Place { label: "v".into(), decomposition: whole, inertia: triv, invariant: vec![2] };
        let f = ArithmeticFixture::new("t", g, c, vec![place]).unwrap();
        let m = mu(&f, 2);
        assert!(f.unramified_subgroup(0, &m).unwrap().is_whole());
    }

    #[test]
    fn intermediate_inertia_matches_enumeration() {
        let g = Arc::new(FiniteGroup::cyclic(4));
        let c = CoefficientModule::new(g.clone(), 4, vec![1, 1, 1, 1]).unwrap();
        let whole = Arc::new(Subgroup::whole(g.clone()));
        let mid = Arc::new(Subgroup::generated_by(g.clone(), &[2]));
        let h2 = cohomology_rank(&whole, c.module());
        let place = Place { label: "v".into(), decomposition: whole.clone(), inertia: mid.clone(), invariant: vec![0; h2] };
        let f = ArithmeticFixture::new("t", g.clone(), c, vec![place]).unwrap();
        let m = Arc::new(GModule::cyclic(g.clone(), 2, &[1, 1, 1, 1]).unwrap());
        let unr = f.unramified_subgroup(0, &m).unwrap();
        // H¹(Z/4, Z/2) = Hom(Z/4, Z/2); the unramified homs kill the subgroup {0, 2}.
        let h1 = f.local(0, &m, 1).unwrap();
        let mut count = 0;
        for x in h1.elements() {
            let rep = h1.representative(&x);
            let dies = rep.restrict(&mid).unwrap().values().iter().all(|&v| v == 0);
            assert_eq!(dies, unr.contains(&x));
            count += dies as usize;
        }
        assert_eq!(count as u128, unr.order());
        assert_eq!(count, 2);
    }

    fn cohomology_rank(h: &Arc<Subgroup>, m: &Arc<GModule>) -> usize {
        crate::cohomology::cohomology(h, m, 2).unwrap().carrier.rank()
    }

    #[test]
    fn localization_is_a_homomorphism_and_natural() {
        let f = ArithmeticFixture::dbl4();
        let m4 = mu(&f, 4);
        let m2 = mu(&f, 2);
        let pi = GModuleHom::new(m4.clone(), m2.clone(), AbHom::new(m4.underlying().clone(), m2.underlying().clone(), vec![vec![1]]).unwrap()).unwrap();
        let loc4 = f.localization_map(&m4, 1).unwrap();
        let loc2 = f.localization_map(&m2, 1).unwrap();
        let lhs = f.local_map(&pi, 1).unwrap().compose(&loc4);
        let rhs = loc2.compose(&f.global_map(&pi, 1).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn wrong_invariant_length_is_rejected() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let c = CoefficientModule::new(g.clone(), 4, vec![1, 3]).unwrap();
        let whole = Arc::new(Subgroup::whole(g.clone()));
        let place = Place { label: "v".into(), decomposition: whole.clone(), inertia: whole, invariant: vec![2, 0] };
        assert!(matches!(ArithmeticFixture::new("t", g, c, vec![place]), Err(Error::Parse(_))));
    }
}
