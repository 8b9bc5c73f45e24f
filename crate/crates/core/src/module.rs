//! G-modules, equivariant maps, the coefficient module and duality.

use std::sync::Arc;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::lattice::{AbHom, FiniteAbelianGroup};

#[derive(Clone, Debug)]
pub struct GModule {
    group: Arc<FiniteGroup>,
    underlying: FiniteAbelianGroup,
    action: Vec<AbHom>,
}

impl PartialEq for GModule {
    fn eq(&self, other: &Self) -> bool {
        self.underlying == other.underlying && self.action == other.action && *self.group == *other.group
    }
}

impl Eq for GModule {}

impl GModule {
    /// `action[g]` is the matrix of `g` acting on `underlying`.
    pub fn new(group: Arc<FiniteGroup>, underlying: FiniteAbelianGroup, action: Vec<Vec<Vec<i64>>>) -> Result<Self> {
        if action.len() != group.order() {
            return Err(Error::InvalidGroup("one action matrix per group element is required".into()));
        }
        let action: Vec<AbHom> = action
            .into_iter()
            .map(|m| AbHom::new(underlying.clone(), underlying.clone(), m))
            .collect::<Result<_>>()?;
        let module = GModule { group, underlying, action };
        module.validate()?;
        Ok(module)
    }

    fn validate(&self) -> Result<()> {
        let g = &self.group;
        if self.action[g.identity()] != AbHom::identity(self.underlying.clone()) {
            return Err(Error::InvalidGroup("identity must act trivially".into()));
        }
        for a in 0..g.order() {
            for b in 0..g.order() {
                if self.action[g.mul(a, b)] != self.action[a].compose(&self.action[b]) {
                    return Err(Error::InvalidGroup(format!("action is not multiplicative at ({a},{b})")));
                }
            }
        }
        Ok(())
    }

    pub fn trivial_action(group: Arc<FiniteGroup>, underlying: FiniteAbelianGroup) -> Self {
        let action = vec![AbHom::identity(underlying.clone()); group.order()];
        GModule { group, underlying, action }
    }

    /// Zero module.
    pub fn zero(group: Arc<FiniteGroup>) -> Self {
        Self::trivial_action(group, FiniteAbelianGroup::trivial())
    }

    /// Cyclic `Z/n` with `g` acting by multiplication by `units[g]`.
    pub fn cyclic(group: Arc<FiniteGroup>, n: i64, units: &[i64]) -> Result<Self> {
        let underlying = FiniteAbelianGroup::cyclic(n);
        let action = units.iter().map(|&u| if n > 1 { vec![vec![u]] } else { vec![] }).collect();
        Self::new(group, underlying, action)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn underlying(&self) -> &FiniteAbelianGroup {
        &self.underlying
    }

    pub fn rank(&self) -> usize {
        self.underlying.rank()
    }

    pub fn action(&self, g: usize) -> &AbHom {
        &self.action[g]
    }

    pub fn act(&self, g: usize, m: &[i64]) -> Vec<i64> {
        self.action[g].apply(m)
    }

    pub fn exponent(&self) -> i64 {
        self.underlying.exponent()
    }

    pub fn is_trivial_action(&self) -> bool {
        self.action.iter().all(|a| *a == AbHom::identity(self.underlying.clone()))
    }

    /// Structural fingerprint used for memoizing cohomology.
    pub fn key(&self) -> Vec<i64> {
        let mut k = vec![self.group.order() as i64, self.rank() as i64];
        k.extend_from_slice(self.underlying.moduli());
        for a in &self.action {
            for row in a.matrix() {
                k.extend_from_slice(row);
            }
        }
        k
    }

    pub fn direct_sum(&self, other: &GModule) -> GModule {
        assert!(*self.group == *other.group, "direct sum over different groups");
        let underlying = self.underlying.direct_sum(&other.underlying);
        let (r1, r2) = (self.rank(), other.rank());
        let action = (0..self.group.order())
            .map(|g| {
                let mut m = vec![vec![0; r1 + r2]; r1 + r2];
                for i in 0..r1 {
                    for j in 0..r1 {
                        m[i][j] = self.action[g].matrix()[i][j];
                    }
                }
                for i in 0..r2 {
                    for j in 0..r2 {
                        m[r1 + i][r1 + j] = other.action[g].matrix()[i][j];
                    }
                }
                AbHom::new(underlying.clone(), underlying.clone(), m).expect("block action")
            })
            .collect();
        GModule { group: self.group.clone(), underlying, action }
    }

    /// The `G`-submodule carried by a subgroup stable under the action.
    pub fn submodule(self: &Arc<Self>, generators: &[Vec<i64>]) -> Result<GModuleHom> {
        let sub = crate::lattice::subgroup(&self.underlying, generators);
        let mut action = Vec::with_capacity(self.group.order());
        for g in 0..self.group.order() {
            let images = sub
                .generators()
                .iter()
                .map(|x| sub.coordinates(&self.act(g, x)).map_err(|_| Error::InvalidGroup("subgroup is not G-stable".into())))
                .collect::<Result<Vec<_>>>()?;
            action.push(AbHom::from_images(sub.carrier.clone(), sub.carrier.clone(), &images)?);
        }
        let module = Arc::new(GModule { group: self.group.clone(), underlying: sub.carrier.clone(), action });
        GModuleHom::new(module, self.clone(), sub.inclusion.clone())
    }

    /// Quotient by a `G`-stable subgroup, with its projection.
    pub fn quotient_module(self: &Arc<Self>, generators: &[Vec<i64>]) -> Result<GModuleHom> {
        let sub = crate::lattice::subgroup(&self.underlying, generators);
        let q = crate::lattice::quotient(&self.underlying, &sub)?;
        let mut action = Vec::with_capacity(self.group.order());
        for g in 0..self.group.order() {
            let images: Vec<Vec<i64>> =
                q.lifts.iter().map(|l| q.projection.apply(&self.act(g, l))).collect();
            action.push(AbHom::from_images(q.group.clone(), q.group.clone(), &images)?);
        }
        let module = GModule { group: self.group.clone(), underlying: q.group.clone(), action };
        module.validate().map_err(|_| Error::InvalidGroup("subgroup is not G-stable".into()))?;
        GModuleHom::new(self.clone(), Arc::new(module), q.projection.clone())
    }
}

/// The coefficient module `C = Z/N`, `g` acting by the unit `units[g]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientModule {
    n: i64,
    units: Vec<i64>,
    module: Arc<GModule>,
}

impl CoefficientModule {
    pub fn new(group: Arc<FiniteGroup>, n: i64, units: Vec<i64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGroup("N must be at least 2".into()));
        }
        let units: Vec<i64> = units.into_iter().map(|u| u.mod_floor(&n)).collect();
        if units.iter().any(|u| u.gcd(&n) != 1) {
            return Err(Error::InvalidGroup("action must be by units of Z/N".into()));
        }
        let module = Arc::new(GModule::cyclic(group, n, &units)?);
        Ok(CoefficientModule { n, units, module })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn unit(&self, g: usize) -> i64 {
        self.units[g]
    }

    pub fn units(&self) -> &[i64] {
        &self.units
    }

    pub fn module(&self) -> &Arc<GModule> {
        &self.module
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.module.group()
    }

    /// The module `C[k] = {x : kx = 0}`.
    pub fn torsion(&self, k: i64) -> GModule {
        let d = k.gcd(&self.n);
        let units: Vec<i64> = self.units.iter().map(|u| u.mod_floor(&d.max(1))).collect();
        GModule::cyclic(self.group().clone(), d.max(1), &units).expect("torsion of C")
    }
}

/// Equivariant homomorphism of G-modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GModuleHom {
    pub source: Arc<GModule>,
    pub target: Arc<GModule>,
    pub map: AbHom,
}

impl GModuleHom {
    pub fn new(source: Arc<GModule>, target: Arc<GModule>, map: AbHom) -> Result<Self> {
        if map.source() != source.underlying() || map.target() != target.underlying() {
            return Err(Error::NotWellDefined("map does not match the modules".into()));
        }
        if let Some(g) = check_equivariance(&source, &target, &map) {
            return Err(Error::NotEquivariant(g));
        }
        Ok(GModuleHom { source, target, map })
    }

    pub fn identity(m: Arc<GModule>) -> Self {
        let map = AbHom::identity(m.underlying().clone());
        GModuleHom { source: m.clone(), target: m, map }
    }

    pub fn zero(source: Arc<GModule>, target: Arc<GModule>) -> Self {
        let map = AbHom::zero(source.underlying().clone(), target.underlying().clone());
        GModuleHom { source, target, map }
    }

    pub fn apply(&self, m: &[i64]) -> Vec<i64> {
        self.map.apply(m)
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &GModuleHom) -> GModuleHom {
        GModuleHom { source: g.source.clone(), target: self.target.clone(), map: self.map.compose(&g.map) }
    }

    pub fn add(&self, other: &GModuleHom) -> GModuleHom {
        GModuleHom { source: self.source.clone(), target: self.target.clone(), map: self.map.add(&other.map) }
    }

    pub fn neg(&self) -> GModuleHom {
        GModuleHom { source: self.source.clone(), target: self.target.clone(), map: self.map.neg() }
    }
}

/// First group element at which `map` fails to commute with the actions.
pub fn check_equivariance(source: &GModule, target: &GModule, map: &AbHom) -> Option<usize> {
    (0..source.group().order()).find(|&g| map.compose(source.action(g)) != target.action(g).compose(map))
}

fn check_exponent(m: &GModule, c: &CoefficientModule) -> Result<()> {
    let e = m.exponent();
    if c.n() % e != 0 {
        return Err(Error::ExponentMismatch { exponent: e, n: c.n() });
    }
    Ok(())
}

/// `Hom(M, C)` with `(σf)(m) = σ·f(σ⁻¹m)`.
///
/// Coordinates: with `M = ⊕ Z/d_i`, the vector `y` is the homomorphism
/// `e_i ↦ y_i·N/d_i`, so `M^∨` has the same moduli as `M`.
pub fn dual_module(m: &GModule, c: &CoefficientModule) -> Result<GModule> {
    check_exponent(m, c)?;
    let n = c.n();
    let d = m.underlying().moduli();
    let k = m.rank();
    let g = m.group();
    let mut action = Vec::with_capacity(g.order());
    for s in 0..g.order() {
        let a = m.action(g.inv(s)).matrix();
        let u = c.unit(s);
        let mut mat = vec![vec![0; k]; k];
        for (j, row) in mat.iter_mut().enumerate() {
            for (i, entry) in row.iter_mut().enumerate() {
                let v = (u * (n / d[i]) % n * a[i][j]).mod_floor(&n);
                let step = n / d[j];
                debug_assert_eq!(v % step, 0);
                *entry = v / step;
            }
        }
        action.push(mat);
    }
    GModule::new(g.clone(), m.underlying().clone(), action)
}

/// `f^∨(φ) = φ ∘ f`, a map `M'^∨ → M^∨`.
pub fn dual_hom(f: &GModuleHom, c: &CoefficientModule) -> Result<GModuleHom> {
    let src_dual = Arc::new(dual_module(&f.target, c)?);
    let tgt_dual = Arc::new(dual_module(&f.source, c)?);
    dual_hom_between(f, c, src_dual, tgt_dual)
}

/// As [`dual_hom`], reusing already-built dual modules.
pub fn dual_hom_between(
    f: &GModuleHom,
    c: &CoefficientModule,
    target_dual: Arc<GModule>,
    source_dual: Arc<GModule>,
) -> Result<GModuleHom> {
    let n = c.n();
    let d = f.source.underlying().moduli();
    let dp = f.target.underlying().moduli();
    let fm = f.map.matrix();
    let matrix: Vec<Vec<i64>> = (0..d.len())
        .map(|j| {
            (0..dp.len())
                .map(|i| {
                    let v = ((n / dp[i]) * fm[i][j]).mod_floor(&n);
                    v / (n / d[j])
                })
                .collect()
        })
        .collect();
    let map = AbHom::new(target_dual.underlying().clone(), source_dual.underlying().clone(), matrix)?;
    GModuleHom::new(target_dual, source_dual, map)
}

/// Bilinear map of G-modules `L × R → T`, given on generator pairs.
#[derive(Clone, Debug)]
pub struct ModulePairing {
    pub left: Arc<GModule>,
    pub right: Arc<GModule>,
    pub target: Arc<GModule>,
    table: Vec<Vec<Vec<i64>>>,
}

impl ModulePairing {
    pub fn new(left: Arc<GModule>, right: Arc<GModule>, target: Arc<GModule>, table: Vec<Vec<Vec<i64>>>) -> Result<Self> {
        let t = target.underlying();
        if table.len() != left.rank() || table.iter().any(|r| r.len() != right.rank()) {
            return Err(Error::NotBilinear("table has the wrong shape".into()));
        }
        let table: Vec<Vec<Vec<i64>>> =
            table.into_iter().map(|r| r.into_iter().map(|v| t.reduce(&v)).collect()).collect();
        for (i, a) in left.underlying().moduli().iter().enumerate() {
            for (j, b) in right.underlying().moduli().iter().enumerate() {
                if !t.is_zero(&t.scale(*a, &table[i][j])) || !t.is_zero(&t.scale(*b, &table[i][j])) {
                    return Err(Error::NotBilinear(format!("entry ({i},{j})")));
                }
            }
        }
        Ok(ModulePairing { left, right, target, table })
    }

    pub fn eval(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let t = self.target.underlying();
        let mut acc = t.zero();
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if *y == 0 {
                    continue;
                }
                acc = t.add(&acc, &t.scale(x * y, &self.table[i][j]));
            }
        }
        acc
    }

    /// First group element `g` with `P(ga, gb) ≠ g·P(a, b)` on generators.
    pub fn equivariance_witness(&self) -> Option<usize> {
        let g = self.left.group();
        for s in 0..g.order() {
            for i in 0..self.left.rank() {
                for j in 0..self.right.rank() {
                    let a = self.left.underlying().basis(i);
                    let b = self.right.underlying().basis(j);
                    let lhs = self.eval(&self.left.act(s, &a), &self.right.act(s, &b));
                    let rhs = self.target.act(s, &self.eval(&a, &b));
                    if lhs != rhs {
                        return Some(s);
                    }
                }
            }
        }
        None
    }

    /// The pairing with its arguments exchanged.
    pub fn swapped(&self) -> ModulePairing {
        let table = (0..self.right.rank())
            .map(|j| (0..self.left.rank()).map(|i| self.table[i][j].clone()).collect())
            .collect();
        ModulePairing { left: self.right.clone(), right: self.left.clone(), target: self.target.clone(), table }
    }
}

/// `⟨m, f⟩ = f(m)` on `M × M^∨ → C`.
pub fn evaluation_pairing(m: Arc<GModule>, dual: Arc<GModule>, c: &CoefficientModule) -> Result<ModulePairing> {
    check_exponent(&m, c)?;
    let n = c.n();
    let d = m.underlying().moduli().to_vec();
    let table = (0..d.len())
        .map(|i| (0..d.len()).map(|j| vec![if i == j { n / d[i] } else { 0 }]).collect())
        .collect();
    ModulePairing::new(m, dual, c.module().clone(), table)
}

/// `β: M → (M^∨)^∨`, `β(m)(f) = f(m)`. In dual coordinates it is the identity matrix.
pub fn double_dual_map(m: Arc<GModule>, c: &CoefficientModule) -> Result<GModuleHom> {
    let dual = dual_module(&m, c)?;
    let double = Arc::new(dual_module(&dual, c)?);
    let map = AbHom::identity(m.underlying().clone());
    let map = AbHom::new(m.underlying().clone(), double.underlying().clone(), map.matrix().to_vec())?;
    GModuleHom::new(m, double, map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dbl4() -> (Arc<FiniteGroup>, CoefficientModule) {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let c = CoefficientModule::new(g.clone(), 4, vec![1, 3]).unwrap();
        (g, c)
    }

    /// Brute-force dual: enumerate all homomorphisms M → C as value tables.
    fn brute_dual_action(m: &GModule, c: &CoefficientModule, s: usize, f: &[i64]) -> Vec<i64> {
        let g = m.group();
        m.underlying()
            .elements()
            .map(|x| {
                let idx = m.underlying().index_of(&m.act(g.inv(s), &x));
                (c.unit(s) * f[idx]).mod_floor(&c.n())
            })
            .collect()
    }

    fn as_table(m: &GModule, c: &CoefficientModule, y: &[i64]) -> Vec<i64> {
        let n = c.n();
        let d = m.underlying().moduli();
        m.underlying()
            .elements()
            .map(|x| x.iter().zip(y).zip(d).map(|((a, b), di)| a * b * (n / di)).sum::<i64>().mod_floor(&n))
            .collect()
    }

    #[test]
    fn dual_of_trivial_z2_over_dbl4_is_trivial() {
        let (g, c) = dbl4();
        let m = GModule::trivial_action(g, FiniteAbelianGroup::cyclic(2));
        let d = dual_module(&m, &c).unwrap();
        assert!(d.is_trivial_action());
        assert_eq!(d.underlying().order(), 2);
    }

    #[test]
    fn dual_matches_brute_force_action() {
        let (g, c) = dbl4();
        let modules = vec![
            GModule::cyclic(g.clone(), 4, &[1, 3]).unwrap(),
            GModule::new(g.clone(), FiniteAbelianGroup::new(vec![2, 4]).unwrap(), vec![
                vec![vec![1, 0], vec![0, 1]],
                vec![vec![1, 0], vec![2, 3]],
            ])
            .unwrap(),
            GModule::trivial_action(g.clone(), FiniteAbelianGroup::new(vec![2, 2]).unwrap()),
        ];
        for m in modules {
            let d = dual_module(&m, &c).unwrap();
            for y in d.underlying().elements() {
                for s in 0..2 {
                    assert_eq!(as_table(&m, &c, &d.act(s, &y)), brute_dual_action(&m, &c, s, &as_table(&m, &c, &y)));
                }
            }
        }
    }

    #[test]
    fn exponent_must_divide_n() {
        let (g, c) = dbl4();
        let m = GModule::trivial_action(g, FiniteAbelianGroup::cyclic(8));
        assert_eq!(dual_module(&m, &c), Err(Error::ExponentMismatch { exponent: 8, n: 4 }));
    }

    #[test]
    fn evaluation_pairing_is_equivariant_and_nondegenerate() {
        let (g, c) = dbl4();
        let m = Arc::new(GModule::trivial_action(g, FiniteAbelianGroup::new(vec![2, 2]).unwrap()));
        let d = Arc::new(dual_module(&m, &c).unwrap());
        let p = evaluation_pairing(m.clone(), d.clone(), &c).unwrap();
        assert_eq!(p.equivariance_witness(), None);
        for x in m.underlying().elements().filter(|x| !m.underlying().is_zero(x)) {
            assert!(d.underlying().elements().any(|y| p.eval(&x, &y) != vec![0]));
        }
        for y in d.underlying().elements().filter(|y| !d.underlying().is_zero(y)) {
            assert!(m.underlying().elements().any(|x| p.eval(&x, &y) != vec![0]));
        }
    }

    #[test]
    fn double_dual_is_an_equivariant_iso() {
        let (g, c) = dbl4();
        let m = Arc::new(GModule::cyclic(g, 4, &[1, 3]).unwrap());
        let b = double_dual_map(m.clone(), &c).unwrap();
        assert!(b.map.is_injective() && b.map.is_surjective());
    }

    #[test]
    fn equivariance_witness() {
        let (g, c) = dbl4();
        let trivial = GModule::trivial_action(g.clone(), FiniteAbelianGroup::cyclic(4));
        let id = AbHom::identity(FiniteAbelianGroup::cyclic(4));
        assert_eq!(check_equivariance(c.module(), &trivial, &id), Some(1));
        let neg = id.neg();
        assert_eq!(check_equivariance(&trivial, &trivial, &neg), None);
    }

    #[test]
    fn dual_reverses_composition() {
        let (g, c) = dbl4();
        let z4 = Arc::new(GModule::cyclic(g.clone(), 4, &[1, 3]).unwrap());
        let z2 = Arc::new(GModule::trivial_action(g, FiniteAbelianGroup::cyclic(2)));
        let pi = GModuleHom::new(z4.clone(), z2.clone(), AbHom::new(z4.underlying().clone(), z2.underlying().clone(), vec![vec![1]]).unwrap()).unwrap();
        let iota = GModuleHom::new(z2.clone(), z4.clone(), AbHom::new(z2.underlying().clone(), z4.underlying().clone(), vec![vec![2]]).unwrap()).unwrap();
        let lhs = dual_hom(&pi.compose(&iota), &c).unwrap();
        let rhs = dual_hom(&iota, &c).unwrap().compose(&dual_hom(&pi, &c).unwrap());
        assert_eq!(lhs.map, rhs.map);
        assert!(lhs.map.is_zero());
    }
}
