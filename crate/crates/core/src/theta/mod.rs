//! Theta groups: central extensions `0 → C → 𝓗 → M → 0` of G-groups,
//! presented by a factor set `c` and a twist `θ`.
//!
//! Elements are pairs `(α, m)` with
//! `(α, m)(α′, m′) = (α + α′ + c(m, m′), m + m′)` and
//! `σ(α, m) = (σα + θ_σ(m), σm)`.

mod cochains;
mod doubled;
mod finite;
mod lemmas;
mod setting;

use std::sync::Arc;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use cochains::HCochain;
pub use doubled::{check_doubled, DOUBLED_ANTISYMMETRIC, DOUBLED_DIAGONAL, DOUBLED_F2, DOUBLED_PS};
pub use finite::{
    construct_finite_theta, isotropy_from_level_two, FiniteTheta, FiniteThetaData, COMMUTATOR_P0, GAMMA, LEVEL_TWO, Q_EVEN,
    Q_HOMOGENEOUS,
};
pub use lemmas::{cochain_lemma_suite, CONNECTING, DEFECT, DEFECT_CHANGE, PRODUCT, SECTION, STATEMENT_FORM};
pub use setting::{AssumptionReport, PoonenStoll, ThetaSetting, PS_SECTION, THETA_ALTERNATING, THETA_ISOTROPIC, THETA_MAIN};

use crate::cochain::Cochain;
use crate::cohomology::CohomologyCache;
use crate::ctp::PairingValue;
use crate::error::{Error, Result};
use crate::fixture::{ArithmeticFixture, Verdict};
use crate::group::Subgroup;
use crate::lattice::{AbHom, SubgroupPresentation};
use crate::module::{double_dual_map, dual_hom, dual_module, evaluation_pairing, CoefficientModule, GModule, GModuleHom};
use crate::report::Check;

/// Largest module the element tables are built for.
pub const MAX_ELEMENTS: usize = 1024;
const EXHAUSTIVE_TRIPLES: usize = 1 << 21;
const SAMPLED_TRIPLES: usize = 1 << 16;

/// An element `(α, m)` of a theta group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HElem {
    pub alpha: i64,
    pub m: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct ThetaPresentation {
    coefficient: CoefficientModule,
    module: Arc<GModule>,
    size: usize,
    c: Vec<i64>,
    theta: Vec<i64>,
    add: Vec<usize>,
    act: Vec<usize>,
}

fn element_count(m: &GModule) -> Result<usize> {
    usize::try_from(m.underlying().order())
        .ok()
        .filter(|&s| s <= MAX_ELEMENTS)
        .ok_or_else(|| Error::InvalidTheta(format!("module has more than {MAX_ELEMENTS} elements")))
}

impl ThetaPresentation {
    /// `c[i·|M| + j] = c(m_i, m_j)` and `theta[g·|M| + i] = θ_g(m_i)`, indices in element order.
    pub fn new(coefficient: CoefficientModule, module: Arc<GModule>, c: Vec<i64>, theta: Vec<i64>) -> Result<Self> {
        if **coefficient.group() != **module.group() {
            return Err(Error::GroupMismatch);
        }
        let size = element_count(&module)?;
        let order = module.group().order();
        if c.len() != size * size || theta.len() != order * size {
            return Err(Error::InvalidTheta("factor set or twist table has the wrong size".into()));
        }
        let n = coefficient.n();
        let u = module.underlying();
        let elems: Vec<Vec<i64>> = u.elements().collect();
        let mut add = Vec::with_capacity(size * size);
        for a in &elems {
            for b in &elems {
                add.push(u.index_of(&u.add(a, b)));
            }
        }
        let mut act = Vec::with_capacity(order * size);
        for g in 0..order {
            for a in &elems {
                act.push(u.index_of(&module.act(g, a)));
            }
        }
        let h = ThetaPresentation {
            coefficient,
            module,
            size,
            c: c.into_iter().map(|x| x.mod_floor(&n)).collect(),
            theta: theta.into_iter().map(|x| x.mod_floor(&n)).collect(),
            add,
            act,
        };
        let v = h.check_axioms();
        if !v.pass {
            return Err(Error::InvalidTheta(v.witness.unwrap_or_default()));
        }
        Ok(h)
    }

    pub fn from_fns(
        coefficient: CoefficientModule,
        module: Arc<GModule>,
        c: impl Fn(&[i64], &[i64]) -> i64,
        theta: impl Fn(usize, &[i64]) -> i64,
    ) -> Result<Self> {
        element_count(&module)?;
        let elems: Vec<Vec<i64>> = module.underlying().elements().collect();
        let table = elems.iter().flat_map(|a| elems.iter().map(|b| c(a, b)).collect::<Vec<_>>()).collect();
        let twist = (0..module.group().order()).flat_map(|g| elems.iter().map(|a| theta(g, a)).collect::<Vec<_>>()).collect();
        Self::new(coefficient, module, table, twist)
    }

    /// `C × M` with the product group structure and action.
    pub fn trivial(coefficient: CoefficientModule, module: Arc<GModule>) -> Result<Self> {
        Self::from_fns(coefficient, module, |_, _| 0, |_, _| 0)
    }

    pub fn coefficient(&self) -> &CoefficientModule {
        &self.coefficient
    }

    pub fn module(&self) -> &Arc<GModule> {
        &self.module
    }

    pub fn n(&self) -> i64 {
        self.coefficient.n()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn index(&self, m: &[i64]) -> usize {
        self.module.underlying().index_of(m)
    }

    pub fn c(&self, m: &[i64], m2: &[i64]) -> i64 {
        self.c[self.index(m) * self.size + self.index(m2)]
    }

    pub fn theta(&self, g: usize, m: &[i64]) -> i64 {
        self.theta[g * self.size + self.index(m)]
    }

    /// Rows indexed by element order of `M`.
    pub fn factor_table(&self) -> Vec<Vec<i64>> {
        self.c.chunks(self.size).map(<[i64]>::to_vec).collect()
    }

    pub fn twist_table(&self) -> Vec<Vec<i64>> {
        self.theta.chunks(self.size).map(<[i64]>::to_vec).collect()
    }

    pub fn identity(&self) -> HElem {
        HElem { alpha: 0, m: self.module.underlying().zero() }
    }

    pub fn central(&self, alpha: i64) -> HElem {
        HElem { alpha: alpha.mod_floor(&self.n()), m: self.module.underlying().zero() }
    }

    pub fn mul(&self, x: &HElem, y: &HElem) -> HElem {
        let u = self.module.underlying();
        HElem { alpha: (x.alpha + y.alpha + self.c(&x.m, &y.m)).mod_floor(&self.n()), m: u.add(&x.m, &y.m) }
    }

    pub fn inv(&self, x: &HElem) -> HElem {
        let neg = self.module.underlying().neg(&x.m);
        HElem { alpha: (-x.alpha - self.c(&x.m, &neg)).mod_floor(&self.n()), m: neg }
    }

    pub fn act(&self, g: usize, x: &HElem) -> HElem {
        let alpha = (self.coefficient.unit(g) * x.alpha + self.theta(g, &x.m)).mod_floor(&self.n());
        HElem { alpha, m: self.module.act(g, &x.m) }
    }

    /// `x y x⁻¹ y⁻¹`.
    pub fn commutator(&self, x: &HElem, y: &HElem) -> HElem {
        let xy = self.mul(x, y);
        let yx = self.mul(y, x);
        self.mul(&xy, &self.inv(&yx))
    }

    /// Normalization, the cocycle identity and the two action identities.
    pub fn check_axioms(&self) -> Verdict {
        let (s, n) = (self.size, self.n());
        let id = self.module.group().identity();
        for i in 0..s {
            if self.c[i] != 0 || self.c[i * s] != 0 {
                return Verdict::fail(format!("c is not normalized at element {i}"));
            }
            if self.theta[id * s + i] != 0 {
                return Verdict::fail(format!("theta of the identity is nonzero at element {i}"));
            }
        }
        let assoc = |i: usize, j: usize, k: usize| {
            let lhs = self.c[i * s + j] + self.c[self.add[i * s + j] * s + k];
            let rhs = self.c[j * s + k] + self.c[i * s + self.add[j * s + k]];
            (lhs - rhs).mod_floor(&n) == 0
        };
        let fail_assoc = |i: usize, j: usize, k: usize| Verdict::fail(format!("associativity fails on elements ({i}, {j}, {k})"));
        if s.saturating_mul(s).saturating_mul(s) <= EXHAUSTIVE_TRIPLES {
            for i in 0..s {
                for j in 0..s {
                    for k in 0..s {
                        if !assoc(i, j, k) {
                            return fail_assoc(i, j, k);
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            for _ in 0..SAMPLED_TRIPLES {
                let (i, j, k) = (rng.gen_range(0..s), rng.gen_range(0..s), rng.gen_range(0..s));
                if !assoc(i, j, k) {
                    return fail_assoc(i, j, k);
                }
            }
        }
        let g = self.module.group();
        for a in 0..g.order() {
            let ua = self.coefficient.unit(a);
            for b in 0..g.order() {
                let ab = g.mul(a, b);
                for i in 0..s {
                    let lhs = self.theta[ab * s + i];
                    let rhs = ua * self.theta[b * s + i] + self.theta[a * s + self.act[b * s + i]];
                    if (lhs - rhs).mod_floor(&n) != 0 {
                        return Verdict::fail(format!("twist is not a crossed map at ({a}, {b}) on element {i}"));
                    }
                }
            }
            for i in 0..s {
                for j in 0..s {
                    let (ai, aj) = (self.act[a * s + i], self.act[a * s + j]);
                    let lhs = self.theta[a * s + self.add[i * s + j]] + ua * self.c[i * s + j];
                    let rhs = self.c[ai * s + aj] + self.theta[a * s + i] + self.theta[a * s + j];
                    if (lhs - rhs).mod_floor(&n) != 0 {
                        return Verdict::fail(format!("action is not by automorphisms: group element {a}, elements ({i}, {j})"));
                    }
                }
            }
        }
        Verdict::pass()
    }

    /// `P(m, m′) = c(m, m′) − c(m′, m)`, the commutator of any lifts.
    pub fn commutator_pairing(&self, m: &[i64], m2: &[i64]) -> i64 {
        (self.c(m, m2) - self.c(m2, m)).mod_floor(&self.n())
    }

    /// `f_𝓗: M → M^∨` with `P(m, m′) = ⟨m, f_𝓗(m′)⟩`.
    pub fn associated_map(&self) -> Result<GModuleHom> {
        let u = self.module.underlying();
        let n = self.n();
        let r = u.rank();
        let basis: Vec<Vec<i64>> = (0..r).map(|i| u.basis(i)).collect();
        let elems: Vec<Vec<i64>> = u.elements().collect();
        for a in &elems {
            for e in &basis {
                let left: i64 = a.iter().zip(&basis).map(|(k, b)| k * self.commutator_pairing(b, e)).sum();
                let right: i64 = a.iter().zip(&basis).map(|(k, b)| k * self.commutator_pairing(e, b)).sum();
                if (left - self.commutator_pairing(a, e)).mod_floor(&n) != 0
                    || (right - self.commutator_pairing(e, a)).mod_floor(&n) != 0
                {
                    return Err(Error::NotRealizable);
                }
            }
        }
        let d = u.moduli();
        let mut matrix = vec![vec![0; r]; r];
        for (i, row) in matrix.iter_mut().enumerate() {
            let step = n / d[i];
            for (j, entry) in row.iter_mut().enumerate() {
                let v = self.commutator_pairing(&basis[i], &basis[j]);
                if v % step != 0 {
                    return Err(Error::NotRealizable);
                }
                *entry = v / step;
            }
        }
        let dual = Arc::new(dual_module(&self.module, &self.coefficient)?);
        GModuleHom::new(self.module.clone(), dual.clone(), AbHom::new(u.clone(), dual.underlying().clone(), matrix)?)
    }

    /// `f_𝓗^∨ ∘ β = −f_𝓗`.
    pub fn check_dual_antisymmetry(&self) -> Result<Verdict> {
        let fh = self.associated_map()?;
        let lhs = dual_hom(&fh, &self.coefficient)?.compose(&double_dual_map(self.module.clone(), &self.coefficient)?);
        let rhs = fh.neg();
        Ok(Verdict::from_bool(lhs.map == rhs.map, || format!("f^dual = {:?}, -f = {:?}", lhs.map.matrix(), rhs.map.matrix())))
    }

    /// The preimage of `ι(M₁)`, presented over `M₁`.
    pub fn pullback(&self, iota: &GModuleHom) -> Result<Self> {
        if *iota.target != *self.module {
            return Err(Error::NotWellDefined("map does not land in the theta module".into()));
        }
        Self::from_fns(
            self.coefficient.clone(),
            iota.source.clone(),
            |a, b| self.c(&iota.apply(a), &iota.apply(b)),
            |g, a| self.theta(g, &iota.apply(a)),
        )
    }

    /// Whether `c` is symmetric, i.e. the group is commutative.
    pub fn is_commutative(&self) -> bool {
        let s = self.size;
        (0..s).all(|i| (0..s).all(|j| self.c[i * s + j] == self.c[j * s + i]))
    }

    /// `𝓗 × 𝓗` modulo the diagonal copy of `C`, over `M ⊕ M`; `C` is identified through `(α, β) ↦ α − β`.
    pub fn doubled(&self) -> Result<Self> {
        let r = self.module.rank();
        let sum = Arc::new(self.module.direct_sum(&self.module));
        Self::from_fns(
            self.coefficient.clone(),
            sum,
            |x, y| self.c(&x[..r], &y[..r]) - self.c(&x[r..], &y[r..]),
            |g, x| self.theta(g, &x[..r]) - self.theta(g, &x[r..]),
        )
    }

    /// `db` for `b(σ) = (0, a(σ))`; a `C`-valued 2-cocycle when `a` is a 1-cocycle.
    pub fn connecting_cocycle(&self, a: &Cochain) -> Result<Cochain> {
        if a.degree() != 1 {
            return Err(Error::NotACocycle);
        }
        let db = HCochain::lift(self, a)?.differential(self)?;
        if !db.m.is_zero() {
            return Err(Error::NotACocycle);
        }
        Ok(db.alpha)
    }

    /// `q_{𝓗,H}(φ)` in the coordinates of `H²(H, C)`.
    pub fn q(&self, cache: &CohomologyCache, h: &Arc<Subgroup>, phi: &[i64]) -> Result<Vec<i64>> {
        let h1 = cache.cohomology(h, &self.module, 1)?;
        let h2 = cache.cohomology(h, self.coefficient.module(), 2)?;
        h2.reduce(&self.connecting_cocycle(&h1.representative(phi))?)
    }
}

/// `Σ_v inv_v(q_{𝓗,G_v}(φ_v))` for one local cocycle per place.
pub fn q_loc_sum_cocycles(f: &ArithmeticFixture, h: &ThetaPresentation, cocycles: &[Cochain]) -> Result<PairingValue> {
    let mut total = PairingValue::zero(f.n());
    for (v, z) in cocycles.iter().enumerate() {
        total = total + PairingValue::new(f.invariant(v, &h.connecting_cocycle(z)?)?, f.n());
    }
    Ok(total)
}

/// `q_loc-sum` of a tuple in local-sum coordinates.
pub fn q_loc_sum(f: &ArithmeticFixture, h: &ThetaPresentation, tuple: &[i64]) -> Result<PairingValue> {
    let sum = f.local_sum(h.module(), 1)?;
    let reps: Vec<Cochain> = (0..f.places().len()).map(|v| sum.parts[v].representative(sum.component(tuple, v))).collect();
    q_loc_sum_cocycles(f, h, &reps)
}

/// `q_loc-sum` vanishes on `W`. Generators and all sums of two generators suffice
/// because the polarization of `q` is bilinear.
pub fn is_isotropic(f: &ArithmeticFixture, h: &ThetaPresentation, w: &SubgroupPresentation) -> Result<Verdict> {
    let gens = w.generators();
    for i in 0..gens.len() {
        for j in i..gens.len() {
            for x in [gens[i].clone(), w.ambient.add(&gens[i], &gens[j])] {
                let q = q_loc_sum(f, h, &x)?;
                if !q.is_zero() {
                    return Ok(Verdict::fail(format!("q_loc_sum({x:?}) = {q}")));
                }
            }
        }
    }
    Ok(Verdict::pass())
}

pub const ZARHIN: &str = "polarization: q(phi+psi) - q(phi) - q(psi) = phi cup f_H(psi)";

/// Checks the polarization identity on every pair of classes in `H¹(H, M)`.
pub fn check_zarhin(h: &ThetaPresentation, cache: &CohomologyCache, sub: &Arc<Subgroup>) -> Result<Check> {
    let fh = h.associated_map()?;
    let eval = evaluation_pairing(h.module().clone(), fh.target.clone(), h.coefficient())?;
    let h1 = cache.cohomology(sub, h.module(), 1)?;
    let h2 = cache.cohomology(sub, h.coefficient().module(), 2)?;
    let elems = h1.elements();
    let qs = elems.iter().map(|x| h.q(cache, sub, x)).collect::<Result<Vec<_>>>()?;
    for (i, a) in elems.iter().enumerate() {
        for (j, b) in elems.iter().enumerate() {
            let sum = h1.carrier.add(a, b);
            let k = elems.iter().position(|x| *x == sum).expect("closed under addition");
            let lhs = h2.carrier.sub(&h2.carrier.sub(&qs[k], &qs[i]), &qs[j]);
            let cup = h1.representative(a).cup(&h1.representative(b).map(&fh)?, &eval)?;
            let rhs = h2.reduce(&cup)?;
            if lhs != rhs {
                return Ok(Check::fail(ZARHIN, format!("phi={a:?} psi={b:?}: {lhs:?} vs {rhs:?}")));
            }
        }
    }
    Ok(Check::pass(ZARHIN))
}

pub const Q_WELL_DEFINED: &str = "connecting map is constant on cohomology classes";

/// Compares `db` for random cohomologous representatives.
pub fn check_q_well_defined<R: Rng + ?Sized>(
    h: &ThetaPresentation,
    cache: &CohomologyCache,
    sub: &Arc<Subgroup>,
    trials: usize,
    rng: &mut R,
) -> Result<Check> {
    let h1 = cache.cohomology(sub, h.module(), 1)?;
    let h2 = cache.cohomology(sub, h.coefficient().module(), 2)?;
    for x in h1.elements() {
        let base = h.q(cache, sub, &x)?;
        for k in 0..trials {
            let shift = Cochain::random(sub.clone(), h.module().clone(), 0, rng)?.coboundary()?;
            let rep = h1.representative(&x).add(&shift)?;
            let got = h2.reduce(&h.connecting_cocycle(&rep)?)?;
            if got != base {
                return Ok(Check::fail(Q_WELL_DEFINED, format!("class {x:?}, trial {k}: {got:?} vs {base:?}")));
            }
        }
    }
    Ok(Check::pass(Q_WELL_DEFINED))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::lattice::FiniteAbelianGroup;

    fn dbl4_pieces() -> (ArithmeticFixture, Arc<GModule>) {
        let f = ArithmeticFixture::dbl4();
        let m = Arc::new(GModule::trivial_action(f.group().clone(), FiniteAbelianGroup::new(vec![2, 2]).unwrap()));
        (f, m)
    }

    /// `c(x, y) = 2·x₁y₂` on `(Z/2)²` with values in `Z/4`.
    pub(crate) fn symplectic(f: &ArithmeticFixture, m: &Arc<GModule>) -> ThetaPresentation {
        ThetaPresentation::from_fns(f.coefficient().clone(), m.clone(), |x, y| 2 * x[0] * y[1], |_, _| 0).unwrap()
    }

    #[test]
    fn symmetric_factor_set_has_zero_pairing() {
        let (f, m) = dbl4_pieces();
        let h = ThetaPresentation::from_fns(f.coefficient().clone(), m, |x, y| 2 * x[0] * y[0], |_, _| 0).unwrap();
        assert!(h.is_commutative());
        assert!(h.associated_map().unwrap().map.is_zero());
    }

    #[test]
    fn symplectic_commutator_table() {
        let (f, m) = dbl4_pieces();
        let h = symplectic(&f, &m);
        let elems: Vec<Vec<i64>> = m.underlying().elements().collect();
        for a in &elems {
            for b in &elems {
                let x = HElem { alpha: 1, m: a.clone() };
                let y = HElem { alpha: 3, m: b.clone() };
                let comm = h.commutator(&x, &y);
                let expected = (2 * (a[0] * b[1] - a[1] * b[0])).mod_floor(&4);
                assert_eq!(comm, h.central(expected));
                assert_eq!(h.commutator_pairing(a, b), expected);
            }
        }
        assert!(h.check_dual_antisymmetry().unwrap().pass);
    }

    #[test]
    fn group_laws_hold_exhaustively() {
        let (f, m) = dbl4_pieces();
        let h = symplectic(&f, &m);
        let elems: Vec<HElem> =
            (0..4).flat_map(|a| m.underlying().elements().map(move |x| HElem { alpha: a, m: x })).collect();
        for x in &elems {
            assert_eq!(h.mul(x, &h.inv(x)), h.identity());
            for y in &elems {
                for g in 0..2 {
                    assert_eq!(h.act(g, &h.mul(x, y)), h.mul(&h.act(g, x), &h.act(g, y)));
                }
                for z in &elems {
                    assert_eq!(h.mul(&h.mul(x, y), z), h.mul(x, &h.mul(y, z)));
                }
            }
        }
    }

    #[test]
    fn broken_factor_set_rejected() {
        let (f, m) = dbl4_pieces();
        let bad = ThetaPresentation::from_fns(f.coefficient().clone(), m, |x, y| x[0] * y[0] * y[1], |_, _| 0);
        assert!(matches!(bad, Err(Error::InvalidTheta(_))));
    }

    #[test]
    fn zarhin_and_representative_independence() {
        let (f, m) = dbl4_pieces();
        let h = symplectic(&f, &m);
        assert!(check_zarhin(&h, f.cache(), f.whole()).unwrap().passed());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(check_q_well_defined(&h, f.cache(), f.whole(), 5, &mut rng).unwrap().passed());
        assert!(h.q(f.cache(), f.whole(), &[0, 0]).unwrap().iter().all(|&x| x == 0));
    }

    #[test]
    fn zero_tuple_and_zero_conditions() {
        let (f, m) = dbl4_pieces();
        let h = symplectic(&f, &m);
        let sum = f.local_sum(&m, 1).unwrap();
        assert!(q_loc_sum(&f, &h, &sum.group.zero()).unwrap().is_zero());
        assert!(is_isotropic(&f, &h, &SubgroupPresentation::trivial(&sum.group)).unwrap().pass);
    }

    #[test]
    fn doubled_group_kills_the_diagonal() {
        let (f, m) = dbl4_pieces();
        let h = symplectic(&f, &m);
        let d = h.doubled().unwrap();
        for a in m.underlying().elements() {
            for b in m.underlying().elements() {
                let (aa, bb) = ([a.clone(), a.clone()].concat(), [b.clone(), b.clone()].concat());
                assert_eq!(d.c(&aa, &bb), 0);
            }
        }
        let g = Arc::new(FiniteGroup::cyclic(2));
        assert_eq!(g.order(), d.module().group().order());
    }
}
