//! Theta groups built from a pairing `P₁` on `M[2λ]` and a refinement `e` on `M[2]`:
//! `𝓗 = (C × M[2λ]) / {(e(r), r) : r ∈ M[2]}` with `(α, x)(β, y) = (α + β + P₁(x, y), x + y)`,
//! mapping onto `M[λ]` by `x ↦ 2x`.

use std::sync::Arc;

use num_integer::Integer;

use super::{check_zarhin, q_loc_sum, HElem, ThetaPresentation};
use crate::cohomology::CohomologyCache;
use crate::error::{Error, Result};
use crate::fixture::{ArithmeticFixture, Verdict};
use crate::group::Subgroup;
use crate::lattice::{AbHom, FiniteAbelianGroup, SubgroupPresentation};
use crate::module::{CoefficientModule, GModule, GModuleHom, ModulePairing};
use crate::report::Check;
use crate::smod::{is_strict_epi, SModMorphism, SModObject};

#[derive(Clone, Debug)]
pub struct FiniteThetaData {
    pub coefficient: CoefficientModule,
    pub module: Arc<GModule>,
    /// A basis of `M[λ]`; coordinates on `M[λ]` refer to it.
    pub m0: Vec<Vec<i64>>,
    /// `P₁` on the generators of `M`.
    pub p1: Vec<Vec<i64>>,
    /// Nonzero values of `e` on `M[2]`.
    pub e: Vec<(Vec<i64>, i64)>,
}

#[derive(Clone, Debug)]
pub struct FiniteTheta {
    pub data: FiniteThetaData,
    /// `M[λ] → M`.
    pub lambda: GModuleHom,
    /// `M[2λ] → M`.
    pub two_lambda: GModuleHom,
    pub presentation: ThetaPresentation,
    p1: ModulePairing,
    /// `e` by element index of `M`.
    e: Vec<i64>,
    /// `t(y)` by element index of `M[λ]`.
    section: Vec<Vec<i64>>,
}

pub const COMMUTATOR_P0: &str = "finite construction: commutator pairing is P0(m, n) = 2 P1(t m, t n)";
pub const GAMMA: &str = "finite construction: gamma is an equivariant involution over -1 fixing C";
pub const Q_EVEN: &str = "finite construction: q(-phi) = q(phi)";
pub const Q_HOMOGENEOUS: &str = "finite construction: q(a phi) = a^2 q(phi)";
pub const LEVEL_TWO: &str = "finite construction: q_loc_sum of a doubled class is the local sum of its P1 cup square";

pub fn construct_finite_theta(data: FiniteThetaData) -> Result<FiniteTheta> {
    let c = &data.coefficient.clone();
    let n = c.n();
    if n % 2 != 0 {
        return Err(Error::InvalidTheta("the construction needs an even coefficient modulus".into()));
    }
    let m = data.module.clone();
    let u = m.underlying();
    if u.order() > super::MAX_ELEMENTS as u128 {
        return Err(Error::InvalidTheta(format!("module has more than {} elements", super::MAX_ELEMENTS)));
    }
    if data.m0.iter().any(|x| x.len() != u.rank()) {
        return Err(Error::InvalidTheta("m0 generator has the wrong length".into()));
    }
    let m0: Vec<Vec<i64>> = data.m0.iter().map(|x| u.reduce(x)).collect();
    let orders: Vec<i64> = m0.iter().map(|x| u.element_order(x)).collect();
    let carrier = FiniteAbelianGroup::diagonal(orders);
    let incl = AbHom::from_images(carrier.clone(), u.clone(), &m0)?;
    if !incl.is_injective() {
        return Err(Error::InvalidTheta("the generators of M[lambda] are not a basis".into()));
    }
    let g = m.group().clone();
    let mut action = Vec::with_capacity(g.order());
    for s in 0..g.order() {
        let images = m0
            .iter()
            .map(|x| incl.solve(&m.act(s, x)).map(|y| carrier.reduce(&y)))
            .collect::<Result<Vec<_>>>()
            .map_err(|_| Error::InvalidTheta("M[lambda] is not G-stable".into()))?;
        action.push(AbHom::from_images(carrier.clone(), carrier.clone(), &images)?.matrix().to_vec());
    }
    let m_lambda = Arc::new(GModule::new(g.clone(), carrier.clone(), action)?);
    let lambda = GModuleHom::new(m_lambda.clone(), m.clone(), incl.clone())?;

    let elements: Vec<Vec<i64>> = u.elements().collect();
    let two_lambda_elems: Vec<Vec<i64>> = elements.iter().filter(|x| incl.solve(&u.scale(2, x)).is_ok()).cloned().collect();
    let two_lambda = m.submodule(&two_lambda_elems)?;
    let two_torsion: Vec<Vec<i64>> = elements.iter().filter(|x| u.is_zero(&u.scale(2, x))).cloned().collect();

    let p1 = ModulePairing::new(m.clone(), m.clone(), c.module().clone(), data.p1.iter().map(|r| r.iter().map(|&v| vec![v]).collect()).collect())?;
    let pv = |x: &[i64], y: &[i64]| p1.eval(x, y)[0];
    for x in &two_lambda_elems {
        for y in &two_lambda_elems {
            if (pv(x, y) + pv(y, x)).mod_floor(&n) != 0 {
                return Err(Error::InvalidTheta(format!("P1 is not antisymmetric at {x:?}, {y:?}")));
            }
            for s in 0..g.order() {
                if (pv(&m.act(s, x), &m.act(s, y)) - c.unit(s) * pv(x, y)).mod_floor(&n) != 0 {
                    return Err(Error::InvalidTheta(format!("P1 is not equivariant at {x:?}, {y:?}")));
                }
            }
        }
    }

    let mut e = vec![0; elements.len()];
    for (at, value) in &data.e {
        if at.len() != u.rank() || !u.is_zero(&u.scale(2, at)) {
            return Err(Error::InvalidTheta(format!("e is given at {at:?}, outside M[2]")));
        }
        e[u.index_of(&u.reduce(at))] = value.mod_floor(&n);
    }
    for x in &two_torsion {
        let ex = e[u.index_of(x)];
        if (2 * ex) % n != 0 {
            return Err(Error::InvalidTheta(format!("2 e({x:?}) is not zero")));
        }
        for s in 0..g.order() {
            if (e[u.index_of(&m.act(s, x))] - c.unit(s) * ex).mod_floor(&n) != 0 {
                return Err(Error::InvalidTheta(format!("e is not equivariant at {x:?}")));
            }
        }
        for y in &two_torsion {
            let lhs = e[u.index_of(&u.add(x, y))] - ex - e[u.index_of(y)];
            if (lhs - pv(x, y)).mod_floor(&n) != 0 {
                return Err(Error::BadQuadraticRefinement { x: x.clone(), y: y.clone() });
            }
        }
    }

    let section = carrier
        .elements()
        .map(|y| {
            let target = incl.apply(&y);
            elements.iter().find(|x| u.scale(2, x) == target).cloned().ok_or(Error::DoublingNotSurjective)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut ft = FiniteTheta {
        presentation: ThetaPresentation::trivial(c.clone(), m_lambda.clone())?,
        data,
        lambda,
        two_lambda,
        p1,
        e,
        section,
    };
    let presentation = ThetaPresentation::from_fns(
        c.clone(),
        m_lambda,
        |a, b| {
            let (ta, tb) = (ft.t(a), ft.t(b));
            ft.reduce(ft.p(&ta, &tb), &u.add(&ta, &tb)).alpha
        },
        |s, a| ft.reduce(0, &m.act(s, &ft.t(a))).alpha,
    )?;
    ft.presentation = presentation;
    Ok(ft)
}

impl FiniteTheta {
    fn m(&self) -> &GModule {
        &self.data.module
    }

    fn n(&self) -> i64 {
        self.data.coefficient.n()
    }

    fn p(&self, x: &[i64], y: &[i64]) -> i64 {
        self.p1.eval(x, y)[0]
    }

    /// `M[λ]`.
    pub fn m_lambda(&self) -> &Arc<GModule> {
        &self.lambda.source
    }

    /// `M[2λ]`.
    pub fn m_two_lambda(&self) -> &Arc<GModule> {
        &self.two_lambda.source
    }

    /// The chosen `t(y) ∈ M[2λ]` with `2t(y) = y`, for `y` in `M[λ]` coordinates.
    pub fn t(&self, y: &[i64]) -> Vec<i64> {
        let carrier = self.m_lambda().underlying();
        self.section[carrier.index_of(&carrier.reduce(y))].clone()
    }

    /// The normal form `(α′, y)` of the class of `(α, x)`, `x ∈ M[2λ]`.
    pub fn reduce(&self, alpha: i64, x: &[i64]) -> HElem {
        let u = self.m().underlying();
        let y = self.lambda.map.solve(&u.scale(2, x)).expect("x lies in M[2 lambda]");
        let y = self.m_lambda().underlying().reduce(&y);
        let ty = self.t(&y);
        let r = u.sub(x, &ty);
        let alpha = (alpha - self.e[u.index_of(&r)] - self.p(&ty, &r)).mod_floor(&self.n());
        HElem { alpha, m: y }
    }

    /// Doubling `M[2λ] → M[λ]`.
    pub fn doubling(&self) -> Result<GModuleHom> {
        let src = self.m_two_lambda();
        let u = self.m().underlying();
        let images = (0..src.rank())
            .map(|j| {
                let x = self.two_lambda.apply(&src.underlying().basis(j));
                self.lambda.map.solve(&u.scale(2, &x))
            })
            .collect::<Result<Vec<_>>>()?;
        let map = AbHom::from_images(src.underlying().clone(), self.m_lambda().underlying().clone(), &images)?;
        GModuleHom::new(src.clone(), self.m_lambda().clone(), map)
    }

    /// `P₁` restricted to `M[2λ]`.
    pub fn level_two_pairing(&self) -> Result<ModulePairing> {
        let src = self.m_two_lambda();
        let basis: Vec<Vec<i64>> = (0..src.rank()).map(|j| self.two_lambda.apply(&src.underlying().basis(j))).collect();
        let table = basis.iter().map(|x| basis.iter().map(|y| vec![self.p(x, y)]).collect()).collect();
        ModulePairing::new(src.clone(), src.clone(), self.data.coefficient.module().clone(), table)
    }

    pub fn check_commutator_is_p0(&self) -> Verdict {
        let h = &self.presentation;
        let carrier = self.m_lambda().underlying();
        for a in carrier.elements() {
            for b in carrier.elements() {
                let p0 = (2 * self.p(&self.t(&a), &self.t(&b))).mod_floor(&self.n());
                let got = h.commutator_pairing(&a, &b);
                if got != p0 {
                    return Verdict::fail(format!("({a:?}, {b:?}): {got} vs {p0}"));
                }
            }
        }
        Verdict::pass()
    }

    /// `γ[α, m] = [α, −t(m)]`, lifting `−1`.
    pub fn gamma(&self, x: &HElem) -> HElem {
        let u = self.m().underlying();
        let tm = self.t(&x.m);
        self.reduce(x.alpha, &u.neg(&tm))
    }

    pub fn check_gamma(&self) -> Verdict {
        let h = &self.presentation;
        let carrier = self.m_lambda().underlying();
        let n = self.n();
        let elems: Vec<HElem> =
            carrier.elements().flat_map(|m| (0..n).map(move |alpha| HElem { alpha, m: m.clone() })).collect();
        for x in &elems {
            let gx = self.gamma(x);
            if gx.m != carrier.neg(&x.m) {
                return Verdict::fail(format!("gamma{x:?} does not lie over -m"));
            }
            if self.gamma(&gx) != *x {
                return Verdict::fail(format!("gamma is not an involution at {x:?}"));
            }
            for s in 0..self.m().group().order() {
                if self.gamma(&h.act(s, x)) != h.act(s, &gx) {
                    return Verdict::fail(format!("gamma is not equivariant at {x:?}, g={s}"));
                }
            }
        }
        for alpha in 0..n {
            let z = h.central(alpha);
            if self.gamma(&z) != z {
                return Verdict::fail(format!("gamma moves the central element {alpha}"));
            }
        }
        for x in elems.iter().filter(|x| x.alpha == 0) {
            for y in elems.iter().filter(|y| y.alpha == 0) {
                if self.gamma(&h.mul(x, y)) != h.mul(&self.gamma(x), &self.gamma(y)) {
                    return Verdict::fail(format!("gamma is not multiplicative at {x:?}, {y:?}"));
                }
            }
        }
        Verdict::pass()
    }

    /// Evenness, homogeneity of degree two, and polarization over `H¹(sub, M[λ])`.
    pub fn check_quadratic_form(&self, cache: &CohomologyCache, sub: &Arc<Subgroup>) -> Result<Vec<Check>> {
        let h = &self.presentation;
        let h1 = cache.cohomology(sub, h.module(), 1)?;
        let h2 = cache.cohomology(sub, h.coefficient().module(), 2)?;
        let mut even = Check::pass(Q_EVEN);
        let mut homogeneous = Check::pass(Q_HOMOGENEOUS);
        let exponent = h1.carrier.exponent().max(1);
        for phi in h1.elements() {
            let q = h.q(cache, sub, &phi)?;
            if even.passed() && h.q(cache, sub, &h1.carrier.neg(&phi))? != q {
                even = Check::fail(Q_EVEN, format!("phi={phi:?}"));
            }
            for a in 0..exponent {
                let lhs = h.q(cache, sub, &h1.carrier.scale(a, &phi))?;
                let rhs = h2.carrier.scale(a * a, &q);
                if homogeneous.passed() && lhs != rhs {
                    homogeneous = Check::fail(Q_HOMOGENEOUS, format!("phi={phi:?}, a={a}: {lhs:?} vs {rhs:?}"));
                }
            }
        }
        Ok(vec![even, homogeneous, check_zarhin(h, cache, sub)?])
    }

    /// `Σ_v inv_v(φ_v ∪_{P₁} φ_v)` for a local tuple on `M[2λ]`.
    pub fn cup_square(&self, f: &ArithmeticFixture, phi: &[i64]) -> Result<i64> {
        let module = self.m_two_lambda();
        let sum = f.local_sum(module, 1)?;
        let pairing = self.level_two_pairing()?;
        let mut total = 0;
        for v in 0..f.places().len() {
            let z = sum.parts[v].representative(sum.component(phi, v));
            total += f.invariant(v, &z.cup(&z, &pairing)?)?;
        }
        Ok(total.mod_floor(&f.n()))
    }

    /// `q_loc_sum(2φ) = Σ_v inv_v(φ_v ∪_{P₁} φ_v)` for every local tuple `φ` in `w`.
    pub fn check_level_two(&self, f: &ArithmeticFixture, w: &SubgroupPresentation) -> Result<Check> {
        let double = f.local_map(&self.doubling()?, 1)?;
        for phi in w.elements() {
            let lhs = q_loc_sum(f, &self.presentation, &double.apply(&phi))?.k;
            let rhs = self.cup_square(f, &phi)?;
            if lhs != rhs {
                return Ok(Check::fail(LEVEL_TWO, format!("phi={phi:?}: {lhs} vs {rhs}")));
            }
        }
        Ok(Check::pass(LEVEL_TWO))
    }
}

/// Decides isotropy of `W₀` from level-two data: needs doubling `(M[2λ], W₁) → (M[λ], W₀)` strictly
/// epic, then `W₀` is isotropic iff the `P₁` cup square vanishes on `W₁`.
pub fn isotropy_from_level_two(f: &ArithmeticFixture, ft: &FiniteTheta, w1: &SubgroupPresentation, w0: &SubgroupPresentation) -> Result<bool> {
    let source = SModObject::new(f, ft.m_two_lambda().clone(), w1.clone())?;
    let target = SModObject::new(f, ft.m_lambda().clone(), w0.clone())?;
    let doubling = SModMorphism::new(f, ft.doubling()?, source, target)?;
    if !is_strict_epi(f, &doubling)?.pass {
        return Err(Error::NotStrictlyEpic);
    }
    let gens = w1.generators();
    for i in 0..gens.len() {
        if ft.cup_square(f, &gens[i])? != 0 {
            return Ok(false);
        }
        for j in i + 1..gens.len() {
            if ft.cup_square(f, &w1.ambient.add(&gens[i], &gens[j]))? != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::is_isotropic;

    /// `M = (Z/4)²` with `σ = diag(1, −1)`, `M[λ] = 2M`, `P₁ = x₁y₂ − x₂y₁`, `e = 0`.
    pub(crate) fn planned(f: &ArithmeticFixture) -> FiniteTheta {
        let m = Arc::new(
            GModule::new(f.group().clone(), FiniteAbelianGroup::new(vec![4, 4]).unwrap(), vec![vec![vec![1, 0], vec![0, 1]], vec![vec![1, 0], vec![0, 3]]])
                .unwrap(),
        );
        construct_finite_theta(FiniteThetaData {
            coefficient: f.coefficient().clone(),
            module: m,
            m0: vec![vec![2, 0], vec![0, 2]],
            p1: vec![vec![0, 1], vec![-1, 0]],
            e: vec![],
        })
        .unwrap()
    }

    #[test]
    fn planned_datum_is_a_theta_group_over_two_torsion() {
        let f = ArithmeticFixture::dbl4();
        let ft = planned(&f);
        assert_eq!(ft.m_lambda().underlying().moduli(), &[2, 2]);
        assert!(ft.m_lambda().is_trivial_action());
        assert_eq!(ft.m_two_lambda().underlying().order(), 16);
        assert!(ft.check_commutator_is_p0().pass);
        assert!(ft.check_gamma().pass);
        for c in ft.check_quadratic_form(f.cache(), f.whole()).unwrap() {
            assert!(c.passed(), "{c:?}");
        }
    }

    #[test]
    fn level_two_square_matches_q_and_decides_isotropy() {
        let f = ArithmeticFixture::dbl4();
        let ft = planned(&f);
        let sum1 = f.local_sum(ft.m_two_lambda(), 1).unwrap();
        let all = SubgroupPresentation::whole(&sum1.group);
        assert!(ft.check_level_two(&f, &all).unwrap().passed());
        let double = f.local_map(&ft.doubling().unwrap(), 1).unwrap();
        for w1 in [SubgroupPresentation::trivial(&sum1.group), all.clone()] {
            let w0 = crate::lattice::image(&double, &w1);
            let decided = isotropy_from_level_two(&f, &ft, &w1, &w0).unwrap();
            assert_eq!(decided, is_isotropic(&f, &ft.presentation, &w0).unwrap().pass);
        }
    }

    #[test]
    fn cyclic_datum_is_split() {
        let f = ArithmeticFixture::dbl4();
        let m = Arc::new(GModule::trivial_action(f.group().clone(), FiniteAbelianGroup::cyclic(4)));
        let ft = construct_finite_theta(FiniteThetaData { coefficient: f.coefficient().clone(), module: m, m0: vec![vec![2]], p1: vec![vec![0]], e: vec![] })
            .unwrap();
        assert_eq!(ft.m_lambda().underlying().moduli(), &[2]);
        assert_eq!(ft.m_two_lambda().underlying().order(), 4);
        assert!(ft.presentation.factor_table().iter().flatten().all(|&x| x == 0));
        assert!(ft.presentation.twist_table().iter().flatten().all(|&x| x == 0));
    }

    #[test]
    fn bad_refinement_is_reported() {
        let f = ArithmeticFixture::dbl4();
        let ft = planned(&f);
        let mut data = ft.data.clone();
        data.e = vec![(vec![2, 0], 2)];
        data.p1 = vec![vec![0, 1], vec![-1, 0]];
        // e(2,0) = 2 but P₁ vanishes on M[2], so e must be additive.
        assert!(matches!(construct_finite_theta(data), Err(Error::BadQuadraticRefinement { .. })));
    }
}
