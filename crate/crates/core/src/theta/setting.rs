use num_integer::Integer;
use rand::Rng;

use super::{is_isotropic, q_loc_sum, q_loc_sum_cocycles, ThetaPresentation};
use crate::cochain::Cochain;
use crate::ctp::{selmer, Ctp};
use crate::error::{Error, Result};
use crate::fixture::{ArithmeticFixture, Verdict};
use crate::lattice::{image, subgroup, AbHom, FiniteAbelianGroup, SubgroupPresentation};
use crate::module::{dual_hom_between, GModuleHom};
use crate::report::Check;
use crate::smod::{dual_object, module_homs, Ses};

/// A theta presentation for the middle term of an exact sequence.
pub struct ThetaSetting<'a> {
    pub fixture: &'a ArithmeticFixture,
    pub seq: Ses,
    pub theta: ThetaPresentation,
    /// `f_𝓗: M → M^∨`.
    pub f_h: GModuleHom,
}

/// The three standing assumptions, their combined form, and whether the two formulations agree.
#[derive(Clone, Debug)]
pub struct AssumptionReport {
    pub commutative: Check,
    pub isotropic_sub: Check,
    pub orthogonal: Check,
    pub combined: Check,
    pub consistent: Check,
}

impl AssumptionReport {
    pub fn holds(&self) -> bool {
        self.commutative.passed() && self.isotropic_sub.passed() && self.orthogonal.passed()
    }

    pub fn checks(&self) -> Vec<Check> {
        vec![self.commutative.clone(), self.isotropic_sub.clone(), self.orthogonal.clone(), self.combined.clone(), self.consistent.clone()]
    }

    fn reason(&self) -> String {
        let failed: Vec<&str> = [&self.commutative, &self.isotropic_sub, &self.orthogonal]
            .iter()
            .filter(|c| !c.passed())
            .map(|c| c.name.as_str())
            .collect();
        format!("assumptions fail: {}", failed.join("; "))
    }
}

/// The class of `σ ↦ (m ↦ σs(σ⁻¹m) − s(m))` for a homomorphic section `s(m) = (h(m), ι(m))`.
#[derive(Clone, Debug)]
pub struct PoonenStoll {
    /// `h` on the elements of `M₁` in element order.
    pub section: Vec<i64>,
    pub cocycle: Cochain,
    /// Coordinates in `H¹(G, M₁^∨)`.
    pub class: Vec<i64>,
    pub in_selmer: bool,
}

pub const THETA_MAIN: &str = "theta theorem: pairing at (phi, psi_PS - f2(phi)) equals the local quadratic sum";
pub const THETA_ISOTROPIC: &str = "theta theorem, isotropic case: pairing with f2(phi) equals pairing with psi_PS";
pub const THETA_ALTERNATING: &str = "theta theorem, isotropic case: pairing against f2 is alternating iff psi_PS lifts to Sel M^dual";
pub const PS_SECTION: &str = "Poonen-Stoll class does not depend on the homomorphic section";
const PS_SELMER: &str = "Poonen-Stoll class lies in Sel M1^dual";

const ENUMERATION_LIMIT: u128 = 1 << 12;

fn spanning_sums(w: &SubgroupPresentation) -> Vec<Vec<i64>> {
    if w.order() <= ENUMERATION_LIMIT {
        return w.elements();
    }
    let gens = w.generators();
    let mut out = vec![w.ambient.zero()];
    for i in 0..gens.len() {
        out.push(gens[i].clone());
        for j in i..gens.len() {
            out.push(w.ambient.add(&gens[i], &gens[j]));
        }
    }
    out
}

impl<'a> ThetaSetting<'a> {
    pub fn new(f: &'a ArithmeticFixture, seq: &Ses, theta: ThetaPresentation) -> Result<Self> {
        if **theta.module() != *seq.middle().module {
            return Err(Error::InvalidTheta("theta data is not over the middle term of the sequence".into()));
        }
        let v = seq.exactness(f)?;
        if !v.pass {
            return Err(Error::NotExact(v.witness.unwrap_or_default()));
        }
        let f_h = theta.associated_map()?;
        Ok(ThetaSetting { fixture: f, seq: seq.clone(), theta, f_h })
    }

    /// `𝓗₁`, presented over `M₁`.
    pub fn sub_presentation(&self) -> Result<ThetaPresentation> {
        self.theta.pullback(&self.seq.iota.map)
    }

    fn iota_w1(&self) -> Result<SubgroupPresentation> {
        let f = self.fixture;
        Ok(image(&f.local_map(&self.seq.iota.map, 1)?, &self.seq.sub().conditions))
    }

    pub fn check_assumptions(&self) -> Result<AssumptionReport> {
        let f = self.fixture;
        let iota = &self.seq.iota.map;
        let u1 = iota.source.underlying();
        let basis: Vec<Vec<i64>> = (0..u1.rank()).map(|i| u1.basis(i)).collect();

        let name1 = "theta assumption: preimage of the submodule is commutative";
        let mut commutative = Check::pass(name1);
        'outer: for x in &basis {
            for y in &basis {
                let p = self.theta.commutator_pairing(&iota.apply(x), &iota.apply(y));
                if p != 0 {
                    commutative = Check::fail(name1, format!("commutator of lifts of {x:?}, {y:?} is {p}"));
                    break 'outer;
                }
            }
        }

        let iw1 = self.iota_w1()?;
        let isotropic_sub = Check::from_verdict("theta assumption: q_loc_sum vanishes on iota(W1)", is_isotropic(f, &self.theta, &iw1)?);

        let name3 = "theta assumption: iota(W1) is orthogonal to f_H(W)";
        let total = f.total_pairing(&self.seq.middle().module)?;
        let fw = f.local_map(&self.f_h, 1)?;
        let mut orthogonal = Check::pass(name3);
        'outer3: for x in iw1.generators() {
            for y in self.seq.middle().conditions.generators() {
                let v = total.eval(&x, &fw.apply(&y));
                if v != 0 {
                    orthogonal = Check::fail(name3, format!("x={x:?} y={y:?} pair to {v}/{}", f.n()));
                    break 'outer3;
                }
            }
        }

        let name4 = "theta assumption, combined form: q_loc_sum(phi1 + phi) = q_loc_sum(phi) on iota(W1) x W";
        let mut combined = Check::pass(name4);
        let w = &self.seq.middle().conditions;
        let sum = f.local_sum(&self.seq.middle().module, 1)?;
        'outer4: for phi in spanning_sums(w) {
            let base = q_loc_sum(f, &self.theta, &phi)?;
            for phi1 in spanning_sums(&iw1) {
                let v = q_loc_sum(f, &self.theta, &sum.group.add(&phi1, &phi))?;
                if v != base {
                    combined = Check::fail(name4, format!("phi1={phi1:?} phi={phi:?}: {v} vs {base}"));
                    break 'outer4;
                }
            }
        }

        let name5 = "theta assumptions: combined form agrees with assumptions 2 and 3";
        let split = isotropic_sub.passed() && orthogonal.passed();
        let consistent = if !commutative.passed() {
            Check::not_applicable(name5, "the preimage of the submodule is not commutative")
        } else if split == combined.passed() {
            Check::pass(name5)
        } else {
            Check::fail(name5, format!("assumptions 2 and 3: {split}, combined form: {}", combined.passed()))
        };
        Ok(AssumptionReport { commutative, isotropic_sub, orthogonal, combined, consistent })
    }

    /// `(f₁: M₁ → M₂^∨, f₂: M₂ → M₁^∨)` with `π^∨ f₁ = f_𝓗 ι` and `ι^∨ f_𝓗 = f₂ π`.
    pub fn induced_morphisms(&self) -> Result<(GModuleHom, GModuleHom)> {
        let f = self.fixture;
        if !self.sub_presentation()?.is_commutative() {
            return Err(Error::AssumptionOneFails);
        }
        let c = f.coefficient();
        let (iota, pi) = (&self.seq.iota.map, &self.seq.pi.map);
        let (m1, m2) = (&iota.source, &pi.target);
        let (m1d, m2d, md) = (f.dual(m1)?, f.dual(m2)?, self.f_h.target.clone());
        let pi_dual = dual_hom_between(pi, c, m2d.clone(), md.clone())?;
        let iota_dual = dual_hom_between(iota, c, md, m1d.clone())?;

        let fi = self.f_h.compose(iota);
        let images1 = (0..m1.rank())
            .map(|j| pi_dual.map.solve(&fi.apply(&m1.underlying().basis(j))).map_err(|_| Error::AssumptionOneFails))
            .collect::<Result<Vec<_>>>()?;
        let f1 = GModuleHom::new(m1.clone(), m2d.clone(), AbHom::from_images(m1.underlying().clone(), m2d.underlying().clone(), &images1)?)?;

        let images2 = (0..m2.rank())
            .map(|j| Ok(iota_dual.apply(&self.f_h.apply(&pi.map.solve(&m2.underlying().basis(j))?))))
            .collect::<Result<Vec<_>>>()?;
        let f2 = GModuleHom::new(m2.clone(), m1d.clone(), AbHom::from_images(m2.underlying().clone(), m1d.underlying().clone(), &images2)?)?;

        if pi_dual.compose(&f1).map != fi.map {
            return Err(Error::NotCommutativeLadder("left square with f1".into()));
        }
        if f2.compose(pi).map != iota_dual.compose(&self.f_h).map {
            return Err(Error::NotCommutativeLadder("right square with f2".into()));
        }
        Ok((f1, f2))
    }

    /// Every nonzero equivariant perturbation of `f₁` or `f₂` breaks its square.
    pub fn check_induced_uniqueness(&self) -> Result<Verdict> {
        let f = self.fixture;
        let c = f.coefficient();
        let (f1, f2) = self.induced_morphisms()?;
        let (iota, pi) = (&self.seq.iota.map, &self.seq.pi.map);
        let md = self.f_h.target.clone();
        let pi_dual = dual_hom_between(pi, c, f1.target.clone(), md.clone())?;
        let iota_dual = dual_hom_between(iota, c, md, f2.target.clone())?;
        let target1 = self.f_h.compose(iota).map;
        for h in module_homs(&f1.source, &f1.target).into_iter().filter(|h| !h.map.is_zero()) {
            if pi_dual.compose(&f1.add(&h)).map == target1 {
                return Ok(Verdict::fail(format!("f1 + {:?} also fits", h.map.matrix())));
            }
        }
        let target2 = iota_dual.compose(&self.f_h).map;
        for h in module_homs(&f2.source, &f2.target).into_iter().filter(|h| !h.map.is_zero()) {
            if f2.add(&h).compose(pi).map == target2 {
                return Ok(Verdict::fail(format!("f2 + {:?} also fits", h.map.matrix())));
            }
        }
        Ok(Verdict::pass())
    }

    /// A particular homomorphic section `h` (values on `M₁` in element order) and generators of the
    /// homomorphisms `M₁ → C` that can be added to it.
    pub fn homomorphic_sections(&self) -> Result<(Vec<i64>, Vec<Vec<i64>>)> {
        let sub = self.sub_presentation()?;
        if !sub.is_commutative() {
            return Err(Error::AssumptionOneFails);
        }
        let u = sub.module().underlying();
        let size = sub.size();
        let n = sub.n();
        let rank = u.rank();
        let elems: Vec<Vec<i64>> = u.elements().collect();
        // h(x + e_k) − h(x) − h(e_k) = c₁(x, e_k)
        let mut matrix = Vec::with_capacity(size * rank);
        let mut rhs = Vec::with_capacity(size * rank);
        for x in &elems {
            for k in 0..rank {
                let e = u.basis(k);
                let mut row = vec![0; size];
                row[u.index_of(&u.add(x, &e))] += 1;
                row[u.index_of(x)] -= 1;
                row[u.index_of(&e)] -= 1;
                matrix.push(row);
                rhs.push(sub.c(x, &e));
            }
        }
        let source = FiniteAbelianGroup::diagonal(vec![n; size]);
        let target = FiniteAbelianGroup::diagonal(vec![n; size * rank]);
        let system = AbHom::new(source, target, matrix)?;
        let particular = system.solve(&rhs).map_err(|_| Error::NoHomomorphicSection)?;
        Ok((particular, system.kernel().generators()))
    }

    /// The Poonen-Stoll cocycle for the section `h`.
    pub fn poonen_stoll_cocycle(&self, h: &[i64]) -> Result<Cochain> {
        let f = self.fixture;
        let sub = self.sub_presentation()?;
        let m1 = sub.module().clone();
        let u = m1.underlying();
        let n = f.n();
        let g = f.group().clone();
        let m1d = f.dual(&m1)?;
        let value = |s: usize, x: &[i64]| -> i64 {
            let y = m1.act(g.inv(s), x);
            (f.coefficient().unit(s) * h[u.index_of(&y)] + sub.theta(s, &y) - h[u.index_of(x)]).mod_floor(&n)
        };
        Cochain::from_fn(f.whole().clone(), m1d, 1, |e| {
            let s = e[0];
            (0..u.rank()).map(|i| value(s, &u.basis(i)) / (n / u.moduli()[i])).collect()
        })
        .and_then(|z| {
            for s in 0..g.order() {
                for x in u.elements() {
                    let linear: i64 = x.iter().enumerate().map(|(i, k)| k * value(s, &u.basis(i))).sum();
                    if (linear - value(s, &x)).mod_floor(&n) != 0 {
                        return Err(Error::NotRealizable);
                    }
                }
                for i in 0..u.rank() {
                    if value(s, &u.basis(i)) % (n / u.moduli()[i]) != 0 {
                        return Err(Error::NotRealizable);
                    }
                }
            }
            Ok(z)
        })
    }

    /// Resampled homomorphic sections give cohomologous cocycles.
    pub fn check_section_independence<R: Rng + ?Sized>(&self, trials: usize, rng: &mut R) -> Result<Check> {
        let (section, kernel) = self.homomorphic_sections()?;
        let n = self.fixture.n();
        let base = self.poonen_stoll_cocycle(&section)?;
        for k in 0..trials {
            let mut other = section.clone();
            for g in &kernel {
                let a = rng.gen_range(0..n);
                for (x, y) in other.iter_mut().zip(g) {
                    *x = (*x + a * y).mod_floor(&n);
                }
            }
            let diff = self.poonen_stoll_cocycle(&other)?.sub(&base)?;
            if self.fixture.cache().solve_coboundary(&diff).is_err() {
                return Ok(Check::fail(PS_SECTION, format!("trial {k}: section {other:?}")));
            }
        }
        Ok(Check::pass(PS_SECTION))
    }

    pub fn poonen_stoll(&self) -> Result<PoonenStoll> {
        let f = self.fixture;
        let (section, _) = self.homomorphic_sections()?;
        let cocycle = self.poonen_stoll_cocycle(&section)?;
        let sel = selmer(f, &dual_object(f, self.seq.sub())?)?;
        let class = sel.global.reduce(&cocycle)?;
        let in_selmer = sel.contains(&class);
        Ok(PoonenStoll { section, cocycle, class, in_selmer })
    }

    /// The identity for every `φ ∈ Sel M₂`, and the isotropic-case statements.
    pub fn check_main(&self) -> Result<Vec<Check>> {
        let f = self.fixture;
        let a = self.check_assumptions()?;
        if !a.holds() {
            let why = a.reason();
            return Ok(vec![
                Check::not_applicable(THETA_MAIN, why.clone()),
                Check::not_applicable(THETA_ISOTROPIC, why.clone()),
                Check::not_applicable(THETA_ALTERNATING, why),
            ]);
        }
        let ps = self.poonen_stoll()?;
        let mut checks = vec![Check::from_verdict(PS_SELMER, Verdict::from_bool(ps.in_selmer, || format!("class {:?}", ps.class)))];
        if !ps.in_selmer {
            return Ok(checks);
        }
        let ctp = Ctp::new(f, &self.seq)?;
        let (_, f2) = self.induced_morphisms()?;
        let f2g = f.global_map(&f2, 1)?;
        let carrier = ctp.right.global.carrier.clone();
        let elements = ctp.left.elements();

        let mut main = Check::pass(THETA_MAIN);
        for phi in &elements {
            let psi = carrier.sub(&ps.class, &f2g.apply(phi));
            let t = ctp.tuple(phi, &psi)?;
            let lhs = ctp.evaluate(&t)?;
            let rhs = q_loc_sum_cocycles(f, &self.theta, &t.local)?;
            if lhs != rhs {
                main = Check::fail(THETA_MAIN, format!("phi={phi:?}: {lhs} vs {rhs}"));
                break;
            }
        }
        checks.push(main);

        let iso = is_isotropic(f, &self.theta, &self.seq.middle().conditions)?;
        if !iso.pass {
            let why = format!("W is not isotropic: {}", iso.witness.unwrap_or_default());
            checks.push(Check::not_applicable(THETA_ISOTROPIC, why.clone()));
            checks.push(Check::not_applicable(THETA_ALTERNATING, why));
            return Ok(checks);
        }
        let mut same = Check::pass(THETA_ISOTROPIC);
        let mut alternating = true;
        for phi in &elements {
            let with_f2 = ctp.ctp(phi, &f2g.apply(phi))?;
            let with_ps = ctp.ctp(phi, &ps.class)?;
            alternating &= with_f2.is_zero();
            if with_f2 != with_ps && same.passed() {
                same = Check::fail(THETA_ISOTROPIC, format!("phi={phi:?}: {with_f2} vs {with_ps}"));
            }
        }
        checks.push(same);
        let md = dual_object(f, self.seq.middle())?;
        let sel_md = selmer(f, &md)?;
        let iota_dual = dual_hom_between(&self.seq.iota.map, f.coefficient(), md.module.clone(), f.dual(&self.seq.sub().module)?)?;
        let lifts = subgroup(&carrier, &f.global_map(&iota_dual, 1)?.apply_all(&sel_md.generators())).contains(&ps.class);
        checks.push(Check::from_verdict(
            THETA_ALTERNATING,
            Verdict::from_bool(alternating == lifts, || format!("alternating: {alternating}, psi_PS lifts: {lifts}")),
        ));
        Ok(checks)
    }
}

trait ApplyAll {
    fn apply_all(&self, xs: &[Vec<i64>]) -> Vec<Vec<i64>>;
}

impl ApplyAll for AbHom {
    fn apply_all(&self, xs: &[Vec<i64>]) -> Vec<Vec<i64>> {
        xs.iter().map(|x| self.apply(x)).collect()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use std::sync::Arc;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::lattice::subgroup;
    use crate::module::GModule;
    use crate::report::Status;
    use crate::theta::tests::symplectic;

    /// `0 → Z/2 → (Z/2)² → Z/2 → 0` over DBL4 with `ι(1)` given and conditions generated by `w`.
    pub(crate) fn sequence(f: &ArithmeticFixture, iota: [i64; 2], w: &[Vec<i64>]) -> (Arc<GModule>, Ses) {
        let g = f.group().clone();
        let m = Arc::new(GModule::trivial_action(g.clone(), FiniteAbelianGroup::diagonal(vec![2, 2])));
        let z2 = Arc::new(GModule::trivial_action(g, FiniteAbelianGroup::diagonal(vec![2])));
        let pi = if iota == [1, 0] { vec![vec![0], vec![1]] } else { vec![vec![1], vec![1]] };
        let iota = GModuleHom::new(z2.clone(), m.clone(), AbHom::from_images(z2.underlying().clone(), m.underlying().clone(), &[iota.to_vec()]).unwrap()).unwrap();
        let pi = GModuleHom::new(m.clone(), z2.clone(), AbHom::from_images(m.underlying().clone(), z2.underlying().clone(), &pi).unwrap()).unwrap();
        let sum = f.local_sum(&m, 1).unwrap();
        let seq = Ses::from_maps(f, iota, pi, subgroup(&sum.group, w)).unwrap();
        (m, seq)
    }

    #[test]
    fn diagonal_configuration_has_a_nonzero_class_and_satisfies_the_theorem() {
        let f = ArithmeticFixture::dbl4();
        let (m, seq) = sequence(&f, [1, 1], &[vec![0, 1, 1, 0]]);
        let s = ThetaSetting::new(&f, &seq, symplectic(&f, &m)).unwrap();
        assert!(s.check_assumptions().unwrap().holds());
        let ps = s.poonen_stoll().unwrap();
        assert!(ps.in_selmer && ps.class.iter().any(|&x| x != 0));
        assert!(!Ctp::new(&f, &seq).unwrap().matrix().unwrap().is_zero());
        for c in s.check_main().unwrap() {
            assert_eq!(c.status, Status::Pass, "{c:?}");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(s.check_section_independence(10, &mut rng).unwrap().passed());
        assert!(s.check_induced_uniqueness().unwrap().pass);
    }

    #[test]
    fn trivial_theta_gives_zero_class() {
        let f = ArithmeticFixture::dbl4();
        let (m, seq) = sequence(&f, [1, 0], &[vec![0, 1, 0, 0]]);
        let s = ThetaSetting::new(&f, &seq, ThetaPresentation::trivial(f.coefficient().clone(), m).unwrap()).unwrap();
        let (f1, f2) = s.induced_morphisms().unwrap();
        assert!(f1.map.is_zero() && f2.map.is_zero());
        assert!(s.poonen_stoll().unwrap().class.iter().all(|&x| x == 0));
        assert!(s.check_main().unwrap().iter().all(|c| c.passed()));
    }

    #[test]
    fn failing_assumption_is_not_applicable() {
        let f = ArithmeticFixture::dbl4();
        let (m, seq) = sequence(&f, [1, 0], &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]);
        let s = ThetaSetting::new(&f, &seq, symplectic(&f, &m)).unwrap();
        let a = s.check_assumptions().unwrap();
        assert!(!a.holds() && a.consistent.passed());
        assert!(s.check_main().unwrap().iter().all(|c| c.status == Status::NotApplicable));
    }
}
