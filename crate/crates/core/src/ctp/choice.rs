use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;

use super::{local_lifts, solve_degree_three, Ctp};
use crate::cochain::{cochain_space, Cochain};
use crate::error::Result;
use crate::fixture::Verdict;
use crate::group::Subgroup;
use crate::lattice::FiniteAbelianGroup;
use crate::module::GModule;

/// `(φ̄, ψ̄, f, (φ̄_{v,M})_v, ε)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceTuple {
    pub phi: Cochain,
    pub psi: Cochain,
    pub f: Cochain,
    pub local: Vec<Cochain>,
    pub epsilon: Cochain,
}

fn random_element<R: Rng + ?Sized>(g: &FiniteAbelianGroup, rng: &mut R) -> Vec<i64> {
    g.moduli().iter().map(|&d| rng.gen_range(0..d)).collect()
}

/// Distinct values of `d(m)` for `m` in the module.
fn coboundaries(h: &Arc<Subgroup>, m: &Arc<GModule>) -> Result<Vec<Cochain>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for x in m.underlying().elements() {
        let d = Cochain::constant(h.clone(), m.clone(), &x)?.coboundary()?;
        if seen.insert(d.values().to_vec()) {
            out.push(d);
        }
    }
    Ok(out)
}

fn odometer(sizes: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = sizes.iter().product();
    (0..total).map(move |mut k| {
        sizes
            .iter()
            .map(|&s| {
                let i = k % s;
                k /= s;
                i
            })
            .collect()
    })
}

impl Ctp<'_> {
    /// Calls `visit` on every valid tuple for `φ`, `ψ` and returns how many there were.
    /// Returns `None` without visiting anything when there are more than `limit`.
    pub fn for_each_tuple(
        &self,
        phi: &[i64],
        psi: &[i64],
        limit: u64,
        mut visit: impl FnMut(&ChoiceTuple) -> Result<()>,
    ) -> Result<Option<u64>> {
        self.check_selmer(phi, psi)?;
        let fx = self.fixture;
        let whole = fx.whole().clone();
        let (m1, m2) = (&self.seq.sub().module, &self.seq.quotient().module);
        let iota = &self.seq.iota.map;

        let phi_shifts = coboundaries(&whole, m2)?;
        let psi_shifts = coboundaries(&whole, &self.right.object.module)?;
        let f_shifts: Vec<Cochain> = cochain_space(&whole, m1, 1)
            .elements()
            .map(|x| Cochain::from_values(whole.clone(), m1.clone(), 1, x)?.map(iota))
            .collect::<Result<_>>()?;

        // Per-place cocycles on M₁, then the combinations whose class lies in W₁.
        let sum1 = fx.local_sum(m1, 1)?;
        let mut per_place = Vec::new();
        for (v, place) in fx.places().iter().enumerate() {
            let mut zs = Vec::new();
            for x in sum1.parts[v].cocycles().elements() {
                let z = Cochain::from_values(place.decomposition.clone(), m1.clone(), 1, x)?;
                let class = sum1.parts[v].reduce(&z)?;
                zs.push((z.map(iota)?, class));
            }
            per_place.push(zs);
        }
        let sizes: Vec<usize> = per_place.iter().map(Vec::len).collect();
        let w1 = &self.seq.sub().conditions;
        let local_shifts: Vec<Vec<&Cochain>> = odometer(&sizes)
            .filter(|idx| {
                let parts: Vec<Vec<i64>> = idx.iter().enumerate().map(|(v, &i)| per_place[v][i].1.clone()).collect();
                w1.contains(&sum1.join(&parts))
            })
            .map(|idx| idx.iter().enumerate().map(|(v, &i)| &per_place[v][i].0).collect())
            .collect();

        let c = fx.coefficient().module();
        let z2 = fx.cache().cohomology(&whole, c, 2)?;
        let eps_shifts: Vec<Cochain> = z2
            .cocycles()
            .elements()
            .into_iter()
            .map(|x| Cochain::from_values(whole.clone(), c.clone(), 2, x))
            .collect::<Result<_>>()?;

        let count = [phi_shifts.len(), psi_shifts.len(), f_shifts.len(), local_shifts.len(), eps_shifts.len()]
            .iter()
            .try_fold(1u64, |acc, &n| acc.checked_mul(n as u64));
        match count {
            Some(n) if n <= limit => {}
            _ => return Ok(None),
        }

        let (phi0, psi0) = (self.left.representative(phi), self.right.representative(psi));
        for dphi in &phi_shifts {
            let phi_bar = phi0.add(dphi)?;
            let f0 = phi_bar.lift_through(&self.pi_section)?;
            let local0 = local_lifts(fx, &self.seq.pi.map, &self.pi_section, &self.seq.middle().conditions, &phi_bar)?;
            let locals: Vec<Vec<Cochain>> = local_shifts
                .iter()
                .map(|shift| local0.iter().zip(shift).map(|(l, z)| l.add(z)).collect())
                .collect::<Result<_>>()?;
            for dpsi in &psi_shifts {
                let psi_bar = psi0.add(dpsi)?;
                for df in &f_shifts {
                    let f = f0.add(df)?;
                    let eps0 = solve_degree_three(fx, &self.epsilon_target(&f, &psi_bar)?)?;
                    for local in &locals {
                        for z in &eps_shifts {
                            let t = ChoiceTuple { phi: phi_bar.clone(), psi: psi_bar.clone(), f: f.clone(), local: local.clone(), epsilon: eps0.add(z)? };
                            visit(&t)?;
                        }
                    }
                }
            }
        }
        Ok(count)
    }

    /// A uniformly perturbed valid tuple for the classes `φ`, `ψ`.
    pub fn sample_tuple<R: Rng + ?Sized>(&self, phi: &[i64], psi: &[i64], rng: &mut R) -> Result<ChoiceTuple> {
        self.check_selmer(phi, psi)?;
        let fx = self.fixture;
        let whole = fx.whole().clone();
        let (m1, m2) = (&self.seq.sub().module, &self.seq.quotient().module);
        let iota = &self.seq.iota.map;

        let phi_bar = self.left.representative(phi).add(&Cochain::random(whole.clone(), m2.clone(), 0, rng)?.coboundary()?)?;
        let psi_module = self.right.object.module.clone();
        let psi_bar = self.right.representative(psi).add(&Cochain::random(whole.clone(), psi_module, 0, rng)?.coboundary()?)?;

        let f = phi_bar
            .lift_through(&self.pi_section)?
            .add(&Cochain::random(whole.clone(), m1.clone(), 1, rng)?.map(iota)?)?;

        let mut local = local_lifts(fx, &self.seq.pi.map, &self.pi_section, &self.seq.middle().conditions, &phi_bar)?;
        let w1 = &self.seq.sub().conditions;
        let shift = w1.include(&random_element(&w1.carrier, rng));
        let sum1 = fx.local_sum(m1, 1)?;
        for (v, place) in fx.places().iter().enumerate() {
            let z = sum1.parts[v]
                .representative(sum1.component(&shift, v))
                .add(&Cochain::random(place.decomposition.clone(), m1.clone(), 0, rng)?.coboundary()?)?;
            local[v] = local[v].add(&z.map(iota)?)?;
        }

        let c = fx.coefficient().module();
        let h2 = fx.global(c, 2)?;
        let cocycle = h2
            .representative(&random_element(&h2.carrier, rng))
            .add(&Cochain::random(whole.clone(), c.clone(), 1, rng)?.coboundary()?)?;
        let epsilon = solve_degree_three(fx, &self.epsilon_target(&f, &psi_bar)?)?.add(&cocycle)?;
        Ok(ChoiceTuple { phi: phi_bar, psi: psi_bar, f, local, epsilon })
    }

    /// Checks every defining property of a choice tuple for the classes `φ`, `ψ`.
    pub fn check_tuple(&self, phi: &[i64], psi: &[i64], t: &ChoiceTuple) -> Result<Verdict> {
        let fx = self.fixture;
        match self.left.global.reduce(&t.phi) {
            Ok(x) if x == self.left.global.carrier.reduce(phi) => {}
            _ => return Ok(Verdict::fail("φ̄ does not represent φ")),
        }
        match self.right.global.reduce(&t.psi) {
            Ok(x) if x == self.right.global.carrier.reduce(psi) => {}
            _ => return Ok(Verdict::fail("ψ̄ does not represent ψ")),
        }
        if t.f.map(&self.seq.pi.map)? != t.phi {
            return Ok(Verdict::fail("π∘f ≠ φ̄"));
        }
        if t.local.len() != fx.places().len() {
            return Ok(Verdict::fail("wrong number of local lifts"));
        }
        let sum = fx.local_sum(&self.seq.middle().module, 1)?;
        let mut parts = Vec::with_capacity(t.local.len());
        for (v, place) in fx.places().iter().enumerate() {
            if t.local[v].map(&self.seq.pi.map)? != t.phi.restrict(&place.decomposition)? {
                return Ok(Verdict::fail(format!("local lift at place {v} does not project to φ̄_v")));
            }
            match sum.parts[v].reduce(&t.local[v]) {
                Ok(x) => parts.push(x),
                Err(_) => return Ok(Verdict::fail(format!("local lift at place {v} is not a cocycle"))),
            }
        }
        if !self.seq.middle().conditions.contains(&sum.join(&parts)) {
            return Ok(Verdict::fail("local lifts leave W"));
        }
        if t.epsilon.coboundary()? != self.epsilon_target(&t.f, &t.psi)? {
            return Ok(Verdict::fail("dε ≠ ι⁻¹(df) ∪ ψ̄"));
        }
        Ok(Verdict::pass())
    }
}
