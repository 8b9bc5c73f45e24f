use super::{local_lifts_at, Ctp, PairingValue};
use crate::cochain::SetSection;
use crate::error::{Error, Result};
use crate::fixture::ArithmeticFixture;
use crate::lattice::{annihilator, preimage, AbHom, BilinearForm, SubgroupPresentation};
use crate::module::{GModule, GModuleHom};
use crate::report::Check;
use crate::smod::{direct_sum_object, dual_object, Ses, SModMorphism, SModObject};

use std::sync::Arc;

/// `LP_{E,s}` on `W₂ × W₁^⊥` for a module section `s` of `π`.
pub struct LocalSplitPairing<'a> {
    fixture: &'a ArithmeticFixture,
    pub seq: Ses,
    pub section: GModuleHom,
    pub w2: SubgroupPresentation,
    pub w1_perp: SubgroupPresentation,
    /// On the carriers of `W₂` and `W₁^⊥`.
    pub form: BilinearForm,
    pi_section: SetSection,
}

pub fn local_split_pairing<'a>(f: &'a ArithmeticFixture, e: &Ses, s: &GModuleHom) -> Result<LocalSplitPairing<'a>> {
    let id = GModuleHom::identity(e.quotient().module.clone());
    if *s.source != *e.quotient().module || *s.target != *e.middle().module || e.pi.map.compose(s).map != id.map {
        return Err(Error::NotASection);
    }
    let w2 = e.quotient().conditions.clone();
    let w1_perp = dual_object(f, e.sub())?.conditions;
    let mut lp = LocalSplitPairing {
        fixture: f,
        seq: e.clone(),
        section: s.clone(),
        w2: w2.clone(),
        w1_perp: w1_perp.clone(),
        form: BilinearForm {
            left: w2.carrier.clone(),
            right: w1_perp.carrier.clone(),
            modulus: f.n(),
            table: vec![vec![0; w1_perp.carrier.rank()]; w2.carrier.rank()],
        },
        pi_section: SetSection::new(&e.pi.map)?,
    };
    let mut table = Vec::with_capacity(w2.carrier.rank());
    for a in w2.generators() {
        let mut row = Vec::with_capacity(w1_perp.carrier.rank());
        for b in w1_perp.generators() {
            row.push(lp.value(&a, &b)?.k);
        }
        table.push(row);
    }
    lp.form = BilinearForm::new(w2.carrier.clone(), w1_perp.carrier.clone(), f.n(), table)?;
    Ok(lp)
}

impl LocalSplitPairing<'_> {
    /// `Σ_v inv_v(ι⁻¹(s∘φ_v − φ_{v,M}) ∪ ψ_v)` for tuples `φ ∈ W₂`, `ψ ∈ W₁^⊥` in local-sum coordinates.
    pub fn value(&self, phi: &[i64], psi: &[i64]) -> Result<PairingValue> {
        let f = self.fixture;
        let e = &self.seq;
        let sum2 = f.local_sum(&e.quotient().module, 1)?;
        let dual_sub = f.dual(&e.sub().module)?;
        let sum1d = f.local_sum(&dual_sub, 1)?;
        let eval = f.evaluation(&e.sub().module)?;
        let phis: Vec<_> = (0..f.places().len()).map(|v| sum2.parts[v].representative(sum2.component(phi, v))).collect();
        let lifts = local_lifts_at(f, &e.pi.map, &self.pi_section, &e.middle().conditions, &phis)?;
        let mut total = PairingValue::zero(f.n());
        for v in 0..f.places().len() {
            let a = phis[v].map(&self.section)?.sub(&lifts[v])?.preimage(&e.iota.map)?;
            let b = sum1d.parts[v].representative(sum1d.component(psi, v));
            total = total + PairingValue::new(f.invariant(v, &a.cup(&b, &eval)?)?, f.n());
        }
        Ok(total)
    }

    /// Left kernel equals `W₂ ∩ s⁻¹(W)`.
    pub fn check_left_kernel(&self) -> Result<Check> {
        let name = "local pairing: left kernel is the part of W2 that the section carries into W";
        let f = self.fixture;
        let s_inv = preimage(&f.local_map(&self.section, 1)?, &self.seq.middle().conditions)?;
        let predicted = self.w2.intersect(&s_inv)?;
        let found: Vec<Vec<i64>> = self.form.left_kernel().generators().iter().map(|x| self.w2.include(x)).collect();
        if let Some(x) = found.iter().find(|x| !predicted.contains(x)) {
            return Ok(Check::fail(name, format!("kernel element {x:?} is not predicted")));
        }
        let found = crate::lattice::subgroup(&self.w2.ambient, &found);
        if let Some(x) = predicted.generators().into_iter().find(|x| !found.contains(x)) {
            return Ok(Check::fail(name, format!("predicted element {x:?} pairs nontrivially")));
        }
        Ok(Check::pass(name))
    }

    /// The pairing of the sequence equals `LP` of the localizations.
    pub fn check_factorization(&self) -> Result<Check> {
        let name = "pairing of a module-split sequence factors through the local pairing";
        let f = self.fixture;
        let ctp = Ctp::new(f, &self.seq)?;
        let dual_sub = f.dual(&self.seq.sub().module)?;
        for phi in ctp.left.generators() {
            for psi in ctp.right.generators() {
                let global = ctp.ctp(&phi, &psi)?;
                let local = self.value(&f.localize(&self.seq.quotient().module, &phi)?, &f.localize(&dual_sub, &psi)?)?;
                if global != local {
                    return Ok(Check::fail(name, format!("phi={phi:?} psi={psi:?}: {global} vs {local}")));
                }
            }
        }
        Ok(Check::pass(name))
    }
}

/// `0 → (M, W_a ∩ W_b) → (M ⊕ M, W_a ⊕ W_b) → (M, W_a + W_b) → 0`.
#[derive(Clone, Debug)]
pub struct SumConditions {
    pub seq: Ses,
    pub a: SModObject,
    pub b: SModObject,
    /// `m ↦ (m, 0)`.
    pub section: GModuleHom,
}

pub fn sum_conditions_sequence(
    f: &ArithmeticFixture,
    m: &Arc<GModule>,
    wa: &SubgroupPresentation,
    wb: &SubgroupPresentation,
) -> Result<SumConditions> {
    let a = SModObject::new(f, m.clone(), wa.clone())?;
    let b = SModObject::new(f, m.clone(), wb.clone())?;
    let ds = direct_sum_object(f, &a, &b)?;
    let sub = SModObject::new(f, m.clone(), wa.intersect(wb)?)?;
    let quo = SModObject::new(f, m.clone(), wa.sum(wb)?)?;
    let diag = ds.inc[0].add(&ds.inc[1]);
    let diff = ds.proj[0].add(&ds.proj[1].neg());
    let seq = Ses::new(f, SModMorphism::new(f, diag, sub, ds.object.clone())?, SModMorphism::new(f, diff, ds.object, quo)?)?;
    Ok(SumConditions { seq, a, b, section: ds.inc[0].clone() })
}

/// Splits `x` as `x_a + x_b` with `x_a ∈ A`, `x_b ∈ B`.
fn decompose(x: &[i64], a: &SubgroupPresentation, b: &SubgroupPresentation) -> Result<(Vec<i64>, Vec<i64>)> {
    let source = a.carrier.direct_sum(&b.carrier);
    let mut images = a.generators();
    images.extend(b.generators());
    let map = AbHom::from_images(source, a.ambient.clone(), &images)?;
    let y = map.solve(x)?;
    let (ya, yb) = y.split_at(a.carrier.rank());
    Ok((a.include(ya), b.include(yb)))
}

/// `Σ_v inv_v(φ_{vb} ∪ ψ_{va})` from decompositions of the localizations.
pub fn sum_conditions_pairing(f: &ArithmeticFixture, sc: &SumConditions, phi: &[i64], psi: &[i64]) -> Result<PairingValue> {
    let m = &sc.a.module;
    let dual = f.dual(m)?;
    let total = f.total_pairing(m)?;
    let (wa, wb) = (&sc.a.conditions, &sc.b.conditions);
    let (wa_perp, wb_perp) = (annihilator(&total, wa)?, annihilator(&total, wb)?);
    let (_, phi_b) = decompose(&f.localize(m, phi)?, wa, wb).map_err(|_| Error::NotInSelmer)?;
    let (psi_a, _) = decompose(&f.localize(&dual, psi)?, &wa_perp, &wb_perp).map_err(|_| Error::NotInSelmer)?;
    Ok(PairingValue::new(total.eval(&phi_b, &psi_a), f.n()))
}
