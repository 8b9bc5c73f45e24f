//! Selmer groups and the Cassels–Tate pairing of a short exact sequence with local conditions.

mod checks;
mod choice;
mod local;

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use serde::Serialize;

pub use checks::{
    applicability, check_bilinearity, check_bis, check_duality, check_kernels, check_naturality, check_trilinearity,
    check_all_tuples, check_well_defined, ALL_TUPLES,
};
pub use choice::ChoiceTuple;
pub use local::{
    local_split_pairing, sum_conditions_pairing, sum_conditions_sequence, LocalSplitPairing, SumConditions,
};

use crate::cochain::{Cochain, SetSection};
use crate::cohomology::CohomologyGroup;
use crate::error::{Error, Result};
use crate::fixture::{validate_fixture, ArithmeticFixture};
use crate::lattice::{preimage, BilinearForm, FiniteAbelianGroup, SubgroupPresentation};
use crate::module::{GModuleHom, ModulePairing};
use crate::report::MatrixBlock;
use crate::smod::{dual_morphism, dual_object, Ses, SModMorphism, SModObject};

/// An element `k/N` of `Q/Z`, with `0 ≤ k < N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PairingValue {
    pub k: i64,
    pub n: i64,
}

impl PairingValue {
    pub fn new(k: i64, n: i64) -> Self {
        PairingValue { k: k.mod_floor(&n), n }
    }

    pub fn zero(n: i64) -> Self {
        PairingValue { k: 0, n }
    }

    pub fn is_zero(&self) -> bool {
        self.k == 0
    }
}

impl std::ops::Add for PairingValue {
    type Output = PairingValue;
    fn add(self, o: PairingValue) -> PairingValue {
        PairingValue::new(self.k + o.k, self.n)
    }
}

impl std::ops::Neg for PairingValue {
    type Output = PairingValue;
    fn neg(self) -> PairingValue {
        PairingValue::new(-self.k, self.n)
    }
}

impl fmt::Display for PairingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.k, self.n)
    }
}

/// `Sel(M, W) = {φ ∈ H¹(G, M) : loc(φ) ∈ W}`.
#[derive(Clone, Debug)]
pub struct SelmerGroup {
    pub object: SModObject,
    pub global: Arc<CohomologyGroup>,
    /// Inside the carrier of `H¹(G, M)`.
    pub subgroup: SubgroupPresentation,
}

impl SelmerGroup {
    pub fn carrier(&self) -> &FiniteAbelianGroup {
        &self.subgroup.carrier
    }

    /// `H¹` coordinates of the carrier generators.
    pub fn generators(&self) -> Vec<Vec<i64>> {
        self.subgroup.generators()
    }

    pub fn elements(&self) -> Vec<Vec<i64>> {
        self.subgroup.elements()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.global.carrier.contains(x) && self.subgroup.contains(x)
    }

    pub fn order(&self) -> u128 {
        self.subgroup.order()
    }

    pub fn representative(&self, x: &[i64]) -> Cochain {
        self.global.representative(x)
    }
}

pub fn selmer(f: &ArithmeticFixture, obj: &SModObject) -> Result<SelmerGroup> {
    let global = f.global(&obj.module, 1)?;
    let loc = f.localization_map(&obj.module, 1)?;
    let subgroup = preimage(&loc, &obj.conditions)?;
    Ok(SelmerGroup { object: obj.clone(), global, subgroup })
}

/// `(Ш¹(M), Ш²(M))` as subgroups of the global cohomology carriers.
pub fn sha(f: &ArithmeticFixture, obj: &SModObject) -> Result<(SubgroupPresentation, SubgroupPresentation)> {
    Ok((f.sha(&obj.module, 1)?, f.sha(&obj.module, 2)?))
}

pub(crate) fn solve_degree_three(f: &ArithmeticFixture, target: &Cochain) -> Result<Cochain> {
    f.cache().solve_coboundary(target).map_err(|e| match e {
        Error::NoSolution => Error::ObstructionInH3,
        other => other,
    })
}

/// Cocycles `x_v ∈ Z¹(G_v, X)` with `p(x_v) = ȳ_v` on the nose and `([x_v])_v ∈ W`.
pub(crate) fn local_lifts(
    f: &ArithmeticFixture,
    p: &GModuleHom,
    section: &SetSection,
    w: &SubgroupPresentation,
    ybar: &Cochain,
) -> Result<Vec<Cochain>> {
    let targets = f.places().iter().map(|pl| ybar.restrict(&pl.decomposition)).collect::<Result<Vec<_>>>()?;
    local_lifts_at(f, p, section, w, &targets)
}

/// As [`local_lifts`] for one target cocycle per place.
pub(crate) fn local_lifts_at(
    f: &ArithmeticFixture,
    p: &GModuleHom,
    section: &SetSection,
    w: &SubgroupPresentation,
    targets: &[Cochain],
) -> Result<Vec<Cochain>> {
    let target = f.local_sum(&p.target, 1)?;
    let parts = targets.iter().enumerate().map(|(v, y)| target.parts[v].reduce(y)).collect::<Result<Vec<_>>>()?;
    let y = target.join(&parts);
    let through_w = f.local_map(p, 1)?.compose(&w.inclusion);
    let x = w.include(&through_w.solve(&y).map_err(|_| Error::NoLocalLift)?);
    let source = f.local_sum(&p.source, 1)?;
    let mut out = Vec::with_capacity(targets.len());
    for (v, y) in targets.iter().enumerate() {
        let rep = source.parts[v].representative(source.component(&x, v));
        let diff = rep.map(p)?.sub(y)?;
        let b = f.cache().solve_coboundary(&diff).map_err(|_| Error::NoLocalLift)?;
        out.push(rep.sub(&b.lift_through(section)?.coboundary()?)?);
    }
    Ok(out)
}

/// Pairing values on generator pairs of `Sel M₂ × Sel M₁^∨`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingMatrix {
    pub n: i64,
    pub left: FiniteAbelianGroup,
    pub right: FiniteAbelianGroup,
    /// `H¹` coordinates of the row and column generators.
    pub rows: Vec<Vec<i64>>,
    pub cols: Vec<Vec<i64>>,
    pub entries: Vec<Vec<PairingValue>>,
    pub canonical: bool,
}

impl PairingMatrix {
    pub fn form(&self) -> Result<BilinearForm> {
        let table = self.entries.iter().map(|r| r.iter().map(|v| v.k).collect()).collect();
        BilinearForm::new(self.left.clone(), self.right.clone(), self.n, table)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(PairingValue::is_zero)
    }

    pub fn block(&self, label: impl Into<String>) -> MatrixBlock {
        MatrixBlock {
            label: label.into(),
            rows: self.rows.iter().map(|r| format!("phi{r:?}")).collect(),
            cols: self.cols.iter().map(|c| format!("psi{c:?}")).collect(),
            entries: self.entries.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect(),
        }
    }
}

/// Everything needed to evaluate the pairing of one sequence.
pub struct Ctp<'a> {
    pub fixture: &'a ArithmeticFixture,
    pub seq: Ses,
    /// `Sel M₂`.
    pub left: SelmerGroup,
    /// `Sel M₁^∨`.
    pub right: SelmerGroup,
    dual_middle: SModObject,
    iota_dual: SModMorphism,
    pi_dual: SModMorphism,
    pi_section: SetSection,
    iota_dual_section: SetSection,
    eval_sub: ModulePairing,
    eval_quotient: ModulePairing,
    /// False when reciprocity fails, so values may depend on choices.
    pub canonical: bool,
}

impl<'a> Ctp<'a> {
    pub fn new(f: &'a ArithmeticFixture, seq: &Ses) -> Result<Self> {
        let v = seq.exactness(f)?;
        if !v.pass {
            return Err(Error::NotExact(v.witness.unwrap_or_default()));
        }
        let left = selmer(f, seq.quotient())?;
        let right = selmer(f, &dual_object(f, seq.sub())?)?;
        let dual_middle = dual_object(f, seq.middle())?;
        let iota_dual = dual_morphism(f, &seq.iota)?;
        let pi_dual = dual_morphism(f, &seq.pi)?;
        let pi_section = SetSection::new(&seq.pi.map)?;
        let iota_dual_section = SetSection::new(&iota_dual.map)?;
        let eval_sub = f.evaluation(&seq.sub().module)?;
        let eval_quotient = f.evaluation(&seq.quotient().module)?;
        let canonical = validate_fixture(f, &[])?.reciprocity.pass;
        Ok(Ctp {
            fixture: f,
            seq: seq.clone(),
            left,
            right,
            dual_middle,
            iota_dual,
            pi_dual,
            pi_section,
            iota_dual_section,
            eval_sub,
            eval_quotient,
            canonical,
        })
    }

    pub fn n(&self) -> i64 {
        self.fixture.n()
    }

    fn check_selmer(&self, phi: &[i64], psi: &[i64]) -> Result<()> {
        if !self.left.contains(phi) || !self.right.contains(psi) {
            return Err(Error::NotInSelmer);
        }
        Ok(())
    }

    /// `ε` with `dε = ι⁻¹(df) ∪ ψ̄`.
    pub(crate) fn epsilon_target(&self, f: &Cochain, psi: &Cochain) -> Result<Cochain> {
        let df = f.coboundary()?.preimage(&self.seq.iota.map)?;
        df.cup(psi, &self.eval_sub)
    }

    /// The deterministic choice tuple.
    pub fn tuple(&self, phi: &[i64], psi: &[i64]) -> Result<ChoiceTuple> {
        self.check_selmer(phi, psi)?;
        let phi_bar = self.left.representative(phi);
        let psi_bar = self.right.representative(psi);
        self.tuple_from_cocycles(phi_bar, psi_bar)
    }

    pub(crate) fn tuple_from_cocycles(&self, phi_bar: Cochain, psi_bar: Cochain) -> Result<ChoiceTuple> {
        let f = phi_bar.lift_through(&self.pi_section)?;
        let epsilon = solve_degree_three(self.fixture, &self.epsilon_target(&f, &psi_bar)?)?;
        let local = local_lifts(self.fixture, &self.seq.pi.map, &self.pi_section, &self.seq.middle().conditions, &phi_bar)?;
        Ok(ChoiceTuple { phi: phi_bar, psi: psi_bar, f, local, epsilon })
    }

    /// `Σ_v inv_v(ι⁻¹(f_v − φ̄_{v,M}) ∪ ψ̄_v − ε_v)`.
    pub fn evaluate(&self, t: &ChoiceTuple) -> Result<PairingValue> {
        let fx = self.fixture;
        let mut total = PairingValue::zero(fx.n());
        for (v, place) in fx.places().iter().enumerate() {
            let h = &place.decomposition;
            let diff = t.f.restrict(h)?.sub(&t.local[v])?.preimage(&self.seq.iota.map)?;
            let gamma = diff.cup(&t.psi.restrict(h)?, &self.eval_sub)?.sub(&t.epsilon.restrict(h)?)?;
            total = total + PairingValue::new(fx.invariant(v, &gamma)?, fx.n());
        }
        Ok(total)
    }

    pub fn ctp(&self, phi: &[i64], psi: &[i64]) -> Result<PairingValue> {
        self.evaluate(&self.tuple(phi, psi)?)
    }

    /// The same pairing computed from a lift of `ψ̄` to `M^∨` and local lifts in `W^⊥`.
    pub fn ctp_bis(&self, phi: &[i64], psi: &[i64]) -> Result<PairingValue> {
        self.check_selmer(phi, psi)?;
        let fx = self.fixture;
        let phi_bar = self.left.representative(phi);
        let psi_bar = self.right.representative(psi);
        let g = psi_bar.lift_through(&self.iota_dual_section)?;
        let dg = g.coboundary()?.preimage(&self.pi_dual.map)?;
        let eta = solve_degree_three(fx, &phi_bar.cup(&dg, &self.eval_quotient)?)?;
        let local = local_lifts(fx, &self.iota_dual.map, &self.iota_dual_section, &self.dual_middle.conditions, &psi_bar)?;
        let mut total = PairingValue::zero(fx.n());
        for (v, place) in fx.places().iter().enumerate() {
            let h = &place.decomposition;
            let a = local[v].sub(&g.restrict(h)?)?.preimage(&self.pi_dual.map)?;
            let gamma = phi_bar.restrict(h)?.cup(&a, &self.eval_quotient)?.sub(&eta.restrict(h)?)?;
            total = total + PairingValue::new(fx.invariant(v, &gamma)?, fx.n());
        }
        Ok(total)
    }

    pub fn matrix(&self) -> Result<PairingMatrix> {
        self.matrix_with(|a, b| self.ctp(a, b))
    }

    pub fn matrix_bis(&self) -> Result<PairingMatrix> {
        self.matrix_with(|a, b| self.ctp_bis(a, b))
    }

    fn matrix_with(&self, value: impl Fn(&[i64], &[i64]) -> Result<PairingValue>) -> Result<PairingMatrix> {
        let rows = self.left.generators();
        let cols = self.right.generators();
        let entries = rows
            .iter()
            .map(|r| cols.iter().map(|c| value(r, c)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(PairingMatrix {
            n: self.n(),
            left: self.left.carrier().clone(),
            right: self.right.carrier().clone(),
            rows,
            cols,
            entries,
            canonical: self.canonical,
        })
    }
}
