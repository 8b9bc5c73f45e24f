use super::{is_isotropic, ThetaPresentation, ThetaSetting};
use crate::ctp::{sum_conditions_sequence, Ctp};
use crate::error::Result;
use crate::fixture::ArithmeticFixture;
use crate::lattice::SubgroupPresentation;
use crate::report::Check;

pub const DOUBLED_F2: &str = "doubled theta: the induced f2 of the sum-of-conditions sequence is f_H";
pub const DOUBLED_PS: &str = "doubled theta: the Poonen-Stoll class vanishes";
pub const DOUBLED_ANTISYMMETRIC: &str = "doubled theta: <phi, f_H psi> is antisymmetric on Sel(M, Wa + Wb)";
pub const DOUBLED_DIAGONAL: &str = "doubled theta: <phi, f_H phi> = 0 on Sel(M, Wa + Wb)";

/// The theta statements for `0 → (M, W_a ∩ W_b) → (M ⊕ M, W_a ⊕ W_b) → (M, W_a + W_b) → 0`
/// with the doubled theta group, for isotropic `W_a` and `W_b`.
pub fn check_doubled(f: &ArithmeticFixture, h: &ThetaPresentation, wa: &SubgroupPresentation, wb: &SubgroupPresentation) -> Result<Vec<Check>> {
    let names = [DOUBLED_F2, DOUBLED_PS, DOUBLED_ANTISYMMETRIC, DOUBLED_DIAGONAL];
    for (label, w) in [("Wa", wa), ("Wb", wb)] {
        let v = is_isotropic(f, h, w)?;
        if !v.pass {
            let why = format!("{label} is not isotropic: {}", v.witness.unwrap_or_default());
            return Ok(names.iter().map(|n| Check::not_applicable(*n, why.clone())).collect());
        }
    }
    let sc = sum_conditions_sequence(f, h.module(), wa, wb)?;
    let setting = ThetaSetting::new(f, &sc.seq, h.doubled()?)?;
    let f_h = h.associated_map()?;
    let (_, f2) = setting.induced_morphisms()?;
    let mut checks = vec![if f2.map.matrix() == f_h.map.matrix() {
        Check::pass(DOUBLED_F2)
    } else {
        Check::fail(DOUBLED_F2, format!("{:?} vs {:?}", f2.map.matrix(), f_h.map.matrix()))
    }];
    let ps = setting.poonen_stoll()?;
    checks.push(if ps.class.iter().all(|&x| x == 0) {
        Check::pass(DOUBLED_PS)
    } else {
        Check::fail(DOUBLED_PS, format!("class {:?}", ps.class))
    });

    let ctp = Ctp::new(f, &sc.seq)?;
    let fg = f.global_map(&f_h, 1)?;
    let elements = ctp.left.elements();
    let mut antisymmetric = Check::pass(DOUBLED_ANTISYMMETRIC);
    let mut diagonal = Check::pass(DOUBLED_DIAGONAL);
    for (i, phi) in elements.iter().enumerate() {
        let d = ctp.ctp(phi, &fg.apply(phi))?;
        if !d.is_zero() && diagonal.passed() {
            diagonal = Check::fail(DOUBLED_DIAGONAL, format!("phi={phi:?}: {d}"));
        }
        for psi in &elements[i + 1..] {
            let (a, b) = (ctp.ctp(phi, &fg.apply(psi))?, ctp.ctp(psi, &fg.apply(phi))?);
            if a != -b && antisymmetric.passed() {
                antisymmetric = Check::fail(DOUBLED_ANTISYMMETRIC, format!("phi={phi:?} psi={psi:?}: {a} and {b}"));
            }
        }
    }
    checks.push(antisymmetric);
    checks.push(diagonal);
    checks.extend(setting.check_main()?);
    Ok(checks)
}
