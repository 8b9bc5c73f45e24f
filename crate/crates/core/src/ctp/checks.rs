use rand::Rng;

use super::{selmer, Ctp};
use crate::error::{Error, Result};
use crate::fixture::{validate_fixture, ArithmeticFixture};
use crate::lattice::{subgroup, AbHom, SubgroupPresentation};
use crate::module::double_dual_map;
use crate::report::Check;
use crate::smod::{baer_sum, dual_morphism, dual_object, dual_sequence, Ladder, Ses};

/// `None` when reciprocity, local duality and global duality hold for all three terms.
pub fn applicability(f: &ArithmeticFixture, e: &Ses) -> Result<Option<String>> {
    let modules = vec![
        ("M1".to_string(), e.sub().module.clone()),
        ("M".to_string(), e.middle().module.clone()),
        ("M2".to_string(), e.quotient().module.clone()),
    ];
    let r = validate_fixture(f, &modules)?;
    if r.theorem_ready() {
        return Ok(None);
    }
    let mut why = Vec::new();
    if !r.reciprocity.pass {
        why.push("reciprocity fails".to_string());
    }
    for m in &r.modules {
        if !m.local_duality.iter().all(|v| v.pass) {
            why.push(format!("local duality fails for {}", m.module));
        }
        if !m.global_duality.pass {
            why.push(format!("global duality fails for {}", m.module));
        }
    }
    Ok(Some(why.join("; ")))
}

fn image_subgroup(map: &AbHom, gens: &[Vec<i64>]) -> SubgroupPresentation {
    let imgs: Vec<Vec<i64>> = gens.iter().map(|g| map.apply(g)).collect();
    subgroup(map.target(), &imgs)
}

fn compare(name: &str, found: &SubgroupPresentation, predicted: &SubgroupPresentation) -> Result<Check> {
    if let Some(x) = found.generators().into_iter().find(|x| !predicted.contains(x)) {
        return Ok(Check::fail(name, format!("kernel element {x:?} is not predicted")));
    }
    if let Some(x) = predicted.generators().into_iter().find(|x| !found.contains(x)) {
        return Ok(Check::fail(name, format!("predicted element {x:?} pairs nontrivially")));
    }
    Ok(Check::pass(name))
}

pub const LEFT_KERNEL: &str = "kernel theorem: left kernel is the image of Sel M";
pub const RIGHT_KERNEL: &str = "kernel theorem: right kernel is the image of Sel M^dual";

/// Left kernel `= π(Sel M)` and right kernel `= ι^∨(Sel M^∨)`.
pub fn check_kernels(f: &ArithmeticFixture, e: &Ses) -> Result<Vec<Check>> {
    if let Some(why) = applicability(f, e)? {
        return Ok(vec![Check::not_applicable(LEFT_KERNEL, why.clone()), Check::not_applicable(RIGHT_KERNEL, why)]);
    }
    let ctp = Ctp::new(f, e)?;
    let form = match ctp.matrix()?.form() {
        Ok(form) => form,
        Err(err) => return Ok(vec![Check::fail(LEFT_KERNEL, err.to_string()), Check::fail(RIGHT_KERNEL, err.to_string())]),
    };
    let lk = form.left_kernel();
    let lk_global = image_subgroup(&ctp.left.subgroup.inclusion, &lk.generators());
    let sel_m = selmer(f, e.middle())?;
    let predicted_left = image_subgroup(&f.global_map(&e.pi.map, 1)?, &sel_m.generators());

    let rk = form.right_kernel();
    let rk_global = image_subgroup(&ctp.right.subgroup.inclusion, &rk.generators());
    let sel_md = selmer(f, &dual_object(f, e.middle())?)?;
    let iota_dual = dual_morphism(f, &e.iota)?;
    let predicted_right = image_subgroup(&f.global_map(&iota_dual.map, 1)?, &sel_md.generators());
    Ok(vec![compare(LEFT_KERNEL, &lk_global, &predicted_left)?, compare(RIGHT_KERNEL, &rk_global, &predicted_right)?])
}

pub const DUALITY: &str = "duality identity: pairing of E at (phi, psi) equals pairing of the dual sequence at (psi, beta(phi))";

pub fn check_duality(f: &ArithmeticFixture, e: &Ses) -> Result<Check> {
    let d = dual_sequence(f, e)?;
    let ce = Ctp::new(f, e)?;
    let cd = Ctp::new(f, &d)?;
    let beta = f.global_map(&double_dual_map(e.quotient().module.clone(), f.coefficient())?, 1)?;
    for phi in ce.left.generators() {
        for psi in ce.right.generators() {
            let lhs = ce.ctp(&phi, &psi)?;
            let rhs = cd.ctp(&psi, &beta.apply(&phi))?;
            if lhs != rhs {
                return Ok(Check::fail(DUALITY, format!("phi={phi:?} psi={psi:?}: {lhs} vs {rhs}")));
            }
        }
    }
    Ok(Check::pass(DUALITY))
}

pub const BIS: &str = "alternative construction agrees with the pairing";

pub fn check_bis(ctp: &Ctp<'_>) -> Result<Check> {
    for phi in ctp.left.generators() {
        for psi in ctp.right.generators() {
            let (a, b) = (ctp.ctp(&phi, &psi)?, ctp.ctp_bis(&phi, &psi)?);
            if a != b {
                return Ok(Check::fail(BIS, format!("phi={phi:?} psi={psi:?}: {a} vs {b}")));
            }
        }
    }
    Ok(Check::pass(BIS))
}

pub const NATURALITY: &str = "naturality along a morphism of sequences";

/// `CTP_E(φ, f₁^∨ψ) = CTP_{E′}(f₂φ, ψ)` on generators.
pub fn check_naturality(f: &ArithmeticFixture, ladder: &Ladder) -> Result<Check> {
    let c = ladder.commutes();
    if !c.pass {
        return Err(Error::NotCommutativeLadder(c.witness.unwrap_or_default()));
    }
    let top = Ctp::new(f, &ladder.top)?;
    let bottom = Ctp::new(f, &ladder.bottom)?;
    let f1 = f.global_map(&dual_morphism(f, &ladder.f1)?.map, 1)?;
    let f2 = f.global_map(&ladder.f2.map, 1)?;
    for phi in top.left.generators() {
        for psi in bottom.right.generators() {
            let lhs = top.ctp(&phi, &f1.apply(&psi))?;
            let rhs = bottom.ctp(&f2.apply(&phi), &psi)?;
            if lhs != rhs {
                return Ok(Check::fail(NATURALITY, format!("phi={phi:?} psi={psi:?}: {lhs} vs {rhs}")));
            }
        }
    }
    Ok(Check::pass(NATURALITY))
}

pub const TRILINEARITY: &str = "additivity in the extension under Baer sum";

pub fn check_trilinearity(f: &ArithmeticFixture, a: &Ses, b: &Ses) -> Result<Check> {
    let s = baer_sum(f, a, b)?;
    let (ca, cb, cs) = (Ctp::new(f, a)?, Ctp::new(f, b)?, Ctp::new(f, &s)?);
    for phi in ca.left.generators() {
        for psi in ca.right.generators() {
            let sum = ca.ctp(&phi, &psi)? + cb.ctp(&phi, &psi)?;
            let direct = cs.ctp(&phi, &psi)?;
            if sum != direct {
                return Ok(Check::fail(TRILINEARITY, format!("phi={phi:?} psi={psi:?}: {direct} vs {sum}")));
            }
        }
    }
    Ok(Check::pass(TRILINEARITY))
}

pub const BILINEARITY: &str = "bilinearity on generator pairs";

pub fn check_bilinearity(ctp: &Ctp<'_>) -> Result<Check> {
    let (lg, rg) = (ctp.left.generators(), ctp.right.generators());
    let (la, ra) = (&ctp.left.global.carrier, &ctp.right.global.carrier);
    for (i, a) in lg.iter().enumerate() {
        for b in &lg[i..] {
            for psi in &rg {
                let lhs = ctp.ctp(&la.add(a, b), psi)?;
                let rhs = ctp.ctp(a, psi)? + ctp.ctp(b, psi)?;
                if lhs != rhs {
                    return Ok(Check::fail(BILINEARITY, format!("left: {a:?} + {b:?} against {psi:?}")));
                }
            }
        }
    }
    for (j, a) in rg.iter().enumerate() {
        for b in &rg[j..] {
            for phi in &lg {
                let lhs = ctp.ctp(phi, &ra.add(a, b))?;
                let rhs = ctp.ctp(phi, a)? + ctp.ctp(phi, b)?;
                if lhs != rhs {
                    return Ok(Check::fail(BILINEARITY, format!("right: {phi:?} against {a:?} + {b:?}")));
                }
            }
        }
    }
    Ok(Check::pass(BILINEARITY))
}

pub const WELL_DEFINED: &str = "independence of the choice tuple";

/// Resamples `trials` valid tuples per generator pair and compares values.
pub fn check_well_defined<R: Rng + ?Sized>(ctp: &Ctp<'_>, trials: usize, rng: &mut R) -> Result<Check> {
    for phi in ctp.left.generators() {
        for psi in ctp.right.generators() {
            let base = ctp.ctp(&phi, &psi)?;
            for k in 0..trials {
                let t = ctp.sample_tuple(&phi, &psi, rng)?;
                let v = ctp.check_tuple(&phi, &psi, &t)?;
                if !v.pass {
                    return Ok(Check::fail(WELL_DEFINED, format!("sampled tuple {k} is invalid: {}", v.witness.unwrap_or_default())));
                }
                let value = ctp.evaluate(&t)?;
                if value != base {
                    return Ok(Check::fail(WELL_DEFINED, format!("phi={phi:?} psi={psi:?} trial {k}: {value} vs {base}")));
                }
            }
        }
    }
    Ok(Check::pass(WELL_DEFINED))
}

pub const ALL_TUPLES: &str = "independence of the choice tuple over every valid tuple";

/// Enumerates every valid tuple for every generator pair, provided each pair has at most `limit` of them.
pub fn check_all_tuples(ctp: &Ctp<'_>, limit: u64) -> Result<Check> {
    for phi in ctp.left.generators() {
        for psi in ctp.right.generators() {
            let base = ctp.ctp(&phi, &psi)?;
            let mut failure = None;
            let count = ctp.for_each_tuple(&phi, &psi, limit, |t| {
                if failure.is_some() {
                    return Ok(());
                }
                let v = ctp.check_tuple(&phi, &psi, t)?;
                if !v.pass {
                    failure = Some(format!("enumerated tuple is invalid: {}", v.witness.unwrap_or_default()));
                } else {
                    let value = ctp.evaluate(t)?;
                    if value != base {
                        failure = Some(format!("phi={phi:?} psi={psi:?}: {value} vs {base}"));
                    }
                }
                Ok(())
            })?;
            if let Some(w) = failure {
                return Ok(Check::fail(ALL_TUPLES, w));
            }
            if count.is_none() {
                return Ok(Check::not_applicable(ALL_TUPLES, format!("more than {limit} tuples for phi={phi:?} psi={psi:?}")));
            }
        }
    }
    Ok(Check::pass(ALL_TUPLES))
}
