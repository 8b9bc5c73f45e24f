//! Turns the sequence and theta blocks of a fixture file into engine objects.

use super::{ArithmeticFixture, FixtureFile, SequenceSpec, ThetaSpec};
use crate::ctp::{sum_conditions_sequence, SumConditions};
use crate::error::{Error, Result};
use crate::lattice::AbHom;
use crate::module::GModuleHom;
use crate::smod::{Ses, SModObject};
use crate::theta::{construct_finite_theta, FiniteTheta, FiniteThetaData, ThetaPresentation};

pub struct ResolvedSequence {
    pub label: String,
    pub seq: Ses,
    /// Present for sum-of-conditions sequences.
    pub sum: Option<SumConditions>,
}

pub struct ResolvedTheta {
    pub label: String,
    pub presentation: ThetaPresentation,
    pub finite: Option<FiniteTheta>,
    /// The sequence this datum sits over, if the file names one.
    pub sequence: Option<String>,
}

impl FixtureFile {
    pub fn sequence(&self, f: &ArithmeticFixture, label: &str) -> Result<ResolvedSequence> {
        let spec = self
            .sequences
            .iter()
            .find(|s| s.label() == label)
            .ok_or_else(|| Error::Parse(format!("unknown sequence `{label}`")))?;
        match spec {
            SequenceSpec::Extension { label, sub, middle, quotient, iota, pi, conditions } => {
                let (a, m, b) = (self.module(f, sub)?, self.module(f, middle)?, self.module(f, quotient)?);
                let shape = |images: &Vec<Vec<i64>>, src: usize, dst: usize, name: &str| {
                    if images.len() != src || images.iter().any(|x| x.len() != dst) {
                        Err(Error::Parse(format!("sequence {label}: `{name}` needs {src} images of length {dst}")))
                    } else {
                        Ok(())
                    }
                };
                shape(iota, a.rank(), m.rank(), "iota")?;
                shape(pi, m.rank(), b.rank(), "pi")?;
                let iota = GModuleHom::new(a.clone(), m.clone(), AbHom::from_images(a.underlying().clone(), m.underlying().clone(), iota)?)?;
                let pi = GModuleHom::new(m.clone(), b.clone(), AbHom::from_images(m.underlying().clone(), b.underlying().clone(), pi)?)?;
                let w = SModObject::from_spec(f, m, conditions)?.conditions;
                Ok(ResolvedSequence { label: label.clone(), seq: Ses::from_maps(f, iota, pi, w)?, sum: None })
            }
            SequenceSpec::SumConditions { label, module, w_a, w_b } => {
                let m = self.module(f, module)?;
                let wa = SModObject::from_spec(f, m.clone(), w_a)?.conditions;
                let wb = SModObject::from_spec(f, m.clone(), w_b)?.conditions;
                let sc = sum_conditions_sequence(f, &m, &wa, &wb)?;
                Ok(ResolvedSequence { label: label.clone(), seq: sc.seq.clone(), sum: Some(sc) })
            }
        }
    }

    pub fn sequences(&self, f: &ArithmeticFixture) -> Result<Vec<ResolvedSequence>> {
        self.sequences.iter().map(|s| self.sequence(f, s.label())).collect()
    }

    pub fn theta_datum(&self, f: &ArithmeticFixture, label: &str) -> Result<ResolvedTheta> {
        let spec = self
            .theta
            .iter()
            .find(|t| t.label() == label)
            .ok_or_else(|| Error::Parse(format!("unknown theta datum `{label}`")))?;
        match spec {
            ThetaSpec::FactorSet { label, module, factor_set, twist, sequence } => {
                let m = self.module(f, module)?;
                let presentation = ThetaPresentation::new(
                    f.coefficient().clone(),
                    m,
                    factor_set.iter().flatten().copied().collect(),
                    twist.iter().flatten().copied().collect(),
                )?;
                Ok(ResolvedTheta { label: label.clone(), presentation, finite: None, sequence: sequence.clone() })
            }
            ThetaSpec::Finite { label, module, m0, p1, e, sequence } => {
                let data = FiniteThetaData {
                    coefficient: f.coefficient().clone(),
                    module: self.module(f, module)?,
                    m0: m0.clone(),
                    p1: p1.clone(),
                    e: e.iter().map(|r| (r.at.clone(), r.value)).collect(),
                };
                let ft = construct_finite_theta(data)?;
                Ok(ResolvedTheta { label: label.clone(), presentation: ft.presentation.clone(), finite: Some(ft), sequence: sequence.clone() })
            }
        }
    }
}
