//! Version-1 fixture files.
//!
//! ```json
//! {
//!   "version": 1,
//!   "id": "dbl4",
//!   "group": [[0, 1], [1, 0]],
//!   "coefficient": {"N": 4, "action": [1, 3]},
//!   "places": [
//!     {"label": "v1", "decomposition": [0, 1], "inertia": [0, 1], "invariant": [[2]]}
//!   ],
//!   "modules": [{"label": "mu2", "torsion": 2}],
//!   "sequences": [],
//!   "theta": []
//! }
//! ```
//!
//! `invariant` is a `1 x r` matrix over `Z/N`: the values of `inv_v` on the
//! generators of `H²(G_v, C)` in the order produced by
//! [`crate::cohomology::cohomology`]. That order is deterministic: cocycles are
//! the kernel of the coboundary matrix, and the quotient by coboundaries is put
//! in Smith normal form, whose nontrivial diagonal entries give the generators
//! in increasing divisibility order.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{ArithmeticFixture, Place};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Subgroup};
use crate::lattice::FiniteAbelianGroup;
use crate::module::{CoefficientModule, GModule};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CoefficientSpec {
    #[serde(rename = "N")]
    pub n: i64,
    pub action: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PlaceSpec {
    pub label: String,
    pub decomposition: Vec<usize>,
    pub inertia: Vec<usize>,
    pub invariant: Vec<Vec<i64>>,
}

/// A module given either as `C[k]` or by moduli and per-element action matrices.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ModuleSpec {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moduli: Option<Vec<i64>>,
    /// Omitted means trivial action.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<Vec<Vec<Vec<i64>>>>,
}

/// Local conditions: a keyword (`unramified`, `all`, `zero`) or generators in the local sum.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum ConditionSpec {
    Keyword(String),
    Generators(Vec<Vec<i64>>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceSpec {
    /// `0 → sub → middle → quotient → 0` with conditions on the middle term;
    /// `iota` and `pi` list the images of the source generators.
    Extension {
        label: String,
        sub: String,
        middle: String,
        quotient: String,
        iota: Vec<Vec<i64>>,
        pi: Vec<Vec<i64>>,
        conditions: ConditionSpec,
    },
    /// `0 → (M, W_a ∩ W_b) → (M ⊕ M, W_a ⊕ W_b) → (M, W_a + W_b) → 0`.
    SumConditions { label: String, module: String, w_a: ConditionSpec, w_b: ConditionSpec },
}

impl SequenceSpec {
    pub fn label(&self) -> &str {
        match self {
            SequenceSpec::Extension { label, .. } | SequenceSpec::SumConditions { label, .. } => label,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RefinementValue {
    pub at: Vec<i64>,
    pub value: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThetaSpec {
    /// `factor_set[i][j] = c(m_i, m_j)` and `twist[g][i] = θ_g(m_i)`, indices in element order of the module.
    FactorSet {
        label: String,
        module: String,
        factor_set: Vec<Vec<i64>>,
        twist: Vec<Vec<i64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sequence: Option<String>,
    },
    /// Inputs of the finite construction: `M`, generators of `M₀`, the pairing `P₁` on generators
    /// of `M`, and the nonzero values of `e` on `M[2]`.
    Finite {
        label: String,
        module: String,
        m0: Vec<Vec<i64>>,
        p1: Vec<Vec<i64>>,
        e: Vec<RefinementValue>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sequence: Option<String>,
    },
}

impl ThetaSpec {
    pub fn label(&self) -> &str {
        match self {
            ThetaSpec::FactorSet { label, .. } | ThetaSpec::Finite { label, .. } => label,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FixtureFile {
    pub version: u32,
    #[serde(default)]
    pub id: Option<String>,
    pub group: Vec<Vec<usize>>,
    pub coefficient: CoefficientSpec,
    pub places: Vec<PlaceSpec>,
    #[serde(default)]
    pub modules: Vec<ModuleSpec>,
    #[serde(default)]
    pub sequences: Vec<SequenceSpec>,
    #[serde(default)]
    pub theta: Vec<ThetaSpec>,
}

impl FixtureFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: FixtureFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.version != 1 {
            return Err(Error::Parse(format!("field `version`: unsupported version {}", file.version)));
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fixture serializes")
    }

    pub fn build(&self) -> Result<ArithmeticFixture> {
        let group = Arc::new(FiniteGroup::from_table(self.group.clone()).map_err(|e| Error::Parse(format!("field `group`: {e}")))?);
        if self.coefficient.action.len() != group.order() {
            return Err(Error::Parse("field `coefficient.action`: one unit per group element is required".into()));
        }
        let c = CoefficientModule::new(group.clone(), self.coefficient.n, self.coefficient.action.clone())
            .map_err(|e| Error::Parse(format!("field `coefficient`: {e}")))?;
        let mut places = Vec::with_capacity(self.places.len());
        for p in &self.places {
            let dec = Subgroup::new(group.clone(), &p.decomposition)
                .map_err(|_| Error::Parse(format!("place {}: `decomposition` is not a subgroup", p.label)))?;
            let ine = Subgroup::new(group.clone(), &p.inertia)
                .map_err(|_| Error::Parse(format!("place {}: `inertia` is not a subgroup", p.label)))?;
            if p.invariant.len() != 1 {
                return Err(Error::Parse(format!("place {}: `invariant` must have exactly one row", p.label)));
            }
            places.push(Place {
                label: p.label.clone(),
                decomposition: Arc::new(dec),
                inertia: Arc::new(ine),
                invariant: p.invariant[0].clone(),
            });
        }
        ArithmeticFixture::new(self.id.clone().unwrap_or_else(|| "fixture".into()), group, c, places)
    }

    /// Resolves a declared module against a built fixture.
    pub fn module(&self, fixture: &ArithmeticFixture, label: &str) -> Result<Arc<GModule>> {
        let spec = self
            .modules
            .iter()
            .find(|m| m.label == label)
            .ok_or_else(|| Error::Parse(format!("unknown module `{label}`")))?;
        spec.build(fixture)
    }

    pub fn modules(&self, fixture: &ArithmeticFixture) -> Result<Vec<(String, Arc<GModule>)>> {
        self.modules.iter().map(|m| Ok((m.label.clone(), m.build(fixture)?))).collect()
    }

    /// The file describing a fixture (without modules, sequences or theta data).
    pub fn from_fixture(f: &ArithmeticFixture) -> Self {
        let g = f.group();
        FixtureFile {
            version: 1,
            id: Some(f.id.clone()),
            group: g.table().to_vec(),
            coefficient: CoefficientSpec { n: f.n(), action: f.coefficient().units().to_vec() },
            places: f
                .places()
                .iter()
                .map(|p| PlaceSpec {
                    label: p.label.clone(),
                    decomposition: p.decomposition.members().to_vec(),
                    inertia: p.inertia.members().to_vec(),
                    invariant: vec![p.invariant.clone()],
                })
                .collect(),
            modules: Vec::new(),
            sequences: Vec::new(),
            theta: Vec::new(),
        }
    }
}

impl ModuleSpec {
    pub fn torsion(label: &str, k: i64) -> Self {
        ModuleSpec { label: label.into(), torsion: Some(k), moduli: None, action: None }
    }

    pub fn build(&self, fixture: &ArithmeticFixture) -> Result<Arc<GModule>> {
        let g = fixture.group();
        let m = match (&self.torsion, &self.moduli) {
            (Some(k), None) => fixture.coefficient().torsion(*k),
            (None, Some(moduli)) => {
                let underlying = FiniteAbelianGroup::diagonal(moduli.clone());
                if underlying.rank() != moduli.len() {
                    return Err(Error::Parse(format!("module {}: moduli must be at least 2", self.label)));
                }
                match &self.action {
                    None => GModule::trivial_action(g.clone(), underlying),
                    Some(a) => GModule::new(g.clone(), underlying, a.clone())
                        .map_err(|e| Error::Parse(format!("module {}: {e}", self.label)))?,
                }
            }
            _ => return Err(Error::Parse(format!("module {}: give exactly one of `torsion` or `moduli`", self.label))),
        };
        if fixture.n() % m.exponent() != 0 {
            return Err(Error::ExponentMismatch { exponent: m.exponent(), n: fixture.n() });
        }
        Ok(Arc::new(m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DBL4: &str = r#"{
        "version": 1, "id": "dbl4",
        "group": [[0, 1], [1, 0]],
        "coefficient": {"N": 4, "action": [1, 3]},
        "places": [
            {"label": "v1", "decomposition": [0, 1], "inertia": [0, 1], "invariant": [[2]]},
            {"label": "v2", "decomposition": [0, 1], "inertia": [0, 1], "invariant": [[2]]}
        ],
        "modules": [{"label": "mu2", "torsion": 2}, {"label": "triv2", "moduli": [2]}]
    }"#;

    #[test]
    fn round_trip() {
        let file = FixtureFile::parse(DBL4).unwrap();
        let f = file.build().unwrap();
        assert_eq!(f.shape(), ArithmeticFixture::dbl4().shape());
        let again = FixtureFile::parse(&FixtureFile::from_fixture(&f).to_json()).unwrap();
        assert_eq!(again.build().unwrap().shape(), f.shape());
        assert_eq!(file.modules(&f).unwrap().len(), 2);
    }

    #[test]
    fn wrong_dimensions_rejected() {
        let bad = DBL4.replacen("\"invariant\": [[2]]", "\"invariant\": [[2, 0]]", 1);
        assert!(matches!(FixtureFile::parse(&bad).unwrap().build(), Err(Error::Parse(_))));
    }

    #[test]
    fn malformed_json_reports_position() {
        match FixtureFile::parse("{\"version\": 1,\n \"group\": [[0]] ") {
            Err(Error::Parse(msg)) => assert!(msg.contains("line"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }
}
