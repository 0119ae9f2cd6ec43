//! Instance files: one JSON document holding the normalizer `H`, an optional
//! objective, named extra objectives, the constraints and free-form metadata.
//! Matrices are lower triangles in row-major order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::constraints::Constraint;
use crate::error::{Error, Result};
use crate::instances::{last_coordinate, ConstraintSet, QcqpInstance};
use crate::symmat::SymMatrix;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintEntry {
    pub label: String,
    pub matrix: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub n: usize,
    #[serde(rename = "H")]
    pub h: Vec<f64>,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    /// Alternative objectives selectable by name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub objectives: BTreeMap<String, Vec<f64>>,
    pub constraints: Vec<ConstraintEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    #[serde(default)]
    pub metadata: BTreeMap<String, Value>,
}

impl InstanceFile {
    /// File for `set` with `H = diag(0,…,0,1)` and no objective.
    pub fn from_set(set: &ConstraintSet) -> Result<Self> {
        let n = set
            .dim()
            .ok_or_else(|| Error::InvalidParameter("empty constraint set has no dimension; use from_parts".into()))?;
        Self::from_parts(n, &last_coordinate(n), None, set)
    }

    pub fn from_parts(n: usize, h: &SymMatrix, q: Option<&SymMatrix>, set: &ConstraintSet) -> Result<Self> {
        h.check_dim(&SymMatrix::zeros(n))?;
        if let Some(q) = q {
            q.check_dim(h)?;
        }
        if let Some(d) = set.dim() {
            if d != n {
                return Err(Error::DimensionMismatch { expected: n, found: d });
            }
        }
        let mut metadata = BTreeMap::new();
        if !set.notes().is_empty() {
            metadata.insert("notes".to_string(), Value::from(set.notes().to_vec()));
        }
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            n,
            h: h.lower().to_vec(),
            q: q.map(|q| q.lower().to_vec()),
            objectives: BTreeMap::new(),
            constraints: set
                .constraints()
                .iter()
                .map(|c| ConstraintEntry {
                    label: c.label.clone(),
                    matrix: c.matrix.lower().to_vec(),
                })
                .collect(),
            alphas: set.alphas().map(<[f64]>::to_vec),
            metadata,
        })
    }

    pub fn with_objective(mut self, name: impl Into<String>, q: &SymMatrix) -> Self {
        self.objectives.insert(name.into(), q.lower().to_vec());
        self
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    fn matrix(&self, lower: &[f64]) -> Result<SymMatrix> {
        SymMatrix::from_lower(self.n, lower.to_vec())
    }

    pub fn h_matrix(&self) -> Result<SymMatrix> {
        self.matrix(&self.h)
    }

    pub fn constraint_set(&self) -> Result<ConstraintSet> {
        let cs = self
            .constraints
            .iter()
            .map(|e| Ok(Constraint::new(e.label.clone(), self.matrix(&e.matrix)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut set = ConstraintSet::new(cs)?;
        set.set_alphas(self.alphas.clone())?;
        if let Some(Value::Array(notes)) = self.metadata.get("notes") {
            for note in notes.iter().filter_map(Value::as_str) {
                set.add_note(note);
            }
        }
        Ok(set)
    }

    /// Objective by name, or the `Q` field when `name` is `None`. A missing
    /// objective is the zero matrix.
    pub fn objective(&self, name: Option<&str>) -> Result<SymMatrix> {
        match name {
            Some(name) => {
                let lower = self.objectives.get(name).ok_or_else(|| {
                    let known: Vec<&str> = self.objectives.keys().map(String::as_str).collect();
                    Error::InvalidParameter(format!("unknown objective '{name}', file has {known:?}"))
                })?;
                self.matrix(lower)
            }
            None => match &self.q {
                Some(q) => self.matrix(q),
                None => Ok(SymMatrix::zeros(self.n)),
            },
        }
    }

    pub fn instance(&self, objective: Option<&str>) -> Result<QcqpInstance> {
        QcqpInstance::new(self.objective(objective)?, self.h_matrix()?, self.constraint_set()?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        self.h_matrix()?;
        for name in self.objectives.keys() {
            self.objective(Some(name))?;
        }
        self.instance(None).map(|_| ())
    }

    pub fn to_json(&self) -> Result<String> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        let all_finite = finite(&self.h)
            && self.q.as_deref().is_none_or(finite)
            && self.objectives.values().all(|v| finite(v))
            && self.constraints.iter().all(|c| finite(&c.matrix))
            && self.alphas.as_deref().is_none_or(finite);
        if !all_finite {
            return Err(Error::NonFinite);
        }
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: InstanceFile = serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("parse error: {e}")))?;
        f.validate()?;
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{example41, instance_disk_ring, instance_strip};
    use proptest::prelude::*;

    #[test]
    fn example_file_round_trips() {
        let mut f = InstanceFile::from_set(&example41::constraints()).unwrap();
        for (k, q) in example41::objectives().iter().enumerate() {
            f = f.with_objective(format!("q{}", k + 1), q);
        }
        let f = f.with_metadata("generator", "example41");
        let text = f.to_json().unwrap();
        let g = InstanceFile::from_json(&text).unwrap();
        assert_eq!(f, g);
        assert_eq!(g.to_json().unwrap(), text);
        let inst = g.instance(Some("q3")).unwrap();
        assert_eq!(inst, example41::instance(3).unwrap());
    }

    #[test]
    fn alphas_and_notes_survive() {
        let set = instance_disk_ring(0.5).unwrap();
        let mut with_note = set.clone();
        with_note.add_note("weights chosen by hand");
        let f = InstanceFile::from_set(&with_note).unwrap();
        let back = InstanceFile::from_json(&f.to_json().unwrap()).unwrap().constraint_set().unwrap();
        assert_eq!(back, with_note);
        assert!(back.alphas().is_some());
    }

    #[test]
    fn rejects_bad_files() {
        let good = InstanceFile::from_set(&instance_strip()).unwrap();
        let mut short = good.clone();
        short.constraints[0].matrix.pop();
        assert!(InstanceFile::from_json(&serde_json::to_string(&short).unwrap()).is_err());
        let mut version = good.clone();
        version.schema_version = 9;
        assert!(InstanceFile::from_json(&serde_json::to_string(&version).unwrap()).is_err());
        assert!(InstanceFile::from_json("{\"n\": 3}").is_err());
        assert!(good.objective(Some("nope")).is_err());
        let mut nan = good;
        nan.h[0] = f64::NAN;
        assert_eq!(nan.to_json(), Err(Error::NonFinite));
    }

    #[test]
    fn missing_objective_is_zero() {
        let f = InstanceFile::from_set(&instance_strip()).unwrap();
        assert_eq!(f.objective(None).unwrap(), SymMatrix::zeros(3));
    }

    proptest! {
        #[test]
        fn arbitrary_finite_values_round_trip_bitwise(
            vals in proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO, 6),
            q in proptest::collection::vec(-1e300f64..1e300, 6),
        ) {
            let set = ConstraintSet::new(vec![Constraint::new("c", SymMatrix::from_lower(3, vals).unwrap())]).unwrap();
            let f = InstanceFile::from_parts(3, &last_coordinate(3), Some(&SymMatrix::from_lower(3, q).unwrap()), &set).unwrap();
            let g = InstanceFile::from_json(&f.to_json().unwrap()).unwrap();
            for (a, b) in f.constraints[0].matrix.iter().zip(&g.constraints[0].matrix) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
            for (a, b) in f.q.as_ref().unwrap().iter().zip(g.q.as_ref().unwrap()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
