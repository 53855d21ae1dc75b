//! External algebra-description format (JSON) and conversions.
//!
//! A description lists basis labels (with optional degrees) and one bracket
//! entry per ordered pair; omitted pairs are zero and the antisymmetric
//! completion is implied. Unknown JSON fields are rejected. Serialization is
//! canonical (entries sorted by basis index, coefficients in canonical scalar
//! form), so `serialize(parse(d)) == d` for files produced by this module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{GradedLieAlgebra, SparseVec};
use crate::scalar::{Scalar, ScalarDomain};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisEntry {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub left: String,
    pub right: String,
    /// Term list `[[label, coefficient], ...]`.
    pub result: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDescription {
    pub name: String,
    pub scalars: String,
    pub basis: Vec<BasisEntry>,
    pub brackets: Vec<BracketEntry>,
}

impl AlgebraDescription {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Description(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("description serializes")
    }

    pub fn scalar_domain(&self) -> Result<ScalarDomain> {
        match self.scalars.as_str() {
            "rational" => Ok(ScalarDomain::Rational),
            "gaussian-rational" => Ok(ScalarDomain::GaussianRational),
            other => Err(Error::Description(format!(
                "unknown scalar domain {:?}",
                other
            ))),
        }
    }

    /// Resolves labels and coefficients into a structure-constant algebra.
    pub fn to_algebra(&self) -> Result<GradedLieAlgebra> {
        let domain = self.scalar_domain()?;
        let mut labels = Vec::with_capacity(self.basis.len());
        for entry in &self.basis {
            if labels.contains(&entry.name) {
                return Err(Error::Description(format!(
                    "duplicate basis label {:?}",
                    entry.name
                )));
            }
            labels.push(entry.name.clone());
        }
        let degrees = if self.basis.iter().any(|b| b.degree.is_some()) {
            if let Some(missing) = self.basis.iter().find(|b| b.degree.is_none()) {
                return Err(Error::Description(format!(
                    "basis vector {:?} lacks a degree while others have one",
                    missing.name
                )));
            }
            Some(self.basis.iter().map(|b| b.degree.unwrap()).collect())
        } else {
            None
        };
        let index = |label: &str| -> Result<usize> {
            labels
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| Error::Description(format!("unknown basis label {:?}", label)))
        };
        let mut brackets = Vec::new();
        for entry in &self.brackets {
            let i = index(&entry.left)?;
            let j = index(&entry.right)?;
            let mut terms: SparseVec = Vec::new();
            for (label, coeff) in &entry.result {
                let k = index(label)?;
                let c: Scalar = coeff
                    .parse()
                    .map_err(|_| Error::Description(format!("bad coefficient {:?}", coeff)))?;
                if !c.is_rational() && domain == ScalarDomain::Rational {
                    return Err(Error::Description(format!(
                        "gaussian coefficient {:?} in a rational algebra",
                        coeff
                    )));
                }
                terms.push((k, c));
            }
            brackets.push(((i, j), terms));
        }
        GradedLieAlgebra::new(labels, degrees, brackets, domain)
    }

    /// Canonical description of an algebra (used for bundled files).
    pub fn from_algebra(name: &str, alg: &GradedLieAlgebra) -> Self {
        let basis = alg
            .labels()
            .iter()
            .enumerate()
            .map(|(i, l)| BasisEntry {
                name: l.clone(),
                degree: alg.degrees().map(|d| d[i]),
            })
            .collect();
        let brackets = alg
            .bracket_entries()
            .map(|(&(i, j), terms)| BracketEntry {
                left: alg.labels()[i].clone(),
                right: alg.labels()[j].clone(),
                result: terms
                    .iter()
                    .map(|(k, c)| (alg.labels()[*k].clone(), c.to_string()))
                    .collect(),
            })
            .collect();
        AlgebraDescription {
            name: name.to_string(),
            scalars: alg.domain().to_string(),
            basis,
            brackets,
        }
    }
}

/// A prolonged algebra serialized as a description plus the labels of the
/// nonnegative part.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProlongedDescription {
    pub algebra: AlgebraDescription,
    pub splitting: Vec<String>,
}

/// JSON format for a linear map `sigma: g -> q` with polynomial entries in
/// declared parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaFile {
    /// Catalog name or inline description of the prolonged algebra.
    pub base: SigmaBase,
    pub splitting: Vec<String>,
    pub sigma: Vec<SigmaColumn>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parameters: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SigmaBase {
    Name(String),
    Inline(Box<AlgebraDescription>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaColumn {
    pub from: String,
    /// Term list `[[q-label, coefficient-or-parameter], ...]`; coefficients
    /// are scalar strings or polynomial expressions in the parameters.
    pub to: Vec<(String, String)>,
}

impl SigmaFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Description(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sigma file serializes")
    }
}
