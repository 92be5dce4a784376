//! Pass/fail records shared by every check.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::tensor_space::WeightSector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn is_pass(self) -> bool {
        self == Status::Pass
    }
}

/// Outcome of comparing two objects entry by entry.
///
/// `residual` is the largest relative entry deviation
/// `|a - b| / max(1, |a|, |b|)`; in the exact domain it is zero iff the
/// objects are equal.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub agree: bool,
    pub residual: f64,
    pub witness: Option<String>,
}

impl Default for Comparison {
    fn default() -> Self {
        Self { agree: true, residual: 0.0, witness: None }
    }
}

impl Comparison {
    /// Keeps the worse of the two outcomes; the first failing witness wins.
    pub fn merge(&mut self, other: Comparison) {
        let first_failure = !other.agree && self.agree;
        if first_failure || (self.witness.is_none() && other.residual > self.residual) {
            self.witness = other.witness;
        }
        self.agree &= other.agree;
        self.residual = self.residual.max(other.residual);
    }

    pub fn with_context(mut self, context: impl std::fmt::Display) -> Self {
        if let Some(w) = self.witness.take() {
            self.witness = Some(format!("{context}: {w}"));
        }
        self
    }

    pub fn failure(residual: f64, witness: String) -> Self {
        Self { agree: false, residual, witness: Some(witness) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub sector: Option<String>,
    pub status: Status,
    /// Infinite when the check could not be evaluated; serialized as `null`.
    #[serde(with = "residual_serde")]
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub millis: Option<u64>,
}

impl CheckResult {
    pub fn from_comparison(name: &str, sector: Option<&WeightSector>, cmp: Comparison) -> Self {
        Self {
            name: name.to_string(),
            sector: sector.map(|s| s.to_string()),
            status: if cmp.agree { Status::Pass } else { Status::Fail },
            residual: cmp.residual,
            witness: if cmp.agree { None } else { cmp.witness },
            millis: None,
        }
    }

    /// A check that could not be evaluated (pole, bad input, ...).
    pub fn errored(name: &str, sector: Option<&WeightSector>, err: &Error) -> Self {
        Self {
            name: name.to_string(),
            sector: sector.map(|s| s.to_string()),
            status: Status::Fail,
            residual: f64::INFINITY,
            witness: Some(err.to_string()),
            millis: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.status.is_pass()
    }
}

mod residual_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, ser: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            ser.serialize_f64(*v)
        } else {
            ser.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(de)?.unwrap_or(f64::INFINITY))
    }
}
