//! JSON forms of matrices, algebras, star maps and certificates.
//!
//! Matrices are `{ "n": 2, "entries": [[re, im], ...] }` in row-major order;
//! real entries may be written as plain numbers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{algebra_from_span, AlgebraRep};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::report::{Check, VerificationReport};
use crate::scalar::{Scalar, TolerancePolicy};
use crate::staru::{make_star, StarKind, StarMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub entries: Vec<Entry>,
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<Matrix> {
        let entries: Vec<Scalar> = self
            .entries
            .iter()
            .map(|e| match *e {
                Entry::Real(re) => Scalar::new(re, 0.0),
                Entry::Complex([re, im]) => Scalar::new(re, im),
            })
            .collect();
        if entries.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Matrix::from_row_major(self.n, &entries)
    }
}

impl From<&Matrix> for MatrixJson {
    fn from(m: &Matrix) -> Self {
        Self {
            n: m.dim(),
            entries: m
                .row_major()
                .iter()
                // `+ 0.0` folds negative zeros so equal matrices print alike.
                .map(|z| Entry::Complex([z.re + 0.0, z.im + 0.0]))
                .collect(),
        }
    }
}

/// `{ "ambient_dim": n, "basis": [...] }` for an explicit basis of a
/// subalgebra containing the identity, or `{ "generators": [...] }` for the
/// unital algebra they generate. `ambient_dim` is optional and checked
/// against the matrices when present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<MatrixJson>>,
}

impl AlgebraJson {
    pub fn to_algebra(&self, policy: &TolerancePolicy) -> Result<AlgebraRep> {
        let read = |ms: &[MatrixJson]| ms.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>>>();
        let algebra = match (&self.basis, &self.generators) {
            (Some(b), None) => AlgebraRep::from_basis(read(b)?, policy)?,
            (None, Some(g)) => algebra_from_span(&read(g)?, policy)?,
            _ => {
                return Err(Error::InvalidInput(
                    "algebra needs exactly one of \"basis\" or \"generators\"".into(),
                ))
            }
        };
        match self.ambient_dim {
            Some(n) if n != algebra.ambient_dim() => Err(Error::DimensionMismatch {
                expected: n,
                found: algebra.ambient_dim(),
            }),
            _ => Ok(algebra),
        }
    }
}

/// `{ "star": "transpose" }` or `{ "star": "form", "G": matrix }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "star", rename_all = "lowercase")]
pub enum StarJson {
    Transpose,
    Form {
        #[serde(rename = "G")]
        g: MatrixJson,
    },
}

impl StarJson {
    pub fn to_star(&self, algebra: &AlgebraRep, policy: &TolerancePolicy) -> Result<StarMap> {
        let kind = match self {
            StarJson::Transpose => StarKind::Transpose,
            StarJson::Form { g } => StarKind::FormAdjoint(g.to_matrix()?),
        };
        make_star(algebra, kind, policy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertKind {
    Bireflectional,
    Squarezero,
    Unitary4,
    Sqrt,
}

/// A self-contained certificate: everything needed to recheck it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub kind: CertKind,
    pub x: MatrixJson,
    /// `[a, b]`, `[a, b]`, `[y, w]` or `[w]` by kind.
    pub factors: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intertwiner: Option<MatrixJson>,
    /// `[p, q]` for square-zero certificates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idempotents: Option<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub star: Option<StarJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub seed: u64,
    pub tolerance: TolerancePolicy,
    /// `residual / scale` for every check.
    pub residuals: BTreeMap<String, f64>,
    pub pass: bool,
}

/// Output of the `verify` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationJson {
    pub kind: CertKind,
    pub pass: bool,
    pub tolerance: f64,
    pub checks: Vec<Check>,
    pub failed: Vec<String>,
}

impl VerificationJson {
    pub fn new(kind: CertKind, tolerance: f64, report: &VerificationReport) -> Self {
        Self {
            kind,
            pass: report.pass,
            tolerance,
            checks: report.checks.clone(),
            failed: report.failures().iter().map(|c| c.name.clone()).collect(),
        }
    }
}

/// A refusal: the error kind plus its structured payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefusalJson {
    pub error: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, serde_json::Value>,
}

impl From<&Error> for RefusalJson {
    fn from(e: &Error) -> Self {
        use serde_json::json;
        let mut details = BTreeMap::new();
        let mut put = |k: &str, v: serde_json::Value| {
            details.insert(k.to_string(), v);
        };
        match e {
            Error::NotConjugateInAlgebra {
                target,
                kernel_dim,
                attempts,
                probabilistic,
            } => {
                put("target", json!(target));
                put("kernel_dim", json!(kernel_dim));
                put("attempts", json!(attempts));
                put("probabilistic", json!(probabilistic));
            }
            Error::NotAnInvolution { axiom, residual } => {
                put("axiom", json!(axiom));
                put("residual", json!(residual));
            }
            Error::Singular { rcond } | Error::NotCoprime { rcond } => put("rcond", json!(rcond)),
            Error::AlgebraNotStable { residual } | Error::NotInAlgebra { residual } => put("residual", json!(residual)),
            Error::DimensionMismatch { expected, found } => {
                put("expected", json!(expected));
                put("found", json!(found));
            }
            Error::RepeatedRoot { first, second } => {
                put("first", json!(first));
                put("second", json!(second));
            }
            Error::PreconditionViolated(which) => put("violated", json!(which)),
            _ => {}
        }
        Self {
            error: e.kind().to_string(),
            message: e.to_string(),
            details,
        }
    }
}

pub fn residual_map(report: &VerificationReport) -> BTreeMap<String, f64> {
    report.checks.iter().map(|c| (c.name.clone(), c.relative())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_and_complex_entries_parse() {
        let m: MatrixJson = serde_json::from_str(r#"{"n": 2, "entries": [1, [0, 2], -3.5, [1e-3, -1]]}"#).unwrap();
        let m = m.to_matrix().unwrap();
        assert_eq!(m.get(0, 1), Scalar::new(0.0, 2.0));
        assert_eq!(m.get(1, 0), Scalar::new(-3.5, 0.0));
    }

    #[test]
    fn wrong_entry_count_is_rejected() {
        let m: MatrixJson = serde_json::from_str(r#"{"n": 2, "entries": [1, 2, 3]}"#).unwrap();
        assert!(m.to_matrix().is_err());
    }

    #[test]
    fn matrix_json_is_lossless() {
        let m = Matrix::from_row_major(
            2,
            &[
                Scalar::new(0.1, -0.0),
                Scalar::new(1.0 / 3.0, 2.5),
                Scalar::new(-7.0, 1e-300),
                Scalar::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let text = serde_json::to_string(&MatrixJson::from(&m)).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_matrix().unwrap(), m);
    }

    /// Rerunning a job from an emitted certificate must see the same bits.
    #[test]
    fn floats_parse_back_bit_for_bit() {
        let entries: Vec<Scalar> = (1..=2500)
            .map(|k| {
                let t = k as f64;
                Scalar::new(t.sqrt().sin() * 1e3_f64.powf(t.cos()), -t.ln() / t.exp2().sqrt())
            })
            .collect();
        let m = Matrix::from_row_major(50, &entries).unwrap();
        let text = serde_json::to_string(&MatrixJson::from(&m)).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_matrix().unwrap(), m);
    }

    #[test]
    fn algebra_json_forms() {
        let pol = TolerancePolicy::default();
        let b: AlgebraJson = serde_json::from_str(
            r#"{"ambient_dim": 2, "basis": [{"n": 2, "entries": [1, 0, 0, 1]}, {"n": 2, "entries": [0, 1, 0, 0]}]}"#,
        )
        .unwrap();
        assert_eq!(b.to_algebra(&pol).unwrap().dim(), 2);
        let g: AlgebraJson = serde_json::from_str(r#"{"generators": [{"n": 2, "entries": [0, 1, 0, 0]}]}"#).unwrap();
        assert_eq!(g.to_algebra(&pol).unwrap().dim(), 2);
        let wrong: AlgebraJson =
            serde_json::from_str(r#"{"ambient_dim": 3, "basis": [{"n": 2, "entries": [1, 0, 0, 1]}]}"#).unwrap();
        assert!(matches!(wrong.to_algebra(&pol), Err(Error::DimensionMismatch { .. })));
        let neither: AlgebraJson = serde_json::from_str(r#"{"ambient_dim": 2}"#).unwrap();
        assert!(neither.to_algebra(&pol).is_err());
    }

    #[test]
    fn star_json_forms() {
        let t: StarJson = serde_json::from_str(r#"{"star": "transpose"}"#).unwrap();
        assert_eq!(t, StarJson::Transpose);
        let f: StarJson = serde_json::from_str(r#"{"star": "form", "G": {"n": 2, "entries": [0, 1, -1, 0]}}"#).unwrap();
        assert!(matches!(f, StarJson::Form { .. }));
    }

    #[test]
    fn refusal_carries_payload() {
        let e = Error::NotConjugateInAlgebra {
            target: "negation",
            kernel_dim: 2,
            attempts: 32,
            probabilistic: true,
        };
        let r = RefusalJson::from(&e);
        assert_eq!(r.error, "NotConjugateInAlgebra");
        assert_eq!(r.details["kernel_dim"], serde_json::json!(2));
    }
}
