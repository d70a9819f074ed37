//! Residual checks shared by every certificate verifier.

use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraRep;
use crate::matrix::Matrix;

/// One identity `lhs = rhs`, checked as `‖lhs - rhs‖_F <= tol * scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub scale: f64,
    pub pass: bool,
}

impl Check {
    /// The scale is the larger of `natural` (the norm product the identity
    /// is built from) and `‖rhs‖`.
    pub fn identity(name: &str, lhs: &Matrix, rhs: &Matrix, natural: f64, tol: f64) -> Self {
        Self::from_residual(name, lhs.distance(rhs), natural.max(rhs.norm()), tol)
    }

    /// `m` lies in the span of the algebra, relative to `‖m‖`.
    pub fn membership(name: &str, algebra: &AlgebraRep, m: &Matrix, tol: f64) -> Self {
        Self::from_residual(name, algebra.span_distance(m), m.norm(), tol)
    }

    pub fn from_residual(name: &str, residual: f64, scale: f64, tol: f64) -> Self {
        Self {
            name: name.to_string(),
            residual,
            scale,
            pass: residual <= tol * scale,
        }
    }

    /// `residual / scale`, or zero for an exact identity between zeros.
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            if self.residual == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.residual / self.scale
        }
    }
}

/// Outcome of re-checking every invariant of a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { checks, pass }
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Largest `residual / scale` over the checks.
    pub fn worst(&self) -> f64 {
        self.checks.iter().map(Check::relative).fold(0.0, f64::max)
    }
}
