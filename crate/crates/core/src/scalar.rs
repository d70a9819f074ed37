//! Scalars of the modeled algebraically closed field and the tolerance policy.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex floating-point scalar standing in for an algebraically closed
/// field of characteristic zero.
pub type Scalar = Complex64;

/// The imaginary unit, a square root of `-1`.
pub const I: Scalar = Scalar::new(0.0, 1.0);
pub const ONE: Scalar = Scalar::new(1.0, 0.0);
pub const ZERO: Scalar = Scalar::new(0.0, 0.0);

pub fn real(x: f64) -> Scalar {
    Scalar::new(x, 0.0)
}

/// Principal square root (branch cut on the negative real axis).
pub fn principal_sqrt(z: Scalar) -> Scalar {
    z.sqrt()
}

/// Relative equality of two scalars.
pub fn approx_eq(a: Scalar, b: Scalar, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

/// Numerical thresholds shared by every operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Relative equality threshold.
    pub tau_eq: f64,
    /// Singular-value rank threshold, relative to the largest singular value.
    pub tau_rank: f64,
    /// Bound on randomized retries in conjugator searches.
    pub max_retries: usize,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            tau_eq: 1e-10,
            tau_rank: 1e-10,
            max_retries: 32,
        }
    }
}

impl TolerancePolicy {
    pub fn new(tau_eq: f64, tau_rank: f64, max_retries: usize) -> Result<Self> {
        let policy = Self {
            tau_eq,
            tau_rank,
            max_retries,
        };
        policy.validate()?;
        Ok(policy)
    }

    /// Policy with both thresholds set to `tol`.
    pub fn with_tolerance(tol: f64) -> Result<Self> {
        Self::new(tol, tol, Self::default().max_retries)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.tau_eq) || !positive(self.tau_rank) {
            return Err(Error::InvalidInput(
                "tolerances must be finite and strictly positive".into(),
            ));
        }
        if self.max_retries == 0 {
            return Err(Error::InvalidInput("max_retries must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imaginary_unit_squares_to_minus_one() {
        assert_eq!(I * I, real(-1.0));
    }

    #[test]
    fn principal_sqrt_of_negative_real_is_upper_half_plane() {
        let r = principal_sqrt(real(-4.0));
        assert!(approx_eq(r, Scalar::new(0.0, 2.0), 1e-15));
    }

    #[test]
    fn policy_rejects_nonpositive_values() {
        assert!(TolerancePolicy::new(0.0, 1e-10, 3).is_err());
        assert!(TolerancePolicy::new(1e-10, -1.0, 3).is_err());
        assert!(TolerancePolicy::new(1e-10, 1e-10, 0).is_err());
        assert!(TolerancePolicy::new(1e-10, 1e-10, 1).is_ok());
    }
}
