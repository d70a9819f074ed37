//! Polynomial square roots of invertible elements by Hensel lifting, and
//! the Fitting idempotent of an arbitrary element.
//!
//! Both results are polynomials in the input element, so they stay inside
//! any algebra that contains it (and commute with everything it commutes
//! with).

use serde::Serialize;

use crate::algebra::AlgebraRep;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::poly::Poly;
use crate::scalar::{principal_sqrt, Scalar, TolerancePolicy, ONE, ZERO};
use crate::schur::{clustered_schur, EigenClusterReport};

/// Choice of square roots `b_k` of the roots `a_k`.
#[derive(Debug, Clone, Default, PartialEq)]
pub enum Branch {
    /// Principal complex square root of each root.
    #[default]
    Principal,
    /// One square root per root, in the same order as the roots.
    Explicit(Vec<Scalar>),
}

/// Square root `w = r(z)` of an invertible element together with its
/// certificate polynomial.
#[derive(Debug, Clone)]
pub struct SqrtWitness {
    pub element: Matrix,
    pub certificate_poly: Poly,
    /// `‖w^2 - z‖ / ‖z‖`.
    pub residual: f64,
    pub clusters: EigenClusterReport,
}

/// Idempotent `p = poly(a)` splitting `a` into an invertible part on
/// `range(p)` and a nilpotent part on `range(1 - p)`.
#[derive(Debug, Clone, Serialize)]
pub struct FittingWitness {
    #[serde(skip)]
    pub idempotent: Matrix,
    #[serde(skip)]
    pub poly: Poly,
    /// Smallest over largest modulus among the nonzero eigenvalues of `a`
    /// (zero when `a` is nilpotent).
    pub invertible_part_cond: f64,
    /// Exponent `e` with `((1-p) a (1-p))^e = 0`; zero when `a` is invertible.
    pub nilpotent_index: usize,
}

impl FittingWitness {
    pub fn is_identity(&self) -> bool {
        self.nilpotent_index == 0
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }
}

/// Polynomial `r` with `r^2 ≡ t (mod s^n)`, `s = prod (t - a_k)`.
///
/// `r` starts from chosen square roots `b_k` of the `a_k` and is lifted
/// from modulus `s^k` to `s^{k+1}` by adding `s^k u`, where `u` solves
/// `v + 2 r u ≡ 0 (mod s)` for `r^2 - t ≡ s^k v (mod s^{k+1})`. The lift
/// runs in Chinese-remainder coordinates ([`sqrt_jets`]); the result is
/// reassembled by Hermite interpolation in the variable `t / max |a_k|`.
pub fn sqrt_poly(roots: &[Scalar], exponent: usize, branch: &Branch, policy: &TolerancePolicy) -> Result<Poly> {
    let jets = sqrt_jets(roots, exponent, branch, policy)?;
    jets_to_poly(roots, &jets, max_modulus(roots))
}

/// The lift behind [`sqrt_poly`] in the Chinese-remainder coordinates
/// `F[t]/(s^n) = prod F[t]/((t - a_k)^n)`: entry `k` holds the Taylor
/// coefficients of `r` at `a_k` up to order `n - 1`.
///
/// In these coordinates `s^k u` contributes only the order-`k` coefficient
/// at each root, and the congruence `v + 2 r u ≡ 0 (mod s)` fixes it as
/// `-(r^2 - t)_k / (2 b)`.
pub fn sqrt_jets(
    roots: &[Scalar],
    exponent: usize,
    branch: &Branch,
    policy: &TolerancePolicy,
) -> Result<Vec<Vec<Scalar>>> {
    let b = branch_values(roots, exponent, branch, policy)?;
    Ok(b.iter()
        .map(|&b0| {
            let mut jet = vec![b0];
            for k in 1..exponent {
                // Order-k coefficient of r^2 - t without the 2 b r_k term.
                let mut defect: Scalar = (1..k).map(|j| jet[j] * jet[k - j]).sum();
                if k == 1 {
                    defect -= ONE;
                }
                jet.push(-defect / (b0 * 2.0));
            }
            jet
        })
        .collect())
}

fn max_modulus(values: &[Scalar]) -> f64 {
    values.iter().map(|a| a.norm()).fold(0.0, f64::max)
}

/// Validates the roots and returns the chosen square root of each.
fn branch_values(roots: &[Scalar], exponent: usize, branch: &Branch, policy: &TolerancePolicy) -> Result<Vec<Scalar>> {
    if roots.is_empty() {
        return Err(Error::InvalidInput("at least one root is required".into()));
    }
    if exponent == 0 {
        return Err(Error::InvalidInput("the exponent must be at least 1".into()));
    }
    let sigma = max_modulus(roots);
    if sigma == 0.0 || roots.iter().any(|a| a.norm() <= policy.tau_eq * sigma) {
        return Err(Error::ZeroRoot);
    }
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() <= policy.tau_eq * sigma {
                return Err(Error::RepeatedRoot { first: i, second: j });
            }
        }
    }
    match branch {
        Branch::Principal => Ok(roots.iter().map(|&a| principal_sqrt(a)).collect()),
        Branch::Explicit(b) => {
            if b.len() != roots.len() {
                return Err(Error::DimensionMismatch {
                    expected: roots.len(),
                    found: b.len(),
                });
            }
            for (bk, ak) in b.iter().zip(roots) {
                if (bk * bk - ak).norm() > policy.tau_eq.sqrt() * ak.norm() {
                    return Err(Error::InvalidInput(format!("{bk} is not a square root of {ak}")));
                }
            }
            Ok(b.clone())
        }
    }
}

/// Hermite interpolant of the jets, built in the variable `t / sigma` and
/// rescaled.
fn jets_to_poly(values: &[Scalar], jets: &[Vec<Scalar>], sigma: f64) -> Result<Poly> {
    let points: Vec<Scalar> = values.iter().map(|&v| v / sigma).collect();
    let scaled: Vec<Vec<Scalar>> = jets
        .iter()
        .map(|jet| jet.iter().enumerate().map(|(j, &c)| c * sigma.powi(j as i32)).collect())
        .collect();
    Ok(Poly::hermite(&points, &scaled)?.rescale_variable(sigma))
}

/// Square root of an invertible element `z` as a polynomial in `z`.
///
/// The roots are the eigenvalue clusters of `z` (on the range of the
/// algebra's unit) and the exponent is the largest Jordan block size. The
/// lift runs in Chinese-remainder coordinates ([`sqrt_jets`]) and `r(z)`
/// is evaluated from those jets on the clustered Schur form.
pub fn sqrt_element(
    algebra: &AlgebraRep,
    z: &Matrix,
    branch: &Branch,
    policy: &TolerancePolicy,
) -> Result<SqrtWitness> {
    algebra.require(z, policy)?;
    let restricted = algebra.restrict(z);
    let schur = clustered_schur(&restricted, policy)?;
    let clusters = schur.report().clone();
    let scale = restricted.norm();
    let values = clusters.values();
    if scale == 0.0 || values.iter().any(|c| c.norm() <= policy.tau_eq * scale) {
        return Err(Error::Singular {
            rcond: algebra.rcond(z),
        });
    }
    let jets = sqrt_jets(&values, clusters.max_block, branch, policy)?;
    let w = algebra.lift(&schur.eval_jets(&jets)?);
    let residual = (&(&w * &w) - z).norm() / z.norm();
    Ok(SqrtWitness {
        element: w,
        certificate_poly: jets_to_poly(&values, &jets, max_modulus(&values))?,
        residual,
        clusters,
    })
}

/// Fitting idempotent of `a`: `p = poly(a)` with `poly ≡ 1` modulo each
/// nonzero eigenvalue factor `(t - λ)^e` and `poly ≡ 0 (mod t^{e_0})`.
///
/// `p` is the unit when `a` is invertible and zero when `a` is nilpotent.
pub fn fitting_idempotent(algebra: &AlgebraRep, a: &Matrix, policy: &TolerancePolicy) -> Result<FittingWitness> {
    fitting_idempotent_at_scale(algebra, a, 0.0, policy)
}

/// [`fitting_idempotent`] with eigenvalues judged against
/// `max(‖a‖, reference)` rather than `‖a‖` alone.
///
/// Use this when `a` is computed from larger quantities and its own norm
/// may be rounding noise (an `a` below `2 tau_eq reference` is nilpotent).
pub fn fitting_idempotent_at_scale(
    algebra: &AlgebraRep,
    a: &Matrix,
    reference: f64,
    policy: &TolerancePolicy,
) -> Result<FittingWitness> {
    algebra.require(a, policy)?;
    let restricted = algebra.restrict(a);
    let scale = restricted.norm().max(reference);
    let zero = Matrix::zeros(a.dim());
    if restricted.norm() <= 2.0 * policy.tau_eq * reference || scale == 0.0 {
        return Ok(FittingWitness {
            idempotent: zero,
            poly: Poly::zero(),
            invertible_part_cond: 0.0,
            nilpotent_index: 1,
        });
    }
    let schur = clustered_schur(&restricted, policy)?;
    let report = schur.report();
    let radius = 2.0 * policy.tau_eq * scale;
    let is_zero: Vec<bool> = report.clusters.iter().map(|c| c.value.norm() <= radius).collect();
    let nilpotent_index: usize = report
        .clusters
        .iter()
        .zip(&is_zero)
        .filter(|(_, &z)| z)
        .map(|(c, _)| c.block)
        .sum();

    let moduli: Vec<f64> = report
        .clusters
        .iter()
        .zip(&is_zero)
        .filter(|(_, &z)| !z)
        .map(|(c, _)| c.value.norm())
        .collect();
    let invertible_part_cond = match moduli.iter().copied().fold(None, |acc: Option<(f64, f64)>, m| {
        Some(acc.map_or((m, m), |(lo, hi)| (lo.min(m), hi.max(m))))
    }) {
        Some((lo, hi)) => lo / hi,
        None => 0.0,
    };

    if moduli.is_empty() {
        return Ok(FittingWitness {
            idempotent: zero,
            poly: Poly::zero(),
            invertible_part_cond,
            nilpotent_index,
        });
    }
    if nilpotent_index == 0 {
        return Ok(FittingWitness {
            idempotent: algebra.unit().clone(),
            poly: Poly::one(),
            invertible_part_cond,
            nilpotent_index,
        });
    }

    // Locally constant: value 1 near nonzero clusters, 0 near zero.
    let indicator = |z: bool| if z { ZERO } else { ONE };
    let eval_jets: Vec<Vec<Scalar>> = is_zero.iter().map(|&z| vec![indicator(z)]).collect();
    let idempotent = algebra.lift(&schur.eval_jets(&eval_jets)?);
    let poly_jets: Vec<Vec<Scalar>> = report
        .clusters
        .iter()
        .zip(&is_zero)
        .map(|(c, &z)| {
            let mut jet = vec![ZERO; c.block];
            jet[0] = indicator(z);
            jet
        })
        .collect();
    let poly = jets_to_poly(&report.values(), &poly_jets, scale)?;
    Ok(FittingWitness {
        idempotent,
        poly,
        invertible_part_cond,
        nilpotent_index,
    })
}
