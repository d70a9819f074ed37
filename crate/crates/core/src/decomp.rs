//! Products of two involutions and sums of two square-zero elements.
//!
//! Both decompositions start from a conjugator `y` found in the kernel of
//! `Y -> Y x - target Y` (restricted to the algebra's coordinates), replace
//! it by an involution `j = y r(y^-2)` with `r(y^-2)^2 = y^-2`, and read the
//! factors off `j`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraRep;
use crate::error::{Error, Result};
use crate::fixtures::complex_gaussian;
use crate::hensel::{sqrt_element, Branch};
use crate::matrix::{kernel_basis, Matrix};
use crate::report::{Check, VerificationReport};
use crate::scalar::{Scalar, TolerancePolicy};

/// What the conjugator should send `x` to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    Inverse,
    Negation,
}

impl TargetKind {
    pub fn name(self) -> &'static str {
        match self {
            TargetKind::Inverse => "inverse",
            TargetKind::Negation => "negation",
        }
    }

    fn target(self, algebra: &AlgebraRep, x: &Matrix, policy: &TolerancePolicy) -> Result<Matrix> {
        match self {
            TargetKind::Inverse => algebra.invert(x, policy),
            TargetKind::Negation => Ok(-x),
        }
    }
}

/// Invertible `y` in the algebra with `y x y^-1 = target`.
#[derive(Debug, Clone)]
pub struct ConjugacyWitness {
    pub conjugator: Matrix,
    pub target_kind: TargetKind,
    /// `‖y x y^-1 - target‖ / ‖target‖`.
    pub residual: f64,
    pub kernel_dim: usize,
    /// Random kernel combinations drawn (zero when the unit itself works).
    pub attempts: usize,
}

/// `x = a b` with `a^2 = b^2 = 1` and intertwiner `j = b`.
#[derive(Debug, Clone)]
pub struct BireflectionalCert {
    pub x: Matrix,
    pub a: Matrix,
    pub b: Matrix,
    pub intertwiner: Matrix,
    pub conjugator: Matrix,
    pub report: VerificationReport,
}

/// `x = a + b` with `a^2 = b^2 = 0`, built from the involution `i` and its
/// spectral idempotents `p = (1 + i)/2`, `q = (1 - i)/2`.
#[derive(Debug, Clone)]
pub struct SquareZeroCert {
    pub x: Matrix,
    pub a: Matrix,
    pub b: Matrix,
    pub involution: Matrix,
    pub p: Matrix,
    pub q: Matrix,
    pub conjugator: Matrix,
    pub report: VerificationReport,
}

#[derive(Debug, Clone)]
pub enum DecompositionCert {
    Bireflectional(BireflectionalCert),
    SquareZero(SquareZeroCert),
}

/// Result of the converse check for a square-zero splitting.
#[derive(Debug, Clone)]
pub struct ConverseReport {
    /// `y = ab - ba`.
    pub y: Matrix,
    pub report: VerificationReport,
}

/// Searches the algebra for an invertible `y` with `y x y^-1 = target`.
///
/// The kernel of `Y -> Y x - target Y` is computed in the algebra's
/// coordinates. If the unit lies in it, the unit is returned; otherwise
/// seeded complex-Gaussian combinations of the kernel basis are drawn and
/// the best conditioned of the first three invertible ones is kept.
pub fn find_conjugator(
    algebra: &AlgebraRep,
    x: &Matrix,
    kind: TargetKind,
    policy: &TolerancePolicy,
    seed: u64,
) -> Result<ConjugacyWitness> {
    algebra.require(x, policy)?;
    let target = kind.target(algebra, x, policy)?;
    let unit = algebra.unit();
    let witness = |y: Matrix, kernel_dim, attempts| -> Result<ConjugacyWitness> {
        let y_inv = algebra.invert(&y, policy)?;
        let residual = relative(&(&(&y * x) * &y_inv), &target);
        Ok(ConjugacyWitness {
            conjugator: y,
            target_kind: kind,
            residual,
            kernel_dim,
            attempts,
        })
    };

    let scale = x.norm().max(target.norm());
    if x.distance(&target) <= policy.tau_eq * scale {
        return witness(unit.clone(), algebra.dim(), 0);
    }

    let columns: Vec<DVector<Scalar>> = algebra
        .basis()
        .iter()
        .map(|b| (&(b * x) - &(&target * b)).flatten())
        .collect();
    let map = DMatrix::from_columns(&columns);
    let kernel = kernel_basis(&map, policy);
    let refusal = |attempts, probabilistic| Error::NotConjugateInAlgebra {
        target: kind.name(),
        kernel_dim: kernel.len(),
        attempts,
        probabilistic,
    };
    if kernel.is_empty() {
        return Err(refusal(0, false));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Matrix)> = None;
    let mut found = 0;
    let mut attempts = 0;
    while attempts < policy.max_retries && found < 3 {
        attempts += 1;
        let mut coords = DVector::zeros(algebra.dim());
        for k in &kernel {
            coords += k * complex_gaussian(&mut rng);
        }
        let y = algebra.from_coords(coords.as_slice())?;
        let rcond = algebra.rcond(&y);
        if rcond > policy.tau_rank {
            found += 1;
            if best.as_ref().is_none_or(|(r, _)| rcond > *r) {
                best = Some((rcond, y));
            }
        }
    }
    match best {
        Some((_, y)) => witness(y, kernel.len(), attempts),
        None => Err(refusal(attempts, true)),
    }
}

/// Involution `j = y r(y^-2)` where `r(y^-2)` is the polynomial square root
/// of `y^-2`. Since `r(y^-2)` is a polynomial in `y^2`, `j` conjugates `x`
/// to the same target as `y`.
pub fn involution_intertwiner(
    algebra: &AlgebraRep,
    witness: &ConjugacyWitness,
    policy: &TolerancePolicy,
) -> Result<Matrix> {
    let y = &witness.conjugator;
    let y_inv = algebra.invert(y, policy)?;
    let root = sqrt_element(algebra, &(&y_inv * &y_inv), &Branch::Principal, policy)?;
    Ok(y * &root.element)
}

/// Writes an invertible `x` conjugate to its inverse as `a b` with
/// `a^2 = b^2 = 1`.
pub fn bireflectional_decompose(
    algebra: &AlgebraRep,
    x: &Matrix,
    policy: &TolerancePolicy,
    seed: u64,
) -> Result<BireflectionalCert> {
    let witness = find_conjugator(algebra, x, TargetKind::Inverse, policy, seed)?;
    bireflectional_from_conjugator(algebra, x, &witness, policy)
}

/// The decomposition for a given conjugator: `a = x j`, `b = j`.
pub fn bireflectional_from_conjugator(
    algebra: &AlgebraRep,
    x: &Matrix,
    witness: &ConjugacyWitness,
    policy: &TolerancePolicy,
) -> Result<BireflectionalCert> {
    let j = involution_intertwiner(algebra, witness, policy)?;
    let mut cert = BireflectionalCert {
        x: x.clone(),
        a: x * &j,
        b: j.clone(),
        intertwiner: j,
        conjugator: witness.conjugator.clone(),
        report: VerificationReport::new(Vec::new()),
    };
    cert.report = verify_bireflectional(algebra, &cert, x, policy.tau_eq);
    Ok(cert)
}

/// Writes `x` conjugate to `-x` as `a + b` with `a^2 = b^2 = 0`.
pub fn square_zero_decompose(
    algebra: &AlgebraRep,
    x: &Matrix,
    policy: &TolerancePolicy,
    seed: u64,
) -> Result<SquareZeroCert> {
    let witness = find_conjugator(algebra, x, TargetKind::Negation, policy, seed)?;
    square_zero_from_conjugator(algebra, x, &witness, policy)
}

/// The decomposition for a given conjugator: `a = p x q`, `b = q x p`.
pub fn square_zero_from_conjugator(
    algebra: &AlgebraRep,
    x: &Matrix,
    witness: &ConjugacyWitness,
    policy: &TolerancePolicy,
) -> Result<SquareZeroCert> {
    let i = involution_intertwiner(algebra, witness, policy)?;
    let unit = algebra.unit();
    let p = (unit + &i).scale_real(0.5);
    let q = (unit - &i).scale_real(0.5);
    let mut cert = SquareZeroCert {
        x: x.clone(),
        a: &(&p * x) * &q,
        b: &(&q * x) * &p,
        involution: i,
        p,
        q,
        conjugator: witness.conjugator.clone(),
        report: VerificationReport::new(Vec::new()),
    };
    cert.report = verify_square_zero(algebra, &cert, x, policy.tau_eq);
    Ok(cert)
}

/// Checks `y = ab - ba` against `y^2 = x^4` and `yx = -xy` for a
/// square-zero splitting `x = a + b` of an invertible `x`.
pub fn verify_square_zero_converse(
    x: &Matrix,
    a: &Matrix,
    b: &Matrix,
    policy: &TolerancePolicy,
) -> Result<ConverseReport> {
    let tol = policy.tau_eq;
    let mut failed = Vec::new();
    let (na, nb) = (a.norm(), b.norm());
    if !Check::identity("a^2 = 0", &(a * a), &Matrix::zeros(a.dim()), na * na, tol).pass {
        failed.push("a^2 = 0".to_string());
    }
    if !Check::identity("b^2 = 0", &(b * b), &Matrix::zeros(b.dim()), nb * nb, tol).pass {
        failed.push("b^2 = 0".to_string());
    }
    if !Check::identity("a + b = x", &(a + b), x, na + nb, tol).pass {
        failed.push("a + b = x".to_string());
    }
    if x.norm() == 0.0 || x.rcond() < policy.tau_rank {
        failed.push("x invertible".to_string());
    }
    if !failed.is_empty() {
        return Err(Error::PreconditionViolated(failed));
    }
    let y = &(a * b) - &(b * a);
    let nx = x.norm();
    let x2 = x * x;
    let checks = vec![
        Check::identity("y^2 = x^4", &(&y * &y), &(&x2 * &x2), nx.powi(4), tol),
        Check::identity("yx = -xy", &(&y * x), &-(x * &y), nx * y.norm(), tol),
    ];
    Ok(ConverseReport {
        y,
        report: VerificationReport::new(checks),
    })
}

/// Recomputes every invariant of a certificate for `x` at tolerance
/// `policy.tau_eq`.
pub fn verify_certificate(
    algebra: &AlgebraRep,
    cert: &DecompositionCert,
    x: &Matrix,
    policy: &TolerancePolicy,
) -> VerificationReport {
    match cert {
        DecompositionCert::Bireflectional(c) => verify_bireflectional(algebra, c, x, policy.tau_eq),
        DecompositionCert::SquareZero(c) => verify_square_zero(algebra, c, x, policy.tau_eq),
    }
}

pub fn verify_bireflectional(
    algebra: &AlgebraRep,
    cert: &BireflectionalCert,
    x: &Matrix,
    tol: f64,
) -> VerificationReport {
    let unit = algebra.unit();
    let (a, b, j) = (&cert.a, &cert.b, &cert.intertwiner);
    let (na, nb, nj) = (a.norm(), b.norm(), j.norm());
    let mut checks = dims_agree(x, &[a, b, j]);
    if !checks.is_empty() {
        return VerificationReport::new(checks);
    }
    checks.extend([
        Check::identity("a^2 = 1", &(a * a), unit, na * na, tol),
        Check::identity("b^2 = 1", &(b * b), unit, nb * nb, tol),
        Check::identity("ab = x", &(a * b), x, na * nb, tol),
        Check::identity("j^2 = 1", &(j * j), unit, nj * nj, tol),
    ]);
    // `jxj = x^-1`, checked without forming the inverse.
    let jxjx = &(&(j * x) * j) * x;
    let nx = x.norm();
    checks.push(Check::identity("jxjx = 1", &jxjx, unit, nj * nj * nx * nx, tol));
    checks.extend([
        Check::membership("a in A", algebra, a, tol),
        Check::membership("b in A", algebra, b, tol),
        Check::membership("j in A", algebra, j, tol),
    ]);
    VerificationReport::new(checks)
}

pub fn verify_square_zero(algebra: &AlgebraRep, cert: &SquareZeroCert, x: &Matrix, tol: f64) -> VerificationReport {
    let unit = algebra.unit();
    let (a, b, i, p, q) = (&cert.a, &cert.b, &cert.involution, &cert.p, &cert.q);
    let mut checks = dims_agree(x, &[a, b, i, p, q]);
    if !checks.is_empty() {
        return VerificationReport::new(checks);
    }
    let zero = Matrix::zeros(x.dim());
    let (ni, np, nq) = (i.norm(), p.norm(), q.norm());
    // Rounding in either factor is relative to the size of the whole split.
    let s = a.norm() + b.norm();
    checks.extend([
        Check::identity("a^2 = 0", &(a * a), &zero, s * s, tol),
        Check::identity("b^2 = 0", &(b * b), &zero, s * s, tol),
        Check::identity("a + b = x", &(a + b), x, s, tol),
        Check::identity("p + q = 1", &(p + q), unit, np + nq, tol),
        Check::identity("i = p - q", i, &(p - q), np + nq, tol),
        Check::identity("pq = 0", &(p * q), &zero, np * nq, tol),
        Check::identity("qp = 0", &(q * p), &zero, np * nq, tol),
        Check::identity("p^2 = p", &(p * p), p, np * np, tol),
        Check::identity("q^2 = q", &(q * q), q, nq * nq, tol),
        Check::identity("i^2 = 1", &(i * i), unit, ni * ni, tol),
        Check::identity("ixi = -x", &(&(i * x) * i), &-x, ni * ni * x.norm(), tol),
        Check::membership("a in A", algebra, a, tol),
        Check::membership("b in A", algebra, b, tol),
        Check::membership("i in A", algebra, i, tol),
    ]);
    VerificationReport::new(checks)
}

fn dims_agree(x: &Matrix, parts: &[&Matrix]) -> Vec<Check> {
    if parts.iter().all(|m| m.dim() == x.dim()) {
        Vec::new()
    } else {
        vec![Check::from_residual("dimensions agree", f64::INFINITY, 0.0, 0.0)]
    }
}

fn relative(lhs: &Matrix, rhs: &Matrix) -> f64 {
    let d = lhs.distance(rhs);
    let s = rhs.norm();
    if s == 0.0 {
        d
    } else {
        d / s
    }
}
