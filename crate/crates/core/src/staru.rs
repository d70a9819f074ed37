//! Algebras with a linear involution `x -> x*`: unitary conjugators of
//! order dividing four.
//!
//! For a unitary `x` conjugate to its inverse, a conjugator `z` is first made
//! unitary (`z s^-1` with `s^2 = z* z`). The Fitting idempotent `p` of the
//! selfadjoint `(z - z^-1)^2` then splits the problem in two corners: on
//! `pAp` the difference `z - z^-1` is invertible and yields a skew unitary
//! `u` with `u^2 = -1`, on the complement it is nilpotent and `z + z^-1`
//! yields a selfadjoint unitary with `u^2 = 1`.

use std::fmt;
use std::sync::Arc;

use crate::algebra::AlgebraRep;
use crate::decomp::{find_conjugator, TargetKind};
use crate::error::{Error, Result};
use crate::hensel::{fitting_idempotent_at_scale, sqrt_element, Branch};
use crate::matrix::Matrix;
use crate::report::{Check, VerificationReport};
use crate::scalar::{Scalar, TolerancePolicy, I};

/// A candidate involution, before its axioms are checked.
#[derive(Clone)]
pub enum StarKind {
    Transpose,
    /// `x -> G^-1 x^T G` for an invertible bilinear form `G`.
    FormAdjoint(Matrix),
    Custom(Arc<dyn Fn(&Matrix) -> Matrix + Send + Sync>),
}

impl fmt::Debug for StarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StarKind::Transpose => f.write_str("Transpose"),
            StarKind::FormAdjoint(g) => f.debug_tuple("FormAdjoint").field(g).finish(),
            StarKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A linear involution of an algebra whose axioms have been verified.
#[derive(Debug, Clone)]
pub struct StarMap {
    algebra: AlgebraRep,
    kind: StarKind,
    /// `(G, G^-1)` for a form adjoint.
    form: Option<(Matrix, Matrix)>,
}

impl StarMap {
    pub fn apply(&self, x: &Matrix) -> Matrix {
        match (&self.kind, &self.form) {
            (StarKind::Transpose, _) => x.transpose(),
            (StarKind::FormAdjoint(_), Some((g, g_inv))) => &(g_inv * &x.transpose()) * g,
            (StarKind::Custom(f), _) => f(x),
            (StarKind::FormAdjoint(_), None) => unreachable!("form adjoint without form"),
        }
    }

    pub fn algebra(&self) -> &AlgebraRep {
        &self.algebra
    }

    pub fn kind(&self) -> &StarKind {
        &self.kind
    }

    /// `‖x* x - 1‖` with its natural scale.
    pub fn unitarity_check(&self, x: &Matrix, tol: f64) -> Check {
        let xs = self.apply(x);
        let scale = xs.norm() * x.norm();
        Check::identity("y*y = 1", &(&xs * x), self.algebra.unit(), scale, tol)
    }
}

/// Builds a star map after checking linearity, anti-multiplicativity and
/// involutivity on the basis, and that the map preserves the algebra.
pub fn make_star(algebra: &AlgebraRep, kind: StarKind, policy: &TolerancePolicy) -> Result<StarMap> {
    let n = algebra.ambient_dim();
    let form = match &kind {
        StarKind::FormAdjoint(g) => {
            if g.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: g.dim(),
                });
            }
            let rcond = g.rcond();
            if rcond < policy.tau_rank {
                return Err(Error::Singular { rcond });
            }
            Some((g.clone(), g.inverse(policy)?))
        }
        _ => None,
    };
    let star = StarMap {
        algebra: algebra.clone(),
        kind,
        form,
    };
    let basis = algebra.basis();
    let images: Vec<Matrix> = basis.iter().map(|b| star.apply(b)).collect();
    if let Some(bad) = images.iter().find(|m| m.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.dim(),
        });
    }
    let tol = policy.tau_eq;
    let violation = |axiom, c: Check| {
        if c.pass {
            Ok(())
        } else {
            Err(Error::NotAnInvolution {
                axiom,
                residual: c.relative(),
            })
        }
    };

    let (alpha, beta) = (Scalar::new(0.6, 0.8), Scalar::new(-0.3, 1.1));
    for k in 0..basis.len() {
        let l = (k + 1) % basis.len();
        let combo = &basis[k].scale(alpha) + &basis[l].scale(beta);
        let expected = &images[k].scale(alpha) + &images[l].scale(beta);
        let natural = images[k].norm() + images[l].norm();
        violation(
            "linearity",
            Check::identity("", &star.apply(&combo), &expected, natural, tol),
        )?;
    }
    for (bi, si) in basis.iter().zip(&images) {
        for (bj, sj) in basis.iter().zip(&images) {
            let lhs = star.apply(&(bi * bj));
            let natural = si.norm() * sj.norm();
            violation(
                "anti-multiplicativity",
                Check::identity("", &lhs, &(sj * si), natural, tol),
            )?;
        }
    }
    for (b, s) in basis.iter().zip(&images) {
        violation("involutivity", Check::identity("", &star.apply(s), b, s.norm(), tol))?;
    }
    for s in &images {
        let residual = algebra.span_distance(s);
        if residual > tol * s.norm() {
            return Err(Error::AlgebraNotStable {
                residual: residual / s.norm(),
            });
        }
    }
    Ok(star)
}

/// `x* x = 1` within `tau_eq`.
pub fn is_unitary(star: &StarMap, x: &Matrix, policy: &TolerancePolicy) -> bool {
    x.dim() == star.algebra.ambient_dim() && star.unitarity_check(x, policy.tau_eq).pass
}

/// Replaces a conjugator `z` (with `z x z^-1 = x^-1`) by the unitary
/// `z s^-1`, where `s` is the polynomial square root of `z* z`.
pub fn unitarize_conjugator(star: &StarMap, z: &Matrix, policy: &TolerancePolicy) -> Result<Matrix> {
    let algebra = &star.algebra;
    let zsz = &star.apply(z) * z;
    let s = sqrt_element(algebra, &zsz, &Branch::Principal, policy)?;
    Ok(z * &algebra.invert(&s.element, policy)?)
}

/// `u = i d r(d^-2)` with `d = z - z*` invertible in `algebra` and
/// `r(d^-2)^2 = d^-2`: skew (`u* = -u`) with `u^2 = -1`.
pub fn skew_case(star: &StarMap, algebra: &AlgebraRep, z: &Matrix, policy: &TolerancePolicy) -> Result<Matrix> {
    let d = &algebra.compress(z) - &algebra.compress(&star.apply(z));
    let d_inv = algebra.invert(&d, policy)?;
    let root = sqrt_element(algebra, &(&d_inv * &d_inv), &Branch::Principal, policy)?;
    Ok((&d * &root.element).scale(I))
}

/// `u = e r(e^-2)` with `e = z + z*` and `r(e^-2)^2 = e^-2`: selfadjoint
/// with `u^2 = 1`. `e` is invertible when `z - z*` is nilpotent.
pub fn selfadjoint_case(star: &StarMap, algebra: &AlgebraRep, z: &Matrix, policy: &TolerancePolicy) -> Result<Matrix> {
    let e = &algebra.compress(z) + &algebra.compress(&star.apply(z));
    let e_inv = algebra.invert(&e, policy)?;
    let root = sqrt_element(algebra, &(&e_inv * &e_inv), &Branch::Principal, policy)?;
    Ok(&e * &root.element)
}

/// Which special cases contributed to the conjugator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CasePath {
    /// `z - z^-1` invertible: `y^2 = -1`.
    Skew,
    /// `z - z^-1` nilpotent: `y^2 = 1`.
    Selfadjoint,
    /// Both corners are nonzero.
    Mixed,
}

impl CasePath {
    pub fn name(self) -> &'static str {
        match self {
            CasePath::Skew => "skew",
            CasePath::Selfadjoint => "selfadjoint",
            CasePath::Mixed => "mixed",
        }
    }
}

/// Unitary `y` with `y x y^-1 = x^-1` and `y^4 = 1`.
#[derive(Debug, Clone)]
pub struct UnitaryCert {
    pub x: Matrix,
    pub y: Matrix,
    /// The unitarized conjugator the construction started from.
    pub z: Matrix,
    /// Fitting idempotent of `(z - z^-1)^2`.
    pub idempotent: Matrix,
    pub path: CasePath,
    pub report: VerificationReport,
}

/// `x = y w` with `y, w` unitary and `y^4 = w^4 = 1`.
#[derive(Debug, Clone)]
pub struct UnitaryProduct {
    pub cert: UnitaryCert,
    pub w: Matrix,
    pub report: VerificationReport,
}

/// Finds a unitary `y` of order dividing four conjugating the unitary `x`
/// to its inverse.
pub fn unitary_fourth_root_conjugator(
    star: &StarMap,
    x: &Matrix,
    policy: &TolerancePolicy,
    seed: u64,
) -> Result<UnitaryCert> {
    let algebra = &star.algebra;
    algebra.require(x, policy)?;
    if !is_unitary(star, x, policy) {
        return Err(Error::PreconditionViolated(vec!["x unitary".into()]));
    }
    let witness = find_conjugator(algebra, x, TargetKind::Inverse, policy, seed)?;
    let z = unitarize_conjugator(star, &witness.conjugator, policy)?;
    let z_star = star.apply(&z);
    let d = &z - &z_star;
    let reference = (z.norm() + z_star.norm()).powi(2);
    let fitting = fitting_idempotent_at_scale(algebra, &(&d * &d), reference, policy)?;
    let p = fitting.idempotent.clone();

    let (y, path) = if fitting.is_identity() {
        (skew_case(star, algebra, &z, policy)?, CasePath::Skew)
    } else if fitting.is_zero() {
        (selfadjoint_case(star, algebra, &z, policy)?, CasePath::Selfadjoint)
    } else {
        let complement = algebra.unit() - &p;
        let upper = algebra.corner(&p, policy)?;
        let lower = algebra.corner(&complement, policy)?;
        let u1 = skew_case(star, &upper, &z, policy)?;
        let u2 = selfadjoint_case(star, &lower, &z, policy)?;
        (&u1 + &u2, CasePath::Mixed)
    };
    let report = verify_unitary(star, &y, x, policy.tau_eq);
    Ok(UnitaryCert {
        x: x.clone(),
        y,
        z,
        idempotent: p,
        path,
        report,
    })
}

/// Splits the unitary `x` as `y w` with `w = y^-1 x`; then
/// `w^2 = y^-1 (y x y^-1) x = y^-2`, so `w^4 = 1`.
pub fn unitary_fourth_root_product(
    star: &StarMap,
    x: &Matrix,
    policy: &TolerancePolicy,
    seed: u64,
) -> Result<UnitaryProduct> {
    let cert = unitary_fourth_root_conjugator(star, x, policy, seed)?;
    let w = &star.algebra.invert(&cert.y, policy)? * x;
    let report = verify_product(star, &cert.y, &w, x, policy.tau_eq);
    Ok(UnitaryProduct { cert, w, report })
}

/// Rechecks `y* y = 1`, `y^4 = 1`, `y x y^-1 = x^-1` and membership.
pub fn verify_unitary(star: &StarMap, y: &Matrix, x: &Matrix, tol: f64) -> VerificationReport {
    let algebra = &star.algebra;
    if y.dim() != x.dim() || x.dim() != algebra.ambient_dim() {
        return VerificationReport::new(vec![Check::from_residual("dimensions agree", f64::INFINITY, 0.0, 0.0)]);
    }
    let unit = algebra.unit();
    let ny = y.norm();
    let y2 = y * y;
    let mut checks = vec![
        star.unitarity_check(y, tol),
        Check::identity("y^4 = 1", &(&y2 * &y2), unit, ny.powi(4), tol),
    ];
    let strict = TolerancePolicy::default();
    checks.push(match (algebra.invert(y, &strict), algebra.invert(x, &strict)) {
        (Ok(y_inv), Ok(x_inv)) => {
            let natural = ny * x.norm() * y_inv.norm();
            Check::identity("yxy^-1 = x^-1", &(&(y * x) * &y_inv), &x_inv, natural, tol)
        }
        _ => Check::from_residual("yxy^-1 = x^-1", f64::INFINITY, 0.0, tol),
    });
    checks.push(Check::membership("y in A", algebra, y, tol));
    VerificationReport::new(checks)
}

/// Rechecks a product split `x = y w` with both factors unitary of order
/// dividing four.
pub fn verify_product(star: &StarMap, y: &Matrix, w: &Matrix, x: &Matrix, tol: f64) -> VerificationReport {
    let algebra = &star.algebra;
    if y.dim() != x.dim() || w.dim() != x.dim() || x.dim() != algebra.ambient_dim() {
        return VerificationReport::new(vec![Check::from_residual("dimensions agree", f64::INFINITY, 0.0, 0.0)]);
    }
    let unit = algebra.unit();
    let (ny, nw) = (y.norm(), w.norm());
    let (y2, w2) = (y * y, w * w);
    let mut w_unitary = star.unitarity_check(w, tol);
    w_unitary.name = "w*w = 1".into();
    let checks = vec![
        Check::identity("yw = x", &(y * w), x, ny * nw, tol),
        Check::identity("y^4 = 1", &(&y2 * &y2), unit, ny.powi(4), tol),
        Check::identity("w^4 = 1", &(&w2 * &w2), unit, nw.powi(4), tol),
        star.unitarity_check(y, tol),
        w_unitary,
        Check::membership("y in A", algebra, y, tol),
        Check::membership("w in A", algebra, w, tol),
    ];
    VerificationReport::new(checks)
}
