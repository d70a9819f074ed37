//! Dense complex matrices and the numerical substrate shared by every
//! construction: inverses with certified conditioning, numerical kernels,
//! eigenvalue clustering and minimal polynomials.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{real, Scalar, TolerancePolicy, ONE, ZERO};
pub use crate::schur::{eigen_clusters, eval_cluster_product, minimal_polynomial, EigenCluster, EigenClusterReport};

/// Square complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix(DMatrix<Scalar>);

impl Matrix {
    pub fn new(inner: DMatrix<Scalar>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::DimensionMismatch {
                expected: inner.nrows(),
                found: inner.ncols(),
            });
        }
        if inner.nrows() == 0 {
            return Err(Error::InvalidInput("matrix dimension must be at least 1".into()));
        }
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Self(inner))
    }

    /// Builds an `n x n` matrix from row-major entries.
    pub fn from_row_major(n: usize, entries: &[Scalar]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    /// Builds an `n x n` real matrix from row-major entries.
    pub fn from_real(n: usize, entries: &[f64]) -> Result<Self> {
        let entries: Vec<Scalar> = entries.iter().map(|&x| real(x)).collect();
        Self::from_row_major(n, &entries)
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn diag(values: &[Scalar]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(values)))
    }

    pub fn diag_real(values: &[f64]) -> Self {
        Self::diag(&values.iter().map(|&x| real(x)).collect::<Vec<_>>())
    }

    /// Matrix unit `E_ij` (zero-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = ONE;
        Self(m)
    }

    /// Nilpotent Jordan block `J_n(0)` (ones on the superdiagonal).
    pub fn nilpotent_jordan(n: usize) -> Self {
        Self(DMatrix::from_fn(n, n, |i, j| if j == i + 1 { ONE } else { ZERO }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn inner(&self) -> &DMatrix<Scalar> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Scalar> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.0[(i, j)]
    }

    /// Row-major entries.
    pub fn row_major(&self) -> Vec<Scalar> {
        self.0.transpose().iter().copied().collect()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn spectral_norm(&self) -> f64 {
        singular_values(&self.0).first().copied().unwrap_or(0.0)
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, s: Scalar) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(real(s))
    }

    /// `self + s * I`.
    pub fn shift(&self, s: Scalar) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += s;
        }
        Self(m)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.dim());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Flattened entries (column-major), used as coordinates in `C^{n^2}`.
    pub fn flatten(&self) -> DVector<Scalar> {
        DVector::from_column_slice(self.0.as_slice())
    }

    pub fn from_flat(n: usize, v: &DVector<Scalar>) -> Self {
        Self(DMatrix::from_column_slice(n, n, v.as_slice()))
    }

    /// Ratio of the smallest to the largest singular value (0 for the zero matrix).
    pub fn rcond(&self) -> f64 {
        let sv = singular_values(&self.0);
        match (sv.first(), sv.last()) {
            (Some(&max), Some(&min)) if max > 0.0 => min / max,
            _ => 0.0,
        }
    }

    /// Condition number in the spectral norm.
    pub fn cond(&self) -> f64 {
        let r = self.rcond();
        if r == 0.0 {
            f64::INFINITY
        } else {
            1.0 / r
        }
    }

    /// Inverse by pivoted LU, refused when the reciprocal condition falls
    /// below `tau_rank`.
    pub fn inverse(&self, policy: &TolerancePolicy) -> Result<Self> {
        let rcond = self.rcond();
        if rcond < policy.tau_rank {
            return Err(Error::Singular { rcond });
        }
        self.0
            .clone()
            .full_piv_lu()
            .try_inverse()
            .map(Self)
            .ok_or(Error::Singular { rcond })
    }

    /// Eigenvalues via the complex Schur form.
    pub fn eigenvalues(&self) -> Result<Vec<Scalar>> {
        let (_, t) = crate::schur::schur_form(&self.0)?;
        Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
    }

    /// `‖self - other‖_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.0 - &other.0).norm()
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        Matrix(&self.0 + &rhs.0)
    }
}

impl Add for Matrix {
    type Output = Matrix;
    fn add(self, rhs: Matrix) -> Matrix {
        Matrix(self.0 + rhs.0)
    }
}

impl AddAssign<&Matrix> for Matrix {
    fn add_assign(&mut self, rhs: &Matrix) {
        self.0 += &rhs.0;
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        Matrix(&self.0 - &rhs.0)
    }
}

impl Sub for Matrix {
    type Output = Matrix;
    fn sub(self, rhs: Matrix) -> Matrix {
        Matrix(self.0 - rhs.0)
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        Matrix(&self.0 * &rhs.0)
    }
}

impl Mul for Matrix {
    type Output = Matrix;
    fn mul(self, rhs: Matrix) -> Matrix {
        Matrix(self.0 * rhs.0)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix(-&self.0)
    }
}

impl Neg for Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix(-self.0)
    }
}

/// Thin singular value decomposition `m = U diag(σ) V*` with `U` of the
/// shape of `m`, `V` square and `σ` descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DMatrix<Scalar>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<Scalar>,
}

/// One-sided Jacobi SVD.
///
/// Columns of `m` are rotated pairwise until they are mutually orthogonal;
/// the accumulated rotations form `V` and the column norms are the singular
/// values. Small singular values come out with high relative accuracy,
/// which the rank decisions depend on.
pub fn svd(m: &DMatrix<Scalar>) -> Svd {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = DMatrix::<Scalar>::identity(cols, cols);
    let tol = f64::EPSILON * rows.max(1) as f64;
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
                {
                    let data = a.as_slice();
                    let (cp, cq) = (&data[p * rows..(p + 1) * rows], &data[q * rows..(q + 1) * rows]);
                    for (ap, aq) in cp.iter().zip(cq) {
                        alpha += ap.norm_sqr();
                        beta += aq.norm_sqr();
                        gamma += ap.conj() * aq;
                    }
                }
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Align the phase of column q so the 2x2 problem is real.
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut a, &mut v] {
                    let len = mat.nrows();
                    let (left, right) = mat.as_mut_slice().split_at_mut(q * len);
                    let cp = &mut left[p * len..(p + 1) * len];
                    let cq = &mut right[..len];
                    for (xp, xq) in cp.iter_mut().zip(cq.iter_mut()) {
                        let (x, y) = (*xp, *xq * phase);
                        *xp = x * c - y * s;
                        *xq = x * s + y * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let mut u = DMatrix::zeros(rows, cols);
    let mut vs = DMatrix::zeros(cols, cols);
    for (k, &j) in order.iter().enumerate() {
        if norms[j] > 0.0 {
            u.set_column(k, &(a.column(j) / real(norms[j])));
        }
        vs.set_column(k, &v.column(j));
    }
    Svd {
        u,
        singular_values: order.iter().map(|&j| norms[j]).collect(),
        v: vs,
    }
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<Scalar>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv = svd(m).singular_values;
    // A wide matrix has at most `rows` nonzero singular values.
    sv.truncate(m.nrows().min(m.ncols()));
    sv
}

/// Orthonormal basis of the numerical kernel of a rectangular map.
///
/// The rank is decided at `tau_rank` relative to the largest singular value.
pub fn kernel_basis(map: &DMatrix<Scalar>, policy: &TolerancePolicy) -> Vec<DVector<Scalar>> {
    if map.ncols() == 0 {
        return Vec::new();
    }
    let d = svd(map);
    let max = d.singular_values.first().copied().unwrap_or(0.0);
    (0..map.ncols())
        .filter(|&i| max == 0.0 || d.singular_values[i] <= policy.tau_rank * max)
        .map(|i| d.v.column(i).into_owned())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn rejects_non_finite_entries() {
        let m = DMatrix::from_element(2, 2, Scalar::new(f64::NAN, 0.0));
        assert!(Matrix::new(m).is_err());
        assert!(Matrix::new(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn jacobi_svd_recomposes() {
        let m = DMatrix::from_fn(5, 3, |i, j| {
            Scalar::new((i * 3 + j) as f64 * 0.37 - 1.0, (i as f64 - j as f64).sin())
        });
        let d = svd(&m);
        let back = &d.u
            * DMatrix::from_diagonal(&DVector::from_iterator(3, d.singular_values.iter().map(|&s| real(s))))
            * d.v.adjoint();
        assert!((back - &m).norm() < 1e-13 * m.norm());
        assert!((d.v.adjoint() * &d.v - DMatrix::<Scalar>::identity(3, 3)).norm() < 1e-13);
        assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn wide_kernel_has_the_missing_directions() {
        let m = DMatrix::from_fn(2, 4, |i, j| real(if i == j { 1.0 } else { 0.0 }));
        let k = kernel_basis(&m, &policy());
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!((&m * v).norm() < 1e-14);
        }
    }

    #[test]
    fn kernel_of_zero_map_is_everything() {
        let k = kernel_basis(&DMatrix::zeros(2, 2), &policy());
        assert_eq!(k.len(), 2);
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        let k = kernel_basis(&DMatrix::identity(3, 3), &policy());
        assert!(k.is_empty());
    }

    #[test]
    fn kernel_of_rank_one_map() {
        let m = Matrix::from_real(2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        let k = kernel_basis(m.inner(), &policy());
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert!((m.inner() * v).norm() < 1e-14);
        assert!((v.norm() - 1.0).abs() < 1e-14);
        assert!((v[0] + v[1]).norm() < 1e-14);
    }

    #[test]
    fn kernel_of_wide_map() {
        let m = DMatrix::from_row_slice(1, 3, &[ONE, ONE, ZERO]);
        let k = kernel_basis(&m, &policy());
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!((&m * v).norm() < 1e-14);
        }
    }

    #[test]
    fn minimal_polynomial_of_identity() {
        let p = minimal_polynomial(&Matrix::identity(3), &policy()).unwrap();
        assert_eq!(p.degree(), Some(1));
        assert!((p.coeff(0) + ONE).norm() < 1e-14);
    }

    #[test]
    fn minimal_polynomial_of_jordan_block() {
        let m = Matrix::from_real(2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        let p = minimal_polynomial(&m, &policy()).unwrap();
        // (t - 1)^2 = t^2 - 2t + 1
        assert_eq!(p.degree(), Some(2));
        assert!((p.coeff(0) - ONE).norm() < 1e-12);
        assert!((p.coeff(1) + real(2.0)).norm() < 1e-12);
    }

    #[test]
    fn minimal_polynomial_of_diagonal() {
        let m = Matrix::diag_real(&[2.0, 0.5]);
        let p = minimal_polynomial(&m, &policy()).unwrap();
        assert_eq!(p.degree(), Some(2));
        let residual = p.eval_matrix(&m);
        assert!(residual.norm() < 1e-14);
        // (t - 2)(t - 1/2) = t^2 - 2.5 t + 1
        assert!((p.coeff(1) + real(2.5)).norm() < 1e-14);
        assert!((p.coeff(0) - ONE).norm() < 1e-14);
    }

    #[test]
    fn clusters_of_diagonal_with_repeat() {
        let r = eigen_clusters(&Matrix::diag_real(&[1.0, 1.0, 5.0]), &policy()).unwrap();
        assert_eq!(r.clusters.len(), 2);
        assert_eq!(r.max_block, 1);
        let one = r.clusters.iter().find(|c| (c.value - ONE).norm() < 1e-12).unwrap();
        assert_eq!(one.multiplicity, 2);
        let five = r
            .clusters
            .iter()
            .find(|c| (c.value - real(5.0)).norm() < 1e-12)
            .unwrap();
        assert_eq!(five.multiplicity, 1);
    }

    #[test]
    fn clusters_of_nilpotent_block() {
        let r = eigen_clusters(&Matrix::nilpotent_jordan(3), &policy()).unwrap();
        assert_eq!(r.clusters.len(), 1);
        assert_eq!(r.clusters[0].multiplicity, 3);
        assert_eq!(r.max_block, 3);
        assert!(r.clusters[0].value.norm() < 1e-12);
    }

    #[test]
    fn clusters_of_two_distinct_values() {
        let m = Matrix::diag_real(&[2.0, 0.5]);
        let r = eigen_clusters(&m, &policy()).unwrap();
        assert_eq!(r.clusters.len(), 2);
        assert_eq!(r.max_block, 1);
        let prod = eval_cluster_product(&m, &r);
        assert!(prod.norm() < 1e-14);
    }

    #[test]
    fn inverse_refuses_singular() {
        let m = Matrix::from_real(2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(m.inverse(&policy()), Err(Error::Singular { .. })));
    }

    #[test]
    fn inverse_of_diagonal() {
        let m = Matrix::diag_real(&[2.0, 0.5]);
        let inv = m.inverse(&policy()).unwrap();
        assert!(inv.distance(&Matrix::diag_real(&[0.5, 2.0])) < 1e-15);
    }
}
