//! Finite-dimensional unital algebras represented as spans of matrices.
//!
//! Every construction in this crate is carried out inside an [`AlgebraRep`]:
//! conjugator searches run in the algebra's own coordinates, and all
//! produced elements are checked to lie in the span. Corner algebras `pAp`
//! are algebras in their own right whose unit is the idempotent `p`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::{singular_values, svd, Matrix};
use crate::poly::Poly;
use crate::scalar::{Scalar, TolerancePolicy, ZERO};

#[derive(Debug, Clone)]
enum Coordinates {
    /// The full matrix algebra; coordinates are the column-major entries.
    Full,
    /// Thin QR factors of the flattened basis (`n^2 x d`).
    Span { q: DMatrix<Scalar>, r: DMatrix<Scalar> },
}

/// A unital associative algebra of `n x n` matrices.
#[derive(Debug, Clone)]
pub struct AlgebraRep {
    ambient_dim: usize,
    basis: Vec<Matrix>,
    unit: Matrix,
    unit_coords: Vec<Scalar>,
    coords: Coordinates,
    /// Orthonormal basis of the range of the unit, when the unit is not `I`.
    range: Option<DMatrix<Scalar>>,
}

impl AlgebraRep {
    /// The full matrix algebra `M_n`, with the matrix units as basis.
    pub fn full(n: usize) -> Self {
        let basis: Vec<Matrix> = (0..n)
            .flat_map(|j| (0..n).map(move |i| Matrix::unit(n, i, j)))
            .collect();
        let unit = Matrix::identity(n);
        let unit_coords = unit.flatten().iter().copied().collect();
        Self {
            ambient_dim: n,
            basis,
            unit,
            unit_coords,
            coords: Coordinates::Full,
            range: None,
        }
    }

    /// Algebra with a prescribed basis; the basis must be independent,
    /// closed under products and contain the identity in its span.
    pub fn from_basis(basis: Vec<Matrix>, policy: &TolerancePolicy) -> Result<Self> {
        let n = check_dims(&basis)?;
        let flat = flatten_all(&basis, n);
        let sv = singular_values(&flat);
        let max = sv.first().copied().unwrap_or(0.0);
        if max == 0.0 || sv.iter().any(|&s| s <= policy.tau_rank * max) {
            return Err(Error::InvalidInput("algebra basis is linearly dependent".into()));
        }
        let alg = Self::from_independent(basis, Matrix::identity(n), policy)?;
        for a in &alg.basis {
            for b in &alg.basis {
                let prod = a * b;
                let residual = alg.residual(&prod);
                if residual > policy.tau_eq * prod.norm().max(f64::MIN_POSITIVE) {
                    return Err(Error::InvalidInput(format!(
                        "basis is not closed under multiplication (residual {residual:e})"
                    )));
                }
            }
        }
        Ok(alg)
    }

    fn from_independent(basis: Vec<Matrix>, unit: Matrix, policy: &TolerancePolicy) -> Result<Self> {
        let n = unit.dim();
        let flat = flatten_all(&basis, n);
        let qr = flat.qr();
        let coords = Coordinates::Span { q: qr.q(), r: qr.r() };
        let range = if unit == Matrix::identity(n) {
            None
        } else {
            Some(range_basis(&unit))
        };
        let mut alg = Self {
            ambient_dim: n,
            basis,
            unit_coords: Vec::new(),
            unit: unit.clone(),
            coords,
            range,
        };
        let residual = alg.residual(&unit);
        if residual > policy.tau_eq * unit.norm().max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidInput(format!(
                "the unit does not lie in the span (residual {residual:e})"
            )));
        }
        alg.unit_coords = alg.solve_coords(&unit);
        Ok(alg)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn unit(&self) -> &Matrix {
        &self.unit
    }

    pub fn unit_coords(&self) -> &[Scalar] {
        &self.unit_coords
    }

    pub fn is_full(&self) -> bool {
        matches!(self.coords, Coordinates::Full)
    }

    fn check_dim(&self, m: &Matrix) -> Result<()> {
        if m.dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: m.dim(),
            });
        }
        Ok(())
    }

    /// Distance from `m` to the span of the basis (Frobenius norm).
    pub fn span_distance(&self, m: &Matrix) -> f64 {
        self.residual(m)
    }

    fn residual(&self, m: &Matrix) -> f64 {
        match &self.coords {
            Coordinates::Full => 0.0,
            Coordinates::Span { q, .. } => {
                let v = m.flatten();
                let proj = q * (q.adjoint() * &v);
                (v - proj).norm()
            }
        }
    }

    fn solve_coords(&self, m: &Matrix) -> Vec<Scalar> {
        match &self.coords {
            Coordinates::Full => m.flatten().iter().copied().collect(),
            Coordinates::Span { q, r } => {
                let rhs = q.adjoint() * m.flatten();
                r.solve_upper_triangular(&rhs)
                    .expect("basis is independent")
                    .iter()
                    .copied()
                    .collect()
            }
        }
    }

    /// Membership test: the projection residual must not exceed
    /// `tau_eq * ‖m‖`.
    pub fn contains(&self, m: &Matrix, policy: &TolerancePolicy) -> Result<bool> {
        self.check_dim(m)?;
        Ok(self.residual(m) <= policy.tau_eq * m.norm())
    }

    /// Like [`contains`](Self::contains) but reports the residual as an error.
    pub fn require(&self, m: &Matrix, policy: &TolerancePolicy) -> Result<()> {
        self.check_dim(m)?;
        let residual = self.residual(m);
        if residual > policy.tau_eq * m.norm() {
            return Err(Error::NotInAlgebra { residual });
        }
        Ok(())
    }

    /// Coordinates of `m` in the basis.
    pub fn coords_of(&self, m: &Matrix, policy: &TolerancePolicy) -> Result<Vec<Scalar>> {
        self.require(m, policy)?;
        Ok(self.solve_coords(m))
    }

    /// The element with the given coordinates.
    pub fn from_coords(&self, coords: &[Scalar]) -> Result<Matrix> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: coords.len(),
            });
        }
        let mut acc = Matrix::zeros(self.ambient_dim);
        for (b, &c) in self.basis.iter().zip(coords) {
            if c != ZERO {
                acc += &b.scale(c);
            }
        }
        Ok(acc)
    }

    /// The operator induced by `m` on the range of the unit.
    ///
    /// For the full algebra this is `m` itself; for a corner `pAp` it is the
    /// compression `V* m V` with `V` an orthonormal basis of `range(p)`.
    pub fn restrict(&self, m: &Matrix) -> Matrix {
        match &self.range {
            None => m.clone(),
            Some(v) => Matrix::new(v.adjoint() * m.inner() * v).expect("compression of a square matrix is square"),
        }
    }

    /// `p m p` for the unit `p`; `m` itself for the full algebra.
    pub fn compress(&self, m: &Matrix) -> Matrix {
        match &self.range {
            None => m.clone(),
            Some(_) => &(&self.unit * m) * &self.unit,
        }
    }

    /// Maps an operator `R` on the range of the unit back to `V R V* p`,
    /// so that `lift(f(restrict(m))) = f(m)` with the unit read as `m^0`.
    pub fn lift(&self, restricted: &Matrix) -> Matrix {
        match &self.range {
            None => restricted.clone(),
            Some(v) => {
                let left = v * restricted.inner();
                let right = v.adjoint() * self.unit.inner();
                Matrix::new(left * right).expect("lifted operator is square")
            }
        }
    }

    /// Reciprocal condition of `m` as an element of this algebra.
    pub fn rcond(&self, m: &Matrix) -> f64 {
        if self.range.as_ref().is_some_and(|v| v.ncols() == 0) {
            return 0.0;
        }
        self.restrict(m).rcond()
    }

    /// Inverse of `x` inside the algebra (with respect to its unit).
    pub fn invert(&self, x: &Matrix, policy: &TolerancePolicy) -> Result<Matrix> {
        self.check_dim(x)?;
        match &self.range {
            None => x.inverse(policy),
            Some(_) => {
                let rcond = self.rcond(x);
                if rcond < policy.tau_rank {
                    return Err(Error::Singular { rcond });
                }
                // x + (1 - p) is invertible exactly when x is invertible in pAp,
                // and its inverse is x^{-1} + (1 - p).
                let complement = &Matrix::identity(self.ambient_dim) - &self.unit;
                let lifted = (x + &complement).inverse(&TolerancePolicy {
                    tau_rank: f64::MIN_POSITIVE,
                    ..*policy
                })?;
                Ok(&lifted - &complement)
            }
        }
    }

    /// `p(x)` with the algebra's unit standing for `x^0`.
    pub fn eval_poly(&self, p: &Poly, x: &Matrix) -> Matrix {
        p.eval_with_unit(x, &self.unit)
    }

    /// The corner algebra `pAp` for an idempotent `p` of this algebra.
    pub fn corner(&self, p: &Matrix, policy: &TolerancePolicy) -> Result<Self> {
        self.require(p, policy)?;
        let n = self.ambient_dim;
        let compressed: Vec<Matrix> = self.basis.iter().map(|b| &(p * b) * p).collect();
        let flat = flatten_all(&compressed, n);
        let svd = svd(&flat);
        let u = svd.u;
        let sv = &svd.singular_values;
        let max = sv.iter().copied().fold(0.0_f64, f64::max);
        if max == 0.0 {
            return Err(Error::InvalidInput("corner of the zero idempotent".into()));
        }
        // Noise in a computed idempotent leaks into every compressed direction.
        let idem = (&(p * p) - p).norm() / p.norm();
        let cutoff = max * policy.tau_rank.max(10.0 * idem);
        let basis: Vec<Matrix> = (0..sv.len())
            .filter(|&i| sv[i] > cutoff)
            .map(|i| Matrix::from_flat(n, &u.column(i).into_owned()))
            .collect();
        let loose = TolerancePolicy {
            tau_eq: policy.tau_eq.max(10.0 * idem),
            ..*policy
        };
        Self::from_independent(basis, p.clone(), &loose)
    }

    /// Largest projection residual over all pairwise basis products,
    /// relative to the product norm.
    pub fn closure_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.basis {
            for b in &self.basis {
                let prod = a * b;
                let norm = prod.norm();
                if norm > 0.0 {
                    worst = worst.max(self.residual(&prod) / norm);
                }
            }
        }
        worst
    }
}

/// Smallest unital algebra containing the generators.
///
/// The identity is adjoined first; products of spanning elements are then
/// orthogonalized against the current span and adjoined until the span is
/// closed under multiplication. The dimension bound `n^2` guarantees
/// termination.
pub fn algebra_from_span(generators: &[Matrix], policy: &TolerancePolicy) -> Result<AlgebraRep> {
    let n = check_dims(generators)?;
    let mut span: Vec<DVector<Scalar>> = Vec::new();
    let mut elements: Vec<Matrix> = Vec::new();
    let adjoin = |m: &Matrix, span: &mut Vec<DVector<Scalar>>, elements: &mut Vec<Matrix>| {
        let norm = m.norm();
        if norm == 0.0 {
            return false;
        }
        let mut v = m.flatten() / Scalar::new(norm, 0.0);
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            for q in span.iter() {
                let c = q.dotc(&v);
                v -= q * c;
            }
        }
        let rest = v.norm();
        if rest <= policy.tau_rank {
            return false;
        }
        let q = v / Scalar::new(rest, 0.0);
        elements.push(Matrix::from_flat(n, &q));
        span.push(q);
        true
    };

    adjoin(&Matrix::identity(n), &mut span, &mut elements);
    for g in generators {
        adjoin(g, &mut span, &mut elements);
    }
    let mut checked = 0;
    while checked < elements.len() {
        let current = elements.len();
        for i in 0..current {
            for j in 0..current {
                if i < checked && j < checked {
                    continue;
                }
                let prod = &elements[i] * &elements[j];
                adjoin(&prod, &mut span, &mut elements);
                if elements.len() >= n * n {
                    break;
                }
            }
        }
        checked = current;
        if elements.len() >= n * n {
            return Ok(AlgebraRep::full(n));
        }
    }
    AlgebraRep::from_independent(elements, Matrix::identity(n), policy)
}

/// Membership test for `m` in `algebra`.
pub fn contains(algebra: &AlgebraRep, m: &Matrix, policy: &TolerancePolicy) -> Result<bool> {
    algebra.contains(m, policy)
}

/// An element of an algebra, held by its coordinates.
#[derive(Debug, Clone)]
pub struct AlgebraElement<'a> {
    algebra: &'a AlgebraRep,
    coords: Vec<Scalar>,
}

impl<'a> AlgebraElement<'a> {
    pub fn from_matrix(algebra: &'a AlgebraRep, m: &Matrix, policy: &TolerancePolicy) -> Result<Self> {
        Ok(Self {
            algebra,
            coords: algebra.coords_of(m, policy)?,
        })
    }

    pub fn from_coords(algebra: &'a AlgebraRep, coords: Vec<Scalar>) -> Result<Self> {
        if coords.len() != algebra.dim() {
            return Err(Error::DimensionMismatch {
                expected: algebra.dim(),
                found: coords.len(),
            });
        }
        Ok(Self { algebra, coords })
    }

    pub fn algebra(&self) -> &'a AlgebraRep {
        self.algebra
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn matrix(&self) -> Matrix {
        self.algebra
            .from_coords(&self.coords)
            .expect("coordinate length checked at construction")
    }
}

/// Inverse of `x` expressed in the basis of its algebra.
pub fn invert_in_algebra<'a>(x: &AlgebraElement<'a>, policy: &TolerancePolicy) -> Result<AlgebraElement<'a>> {
    let inv = x.algebra.invert(&x.matrix(), policy)?;
    AlgebraElement::from_matrix(x.algebra, &inv, policy)
}

fn check_dims(mats: &[Matrix]) -> Result<usize> {
    let n = mats
        .first()
        .ok_or_else(|| Error::InvalidInput("at least one matrix is required".into()))?
        .dim();
    if let Some(bad) = mats.iter().find(|m| m.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.dim(),
        });
    }
    Ok(n)
}

fn flatten_all(mats: &[Matrix], n: usize) -> DMatrix<Scalar> {
    let mut flat = DMatrix::zeros(n * n, mats.len());
    for (k, m) in mats.iter().enumerate() {
        flat.set_column(k, &m.flatten());
    }
    flat
}

/// Orthonormal basis of `range(p)` for an idempotent `p`.
///
/// Nonzero singular values of an idempotent are at least one.
fn range_basis(p: &Matrix) -> DMatrix<Scalar> {
    let svd = svd(p.inner());
    let u = svd.u;
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 0.5)
        .collect();
    let mut v = DMatrix::zeros(p.dim(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        v.set_column(c, &u.column(i));
    }
    v
}
