//! Dense univariate polynomials over [`Scalar`].

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::{singular_values, Matrix};
use crate::scalar::{real, Scalar, TolerancePolicy, ONE, ZERO};
use crate::schur::{components_of, edges_within, spanning_tree, Edge};

/// Polynomial with coefficients stored lowest degree first.
///
/// Exact zero leading coefficients are always dropped, so the zero
/// polynomial has an empty coefficient list.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| real(c)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(ONE)
    }

    pub fn constant(c: Scalar) -> Self {
        Self::new(vec![c])
    }

    /// The indeterminate `t`.
    pub fn t() -> Self {
        Self::new(vec![ZERO, ONE])
    }

    /// `prod (t - r)` over the given roots.
    pub fn from_roots(roots: &[Scalar]) -> Self {
        roots
            .iter()
            .fold(Self::one(), |acc, &r| &acc * &Self::new(vec![-r, ONE]))
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Scalar {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops leading coefficients whose magnitude is at most `tol` times the
    /// largest coefficient magnitude.
    pub fn trimmed(&self, tol: f64) -> Self {
        let cutoff = tol * self.max_abs();
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.norm() <= cutoff) {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    pub fn scale(&self, s: Scalar) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// `p(t / sigma)`.
    pub fn rescale_variable(&self, sigma: f64) -> Self {
        let mut factor = 1.0;
        Self::new(
            self.coeffs
                .iter()
                .map(|&c| {
                    let out = c * factor;
                    factor /= sigma;
                    out
                })
                .collect(),
        )
    }

    pub fn eval(&self, x: Scalar) -> Scalar {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * x + c)
    }

    /// Horner evaluation at a matrix with the identity as unit.
    pub fn eval_matrix(&self, m: &Matrix) -> Matrix {
        self.eval_with_unit(m, &Matrix::identity(m.dim()))
    }

    /// Horner evaluation at `m` with `unit` standing for `m^0`.
    ///
    /// For an element of a corner algebra `pAp` pass `unit = p`.
    pub fn eval_with_unit(&self, m: &Matrix, unit: &Matrix) -> Matrix {
        let n = m.dim();
        let mut acc = Matrix::zeros(n);
        for &c in self.coeffs.iter().rev() {
            acc = &(&acc * m) + &unit.scale(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * real(k as f64))
                .collect(),
        )
    }

    /// Euclidean division `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn divmod(&self, divisor: &Self) -> Result<(Self, Self)> {
        let db = divisor.degree().ok_or(Error::DivisionByZeroPoly)?;
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= db {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![ZERO; rem.len() - db];
        for k in (0..quot.len()).rev() {
            let q = rem[k + db] / lead;
            quot[k] = q;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * b;
            }
        }
        rem.truncate(db);
        Ok((Self::new(quot), Self::new(rem)))
    }

    pub fn rem(&self, modulus: &Self) -> Result<Self> {
        Ok(self.divmod(modulus)?.1)
    }

    /// Inverse of `self` modulo `modulus`.
    ///
    /// Solves `self * b = 1` in `F[t]/(modulus)` through the matrix of
    /// multiplication by `self` on the basis `1, t, ..., t^{d-1}`; that matrix
    /// is singular exactly when the two polynomials share a root.
    pub fn mod_inverse(&self, modulus: &Self, policy: &TolerancePolicy) -> Result<Self> {
        let d = modulus.degree().ok_or(Error::DivisionByZeroPoly)?;
        if d == 0 {
            return Ok(Self::zero());
        }
        let mut column = self.rem(modulus)?;
        let mut mult = DMatrix::<Scalar>::zeros(d, d);
        for j in 0..d {
            for i in 0..d {
                mult[(i, j)] = column.coeff(i);
            }
            column = (&column * &Self::t()).rem(modulus)?;
        }
        let sv = singular_values(&mult);
        let rcond = match (sv.first(), sv.last()) {
            (Some(&max), Some(&min)) if max > 0.0 => min / max,
            _ => 0.0,
        };
        if rcond < policy.tau_rank {
            return Err(Error::NotCoprime { rcond });
        }
        let mut rhs = DVector::zeros(d);
        rhs[0] = ONE;
        let sol = mult.full_piv_lu().solve(&rhs).ok_or(Error::NotCoprime { rcond })?;
        Ok(Self::new(sol.iter().copied().collect()))
    }

    /// Companion matrix of the monic normalization (requires degree >= 1).
    pub fn companion(&self) -> Result<Matrix> {
        let d = match self.degree() {
            Some(d) if d >= 1 => d,
            _ => {
                return Err(Error::InvalidInput(
                    "companion matrix needs a polynomial of degree >= 1".into(),
                ))
            }
        };
        let lead = self.leading();
        let mut c = DMatrix::<Scalar>::zeros(d, d);
        for i in 1..d {
            c[(i, i - 1)] = ONE;
        }
        for i in 0..d {
            c[(i, d - 1)] = -self.coeffs[i] / lead;
        }
        Matrix::new(c)
    }

    /// All `deg` roots with multiplicity, from companion eigenvalues.
    ///
    /// Eigenvalues closer than `‖C‖ τ^{1/deg}` are grouped; a group is reported
    /// as one repeated root (its centroid) when the centroid satisfies
    /// `|p(c)| <= τ ‖p‖ (1 + |c|)^deg`, and is otherwise split at its longest
    /// spanning-tree edge.
    pub fn roots(&self, policy: &TolerancePolicy) -> Result<Vec<Scalar>> {
        let companion = self.companion()?;
        let d = companion.dim();
        let eig = companion.eigenvalues()?;
        let radius = companion.norm() * policy.tau_eq.powf(1.0 / d as f64);
        let short: Vec<Edge> = spanning_tree(&eig).into_iter().filter(|e| e.2 <= radius).collect();
        let mut pending: Vec<(Vec<usize>, Vec<Edge>)> = components_of(&(0..d).collect::<Vec<_>>(), &short)
            .into_iter()
            .map(|members| {
                let edges = edges_within(&short, &members);
                (members, edges)
            })
            .collect();
        let norm = self.norm();
        let mut roots = Vec::with_capacity(d);
        while let Some((members, mut edges)) = pending.pop() {
            let k = members.len();
            let center = members.iter().map(|&i| eig[i]).sum::<Scalar>() / real(k as f64);
            if k == 1 || self.eval(center).norm() <= policy.tau_eq * norm * (1.0 + center.norm()).powi(d as i32) {
                roots.extend(std::iter::repeat_n(center, k));
                continue;
            }
            let longest = edges
                .iter()
                .enumerate()
                .max_by(|a, b| a.1 .2.total_cmp(&b.1 .2))
                .map(|(i, _)| i)
                .expect("a group of two or more roots has a spanning edge");
            edges.swap_remove(longest);
            for part in components_of(&members, &edges) {
                let part_edges = edges_within(&edges, &part);
                pending.push((part, part_edges));
            }
        }
        roots.sort_by(|a, b| {
            b.norm()
                .total_cmp(&a.norm())
                .then(a.re.total_cmp(&b.re))
                .then(a.im.total_cmp(&b.im))
        });
        Ok(roots)
    }

    /// Interpolating polynomial through `(points[k], values[k])` via Newton
    /// divided differences.
    pub fn interpolate(points: &[Scalar], values: &[Scalar]) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                found: values.len(),
            });
        }
        let m = points.len();
        let mut table = values.to_vec();
        for level in 1..m {
            for k in (level..m).rev() {
                let denom = points[k] - points[k - level];
                if denom == ZERO {
                    return Err(Error::RepeatedRoot {
                        first: k - level,
                        second: k,
                    });
                }
                table[k] = (table[k] - table[k - 1]) / denom;
            }
        }
        let mut acc = Self::zero();
        for k in (0..m).rev() {
            acc = &(&acc * &Self::new(vec![-points[k], ONE])) + &Self::constant(table[k]);
        }
        Ok(acc)
    }

    /// Hermite interpolant: the unique polynomial of degree below
    /// `sum jets[k].len()` whose Taylor coefficients at `points[k]` start
    /// with `jets[k]`. Computed by confluent Newton divided differences.
    pub fn hermite(points: &[Scalar], jets: &[Vec<Scalar>]) -> Result<Self> {
        if points.len() != jets.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                found: jets.len(),
            });
        }
        let mut nodes = Vec::new();
        let mut group = Vec::new();
        for (k, (&x, jet)) in points.iter().zip(jets).enumerate() {
            for _ in 0..jet.len() {
                nodes.push(x);
                group.push(k);
            }
        }
        let m = nodes.len();
        // table[i] holds f[x_{i-level}, .., x_i] after each level.
        let mut table: Vec<Scalar> = group.iter().map(|&k| jets[k][0]).collect();
        #[allow(clippy::needless_range_loop)]
        for level in 1..m {
            for i in (level..m).rev() {
                let first = i - level;
                table[i] = if group[first] == group[i] {
                    jets[group[i]][level]
                } else {
                    let denom = nodes[i] - nodes[first];
                    if denom == ZERO {
                        return Err(Error::RepeatedRoot {
                            first: group[first],
                            second: group[i],
                        });
                    }
                    (table[i] - table[i - 1]) / denom
                };
            }
        }
        let mut acc = Self::zero();
        for k in (0..m).rev() {
            acc = &(&acc * &Self::new(vec![-nodes[k], ONE])) + &Self::constant(table[k]);
        }
        Ok(acc)
    }
}

/// `(quotient, remainder)` of Euclidean division.
pub fn poly_divmod(a: &Poly, b: &Poly) -> Result<(Poly, Poly)> {
    a.divmod(b)
}

/// Inverse of `a` modulo `m`.
pub fn poly_mod_inverse(a: &Poly, m: &Poly, policy: &TolerancePolicy) -> Result<Poly> {
    a.mod_inverse(m, policy)
}

/// Roots of `p` with multiplicity.
pub fn poly_roots(p: &Poly, policy: &TolerancePolicy) -> Result<Vec<Scalar>> {
    p.roots(policy)
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(real(-1.0))
    }
}
