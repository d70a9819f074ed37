//! Named algebras and seeded random generators for tests, benchmarks and
//! command-line demos.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::algebra::{algebra_from_span, AlgebraRep};
use crate::matrix::Matrix;
use crate::scalar::{Scalar, TolerancePolicy, ONE, ZERO};

/// `C I_n + NT_n(C)`: upper-triangular matrices with constant diagonal.
pub fn upper_triangular_equal_diagonal(n: usize) -> AlgebraRep {
    let gens: Vec<Matrix> = (0..n.saturating_sub(1)).map(|i| Matrix::unit(n, i, i + 1)).collect();
    let gens = if gens.is_empty() {
        vec![Matrix::identity(n)]
    } else {
        gens
    };
    algebra_from_span(&gens, &TolerancePolicy::default()).expect("matrix units generate a valid algebra")
}

/// Standard symplectic form `[[0, I_m], [-I_m, 0]]` on `C^{2m}`.
pub fn standard_symplectic_form(n: usize) -> Matrix {
    assert!(n.is_multiple_of(2), "symplectic forms need even dimension");
    let m = n / 2;
    let mut g = DMatrix::zeros(n, n);
    for i in 0..m {
        g[(i, m + i)] = ONE;
        g[(m + i, i)] = -ONE;
    }
    Matrix::new(g).expect("square")
}

/// Block diagonal matrix from square blocks.
pub fn block_diag(blocks: &[Matrix]) -> Matrix {
    let n: usize = blocks.iter().map(|b| b.dim()).sum();
    let mut out = DMatrix::zeros(n, n);
    let mut offset = 0;
    for b in blocks {
        let k = b.dim();
        out.view_mut((offset, offset), (k, k)).copy_from(b.inner());
        offset += k;
    }
    Matrix::new(out).expect("square")
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Scalar {
    Scalar::new(gaussian(rng), gaussian(rng)) / std::f64::consts::SQRT_2
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    Matrix::new(DMatrix::from_fn(n, n, |_, _| complex_gaussian(rng))).expect("square")
}

/// Haar-like random unitary (Q factor of a complex Gaussian matrix).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let g = random_complex(rng, n);
    Matrix::new(g.into_inner().qr().q()).expect("square")
}

/// Random invertible matrix `U diag(s) V` with singular values drawn
/// log-uniformly from `[1/sqrt(cond), sqrt(cond)]`.
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, n: usize, cond: f64) -> Matrix {
    let half = cond.sqrt().ln();
    let s: Vec<f64> = (0..n).map(|_| rng.gen_range(-half..=half).exp()).collect();
    let u = random_unitary(rng, n);
    let v = random_unitary(rng, n);
    &(&u * &Matrix::diag_real(&s)) * &v
}

/// Eigenvalue with modulus log-uniform in `[lo, hi]` and uniform phase.
pub fn random_eigenvalue<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> Scalar {
    let modulus = rng.gen_range(lo.ln()..=hi.ln()).exp();
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    Scalar::from_polar(modulus, phase)
}

/// Jordan block `λ (I + N)` of size `k`, similar to `J_k(λ)` for `λ != 0`.
pub fn scaled_jordan_block(lambda: Scalar, k: usize) -> Matrix {
    Matrix::new(DMatrix::from_fn(
        k,
        k,
        |i, j| {
            if i == j || j == i + 1 {
                lambda
            } else {
                ZERO
            }
        },
    ))
    .expect("square")
}

/// Random matrix of size `n` with planted Jordan structure.
///
/// Block sizes are drawn from `1..=max_block`, eigenvalues from
/// [`random_eigenvalue`], and the canonical form is conjugated by a random
/// matrix of condition number at most `cond`. Returns the matrix and the
/// planted block sizes.
pub fn planted_jordan<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    max_block: usize,
    moduli: (f64, f64),
    cond: f64,
) -> (Matrix, Vec<usize>) {
    let mut sizes = Vec::new();
    let mut left = n;
    while left > 0 {
        let k = rng.gen_range(1..=max_block.min(left));
        sizes.push(k);
        left -= k;
    }
    let blocks: Vec<Matrix> = sizes
        .iter()
        .map(|&k| scaled_jordan_block(random_eigenvalue(rng, moduli.0, moduli.1), k))
        .collect();
    let j = block_diag(&blocks);
    let v = random_invertible(rng, n, cond);
    let v_inv = v.inverse(&TolerancePolicy::default()).expect("well conditioned");
    (&(&v * &j) * &v_inv, sizes)
}

/// Random involution `v diag(±1) v^{-1}`.
pub fn random_involution<R: Rng + ?Sized>(rng: &mut R, n: usize, cond: f64) -> Matrix {
    let signs: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
    conjugate(rng, &Matrix::diag_real(&signs), cond)
}

/// `v m v^{-1}` for a random `v` of condition number at most `cond`.
pub fn conjugate<R: Rng + ?Sized>(rng: &mut R, m: &Matrix, cond: f64) -> Matrix {
    let v = random_invertible(rng, m.dim(), cond);
    let v_inv = v.inverse(&TolerancePolicy::default()).expect("well conditioned");
    &(&v * m) * &v_inv
}

/// Random square-zero matrix `v [[0, R], [0, 0]] v^{-1}` with an
/// `r x (n - r)` block, `1 <= r <= n/2`.
pub fn random_square_zero<R: Rng + ?Sized>(rng: &mut R, n: usize, cond: f64) -> Matrix {
    let r = rng.gen_range(1..=(n / 2).max(1));
    let mut m = DMatrix::zeros(n, n);
    for i in 0..r {
        for j in r..n {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    conjugate(rng, &Matrix::new(m).expect("square"), cond)
}

/// Pair of square-zero matrices `v [[0,R],[0,0]] v^{-1}`, `v [[0,0],[S,0]] v^{-1}`
/// for even `n`, whose sum is invertible.
pub fn random_square_zero_pair_invertible<R: Rng + ?Sized>(rng: &mut R, n: usize, cond: f64) -> (Matrix, Matrix) {
    assert!(n.is_multiple_of(2) && n > 0);
    let h = n / 2;
    let upper_block = random_invertible(rng, h, cond);
    let lower_block = random_invertible(rng, h, cond);
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, n);
    a.view_mut((0, h), (h, h)).copy_from(upper_block.inner());
    b.view_mut((h, 0), (h, h)).copy_from(lower_block.inner());
    let v = random_invertible(rng, n, cond);
    let v_inv = v.inverse(&TolerancePolicy::default()).expect("well conditioned");
    let conj = |m: DMatrix<Scalar>| &(&v * &Matrix::new(m).expect("square")) * &v_inv;
    (conj(a), conj(b))
}

/// Cayley transform `(I - K)^{-1} (I + K)`.
pub fn cayley(k: &Matrix) -> Matrix {
    let n = k.dim();
    let id = Matrix::identity(n);
    let left = (&id - k)
        .inverse(&TolerancePolicy::default())
        .expect("I - K invertible for small K");
    &left * &(&id + k)
}

/// Random complex orthogonal matrix (unitary for the transpose star).
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize, size: f64) -> Matrix {
    let g = random_complex(rng, n).scale_real(size / (n as f64).sqrt());
    let skew = (&g - &g.transpose()).scale_real(0.5);
    cayley(&skew)
}

/// Random symplectic matrix for the form `g` (unitary for the adjoint star
/// `x -> g^{-1} x^T g`).
pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R, g: &Matrix, size: f64) -> Matrix {
    let n = g.dim();
    let h = random_complex(rng, n).scale_real(size / (n as f64).sqrt());
    let sym = (&h + &h.transpose()).scale_real(0.5);
    let g_inv = g.inverse(&TolerancePolicy::default()).expect("form is invertible");
    cayley(&(&g_inv * &sym))
}

/// Real rotation `[[c, s], [-s, c]]`.
pub fn rotation(theta: f64) -> Matrix {
    let (s, c) = theta.sin_cos();
    Matrix::from_real(2, &[c, s, -s, c]).expect("2x2")
}

/// An orthogonal matrix of order dividing four: a block sum of quarter
/// turns and signs.
pub fn orthogonal_order_four<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let mut blocks = Vec::new();
    let mut left = n;
    while left > 0 {
        if left >= 2 && rng.gen_bool(0.6) {
            blocks.push(rotation(std::f64::consts::FRAC_PI_2));
            left -= 2;
        } else {
            blocks.push(Matrix::diag_real(&[if rng.gen_bool(0.5) { 1.0 } else { -1.0 }]));
            left -= 1;
        }
    }
    block_diag(&blocks)
}

/// A symplectic matrix of order dividing four for the standard form on
/// `C^{2m}`: `diag(d, d^{-1})` with `d_k` in `{±1, ±i}`, or the form itself.
pub fn symplectic_order_four<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let m = n / 2;
    if rng.gen_bool(0.3) {
        return standard_symplectic_form(n);
    }
    let choices = [ONE, -ONE, crate::scalar::I, -crate::scalar::I];
    let d: Vec<Scalar> = (0..m).map(|_| choices[rng.gen_range(0..4)]).collect();
    let mut diag = d.clone();
    diag.extend(d.iter().map(|z| ONE / z));
    Matrix::diag(&diag)
}

/// `diag(λ_1, .., λ_m, 1/λ_1, .., 1/λ_m)`, symplectic for the standard form.
pub fn diagonal_symplectic(lambdas: &[Scalar]) -> Matrix {
    let mut diag = lambdas.to_vec();
    diag.extend(lambdas.iter().map(|&l| ONE / l));
    Matrix::diag(&diag)
}
