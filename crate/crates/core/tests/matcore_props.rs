use birefl::fixtures::{
    block_diag, planted_jordan, random_complex, random_eigenvalue, random_invertible, scaled_jordan_block,
};
use birefl::poly::poly_divmod;
use birefl::schur::eval_cluster_product;
use birefl::{eigen_clusters, minimal_polynomial, Matrix, Poly, Scalar, TolerancePolicy};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Characteristic polynomial `det(t I - m)` by the Faddeev–LeVerrier
/// recurrence, independent of any eigenvalue computation.
fn charpoly(m: &Matrix) -> Poly {
    let n = m.dim();
    let mut coeffs = vec![Scalar::new(0.0, 0.0); n + 1];
    coeffs[n] = Scalar::new(1.0, 0.0);
    let mut mk = Matrix::zeros(n);
    for k in 1..=n {
        let prev = coeffs[n - k + 1];
        mk = &(m * &mk) + &Matrix::identity(n).scale(prev);
        let am = m * &mk;
        let trace: Scalar = (0..n).map(|i| am.get(i, i)).sum();
        coeffs[n - k] = -trace / k as f64;
    }
    Poly::new(coeffs)
}

/// Jordan structure drawn from a pool of two or three eigenvalues, so that
/// several blocks may share an eigenvalue.
fn shared_eigenvalue_matrix(rng: &mut ChaCha8Rng, n: usize, cond: f64) -> Matrix {
    let pool: Vec<Scalar> = (0..rng.gen_range(2..=3))
        .map(|_| random_eigenvalue(rng, 0.5, 2.0))
        .collect();
    let mut blocks = Vec::new();
    let mut left = n;
    while left > 0 {
        let k = rng.gen_range(1..=left.min(4));
        blocks.push(scaled_jordan_block(pool[rng.gen_range(0..pool.len())], k));
        left -= k;
    }
    let v = random_invertible(rng, n, cond);
    &(&v * &block_diag(&blocks)) * &v.inverse(&TolerancePolicy::default()).unwrap()
}

fn planted(seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=8);
    if seed.is_multiple_of(2) {
        planted_jordan(&mut rng, n, 4, (0.5, 2.0), 10.0).0
    } else {
        shared_eigenvalue_matrix(&mut rng, n, 10.0)
    }
}

#[test]
fn charpoly_oracle_matches_a_triangular_matrix() {
    let m = Matrix::from_real(3, &[2.0, 1.0, 5.0, 0.0, -1.0, 3.0, 0.0, 0.0, 4.0]).unwrap();
    let expected = Poly::from_roots(&[Scalar::new(2.0, 0.0), Scalar::new(-1.0, 0.0), Scalar::new(4.0, 0.0)]);
    assert!((&charpoly(&m) - &expected).norm() < 1e-12);
}

#[test]
fn minimal_polynomial_annihilates() {
    let pol = TolerancePolicy::default();
    for seed in 0..100 {
        let m = planted(seed);
        let report = eigen_clusters(&m, &pol).unwrap();
        let deg = report.minimal_polynomial().degree().unwrap() as i32;
        let value = eval_cluster_product(&m, &report).norm();
        let bound = pol.tau_eq * m.norm().powi(deg) * m.dim() as f64;
        assert!(value <= bound, "seed {seed}: {value:e} > {bound:e}");
    }
}

#[test]
fn minimal_polynomial_divides_characteristic_polynomial() {
    let pol = TolerancePolicy::default();
    for seed in 0..100 {
        let m = planted(seed);
        let chi = charpoly(&m);
        let mu = minimal_polynomial(&m, &pol).unwrap();
        assert!(mu.degree().unwrap() <= m.dim());
        let (_, r) = poly_divmod(&chi, &mu).unwrap();
        assert!(
            r.norm() <= pol.tau_eq * chi.norm(),
            "seed {seed}: remainder {:e}",
            r.norm()
        );
    }
}

#[test]
fn structured_inputs_have_full_multiplicity() {
    let pol = TolerancePolicy::default();
    for n in 1..=6 {
        for m in [Matrix::zeros(n), Matrix::identity(n), Matrix::nilpotent_jordan(n)] {
            assert_eq!(eigen_clusters(&m, &pol).unwrap().dim(), n);
        }
    }
}

#[test]
fn minimal_polynomial_sees_the_largest_block_per_eigenvalue() {
    let pol = TolerancePolicy::default();
    let (one, two) = (Scalar::new(1.0, 0.0), Scalar::new(2.0, 0.0));
    let j = block_diag(&[
        scaled_jordan_block(one, 2),
        scaled_jordan_block(one, 1),
        scaled_jordan_block(two, 3),
    ]);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let v = random_invertible(&mut rng, 6, 10.0);
    let m = &(&v * &j) * &v.inverse(&pol).unwrap();
    let mu = minimal_polynomial(&m, &pol).unwrap();
    let expected = Poly::from_roots(&[one, one, two, two, two]);
    assert!((&mu - &expected).norm() <= 1e-6 * expected.norm());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn multiplicities_sum_to_n(seed in any::<u64>(), n in 1usize..=10, planted_structure in any::<bool>()) {
        let pol = TolerancePolicy::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = if planted_structure {
            shared_eigenvalue_matrix(&mut rng, n, 100.0)
        } else {
            random_complex(&mut rng, n)
        };
        let report = eigen_clusters(&m, &pol).unwrap();
        prop_assert_eq!(report.dim(), n);
        prop_assert!(report.clusters.iter().all(|c| (1..=c.multiplicity).contains(&c.block)));
    }
}
