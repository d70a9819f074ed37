use birefl::algebra::invert_in_algebra;
use birefl::fixtures::{complex_gaussian, random_complex, random_invertible, upper_triangular_equal_diagonal};
use birefl::{algebra_from_span, AlgebraElement, AlgebraRep, Matrix, TolerancePolicy};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A generated algebra from one of several families, conjugated by a random
/// invertible matrix so that no basis is aligned with matrix units.
fn random_algebra(seed: u64) -> AlgebraRep {
    let pol = TolerancePolicy::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=6);
    let gens: Vec<Matrix> = match seed % 4 {
        // F[x] for a single random x
        0 => vec![random_complex(&mut rng, n)],
        // block upper triangular with a random cut
        1 => {
            let cut = rng.gen_range(1..n);
            (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| i < cut || j >= cut)
                .map(|(i, j)| Matrix::unit(n, i, j))
                .collect()
        }
        // constant-diagonal upper triangular
        2 => upper_triangular_equal_diagonal(n).basis().to_vec(),
        // two random strictly upper triangular matrices
        _ => (0..2)
            .map(|_| {
                let mut m = random_complex(&mut rng, n).into_inner();
                m.fill_lower_triangle(0.0.into(), 0);
                Matrix::new(m).unwrap()
            })
            .collect(),
    };
    let v = random_invertible(&mut rng, n, 10.0);
    let v_inv = v.inverse(&pol).unwrap();
    let gens: Vec<Matrix> = gens.iter().map(|g| &(&v * g) * &v_inv).collect();
    algebra_from_span(&gens, &pol).unwrap()
}

fn random_element(algebra: &AlgebraRep, rng: &mut ChaCha8Rng) -> Matrix {
    let coords: Vec<_> = (0..algebra.dim()).map(|_| complex_gaussian(rng)).collect();
    &algebra.from_coords(&coords).unwrap() + &algebra.unit().clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn generated_algebras_are_closed(seed in any::<u64>()) {
        let pol = TolerancePolicy::default();
        let algebra = random_algebra(seed);
        prop_assert!(algebra.closure_residual() <= pol.tau_eq, "{:e}", algebra.closure_residual());
        prop_assert!(algebra.contains(&Matrix::identity(algebra.ambient_dim()), &pol).unwrap());
    }

    #[test]
    fn inverses_stay_in_the_algebra(seed in any::<u64>()) {
        let pol = TolerancePolicy::default();
        let algebra = random_algebra(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let x = random_element(&algebra, &mut rng);
        prop_assume!(x.rcond() > 1e-6);
        let xe = AlgebraElement::from_matrix(&algebra, &x, &pol).unwrap();
        let inv = invert_in_algebra(&xe, &pol).unwrap().matrix();
        let n = algebra.ambient_dim();
        prop_assert!((&(&inv * &x) - &Matrix::identity(n)).norm() <= pol.tau_eq);
        prop_assert!(algebra.contains(&inv, &pol).unwrap());
    }

    #[test]
    fn powers_stay_in_the_algebra(seed in any::<u64>()) {
        let pol = TolerancePolicy::default();
        let algebra = random_algebra(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfeed);
        let x = random_element(&algebra, &mut rng);
        prop_assume!(x.rcond() > 1e-3);
        let x_inv = algebra.invert(&x, &pol).unwrap();
        for k in 1..=6u32 {
            prop_assert!(algebra.contains(&x.pow(k), &pol).unwrap(), "x^{}", k);
            prop_assert!(algebra.contains(&x_inv.pow(k), &pol).unwrap(), "x^-{}", k);
        }
    }
}

#[test]
fn a_matrix_outside_is_rejected() {
    let pol = TolerancePolicy::default();
    let tri = upper_triangular_equal_diagonal(3);
    assert!(!tri.contains(&Matrix::unit(3, 1, 0), &pol).unwrap());
    assert!(!tri.contains(&Matrix::unit(3, 0, 0), &pol).unwrap());
    assert!(tri
        .contains(&(&Matrix::unit(3, 0, 2) + &Matrix::identity(3)), &pol)
        .unwrap());
}
