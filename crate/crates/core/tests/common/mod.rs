//! Seeded input corpora shared by the integration tests.

#![allow(dead_code)]

use birefl::fixtures::{
    block_diag, diagonal_symplectic, orthogonal_order_four, random_eigenvalue, random_involution, random_orthogonal,
    random_square_zero_pair_invertible, random_symplectic, rotation, standard_symplectic_form, symplectic_order_four,
};
use birefl::staru::{make_star, StarKind, StarMap};
use birefl::{AlgebraRep, Matrix, TolerancePolicy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ index)
}

/// `x = a0 b0` for random involutions, `n <= 10`.
pub fn bireflectional_input(index: u64) -> Matrix {
    let mut rng = rng(2, index);
    let n = rng.gen_range(1..=10);
    &random_involution(&mut rng, n, 10.0) * &random_involution(&mut rng, n, 10.0)
}

/// `x = a0 + b0` for a random square-zero pair with invertible sum, `n <= 10`.
pub fn square_zero_input(index: u64) -> Matrix {
    let mut rng = rng(3, index);
    let n = 2 * rng.gen_range(1..=5);
    let (a, b) = random_square_zero_pair_invertible(&mut rng, n, 10.0);
    &a + &b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarFamily {
    Transpose,
    Symplectic,
}

impl StarFamily {
    pub fn star(self, n: usize) -> StarMap {
        let kind = match self {
            StarFamily::Transpose => StarKind::Transpose,
            StarFamily::Symplectic => StarKind::FormAdjoint(standard_symplectic_form(n)),
        };
        make_star(&AlgebraRep::full(n), kind, &TolerancePolicy::default()).expect("built-in star")
    }

    /// Random element of the unitary group.
    fn group_element(self, rng: &mut ChaCha8Rng, n: usize) -> Matrix {
        match self {
            StarFamily::Transpose => random_orthogonal(rng, n, 0.5),
            StarFamily::Symplectic => random_symplectic(rng, &standard_symplectic_form(n), 0.5),
        }
    }

    fn order_four(self, rng: &mut ChaCha8Rng, n: usize) -> Matrix {
        let g = self.group_element(rng, n);
        let u = match self {
            StarFamily::Transpose => orthogonal_order_four(rng, n),
            StarFamily::Symplectic => symplectic_order_four(rng, n),
        };
        &(&g * &u) * &g.inverse(&TolerancePolicy::default()).expect("unitary")
    }

    /// Rotations (transpose) or diagonal symplectic elements, conjugated by a
    /// random unitary.
    fn special(self, rng: &mut ChaCha8Rng, n: usize) -> Matrix {
        let core = match self {
            StarFamily::Transpose => {
                let blocks: Vec<Matrix> = (0..n / 2)
                    .map(|_| rotation(rng.gen_range(0.0..std::f64::consts::TAU)))
                    .collect();
                block_diag(&blocks)
            }
            StarFamily::Symplectic => {
                let lambdas: Vec<_> = (0..n / 2).map(|_| random_eigenvalue(rng, 0.5, 2.0)).collect();
                diagonal_symplectic(&lambdas)
            }
        };
        let g = self.group_element(rng, n);
        &(&g * &core) * &g.inverse(&TolerancePolicy::default()).expect("unitary")
    }
}

/// Seeded unitary inputs: four in five are products of two order-four
/// unitaries, the rest rotations or diagonal symplectic elements.
pub fn unitary_input(family: StarFamily, n: usize, index: u64) -> Matrix {
    let stream = match family {
        StarFamily::Transpose => 10,
        StarFamily::Symplectic => 20,
    } + n as u64;
    let mut rng = rng(stream, index);
    if index % 5 == 4 {
        family.special(&mut rng, n)
    } else {
        &family.order_four(&mut rng, n) * &family.order_four(&mut rng, n)
    }
}

/// The star/size combinations of the unitary corpus.
pub const UNITARY_CASES: [(StarFamily, usize); 5] = [
    (StarFamily::Transpose, 2),
    (StarFamily::Transpose, 4),
    (StarFamily::Transpose, 6),
    (StarFamily::Symplectic, 2),
    (StarFamily::Symplectic, 4),
];
