//! Seeded generators for test data. Output depends only on the seed and
//! the parameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{Field, Scalar};
use crate::matrix::Matrix;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small integers over the rationals, uniform residues over `F_p`.
pub fn scalar(field: Field, rng: &mut TestRng) -> Scalar {
    match field {
        Field::Rationals => field.from_i64(rng.random_range(-3..=3)),
        Field::Prime(p) => field.from_i64(rng.random_range(0..p) as i64),
    }
}

fn nonzero_scalar(field: Field, rng: &mut TestRng) -> Scalar {
    match field {
        Field::Rationals => {
            const CHOICES: [(i64, i64); 8] = [(1, 1), (-1, 1), (2, 1), (-2, 1), (3, 1), (1, 2), (-1, 3), (2, 3)];
            let (n, d) = CHOICES[rng.random_range(0..CHOICES.len())];
            field.from_fraction(n, d).expect("nonzero denominator")
        }
        Field::Prime(p) => field.from_i64(rng.random_range(1..p) as i64),
    }
}

pub fn matrix(field: Field, rows: usize, cols: usize, rng: &mut TestRng) -> Matrix {
    let mut m = Matrix::zeros(field, rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, scalar(field, rng));
        }
    }
    m
}

/// A random invertible matrix together with its inverse, built as a
/// permuted product of unit triangular factors and a diagonal.
pub fn invertible(field: Field, n: usize, rng: &mut TestRng) -> (Matrix, Matrix) {
    let mut lower = Matrix::identity(field, n);
    let mut upper = Matrix::identity(field, n);
    let mut diag = Matrix::zeros(field, n, n);
    for i in 0..n {
        diag.set(i, i, nonzero_scalar(field, rng));
        for j in 0..i {
            lower.set(i, j, scalar(field, rng));
            upper.set(j, i, scalar(field, rng));
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let mut p = Matrix::zeros(field, n, n);
    for (i, &j) in perm.iter().enumerate() {
        p.set(i, j, field.one());
    }
    let g = &(&(&p * &lower) * &diag) * &upper;
    let inv = g.inverse().expect("product of invertible factors");
    (g, inv)
}

/// A random injective `rows x cols` matrix (`cols <= rows`).
pub fn injective(field: Field, rows: usize, cols: usize, rng: &mut TestRng) -> Matrix {
    assert!(cols <= rows);
    invertible(field, rows, rng).0.submatrix(0, rows, 0, cols)
}

/// A random surjective `rows x cols` matrix (`rows <= cols`).
pub fn surjective(field: Field, rows: usize, cols: usize, rng: &mut TestRng) -> Matrix {
    assert!(rows <= cols);
    invertible(field, cols, rng).0.submatrix(0, rows, 0, cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invertible_pairs() {
        for field in [Field::Rationals, Field::Prime(3)] {
            let mut r = rng(5);
            for n in 0..6 {
                let (g, h) = invertible(field, n, &mut r);
                assert_eq!(&g * &h, Matrix::identity(field, n));
            }
            assert!(injective(field, 4, 2, &mut r).is_injective());
            assert!(surjective(field, 2, 4, &mut r).is_surjective());
        }
    }

    #[test]
    fn deterministic() {
        let a = matrix(Field::Prime(101), 3, 3, &mut rng(9));
        let b = matrix(Field::Prime(101), 3, 3, &mut rng(9));
        assert_eq!(a, b);
    }
}
