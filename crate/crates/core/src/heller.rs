//! Grothendieck classes of vector spaces and explicit stable extension
//! equivalences `A ↣ J ⊕ S ↠ B`, `A ↣ K ⊕ S ↠ B`.

use crate::chain::GradedObject;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::random;

/// A class in `K_0` of finite-dimensional vector spaces, i.e. a dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct K0Class(pub i64);

pub fn k0_class(g: &GradedObject, degree: usize) -> K0Class {
    K0Class(g.dim(degree) as i64)
}

/// Two short exact sequences with common ends `A` and `B`.
///
/// Matrices act on columns: `a_j` is `(J + S) x A`, `b_j` is `B x (J + S)`,
/// with rows of `J ⊕ S` ordered `J` first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionWitness {
    pub dim_j: usize,
    pub dim_k: usize,
    pub dim_a: usize,
    pub dim_b: usize,
    pub dim_s: usize,
    pub a_j: Matrix,
    pub a_k: Matrix,
    pub b_j: Matrix,
    pub b_k: Matrix,
}

/// Canonical witness for `dim J = dim K`: `S = 0`, `A = J`, `B = 0`, identity maps.
pub fn heller_witness(field: Field, j: usize, k: usize) -> Result<ExtensionWitness> {
    if j != k {
        return Err(Error::NotEqualClasses(j, k));
    }
    Ok(ExtensionWitness {
        dim_j: j,
        dim_k: k,
        dim_a: j,
        dim_b: 0,
        dim_s: 0,
        a_j: Matrix::identity(field, j),
        a_k: Matrix::identity(field, j),
        b_j: Matrix::zeros(field, 0, j),
        b_k: Matrix::zeros(field, 0, j),
    })
}

/// Rows spanning the left null space of `a`, so `cokernel(a) * a = 0`.
fn cokernel(a: &Matrix) -> Matrix {
    a.transpose().kernel_basis().transpose()
}

pub fn random_witness(field: Field, j: usize, k: usize, s: usize, seed: u64) -> Result<ExtensionWitness> {
    use rand::Rng;
    if j != k {
        return Err(Error::NotEqualClasses(j, k));
    }
    let mut rng = random::rng(seed);
    let n = j + s;
    let dim_a = rng.random_range(0..=n);
    let a_j = random::injective(field, n, dim_a, &mut rng);
    let b_j = cokernel(&a_j);
    let a_k = random::injective(field, n, dim_a, &mut rng);
    let (iso, _) = random::invertible(field, n - dim_a, &mut rng);
    let b_k = &iso * &cokernel(&a_k);
    Ok(ExtensionWitness {
        dim_j: j,
        dim_k: k,
        dim_a,
        dim_b: n - dim_a,
        dim_s: s,
        a_j,
        a_k,
        b_j,
        b_k,
    })
}

fn row_exact(a: &Matrix, b: &Matrix, middle: usize, dim_a: usize, dim_b: usize) -> bool {
    a.shape() == (middle, dim_a)
        && b.shape() == (dim_b, middle)
        && a.is_injective()
        && b.is_surjective()
        && (b * a).is_zero()
        && dim_a + dim_b == middle
}

pub fn verify_witness(w: &ExtensionWitness, j: usize, k: usize) -> bool {
    w.dim_j == j
        && w.dim_k == k
        && row_exact(&w.a_j, &w.b_j, j + w.dim_s, w.dim_a, w.dim_b)
        && row_exact(&w.a_k, &w.b_k, k + w.dim_s, w.dim_a, w.dim_b)
}

/// Permutes consecutive row blocks of sizes `sizes` into the order `order`.
fn regroup_rows(m: &Matrix, sizes: &[usize], order: &[usize]) -> Matrix {
    let starts: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let rows: Vec<usize> = order.iter().flat_map(|&b| starts[b]..starts[b] + sizes[b]).collect();
    m.select(&rows, &(0..m.cols()).collect::<Vec<_>>())
}

impl ExtensionWitness {
    /// Blockwise sum, a witness for `(J ⊕ J', K ⊕ K')` with stabilizer `S ⊕ S'`.
    pub fn direct_sum(&self, o: &ExtensionWitness) -> ExtensionWitness {
        let regroup = |x: &Matrix, y: &Matrix, first: usize, first_o: usize| {
            let sum = x.direct_sum(y);
            regroup_rows(&sum, &[first, self.dim_s, first_o, o.dim_s], &[0, 2, 1, 3])
        };
        let cols = |x: &Matrix, y: &Matrix, first: usize, first_o: usize| {
            regroup_rows(
                &x.direct_sum(y).transpose(),
                &[first, self.dim_s, first_o, o.dim_s],
                &[0, 2, 1, 3],
            )
            .transpose()
        };
        ExtensionWitness {
            dim_j: self.dim_j + o.dim_j,
            dim_k: self.dim_k + o.dim_k,
            dim_a: self.dim_a + o.dim_a,
            dim_b: self.dim_b + o.dim_b,
            dim_s: self.dim_s + o.dim_s,
            a_j: regroup(&self.a_j, &o.a_j, self.dim_j, o.dim_j),
            a_k: regroup(&self.a_k, &o.a_k, self.dim_k, o.dim_k),
            b_j: cols(&self.b_j, &o.b_j, self.dim_j, o.dim_j),
            b_k: cols(&self.b_k, &o.b_k, self.dim_k, o.dim_k),
        }
    }

    /// Given witnesses for `(J, K)` and `(K, L)`, the summed sequences
    /// `A ⊕ A' ↣ J ⊕ S ⊕ K ⊕ S'` and `A ⊕ A' ↣ K ⊕ S ⊕ L ⊕ S'`, regrouped
    /// as a witness for `(J ⊕ K, L ⊕ K)` with stabilizer `S ⊕ S'`.
    pub fn compose(&self, next: &ExtensionWitness) -> Result<ExtensionWitness> {
        if self.dim_k != next.dim_j || self.a_j.field() != next.a_j.field() {
            return Err(Error::InvalidWitness("witnesses do not chain".into()));
        }
        let sum = self.direct_sum(next);
        // The second row is K ⊕ L ⊕ S ⊕ S'; move L in front of K.
        let sizes = [self.dim_k, next.dim_k, self.dim_s + next.dim_s];
        Ok(ExtensionWitness {
            dim_j: self.dim_j + next.dim_j,
            dim_k: self.dim_k + next.dim_k,
            a_k: regroup_rows(&sum.a_k, &sizes, &[1, 0, 2]),
            b_k: regroup_rows(&sum.b_k.transpose(), &sizes, &[1, 0, 2]).transpose(),
            ..sum
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Q: Field = Field::Rationals;

    #[test]
    fn classes() {
        let g = GradedObject::new(Q, vec![0, 3]);
        assert_eq!(k0_class(&g, 0), K0Class(0));
        assert_eq!(k0_class(&g, 1), K0Class(3));
        let h = GradedObject::new(Q, vec![2, 3]);
        assert_eq!(
            k0_class(&GradedObject::new(Q, vec![2, 6]), 1).0,
            k0_class(&g, 1).0 + k0_class(&h, 1).0
        );
    }

    #[test]
    fn canonical_witness() {
        let w = heller_witness(Q, 2, 2).unwrap();
        assert_eq!((w.dim_a, w.dim_b, w.dim_s), (2, 0, 0));
        assert!(verify_witness(&w, 2, 2));
        assert!(!verify_witness(&w, 2, 3));
        assert_eq!(heller_witness(Q, 1, 2), Err(Error::NotEqualClasses(1, 2)));
    }

    #[test]
    fn zeroed_map_fails() {
        let mut w = random_witness(Q, 2, 2, 2, 4).unwrap();
        while w.dim_b == 0 {
            w = random_witness(Q, 2, 2, 2, w.dim_a as u64 + 100).unwrap();
        }
        w.b_j = Matrix::zeros(Q, w.dim_b, 4);
        assert!(!verify_witness(&w, 2, 2));
    }

    #[test]
    fn random_without_stabilizer() {
        let w = random_witness(Q, 3, 3, 0, 1).unwrap();
        assert_eq!(w.dim_a + w.dim_b, 3);
        assert_eq!(w, random_witness(Q, 3, 3, 0, 1).unwrap());
        assert!(random_witness(Q, 3, 2, 0, 1).is_err());
    }

    fn fields() -> impl Strategy<Value = Field> {
        prop_oneof![Just(Q), Just(Field::Prime(3)), Just(Field::Prime(7))]
    }

    proptest! {
        #[test]
        fn heller_iff_equal_dims(j in 0usize..5, k in 0usize..5) {
            prop_assert_eq!(heller_witness(Q, j, k).is_ok(), j == k);
        }

        #[test]
        fn random_witnesses_verify(field in fields(), j in 0usize..4, s in 0usize..4, seed in any::<u64>()) {
            let w = random_witness(field, j, j, s, seed).unwrap();
            prop_assert!(verify_witness(&w, j, j));
        }

        #[test]
        fn transitivity(field in fields(), j in 0usize..4, s in 0usize..3, t in 0usize..3, seed in any::<u64>()) {
            let w1 = random_witness(field, j, j, s, seed).unwrap();
            let w2 = random_witness(field, j, j, t, seed ^ 1).unwrap();
            let w = w1.compose(&w2).unwrap();
            prop_assert!(verify_witness(&w, 2 * j, 2 * j));
            prop_assert_eq!(w.dim_s, s + t);
            let sum = w1.direct_sum(&w2);
            prop_assert!(verify_witness(&sum, 2 * j, 2 * j));
        }
    }
}
