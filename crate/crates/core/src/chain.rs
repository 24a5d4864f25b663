//! Bounded chain complexes in degrees `0..=m`, acyclicity certificates,
//! shifts and cones.

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::random;

/// Per-degree dimensions of a graded vector space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedObject {
    pub field: Field,
    pub dims: Vec<usize>,
}

impl GradedObject {
    pub fn new(field: Field, dims: Vec<usize>) -> GradedObject {
        let dims = if dims.is_empty() { vec![0] } else { dims };
        GradedObject { field, dims }
    }

    /// Dimension in degree `n`, zero outside the stored range.
    pub fn dim(&self, n: usize) -> usize {
        self.dims.get(n).copied().unwrap_or(0)
    }

    /// Highest degree with nonzero dimension, 0 if everything vanishes.
    pub fn support_length(&self) -> usize {
        self.dims.iter().rposition(|&d| d > 0).unwrap_or(0)
    }
}

/// A chain complex; `diffs[n - 1]` is `d_n: P_n -> P_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChainComplex {
    graded: GradedObject,
    diffs: Vec<Matrix>,
}

/// Epi-mono factorizations `d_n = i_{n-1} q_n` through `J_{n-1} = im d_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    /// `dim J_n` for `n = 0..=m`.
    pub jdims: Vec<usize>,
    incl: Vec<Matrix>,
    proj: Vec<Matrix>,
}

impl Factorization {
    /// `i_n: J_n -> P_n`.
    pub fn i(&self, n: usize) -> &Matrix {
        &self.incl[n]
    }

    /// `q_n: P_n -> J_{n-1}`; `q_0` is the zero map onto `J_{-1} = 0`.
    pub fn q(&self, n: usize) -> &Matrix {
        &self.proj[n]
    }

    pub fn jdim(&self, n: usize) -> usize {
        self.jdims.get(n).copied().unwrap_or(0)
    }

    /// Number of stored degrees minus one.
    pub fn len(&self) -> usize {
        self.jdims.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Replaces `J_n` by the same subspace with basis changed by `g`:
    /// `i_n` becomes `i_n g` and `q_{n+1}` becomes `g^{-1} q_{n+1}`.
    pub fn rebase(&mut self, n: usize, g: &Matrix, g_inv: &Matrix) {
        self.incl[n] = &self.incl[n] * g;
        if n + 1 < self.proj.len() {
            self.proj[n + 1] = g_inv * &self.proj[n + 1];
        }
    }

    /// Checks the defining identities against `c`.
    pub fn verify(&self, c: &ChainComplex) -> bool {
        let m = c.len();
        if self.jdims.len() != m + 1 || self.jdim(m) != 0 {
            return false;
        }
        (0..=m).all(|n| {
            let i = self.i(n);
            let q = self.q(n);
            let exact = if n == 0 {
                i.is_surjective()
            } else {
                (q * i).is_zero() && q.rank() + i.cols() == c.dim(n)
            };
            i.is_injective() && q.is_surjective() && exact && (n == 0 || &self.incl[n - 1] * q == c.d(n))
        })
    }
}

impl ChainComplex {
    pub fn new(field: Field, dims: Vec<usize>, diffs: Vec<Matrix>) -> Result<ChainComplex> {
        let graded = GradedObject::new(field, dims);
        let m = graded.dims.len() - 1;
        if diffs.len() != m {
            return Err(Error::Shape(format!(
                "{} differentials for {} degrees",
                diffs.len(),
                m + 1
            )));
        }
        for (k, d) in diffs.iter().enumerate() {
            let n = k + 1;
            if d.field() != field {
                return Err(Error::FieldMismatch(field, d.field()));
            }
            if d.shape() != (graded.dims[n - 1], graded.dims[n]) {
                return Err(Error::Shape(format!(
                    "d_{n} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    graded.dims[n - 1],
                    graded.dims[n]
                )));
            }
        }
        Ok(ChainComplex { graded, diffs })
    }

    pub fn zero(field: Field) -> ChainComplex {
        ChainComplex {
            graded: GradedObject::new(field, vec![0]),
            diffs: Vec::new(),
        }
    }

    pub fn field(&self) -> Field {
        self.graded.field
    }

    pub fn graded(&self) -> &GradedObject {
        &self.graded
    }

    pub fn dims(&self) -> &[usize] {
        &self.graded.dims
    }

    pub fn dim(&self, n: usize) -> usize {
        self.graded.dim(n)
    }

    /// Top stored degree `m`.
    pub fn len(&self) -> usize {
        self.graded.dims.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.graded.dims.iter().all(|&d| d == 0)
    }

    pub fn diffs(&self) -> &[Matrix] {
        &self.diffs
    }

    /// `d_n`, or the zero map of the right shape outside `1..=m`.
    pub fn d(&self, n: usize) -> Matrix {
        if n >= 1 && n <= self.len() {
            self.diffs[n - 1].clone()
        } else {
            let rows = if n == 0 { 0 } else { self.dim(n - 1) };
            Matrix::zeros(self.field(), rows, self.dim(n))
        }
    }

    pub fn is_complex(&self) -> bool {
        self.first_nonzero_square().is_none()
    }

    fn first_nonzero_square(&self) -> Option<usize> {
        (2..=self.len()).find(|&n| !(&self.diffs[n - 2] * &self.diffs[n - 1]).is_zero())
    }

    pub fn factorize(&self) -> Result<Factorization> {
        if let Some(degree) = self.first_nonzero_square() {
            return Err(Error::NotAComplex { degree });
        }
        let m = self.len();
        let mut ranks = vec![0; m + 2];
        for n in 1..=m {
            ranks[n] = self.diffs[n - 1].rank();
        }
        for n in 0..=m {
            if self.dim(n) != ranks[n] + ranks[n + 1] {
                return Err(Error::NotAcyclic { degree: n });
            }
        }
        let field = self.field();
        let incl: Vec<Matrix> = (0..=m).map(|n| self.d(n + 1).image_basis()).collect();
        let mut proj = vec![Matrix::zeros(field, 0, self.dim(0))];
        for n in 1..=m {
            proj.push(incl[n - 1].solve_right(&self.diffs[n - 1])?);
        }
        Ok(Factorization {
            jdims: incl.iter().map(Matrix::cols).collect(),
            incl,
            proj,
        })
    }

    pub fn is_acyclic(&self) -> bool {
        self.factorize().is_ok()
    }

    pub fn shift(&self, i: usize) -> ChainComplex {
        self.shift_signed(i, false)
    }

    pub fn suspend(&self, i: usize) -> ChainComplex {
        self.shift_signed(i, i % 2 == 1)
    }

    fn shift_signed(&self, i: usize, negate: bool) -> ChainComplex {
        let field = self.field();
        let mut dims = vec![0; i];
        dims.extend_from_slice(self.dims());
        let mut diffs: Vec<Matrix> = (1..=i).map(|n| Matrix::zeros(field, 0, dims[n])).collect();
        diffs.extend(self.diffs.iter().map(|d| if negate { -d } else { d.clone() }));
        ChainComplex::new(field, dims, diffs).expect("shifted shapes")
    }

    /// Mapping cone of the identity: degree `n` is `P_{n-1} (+) P_n` with
    /// differential `[[-d, 0], [id, d]]`.
    pub fn cone(&self) -> ChainComplex {
        let field = self.field();
        let m = self.len();
        let dims: Vec<usize> = (0..=m + 1)
            .map(|n| if n == 0 { 0 } else { self.dim(n - 1) } + self.dim(n))
            .collect();
        let diffs = (1..=m + 1)
            .map(|n| {
                let mut out = Matrix::zeros(field, dims[n - 1], dims[n]);
                let lo = if n >= 2 { self.dim(n - 2) } else { 0 };
                out.paste(0, 0, &-&self.d(n - 1));
                out.paste(lo, 0, &Matrix::identity(field, self.dim(n - 1)));
                out.paste(lo, self.dim(n - 1), &self.d(n));
                out
            })
            .collect();
        ChainComplex::new(field, dims, diffs).expect("cone shapes")
    }

    pub fn direct_sum(&self, o: &ChainComplex) -> Result<ChainComplex> {
        if self.field() != o.field() {
            return Err(Error::FieldMismatch(self.field(), o.field()));
        }
        let m = self.len().max(o.len());
        let dims = (0..=m).map(|n| self.dim(n) + o.dim(n)).collect();
        let diffs = (1..=m).map(|n| self.d(n).direct_sum(&o.d(n))).collect();
        ChainComplex::new(self.field(), dims, diffs)
    }

    /// Same complex with exactly `m + 1` stored degrees. Dropped degrees must vanish.
    pub fn with_len(&self, m: usize) -> ChainComplex {
        assert!(
            self.dims().iter().skip(m + 1).all(|&d| d == 0),
            "cannot drop nonzero degrees"
        );
        let field = self.field();
        let dims: Vec<usize> = (0..=m).map(|n| self.dim(n)).collect();
        let diffs = (1..=m).map(|n| self.d(n)).collect();
        ChainComplex::new(field, dims, diffs).expect("resized shapes")
    }

    /// Drops trailing zero degrees (keeping degree 0).
    pub fn trimmed(&self) -> ChainComplex {
        self.with_len(self.graded.support_length())
    }

    /// Applies invertible `g_n` in each degree: `d_n` becomes `g_{n-1} d_n g_n^{-1}`.
    /// `bases[n]` holds `(g_n, g_n^{-1})`.
    pub fn change_basis(&self, bases: &[(Matrix, Matrix)]) -> ChainComplex {
        let diffs = (1..=self.len())
            .map(|n| &(&bases[n - 1].0 * &self.diffs[n - 1]) * &bases[n].1)
            .collect();
        ChainComplex::new(self.field(), self.dims().to_vec(), diffs).expect("basis change shapes")
    }

    pub fn scale_differentials(&self, s: &Scalar) -> ChainComplex {
        ChainComplex {
            graded: self.graded.clone(),
            diffs: self.diffs.iter().map(|d| d.scale(s)).collect(),
        }
    }

    /// A random acyclic complex with `dim J_n = jdims[n]` and
    /// `dims[n] = J_n + J_{n-1}`, where `m = jdims.len()`.
    pub fn random_acyclic(field: Field, jdims: &[usize], seed: u64) -> ChainComplex {
        let mut rng = random::rng(seed);
        let m = jdims.len();
        let j = |n: isize| -> usize {
            if n < 0 || n as usize >= m {
                0
            } else {
                jdims[n as usize]
            }
        };
        let dims: Vec<usize> = (0..=m as isize).map(|n| j(n) + j(n - 1)).collect();
        let bases: Vec<(Matrix, Matrix)> = dims.iter().map(|&d| random::invertible(field, d, &mut rng)).collect();
        // Standard form: the last J_{n-1} coordinates of P_n map onto the
        // first J_{n-1} coordinates of P_{n-1}.
        let diffs = (1..=m)
            .map(|n| {
                let jn = j(n as isize);
                let jp = j(n as isize - 1);
                let mut e = Matrix::zeros(field, dims[n - 1], dims[n]);
                e.paste(0, jn, &Matrix::identity(field, jp));
                &(&bases[n - 1].0 * &e) * &bases[n].1
            })
            .collect();
        ChainComplex::new(field, dims, diffs).expect("generated shapes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Q: Field = Field::Rationals;

    fn cx(dims: &[usize], diffs: &[&[i64]]) -> ChainComplex {
        let ms = diffs
            .iter()
            .enumerate()
            .map(|(k, e)| Matrix::from_i64(Q, dims[k], dims[k + 1], e))
            .collect();
        ChainComplex::new(Q, dims.to_vec(), ms).unwrap()
    }

    #[test]
    fn complex_checks() {
        assert!(cx(&[1, 1], &[&[2]]).is_complex());
        assert!(cx(&[1, 2, 1], &[&[1, 0], &[0, 1]]).is_complex());
        assert!(!cx(&[1, 1, 1], &[&[1], &[1]]).is_complex());
        assert_eq!(
            cx(&[1, 1, 1], &[&[1], &[1]]).factorize(),
            Err(Error::NotAComplex { degree: 2 })
        );
    }

    #[test]
    fn factorize_examples() {
        let f = cx(&[1, 1], &[&[5]]).factorize().unwrap();
        assert_eq!(f.jdims, vec![1, 0]);
        let c = cx(&[1, 2, 1], &[&[0, 1], &[1, 0]]);
        let f = c.factorize().unwrap();
        assert_eq!(f.jdims, vec![1, 1, 0]);
        assert!(f.verify(&c));
        assert_eq!(cx(&[1, 1], &[&[0]]).factorize(), Err(Error::NotAcyclic { degree: 0 }));
        assert_eq!(
            cx(&[1, 2], &[&[1, 0]]).factorize(),
            Err(Error::NotAcyclic { degree: 1 })
        );
        assert!(ChainComplex::zero(Q).factorize().is_ok());
    }

    #[test]
    fn shift_and_suspend() {
        let c = cx(&[1, 1], &[&[3]]);
        assert_eq!(c.shift(0), c);
        assert_eq!(c.suspend(2), c.shift(2));
        let s = c.suspend(1);
        assert_eq!(s.dims(), &[0, 1, 1]);
        assert_eq!(s.d(2), Matrix::from_i64(Q, 1, 1, &[-3]));
        assert_eq!(c.shift(1).shift(2), c.shift(3));
    }

    #[test]
    fn cone_examples() {
        assert!(ChainComplex::zero(Q).cone().is_empty());
        let k = cx(&[1, 1], &[&[1]]).cone();
        assert_eq!(k.dims(), &[1, 2, 1]);
        assert!(k.is_acyclic());
        assert!(cx(&[1, 1], &[&[0]]).cone().is_acyclic());
    }

    #[test]
    fn random_acyclic_shapes() {
        let c = ChainComplex::random_acyclic(Q, &[1], 3);
        assert_eq!(c.dims(), &[1, 1]);
        assert!(!c.d(1).det().unwrap().is_zero());
        assert_eq!(ChainComplex::random_acyclic(Q, &[1, 1], 3).dims(), &[1, 2, 1]);
        assert_eq!(
            ChainComplex::random_acyclic(Q, &[2, 1], 7),
            ChainComplex::random_acyclic(Q, &[2, 1], 7)
        );
    }

    fn fields() -> impl Strategy<Value = Field> {
        prop_oneof![
            Just(Q),
            Just(Field::Prime(3)),
            Just(Field::Prime(7)),
            Just(Field::Prime(101))
        ]
    }

    /// A complex that is usually not exact: an acyclic one with a single
    /// differential zeroed, which keeps d∘d = 0.
    fn random_complex(field: Field, seed: u64) -> ChainComplex {
        let base = ChainComplex::random_acyclic(field, &[2, 1, 2, 1], seed);
        let k = (seed % 5) as usize;
        let diffs = (1..=base.len())
            .map(|n| {
                if n == k {
                    Matrix::zeros(field, base.dim(n - 1), base.dim(n))
                } else {
                    base.d(n)
                }
            })
            .collect();
        ChainComplex::new(field, base.dims().to_vec(), diffs).unwrap()
    }

    proptest! {
        #[test]
        fn random_acyclic_is_certified(field in fields(), jd in proptest::collection::vec(0usize..=3, 0..6), seed in any::<u64>()) {
            let c = ChainComplex::random_acyclic(field, &jd, seed);
            prop_assert!(c.is_complex());
            let f = c.factorize().unwrap();
            prop_assert!(f.verify(&c));
            prop_assert_eq!(&f, &c.factorize().unwrap());
            for n in 0..=c.len() {
                let euler: i64 = (0..=n).map(|i| if (n - i) % 2 == 0 { c.dim(i) as i64 } else { -(c.dim(i) as i64) }).sum();
                prop_assert_eq!(f.jdim(n) as i64, euler);
                if n < jd.len() {
                    prop_assert_eq!(f.jdim(n), jd[n]);
                }
            }
        }

        #[test]
        fn cone_always_acyclic(field in fields(), seed in any::<u64>()) {
            let c = random_complex(field, seed);
            prop_assert!(c.is_complex());
            prop_assert!(c.cone().is_acyclic());
        }

        #[test]
        fn suspension_preserves_acyclicity(field in fields(), seed in any::<u64>(), i in 0usize..4) {
            let c = random_complex(field, seed);
            prop_assert_eq!(c.suspend(i).is_acyclic(), c.is_acyclic());
            let a = ChainComplex::random_acyclic(field, &[1, 2], seed);
            prop_assert!(a.suspend(i).is_acyclic());
            prop_assert_eq!(a.shift(i).shift(2), a.shift(i + 2));
        }

        #[test]
        fn direct_sum_adds_jdims(field in fields(), seed in any::<u64>()) {
            let a = ChainComplex::random_acyclic(field, &[1, 2], seed);
            let b = ChainComplex::random_acyclic(field, &[2, 0, 1], seed ^ 1);
            let s = a.direct_sum(&b).unwrap();
            let f = s.factorize().unwrap();
            prop_assert_eq!(f.jdims, vec![3, 2, 1, 0]);
            prop_assert_eq!(a.direct_sum(&ChainComplex::zero(field)).unwrap(), a);
        }
    }
}
