//! Binary acyclic complexes (one graded space, two differentials), binary
//! double complexes and formal signed sums of binary complexes.

use crate::chain::{ChainComplex, Factorization, GradedObject};
use crate::error::{Error, Result, Side};
use crate::field::Field;
use crate::matrix::Matrix;

/// A graded space with a top and a bottom differential of equal shapes.
/// Construction checks shapes only; [`BinaryComplex::validate`] checks acyclicity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryComplex {
    top: ChainComplex,
    bot: ChainComplex,
}

impl BinaryComplex {
    pub fn new(field: Field, dims: Vec<usize>, top: Vec<Matrix>, bot: Vec<Matrix>) -> Result<BinaryComplex> {
        Ok(BinaryComplex {
            top: ChainComplex::new(field, dims.clone(), top)?,
            bot: ChainComplex::new(field, dims, bot)?,
        })
    }

    pub fn from_pair(top: ChainComplex, bot: ChainComplex) -> Result<BinaryComplex> {
        if top.graded() != bot.graded() {
            return Err(Error::Shape("top and bottom have different graded objects".into()));
        }
        Ok(BinaryComplex { top, bot })
    }

    pub fn zero(field: Field) -> BinaryComplex {
        BinaryComplex {
            top: ChainComplex::zero(field),
            bot: ChainComplex::zero(field),
        }
    }

    pub fn field(&self) -> Field {
        self.top.field()
    }

    pub fn graded(&self) -> &GradedObject {
        self.top.graded()
    }

    pub fn dims(&self) -> &[usize] {
        self.top.dims()
    }

    pub fn dim(&self, n: usize) -> usize {
        self.top.dim(n)
    }

    /// Top stored degree.
    pub fn len(&self) -> usize {
        self.top.len()
    }

    pub fn is_empty(&self) -> bool {
        self.top.is_empty()
    }

    pub fn top(&self) -> &ChainComplex {
        &self.top
    }

    pub fn bot(&self) -> &ChainComplex {
        &self.bot
    }

    pub fn side(&self, side: Side) -> &ChainComplex {
        match side {
            Side::Top => &self.top,
            Side::Bottom => &self.bot,
        }
    }

    /// Factorizations of the top (`J_n`) and bottom (`K_n`) differentials.
    pub fn validate(&self) -> Result<(Factorization, Factorization)> {
        let fac = |side: Side| {
            self.side(side).factorize().map_err(|e| match e {
                Error::NotAComplex { degree } => Error::InvalidBinary {
                    side,
                    degree,
                    reason: "d∘d is nonzero".into(),
                },
                Error::NotAcyclic { degree } => Error::InvalidBinary {
                    side,
                    degree,
                    reason: "homology is nonzero".into(),
                },
                other => other,
            })
        };
        Ok((fac(Side::Top)?, fac(Side::Bottom)?))
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// `Δ(c)`: both differentials equal to that of `c`.
    pub fn diagonal(c: &ChainComplex) -> Result<BinaryComplex> {
        c.factorize()?;
        Ok(BinaryComplex {
            top: c.clone(),
            bot: c.clone(),
        })
    }

    /// `Δ_M` for an object of dimension `n`: identity `M -> M` in degrees 1, 0.
    pub fn diagonal_object(field: Field, n: usize) -> BinaryComplex {
        let id = ChainComplex::new(field, vec![n, n], vec![Matrix::identity(field, n)]).expect("identity shape");
        BinaryComplex {
            top: id.clone(),
            bot: id,
        }
    }

    pub fn flip(&self) -> BinaryComplex {
        BinaryComplex {
            top: self.bot.clone(),
            bot: self.top.clone(),
        }
    }

    fn map_both(&self, f: impl Fn(&ChainComplex) -> ChainComplex) -> BinaryComplex {
        BinaryComplex {
            top: f(&self.top),
            bot: f(&self.bot),
        }
    }

    pub fn shift_b(&self, i: usize) -> BinaryComplex {
        self.map_both(|c| c.shift(i))
    }

    pub fn suspend_b(&self, i: usize) -> BinaryComplex {
        self.map_both(|c| c.suspend(i))
    }

    pub fn cone_b(&self) -> BinaryComplex {
        self.map_both(ChainComplex::cone)
    }

    pub fn direct_sum_b(&self, o: &BinaryComplex) -> Result<BinaryComplex> {
        Ok(BinaryComplex {
            top: self.top.direct_sum(&o.top)?,
            bot: self.bot.direct_sum(&o.bot)?,
        })
    }

    /// Pads with zero degrees or drops trailing zero degrees to exactly `m + 1` degrees.
    pub fn with_len(&self, m: usize) -> BinaryComplex {
        self.map_both(|c| c.with_len(m))
    }

    pub fn trimmed(&self) -> BinaryComplex {
        self.with_len(self.graded().support_length())
    }

    /// Conjugates both differentials by `bases[n] = (g_n, g_n^{-1})`.
    pub fn change_basis(&self, bases: &[(Matrix, Matrix)]) -> BinaryComplex {
        self.map_both(|c| c.change_basis(bases))
    }

    /// `J (+) J` in degrees 1 and 0 with top the identity and bottom the
    /// swap of the two summands.
    pub fn swap_complex(field: Field, j: usize) -> BinaryComplex {
        let mut tau = Matrix::zeros(field, 2 * j, 2 * j);
        tau.paste(0, j, &Matrix::identity(field, j));
        tau.paste(j, 0, &Matrix::identity(field, j));
        BinaryComplex::new(
            field,
            vec![2 * j, 2 * j],
            vec![Matrix::identity(field, 2 * j)],
            vec![tau],
        )
        .expect("swap shapes")
    }

    /// Two seeded draws of [`ChainComplex::random_acyclic`] sharing `jdims`.
    pub fn random(field: Field, jdims: &[usize], seed: u64) -> BinaryComplex {
        let top = ChainComplex::random_acyclic(field, jdims, seed);
        let bot = ChainComplex::random_acyclic(field, jdims, seed ^ 0x9e37_79b9_7f4a_7c15);
        BinaryComplex { top, bot }
    }
}

/// A binary double complex on the rectangle `[0, K] x [0, L]`.
///
/// `dh[k-1][l]` is the horizontal `P_{k,l} -> P_{k-1,l}` and `dv[k][l-1]` the
/// vertical `P_{k,l} -> P_{k,l-1}`; `dph`, `dpv` are the bottom families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryDoubleComplex {
    field: Field,
    dims: Vec<Vec<usize>>,
    dh: Vec<Vec<Matrix>>,
    dv: Vec<Vec<Matrix>>,
    dph: Vec<Vec<Matrix>>,
    dpv: Vec<Vec<Matrix>>,
}

impl BinaryDoubleComplex {
    pub fn new(
        field: Field,
        dims: Vec<Vec<usize>>,
        dh: Vec<Vec<Matrix>>,
        dv: Vec<Vec<Matrix>>,
        dph: Vec<Vec<Matrix>>,
        dpv: Vec<Vec<Matrix>>,
    ) -> Result<BinaryDoubleComplex> {
        let bad = |s: String| Err(Error::InvalidDouble(s));
        if dims.is_empty() || dims[0].is_empty() {
            return bad("empty dimension table".into());
        }
        let kk = dims.len() - 1;
        let ll = dims[0].len() - 1;
        if dims.iter().any(|row| row.len() != ll + 1) {
            return bad("dimension table is not rectangular".into());
        }
        for (name, fam) in [("dh", &dh), ("dph", &dph)] {
            if fam.len() != kk || fam.iter().any(|c| c.len() != ll + 1) {
                return bad(format!("{name} has the wrong number of maps"));
            }
            for k in 1..=kk {
                for l in 0..=ll {
                    let m = &fam[k - 1][l];
                    if m.field() != field || m.shape() != (dims[k - 1][l], dims[k][l]) {
                        return bad(format!("{name} at ({k},{l}) has the wrong shape"));
                    }
                }
            }
        }
        for (name, fam) in [("dv", &dv), ("dpv", &dpv)] {
            if fam.len() != kk + 1 || fam.iter().any(|c| c.len() != ll) {
                return bad(format!("{name} has the wrong number of maps"));
            }
            for k in 0..=kk {
                for l in 1..=ll {
                    let m = &fam[k][l - 1];
                    if m.field() != field || m.shape() != (dims[k][l - 1], dims[k][l]) {
                        return bad(format!("{name} at ({k},{l}) has the wrong shape"));
                    }
                }
            }
        }
        Ok(BinaryDoubleComplex {
            field,
            dims,
            dh,
            dv,
            dph,
            dpv,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dims(&self) -> &[Vec<usize>] {
        &self.dims
    }

    /// Horizontal top maps, `dh()[k-1][l]`.
    pub fn dh(&self) -> &[Vec<Matrix>] {
        &self.dh
    }

    /// Vertical top maps, `dv()[k][l-1]`.
    pub fn dv(&self) -> &[Vec<Matrix>] {
        &self.dv
    }

    pub fn dph(&self) -> &[Vec<Matrix>] {
        &self.dph
    }

    pub fn dpv(&self) -> &[Vec<Matrix>] {
        &self.dpv
    }

    /// Largest horizontal index `K`.
    pub fn width(&self) -> usize {
        self.dims.len() - 1
    }

    /// Largest vertical index `L`.
    pub fn height(&self) -> usize {
        self.dims[0].len() - 1
    }

    pub fn dim(&self, k: usize, l: usize) -> usize {
        self.dims.get(k).and_then(|r| r.get(l)).copied().unwrap_or(0)
    }

    fn zero_map(&self, rows: usize, cols: usize) -> Matrix {
        Matrix::zeros(self.field, rows, cols)
    }

    /// Horizontal differential out of `(k, l)` on the given side.
    pub fn h(&self, side: Side, k: usize, l: usize) -> Matrix {
        let fam = match side {
            Side::Top => &self.dh,
            Side::Bottom => &self.dph,
        };
        if k >= 1 && k <= self.width() && l <= self.height() {
            fam[k - 1][l].clone()
        } else {
            self.zero_map(if k == 0 { 0 } else { self.dim(k - 1, l) }, self.dim(k, l))
        }
    }

    /// Vertical differential out of `(k, l)` on the given side.
    pub fn v(&self, side: Side, k: usize, l: usize) -> Matrix {
        let fam = match side {
            Side::Top => &self.dv,
            Side::Bottom => &self.dpv,
        };
        if l >= 1 && l <= self.height() && k <= self.width() {
            fam[k][l - 1].clone()
        } else {
            self.zero_map(if l == 0 { 0 } else { self.dim(k, l - 1) }, self.dim(k, l))
        }
    }

    pub fn row(&self, l: usize) -> BinaryComplex {
        let dims = (0..=self.width()).map(|k| self.dims[k][l]).collect();
        let top = (1..=self.width()).map(|k| self.h(Side::Top, k, l)).collect();
        let bot = (1..=self.width()).map(|k| self.h(Side::Bottom, k, l)).collect();
        BinaryComplex::new(self.field, dims, top, bot).expect("row shapes")
    }

    pub fn column(&self, k: usize) -> BinaryComplex {
        let dims = self.dims[k].clone();
        let top = (1..=self.height()).map(|l| self.v(Side::Top, k, l)).collect();
        let bot = (1..=self.height()).map(|l| self.v(Side::Bottom, k, l)).collect();
        BinaryComplex::new(self.field, dims, top, bot).expect("column shapes")
    }

    /// Checks that each side is a double complex: rows and columns square
    /// to zero and the squares commute. Exactness is not required.
    pub fn check_structure(&self) -> Result<()> {
        for side in [Side::Top, Side::Bottom] {
            for k in 0..=self.width() {
                for l in 0..=self.height() {
                    if k >= 2 && !(&self.h(side, k - 1, l) * &self.h(side, k, l)).is_zero() {
                        return Err(Error::InvalidDouble(format!(
                            "{side} horizontal square nonzero at ({k},{l})"
                        )));
                    }
                    if l >= 2 && !(&self.v(side, k, l - 1) * &self.v(side, k, l)).is_zero() {
                        return Err(Error::InvalidDouble(format!(
                            "{side} vertical square nonzero at ({k},{l})"
                        )));
                    }
                    if k >= 1 && l >= 1 {
                        let hv = &self.h(side, k, l - 1) * &self.v(side, k, l);
                        let vh = &self.v(side, k - 1, l) * &self.h(side, k, l);
                        if hv != vh {
                            return Err(Error::InvalidDouble(format!(
                                "{side} square at ({k},{l}) does not commute"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Full validity: structure plus every row and column a valid binary complex.
    pub fn validate(&self) -> Result<()> {
        self.check_structure()?;
        for l in 0..=self.height() {
            self.row(l)
                .validate()
                .map_err(|e| Error::InvalidDouble(format!("row {l}: {e}")))?;
        }
        for k in 0..=self.width() {
            self.column(k)
                .validate()
                .map_err(|e| Error::InvalidDouble(format!("column {k}: {e}")))?;
        }
        Ok(())
    }

    /// Positions `(k, l)` with `k + l = n`, ordered by `l` ascending.
    pub fn diagonal_positions(&self, n: usize) -> Vec<(usize, usize)> {
        (0..=self.height().min(n))
            .filter(|&l| n - l <= self.width())
            .map(|l| (n - l, l))
            .collect()
    }

    /// Total complex with differential `d^h + (-1)^k d^v` on the `(k, l)` block.
    /// Requires the double-complex structure; rows need not be exact here.
    pub fn total_complex(&self) -> Result<BinaryComplex> {
        self.check_structure()?;
        let top_deg = self.width() + self.height();
        let offsets = |n: usize| -> Vec<((usize, usize), usize)> {
            let mut acc = 0;
            self.diagonal_positions(n)
                .into_iter()
                .map(|p| {
                    let o = acc;
                    acc += self.dim(p.0, p.1);
                    (p, o)
                })
                .collect()
        };
        let dims: Vec<usize> = (0..=top_deg)
            .map(|n| self.diagonal_positions(n).iter().map(|&(k, l)| self.dim(k, l)).sum())
            .collect();
        let mut fams = Vec::new();
        for side in [Side::Top, Side::Bottom] {
            let mut diffs = Vec::new();
            for n in 1..=top_deg {
                let mut d = Matrix::zeros(self.field, dims[n - 1], dims[n]);
                let targets = offsets(n - 1);
                let find = |p: (usize, usize)| targets.iter().find(|t| t.0 == p).map(|t| t.1);
                for ((k, l), col) in offsets(n) {
                    if k >= 1 {
                        if let Some(row) = find((k - 1, l)) {
                            d.paste(row, col, &self.h(side, k, l));
                        }
                    }
                    if l >= 1 {
                        if let Some(row) = find((k, l - 1)) {
                            let v = self.v(side, k, l);
                            d.paste(row, col, &if k % 2 == 1 { -&v } else { v });
                        }
                    }
                }
                diffs.push(d);
            }
            fams.push(diffs);
        }
        let bot = fams.pop().expect("two sides");
        let top = fams.pop().expect("two sides");
        BinaryComplex::new(self.field, dims, top, bot)
    }

    /// `P_{k,l} = A_k ⊗ B_l` with horizontal `d_A ⊗ id` and vertical `id ⊗ d_B`.
    pub fn tensor_double(a: &BinaryComplex, b: &BinaryComplex) -> Result<BinaryDoubleComplex> {
        let field = a.field();
        if b.field() != field {
            return Err(Error::FieldMismatch(field, b.field()));
        }
        let (kk, ll) = (a.len(), b.len());
        let dims: Vec<Vec<usize>> = (0..=kk)
            .map(|k| (0..=ll).map(|l| a.dim(k) * b.dim(l)).collect())
            .collect();
        let id = |n: usize| Matrix::identity(field, n);
        let horiz = |c: &ChainComplex| -> Vec<Vec<Matrix>> {
            (1..=kk)
                .map(|k| (0..=ll).map(|l| c.d(k).kron(&id(b.dim(l)))).collect())
                .collect()
        };
        let vert = |c: &ChainComplex| -> Vec<Vec<Matrix>> {
            (0..=kk)
                .map(|k| (1..=ll).map(|l| id(a.dim(k)).kron(&c.d(l))).collect())
                .collect()
        };
        BinaryDoubleComplex::new(
            field,
            dims,
            horiz(a.top()),
            vert(b.top()),
            horiz(a.bot()),
            vert(b.bot()),
        )
    }
}

/// A formal signed sum of binary complexes. No cancellation is performed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NenashevExpression {
    field: Field,
    terms: Vec<(i8, BinaryComplex)>,
}

impl NenashevExpression {
    pub fn new(field: Field) -> NenashevExpression {
        NenashevExpression {
            field,
            terms: Vec::new(),
        }
    }

    pub fn single(sign: i8, b: BinaryComplex) -> NenashevExpression {
        let mut e = NenashevExpression::new(b.field());
        e.push(sign, b).expect("field matches");
        e
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn terms(&self) -> &[(i8, BinaryComplex)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, sign: i8, b: BinaryComplex) -> Result<()> {
        assert!(sign == 1 || sign == -1, "sign must be ±1");
        if b.field() != self.field {
            return Err(Error::FieldMismatch(self.field, b.field()));
        }
        self.terms.push((sign, b));
        Ok(())
    }

    pub fn expr_neg(&self) -> NenashevExpression {
        self.expr_scale(-1)
    }

    pub fn expr_scale(&self, sign: i8) -> NenashevExpression {
        NenashevExpression {
            field: self.field,
            terms: self.terms.iter().map(|(s, b)| (s * sign, b.clone())).collect(),
        }
    }

    pub fn expr_add(&self, o: &NenashevExpression) -> Result<NenashevExpression> {
        if o.field != self.field {
            return Err(Error::FieldMismatch(self.field, o.field));
        }
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Ok(NenashevExpression {
            field: self.field,
            terms,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Q: Field = Field::Rationals;

    fn one_by_one(top: i64, bot: i64) -> BinaryComplex {
        BinaryComplex::new(
            Q,
            vec![1, 1],
            vec![Matrix::from_i64(Q, 1, 1, &[top])],
            vec![Matrix::from_i64(Q, 1, 1, &[bot])],
        )
        .unwrap()
    }

    #[test]
    fn validate_examples() {
        let (j, k) = one_by_one(2, 3).validate().unwrap();
        assert_eq!(j.jdims, vec![1, 0]);
        assert_eq!(k.jdims, vec![1, 0]);
        match one_by_one(2, 0).validate() {
            Err(Error::InvalidBinary { side, degree, .. }) => {
                assert_eq!(side, Side::Bottom);
                assert_eq!(degree, 0);
            }
            other => panic!("unexpected {other:?}"),
        }
        let c = ChainComplex::random_acyclic(Q, &[2, 1, 3], 4);
        let d = BinaryComplex::diagonal(&c).unwrap();
        assert!(d.is_valid());
        assert_eq!(d.top(), &c);
        assert_eq!(d.bot(), &c);
        assert_eq!(d.flip(), d);
    }

    #[test]
    fn diagonal_object_is_identity() {
        let d = BinaryComplex::diagonal_object(Q, 2);
        assert_eq!(d.dims(), &[2, 2]);
        assert_eq!(d.top().d(1), Matrix::identity(Q, 2));
        assert_eq!(d.bot().d(1), Matrix::identity(Q, 2));
    }

    #[test]
    fn swap_complex_shape() {
        assert!(BinaryComplex::swap_complex(Q, 0).is_empty());
        let s = BinaryComplex::swap_complex(Q, 1);
        assert_eq!(s.bot().d(1), Matrix::from_i64(Q, 2, 2, &[0, 1, 1, 0]));
        assert!(s.is_valid());
        // Conjugating the bottom by (τ, id) recovers the top.
        let tau = s.bot().d(1);
        assert_eq!(&s.bot().d(1) * &tau, s.top().d(1));
    }

    #[test]
    fn suspension_negates() {
        let b = one_by_one(2, 5).suspend_b(1);
        assert_eq!(b.top().d(2), Matrix::from_i64(Q, 1, 1, &[-2]));
        assert_eq!(b.bot().d(2), Matrix::from_i64(Q, 1, 1, &[-5]));
        assert_eq!(one_by_one(2, 5).suspend_b(2), one_by_one(2, 5).shift_b(2));
    }

    #[test]
    fn total_of_single_row() {
        let b = BinaryComplex::random(Q, &[1, 2], 8);
        let dc =
            BinaryDoubleComplex::tensor_double(&b, &BinaryComplex::new(Q, vec![1], vec![], vec![]).unwrap()).unwrap();
        assert_eq!(dc.height(), 0);
        assert_eq!(dc.total_complex().unwrap(), b);
    }

    #[test]
    fn identity_square_totalizes() {
        let iso = BinaryComplex::diagonal_object(Q, 1);
        let dc = BinaryDoubleComplex::tensor_double(&iso, &iso).unwrap();
        assert_eq!(dc.dims(), &[vec![1, 1], vec![1, 1]]);
        dc.validate().unwrap();
        let t = dc.total_complex().unwrap();
        assert_eq!(t.dims(), &[1, 2, 1]);
        assert!(t.is_valid());
    }

    #[test]
    fn noncommuting_square_rejected() {
        let iso = BinaryComplex::diagonal_object(Q, 1);
        let dc = BinaryDoubleComplex::tensor_double(&iso, &iso).unwrap();
        let mut dh = dc.dh.clone();
        dh[0][0] = Matrix::from_i64(Q, 1, 1, &[2]);
        let bad =
            BinaryDoubleComplex::new(Q, dc.dims.clone(), dh, dc.dv.clone(), dc.dph.clone(), dc.dpv.clone()).unwrap();
        assert!(bad.check_structure().is_err());
        assert!(bad.total_complex().is_err());
    }

    #[test]
    fn expression_algebra() {
        let b = one_by_one(2, 3);
        let e = NenashevExpression::single(1, b.clone());
        let sum = e.expr_add(&e.expr_neg()).unwrap();
        assert_eq!(sum.terms().iter().map(|t| t.0).collect::<Vec<_>>(), vec![1, -1]);
        assert_eq!(e.expr_scale(-1).expr_scale(-1), e);
        let other = NenashevExpression::new(Field::Prime(7));
        assert!(e.expr_add(&other).is_err());
    }

    fn fields() -> impl Strategy<Value = Field> {
        prop_oneof![Just(Q), Just(Field::Prime(3)), Just(Field::Prime(7))]
    }

    fn jdims() -> impl Strategy<Value = Vec<usize>> {
        proptest::collection::vec(0usize..=2, 0..4)
    }

    proptest! {
        #[test]
        fn operations_preserve_validity(field in fields(), jd in jdims(), seed in any::<u64>(), i in 0usize..3) {
            let b = BinaryComplex::random(field, &jd, seed);
            prop_assert!(b.is_valid());
            prop_assert!(b.flip().is_valid());
            prop_assert_eq!(b.flip().flip(), b.clone());
            prop_assert!(b.shift_b(i).is_valid());
            prop_assert!(b.suspend_b(i).is_valid());
            prop_assert!(b.cone_b().is_valid());
            prop_assert_eq!(b.direct_sum_b(&BinaryComplex::zero(field)).unwrap(), b.clone());
            prop_assert_eq!(b.suspend_b(2), b.shift_b(2));
        }

        #[test]
        fn tensor_double_is_valid(field in fields(), ja in jdims(), jb in jdims(), seed in any::<u64>()) {
            let a = BinaryComplex::random(field, &ja, seed);
            let b = BinaryComplex::random(field, &jb, seed.wrapping_add(1));
            let dc = BinaryDoubleComplex::tensor_double(&a, &b).unwrap();
            prop_assert!(dc.validate().is_ok());
            for l in 0..=dc.height() {
                prop_assert_eq!(dc.row(l).dims().to_vec(), a.dims().iter().map(|x| x * b.dim(l)).collect::<Vec<_>>());
            }
            prop_assert!(dc.total_complex().unwrap().is_valid());
        }
    }
}
