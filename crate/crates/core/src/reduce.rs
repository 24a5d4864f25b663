//! Shortening binary acyclic complexes.
//!
//! Two reductions are implemented. The first rewrites a complex as an
//! alternating sum of complexes `S_n` supported in degrees `[0, 4]`, one per
//! degree, using extension witnesses between the top and bottom images
//! `J_n`, `K_n`. The second rewrites it as a signed sum of complexes
//! supported in `[0, 2]`, via the complexes `P̂`, `Q`, `T`, `T'` and the
//! family `P_k`.
//!
//! Summand names used in layouts: `P{n}`, `J{n}`, `K{n}` for `P_n`, `J_n`,
//! `K_n`, and `A{n}`, `B{n}`, `S{n}` for the witness objects at degree `n`.

use crate::binary::{BinaryComplex, BinaryDoubleComplex, NenashevExpression};
use crate::chain::Factorization;
use crate::error::{Error, Result, Side};
use crate::field::Field;
use crate::heller::{heller_witness, random_witness, verify_witness, ExtensionWitness};
use crate::layout::{BinaryBuilder, Cells, DoubleBuilder, Family, LabeledBinary, Layout};
use crate::matrix::Matrix;
use crate::random;

/// `k(b)`: the highest degree with a nonzero object (0 for the zero complex).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SupportLength(pub usize);

pub fn support_length(b: &BinaryComplex) -> SupportLength {
    SupportLength(b.graded().support_length())
}

/// Free choices made while shortening: one extension witness per degree,
/// and optional changes of basis of `J_n` (top) and `K_n` (bottom) for
/// `n >= 1`, which give alternative factorizations of the differentials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShorteningChoices {
    pub witnesses: Vec<ExtensionWitness>,
    pub rebase_top: Vec<Option<(Matrix, Matrix)>>,
    pub rebase_bot: Vec<Option<(Matrix, Matrix)>>,
}

impl ShorteningChoices {
    /// Canonical witnesses and the echelon factorizations.
    pub fn canonical(b: &BinaryComplex) -> Result<ShorteningChoices> {
        let (jf, kf) = b.validate()?;
        let witnesses = (0..=b.len())
            .map(|n| heller_witness(b.field(), jf.jdim(n), kf.jdim(n)))
            .collect::<Result<_>>()?;
        Ok(ShorteningChoices {
            witnesses,
            rebase_top: vec![None; b.len() + 1],
            rebase_bot: vec![None; b.len() + 1],
        })
    }

    /// Random witnesses with stabilizers of dimension up to `max_s`, and
    /// random bases of every `J_n`, `K_n` with `n >= 1`.
    pub fn random(b: &BinaryComplex, seed: u64, max_s: usize) -> Result<ShorteningChoices> {
        use rand::Rng;
        let (jf, kf) = b.validate()?;
        let field = b.field();
        let mut rng = random::rng(seed);
        let mut witnesses = Vec::new();
        let mut rebase_top = Vec::new();
        let mut rebase_bot = Vec::new();
        for n in 0..=b.len() {
            let s = rng.random_range(0..=max_s);
            witnesses.push(random_witness(field, jf.jdim(n), kf.jdim(n), s, rng.random())?);
            if n == 0 {
                rebase_top.push(None);
                rebase_bot.push(None);
            } else {
                rebase_top.push(Some(random::invertible(field, jf.jdim(n), &mut rng)));
                rebase_bot.push(Some(random::invertible(field, kf.jdim(n), &mut rng)));
            }
        }
        Ok(ShorteningChoices {
            witnesses,
            rebase_top,
            rebase_bot,
        })
    }

    /// Degreewise direct sum of choices for `b' ⊕ b''`.
    pub fn direct_sum(&self, o: &ShorteningChoices) -> ShorteningChoices {
        let len = self.witnesses.len().max(o.witnesses.len());
        let w = |c: &ShorteningChoices, n: usize, f: Field| {
            c.witnesses
                .get(n)
                .cloned()
                .unwrap_or_else(|| heller_witness(f, 0, 0).expect("zero witness"))
        };
        let field = self
            .witnesses
            .first()
            .map(|x| x.a_j.field())
            .unwrap_or(Field::Rationals);
        let rb = |a: &[Option<(Matrix, Matrix)>], b: &[Option<(Matrix, Matrix)>], n: usize, da: usize, db: usize| {
            let get = |v: &[Option<(Matrix, Matrix)>], d: usize| {
                v.get(n)
                    .cloned()
                    .flatten()
                    .unwrap_or_else(|| (Matrix::identity(field, d), Matrix::identity(field, d)))
            };
            let (x, y) = (get(a, da), get(b, db));
            Some((x.0.direct_sum(&y.0), x.1.direct_sum(&y.1)))
        };
        let mut out = ShorteningChoices {
            witnesses: Vec::new(),
            rebase_top: Vec::new(),
            rebase_bot: Vec::new(),
        };
        for n in 0..len {
            let (a, b) = (w(self, n, field), w(o, n, field));
            out.rebase_top.push(if n == 0 {
                None
            } else {
                rb(&self.rebase_top, &o.rebase_top, n, a.dim_j, b.dim_j)
            });
            out.rebase_bot.push(if n == 0 {
                None
            } else {
                rb(&self.rebase_bot, &o.rebase_bot, n, a.dim_k, b.dim_k)
            });
            out.witnesses.push(a.direct_sum(&b));
        }
        out
    }
}

/// A validated input with its (possibly rebased) factorizations.
pub(crate) struct Pieces {
    pub(crate) field: Field,
    b: BinaryComplex,
    jf: Factorization,
    kf: Factorization,
    witnesses: Vec<ExtensionWitness>,
}

impl Pieces {
    pub(crate) fn new(b: &BinaryComplex, choices: &ShorteningChoices) -> Result<Pieces> {
        let (mut jf, mut kf) = b.validate()?;
        for (n, r) in choices.rebase_top.iter().enumerate().skip(1) {
            if let Some((g, gi)) = r {
                if n <= b.len() {
                    jf.rebase(n, g, gi);
                }
            }
        }
        for (n, r) in choices.rebase_bot.iter().enumerate().skip(1) {
            if let Some((g, gi)) = r {
                if n <= b.len() {
                    kf.rebase(n, g, gi);
                }
            }
        }
        for (n, w) in choices.witnesses.iter().enumerate() {
            if !verify_witness(w, jf.jdim(n), kf.jdim(n)) {
                return Err(Error::InvalidWitness(format!("witness at degree {n} does not verify")));
            }
        }
        Ok(Pieces {
            field: b.field(),
            b: b.clone(),
            jf,
            kf,
            witnesses: choices.witnesses.clone(),
        })
    }

    pub(crate) fn m(&self) -> usize {
        self.b.len()
    }

    pub(crate) fn p(&self, n: usize) -> usize {
        self.b.dim(n)
    }

    pub(crate) fn j(&self, n: usize) -> usize {
        self.jf.jdim(n)
    }

    pub(crate) fn k(&self, n: usize) -> usize {
        self.kf.jdim(n)
    }

    pub(crate) fn d(&self, side: Side, n: usize) -> Matrix {
        self.b.side(side).d(n)
    }

    fn fac(&self, side: Side) -> &Factorization {
        match side {
            Side::Top => &self.jf,
            Side::Bottom => &self.kf,
        }
    }

    /// `i_n` (top) or `i'_n` (bottom); zero-sized beyond the stored degrees.
    pub(crate) fn i(&self, side: Side, n: usize) -> Matrix {
        if n <= self.m() {
            self.fac(side).i(n).clone()
        } else {
            Matrix::zeros(self.field, 0, 0)
        }
    }

    /// `q_n` (top) or `q'_n` (bottom).
    pub(crate) fn q(&self, side: Side, n: usize) -> Matrix {
        if n <= self.m() {
            self.fac(side).q(n).clone()
        } else {
            Matrix::zeros(self.field, self.fac(side).jdim(n - 1), 0)
        }
    }

    pub(crate) fn witness(&self, n: usize) -> Result<ExtensionWitness> {
        match self.witnesses.get(n) {
            Some(w) => Ok(w.clone()),
            None if self.j(n) == 0 && self.k(n) == 0 => heller_witness(self.field, 0, 0),
            None => Err(Error::InvalidWitness(format!("no witness at degree {n}"))),
        }
    }
}

pub(crate) fn other(side: Side) -> Side {
    match side {
        Side::Top => Side::Bottom,
        Side::Bottom => Side::Top,
    }
}

/// Name of the image of `side` in degree `n`: `J` on top, `K` on the bottom.
pub(crate) fn img(side: Side, n: usize) -> String {
    match side {
        Side::Top => format!("J{n}"),
        Side::Bottom => format!("K{n}"),
    }
}

fn named(prefix: &str, n: usize) -> String {
    format!("{prefix}{n}")
}

/// The witness row used on `side`: the top differential passes through
/// `K ⊕ S`, the bottom one through `J ⊕ S`.
pub(crate) fn witness_maps(w: &ExtensionWitness, side: Side) -> (&Matrix, &Matrix) {
    match side {
        Side::Top => (&w.a_k, &w.b_k),
        Side::Bottom => (&w.a_j, &w.b_j),
    }
}

pub(crate) fn build_s(pc: &Pieces, n: usize) -> Result<LabeledBinary> {
    assert!(n >= 1);
    let wn = pc.witness(n)?;
    let (a, s, b) = (named("A", n), named("S", n), named("B", n));
    let (jn, kn, pn) = (named("J", n), named("K", n), named("P", n));
    if n <= 2 {
        // A_n | K_n ⊕ S_n ⊕ J_n | B_n ⊕ P_n | P_{n-1} | ... | P_0 from degree n + 2 down.
        let top = n + 2;
        let mut lay = Layout::new(4);
        lay.add(top, a.clone(), wn.dim_a);
        lay.add(top - 1, kn.clone(), pc.k(n));
        lay.add(top - 1, s.clone(), wn.dim_s);
        lay.add(top - 1, jn.clone(), pc.j(n));
        lay.add(n, b.clone(), wn.dim_b);
        lay.add(n, pn.clone(), pc.p(n));
        for t in 0..n {
            lay.add(t, named("P", t), pc.p(t));
        }
        let mut bb = BinaryBuilder::new(pc.field, lay);
        for side in [Side::Top, Side::Bottom] {
            let (am, bm) = witness_maps(&wn, side);
            let own = img(other(side), n);
            let inc = img(side, n);
            bb.arrow(side, top, &[&a], &[&own, &s], am);
            bb.arrow(side, top - 1, &[&own, &s], &[&b], bm);
            bb.arrow(side, top - 1, &[&inc], &[&pn], &pc.i(side, n));
            for t in 1..=n {
                bb.arrow(side, t, &[&named("P", t)], &[&named("P", t - 1)], &pc.d(side, t));
            }
        }
        return Ok(bb.build());
    }
    let w1 = pc.witness(n - 1)?;
    let (a1, s1, b1) = (named("A", n - 1), named("S", n - 1), named("B", n - 1));
    let (j1, k1) = (named("J", n - 1), named("K", n - 1));
    let mut layout = Layout::new(4);
    layout.add(4, a.clone(), wn.dim_a);
    layout.add(3, kn.clone(), pc.k(n));
    layout.add(3, s.clone(), wn.dim_s);
    layout.add(3, jn.clone(), pc.j(n));
    layout.add(2, b.clone(), wn.dim_b);
    layout.add(2, pn.clone(), pc.p(n));
    layout.add(2, a1.clone(), w1.dim_a);
    layout.add(1, j1.clone(), pc.j(n - 1));
    layout.add(1, k1.clone(), pc.k(n - 1));
    layout.add(1, s1.clone(), w1.dim_s);
    layout.add(0, b1.clone(), w1.dim_b);
    let mut bb = BinaryBuilder::new(pc.field, layout);
    for side in [Side::Top, Side::Bottom] {
        let (am, bm) = witness_maps(&wn, side);
        let (am1, bm1) = witness_maps(&w1, side);
        let (own, inc) = (img(other(side), n), img(side, n));
        let (own1, inc1) = (img(other(side), n - 1), img(side, n - 1));
        bb.arrow(side, 4, &[&a], &[&own, &s], am);
        bb.arrow(side, 3, &[&own, &s], &[&b], bm);
        bb.arrow(side, 3, &[&inc], &[&pn], &pc.i(side, n));
        bb.arrow(side, 2, &[&pn], &[&inc1], &pc.q(side, n));
        bb.arrow(side, 2, &[&a1], &[&own1, &s1], am1);
        bb.arrow(side, 1, &[&own1, &s1], &[&b1], bm1);
    }
    Ok(bb.build())
}

/// `S_n` for `n >= 1`, supported in `[0, 4]`. For `n >= 3` it is assembled
/// from `A_n ↣ K_n ⊕ S_n ↠ B_n`, `J_n ↣ P_n ↠ J_{n-1}` and
/// `A_{n-1} ↣ K_{n-1} ⊕ S_{n-1} ↠ B_{n-1}` on top, with `J` and `K`
/// exchanged on the bottom. For `n <= 2` the tail is `P_n -> ... -> P_0`.
pub fn build_s_n(b: &BinaryComplex, n: usize, choices: &ShorteningChoices) -> Result<BinaryComplex> {
    if n == 0 {
        return Err(Error::TooShort { found: 0, need: 1 });
    }
    let pc = Pieces::new(b, choices)?;
    Ok(build_s(&pc, n)?.complex)
}

/// `Σ_{n=2}^{max(k,2)} (-1)^n [S_n]`.
pub fn shorten_to_len4(b: &BinaryComplex, choices: &ShorteningChoices) -> Result<NenashevExpression> {
    let pc = Pieces::new(b, choices)?;
    // Witnesses beyond k(b) may be nontrivial; S_{n+1} carries the one at n.
    let last = (0..pc.witnesses.len())
        .rev()
        .find(|&n| {
            let w = &pc.witnesses[n];
            w.dim_a + w.dim_b + w.dim_s > 0
        })
        .map_or(0, |n| n + 1);
    let k = support_length(b).0.max(last).max(2);
    let mut e = NenashevExpression::new(b.field());
    for n in 2..=k {
        e.push(if n % 2 == 0 { 1 } else { -1 }, build_s(&pc, n)?.complex)?;
    }
    Ok(e)
}

pub(crate) fn build_p_prime_inner(pc: &Pieces, j: usize) -> Result<LabeledBinary> {
    let w = pc.witness(j)?;
    let top = 2.max((pc.m() + 1).saturating_sub(j));
    let mut layout = Layout::new(top);
    let (a, s, bn) = (named("A", j), named("S", j), named("B", j));
    let (jj, kj) = (named("J", j), named("K", j));
    layout.add(0, bn.clone(), w.dim_b);
    layout.add(1, jj.clone(), pc.j(j));
    layout.add(1, kj.clone(), pc.k(j));
    layout.add(1, s.clone(), w.dim_s);
    layout.add(2, named("P", j + 1), pc.p(j + 1));
    layout.add(2, a.clone(), w.dim_a);
    for t in 3..=top {
        layout.add(t, named("P", j + t - 1), pc.p(j + t - 1));
    }
    let mut bb = BinaryBuilder::new(pc.field, layout);
    for side in [Side::Top, Side::Bottom] {
        let (am, bm) = witness_maps(&w, side);
        let own = img(other(side), j);
        bb.arrow(side, 2, &[&named("P", j + 1)], &[&img(side, j)], &pc.q(side, j + 1));
        bb.arrow(side, 2, &[&a], &[&own, &s], am);
        bb.arrow(side, 1, &[&own, &s], &[&bn], bm);
        for t in 3..=top {
            let src = named("P", j + t - 1);
            bb.arrow(side, t, &[&src], &[&named("P", j + t - 2)], &pc.d(side, j + t - 1));
        }
    }
    Ok(bb.build())
}

/// `P'` cut at degree `j >= 1`: `B_j` in degree 0, `J_j ⊕ K_j ⊕ S_j` in
/// degree 1, `P_{j+1} ⊕ A_j` in degree 2 and `P_{j+t-1}` in degree `t >= 3`.
pub fn build_p_prime(b: &BinaryComplex, choices: &ShorteningChoices, j: usize) -> Result<BinaryComplex> {
    if j == 0 {
        return Err(Error::TooShort { found: 0, need: 1 });
    }
    let pc = Pieces::new(b, choices)?;
    Ok(build_p_prime_inner(&pc, j)?.complex)
}

pub(crate) fn build_hat_p_inner(pc: &Pieces) -> LabeledBinary {
    let m = pc.m();
    let top = m.max(2);
    let mut layout = Layout::new(top);
    let (j, k) = (pc.j(1), pc.k(1));
    layout.add(0, "P0", pc.p(0));
    layout.add(1, "J1", j);
    layout.add(1, "P1", pc.p(1));
    layout.add(1, "K1", k);
    layout.add(2, "P2", pc.p(2));
    layout.add(2, "J1", j);
    layout.add(2, "K1", k);
    for t in 3..=top {
        layout.add(t, named("P", t), pc.p(t));
    }
    let mut bb = BinaryBuilder::new(pc.field, layout);
    for side in [Side::Top, Side::Bottom] {
        let (inc, own) = (img(side, 1), img(other(side), 1));
        bb.arrow(side, 2, &["P2"], &[&inc], &pc.q(side, 2));
        bb.arrow(side, 2, &[&inc], &["P1"], &pc.i(side, 1));
        bb.strap(side, 2, &own, &own);
        bb.arrow(side, 1, &["P1"], &["P0"], &pc.d(side, 1));
        for t in 3..=top {
            bb.arrow(side, t, &[&named("P", t)], &[&named("P", t - 1)], &pc.d(side, t));
        }
    }
    bb.build()
}

/// `P̂`: `P` with `J_1` and `K_1` added in degrees 1 and 2, where top factors
/// `d_2` through the degree-1 copy of `J_1` and strips the `K_1` copies off
/// with an identity, and the bottom does the same with the roles exchanged.
pub fn build_hat_p(b: &BinaryComplex, choices: &ShorteningChoices) -> Result<BinaryComplex> {
    Ok(build_hat_p_inner(&Pieces::new(b, choices)?).complex)
}

pub(crate) fn build_q_inner(pc: &Pieces) -> LabeledBinary {
    let m = pc.m();
    let top = m.saturating_sub(1).max(2);
    let (j, k) = (pc.j(1), pc.k(1));
    let mut layout = Layout::new(top);
    layout.add(0, "J1", j);
    layout.add(0, "P0", pc.p(0));
    layout.add(0, "K1", k);
    layout.add(1, "P2", pc.p(2));
    layout.add(1, "P1", pc.p(1));
    layout.add(1, "J1", j);
    layout.add(1, "K1", k);
    layout.add(2, "P3", pc.p(3));
    layout.add(2, "K1", k);
    layout.add(2, "J1", j);
    for t in 3..=top {
        layout.add(t, named("P", t + 1), pc.p(t + 1));
    }
    let mut bb = BinaryBuilder::new(pc.field, layout);
    for side in [Side::Top, Side::Bottom] {
        let (inc, own) = (img(side, 1), img(other(side), 1));
        // The other side's image enters P_1, followed by the other side's d_1.
        bb.arrow(side, 2, &["P3"], &["P2"], &pc.d(side, 3));
        bb.arrow(side, 2, &[&own], &["P1"], &pc.i(other(side), 1));
        bb.strap(side, 2, &inc, &inc);
        bb.arrow(side, 1, &["P2"], &[&inc], &pc.q(side, 2));
        bb.arrow(side, 1, &["P1"], &["P0"], &pc.d(other(side), 1));
        bb.strap(side, 1, &own, &own);
        for t in 3..=top {
            bb.arrow(side, t, &[&named("P", t + 1)], &[&named("P", t)], &pc.d(side, t + 1));
        }
    }
    bb.build()
}

/// `Q`: degrees `J_1 ⊕ P_0 ⊕ K_1`, `P_2 ⊕ P_1 ⊕ J_1 ⊕ K_1`,
/// `P_3 ⊕ K_1 ⊕ J_1`, then `P_{t+1}`. Supported in `[0, max(k(b) - 1, 2)]`.
pub fn build_q(b: &BinaryComplex, choices: &ShorteningChoices) -> Result<BinaryComplex> {
    Ok(build_q_inner(&Pieces::new(b, choices)?).complex)
}

/// The double complex with `P̂` as row 1 and `Q` shifted up by one as row 0.
fn build_t_double(pc: &Pieces) -> Result<(BinaryDoubleComplex, Layout, Layout)> {
    let hat = build_hat_p_inner(pc);
    let q = build_q_inner(pc);
    let width = (q.layout.top() + 1).max(hat.layout.top());
    let mut cells = Cells::new(width, 1);
    cells.add_row(1, 0, &hat.layout, |n| format!("h.{n}"));
    cells.add_row(0, 1, &q.layout, |n| format!("q.{n}"));
    let mut db = DoubleBuilder::new(pc.field, cells);
    db.add_row(1, 0, &hat, |n| format!("h.{n}"));
    db.add_row(0, 1, &q, |n| format!("q.{n}"));
    // Columns: P̂_k -> Q_{k-1}.
    for side in [Side::Top, Side::Bottom] {
        let inc = img(side, 1);
        db.strap(Family::Vertical(side), 1, 1, &format!("h.{inc}"), &format!("q.{inc}"));
    }
    for t in 2..=hat.layout.top() {
        db.strap_both(true, t, 1, &format!("h.P{t}"), &format!("q.P{t}"));
    }
    Ok((db.build()?, hat.layout, q.layout))
}

fn build_t_inner(pc: &Pieces) -> Result<LabeledBinary> {
    let (dc, hat, q) = build_t_double(pc)?;
    let total = dc.total_complex()?;
    // Degree 0 of the total complex is Q_{-1} = 0; shift down by one.
    let top = total.len() - 1;
    let mut layout = Layout::new(top);
    for n in 0..=top {
        if n <= q.top() {
            for (name, d) in q.blocks(n) {
                layout.add(n, format!("q.{name}"), *d);
            }
        }
        if n <= hat.top() {
            for (name, d) in hat.blocks(n) {
                layout.add(n, format!("h.{name}"), *d);
            }
        }
    }
    let field = pc.field;
    let diffs = |side: Side| -> Vec<Matrix> { (2..=total.len()).map(|n| total.side(side).d(n)).collect() };
    let complex = BinaryComplex::new(field, total.dims()[1..].to_vec(), diffs(Side::Top), diffs(Side::Bottom))?;
    assert_eq!(complex.dims(), layout.dims().as_slice());
    Ok(LabeledBinary { layout, complex })
}

/// The double complex whose total complex (shifted down by one) is `T`.
pub fn build_t_double_complex(b: &BinaryComplex, choices: &ShorteningChoices) -> Result<BinaryDoubleComplex> {
    Ok(build_t_double(&Pieces::new(b, choices)?)?.0)
}

/// `T`: the total complex, shifted down by one, of `P̂` over `Q[1]`.
pub fn build_t(b: &BinaryComplex, choices: &ShorteningChoices) -> Result<BinaryComplex> {
    Ok(build_t_inner(&Pieces::new(b, choices)?)?.complex)
}

fn is_high_p(name: &str) -> bool {
    let bare = name.trim_start_matches("q.").trim_start_matches("h.");
    bare.strip_prefix('P')
        .and_then(|x| x.parse::<usize>().ok())
        .is_some_and(|n| n >= 2)
}

/// `T'`: `T` with the summands `P_n`, `n >= 2`, removed. What is removed is
/// a sum of diagonal complexes; the rest lives in degrees `[0, 2]`.
pub fn build_t_prime(b: &BinaryComplex, choices: &ShorteningChoices) -> Result<BinaryComplex> {
    let t = build_t_inner(&Pieces::new(b, choices)?)?;
    Ok(t.restrict(|_, n| !is_high_p(n)).truncate(2).complex)
}

/// `(swap(J_1), Q)` with `[b] = [swap(J_1)] - [Q]`. Needs `k(b) >= 3`.
pub fn shorten_step(b: &BinaryComplex, choices: &ShorteningChoices) -> Result<(BinaryComplex, BinaryComplex)> {
    let k = support_length(b).0;
    if k < 3 {
        return Err(Error::TooShort { found: k, need: 3 });
    }
    let pc = Pieces::new(b, choices)?;
    Ok((
        BinaryComplex::swap_complex(b.field(), pc.j(1)),
        build_q_inner(&pc).complex,
    ))
}

/// Summands of `P_k` in a given degree.
fn p_k_layout(pc: &Pieces, k: usize) -> Layout {
    let top = pc.m().saturating_sub(k).max(2);
    let mut layout = Layout::new(top);
    for n in 1..=k {
        layout.add(0, named("J", n), pc.j(n));
    }
    layout.add(0, "P0", pc.p(0));
    for n in 1..=k {
        layout.add(0, named("K", n), pc.k(n));
    }
    for n in (1..=k + 1).rev() {
        layout.add(1, named("P", n), pc.p(n));
    }
    for n in 1..=k {
        layout.add(1, named("J", n), pc.j(n));
    }
    for n in 1..=k {
        layout.add(1, named("K", n), pc.k(n));
    }
    layout.add(2, named("P", k + 2), pc.p(k + 2));
    for n in 1..=k {
        layout.add(2, named("K", n), pc.k(n));
    }
    for n in 1..=k {
        layout.add(2, named("J", n), pc.j(n));
    }
    for t in 3..=top {
        layout.add(t, named("P", k + t), pc.p(k + t));
    }
    layout
}

pub(crate) fn build_p_k_inner(pc: &Pieces, k: usize) -> LabeledBinary {
    let layout = p_k_layout(pc, k);
    let top = layout.top();
    let mut bb = BinaryBuilder::new(pc.field, layout);
    // Name of X_n in degree 0, where X_0 is P_0.
    let low = |side: Side, n: usize| if n == 0 { "P0".to_string() } else { img(side, n) };
    for side in [Side::Top, Side::Bottom] {
        // `x` is the family whose odd members enter P_n.
        let x = if (side == Side::Top) == k.is_multiple_of(2) {
            Side::Top
        } else {
            Side::Bottom
        };
        let y = other(x);
        for n in 1..=k {
            let (into, strap_hi, strap_lo) = if n % 2 == 1 { (x, y, x) } else { (y, x, y) };
            let sn = img(strap_hi, n);
            bb.strap(side, 2, &sn, &sn);
            bb.arrow(side, 2, &[&img(into, n)], &[&named("P", n)], &pc.i(into, n));
            let ln = img(strap_lo, n);
            bb.strap(side, 1, &ln, &ln);
            bb.arrow(side, 1, &[&named("P", n)], &[&low(into, n - 1)], &pc.q(into, n));
        }
        bb.arrow(side, 1, &[&named("P", k + 1)], &[&low(side, k)], &pc.q(side, k + 1));
        bb.arrow(
            side,
            2,
            &[&named("P", k + 2)],
            &[&named("P", k + 1)],
            &pc.d(side, k + 2),
        );
        for t in 3..=top {
            bb.arrow(
                side,
                t,
                &[&named("P", k + t)],
                &[&named("P", k + t - 1)],
                &pc.d(side, k + t),
            );
        }
    }
    bb.build()
}

/// `P_k`: `P_0 = b`, `P_1 = Q`, and `P_{k+1}` is the flip of `P_k` once
/// `k >= k(b)`. Degrees: `J_{1..k}, P_0, K_{1..k}`; `P_{k+1}, ..., P_1,
/// J_{1..k}, K_{1..k}`; `P_{k+2}, K_{1..k}, J_{1..k}`; then `P_{k+t}`.
pub fn build_p_k(b: &BinaryComplex, k: usize, choices: &ShorteningChoices) -> Result<BinaryComplex> {
    let pc = Pieces::new(b, choices)?;
    Ok(build_p_k_inner(&pc, k).complex)
}

/// `(-1)^k [P_k] + Σ_{n=1}^{k} [swap(J_n)]`, which represents `[b]` for every `k`.
pub fn x_form(b: &BinaryComplex, k: usize, choices: &ShorteningChoices) -> Result<NenashevExpression> {
    let pc = Pieces::new(b, choices)?;
    let mut e = NenashevExpression::new(b.field());
    e.push(
        if k.is_multiple_of(2) { 1 } else { -1 },
        build_p_k_inner(&pc, k).complex,
    )?;
    for n in 1..=k {
        e.push(1, BinaryComplex::swap_complex(b.field(), pc.j(n)))?;
    }
    Ok(e)
}

/// Ψ: a signed sum of complexes supported in `[0, 2]` representing `[b]`.
///
/// `k(b) = 0` gives the empty sum and `k(b) <= 2` gives `b` itself. Longer
/// complexes give `(-1)^k [P_k] + Σ_{n=1}^{k} [swap(J_n)]` with `k = k(b)`;
/// every summand is padded to exactly three degrees.
pub fn nenashev_form(b: &BinaryComplex, choices: &ShorteningChoices) -> Result<NenashevExpression> {
    b.validate()?;
    let k = support_length(b).0;
    if k == 0 {
        return Ok(NenashevExpression::new(b.field()));
    }
    if k <= 2 {
        return Ok(NenashevExpression::single(1, b.trimmed().with_len(2)));
    }
    let x = x_form(b, k, choices)?;
    let mut e = NenashevExpression::new(b.field());
    for (s, t) in x.terms() {
        e.push(*s, t.trimmed().with_len(2))?;
    }
    Ok(e)
}

/// Ψ by repeated [`shorten_step`]: `[b] = [swap J_1] - [Q]`, recursing on
/// `Q` until the support is at most 2. The choices apply to the first step;
/// later steps use canonical factorizations. Sizes roughly double at each
/// step, so this is only practical for short inputs.
pub fn nenashev_form_iterative(b: &BinaryComplex, choices: &ShorteningChoices) -> Result<NenashevExpression> {
    b.validate()?;
    let mut e = NenashevExpression::new(b.field());
    if support_length(b).0 == 0 {
        return Ok(e);
    }
    let mut cur = b.trimmed();
    let mut sign = 1i8;
    let mut first = true;
    while support_length(&cur).0 >= 3 {
        let ch = if first {
            choices.clone()
        } else {
            ShorteningChoices::canonical(&cur)?
        };
        let (swap, q) = shorten_step(&cur, &ch)?;
        e.push(sign, swap.with_len(2))?;
        sign = -sign;
        cur = q.trimmed();
        first = false;
    }
    e.push(sign, cur.with_len(2))?;
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ChainComplex;
    use crate::torsion::{kappa, kappa_expression};
    use proptest::prelude::*;

    const Q: Field = Field::Rationals;
    const F7: Field = Field::Prime(7);

    fn canon(b: &BinaryComplex) -> ShorteningChoices {
        ShorteningChoices::canonical(b).unwrap()
    }

    #[test]
    fn support_lengths() {
        assert_eq!(support_length(&BinaryComplex::zero(Q)), SupportLength(0));
        let b = BinaryComplex::random(Q, &[1, 1], 1).with_len(3);
        assert_eq!(b.dims(), &[1, 2, 1, 0]);
        assert_eq!(support_length(&b), SupportLength(2));
        assert_eq!(support_length(&BinaryComplex::random(Q, &[1], 1)), SupportLength(1));
    }

    #[test]
    fn p_0_and_p_1() {
        let b = BinaryComplex::random(Q, &[1, 2, 1, 1], 5);
        let ch = canon(&b);
        assert_eq!(build_p_k(&b, 0, &ch).unwrap(), b);
        assert_eq!(build_p_k(&b, 1, &ch).unwrap(), build_q(&b, &ch).unwrap());
    }

    #[test]
    fn s_n_vanishes_past_length() {
        let b = BinaryComplex::random(F7, &[1, 2], 3);
        let ch = canon(&b);
        for n in 3..6 {
            assert!(build_s_n(&b, n, &ch).unwrap().is_empty());
        }
        let e = shorten_to_len4(&b, &ch).unwrap();
        assert_eq!(e.len(), 1);
    }

    /// Exchanges the summands `J{n}` and `K{n}` in every degree.
    fn swap_jk(layout: &Layout, field: Field) -> Vec<(Matrix, Matrix)> {
        (0..=layout.top())
            .map(|deg| {
                let dim = layout.dims()[deg];
                let mut g = Matrix::zeros(field, dim, dim);
                for (name, d) in layout.blocks(deg) {
                    let (from, _) = layout.find(deg, name).unwrap();
                    let partner = match name.as_bytes()[0] {
                        b'J' => format!("K{}", &name[1..]),
                        b'K' => format!("J{}", &name[1..]),
                        _ => name.clone(),
                    };
                    let (to, pd) = layout.find(deg, &partner).unwrap_or((from, *d));
                    assert_eq!(pd, *d);
                    for i in 0..*d {
                        g.set(to + i, from + i, field.one());
                    }
                }
                (g.clone(), g)
            })
            .collect()
    }

    fn conjugate_by_swap(lb: &LabeledBinary) -> bool {
        let g = swap_jk(&lb.layout, lb.complex.field());
        lb.complex.top().change_basis(&g) == *lb.complex.bot()
    }

    #[test]
    fn diagonal_inputs_collapse() {
        let c = ChainComplex::random_acyclic(Q, &[2, 1, 2, 1], 9);
        let d = BinaryComplex::diagonal(&c).unwrap();
        let ch = canon(&d);
        let pc = Pieces::new(&d, &ch).unwrap();
        // The J and K summands are separate copies, so the two differentials
        // agree after exchanging them; alternating κ still multiplies to 1.
        for n in 1..=5 {
            let s = build_s(&pc, n).unwrap();
            assert!(conjugate_by_swap(&s));
            let s_j_free = pc.j(n) == 0 && (n < 3 || pc.j(n - 1) == 0);
            assert_eq!(s.complex.top() == s.complex.bot(), s_j_free);
        }
        assert!(kappa_expression(&shorten_to_len4(&d, &ch).unwrap()).unwrap().is_one());
        assert!(conjugate_by_swap(&build_p_prime_inner(&pc, 2).unwrap()));
        assert!(conjugate_by_swap(&build_hat_p_inner(&pc)));
        assert!(kappa_expression(&nenashev_form(&d, &ch).unwrap()).unwrap().is_one());
    }

    #[test]
    fn hat_p_dims() {
        let b = BinaryComplex::random(Q, &[1, 2, 1], 2);
        let hat = build_hat_p(&b, &canon(&b)).unwrap();
        assert_eq!(hat.dim(2), b.dim(2) + 2 * 2);
        assert_eq!(hat.dim(1), b.dim(1) + 2 * 2);
    }

    #[test]
    fn t_prime_low_degree() {
        let b = BinaryComplex::random(Q, &[2, 1, 1, 2], 4);
        let tp = build_t_prime(&b, &canon(&b)).unwrap();
        assert_eq!(tp.len(), 2);
        // J ⊕ P_0 ⊕ K ⊕ P_0 in degree 0.
        assert_eq!(tp.dim(0), 1 + 2 * b.dim(0) + 1);
        assert!(tp.is_valid());
    }

    #[test]
    fn iteration_matches_on_short_input() {
        let b = BinaryComplex::random(Q, &[1, 1, 1, 1], 6);
        let ch = canon(&b);
        let k = kappa(&b).unwrap();
        assert_eq!(kappa_expression(&nenashev_form_iterative(&b, &ch).unwrap()).unwrap(), k);
        assert_eq!(kappa_expression(&nenashev_form(&b, &ch).unwrap()).unwrap(), k);
    }

    fn fields() -> impl Strategy<Value = Field> {
        prop_oneof![Just(Q), Just(Field::Prime(3)), Just(F7), Just(Field::Prime(101))]
    }

    fn jdims() -> impl Strategy<Value = Vec<usize>> {
        proptest::collection::vec(0usize..=2, 0..6)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn s_n_sum_recovers_kappa(field in fields(), jd in jdims(), seed in any::<u64>(), random in any::<bool>()) {
            let b = BinaryComplex::random(field, &jd, seed);
            let ch = if random { ShorteningChoices::random(&b, seed ^ 1, 2).unwrap() } else { canon(&b) };
            let e = shorten_to_len4(&b, &ch).unwrap();
            for (_, t) in e.terms() {
                prop_assert!(t.is_valid());
                prop_assert!(t.len() <= 4);
            }
            prop_assert_eq!(kappa_expression(&e).unwrap(), kappa(&b).unwrap());
        }

        #[test]
        fn p_prime_identities(field in fields(), jd in jdims(), seed in any::<u64>()) {
            let b = BinaryComplex::random(field, &jd, seed);
            let ch = ShorteningChoices::random(&b, seed ^ 2, 2).unwrap();
            let kb = kappa(&b).unwrap();
            let pp = build_p_prime(&b, &ch, 2).unwrap();
            let s2 = build_s_n(&b, 2, &ch).unwrap();
            prop_assert_eq!(kappa(&s2).unwrap().mul(&kappa(&pp).unwrap().inv()), kb.clone());
            let pp1 = build_p_prime(&b, &ch, 1).unwrap();
            let s1 = build_s_n(&b, 1, &ch).unwrap();
            prop_assert_eq!(kappa(&s1).unwrap().mul(&kappa(&pp1).unwrap()), kb);
        }

        #[test]
        fn second_pipeline(field in fields(), jd in jdims(), seed in any::<u64>()) {
            let b = BinaryComplex::random(field, &jd, seed);
            let ch = ShorteningChoices::random(&b, seed ^ 3, 2).unwrap();
            let kb = kappa(&b).unwrap();
            prop_assert_eq!(kappa(&build_hat_p(&b, &ch).unwrap()).unwrap(), kb.clone());
            let q = build_q(&b, &ch).unwrap();
            prop_assert!(q.graded().support_length() <= support_length(&b).0.saturating_sub(1).max(2));
            let swap = BinaryComplex::swap_complex(field, b.validate().unwrap().0.jdim(1));
            prop_assert_eq!(kappa(&swap).unwrap().mul(&kappa(&q).unwrap().inv()), kb.clone());
            let t = build_t(&b, &ch).unwrap();
            let tp = build_t_prime(&b, &ch).unwrap();
            prop_assert!(tp.len() == 2);
            let kt = kappa(&t).unwrap();
            prop_assert_eq!(&kt, &kappa(&tp).unwrap());
            prop_assert_eq!(kt, kappa(&q).unwrap().mul(&kappa(&build_hat_p(&b, &ch).unwrap()).unwrap()));
        }

        #[test]
        fn p_k_family(field in fields(), jd in jdims(), seed in any::<u64>()) {
            let b = BinaryComplex::random(field, &jd, seed);
            let ch = canon(&b);
            let kb = kappa(&b).unwrap();
            let kk = support_length(&b).0;
            for k in 0..=kk + 1 {
                let pk = build_p_k(&b, k, &ch).unwrap();
                prop_assert!(pk.is_valid());
                prop_assert_eq!(kappa_expression(&x_form(&b, k, &ch).unwrap()).unwrap(), kb.clone());
                let next = build_p_k(&b, k + 1, &ch).unwrap();
                prop_assert_eq!(kappa(&build_q(&pk, &canon(&pk)).unwrap()).unwrap(), kappa(&next).unwrap());
                if k >= kk {
                    prop_assert_eq!(next.trimmed(), pk.flip().trimmed());
                }
            }
        }

        #[test]
        fn nenashev_form_properties(field in fields(), jd in jdims(), seed in any::<u64>()) {
            let b = BinaryComplex::random(field, &jd, seed);
            let ch = ShorteningChoices::random(&b, seed ^ 4, 2).unwrap();
            let e = nenashev_form(&b, &ch).unwrap();
            for (_, t) in e.terms() {
                prop_assert_eq!(t.len(), 2);
                prop_assert!(t.is_valid());
            }
            let kb = kappa(&b).unwrap();
            prop_assert_eq!(kappa_expression(&e).unwrap(), kb.clone());
            prop_assert_eq!(kappa_expression(&nenashev_form(&b.flip(), &canon(&b.flip())).unwrap()).unwrap(), kb.inv());
        }

        #[test]
        fn additivity(field in fields(), ja in jdims(), jb in jdims(), seed in any::<u64>()) {
            let a = BinaryComplex::random(field, &ja, seed);
            let c = BinaryComplex::random(field, &jb, seed ^ 5);
            let len = a.len().max(c.len());
            let (a, c) = (a.with_len(len), c.with_len(len));
            let s = a.direct_sum_b(&c).unwrap();
            let (cha, chc) = (ShorteningChoices::random(&a, seed ^ 6, 2).unwrap(), ShorteningChoices::random(&c, seed ^ 7, 2).unwrap());
            let chs = cha.direct_sum(&chc);
            for n in 2..=len.max(2) {
                let sa = build_s_n(&a, n, &cha).unwrap();
                let sc = build_s_n(&c, n, &chc).unwrap();
                let ss = build_s_n(&s, n, &chs).unwrap();
                prop_assert_eq!(kappa(&ss).unwrap(), kappa(&sa).unwrap().mul(&kappa(&sc).unwrap()));
                prop_assert_eq!(ss.dims().to_vec(), sa.direct_sum_b(&sc).unwrap().dims().to_vec());
            }
        }
    }
}
