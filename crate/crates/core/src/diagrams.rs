//! Hand-transcribed binary double complexes used to cross-check the
//! reductions through Nenashev's relation.
//!
//! Positions are `(k, l)` with horizontal maps lowering `k` and vertical
//! maps lowering `l`; the topmost row of a drawing has the largest `l`.
//! Unlabeled single arrows are identities on equally named summands.

use crate::binary::{BinaryComplex, BinaryDoubleComplex};
use crate::error::{Error, Result, Side};
use crate::field::Field;
use crate::heller::ExtensionWitness;
use crate::layout::{BinaryBuilder, Cells, DoubleBuilder, Family, LabeledBinary, Layout};
use crate::matrix::Matrix;
use crate::reduce::{
    build_hat_p_inner, build_p_prime_inner, build_s, img, other, witness_maps, Pieces, ShorteningChoices,
};

fn swap(field: Field, j: usize) -> Matrix {
    let mut t = Matrix::zeros(field, 2 * j, 2 * j);
    t.paste(0, j, &Matrix::identity(field, j));
    t.paste(j, 0, &Matrix::identity(field, j));
    t
}

/// The square on `J ⊕ J`: row 1 is `(τ, id)`, row 0 is `(τ, τ)`, column 1
/// is `(τ, τ)` and column 0 is `(τ, id)`, written as (top, bottom).
pub fn order_two_square(field: Field, j: usize) -> Result<BinaryDoubleComplex> {
    let mut cells = Cells::new(1, 1);
    for k in 0..2 {
        for l in 0..2 {
            cells.add(k, l, "JJ", 2 * j);
        }
    }
    let (tau, id) = (swap(field, j), Matrix::identity(field, 2 * j));
    let mut db = DoubleBuilder::new(field, cells);
    let arrows = [
        (Family::Horizontal(Side::Top), 1, 1, &tau),
        (Family::Horizontal(Side::Bottom), 1, 1, &id),
        (Family::Horizontal(Side::Top), 1, 0, &tau),
        (Family::Horizontal(Side::Bottom), 1, 0, &tau),
        (Family::Vertical(Side::Top), 1, 1, &tau),
        (Family::Vertical(Side::Bottom), 1, 1, &tau),
        (Family::Vertical(Side::Top), 0, 1, &tau),
        (Family::Vertical(Side::Bottom), 0, 1, &id),
    ];
    for (fam, k, l, m) in arrows {
        db.arrow(fam, k, l, &["JJ"], &["JJ"], m);
    }
    db.build()
}

/// `b` with summand `P{n}` in degree `n`, padded to degrees `0..=top`.
fn labeled_input(pc: &Pieces, top: usize) -> LabeledBinary {
    let mut layout = Layout::new(top);
    for n in 0..=top {
        layout.add(n, format!("P{n}"), pc.p(n));
    }
    let mut bb = BinaryBuilder::new(pc.field, layout);
    for side in [Side::Top, Side::Bottom] {
        for n in 1..=top {
            bb.arrow(side, n, &[&format!("P{n}")], &[&format!("P{}", n - 1)], &pc.d(side, n));
        }
    }
    bb.build()
}

/// The five-row diagram relating `b`, `P'[1]` and `S_2`:
///
/// ```text
///  l=4                       A2        A2
///  l=3  ... P4   P3+A2       J2+K2+S2  B2
///  l=2  ... P4   P3          P2+B2     P1+B2   P0
///  l=1                       P1        P1+P0   P0
///  l=0                       P0        P0
/// ```
///
/// Row 1 is `P1 -> P1 ⊕ P0 -> P0` with maps `(id, d_1)` and `d_1 - id`
/// (primed on the bottom); column 2 is `S_2`.
pub fn shortening_diagram(b: &BinaryComplex, choices: &ShorteningChoices) -> Result<BinaryDoubleComplex> {
    let pc = Pieces::new(b, choices)?;
    let field = pc.field;
    let w = pc.witness(2)?;
    let pp = build_p_prime_inner(&pc, 2)?;
    let width = b.len().max(3);
    let input = labeled_input(&pc, width);
    let mut cells = Cells::new(width, 4);
    cells.add(3, 4, "A2", w.dim_a);
    cells.add(2, 4, "A2", w.dim_a);
    cells.add_row(3, 1, &pp.layout, str::to_string);
    cells.add_row(2, 0, &input.layout, str::to_string);
    cells.add(2, 2, "B2", w.dim_b);
    cells.add(1, 2, "B2", w.dim_b);
    cells.add(2, 1, "P1", pc.p(1));
    cells.add(1, 1, "P1", pc.p(1));
    cells.add(1, 1, "P0", pc.p(0));
    cells.add(0, 1, "P0", pc.p(0));
    cells.add(2, 0, "P0", pc.p(0));
    cells.add(1, 0, "P0", pc.p(0));
    let mut db = DoubleBuilder::new(field, cells);

    db.strap_both(false, 3, 4, "A2", "A2");
    db.add_row(3, 1, &pp, str::to_string);
    db.add_row(2, 0, &input, str::to_string);
    db.strap_both(false, 2, 2, "B2", "B2");
    let (p0, p1) = (pc.p(0), pc.p(1));
    for side in [Side::Top, Side::Bottom] {
        let d1 = pc.d(side, 1);
        let into = Matrix::vstack(field, p1, &[&Matrix::identity(field, p1), &d1])?;
        db.arrow(Family::Horizontal(side), 2, 1, &["P1"], &["P1", "P0"], &into);
        let out = Matrix::hstack(field, p0, &[&d1, &-&Matrix::identity(field, p0)])?;
        db.arrow(Family::Horizontal(side), 1, 1, &["P1", "P0"], &["P0"], &out);
    }
    db.strap_both(false, 2, 0, "P0", "P0");

    for side in [Side::Top, Side::Bottom] {
        let v = Family::Vertical(side);
        let (am, bm) = witness_maps(&w, side);
        let (inc, own) = (img(side, 2), img(other(side), 2));
        db.arrow(v, 2, 4, &["A2"], &[&own, "S2"], am);
        db.arrow(v, 2, 3, &[&inc], &["P2"], &pc.i(side, 2));
        db.arrow(v, 2, 3, &[&own, "S2"], &["B2"], bm);
        db.arrow(v, 2, 2, &["P2"], &["P1"], &pc.d(side, 2));
        db.arrow(v, 2, 1, &["P1"], &["P0"], &pc.d(side, 1));
    }
    db.strap_both(true, 1, 3, "B2", "B2");
    db.strap_both(true, 1, 2, "P1", "P1");
    db.strap_both(true, 1, 1, "P0", "P0");
    db.strap_both(true, 0, 2, "P0", "P0");
    db.strap_both(true, 3, 4, "A2", "A2");
    db.strap_both(true, 3, 3, "P3", "P3");
    for t in 4..=width {
        db.strap_both(true, t, 3, &format!("P{t}"), &format!("P{t}"));
    }
    db.build()
}

/// The two-row diagram comparing two witnesses at degree `k >= 2`: the
/// upper row is `S'_k ⊕ S_{k+1}[2]`, the lower `S_k ⊕ S'_{k+1}[2]`, where
/// primes mark the alternative witness. The vertical maps are identities
/// except on the two copies of `K_k` (top) and of `J_k` (bottom), which
/// they exchange.
pub fn split_diagram(
    b: &BinaryComplex,
    choices: &ShorteningChoices,
    k: usize,
    alternative: &ExtensionWitness,
) -> Result<BinaryDoubleComplex> {
    if k < 2 {
        return Err(Error::TooShort { found: k, need: 2 });
    }
    let pc = Pieces::new(b, choices)?;
    let mut alt_choices = choices.clone();
    if alt_choices.witnesses.len() <= k {
        return Err(Error::InvalidWitness(format!("no witness at degree {k}")));
    }
    alt_choices.witnesses[k] = alternative.clone();
    let alt = Pieces::new(b, &alt_choices)?;

    // Copies of J_k, K_k are told apart by their position in S_k (high)
    // or S_{k+1} (low); objects of the alternative witness get a prime.
    let rename = |n: usize, primed: bool| {
        move |_: usize, name: &str| -> String {
            let (jk, kk) = (format!("J{k}"), format!("K{k}"));
            if name == jk || name == kk {
                let pos = if n == k { "hi" } else { "lo" };
                return format!("{pos}.{}", &name[..1]);
            }
            let own = [format!("A{k}"), format!("B{k}"), format!("S{k}")];
            if primed && own.contains(&name.to_string()) {
                return format!("{name}'");
            }
            name.to_string()
        }
    };
    let upper = build_s(&alt, k)?
        .renamed(rename(k, true))
        .direct_sum(&build_s(&pc, k + 1)?.renamed(rename(k + 1, false)).raised(2));
    let lower = build_s(&pc, k)?
        .renamed(rename(k, false))
        .direct_sum(&build_s(&alt, k + 1)?.renamed(rename(k + 1, true)).raised(2));

    let width = upper.layout.top();
    let mut cells = Cells::new(width, 1);
    cells.add_row(1, 0, &upper.layout, str::to_string);
    cells.add_row(0, 0, &lower.layout, str::to_string);
    let mut db = DoubleBuilder::new(pc.field, cells);
    db.add_row(1, 0, &upper, str::to_string);
    db.add_row(0, 0, &lower, str::to_string);
    for deg in 0..=width {
        for (name, _) in upper.layout.blocks(deg) {
            for (side, letter) in [(Side::Top, "K"), (Side::Bottom, "J")] {
                let target = match name.as_str() {
                    x if x == format!("hi.{letter}") => format!("lo.{letter}"),
                    x if x == format!("lo.{letter}") => format!("hi.{letter}"),
                    x => x.to_string(),
                };
                db.strap(Family::Vertical(side), deg, 1, name, &target);
            }
        }
    }
    db.build()
}

/// The four-row diagram showing `[P̂] = [P]`:
///
/// ```text
///  l=3                 A            A
///  l=2  ... P3  P2+A+J'+K'   J+K+S+J'+K'   B
///  l=1  ... P3  P2+J+K       J+P1+K+B      P0+B
///  l=0                       P0            P0
/// ```
///
/// Row 2 is `P' ⊕ Δ_J[1] ⊕ Δ_K[1]` (the diagonal copies primed), row 1 is
/// `P̂ ⊕ Δ_B`, and column 1 is `S ⊕ Δ_J ⊕ Δ_K` built from the witness at
/// degree 1.
pub fn hat_p_diagram(b: &BinaryComplex, choices: &ShorteningChoices) -> Result<BinaryDoubleComplex> {
    let pc = Pieces::new(b, choices)?;
    let field = pc.field;
    let w = pc.witness(1)?;
    let pp = build_p_prime_inner(&pc, 1)?;
    let hat = build_hat_p_inner(&pc);
    let width = pp.layout.top().max(hat.layout.top());
    let (j, kd) = (pc.j(1), pc.k(1));
    let mut cells = Cells::new(width, 3);
    cells.add(2, 3, "A1", w.dim_a);
    cells.add(1, 3, "A1", w.dim_a);
    cells.add_row(2, 0, &pp.layout, str::to_string);
    for k in 1..=2 {
        cells.add(k, 2, "J1'", j);
        cells.add(k, 2, "K1'", kd);
    }
    cells.add_row(1, 0, &hat.layout, str::to_string);
    cells.add(1, 1, "B1", w.dim_b);
    cells.add(0, 1, "B1", w.dim_b);
    cells.add(1, 0, "P0", pc.p(0));
    cells.add(0, 0, "P0", pc.p(0));
    let mut db = DoubleBuilder::new(field, cells);

    db.strap_both(false, 2, 3, "A1", "A1");
    db.add_row(2, 0, &pp, str::to_string);
    db.strap_both(false, 2, 2, "J1'", "J1'");
    db.strap_both(false, 2, 2, "K1'", "K1'");
    db.add_row(1, 0, &hat, str::to_string);
    db.strap_both(false, 1, 1, "B1", "B1");
    db.strap_both(false, 1, 0, "P0", "P0");

    db.strap_both(true, 2, 3, "A1", "A1");
    db.strap_both(true, 2, 2, "P2", "P2");
    db.strap_both(true, 2, 2, "J1'", "J1");
    db.strap_both(true, 2, 2, "K1'", "K1");
    for t in 3..=width {
        db.strap_both(true, t, 2, &format!("P{t}"), &format!("P{t}"));
    }
    for side in [Side::Top, Side::Bottom] {
        let v = Family::Vertical(side);
        let (am, bm) = witness_maps(&w, side);
        let (inc, own) = (img(side, 1), img(other(side), 1));
        db.arrow(v, 1, 3, &["A1"], &[&own, "S1"], am);
        db.strap(v, 1, 2, &inc, &inc);
        db.arrow(v, 1, 2, &[&format!("{inc}'")], &["P1"], &pc.i(side, 1));
        db.strap(v, 1, 2, &format!("{own}'"), &own);
        db.arrow(v, 1, 2, &[&own, "S1"], &["B1"], bm);
        db.arrow(v, 1, 1, &["P1"], &["P0"], &pc.d(side, 1));
    }
    db.strap_both(true, 0, 2, "B1", "B1");
    db.strap_both(true, 0, 1, "P0", "P0");
    db.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heller::random_witness;
    use crate::reduce::{build_p_prime, build_s_n};
    use crate::torsion::{check_nenashev_relation, kappa};
    use proptest::prelude::*;

    const Q: Field = Field::Rationals;

    #[test]
    fn order_two_square_relation() {
        for field in [Q, Field::Prime(7)] {
            for j in 0..4 {
                let d = order_two_square(field, j).unwrap();
                d.validate().unwrap();
                assert!(check_nenashev_relation(&d).unwrap());
                assert_eq!(
                    d.row(0),
                    BinaryComplex::diagonal_object(field, 2 * j).flip().change_basis(&[
                        (swap(field, j), swap(field, j)),
                        (Matrix::identity(field, 2 * j), Matrix::identity(field, 2 * j)),
                    ])
                );
            }
        }
    }

    #[test]
    fn shortening_diagram_rows_and_columns() {
        let b = BinaryComplex::random(Q, &[1, 2, 1, 1], 8);
        let ch = ShorteningChoices::random(&b, 3, 2).unwrap();
        let d = shortening_diagram(&b, &ch).unwrap();
        d.validate().unwrap();
        // Column 2 is S_2 with B_2 and P_2 listed in the other order.
        let s2 = build_s_n(&b, 2, &ch).unwrap();
        assert_eq!(d.column(2).dims(), s2.dims());
        assert_eq!(kappa(&d.column(2)).unwrap(), kappa(&s2).unwrap());
        assert_eq!(
            d.row(3).trimmed(),
            build_p_prime(&b, &ch, 2).unwrap().shift_b(1).trimmed()
        );
        assert!(check_nenashev_relation(&d).unwrap());
    }

    /// Negates the first nonzero entry of a horizontal top map.
    pub(crate) fn corrupt(d: &BinaryDoubleComplex) -> Option<BinaryDoubleComplex> {
        let mut dh = d.dh().to_vec();
        for col in dh.iter_mut() {
            for m in col.iter_mut() {
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        let x = m.get(i, j);
                        if !x.is_zero() {
                            m.set(i, j, -x);
                            return BinaryDoubleComplex::new(
                                d.field(),
                                d.dims().to_vec(),
                                dh,
                                d.dv().to_vec(),
                                d.dph().to_vec(),
                                d.dpv().to_vec(),
                            )
                            .ok();
                        }
                    }
                }
            }
        }
        None
    }

    #[test]
    fn corrupted_diagram_fails() {
        let b = BinaryComplex::random(Q, &[1, 1, 1], 2);
        let ch = ShorteningChoices::canonical(&b).unwrap();
        let d = hat_p_diagram(&b, &ch).unwrap();
        assert!(check_nenashev_relation(&d).unwrap());
        let bad = corrupt(&d).unwrap();
        assert!(bad.validate().is_err() || !check_nenashev_relation(&bad).unwrap());
        assert!(kappa(&b).is_ok());
    }

    fn fields() -> impl Strategy<Value = Field> {
        prop_oneof![
            Just(Q),
            Just(Field::Prime(3)),
            Just(Field::Prime(7)),
            Just(Field::Prime(101))
        ]
    }

    fn jdims() -> impl Strategy<Value = Vec<usize>> {
        proptest::collection::vec(0usize..=2, 0..6)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn diagrams_satisfy_relation(field in fields(), jd in jdims(), seed in any::<u64>()) {
            let b = BinaryComplex::random(field, &jd, seed);
            let ch = ShorteningChoices::random(&b, seed ^ 11, 2).unwrap();
            let d = shortening_diagram(&b, &ch).unwrap();
            prop_assert!(d.validate().is_ok());
            prop_assert!(check_nenashev_relation(&d).unwrap());
            let d = hat_p_diagram(&b, &ch).unwrap();
            prop_assert!(d.validate().is_ok());
            prop_assert!(check_nenashev_relation(&d).unwrap());
        }

        #[test]
        fn split_diagram_relation(field in fields(), jd in jdims(), seed in any::<u64>(), s in 0usize..3) {
            let b = BinaryComplex::random(field, &jd, seed);
            let ch = ShorteningChoices::random(&b, seed ^ 12, 1).unwrap();
            let (jf, kf) = b.validate().unwrap();
            for k in 2..=b.len() {
                let alt = random_witness(field, jf.jdim(k), kf.jdim(k), s, seed ^ k as u64).unwrap();
                let d = split_diagram(&b, &ch, k, &alt).unwrap();
                prop_assert!(d.validate().is_ok());
                prop_assert!(check_nenashev_relation(&d).unwrap());
            }
        }
    }
}
