//! Torsion of acyclic complexes and the invariant `κ` of binary complexes.
//!
//! `τ(c)` is the determinant of `d + h` restricted to odd degrees and
//! landing in even degrees, for a contraction `h`, in the standard bases
//! ordered by ascending degree. `κ(b) = τ(top) / τ(bot)`.

use std::fmt;

use crate::binary::{BinaryComplex, BinaryDoubleComplex, NenashevExpression};
use crate::chain::{ChainComplex, Factorization};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::random;

/// Maps `h_n: P_n -> P_{n+1}`, `n = 0..m-1`, with `d h + h d = id`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contraction {
    pub h: Vec<Matrix>,
}

/// A nonzero field element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorsionValue(Scalar);

impl TorsionValue {
    fn new(x: Scalar) -> TorsionValue {
        assert!(!x.is_zero(), "torsion is never zero");
        TorsionValue(x)
    }

    pub fn one(field: Field) -> TorsionValue {
        TorsionValue(field.one())
    }

    pub fn value(&self) -> &Scalar {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn mul(&self, o: &TorsionValue) -> TorsionValue {
        TorsionValue(&self.0 * &o.0)
    }

    pub fn inv(&self) -> TorsionValue {
        TorsionValue(self.0.inv().expect("nonzero"))
    }

    pub fn pow_sign(&self, sign: i64) -> TorsionValue {
        if sign < 0 {
            self.inv()
        } else {
            self.clone()
        }
    }
}

impl fmt::Display for TorsionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Contraction {
    pub fn h(&self, n: usize) -> &Matrix {
        &self.h[n]
    }

    /// Checks `d_{n+1} h_n + h_{n-1} d_n = id` in every degree.
    pub fn verify(&self, c: &ChainComplex) -> bool {
        let m = c.len();
        if self.h.len() != m {
            return false;
        }
        (0..=m).all(|n| {
            let mut acc = Matrix::zeros(c.field(), c.dim(n), c.dim(n));
            if n < m {
                acc = &acc + &(&c.d(n + 1) * &self.h[n]);
            }
            if n >= 1 {
                acc = &acc + &(&self.h[n - 1] * &c.d(n));
            }
            acc == Matrix::identity(c.field(), c.dim(n))
        })
    }
}

/// Standard basis vectors completing the columns of `i` to a basis: the
/// coordinates that are not pivots of the reduced transpose.
fn echelon_complement(i: &Matrix) -> Matrix {
    let p = i.rows();
    let (_, pivots) = i.transpose().rref();
    let free: Vec<usize> = (0..p).filter(|c| !pivots.contains(c)).collect();
    let mut e = Matrix::zeros(i.field(), p, free.len());
    for (t, &c) in free.iter().enumerate() {
        e.set(c, t, i.field().one());
    }
    e
}

/// Assembles `h` from complements `E_n` of `J_n` in `P_n`: the section
/// `s_n = E_n (q_n E_n)^{-1}` of `q_n`, retractions `r_n` read off
/// `[i_n | s_n]^{-1}`, and `h_{n-1} = s_n r_{n-1}`.
fn contraction_from_complements(c: &ChainComplex, f: &Factorization, comps: &[Matrix]) -> Result<Contraction> {
    let m = c.len();
    let field = c.field();
    let mut sections = Vec::with_capacity(m + 1);
    let mut retractions = Vec::with_capacity(m + 1);
    for n in 0..=m {
        let e = &comps[n];
        let s = if n == 0 {
            Matrix::zeros(field, c.dim(0), 0)
        } else {
            e * &(f.q(n) * e).inverse()?
        };
        let basis = Matrix::hstack(field, c.dim(n), &[f.i(n), &s])?;
        let inv = basis.inverse()?;
        retractions.push(inv.submatrix(0, f.jdim(n), 0, c.dim(n)));
        sections.push(s);
    }
    let h = (1..=m).map(|n| &sections[n] * &retractions[n - 1]).collect();
    Ok(Contraction { h })
}

/// The canonical contraction built from echelon complements.
pub fn contraction(c: &ChainComplex) -> Result<Contraction> {
    let f = c.factorize()?;
    let comps: Vec<Matrix> = (0..=c.len()).map(|n| echelon_complement(f.i(n))).collect();
    contraction_from_complements(c, &f, &comps)
}

/// A contraction from randomly drawn complements of each `J_n`.
pub fn random_contraction(c: &ChainComplex, seed: u64) -> Result<Contraction> {
    let f = c.factorize()?;
    let mut rng = random::rng(seed);
    let field = c.field();
    let comps: Vec<Matrix> = (0..=c.len())
        .map(|n| {
            let (p, j) = (c.dim(n), f.jdim(n));
            loop {
                let e = random::matrix(field, p, p - j, &mut rng);
                let full = Matrix::hstack(field, p, &[f.i(n), &e]).expect("shapes");
                if full.is_surjective() {
                    break e;
                }
            }
        })
        .collect();
    contraction_from_complements(c, &f, &comps)
}

/// `h + (d σ - σ d)` for a random `σ` of degree +2, which is again a contraction.
pub fn perturb_contraction(c: &ChainComplex, h: &Contraction, seed: u64) -> Contraction {
    let m = c.len();
    let field = c.field();
    let mut rng = random::rng(seed);
    let sigma: Vec<Matrix> = (0..=m)
        .map(|n| random::matrix(field, c.dim(n + 2), c.dim(n), &mut rng))
        .collect();
    let h = (0..m)
        .map(|n| {
            // (dσ)_n = d_{n+2} σ_n and (σd)_n = σ_{n-1} d_n, both P_n -> P_{n+1}.
            let mut x = &h.h[n] + &(&c.d(n + 2) * &sigma[n]);
            if n >= 1 {
                x = &x - &(&sigma[n - 1] * &c.d(n));
            }
            x
        })
        .collect();
    Contraction { h }
}

/// `det(d + h)` from odd degrees to even degrees.
pub fn torsion_with(c: &ChainComplex, h: &Contraction) -> Result<TorsionValue> {
    let m = c.len();
    let offsets = |parity: usize| -> Vec<Option<usize>> {
        let mut acc = 0;
        (0..=m + 1)
            .map(|n| {
                if n % 2 == parity {
                    let o = acc;
                    acc += c.dim(n);
                    Some(o)
                } else {
                    None
                }
            })
            .collect()
    };
    let even = offsets(0);
    let odd = offsets(1);
    let rows: usize = (0..=m).filter(|n| n % 2 == 0).map(|n| c.dim(n)).sum();
    let cols: usize = (0..=m).filter(|n| n % 2 == 1).map(|n| c.dim(n)).sum();
    let mut a = Matrix::zeros(c.field(), rows, cols);
    for n in (1..=m).step_by(2) {
        let col = odd[n].expect("odd degree");
        a.paste(even[n - 1].expect("even degree"), col, &c.d(n));
        if n < m {
            a.paste(even[n + 1].expect("even degree"), col, &h.h[n]);
        }
    }
    let det = a.det()?;
    if det.is_zero() {
        return Err(Error::InvalidContraction { degree: 0 });
    }
    Ok(TorsionValue::new(det))
}

pub fn milnor_torsion(c: &ChainComplex) -> Result<TorsionValue> {
    torsion_with(c, &contraction(c)?)
}

pub fn kappa(b: &BinaryComplex) -> Result<TorsionValue> {
    b.validate()?;
    let t = milnor_torsion(b.top())?;
    let s = milnor_torsion(b.bot())?;
    Ok(t.mul(&s.inv()))
}

/// `Π κ(term)^sign`; the empty expression evaluates to 1.
pub fn kappa_expression(e: &NenashevExpression) -> Result<TorsionValue> {
    let mut acc = TorsionValue::one(e.field());
    for (sign, b) in e.terms() {
        acc = acc.mul(&kappa(b)?.pow_sign(*sign as i64));
    }
    Ok(acc)
}

/// Alternating products of `κ` over rows and over columns.
pub fn nenashev_sides(d: &BinaryDoubleComplex) -> Result<(TorsionValue, TorsionValue)> {
    d.validate()?;
    let mut rows = TorsionValue::one(d.field());
    for l in 0..=d.height() {
        rows = rows.mul(&kappa(&d.row(l))?.pow_sign(if l % 2 == 0 { 1 } else { -1 }));
    }
    let mut cols = TorsionValue::one(d.field());
    for k in 0..=d.width() {
        cols = cols.mul(&kappa(&d.column(k))?.pow_sign(if k % 2 == 0 { 1 } else { -1 }));
    }
    Ok((rows, cols))
}

pub fn check_nenashev_relation(d: &BinaryDoubleComplex) -> Result<bool> {
    let (rows, cols) = nenashev_sides(d)?;
    Ok(rows == cols)
}

/// `κ(b[i]) = κ(Σ^i b) = κ(b)^{(-1)^i}`.
pub fn check_shift_law(b: &BinaryComplex, i: usize) -> Result<bool> {
    let k = kappa(b)?.pow_sign(if i.is_multiple_of(2) { 1 } else { -1 });
    Ok(kappa(&b.shift_b(i))? == k && kappa(&b.suspend_b(i))? == k)
}

/// `κ(swap J)^2 = 1`.
pub fn check_order_two(field: Field, j: usize) -> bool {
    let k = kappa(&BinaryComplex::swap_complex(field, j)).expect("swap complex is valid");
    k.mul(&k).is_one()
}
