//! Graded objects assembled from named summands, and differentials placed
//! block by block. Used to transcribe complexes given as diagrams of
//! direct sums.

use crate::binary::{BinaryComplex, BinaryDoubleComplex};
use crate::error::{Result, Side};
use crate::field::Field;
use crate::matrix::Matrix;

/// Ordered named summands in each degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    blocks: Vec<Vec<(String, usize)>>,
}

impl Layout {
    /// A layout with degrees `0..=top` and no summands yet.
    pub fn new(top: usize) -> Layout {
        Layout {
            blocks: vec![Vec::new(); top + 1],
        }
    }

    pub fn top(&self) -> usize {
        self.blocks.len() - 1
    }

    /// Appends a summand; zero-dimensional summands are kept.
    pub fn add(&mut self, degree: usize, name: impl Into<String>, dim: usize) {
        let name = name.into();
        assert!(
            !self.blocks[degree].iter().any(|(n, _)| *n == name),
            "duplicate summand {name} in degree {degree}"
        );
        self.blocks[degree].push((name, dim));
    }

    pub fn blocks(&self, degree: usize) -> &[(String, usize)] {
        &self.blocks[degree]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.iter().map(|x| x.1).sum()).collect()
    }

    /// Offset and dimension of a summand.
    pub fn find(&self, degree: usize, name: &str) -> Option<(usize, usize)> {
        let mut acc = 0;
        for (n, d) in &self.blocks[degree] {
            if n == name {
                return Some((acc, *d));
            }
            acc += d;
        }
        None
    }

    fn locate(&self, degree: usize, name: &str) -> (usize, usize) {
        self.find(degree, name)
            .unwrap_or_else(|| panic!("no summand {name} in degree {degree}"))
    }

    /// Coordinates of the summands kept by `keep`, degree by degree.
    pub fn coordinates(&self, keep: impl Fn(usize, &str) -> bool) -> Vec<Vec<usize>> {
        (0..self.blocks.len())
            .map(|deg| {
                let mut acc = 0;
                let mut out = Vec::new();
                for (n, d) in &self.blocks[deg] {
                    if keep(deg, n) {
                        out.extend(acc..acc + d);
                    }
                    acc += d;
                }
                out
            })
            .collect()
    }

    /// Same summands with every name prefixed.
    pub fn prefixed(&self, prefix: &str) -> Layout {
        Layout {
            blocks: self
                .blocks
                .iter()
                .map(|b| b.iter().map(|(n, d)| (format!("{prefix}{n}"), *d)).collect())
                .collect(),
        }
    }
}

/// Writes `m` (rows indexed by the concatenated `dst` summands, columns by
/// the concatenated `src` summands) into the block positions of `target`.
fn scatter(target: &mut Matrix, rows: &[(usize, usize)], cols: &[(usize, usize)], m: &Matrix) {
    let total_r: usize = rows.iter().map(|r| r.1).sum();
    let total_c: usize = cols.iter().map(|c| c.1).sum();
    assert_eq!(m.shape(), (total_r, total_c), "block map has the wrong shape");
    let mut r0 = 0;
    for &(ro, rd) in rows {
        let mut c0 = 0;
        for &(co, cd) in cols {
            for i in 0..rd {
                for j in 0..cd {
                    let x = m.get(r0 + i, c0 + j);
                    if !x.is_zero() {
                        let cur = target.get(ro + i, co + j);
                        target.set(ro + i, co + j, cur + x);
                    }
                }
            }
            c0 += cd;
        }
        r0 += rd;
    }
}

/// A binary complex under construction on a fixed [`Layout`].
#[derive(Clone, Debug)]
pub struct BinaryBuilder {
    field: Field,
    layout: Layout,
    top: Vec<Matrix>,
    bot: Vec<Matrix>,
}

impl BinaryBuilder {
    pub fn new(field: Field, layout: Layout) -> BinaryBuilder {
        let dims = layout.dims();
        let zeros: Vec<Matrix> = (1..dims.len())
            .map(|n| Matrix::zeros(field, dims[n - 1], dims[n]))
            .collect();
        BinaryBuilder {
            field,
            layout,
            top: zeros.clone(),
            bot: zeros,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Adds `m: ⊕src (degree) -> ⊕dst (degree - 1)` to one differential.
    pub fn arrow(&mut self, side: Side, degree: usize, src: &[&str], dst: &[&str], m: &Matrix) {
        assert!(
            degree >= 1 && degree <= self.layout.top(),
            "no differential out of degree {degree}"
        );
        let cols: Vec<_> = src.iter().map(|s| self.layout.locate(degree, s)).collect();
        let rows: Vec<_> = dst.iter().map(|s| self.layout.locate(degree - 1, s)).collect();
        let target = match side {
            Side::Top => &mut self.top[degree - 1],
            Side::Bottom => &mut self.bot[degree - 1],
        };
        scatter(target, &rows, &cols, m);
    }

    /// Identity from a summand onto the equally named summand one degree down.
    pub fn strap(&mut self, side: Side, degree: usize, src: &str, dst: &str) {
        let d = self.layout.locate(degree, src).1;
        self.arrow(side, degree, &[src], &[dst], &Matrix::identity(self.field, d));
    }

    pub fn build(self) -> LabeledBinary {
        let complex = BinaryComplex::new(self.field, self.layout.dims(), self.top, self.bot).expect("layout shapes");
        LabeledBinary {
            layout: self.layout,
            complex,
        }
    }
}

/// A binary complex together with the names of its summands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledBinary {
    pub layout: Layout,
    pub complex: BinaryComplex,
}

impl LabeledBinary {
    /// Restriction to the summands kept by `keep` (a sub-matrix in every degree).
    pub fn restrict(&self, keep: impl Fn(usize, &str) -> bool + Copy) -> LabeledBinary {
        let coords = self.layout.coordinates(keep);
        let mut layout = Layout::new(self.layout.top());
        for deg in 0..=self.layout.top() {
            for (n, d) in self.layout.blocks(deg) {
                if keep(deg, n) {
                    layout.add(deg, n.clone(), *d);
                }
            }
        }
        let pick = |side: Side| -> Vec<Matrix> {
            let c = self.complex.side(side);
            (1..=self.layout.top())
                .map(|n| c.d(n).select(&coords[n - 1], &coords[n]))
                .collect()
        };
        let complex = BinaryComplex::new(self.complex.field(), layout.dims(), pick(Side::Top), pick(Side::Bottom))
            .expect("restricted shapes");
        LabeledBinary { layout, complex }
    }

    /// Same complex with summands renamed.
    pub fn renamed(&self, rename: impl Fn(usize, &str) -> String) -> LabeledBinary {
        let mut layout = Layout::new(self.layout.top());
        for deg in 0..=self.layout.top() {
            for (n, d) in self.layout.blocks(deg) {
                layout.add(deg, rename(deg, n), *d);
            }
        }
        LabeledBinary {
            layout,
            complex: self.complex.clone(),
        }
    }

    /// Regrading up by `i` (no signs), with empty degrees below.
    pub fn raised(&self, i: usize) -> LabeledBinary {
        let mut layout = Layout::new(self.layout.top() + i);
        for deg in 0..=self.layout.top() {
            for (n, d) in self.layout.blocks(deg) {
                layout.add(deg + i, n.clone(), *d);
            }
        }
        LabeledBinary {
            layout,
            complex: self.complex.shift_b(i),
        }
    }

    /// Degreewise direct sum; summand names must not collide.
    pub fn direct_sum(&self, o: &LabeledBinary) -> LabeledBinary {
        let top = self.layout.top().max(o.layout.top());
        let mut layout = Layout::new(top);
        for deg in 0..=top {
            for part in [&self.layout, &o.layout] {
                if deg <= part.top() {
                    for (n, d) in part.blocks(deg) {
                        layout.add(deg, n.clone(), *d);
                    }
                }
            }
        }
        let complex = self
            .complex
            .with_len(top)
            .direct_sum_b(&o.complex.with_len(top))
            .expect("same field");
        LabeledBinary { layout, complex }
    }

    /// Keeps degrees `0..=top`; dropped degrees must vanish.
    pub fn truncate(&self, top: usize) -> LabeledBinary {
        let mut layout = Layout::new(top);
        for deg in 0..=top.min(self.layout.top()) {
            for (n, d) in self.layout.blocks(deg) {
                layout.add(deg, n.clone(), *d);
            }
        }
        LabeledBinary {
            layout,
            complex: self.complex.with_len(top),
        }
    }
}

/// Named summands at each position `(k, l)` of a bigraded object.
#[derive(Clone, Debug, Default)]
pub struct Cells {
    grid: Vec<Vec<Vec<(String, usize)>>>,
}

impl Cells {
    /// Positions `0..=width` by `0..=height`, all empty.
    pub fn new(width: usize, height: usize) -> Cells {
        Cells {
            grid: vec![vec![Vec::new(); height + 1]; width + 1],
        }
    }

    pub fn add(&mut self, k: usize, l: usize, name: impl Into<String>, dim: usize) {
        self.grid[k][l].push((name.into(), dim));
    }

    /// Puts degree `n` of `layout` at position `(n + shift, l)`, renaming summands.
    pub fn add_row(&mut self, l: usize, shift: usize, layout: &Layout, rename: impl Fn(&str) -> String) {
        for n in 0..=layout.top() {
            for (name, d) in layout.blocks(n) {
                self.add(n + shift, l, rename(name), *d);
            }
        }
    }
}

/// A binary double complex under construction; maps are added by summand name.
pub struct DoubleBuilder {
    field: Field,
    layouts: Vec<Vec<Layout>>,
    dims: Vec<Vec<usize>>,
    fams: [Vec<Vec<Matrix>>; 4],
}

/// Which of the four families of a double complex a map belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Horizontal(Side),
    Vertical(Side),
}

impl DoubleBuilder {
    pub fn new(field: Field, cells: Cells) -> DoubleBuilder {
        let cells = cells.grid;
        let kk = cells.len() - 1;
        let ll = cells[0].len() - 1;
        let layouts: Vec<Vec<Layout>> = cells
            .iter()
            .map(|col| {
                col.iter()
                    .map(|cell| {
                        let mut l = Layout::new(0);
                        for (n, d) in cell {
                            l.add(0, n.clone(), *d);
                        }
                        l
                    })
                    .collect()
            })
            .collect();
        let dims: Vec<Vec<usize>> = layouts
            .iter()
            .map(|c| c.iter().map(|l| l.dims()[0]).collect())
            .collect();
        let h: Vec<Vec<Matrix>> = (1..=kk)
            .map(|k| {
                (0..=ll)
                    .map(|l| Matrix::zeros(field, dims[k - 1][l], dims[k][l]))
                    .collect()
            })
            .collect();
        let v: Vec<Vec<Matrix>> = (0..=kk)
            .map(|k| {
                (1..=ll)
                    .map(|l| Matrix::zeros(field, dims[k][l - 1], dims[k][l]))
                    .collect()
            })
            .collect();
        DoubleBuilder {
            field,
            layouts,
            dims,
            fams: [h.clone(), v.clone(), h, v],
        }
    }

    /// Adds a map out of position `(k, l)` along the given family.
    pub fn arrow(&mut self, fam: Family, k: usize, l: usize, src: &[&str], dst: &[&str], m: &Matrix) {
        let (tk, tl, idx) = match fam {
            Family::Horizontal(s) => (k - 1, l, if s == Side::Top { 0 } else { 2 }),
            Family::Vertical(s) => (k, l - 1, if s == Side::Top { 1 } else { 3 }),
        };
        let cols: Vec<_> = src.iter().map(|s| self.layouts[k][l].locate(0, s)).collect();
        let rows: Vec<_> = dst.iter().map(|s| self.layouts[tk][tl].locate(0, s)).collect();
        let target = match fam {
            Family::Horizontal(_) => &mut self.fams[idx][k - 1][l],
            Family::Vertical(_) => &mut self.fams[idx][k][l - 1],
        };
        scatter(target, &rows, &cols, m);
    }

    /// Copies both differentials of `lb` into row `l`, shifted right by `shift`.
    pub fn add_row(&mut self, l: usize, shift: usize, lb: &LabeledBinary, rename: impl Fn(&str) -> String) {
        for n in 1..=lb.layout.top() {
            let src: Vec<String> = lb.layout.blocks(n).iter().map(|b| rename(&b.0)).collect();
            let dst: Vec<String> = lb.layout.blocks(n - 1).iter().map(|b| rename(&b.0)).collect();
            let src: Vec<&str> = src.iter().map(String::as_str).collect();
            let dst: Vec<&str> = dst.iter().map(String::as_str).collect();
            for side in [Side::Top, Side::Bottom] {
                self.arrow(
                    Family::Horizontal(side),
                    n + shift,
                    l,
                    &src,
                    &dst,
                    &lb.complex.side(side).d(n),
                );
            }
        }
    }

    /// Identity on a summand for both members of a family pair.
    pub fn strap_both(&mut self, vertical: bool, k: usize, l: usize, src: &str, dst: &str) {
        for side in [Side::Top, Side::Bottom] {
            let fam = if vertical {
                Family::Vertical(side)
            } else {
                Family::Horizontal(side)
            };
            self.strap(fam, k, l, src, dst);
        }
    }

    pub fn strap(&mut self, fam: Family, k: usize, l: usize, src: &str, dst: &str) {
        let d = self.layouts[k][l].locate(0, src).1;
        self.arrow(fam, k, l, &[src], &[dst], &Matrix::identity(self.field, d));
    }

    pub fn build(self) -> Result<BinaryDoubleComplex> {
        let [dh, dv, dph, dpv] = self.fams;
        BinaryDoubleComplex::new(self.field, self.dims, dh, dv, dph, dpv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rationals;

    #[test]
    fn arrows_land_in_blocks() {
        let mut l = Layout::new(1);
        l.add(0, "X", 1);
        l.add(0, "Y", 2);
        l.add(1, "Z", 1);
        l.add(1, "W", 0);
        let mut b = BinaryBuilder::new(Q, l);
        b.arrow(Side::Top, 1, &["Z"], &["Y"], &Matrix::from_i64(Q, 2, 1, &[5, 6]));
        b.arrow(Side::Top, 1, &["Z", "W"], &["X"], &Matrix::from_i64(Q, 1, 1, &[7]));
        let lb = b.build();
        assert_eq!(lb.complex.top().d(1), Matrix::from_i64(Q, 3, 1, &[7, 5, 6]));
        assert!(lb.complex.bot().d(1).is_zero());
        let r = lb.restrict(|deg, n| !(deg == 0 && n == "X"));
        assert_eq!(r.complex.top().d(1), Matrix::from_i64(Q, 2, 1, &[5, 6]));
        assert_eq!(r.layout.find(0, "Y"), Some((0, 2)));
    }
}
