//! JSON wire formats.
//!
//! Matrices are arrays of rows, rows index the target and columns the
//! source, and every entry is a string in the scalar text encoding (`"3/2"`,
//! `"-1"` over `Q`; a residue such as `"5"` over `F7`). The field is written
//! as `"Q"` or `"F<p>"`.
//!
//! A complex file stores `top[i] = d_{i+1}`, of shape `dims[i] x dims[i+1]`.
//! A double complex file stores `dims[k][l]`, horizontal maps
//! `dh[k-1][l]: (k,l) -> (k-1,l)` and vertical maps `dv[k][l-1]: (k,l) -> (k,l-1)`;
//! `dph`, `dpv` are the bottom differentials.

use std::path::Path;

use bincx_core::binary::{BinaryComplex, BinaryDoubleComplex};
use bincx_core::field::Field;
use bincx_core::matrix::Matrix;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub type MatrixText = Vec<Vec<String>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub field: String,
    pub dims: Vec<usize>,
    pub top: Vec<MatrixText>,
    pub bot: Vec<MatrixText>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleComplexFile {
    pub field: String,
    pub dims: Vec<Vec<usize>>,
    pub dh: Vec<Vec<MatrixText>>,
    pub dv: Vec<Vec<MatrixText>>,
    pub dph: Vec<Vec<MatrixText>>,
    pub dpv: Vec<Vec<MatrixText>>,
}

/// One term of a shortening manifest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestTerm {
    pub file: String,
    pub sign: i8,
    pub kappa: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub field: String,
    pub target: String,
    pub witnesses: String,
    pub seed: u64,
    pub input_kappa: String,
    pub terms: Vec<ManifestTerm>,
    pub expression_kappa: String,
    pub identity_holds: bool,
}

pub fn emit_matrix(m: &Matrix) -> MatrixText {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(|x| x.encode()).collect())
        .collect()
}

/// Parses a matrix of known shape; `what` locates errors.
pub fn parse_matrix(field: Field, text: &MatrixText, rows: usize, cols: usize, what: &str) -> Result<Matrix, String> {
    if text.len() != rows {
        return Err(format!("{what}: expected {rows} rows, found {}", text.len()));
    }
    let mut m = Matrix::zeros(field, rows, cols);
    for (i, row) in text.iter().enumerate() {
        if row.len() != cols {
            return Err(format!("{what}: row {i} has {} entries, expected {cols}", row.len()));
        }
        for (j, entry) in row.iter().enumerate() {
            let x = field.parse(entry).map_err(|e| format!("{what}[{i}][{j}]: {e}"))?;
            m.set(i, j, x);
        }
    }
    Ok(m)
}

fn parse_field(text: &str) -> Result<Field, String> {
    text.parse::<Field>().map_err(|e| format!("field: {e}"))
}

impl ComplexFile {
    pub fn from_complex(b: &BinaryComplex) -> ComplexFile {
        let emit = |side: &bincx_core::chain::ChainComplex| side.diffs().iter().map(emit_matrix).collect();
        ComplexFile {
            field: b.field().to_string(),
            dims: b.dims().to_vec(),
            top: emit(b.top()),
            bot: emit(b.bot()),
        }
    }

    pub fn to_complex(&self) -> Result<BinaryComplex, String> {
        let field = parse_field(&self.field)?;
        if self.dims.is_empty() {
            return Err("dims: empty".into());
        }
        let m = self.dims.len() - 1;
        let parse = |name: &str, mats: &[MatrixText]| -> Result<Vec<Matrix>, String> {
            if mats.len() != m {
                return Err(format!("{name}: expected {m} matrices, found {}", mats.len()));
            }
            (1..=m)
                .map(|n| {
                    parse_matrix(
                        field,
                        &mats[n - 1],
                        self.dims[n - 1],
                        self.dims[n],
                        &format!("{name}[{}]", n - 1),
                    )
                })
                .collect()
        };
        let top = parse("top", &self.top)?;
        let bot = parse("bot", &self.bot)?;
        BinaryComplex::new(field, self.dims.clone(), top, bot).map_err(|e| e.to_string())
    }
}

impl DoubleComplexFile {
    pub fn from_double(d: &BinaryDoubleComplex) -> DoubleComplexFile {
        let emit = |fam: &[Vec<Matrix>]| fam.iter().map(|c| c.iter().map(emit_matrix).collect()).collect();
        DoubleComplexFile {
            field: d.field().to_string(),
            dims: d.dims().to_vec(),
            dh: emit(d.dh()),
            dv: emit(d.dv()),
            dph: emit(d.dph()),
            dpv: emit(d.dpv()),
        }
    }

    pub fn to_double(&self) -> Result<BinaryDoubleComplex, String> {
        let field = parse_field(&self.field)?;
        let dims = &self.dims;
        if dims.is_empty() || dims[0].is_empty() || dims.iter().any(|c| c.len() != dims[0].len()) {
            return Err("dims: expected a nonempty rectangular table".into());
        }
        let (kk, ll) = (dims.len() - 1, dims[0].len() - 1);
        let horizontal = |name: &str, fam: &[Vec<MatrixText>]| -> Result<Vec<Vec<Matrix>>, String> {
            if fam.len() != kk || fam.iter().any(|c| c.len() != ll + 1) {
                return Err(format!("{name}: expected {kk} x {} matrices", ll + 1));
            }
            (1..=kk)
                .map(|k| {
                    (0..=ll)
                        .map(|l| {
                            let what = format!("{name}[{}][{l}]", k - 1);
                            parse_matrix(field, &fam[k - 1][l], dims[k - 1][l], dims[k][l], &what)
                        })
                        .collect()
                })
                .collect()
        };
        let vertical = |name: &str, fam: &[Vec<MatrixText>]| -> Result<Vec<Vec<Matrix>>, String> {
            if fam.len() != kk + 1 || fam.iter().any(|c| c.len() != ll) {
                return Err(format!("{name}: expected {} x {ll} matrices", kk + 1));
            }
            (0..=kk)
                .map(|k| {
                    (1..=ll)
                        .map(|l| {
                            let what = format!("{name}[{k}][{}]", l - 1);
                            parse_matrix(field, &fam[k][l - 1], dims[k][l - 1], dims[k][l], &what)
                        })
                        .collect()
                })
                .collect()
        };
        BinaryDoubleComplex::new(
            field,
            dims.clone(),
            horizontal("dh", &self.dh)?,
            vertical("dv", &self.dv)?,
            horizontal("dph", &self.dph)?,
            vertical("dpv", &self.dpv)?,
        )
        .map_err(|e| e.to_string())
    }
}

/// Pretty JSON with a trailing newline; output depends only on the value.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn read_complex(path: &Path) -> Result<BinaryComplex, CliError> {
    let file: ComplexFile = read_json(path)?;
    file.to_complex().map_err(|message| CliError::Parse {
        path: path.to_path_buf(),
        message,
    })
}

pub fn read_double(path: &Path) -> Result<BinaryDoubleComplex, CliError> {
    let file: DoubleComplexFile = read_json(path)?;
    file.to_double().map_err(|message| CliError::Parse {
        path: path.to_path_buf(),
        message,
    })
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    use std::io::Write;
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rationals;

    #[test]
    fn complex_round_trip() {
        for field in [Q, Field::Prime(7)] {
            let b = BinaryComplex::random(field, &[1, 2, 0, 1], 4);
            let f = ComplexFile::from_complex(&b);
            let text = to_json(&f);
            let back: ComplexFile = serde_json::from_str(&text).unwrap();
            assert_eq!(back.to_complex().unwrap(), b);
            assert_eq!(to_json(&back), text);
        }
    }

    #[test]
    fn zero_width_matrices() {
        let b = BinaryComplex::random(Q, &[0, 1], 1);
        assert_eq!(b.dims(), &[0, 1, 1]);
        let f = ComplexFile::from_complex(&b);
        assert_eq!(f.top[0], MatrixText::new());
        assert_eq!(f.to_complex().unwrap(), b);
    }

    #[test]
    fn shape_errors_name_the_matrix() {
        let mut f = ComplexFile::from_complex(&BinaryComplex::random(Q, &[1, 1], 2));
        f.bot[1][0].push("1".into());
        let e = f.to_complex().unwrap_err();
        assert!(e.contains("bot[1]"), "{e}");
        f.bot[1][0].pop();
        f.top[0][0][0] = "1/0".into();
        assert!(f.to_complex().unwrap_err().contains("top[0][0][0]"));
    }

    #[test]
    fn double_round_trip() {
        let a = BinaryComplex::random(Q, &[1, 1], 1);
        let b = BinaryComplex::random(Q, &[1], 2);
        let d = BinaryDoubleComplex::tensor_double(&a, &b).unwrap();
        let f = DoubleComplexFile::from_double(&d);
        let back: DoubleComplexFile = serde_json::from_str(&to_json(&f)).unwrap();
        assert_eq!(back.to_double().unwrap(), d);
    }
}
