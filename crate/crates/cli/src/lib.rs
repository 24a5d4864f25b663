//! Batch commands behind the `bincx` binary.
//!
//! Exit codes: 0 on success, 1 when a mathematical check fails, 2 for I/O
//! and parse errors.

pub mod format;

use std::path::{Path, PathBuf};

use bincx_core::binary::{BinaryComplex, NenashevExpression};
use bincx_core::error::Error;
use bincx_core::field::Field;
use bincx_core::reduce::{nenashev_form, shorten_to_len4, ShorteningChoices};
use bincx_core::torsion::{kappa, kappa_expression, nenashev_sides};
use rayon::prelude::*;

use crate::format::{read_complex, read_double, to_json, write_atomic, ComplexFile, Manifest, ManifestTerm};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Math(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Math(_) => 1,
            _ => 2,
        }
    }
}

/// Text printed on stdout plus the exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub report: String,
    pub code: u8,
}

impl Outcome {
    fn ok(report: String) -> Outcome {
        Outcome { report, code: 0 }
    }

    fn failed(report: String) -> Outcome {
        Outcome { report, code: 1 }
    }
}

fn math(e: Error) -> CliError {
    CliError::Math(describe(&e))
}

/// Failure text; binary-complex failures name the side and degree.
pub fn describe(e: &Error) -> String {
    match e {
        Error::InvalidBinary { side, degree, reason } => format!("invalid: {side}, degree {degree}: {reason}"),
        other => other.to_string(),
    }
}

/// Worker count from `BINCX_THREADS`, if set to a positive integer.
pub fn thread_limit() -> Option<usize> {
    std::env::var("BINCX_THREADS")
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
}

fn verify_one(path: &Path) -> (String, u8) {
    match read_complex(path) {
        Err(e) => (format!("error {e}"), e.exit_code()),
        Ok(b) => match b.validate() {
            Ok(_) => (format!("ok {}", path.display()), 0),
            Err(e) => (format!("FAIL {}: {}", path.display(), describe(&e)), 1),
        },
    }
}

/// Validates every file, in parallel; one report line per file in input
/// order. The exit code is the worst one seen.
pub fn cmd_verify(paths: &[PathBuf]) -> Result<Outcome, CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_limit() {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(e.to_string()))?;
    let results: Vec<(String, u8)> = pool.install(|| paths.par_iter().map(|p| verify_one(p)).collect());
    let code = results.iter().map(|r| r.1).max().unwrap_or(0);
    let report = results.into_iter().map(|r| r.0).collect::<Vec<_>>().join("\n");
    Ok(Outcome { report, code })
}

pub fn cmd_invariant(path: &Path) -> Result<Outcome, CliError> {
    let b = read_complex(path)?;
    let k = kappa(&b).map_err(math)?;
    Ok(Outcome::ok(k.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Target {
    Len4,
    Len2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Witnesses {
    Canonical,
    Random,
}

/// Largest stabilizer dimension drawn for random witnesses.
pub const RANDOM_STABILIZER: usize = 3;

pub fn shorten(
    b: &BinaryComplex,
    target: Target,
    witnesses: Witnesses,
    seed: u64,
) -> Result<NenashevExpression, Error> {
    let choices = match witnesses {
        Witnesses::Canonical => ShorteningChoices::canonical(b)?,
        Witnesses::Random => ShorteningChoices::random(b, seed, RANDOM_STABILIZER)?,
    };
    match target {
        Target::Len4 => shorten_to_len4(b, &choices),
        Target::Len2 => nenashev_form(b, &choices),
    }
}

/// Writes `term_NNN.json` per term and `manifest.json` into `out`.
pub fn cmd_shorten(
    path: &Path,
    target: Target,
    seed: u64,
    witnesses: Witnesses,
    out: &Path,
) -> Result<Outcome, CliError> {
    let b = read_complex(path)?;
    let input_kappa = kappa(&b).map_err(math)?;
    let e = shorten(&b, target, witnesses, seed).map_err(math)?;
    std::fs::create_dir_all(out).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let mut terms = Vec::new();
    for (i, (sign, t)) in e.terms().iter().enumerate() {
        let file = format!("term_{i:03}.json");
        write_atomic(&out.join(&file), &to_json(&ComplexFile::from_complex(t)))?;
        terms.push(ManifestTerm {
            file,
            sign: *sign,
            kappa: kappa(t).map_err(math)?.to_string(),
        });
    }
    let expression_kappa = kappa_expression(&e).map_err(math)?;
    let holds = expression_kappa == input_kappa;
    let manifest = Manifest {
        field: b.field().to_string(),
        target: format!("{target:?}").to_lowercase(),
        witnesses: format!("{witnesses:?}").to_lowercase(),
        seed,
        input_kappa: input_kappa.to_string(),
        terms,
        expression_kappa: expression_kappa.to_string(),
        identity_holds: holds,
    };
    write_atomic(&out.join("manifest.json"), &to_json(&manifest))?;
    let line = format!(
        "{} terms; kappa(input) = {}; kappa(expression) = {}",
        e.len(),
        input_kappa,
        expression_kappa
    );
    Ok(if holds {
        Outcome::ok(format!("{line}; identity holds"))
    } else {
        Outcome::failed(format!("{line}; IDENTITY FAILS"))
    })
}

pub fn cmd_check_nenashev(path: &Path) -> Result<Outcome, CliError> {
    let d = read_double(path)?;
    let (rows, cols) = nenashev_sides(&d).map_err(math)?;
    let line = format!("rows = {rows}; columns = {cols}");
    Ok(if rows == cols {
        Outcome::ok(format!("{line}; relation holds"))
    } else {
        Outcome::failed(format!("{line}; relation FAILS"))
    })
}

/// Parses `"1,2,0"`; the empty string is the empty list.
pub fn parse_jdims(text: &str) -> Result<Vec<usize>, CliError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("invalid J-dimension {t:?} in {text:?}")))
        })
        .collect()
}

/// A random valid complex as JSON text.
pub fn random_file(field: Field, jdims: &[usize], seed: u64) -> String {
    to_json(&ComplexFile::from_complex(&BinaryComplex::random(field, jdims, seed)))
}

pub fn cmd_random(field: &str, jdims: &str, seed: u64, out: Option<&Path>) -> Result<Outcome, CliError> {
    let field: Field = field.parse().map_err(|e: Error| CliError::Usage(e.to_string()))?;
    let jdims = parse_jdims(jdims)?;
    let text = random_file(field, &jdims, seed);
    match out {
        Some(p) => {
            write_atomic(p, &text)?;
            Ok(Outcome::ok(format!("wrote {}", p.display())))
        }
        None => Ok(Outcome::ok(text.trim_end().to_string())),
    }
}
