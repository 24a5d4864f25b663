use std::path::PathBuf;
use std::process::ExitCode;

use bincx_cli::{cmd_check_nenashev, cmd_invariant, cmd_random, cmd_shorten, cmd_verify, Target, Witnesses};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bincx", version, about = "Binary acyclic complexes over Q and F_p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that each file is a binary acyclic complex.
    Verify {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Print the torsion invariant of a complex.
    Invariant { path: PathBuf },
    /// Rewrite a complex as a signed sum of short complexes.
    Shorten {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "len2")]
        target: Target,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "canonical")]
        witnesses: Witnesses,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check Nenashev's relation on a binary double complex.
    CheckNenashev { path: PathBuf },
    /// Emit a random binary acyclic complex.
    Random {
        #[arg(long, default_value = "Q")]
        field: String,
        /// Comma-separated dimensions of the images, e.g. "1,2".
        #[arg(long, allow_hyphen_values = true)]
        jdims: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Verify { paths } => cmd_verify(paths),
        Command::Invariant { path } => cmd_invariant(path),
        Command::Shorten {
            path,
            target,
            seed,
            witnesses,
            out,
        } => cmd_shorten(path, *target, *seed, *witnesses, out),
        Command::CheckNenashev { path } => cmd_check_nenashev(path),
        Command::Random {
            field,
            jdims,
            seed,
            out,
        } => cmd_random(field, jdims, *seed, out.as_deref()),
    };
    match result {
        Ok(o) => {
            if !o.report.is_empty() {
                println!("{}", o.report);
            }
            ExitCode::from(o.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
