use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use matmoment::batch;
use matmoment::io::{
    parse_document, parse_measure, parse_polynomial, run_check, run_reconstruct, run_riesz, run_solve, ResultDocument,
    ToleranceOverrides,
};
use matmoment::{Error, ProblemKind, Result};

/// Truncated matrix moment problems from JSON documents.
///
/// Exit status: 0 satisfied, 1 refuted, 2 input or numerical error.
#[derive(Debug, Parser)]
#[command(name = "matmoment", version)]
struct Cli {
    /// Relative eigenvalue floor for PSD decisions.
    #[arg(long, global = true, value_name = "EPS", allow_negative_numbers = true)]
    tol_psd: Option<f64>,
    /// Root clustering radius.
    #[arg(long, global = true, value_name = "EPS", allow_negative_numbers = true)]
    tol_root: Option<f64>,
    /// Bound on recurrence, symmetry and reconstruction residuals.
    #[arg(long, global = true, value_name = "EPS", allow_negative_numbers = true)]
    tol_residual: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test the truncated Hamburger, Stieltjes or Hausdorff condition.
    Check {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Problem documents; standard input when omitted or `-`.
        inputs: Vec<PathBuf>,
    },
    /// Minimal polynomial, roots and representing atomic measure.
    Solve { inputs: Vec<PathBuf> },
    /// Moments S_0..S_n of a measure document or of a `solve` result.
    Reconstruct {
        #[arg(long)]
        n: usize,
        inputs: Vec<PathBuf>,
    },
    /// Riesz functional of a matrix polynomial given as a JSON list of coefficients.
    Riesz {
        #[arg(long, value_name = "FILE")]
        poly: PathBuf,
        inputs: Vec<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Hamburger,
    Stieltjes,
    Hausdorff,
}

impl From<Kind> for ProblemKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Hamburger => ProblemKind::Hamburger,
            Kind::Stieltjes => ProblemKind::Stieltjes,
            Kind::Hausdorff => ProblemKind::Hausdorff,
        }
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Solve { .. } => "solve",
            Command::Reconstruct { .. } => "reconstruct",
            Command::Riesz { .. } => "riesz",
        }
    }

    fn inputs(&self) -> &[PathBuf] {
        match self {
            Command::Check { inputs, .. }
            | Command::Solve { inputs }
            | Command::Reconstruct { inputs, .. }
            | Command::Riesz { inputs, .. } => inputs,
        }
    }
}

fn read_input(path: Option<&Path>) -> Result<Vec<u8>> {
    match path {
        Some(p) if p != Path::new("-") => std::fs::read(p).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        _ => {
            let mut buf = Vec::new();
            std::io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| Error::Io(format!("stdin: {e}")))?;
            Ok(buf)
        }
    }
}

fn run_one(cli: &Cli, flags: ToleranceOverrides, env: ToleranceOverrides, text: &[u8]) -> Result<ResultDocument> {
    match &cli.command {
        Command::Reconstruct { n, .. } => run_reconstruct(&parse_measure(text)?, *n),
        Command::Check { kind, .. } => {
            let doc = parse_document(text)?;
            run_check(&doc, (*kind).into(), &doc.tolerance(flags, env)?)
        }
        Command::Solve { .. } => {
            let doc = parse_document(text)?;
            run_solve(&doc, &doc.tolerance(flags, env)?)
        }
        Command::Riesz { poly, .. } => {
            let doc = parse_document(text)?;
            let poly = parse_polynomial(&read_input(Some(poly))?)?;
            run_riesz(&doc, &poly, &doc.tolerance(flags, env)?)
        }
    }
}

fn finish(command: &str, label: &str, result: Result<ResultDocument>) -> (serde_json::Value, i32) {
    let doc = result.and_then(|d| d.to_value().map(|v| (v, d.exit_code())));
    match doc {
        Ok(ok) => ok,
        Err(e) => {
            eprintln!("matmoment {command}: {label}: {}: {e}", e.kind());
            let doc = ResultDocument::from_error(command, &e);
            let value = doc.to_value().expect("error documents hold no floats");
            (value, doc.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = cli.command.name();
    let flags = ToleranceOverrides {
        psd_eps: cli.tol_psd,
        root_eps: cli.tol_root,
        residual_eps: cli.tol_residual,
    };
    let env = match ToleranceOverrides::from_env(|k| std::env::var(k).ok()) {
        Ok(env) => env,
        Err(e) => {
            let (value, code) = finish(command, "environment", Err(e));
            println!("{value:#}");
            return ExitCode::from(code as u8);
        }
    };

    let inputs: Vec<Option<&Path>> = match cli.command.inputs() {
        [] => vec![None],
        paths => paths.iter().map(|p| Some(p.as_path())).collect(),
    };
    let outputs = batch::map(&inputs, |path| {
        let label = path.map_or("stdin".to_string(), |p| p.display().to_string());
        let result = read_input(*path).and_then(|text| run_one(&cli, flags, env, &text));
        finish(command, &label, result)
    });

    let code = outputs.iter().map(|(_, c)| *c).max().unwrap_or(0);
    let mut values: Vec<_> = outputs.into_iter().map(|(v, _)| v).collect();
    if values.len() == 1 {
        println!("{:#}", values.remove(0));
    } else {
        println!("{:#}", serde_json::Value::Array(values));
    }
    ExitCode::from(code as u8)
}
