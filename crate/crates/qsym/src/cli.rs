//! Command-line front end: `eval`, `verify` and `list`.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qsym_core::q3j::{q3j, CgKey};
use qsym_core::q6j::{q6j_closed, SixJKey};
use qsym_core::{qarith, verma, ApComplex, QContext, QError, Weight};
use serde_json::json;

use crate::harness::{self, HarnessError, Regime, SuiteConfig};

/// Exit code for a run where everything passed.
pub const EXIT_OK: u8 = 0;
/// Exit code when at least one identity failed.
pub const EXIT_FAIL: u8 = 1;
/// Exit code for invalid or inadmissible input.
pub const EXIT_INVALID: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "qsym", version, about = "Quantum 3j and 6j symbols for Verma modules of U_q(sl2)")]
pub struct Cli {
    /// Working precision in decimal digits.
    #[arg(long, global = true, env = "QSYM_PRECISION", default_value_t = 64)]
    pub precision: u32,
    /// Seed for the parameter sampler.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Parameter regime: real, complex or smallq.
    #[arg(long, global = true, default_value = "real")]
    pub regime: Regime,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a single quantity.
    Eval(Box<EvalArgs>),
    /// Run identity checks.
    Verify(VerifyArgs),
    /// Print the identity ledger.
    List,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EvalKind {
    Q3jPsi,
    Q3jPi,
    Q6j,
    Rmatrix,
    Alpha,
    Qnum,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Quantity to evaluate.
    pub kind: EvalKind,
    /// Deformation parameter, `re` or `re,im`.
    #[arg(long, default_value = "2")]
    pub q: String,
    /// First weight λ1, a decimal `re` or `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub l1: Option<String>,
    /// Second weight λ2.
    #[arg(long, allow_hyphen_values = true)]
    pub l2: Option<String>,
    /// Third weight λ3 (q6j).
    #[arg(long, allow_hyphen_values = true)]
    pub l3: Option<String>,
    /// Highest weight λ (alpha).
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Argument of the quantum number (qnum).
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Defect J of the fused weight λ1 + λ2 - J (q3j).
    #[arg(long, allow_hyphen_values = true)]
    pub j: Option<i64>,
    /// Depth k (alpha).
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i64>,
    /// Depth in the first factor (q3j, rmatrix).
    #[arg(long, allow_hyphen_values = true)]
    pub k1: Option<i64>,
    /// Depth in the second factor (q3j, rmatrix).
    #[arg(long, allow_hyphen_values = true)]
    pub k2: Option<i64>,
    /// Transferred depth n (rmatrix).
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<i64>,
    /// Defect of λ12 (q6j).
    #[arg(long, allow_hyphen_values = true)]
    pub j12: Option<i64>,
    /// Defect of λ23 (q6j).
    #[arg(long, allow_hyphen_values = true)]
    pub j23: Option<i64>,
    /// Total defect (q6j).
    #[arg(long, allow_hyphen_values = true)]
    pub j123: Option<i64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Comma-separated, case-insensitive glob patterns over identity ids.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Trials per identity instead of each identity's default.
    #[arg(long)]
    pub trials: Option<u32>,
    /// Record wall-clock times in the report.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("missing --{0}")]
    Missing(&'static str),
    #[error(transparent)]
    Core(#[from] QError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

fn need<T: Clone>(v: &Option<T>, name: &'static str) -> Result<T, CliError> {
    v.clone().ok_or(CliError::Missing(name))
}

fn weight(ctx: &QContext, v: &Option<String>, name: &'static str) -> Result<Weight, CliError> {
    Ok(Weight::new(ctx.parse(&need(v, name)?)?))
}

fn evaluate(ctx: &QContext, a: &EvalArgs) -> Result<ApComplex, CliError> {
    Ok(match a.kind {
        EvalKind::Q3jPsi | EvalKind::Q3jPi => {
            let (l1, l2) = (weight(ctx, &a.l1, "l1")?, weight(ctx, &a.l2, "l2")?);
            let (j, k1, k2) = (need(&a.j, "j")?, need(&a.k1, "k1")?, need(&a.k2, "k2")?);
            let key = if a.kind == EvalKind::Q3jPsi {
                CgKey::psi(&l1, &l2, j, k1, k2)
            } else {
                CgKey::pi(&l1, &l2, j, k1, k2)
            };
            q3j(ctx, &key)?
        }
        EvalKind::Q6j => {
            let (l1, l2, l3) = (weight(ctx, &a.l1, "l1")?, weight(ctx, &a.l2, "l2")?, weight(ctx, &a.l3, "l3")?);
            let key = SixJKey::new(&l1, &l2, &l3, need(&a.j12, "j12")?, need(&a.j23, "j23")?, need(&a.j123, "j123")?)?;
            q6j_closed(ctx, &key)?
        }
        EvalKind::Rmatrix => {
            let (l1, l2) = (weight(ctx, &a.l1, "l1")?, weight(ctx, &a.l2, "l2")?);
            verma::rmat_elem(ctx, &l1, &l2, need(&a.k1, "k1")?, need(&a.k2, "k2")?, need(&a.n, "n")?)?
        }
        EvalKind::Alpha => verma::alpha(ctx, &weight(ctx, &a.lambda, "lambda")?, need(&a.k, "k")?)?,
        EvalKind::Qnum => qarith::qnum(ctx, &ctx.parse(&need(&a.x, "x")?)?),
    })
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn eval_cmd(cli: &Cli, a: &EvalArgs) -> Result<u8, CliError> {
    let ctx = QContext::from_decimal(&a.q, cli.precision)?;
    let v = evaluate(&ctx, a)?;
    let (re, im) = ctx.to_decimal_digits(&v, cli.precision);
    let text = match cli.format {
        Format::Text => format!("{re} + {im}i\n"),
        Format::Json => {
            let doc = json!({ "kind": format!("{:?}", a.kind).to_lowercase(), "precision": cli.precision, "re": re, "im": im });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("plain data"))
        }
    };
    emit(cli, &text)?;
    Ok(EXIT_OK)
}

fn verify_cmd(cli: &Cli, a: &VerifyArgs) -> Result<u8, CliError> {
    let cfg = SuiteConfig {
        precision: cli.precision,
        seed: cli.seed,
        regime: cli.regime,
        selection: vec![a.suite.clone()],
        trials: a.trials,
        timings: a.timings,
    };
    let report = harness::run_suite(&cfg)?;
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    emit(cli, &text)?;
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_FAIL })
}

fn list_cmd(cli: &Cli) -> Result<u8, CliError> {
    let ids = harness::list_identities();
    let text = match cli.format {
        Format::Json => {
            let rows: Vec<_> = ids
                .iter()
                .map(|d| json!({ "id": d.id, "reference": d.reference, "default_trials": d.default_trials }))
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&rows).expect("plain data"))
        }
        Format::Text => ids
            .iter()
            .map(|d| format!("{:<12} {:>3}  {}\n", d.id, d.default_trials, d.reference))
            .collect(),
    };
    emit(cli, &text)?;
    Ok(EXIT_OK)
}

/// Runs a parsed command line and returns the process exit code. Errors are
/// reported on stderr as a single line.
pub fn run(cli: &Cli) -> u8 {
    let outcome = match &cli.command {
        Command::Eval(a) => eval_cmd(cli, a),
        Command::Verify(a) => verify_cmd(cli, a),
        Command::List => list_cmd(cli),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        EXIT_INVALID
    })
}
