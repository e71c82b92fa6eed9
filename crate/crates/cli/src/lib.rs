//! Command implementations for the `harmonic` binary.
//!
//! Exit codes: 0 success, 1 validity or privacy failure, 2 usage or
//! configuration error.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use harmonic_coding::files::{DatasetFile, DecodedFile, FileError, OutputsFile, SharesFile, TaskFile};
use harmonic_coding::harmonic::{self, HarmonicParams};
use harmonic_coding::poly::{direct_gradient_sum, matrix_quadratic, Dataset, PolyMap};
use harmonic_coding::scheme::HarmonicScheme;
use harmonic_coding::sim::{self, privacy_audit_exhaustive, run_trial, worker_count_table, DEFAULT_AUDIT_BUDGET};
use harmonic_coding::{FieldConfig, FieldRng, FieldVector, SchemeParams, SchemeRegistry};

/// Environment variable overriding the privacy-audit state budget.
pub const BUDGET_ENV: &str = "PRIVACY_AUDIT_BUDGET";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "harmonic", version, about = "Privacy-preserving coded computation of gradient-type functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reproduce the K=2, deg g=2 worked example over F_5 and check every golden value.
    Demo(DemoArgs),
    /// Run randomized encode/evaluate/decode trials against the direct sum.
    Validate(ValidateArgs),
    /// Exhaustively audit single-worker privacy.
    PrivacyAudit(AuditArgs),
    /// Compare worker counts across schemes.
    Compare(CompareArgs),
    /// Encode a dataset file into a shares file (independent of g).
    Encode(EncodeArgs),
    /// Apply g to every share, as the workers would.
    Evaluate(EvaluateArgs),
    /// Decode worker outputs into f(X).
    Decode(DecodeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SchemeArgs {
    #[arg(long, default_value = "harmonic")]
    pub scheme: String,
    #[arg(long = "p", default_value_t = 11)]
    pub p: u64,
    #[arg(long = "K", default_value_t = 2)]
    pub k: usize,
    /// Scheme degree; defaults to 2, or to p for the freshman scheme.
    #[arg(long = "d")]
    pub d: Option<usize>,
    /// Harmonic parameter c.
    #[arg(long)]
    pub c: Option<u64>,
    /// Harmonic betas, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub betas: Option<Vec<u64>>,
}

impl SchemeArgs {
    fn params(&self, k: usize) -> SchemeParams {
        let d = self
            .d
            .unwrap_or(if self.scheme == "freshman" { self.p as usize } else { 2 });
        SchemeParams {
            c: self.c,
            betas: self.betas.clone(),
            ..SchemeParams::new(self.scheme.clone(), self.p, k, d)
        }
    }
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    /// Replace the fixture's c (betas are then re-selected unless given).
    #[arg(long)]
    pub c: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub betas: Option<Vec<u64>>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long = "m", default_value_t = 1)]
    pub m: usize,
    #[arg(long = "n", default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fixed task file; otherwise a fresh random g is drawn per trial.
    #[arg(long)]
    pub task: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long = "m", default_value_t = 1)]
    pub m: usize,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long = "K")]
    pub k: usize,
    #[arg(long = "d")]
    pub d: usize,
    /// Emit JSON instead of a text table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub task: PathBuf,
    #[arg(long)]
    pub shares: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub shares: PathBuf,
    #[arg(long)]
    pub outputs: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A command failure with its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failure(_) => EXIT_FAILURE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Failure(m) => write!(f, "failure: {m}"),
        }
    }
}

impl From<harmonic_coding::Error> for CliError {
    fn from(e: harmonic_coding::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CmdResult = Result<(), CliError>;

/// Parses `args` (including the program name) and runs the command with
/// the bundled schemes.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with_registry(args, &SchemeRegistry::default(), out, err)
}

pub fn run_with_registry<I, T>(args: I, registry: &SchemeRegistry, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Demo(a) => cmd_demo(a, out),
        Command::Validate(a) => cmd_validate(a, registry, out, err),
        Command::PrivacyAudit(a) => cmd_privacy(a, registry, out),
        Command::Compare(a) => cmd_compare(a, out),
        Command::Encode(a) => cmd_encode(a, registry, out),
        Command::Evaluate(a) => cmd_evaluate(a, out),
        Command::Decode(a) => cmd_decode(a, registry, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(json: &str, path: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    match path {
        Some(p) => fs::write(p, format!("{json}\n"))
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            writeln!(out, "{json}")?;
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("report types serialize")
}

// Worked example over F_5: K = 2, deg g = 2, c = 4, beta = 4.
const FIXTURE_P: u64 = 5;
const FIXTURE_C: u64 = 4;
const FIXTURE_BETAS: [u64; 1] = [4];
const GOLDEN_INTERMEDIATE: [[u64; 3]; 3] = [[0, 0, 1], [3, 0, 3], [2, 2, 2]];
const GOLDEN_ROWS: [[u64; 3]; 4] = [[0, 0, 1], [2, 0, 4], [4, 3, 4], [2, 2, 2]];
const GOLDEN_DECODE: [u64; 4] = [2, 1, 3, 1];
const DEMO_TRIALS: u64 = 100;

fn fmt_row(row: &[u64]) -> String {
    format!("({})", row.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
}

/// Rebuilds the worked example and compares every printed value with the
/// golden constants.
pub fn cmd_demo(args: &DemoArgs, out: &mut dyn Write) -> CmdResult {
    let field = FieldConfig::new(FIXTURE_P)?;
    let params = match (args.c, &args.betas) {
        (None, None) => HarmonicParams::with_overrides(field, 2, 2, FIXTURE_C, &FIXTURE_BETAS)?,
        (Some(c), Some(b)) => HarmonicParams::with_overrides(field, 2, 2, c, b)?,
        (Some(c), None) => HarmonicParams::with_c(field, 2, 2, c)?,
        (None, Some(b)) => HarmonicParams::with_overrides(field, 2, 2, FIXTURE_C, b)?,
    };
    let betas: Vec<u64> = params.betas().iter().map(|b| b.value()).collect();
    writeln!(
        out,
        "worked example: p={} K=2 d=2 c={} betas={:?} N={}",
        FIXTURE_P,
        params.c(),
        betas,
        params.worker_count()
    )?;

    let mut mismatches = Vec::new();
    let mut check = |what: String, expected: String, actual: String, out: &mut dyn Write| -> std::io::Result<()> {
        let ok = expected == actual;
        writeln!(out, "  {what:<28} {actual}{}", if ok { "" } else { "   MISMATCH" })?;
        if !ok {
            mismatches.push(format!("{what}: expected {expected}, actual {actual}"));
        }
        Ok(())
    };

    // Columns: X1, X2, Z.
    let unit = |col: usize| -> harmonic_coding::Result<(Dataset, FieldVector)> {
        let mut v = [0u64; 3];
        v[col] = 1;
        let data = Dataset::new(
            field,
            vec![FieldVector::reduced(field, &v[..1]), FieldVector::reduced(field, &v[1..2])],
        )?;
        Ok((data, FieldVector::reduced(field, &v[2..])))
    };
    let mut inter = vec![vec![0u64; 3]; 3];
    for col in 0..3 {
        let (data, z) = unit(col)?;
        for (j, pj) in harmonic::intermediate_vars(&params, &data, &z)?.iter().enumerate() {
            inter[j][col] = pj.residues()[0];
        }
    }
    writeln!(out, "intermediate variables (coefficients of X1, X2, Z):")?;
    for (j, row) in inter.iter().enumerate() {
        check(format!("P{j}"), fmt_row(&GOLDEN_INTERMEDIATE[j]), fmt_row(row), out)?;
    }

    let matrix = harmonic::encoding_matrix(&params)?;
    writeln!(out, "encoding rows (coefficients of X1, X2, Z):")?;
    let layout = params.layout();
    for (w, row) in matrix.residue_rows().iter().enumerate() {
        let label = layout.label(w + 1)?;
        let golden = GOLDEN_ROWS.get(w).map(|r| fmt_row(r)).unwrap_or_default();
        check(format!("worker {} {}", w + 1, label), golden, fmt_row(row), out)?;
    }

    let dv = harmonic::decode_vector(&params)?;
    writeln!(out, "decoding:")?;
    let dv_text = dv.residues().iter().map(u64::to_string).collect::<Vec<_>>().join(",");
    let golden_dv = GOLDEN_DECODE.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
    check("decode vector".into(), golden_dv, dv_text, out)?;

    // g(X) = A X^T X + B X + C over 2x2 matrices, flattened row-major.
    let g = matrix_quadratic(field, 2, &[1, 2, 3, 4], &[0, 1, 4, 2], &[3, 0, 1, 1])?;
    let scheme = HarmonicScheme::new(params.clone())?;
    let mut rng = FieldRng::seed_from_u64(0);
    let mut exact = 0;
    for _ in 0..DEMO_TRIALS {
        let data = Dataset::random(&mut rng, field, 2, 4)?;
        let report = run_trial(&scheme, &g, &data, rng.next_seed())?;
        if report.exact_match {
            exact += 1;
        }
    }
    check(
        "g(X)=AX^TX+BX+C trials".into(),
        format!("{DEMO_TRIALS}/{DEMO_TRIALS} exact"),
        format!("{exact}/{DEMO_TRIALS} exact"),
        out,
    )?;

    if mismatches.is_empty() {
        writeln!(out, "all golden values reproduced")?;
        Ok(())
    } else {
        Err(CliError::Failure(format!("golden mismatch:\n  {}", mismatches.join("\n  "))))
    }
}

fn validate_config(a: &ValidateArgs) -> CmdResult {
    if a.m == 0 || a.n == 0 {
        return Err(CliError::Usage("--m and --n must be at least 1".into()));
    }
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    Ok(())
}

/// Streams one JSON line per trial; fails unless every trial matches the
/// direct sum exactly.
pub fn cmd_validate(a: &ValidateArgs, registry: &SchemeRegistry, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    validate_config(a)?;
    let scheme = registry.build(&a.scheme.params(a.scheme.k))?;
    let fixed_task = match &a.task {
        Some(path) => {
            let g = TaskFile::parse(&read(path)?)?.to_poly()?;
            scheme.check_task(&g)?;
            Some(g)
        }
        None => None,
    };
    let field = scheme.field();
    let mut rng = FieldRng::seed_from_u64(a.seed);
    let mut failures = 0;
    for _ in 0..a.trials {
        let g = match &fixed_task {
            Some(g) => g.clone(),
            None => scheme.sample_task(&mut rng, a.m, a.n)?,
        };
        let data = Dataset::random(&mut rng, field, scheme.inputs(), g.input_dim())?;
        let report = run_trial(scheme.as_ref(), &g, &data, rng.next_seed())?;
        if !report.exact_match {
            failures += 1;
        }
        writeln!(out, "{}", to_json(&report))?;
    }
    writeln!(
        err,
        "{}: {}/{} trials exact (p={}, K={}, d={}, N={})",
        scheme.name(),
        a.trials - failures,
        a.trials,
        field.modulus(),
        scheme.inputs(),
        scheme.degree(),
        scheme.worker_count()
    )?;
    if failures > 0 {
        return Err(CliError::Failure(format!("{failures} of {} trials mismatched", a.trials)));
    }
    Ok(())
}

/// Budget from `PRIVACY_AUDIT_BUDGET`, or the default.
pub fn audit_budget() -> Result<u128, CliError> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{BUDGET_ENV} must be an integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_AUDIT_BUDGET),
    }
}

pub fn cmd_privacy(a: &AuditArgs, registry: &SchemeRegistry, out: &mut dyn Write) -> CmdResult {
    if a.m == 0 {
        return Err(CliError::Usage("--m must be at least 1".into()));
    }
    let scheme = registry.build(&a.scheme.params(a.scheme.k))?;
    let budget = audit_budget()?;
    let report = privacy_audit_exhaustive(scheme.as_ref(), a.m, budget).map_err(|e| match e {
        harmonic_coding::Error::BudgetExceeded { required, budget } => CliError::Usage(format!(
            "enumeration needs {required} states but the budget is {budget}; set {BUDGET_ENV}={required} to allow it"
        )),
        other => other.into(),
    })?;
    writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable"))?;
    if report.private {
        Ok(())
    } else {
        Err(CliError::Failure(format!(
            "workers {:?} leak information about the dataset",
            report.leaking_workers()
        )))
    }
}

pub fn cmd_compare(a: &CompareArgs, out: &mut dyn Write) -> CmdResult {
    if a.k == 0 || a.d == 0 {
        return Err(CliError::Usage("--K and --d must be at least 1".into()));
    }
    let table = worker_count_table(a.k, a.d);
    if a.json {
        writeln!(out, "{}", to_json(&table))?;
        return Ok(());
    }
    writeln!(out, "workers needed for K={} deg g={}", a.k, a.d)?;
    writeln!(out, "{:<10} {:>8}", "scheme", "workers")?;
    for row in &table {
        let note = if row.special_case_only {
            "  (only for g = A x^p with deg g = char F)"
        } else {
            ""
        };
        writeln!(out, "{:<10} {:>8}{note}", row.scheme, row.workers)?;
    }
    Ok(())
}

/// Encodes a dataset file. The task is never consulted.
pub fn cmd_encode(a: &EncodeArgs, registry: &SchemeRegistry, out: &mut dyn Write) -> CmdResult {
    let dataset_file = DatasetFile::parse(&read(&a.data)?)?;
    let field = FieldConfig::new(a.scheme.p)?;
    let data = dataset_file.to_dataset(field)?;
    let scheme = registry.build(&a.scheme.params(data.len()))?;
    let mut rng = FieldRng::seed_from_u64(a.seed);
    let keys: Vec<FieldVector> = (0..scheme.key_count())
        .map(|_| rng.uniform_vector(field, data.dim()))
        .collect();
    let shares = scheme.encode(&data, &keys)?;
    emit(&to_json(&SharesFile::new(scheme.params(), &shares)), a.out.as_deref(), out)
}

/// Evaluates `g` on every share.
pub fn cmd_evaluate(a: &EvaluateArgs, out: &mut dyn Write) -> CmdResult {
    let g: PolyMap = TaskFile::parse(&read(&a.task)?)?.to_poly()?;
    let shares_file = SharesFile::parse(&read(&a.shares)?)?;
    if shares_file.params.p != g.field().modulus() {
        return Err(CliError::Usage(format!(
            "task is over F_{} but shares are over F_{}",
            g.field().modulus(),
            shares_file.params.p
        )));
    }
    let shares = shares_file.share_vectors(shares_file.shares.len())?;
    let outputs = shares.iter().map(|s| g.eval(s)).collect::<harmonic_coding::Result<Vec<_>>>()?;
    emit(&to_json(&OutputsFile::new(&outputs)), a.out.as_deref(), out)
}

pub fn cmd_decode(a: &DecodeArgs, registry: &SchemeRegistry, out: &mut dyn Write) -> CmdResult {
    let shares_file = SharesFile::parse(&read(&a.shares)?)?;
    let scheme = registry.build(&shares_file.params)?;
    if scheme.params() != shares_file.params {
        return Err(CliError::Usage(
            "shares file parameter block does not match the scheme it describes".into(),
        ));
    }
    let workers = scheme.worker_count();
    shares_file.share_vectors(workers)?;
    let outputs = OutputsFile::parse(&read(&a.outputs)?)?.vectors(scheme.field(), workers)?;
    let f = scheme.decode(&outputs)?;
    emit(&to_json(&DecodedFile { f: f.residues().to_vec() }), a.out.as_deref(), out)
}

/// Recomputes `f` directly from a task and a dataset; handy for checking a
/// file pipeline end to end.
pub fn direct_sum(task: &PolyMap, data: &Dataset) -> harmonic_coding::Result<Vec<u64>> {
    Ok(direct_gradient_sum(task, data)?.residues().to_vec())
}

#[doc(hidden)]
pub use sim::TrialReport;
