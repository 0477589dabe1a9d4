//! Command-line front end for `qtwick-core`.
//!
//! Exit codes: 0 on success, 2 for usage and validation errors, 1 for
//! internal failures such as an unwritable output file.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use qtwick_core::clt::{convergence_experiment, ExperimentConfig, Mode};
use qtwick_core::coeffs::{normal_order, sample_base, BaseSequence, CoefficientTable};
use qtwick_core::fock::{
    commutator_residual, gram_matrix, symmetric_eigenvalues, vacuum_moment, FockOp, FockParams,
};
use qtwick_core::format_f64;
use qtwick_core::jw::{build_jw, check_commutation, vacuum_expectation, SparseState};
use qtwick_core::jw::apply_jw;
use qtwick_core::pairings::{class_of, enumerate_pair_partitions, PairPartition};
use qtwick_core::wickpoly::{
    wick_field, wick_joint_with, wick_mixed, CovarianceSpec, Eps, EpsilonString,
};

pub mod config;
pub mod table;

use table::Table;

/// Seed used when neither `--seed`, the config file nor `QTWICK_SEED` set one.
pub const DEFAULT_SEED: u64 = 0;
pub const SEED_ENV: &str = "QTWICK_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qtwick_core::Error),
    #[error("{0}")]
    Input(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Output { .. } => 1,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "qtwick",
    version,
    about = "Two-parameter (q,t) Wick moments, Fock space, Jordan-Wigner models and CLT experiments",
    after_help = "Epsilon strings use the letters 1 and *; quote them in the shell, e.g. --eps '11**'.",
    args_override_self = true
)]
pub struct Cli {
    /// Read flag defaults from a key = value file; explicit flags win
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Verify that a CSV emitted by this tool re-parses without differences
    #[arg(long, value_name = "FILE")]
    pub check: Option<PathBuf>,

    /// Write the artifact to FILE instead of standard output
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate pair partitions, or classify an index tuple
    #[command(args_override_self = true)]
    Pairings(PairingsArgs),
    /// Wick-type moment polynomials in q and t
    #[command(args_override_self = true)]
    Wick(WickArgs),
    /// Truncated (q,t)-Fock space computations
    #[command(subcommand)]
    Fock(FockCommand),
    /// Commutation-coefficient sampling and normal ordering
    #[command(subcommand)]
    Coeffs(CoeffsCommand),
    /// The Jordan-Wigner matrix model
    #[command(subcommand)]
    Jw(JwCommand),
    /// Convergence experiments for S_N moments or the crossing/nesting estimator
    #[command(args_override_self = true)]
    Clt(CltArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct PairingsArgs {
    /// Enumerate the pair partitions of [2n]
    #[arg(long)]
    pub n: Option<usize>,
    /// Classify an index tuple, e.g. 1,2,2,1
    #[arg(long, value_delimiter = ',')]
    pub tuple: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct WickArgs {
    /// Epsilon string such as '11**'
    #[arg(long, conflicts_with = "field")]
    pub eps: Option<EpsilonString>,
    /// Moment of order 2n of the field variable
    #[arg(long, value_name = "N")]
    pub field: Option<usize>,
    /// Covariance overrides such as '1*=1,*1=1/2'
    #[arg(long, requires = "eps")]
    pub cov: Option<String>,
    /// Index labels for a joint moment, e.g. 1,2,2,1
    #[arg(long, value_delimiter = ',', requires = "eps")]
    pub labels: Option<Vec<usize>>,
    /// Evaluate at q,t
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "Q,T")]
    pub eval: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct Deformation {
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
    #[arg(long)]
    pub t: f64,
}

#[derive(Debug, Subcommand)]
pub enum FockCommand {
    /// Vacuum moment of an operator word such as s1,s1,a2,c2
    #[command(args_override_self = true)]
    Moment {
        /// Comma-separated letters: a<i> annihilation, c<i> creation, s<i> field, N number scale
        #[arg(long)]
        ops: String,
        /// Basis dimension (default: largest index in the word)
        #[arg(long)]
        d: Option<usize>,
        /// Truncation degree (default: word length)
        #[arg(long)]
        m: Option<usize>,
        #[command(flatten)]
        qt: Deformation,
    },
    /// Residual of the (q,t)-commutation relation for all basis pairs
    #[command(args_override_self = true)]
    Residual {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        qt: Deformation,
    },
    /// Spectrum of the Gram matrix on words of degree n
    #[command(args_override_self = true)]
    Gram {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        qt: Deformation,
    },
}

/// Where commutation coefficients come from: a base CSV or a seeded sample.
#[derive(Debug, Args)]
pub struct TableSource {
    #[arg(long)]
    pub t: f64,
    /// Mean parameter of the two-point law (with t: P(mu = 1) = (1 + q/t)/2)
    #[arg(long, allow_negative_numbers = true, conflicts_with = "base")]
    pub q: Option<f64>,
    #[arg(long, conflicts_with = "base")]
    pub seed: Option<u64>,
    /// Base sequence CSV with columns i,j,mu
    #[arg(long, value_name = "FILE")]
    pub base: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CoeffsCommand {
    /// Sample a base sequence mu(i,j), 1 <= i < j <= n
    #[command(args_override_self = true)]
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        q: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Normal-order a pair-class product and report its coefficient
    #[command(name = "normal-order", args_override_self = true)]
    NormalOrder {
        #[arg(long, value_delimiter = ',', required = true)]
        tuple: Vec<usize>,
        #[arg(long)]
        eps: EpsilonString,
        #[command(flatten)]
        source: TableSource,
    },
}

#[derive(Debug, Subcommand)]
pub enum JwCommand {
    /// Vacuum expectation of a product such as 2,1,2*,1*
    #[command(args_override_self = true)]
    Moment {
        /// Comma-separated indices, * marking adjoints; leftmost acts last
        #[arg(long)]
        ops: String,
        /// Model width (default: largest index)
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        source: TableSource,
    },
    /// Verify every commutation relation among b_1, ..., b_n
    #[command(args_override_self = true)]
    Check {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        source: TableSource,
    },
    /// Dump one operator's per-slot action table as JSON
    #[command(args_override_self = true)]
    Dump {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        adjoint: bool,
        #[command(flatten)]
        source: TableSource,
    },
    /// The state obtained by applying a product to the vacuum
    #[command(args_override_self = true)]
    State {
        #[arg(long)]
        ops: String,
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        source: TableSource,
    },
}

#[derive(Debug, Args)]
pub struct CltArgs {
    #[arg(long, value_enum, default_value = "moment")]
    pub mode: CltMode,
    #[arg(long)]
    pub eps: EpsilonString,
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
    #[arg(long)]
    pub t: f64,
    /// Strictly increasing list of N, e.g. 25,50,100,200
    #[arg(long, value_delimiter = ',', required = true)]
    pub ns: Vec<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Pair partition for lambda mode, e.g. '{(1,3),(2,4)}'
    #[arg(long)]
    pub pairing: Option<PairPartition>,
    /// Worker threads for evaluating rows; results do not depend on it
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CltMode {
    Moment,
    Lambda,
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}={v:?} is not a 64-bit unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn pick_format(requested: Option<Format>, allowed: &[Format]) -> Result<Format> {
    match requested {
        None => Ok(allowed[0]),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => Err(CliError::Usage(format!(
            "format {f:?} is not available here; choose from {allowed:?}"
        ))),
    }
}

fn emit_table(table: &Table, format: Format) -> String {
    match format {
        Format::Json => table.to_json(),
        _ => table.to_csv(),
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl TableSource {
    /// `(table, seed)`; the seed is `None` when read from a base file.
    fn build(&self, n: usize) -> Result<(CoefficientTable, Option<u64>)> {
        if let Some(path) = &self.base {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            let base = BaseSequence::from_csv(&text)?;
            if base.n() < n && n > 1 {
                return Err(CliError::Usage(format!(
                    "base covers {} indices, {n} needed",
                    base.n()
                )));
            }
            return Ok((CoefficientTable::new(base, self.t)?, None));
        }
        let q = self
            .q
            .ok_or_else(|| CliError::Usage("either --base or --q is required".into()))?;
        let seed = resolve_seed(self.seed)?;
        let base = sample_base(n.max(1), q, self.t, seed)?;
        Ok((CoefficientTable::new(base, self.t)?, Some(seed)))
    }
}

fn run_pairings(args: &PairingsArgs, format: Option<Format>) -> Result<String> {
    let format = pick_format(format, &[Format::Text, Format::Csv, Format::Json])?;
    if let Some(tuple) = &args.tuple {
        let class = class_of(tuple);
        let stats = class.as_pair_partition().map(|p| p.stats());
        if format == Format::Text {
            return Ok(match stats {
                Some((c, v)) => format!("{class} cross={c},nest={v}\n"),
                None => format!("{class} not a pair class\n"),
            });
        }
        let mut t = Table::new(&table::TUPLE_CLASS);
        t.push(vec![
            join(tuple).into(),
            class.to_string().into(),
            stats.map(|s| s.0).into(),
            stats.map(|s| s.1).into(),
        ]);
        return Ok(emit_table(&t, format));
    }
    let n = args.n.expect("clap group requires one of --n/--tuple");
    let pairings = enumerate_pair_partitions(n)?;
    if format == Format::Text {
        return Ok(pairings
            .iter()
            .map(|p| {
                let (c, v) = p.stats();
                format!("{p} cross={c},nest={v}\n")
            })
            .collect());
    }
    let mut t = Table::new(&table::PAIRINGS);
    for p in &pairings {
        let (c, v) = p.stats();
        t.push(vec![p.to_string().into(), c.into(), v.into()]);
    }
    Ok(emit_table(&t, format))
}

fn run_wick(args: &WickArgs, format: Option<Format>) -> Result<String> {
    let format = pick_format(format, &[Format::Text, Format::Csv, Format::Json])?;
    let (input, poly) = match (&args.eps, args.field) {
        (Some(e), None) => {
            let cov: CovarianceSpec = match &args.cov {
                Some(s) => s.parse()?,
                None => CovarianceSpec::default(),
            };
            let poly = match &args.labels {
                Some(labels) => wick_joint_with(labels, e, &cov)?,
                None => wick_mixed(e, &cov)?,
            };
            let input = match &args.labels {
                Some(labels) => format!("{e} labels={}", join(labels)),
                None => e.to_string(),
            };
            (input, poly)
        }
        (None, Some(n)) => (format!("field n={n}"), wick_field(n)?),
        _ => return Err(CliError::Usage("give exactly one of --eps and --field".into())),
    };
    let eval = match args.eval.as_deref() {
        None => None,
        Some(&[q, t]) => Some((q, t)),
        Some(_) => return Err(CliError::Usage("--eval takes two numbers: q,t".into())),
    };
    let value = eval.map(|(q, t)| poly.eval(q, t));
    if format == Format::Text {
        return Ok(match value {
            Some(v) => format!("{poly}\n{}\n", format_f64(v)),
            None => format!("{poly}\n"),
        });
    }
    let mut t = Table::new(&table::WICK);
    t.push(vec![
        input.into(),
        poly.to_string().into(),
        eval.map(|e| e.0).into(),
        eval.map(|e| e.1).into(),
        value.into(),
    ]);
    Ok(emit_table(&t, format))
}

fn parse_fock_ops(ops: &str) -> Result<Vec<FockOp>> {
    ops.split(',')
        .map(str::trim)
        .map(|tok| {
            let bad = || CliError::Usage(format!("bad Fock operator {tok:?} (use a<i>, c<i>, s<i> or N)"));
            if tok == "N" {
                return Ok(FockOp::NumberScale);
            }
            let (head, index) = tok.split_at(tok.chars().next().map_or(0, char::len_utf8));
            let i: usize = index.parse().map_err(|_| bad())?;
            match head {
                "a" => Ok(FockOp::Annihilate(i)),
                "c" => Ok(FockOp::Create(i)),
                "s" => Ok(FockOp::Field(i)),
                _ => Err(bad()),
            }
        })
        .collect()
}

fn run_fock(cmd: &FockCommand, format: Option<Format>) -> Result<String> {
    let format = pick_format(format, &[Format::Csv, Format::Json])?;
    match cmd {
        FockCommand::Moment { ops, d, m, qt } => {
            let parsed = parse_fock_ops(ops)?;
            let max_index = parsed
                .iter()
                .filter_map(|op| match *op {
                    FockOp::Create(i) | FockOp::Annihilate(i) | FockOp::Field(i) => Some(i),
                    FockOp::NumberScale => None,
                })
                .max()
                .unwrap_or(1);
            let d = d.unwrap_or(max_index);
            let m = m.unwrap_or(parsed.len().max(1));
            let p = FockParams::new(d, m, qt.q, qt.t)?;
            let moment = vacuum_moment(&parsed, &p)?;
            let mut t = Table::new(&table::FOCK_MOMENT);
            t.push(vec![ops.replace(' ', "").into(), d.into(), m.into(), qt.q.into(), qt.t.into(), moment.into()]);
            Ok(emit_table(&t, format))
        }
        FockCommand::Residual { d, m, qt } => {
            let p = FockParams::new(*d, *m, qt.q, qt.t)?;
            let mut t = Table::new(&table::FOCK_RESIDUAL);
            for f in 1..=*d {
                for g in 1..=*d {
                    let r = commutator_residual(f, g, &p)?;
                    t.push(vec![f.into(), g.into(), (*d).into(), (*m).into(), qt.q.into(), qt.t.into(), r.into()]);
                }
            }
            Ok(emit_table(&t, format))
        }
        FockCommand::Gram { d, n, qt } => {
            let p = FockParams::new(*d, (*n).max(1), qt.q, qt.t)?;
            let eig = symmetric_eigenvalues(&gram_matrix(*n, &p)?);
            let mut t = Table::new(&table::FOCK_GRAM);
            for (k, e) in eig.into_iter().enumerate() {
                t.push(vec![(*d).into(), (*n).into(), qt.q.into(), qt.t.into(), (k + 1).into(), e.into()]);
            }
            Ok(emit_table(&t, format))
        }
    }
}

fn run_coeffs(cmd: &CoeffsCommand, format: Option<Format>) -> Result<String> {
    let format = pick_format(format, &[Format::Csv, Format::Json])?;
    match cmd {
        CoeffsCommand::Sample { n, q, t, seed } => {
            let base = sample_base(*n, *q, *t, resolve_seed(*seed)?)?;
            if format == Format::Json {
                let rows: Vec<serde_json::Value> = base
                    .iter()
                    .map(|(i, j, mu)| serde_json::json!({ "i": i, "j": j, "mu": mu }))
                    .collect();
                let mut s = serde_json::to_string_pretty(&rows).expect("rows serialise");
                s.push('\n');
                return Ok(s);
            }
            Ok(base.to_csv())
        }
        CoeffsCommand::NormalOrder { tuple, eps, source } => {
            let n = tuple.iter().copied().max().unwrap_or(1);
            let (tb, _) = source.build(n)?;
            let r = normal_order(tuple, eps, &tb)?;
            let mut t = Table::new(&table::NORMAL_ORDER);
            t.push(vec![
                join(tuple).into(),
                eps.to_string().into(),
                r.pairing.to_string().into(),
                r.pattern.to_string().into(),
                r.beta.into(),
                r.beta_closed_form.into(),
            ]);
            Ok(emit_table(&t, format))
        }
    }
}

fn parse_jw_ops(ops: &str) -> Result<Vec<(usize, bool)>> {
    ops.split(',')
        .map(str::trim)
        .map(|tok| {
            let (index, adjoint) = match tok.strip_suffix('*') {
                Some(rest) => (rest, true),
                None => (tok, false),
            };
            let i = index
                .parse()
                .map_err(|_| CliError::Usage(format!("bad operator {tok:?} (use i or i*)")))?;
            Ok((i, adjoint))
        })
        .collect()
}

fn width_for(ops: &[(usize, bool)], n: Option<usize>) -> usize {
    n.unwrap_or_else(|| ops.iter().map(|o| o.0).max().unwrap_or(1))
}

fn run_jw(cmd: &JwCommand, format: Option<Format>) -> Result<String> {
    match cmd {
        JwCommand::Moment { ops, n, source } => {
            let format = pick_format(format, &[Format::Csv, Format::Json])?;
            let parsed = parse_jw_ops(ops)?;
            let n = width_for(&parsed, *n);
            let (tb, seed) = source.build(n)?;
            let value = vacuum_expectation(&parsed, n, &tb)?;
            let mut t = Table::new(&table::JW_MOMENT);
            t.push(vec![ops.replace(' ', "").into(), n.into(), source.t.into(), seed.into(), value.into()]);
            Ok(emit_table(&t, format))
        }
        JwCommand::Check { n, source } => {
            let format = pick_format(format, &[Format::Text, Format::Csv, Format::Json])?;
            let (tb, _) = source.build(*n)?;
            let report = check_commutation(*n, &tb)?;
            if format == Format::Text {
                let mut s = format!(
                    "n={} checks={} max_deviation={} passed={}\n",
                    report.n,
                    report.checks,
                    format_f64(report.max_deviation),
                    report.passed()
                );
                for f in &report.failures {
                    s.push_str(&format!(
                        "failed: i={} j={} e={} e'={} coefficient={} deviation={}\n",
                        f.i,
                        f.j,
                        f.e.as_char(),
                        f.e2.as_char(),
                        format_f64(f.coefficient),
                        format_f64(f.deviation)
                    ));
                }
                return Ok(s);
            }
            let mut t = Table::new(&table::JW_CHECK);
            t.push(vec![report.n.into(), report.checks.into(), report.max_deviation.into(), report.passed().into()]);
            Ok(emit_table(&t, format))
        }
        JwCommand::Dump { n, i, adjoint, source } => {
            pick_format(format, &[Format::Json])?;
            let (tb, _) = source.build(*n)?;
            let mut s = build_jw(*n, *i, *adjoint, &tb)?.to_json();
            s.push('\n');
            Ok(s)
        }
        JwCommand::State { ops, n, source } => {
            pick_format(format, &[Format::Csv])?;
            let parsed = parse_jw_ops(ops)?;
            let n = width_for(&parsed, *n);
            let (tb, _) = source.build(n)?;
            let mut state = SparseState::vacuum(n);
            for &(i, adjoint) in parsed.iter().rev() {
                if i == 0 || i > n {
                    return Err(qtwick_core::Error::IndexOutOfRange { index: i, max: n }.into());
                }
                let e = if adjoint { Eps::Star } else { Eps::One };
                state = apply_jw(i, e, &state, &tb);
            }
            Ok(state.to_csv())
        }
    }
}

fn run_clt(args: &CltArgs, format: Option<Format>) -> Result<String> {
    let format = pick_format(format, &[Format::Csv, Format::Json])?;
    let config = ExperimentConfig {
        q: args.q,
        t: args.t,
        eps: args.eps.clone(),
        ns: args.ns.clone(),
        seed: resolve_seed(args.seed)?,
        mode: match args.mode {
            CltMode::Moment => Mode::Moment,
            CltMode::Lambda => Mode::Lambda,
        },
        pairing: args.pairing.clone(),
    };
    if args.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let report = convergence_experiment(&config, args.jobs)?;
    Ok(match format {
        Format::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        _ => report.to_csv(),
    })
}

fn run_check(path: &PathBuf) -> Result<String> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let summary = table::check_csv(&text)?;
    Ok(format!(
        "ok: {} ({} rows) round-trips without differences\n",
        summary.kind, summary.rows
    ))
}

fn execute(cli: &Cli) -> Result<String> {
    if let Some(path) = &cli.check {
        if cli.command.is_some() {
            return Err(CliError::Usage("--check does not combine with a subcommand".into()));
        }
        return run_check(path);
    }
    let format = cli.format;
    match cli
        .command
        .as_ref()
        .ok_or_else(|| CliError::Usage("a subcommand is required (try --help)".into()))?
    {
        Command::Pairings(a) => run_pairings(a, format),
        Command::Wick(a) => run_wick(a, format),
        Command::Fock(c) => run_fock(c, format),
        Command::Coeffs(c) => run_coeffs(c, format),
        Command::Jw(c) => run_jw(c, format),
        Command::Clt(a) => run_clt(a, format),
    }
}

/// Runs the tool on `argv` (program name first), writing the artifact to
/// `stdout` or `--out` and diagnostics to `stderr`; returns the exit code.
pub fn run_with(argv: Vec<String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let argv = match config::merge(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{rendered}");
                    2
                }
            };
        }
    };
    let artifact = match execute(&cli) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if matches!(e, CliError::Usage(_)) {
                let _ = writeln!(stderr, "{}", Cli::command_usage());
            }
            return e.exit_code();
        }
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, &artifact).map_err(|source| CliError::Output {
            path: path.display().to_string(),
            source,
        }),
        None => stdout.write_all(artifact.as_bytes()).map_err(|source| CliError::Output {
            path: "standard output".into(),
            source,
        }),
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

impl Cli {
    fn command_usage() -> String {
        use clap::CommandFactory;
        Cli::command().render_usage().to_string()
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run(argv: Vec<String>) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
