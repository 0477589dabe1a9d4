//! Finite-`N` experiments for the central limit theorem.
//!
//! Moments of `S_N = N^{-1/2} (b_{N,1} + ... + b_{N,N})` are evaluated
//! exactly in the Jordan-Wigner model; the crossing/nesting estimator `X_N`
//! averages coefficient products over the index tuples of a pairing's class.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::{beta_factors, pair_limit_monomial, sample_base, CoefficientTable};
use crate::error::{Error, Result};
use crate::format_f64;
use crate::jw::{apply_jw_sum, SparseState};
use crate::pairings::PairPartition;
use crate::wickpoly::{wick_mixed, CovarianceSpec, Eps, EpsilonString};

/// Largest `N` accepted by [`moment_of_sn`].
pub const MAX_MOMENT_N: usize = 400;
/// Longest epsilon string accepted by [`moment_of_sn`].
pub const MAX_MOMENT_LEN: usize = 8;
/// Bound on the number of basis vectors an intermediate state may reach.
pub const MAX_SUPPORT: f64 = 4e6;
/// Largest pairing size accepted by [`lambda_estimate`].
pub const MAX_LAMBDA_BLOCKS: usize = 3;
/// Bound on `N^n` for [`lambda_estimate`].
pub const MAX_LAMBDA_TUPLES: f64 = 1e7;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Largest occupation reached while applying `eps` right to left to the
/// vacuum, or `None` if some suffix removes more particles than it adds.
fn peak_occupation(eps: &EpsilonString) -> Option<usize> {
    let mut level: i64 = 0;
    let mut peak = 0;
    for &e in eps.letters().iter().rev() {
        level += if e == Eps::Star { 1 } else { -1 };
        if level < 0 {
            return None;
        }
        peak = peak.max(level as usize);
    }
    Some(peak)
}

/// `phi_N(S_N^{e(1)} ... S_N^{e(r)})` in the Jordan-Wigner model built on
/// the first `n` indices of `table`.
pub fn moment_of_sn(n: usize, eps: &EpsilonString, table: &CoefficientTable) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    if n > MAX_MOMENT_N {
        return Err(Error::SizeLimit {
            what: "N",
            value: n,
            max: MAX_MOMENT_N,
        });
    }
    if eps.len() > MAX_MOMENT_LEN {
        return Err(Error::SizeLimit {
            what: "epsilon string length",
            value: eps.len(),
            max: MAX_MOMENT_LEN,
        });
    }
    if n > 1 && table.n() < n {
        return Err(Error::InvalidArgument(format!(
            "table covers {} indices, N = {n}",
            table.n()
        )));
    }
    if eps.count(Eps::One) != eps.count(Eps::Star) {
        return Ok(0.0);
    }
    let Some(peak) = peak_occupation(eps) else {
        return Ok(0.0);
    };
    let support = binomial(n, peak);
    if support > MAX_SUPPORT {
        return Err(Error::SizeLimit {
            what: "intermediate state support",
            value: support as usize,
            max: MAX_SUPPORT as usize,
        });
    }
    let mut state = SparseState::vacuum(n);
    for &e in eps.letters().iter().rev() {
        state = apply_jw_sum(e, &state, table);
    }
    let scale = (n as f64).powi((eps.len() / 2) as i32);
    Ok(state.vacuum_coeff() / scale)
}

/// The estimator `X_N`: the average over injective index assignments to the
/// blocks of `pairing` of the crossing/nesting coefficient product.
pub fn lambda_estimate(
    pairing: &PairPartition,
    eps: &EpsilonString,
    n: usize,
    table: &CoefficientTable,
) -> Result<f64> {
    let blocks = pairing.blocks();
    if eps.len() != pairing.size() {
        return Err(Error::InvalidArgument(format!(
            "pairing of [{}] with epsilon string of length {}",
            pairing.size(),
            eps.len()
        )));
    }
    if blocks > MAX_LAMBDA_BLOCKS {
        return Err(Error::SizeLimit {
            what: "pairing blocks",
            value: blocks,
            max: MAX_LAMBDA_BLOCKS,
        });
    }
    if (n as f64).powi(blocks as i32) > MAX_LAMBDA_TUPLES {
        return Err(Error::SizeLimit {
            what: "N^n tuple count",
            value: n.saturating_pow(blocks as u32),
            max: MAX_LAMBDA_TUPLES as usize,
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    if table.n() < n && blocks > 1 {
        return Err(Error::InvalidArgument(format!(
            "table covers {} indices, N = {n}",
            table.n()
        )));
    }
    if blocks > n {
        return Ok(0.0);
    }

    let letters = eps.letters();
    // (moving eps, passed eps, moving block, passed block)
    let factors: Vec<(Eps, Eps, usize, usize)> = beta_factors(pairing)
        .iter()
        .map(|f| {
            (
                letters[f.moving_pos - 1],
                letters[f.passed_pos - 1],
                f.moving_block,
                f.passed_block,
            )
        })
        .collect();

    fn rest(
        assign: &mut Vec<usize>,
        blocks: usize,
        n: usize,
        factors: &[(Eps, Eps, usize, usize)],
        table: &CoefficientTable,
    ) -> f64 {
        if assign.len() == blocks {
            return factors
                .iter()
                .map(|&(e, e2, a, b)| table.lookup(e, e2, assign[a], assign[b]))
                .product();
        }
        let mut sum = 0.0;
        for i in 1..=n {
            if assign.contains(&i) {
                continue;
            }
            assign.push(i);
            sum += rest(assign, blocks, n, factors, table);
            assign.pop();
        }
        sum
    }

    // Partial sums per first index are collected in order, so the total is
    // independent of the thread schedule.
    let partial: Vec<f64> = (1..=n)
        .into_par_iter()
        .map(|first| {
            let mut assign = Vec::with_capacity(blocks);
            assign.push(first);
            rest(&mut assign, blocks, n, &factors, table)
        })
        .collect();
    let total: f64 = partial.iter().sum();
    Ok(total / (n as f64).powi(blocks as i32))
}

/// `E(X_N) = q^cross t^nest N^{-n} N!/(N-n)!` under the two-point law, for
/// patterns whose pairs all read `(1, *)`.
pub fn lambda_expectation(
    pairing: &PairPartition,
    eps: &EpsilonString,
    n: usize,
    q: f64,
    t: f64,
) -> Result<Option<f64>> {
    let monomial = pair_limit_monomial(pairing, eps)?;
    if monomial.is_zero() {
        return Ok(None);
    }
    let blocks = pairing.blocks();
    let falling: f64 = (0..blocks).map(|k| n.saturating_sub(k) as f64).product();
    Ok(Some(monomial.eval(q, t) * falling / (n as f64).powi(blocks as i32)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Moment,
    Lambda,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Moment => "moment",
            Mode::Lambda => "lambda",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "moment" => Ok(Mode::Moment),
            "lambda" => Ok(Mode::Lambda),
            other => Err(Error::Parse(format!(
                "unknown mode {other:?} (expected moment or lambda)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub q: f64,
    pub t: f64,
    pub eps: EpsilonString,
    pub ns: Vec<usize>,
    pub seed: u64,
    pub mode: Mode,
    /// Required in lambda mode.
    pub pairing: Option<PairPartition>,
}

impl ExperimentConfig {
    /// Checks every field and reports all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.t.is_finite() && self.t > 0.0) {
            problems.push(format!("t = {} must be positive", self.t));
        }
        if !self.q.is_finite() {
            problems.push(format!("q = {} must be finite", self.q));
        } else if self.q.abs() > self.t {
            problems.push(format!("|q| = {} exceeds t = {}", self.q.abs(), self.t));
        }
        if self.ns.is_empty() {
            problems.push("Ns must not be empty".to_string());
        }
        if self.ns.contains(&0) {
            problems.push("Ns must be positive".to_string());
        }
        if self.ns.windows(2).any(|w| w[0] >= w[1]) {
            problems.push("Ns must be strictly increasing".to_string());
        }
        let max_n = self.ns.iter().copied().max().unwrap_or(0);
        match self.mode {
            Mode::Moment => {
                if max_n > MAX_MOMENT_N {
                    problems.push(format!("N = {max_n} exceeds {MAX_MOMENT_N} in moment mode"));
                }
                if self.eps.len() > MAX_MOMENT_LEN {
                    problems.push(format!(
                        "epsilon string of length {} exceeds {MAX_MOMENT_LEN}",
                        self.eps.len()
                    ));
                }
                if self.pairing.is_some() {
                    problems.push("a pairing only applies in lambda mode".to_string());
                }
            }
            Mode::Lambda => match &self.pairing {
                None => problems.push("lambda mode needs a pairing".to_string()),
                Some(p) => {
                    if p.size() != self.eps.len() {
                        problems.push(format!(
                            "pairing of [{}] with epsilon string of length {}",
                            p.size(),
                            self.eps.len()
                        ));
                    }
                    if p.blocks() > MAX_LAMBDA_BLOCKS {
                        problems.push(format!(
                            "pairing has {} blocks, at most {MAX_LAMBDA_BLOCKS} supported",
                            p.blocks()
                        ));
                    } else if (max_n as f64).powi(p.blocks() as i32) > MAX_LAMBDA_TUPLES {
                        problems.push(format!(
                            "N^n = {max_n}^{} exceeds {MAX_LAMBDA_TUPLES:e}",
                            p.blocks()
                        ));
                    }
                }
            },
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }

    /// The `N -> infinity` limit, when one is known.
    pub fn target(&self) -> Result<Option<f64>> {
        match self.mode {
            Mode::Moment => Ok(Some(
                wick_mixed(&self.eps, &CovarianceSpec::default())?.eval(self.q, self.t),
            )),
            Mode::Lambda => {
                let pairing = self
                    .pairing
                    .as_ref()
                    .ok_or_else(|| Error::Config(vec!["lambda mode needs a pairing".into()]))?;
                let monomial = pair_limit_monomial(pairing, &self.eps)?;
                Ok((!monomial.is_zero()).then(|| monomial.eval(self.q, self.t)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub value: f64,
    pub target: Option<f64>,
    pub abs_err: Option<f64>,
}

/// Run metadata echoed into JSON reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub version: String,
    pub eps: EpsilonString,
    pub q: f64,
    pub t: f64,
    pub seed: u64,
    pub mode: Mode,
    pub pairing: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub meta: ReportMeta,
    pub rows: Vec<ReportRow>,
}

pub const REPORT_HEADER: &str = "N,eps,q,t,seed,mode,value,target,abs_err";

fn opt_f64(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), format_f64)
}

fn parse_f64(field: &str, what: &str) -> Result<f64> {
    field
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} {field:?}")))
}

fn parse_opt_f64(field: &str, what: &str) -> Result<Option<f64>> {
    if field == "none" {
        Ok(None)
    } else {
        parse_f64(field, what).map(Some)
    }
}

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let m = &self.meta;
        let mut out = format!("{REPORT_HEADER}\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.n,
                m.eps,
                format_f64(m.q),
                format_f64(m.t),
                m.seed,
                m.mode,
                format_f64(r.value),
                opt_f64(r.target),
                opt_f64(r.abs_err)
            );
        }
        out
    }

    /// Parses [`ExperimentReport::to_csv`] output. The version and pairing
    /// are not part of the CSV and come back empty.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == REPORT_HEADER => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header {REPORT_HEADER}, got {other:?}"
                )))
            }
        }
        let mut meta: Option<ReportMeta> = None;
        let mut rows = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 9 {
                return Err(Error::Parse(format!("expected 9 fields in {line:?}")));
            }
            let row_meta = ReportMeta {
                version: String::new(),
                eps: f[1].parse()?,
                q: parse_f64(f[2], "q")?,
                t: parse_f64(f[3], "t")?,
                seed: f[4]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad seed {:?}", f[4])))?,
                mode: f[5].parse()?,
                pairing: None,
            };
            match &meta {
                None => meta = Some(row_meta),
                Some(m) if *m != row_meta => {
                    return Err(Error::Parse(format!("row {line:?} disagrees with earlier rows")))
                }
                Some(_) => {}
            }
            rows.push(ReportRow {
                n: f[0]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad N {:?}", f[0])))?,
                value: parse_f64(f[6], "value")?,
                target: parse_opt_f64(f[7], "target")?,
                abs_err: parse_opt_f64(f[8], "abs_err")?,
            });
        }
        let meta = meta.ok_or_else(|| Error::Parse("report has no rows".into()))?;
        Ok(Self { meta, rows })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Runs one experiment: a single base of length `max(Ns)` is sampled and
/// every row uses its restriction to the first `N` indices. With `jobs > 1`
/// rows are evaluated on a thread pool; the report does not depend on it.
pub fn convergence_experiment(config: &ExperimentConfig, jobs: usize) -> Result<ExperimentReport> {
    config.validate()?;
    let max_n = *config.ns.iter().max().expect("validated non-empty");
    let table = CoefficientTable::new(sample_base(max_n, config.q, config.t, config.seed)?, config.t)?;
    let target = config.target()?;

    let row = |&n: &usize| -> Result<ReportRow> {
        let value = match config.mode {
            Mode::Moment => moment_of_sn(n, &config.eps, &table)?,
            Mode::Lambda => lambda_estimate(
                config.pairing.as_ref().expect("validated"),
                &config.eps,
                n,
                &table,
            )?,
        };
        Ok(ReportRow {
            n,
            value,
            target,
            abs_err: target.map(|x| (value - x).abs()),
        })
    };

    let rows = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| config.ns.par_iter().map(row).collect::<Result<Vec<_>>>())?
    } else {
        config.ns.iter().map(row).collect::<Result<Vec<_>>>()?
    };

    Ok(ExperimentReport {
        meta: ReportMeta {
            version: env!("CARGO_PKG_VERSION").to_string(),
            eps: config.eps.clone(),
            q: config.q,
            t: config.t,
            seed: config.seed,
            mode: config.mode,
            pairing: config.pairing.as_ref().map(|p| p.to_string()),
        },
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::BaseSequence;

    fn eps(s: &str) -> EpsilonString {
        s.parse().unwrap()
    }

    fn random_table(n: usize, seed: u64) -> CoefficientTable {
        CoefficientTable::new(sample_base(n, 0.5, 1.25, seed).unwrap(), 1.25).unwrap()
    }

    fn config(mode: Mode) -> ExperimentConfig {
        ExperimentConfig {
            q: 0.5,
            t: 1.25,
            eps: eps("11**"),
            ns: vec![5, 10],
            seed: 3,
            mode,
            pairing: None,
        }
    }

    #[test]
    fn second_moment_is_one() {
        let table = random_table(37, 1);
        for n in [1, 2, 17, 37] {
            assert_eq!(moment_of_sn(n, &eps("1*"), &table).unwrap(), 1.0);
        }
    }

    #[test]
    fn vanishing_moments() {
        let table = random_table(12, 2);
        for e in ["1", "*", "11*", "***", "1*1*1", "*1", "**11", "1***", "*1*1"] {
            assert_eq!(moment_of_sn(12, &eps(e), &table).unwrap(), 0.0, "{e}");
        }
    }

    #[test]
    fn fourth_moment_closed_form() {
        // phi(S_N S_N S_N* S_N*) = (1 - 1/N) t + (2t/N^2) sum_{i<j} mu(i,j)
        let n = 9;
        let table = random_table(n, 4);
        let t = table.t();
        let sum: f64 = table.base().iter().map(|(_, _, m)| m).sum();
        let expected = (1.0 - 1.0 / n as f64) * t + 2.0 * t * sum / (n * n) as f64;
        let got = moment_of_sn(n, &eps("11**"), &table).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn moment_limits() {
        let table = random_table(10, 0);
        assert!(moment_of_sn(401, &eps("1*"), &table).is_err());
        assert!(moment_of_sn(10, &eps("11111*****"), &table).is_err());
        assert!(moment_of_sn(11, &eps("1*"), &table).is_err());
        assert!(moment_of_sn(0, &eps("1*"), &table).is_err());
    }

    #[test]
    fn lambda_trivial_pairing() {
        let table = random_table(50, 5);
        let p: PairPartition = "{(1,2),(3,4)}".parse().unwrap();
        for e in ["11**", "1*1*", "****"] {
            let x = lambda_estimate(&p, &eps(e), 50, &table).unwrap();
            assert_eq!(x, (50.0 * 49.0) / (50.0 * 50.0));
        }
    }

    #[test]
    fn lambda_with_deterministic_base() {
        // base identically q/t: every crossing contributes q, nesting t
        let n = 12;
        let (q, t) = (0.3, 0.8);
        let base = BaseSequence::new(n, vec![q / t; n * (n - 1) / 2]).unwrap();
        let table = CoefficientTable::new(base, t).unwrap();
        let falling = 1.0 - 1.0 / n as f64;
        let cross: PairPartition = "{(1,3),(2,4)}".parse().unwrap();
        let nest: PairPartition = "{(1,4),(2,3)}".parse().unwrap();
        let xc = lambda_estimate(&cross, &eps("11**"), n, &table).unwrap();
        let xn = lambda_estimate(&nest, &eps("11**"), n, &table).unwrap();
        assert!((xc - q * falling).abs() < 1e-12);
        // a nesting contributes t mu^2 when the outer index is smaller, t otherwise
        let m = q / t;
        assert!((xn - t * (m * m + 1.0) / 2.0 * falling).abs() < 1e-12);
        let e = lambda_expectation(&cross, &eps("11**"), n, q, t).unwrap().unwrap();
        assert!((e - q * falling).abs() < 1e-15);
        assert_eq!(lambda_expectation(&cross, &eps("1*1*"), n, q, t).unwrap(), None);
    }

    #[test]
    fn lambda_limits() {
        let table = random_table(10, 0);
        let p: PairPartition = "{(1,2),(3,4),(5,6),(7,8)}".parse().unwrap();
        assert!(lambda_estimate(&p, &eps("11**11**"), 10, &table).is_err());
        let p: PairPartition = "{(1,2),(3,4)}".parse().unwrap();
        assert!(lambda_estimate(&p, &eps("1*"), 10, &table).is_err());
        assert!(lambda_estimate(&p, &eps("11**"), 4000, &table).is_err());
    }

    #[test]
    fn validation_collects_every_problem() {
        let mut c = config(Mode::Moment);
        c.ns = vec![];
        c.q = 2.0;
        c.pairing = Some("{(1,2)}".parse().unwrap());
        match c.validate() {
            Err(Error::Config(p)) => assert_eq!(p.len(), 3, "{p:?}"),
            other => panic!("{other:?}"),
        }
        let mut c = config(Mode::Moment);
        c.ns = vec![10, 10];
        assert!(c.validate().is_err());
        let c = config(Mode::Lambda);
        assert!(c.validate().is_err());
        assert!(config(Mode::Moment).validate().is_ok());
    }

    #[test]
    fn experiment_is_deterministic() {
        let c = config(Mode::Moment);
        let a = convergence_experiment(&c, 1).unwrap();
        let b = convergence_experiment(&c, 3).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.rows.len(), 2);
        assert_eq!(a.rows[0].target, Some(1.75));
    }

    #[test]
    fn lambda_report_without_target() {
        let mut c = config(Mode::Lambda);
        c.eps = eps("1*1*");
        c.pairing = Some("{(1,3),(2,4)}".parse().unwrap());
        let r = convergence_experiment(&c, 1).unwrap();
        assert!(r.rows.iter().all(|row| row.target.is_none() && row.abs_err.is_none()));
        assert!(r.to_csv().lines().nth(1).unwrap().ends_with(",none,none"));
    }

    #[test]
    fn report_round_trips() {
        let r = convergence_experiment(&config(Mode::Moment), 1).unwrap();
        let csv = r.to_csv();
        assert!(csv.starts_with("N,eps,q,t,seed,mode,value,target,abs_err\n5,11**,"));
        let back = ExperimentReport::from_csv(&csv).unwrap();
        assert_eq!(back.to_csv(), csv);
        assert_eq!(back.rows, r.rows);
        assert_eq!(ExperimentReport::from_json(&r.to_json()).unwrap(), r);
        assert!(ExperimentReport::from_csv("N,eps\n").is_err());
    }
}
