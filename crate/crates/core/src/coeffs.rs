//! Commutation coefficients `mu_{e,e'}(i,j)` for the relation
//! `b_i^e b_j^e' = mu_{e',e}(j,i) b_j^e' b_i^e`.
//!
//! A table is generated from a base sequence `mu(i,j) = mu_{*,*}(i,j)`,
//! `i < j`, and a parameter `t > 0`:
//!
//! | `(e, e')` | `mu_{e,e'}(i,j)`, `i < j` |
//! |-----------|---------------------------|
//! | `(*,*)`   | `mu(i,j)`                 |
//! | `(*,1)`   | `t mu(i,j)`               |
//! | `(1,1)`   | `1 / mu(i,j)`             |
//! | `(1,*)`   | `1 / (t mu(i,j))`         |
//!
//! and `mu_{e,e'}(i,j) = 1 / mu_{e',e}(j,i)` for `i > j`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::distributions::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format_f64;
use crate::pairings::{class_of, PairPartition};
use crate::wickpoly::{Eps, EpsilonString, QTPolynomial};

/// Derives the seed of sub-task `k` from a master seed.
///
/// This is the SplitMix64 output function applied to
/// `master + (k + 1) * 0x9E3779B97F4A7C15` (wrapping). The constants are part
/// of the output format and must not change.
pub fn mix_seed(master: u64, k: u64) -> u64 {
    let mut z = master.wrapping_add(k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Base coefficients `mu(i,j)` for all `1 <= i < j <= n`.
///
/// Storage is column-major in `j`, so the base for a prefix `1..=n'` is a
/// prefix of the storage: restricting a sampled base never resamples it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseSequence {
    n: usize,
    values: Vec<f64>,
}

fn tri_index(i: usize, j: usize) -> usize {
    (j - 1) * (j - 2) / 2 + (i - 1)
}

fn tri_len(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl BaseSequence {
    /// `values` in storage order: `mu(1,2), mu(1,3), mu(2,3), mu(1,4), ...`.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != tri_len(n) {
            return Err(Error::InvalidArgument(format!(
                "base for n = {n} needs {} values, got {}",
                tri_len(n),
                values.len()
            )));
        }
        let base = Self { n, values };
        for (i, j, mu) in base.iter() {
            if mu == 0.0 || !mu.is_finite() {
                return Err(Error::InvalidCoefficient { i, j, value: mu });
            }
        }
        Ok(base)
    }

    /// Builds a base from an `(i, j) -> mu` map with `i < j`, which must cover
    /// every pair up to the largest index present. An empty map gives `n = 1`.
    pub fn from_map(map: &BTreeMap<(usize, usize), f64>) -> Result<Self> {
        let n = map.keys().map(|&(_, j)| j).max().unwrap_or(0).max(1);
        let mut values = vec![f64::NAN; tri_len(n)];
        for (&(i, j), &mu) in map {
            if i == 0 || i >= j {
                return Err(Error::InvalidArgument(format!(
                    "base keys need 1 <= i < j, got ({i},{j})"
                )));
            }
            values[tri_index(i, j)] = mu;
        }
        if let Some(k) = values.iter().position(|v| v.is_nan()) {
            let (i, j) = pair_of_index(k);
            return Err(Error::InvalidArgument(format!("base is missing mu({i},{j})")));
        }
        Self::new(n, values)
    }

    /// Largest index covered.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `mu(i,j)` for `1 <= i < j <= n`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(0 < i && i < j && j <= self.n);
        self.values[tri_index(i, j)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The base for indices `1..=n`.
    pub fn restrict(&self, n: usize) -> Result<Self> {
        if n > self.n {
            return Err(Error::InvalidArgument(format!(
                "cannot restrict a base on {} indices to {n}",
                self.n
            )));
        }
        Ok(Self {
            n,
            values: self.values[..tri_len(n)].to_vec(),
        })
    }

    /// `(i, j, mu)` in lexicographic order of `(i, j)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (1..=self.n).flat_map(move |i| (i + 1..=self.n).map(move |j| (i, j, self.get(i, j))))
    }

    /// CSV with header `i,j,mu`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,mu\n");
        for (i, j, mu) in self.iter() {
            let _ = writeln!(out, "{i},{j},{}", format_f64(mu));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "i,j,mu" => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header i,j,mu, got {other:?}"
                )))
            }
        }
        let mut map = BTreeMap::new();
        for (k, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let bad = |what: &str| Error::Parse(format!("line {}: {what}: {line:?}", k + 2));
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let [i, j, mu] = fields[..] else {
                return Err(bad("expected 3 fields"));
            };
            let i: usize = i.parse().map_err(|_| bad("bad i"))?;
            let j: usize = j.parse().map_err(|_| bad("bad j"))?;
            let mu: f64 = mu.parse().map_err(|_| bad("bad mu"))?;
            if map.insert((i, j), mu).is_some() {
                return Err(bad("duplicate pair"));
            }
        }
        Self::from_map(&map)
    }
}

fn pair_of_index(k: usize) -> (usize, usize) {
    let mut j = 2;
    while tri_index(1, j + 1) <= k {
        j += 1;
    }
    (k - tri_index(1, j) + 1, j)
}

/// A law for the base coefficients; implementations must be non-vanishing
/// with `E(mu) = q/t` and `E(mu^2) = 1`.
pub trait CoefficientLaw {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;
}

/// The two-point law on `{+1, -1}` with `P(+1) = (1 + q/t) / 2`.
#[derive(Debug, Clone, Copy)]
pub struct TwoPointLaw {
    plus: Bernoulli,
}

impl TwoPointLaw {
    pub fn new(q: f64, t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Parameter(format!("t = {t} must be positive")));
        }
        if !q.is_finite() || q.abs() > t {
            return Err(Error::Parameter(format!(
                "|q| = {} exceeds t = {t}: P(mu = +1) would leave [0, 1]",
                q.abs()
            )));
        }
        let p = ((1.0 + q / t) / 2.0).clamp(0.0, 1.0);
        let plus = Bernoulli::new(p).map_err(|e| Error::Parameter(e.to_string()))?;
        Ok(Self { plus })
    }
}

impl CoefficientLaw for TwoPointLaw {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.plus.sample(rng) {
            1.0
        } else {
            -1.0
        }
    }
}

/// Draws `mu(i,j)` for `1 <= i < j <= n` from `law`, in storage order, using
/// a ChaCha8 stream seeded by `seed`.
pub fn sample_base_with<L: CoefficientLaw>(n: usize, law: &L, seed: u64) -> Result<BaseSequence> {
    if n == 0 {
        return Err(Error::Parameter("base size N must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..tri_len(n)).map(|_| law.sample(&mut rng)).collect();
    BaseSequence::new(n, values)
}

/// Samples a base from the two-point law with mean `q/t`.
pub fn sample_base(n: usize, q: f64, t: f64, seed: u64) -> Result<BaseSequence> {
    sample_base_with(n, &TwoPointLaw::new(q, t)?, seed)
}

/// The full coefficient family derived from a base and `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    t: f64,
    sqrt_t: f64,
    base: BaseSequence,
}

impl CoefficientTable {
    pub fn new(base: BaseSequence, t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Parameter(format!("t = {t} must be positive")));
        }
        Ok(Self {
            t,
            sqrt_t: t.sqrt(),
            base,
        })
    }

    /// Builds a table from an `(i, j) -> mu` map, `i < j`.
    pub fn from_map(map: &BTreeMap<(usize, usize), f64>, t: f64) -> Result<Self> {
        Self::new(BaseSequence::from_map(map)?, t)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn sqrt_t(&self) -> f64 {
        self.sqrt_t
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn base(&self) -> &BaseSequence {
        &self.base
    }

    /// `mu(i,j) = mu_{*,*}(i,j)` for `i < j`.
    pub fn mu(&self, i: usize, j: usize) -> f64 {
        self.base.get(i, j)
    }

    pub fn restrict(&self, n: usize) -> Result<Self> {
        Self::new(self.base.restrict(n)?, self.t)
    }

    /// `mu_{e,e'}(i,j)` for `i != j`, both in `1..=n`.
    ///
    /// # Panics
    /// On `i == j` or an index outside the table; see [`Self::try_lookup`].
    pub fn lookup(&self, e: Eps, e2: Eps, i: usize, j: usize) -> f64 {
        if i < j {
            let m = self.base.get(i, j);
            match (e, e2) {
                (Eps::Star, Eps::Star) => m,
                (Eps::Star, Eps::One) => self.t * m,
                (Eps::One, Eps::One) => 1.0 / m,
                (Eps::One, Eps::Star) => 1.0 / (self.t * m),
            }
        } else {
            assert!(i != j, "commutation coefficient needs distinct indices");
            1.0 / self.lookup(e2, e, j, i)
        }
    }

    pub fn try_lookup(&self, e: Eps, e2: Eps, i: usize, j: usize) -> Result<f64> {
        for k in [i, j] {
            if k == 0 || k > self.n() {
                return Err(Error::IndexOutOfRange { index: k, max: self.n() });
            }
        }
        if i == j {
            return Err(Error::InvalidArgument(format!(
                "mu({i},{j}) needs distinct indices"
            )));
        }
        Ok(self.lookup(e, e2, i, j))
    }
}

/// Free-function form of [`CoefficientTable::from_map`].
pub fn build_table(base: &BTreeMap<(usize, usize), f64>, t: f64) -> Result<CoefficientTable> {
    CoefficientTable::from_map(base, t)
}

/// One commutation performed while normal-ordering: the right endpoint of
/// block `moving_block` passes position `passed_pos` of block `passed_block`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BetaFactor {
    pub moving_pos: usize,
    pub passed_pos: usize,
    pub moving_block: usize,
    pub passed_block: usize,
}

/// Factor list of the crossing/nesting product for a pairing: one factor
/// `mu_{e(z_j), e(w_k)}` per crossing `(w_j, w_k, z_j, z_k)` and two factors
/// `mu_{e(z_j), e(z_m)} mu_{e(z_j), e(w_m)}` per nesting `(w_j, w_m, z_m, z_j)`.
pub fn beta_factors(pairing: &PairPartition) -> Vec<BetaFactor> {
    let blocks = pairing.block_of_positions();
    let factor = |moving: usize, passed: usize| BetaFactor {
        moving_pos: moving,
        passed_pos: passed,
        moving_block: blocks[moving - 1],
        passed_block: blocks[passed - 1],
    };
    let report = pairing.cross_nest();
    let mut out = Vec::with_capacity(report.cross_count() + 2 * report.nest_count());
    for &[_, wk, zj, _] in &report.cross_set {
        out.push(factor(zj, wk));
    }
    for &[_, wm, zm, zj] in &report.nest_set {
        out.push(factor(zj, zm));
        out.push(factor(zj, wm));
    }
    out
}

/// Outcome of normal-ordering a pair-class product.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalOrderResult {
    /// Product of the coefficients incurred by the transpositions.
    pub beta: f64,
    /// The same product evaluated from the crossing/nesting formula.
    pub beta_closed_form: f64,
    pub pairing: PairPartition,
    /// `e(w_1) e(z_1) ... e(w_n) e(z_n)`.
    pub pattern: EpsilonString,
}

impl NormalOrderResult {
    /// Whether both routes to beta agree to relative tolerance `tol`.
    pub fn routes_agree(&self, tol: f64) -> bool {
        (self.beta - self.beta_closed_form).abs()
            <= tol * self.beta.abs().max(self.beta_closed_form.abs()).max(1.0)
    }
}

/// Brings `b_{i(1)}^{e(1)} ... b_{i(r)}^{e(r)}` into interval order.
///
/// Repeatedly takes the leftmost remaining factor, commutes its partner
/// leftwards until adjacent, records one coefficient per transposition and
/// drops the finished pair. Requires every index to occur exactly twice.
pub fn normal_order(
    tuple: &[usize],
    eps: &EpsilonString,
    table: &CoefficientTable,
) -> Result<NormalOrderResult> {
    if tuple.len() != eps.len() {
        return Err(Error::InvalidArgument(format!(
            "tuple of length {} with epsilon string of length {}",
            tuple.len(),
            eps.len()
        )));
    }
    let class = class_of(tuple);
    let pairing = class.as_pair_partition().ok_or_else(|| {
        Error::NotPairClass(format!("{tuple:?} has class {class}"))
    })?;
    for &i in tuple {
        if i == 0 || i > table.n() {
            return Err(Error::IndexOutOfRange { index: i, max: table.n() });
        }
    }

    let mut working: Vec<(usize, Eps)> = tuple.iter().copied().zip(eps.letters().iter().copied()).collect();
    let mut beta = 1.0;
    let mut pattern = Vec::with_capacity(tuple.len());
    while !working.is_empty() {
        let (index, e_left) = working.remove(0);
        let k = working
            .iter()
            .position(|&(i, _)| i == index)
            .expect("pair class guarantees a partner");
        let (_, e_right) = working[k];
        for &(passed_index, passed_eps) in working[..k].iter().rev() {
            beta *= table.lookup(e_right, passed_eps, index, passed_index);
        }
        working.remove(k);
        pattern.push(e_left);
        pattern.push(e_right);
    }

    let letters = eps.letters();
    let beta_closed_form = beta_factors(&pairing)
        .iter()
        .map(|f| {
            table.lookup(
                letters[f.moving_pos - 1],
                letters[f.passed_pos - 1],
                tuple[f.moving_pos - 1],
                tuple[f.passed_pos - 1],
            )
        })
        .product();

    let result = NormalOrderResult {
        beta,
        beta_closed_form,
        pairing,
        pattern: EpsilonString::new(pattern)?,
    };
    debug_assert!(result.routes_agree(1e-9), "{result:?}");
    Ok(result)
}

/// Almost-sure limit `q^cross t^nest` of the estimator for a pairing whose
/// pairs all read `(1, *)`; the zero polynomial for any other pattern.
pub fn pair_limit_monomial(pairing: &PairPartition, eps: &EpsilonString) -> Result<QTPolynomial> {
    if eps.len() != pairing.size() {
        return Err(Error::InvalidArgument(format!(
            "pairing of [{}] with epsilon string of length {}",
            pairing.size(),
            eps.len()
        )));
    }
    let letters = eps.letters();
    let annihilator_first = pairing
        .pairs()
        .iter()
        .all(|&(w, z)| letters[w - 1] == Eps::One && letters[z - 1] == Eps::Star);
    if !annihilator_first {
        return Ok(QTPolynomial::zero());
    }
    let (c, v) = pairing.stats();
    Ok(QTPolynomial::qt(c as u32, v as u32))
}
