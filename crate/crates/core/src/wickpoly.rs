//! Exact polynomials in `(q, t)` and the Wick-type moment sums over pair
//! partitions.
//!
//! The moment of a word `b^{eps(1)} ... b^{eps(2n)}` is a sum over pairings of
//! `q^cross t^nest` times the product of the pair covariances
//! `phi(b^{eps(w)} b^{eps(z)})`. Coefficients are exact rationals so the
//! rendered polynomials are stable across platforms.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairings::{for_each_pair_partition, pair_stats, MAX_ENUM_BLOCKS};

/// One letter of the exponent alphabet `{1, *}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Eps {
    /// The plain element `b` (an annihilator in the Fock picture).
    One,
    /// The adjoint `b*` (a creator in the Fock picture).
    Star,
}

impl Eps {
    pub fn as_char(self) -> char {
        match self {
            Eps::One => '1',
            Eps::Star => '*',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '1' => Some(Eps::One),
            '*' => Some(Eps::Star),
            _ => None,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Eps::One => Eps::Star,
            Eps::Star => Eps::One,
        }
    }

    fn index(self) -> usize {
        match self {
            Eps::One => 0,
            Eps::Star => 1,
        }
    }
}

/// A non-empty word over `{1, *}`, rendered as e.g. `11**`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EpsilonString(Vec<Eps>);

impl EpsilonString {
    pub fn new(letters: Vec<Eps>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidArgument(
                "epsilon string must be non-empty".into(),
            ));
        }
        Ok(Self(letters))
    }

    pub fn letters(&self) -> &[Eps] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, e: Eps) -> usize {
        self.0.iter().filter(|&&x| x == e).count()
    }

    /// Every string of length `r`, in the order `1 < *` read left to right.
    pub fn all_of_length(r: usize) -> Vec<EpsilonString> {
        (0..1usize << r)
            .map(|mask| {
                EpsilonString(
                    (0..r)
                        .map(|k| {
                            if mask >> (r - 1 - k) & 1 == 1 {
                                Eps::Star
                            } else {
                                Eps::One
                            }
                        })
                        .collect(),
                )
            })
            .collect()
    }
}

impl fmt::Display for EpsilonString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|e| write!(f, "{}", e.as_char()))
    }
}

impl FromStr for EpsilonString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .trim()
            .chars()
            .map(|c| {
                Eps::from_char(c).ok_or_else(|| {
                    Error::Parse(format!("epsilon strings use '1' and '*', found {c:?}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters)
    }
}

impl Serialize for EpsilonString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for EpsilonString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses an exact rational from `3`, `-0.25`, `7/8` or `1.5e-3`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(all_digits.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= Pow::pow(&ten, scale as u32);
    } else {
        value /= Pow::pow(&ten, (-scale) as u32);
    }
    Ok(if negative { -value } else { value })
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A polynomial in `(q, t)` with exact rational coefficients.
///
/// Terms are keyed by `(deg_q, deg_t)`; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QTPolynomial {
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl QTPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, BigRational::one())
    }

    pub fn monomial(deg_q: u32, deg_t: u32, coeff: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(deg_q, deg_t, coeff);
        p
    }

    /// `q^a t^b` with coefficient 1.
    pub fn qt(deg_q: u32, deg_t: u32) -> Self {
        Self::monomial(deg_q, deg_t, BigRational::one())
    }

    pub fn from_counts<I>(counts: I) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), i64)>,
    {
        let mut p = Self::zero();
        for ((a, b), c) in counts {
            p.add_term(a, b, BigRational::from_integer(BigInt::from(c)));
        }
        p
    }

    pub fn add_term(&mut self, deg_q: u32, deg_t: u32, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let key = (deg_q, deg_t);
        let entry = self.terms.entry(key).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, deg_q: u32, deg_t: u32) -> BigRational {
        self.terms
            .get(&(deg_q, deg_t))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Largest `deg_q + deg_t` over the stored terms.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(a, b)| a + b).max()
    }

    /// The polynomial with the roles of `q` and `t` exchanged.
    pub fn swap_qt(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| ((b, a), c.clone()))
                .collect(),
        }
    }

    /// Exact substitution `q = value`, leaving a polynomial in `t` alone.
    pub fn substitute_q(&self, value: &BigRational) -> Self {
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            out.add_term(0, b, c * Pow::pow(value, a));
        }
        out
    }

    /// Exact evaluation at rational `(q, t)`.
    pub fn eval_exact(&self, q: &BigRational, t: &BigRational) -> BigRational {
        self.terms
            .iter()
            .map(|(&(a, b), c)| c * Pow::pow(q, a) * Pow::pow(t, b))
            .fold(BigRational::zero(), |acc, x| acc + x)
    }

    /// Horner evaluation at real `(q, t)`: inner Horner in `t` for each
    /// power of `q`, then outer Horner in `q`.
    pub fn eval(&self, q: f64, t: f64) -> f64 {
        let Some(max_q) = self.terms.keys().map(|&(a, _)| a).max() else {
            return 0.0;
        };
        let mut rows: Vec<Vec<f64>> = vec![Vec::new(); max_q as usize + 1];
        for (&(a, b), c) in &self.terms {
            let row = &mut rows[a as usize];
            if row.len() <= b as usize {
                row.resize(b as usize + 1, 0.0);
            }
            row[b as usize] = rational_to_f64(c);
        }
        rows.iter().rev().fold(0.0, |acc, row| {
            let inner = row.iter().rev().fold(0.0, |s, &c| s * t + c);
            acc * q + inner
        })
    }
}

impl Add for &QTPolynomial {
    type Output = QTPolynomial;

    fn add(self, rhs: &QTPolynomial) -> QTPolynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for QTPolynomial {
    type Output = QTPolynomial;

    fn add(mut self, rhs: QTPolynomial) -> QTPolynomial {
        self += &rhs;
        self
    }
}

impl AddAssign<&QTPolynomial> for QTPolynomial {
    fn add_assign(&mut self, rhs: &QTPolynomial) {
        for (&(a, b), c) in &rhs.terms {
            self.add_term(a, b, c.clone());
        }
    }
}

impl Mul for &QTPolynomial {
    type Output = QTPolynomial;

    fn mul(self, rhs: &QTPolynomial) -> QTPolynomial {
        let mut out = QTPolynomial::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                out.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for QTPolynomial {
    type Output = QTPolynomial;

    fn mul(self, rhs: QTPolynomial) -> QTPolynomial {
        &self * &rhs
    }
}

impl Neg for QTPolynomial {
    type Output = QTPolynomial;

    fn neg(self) -> QTPolynomial {
        QTPolynomial {
            terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect(),
        }
    }
}

fn render_monomial(a: u32, b: u32) -> String {
    let factor = |name: &str, d: u32| match d {
        0 => None,
        1 => Some(name.to_string()),
        _ => Some(format!("{name}^{d}")),
    };
    [factor("q", a), factor("t", b)]
        .into_iter()
        .flatten()
        .collect::<Vec<_>>()
        .join("*")
}

/// Canonical rendering `c*q^a*t^b + ...`, terms graded by total degree with `q` before `t`. Unit
/// coefficients and exponents are elided, so `1 + q + t` is the 4th field
/// moment and the zero polynomial renders as `0`.
impl fmt::Display for QTPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // graded by total degree, q before t within a degree
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by_key(|&(&(a, b), _)| (a + b, std::cmp::Reverse(a)));
        for (k, (&(a, b), c)) in ordered.into_iter().enumerate() {
            let negative = c.is_negative();
            match (k, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let magnitude = c.abs();
            let mono = render_monomial(a, b);
            if mono.is_empty() {
                write!(f, "{magnitude}")?;
            } else if magnitude.is_one() {
                f.write_str(&mono)?;
            } else {
                write!(f, "{magnitude}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for QTPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut out = QTPolynomial::zero();
        let mut start = 0;
        let bytes = compact.as_bytes();
        let mut split_points = Vec::new();
        for (k, &ch) in bytes.iter().enumerate() {
            if (ch == b'+' || ch == b'-') && k > 0 && bytes[k - 1] != b'^' && bytes[k - 1] != b'*'
            {
                split_points.push(k);
            }
        }
        split_points.push(compact.len());
        for end in split_points {
            let term = &compact[start..end];
            start = end;
            let (sign, body) = match term.as_bytes().first() {
                Some(b'-') => (-1, &term[1..]),
                Some(b'+') => (1, &term[1..]),
                _ => (1, term),
            };
            if body.is_empty() {
                return Err(Error::Parse(format!("dangling sign in {s:?}")));
            }
            let mut coeff = BigRational::from_integer(BigInt::from(sign));
            let (mut a, mut b) = (0u32, 0u32);
            for factor in body.split('*') {
                let (name, power) = match factor.split_once('^') {
                    Some((n, p)) => (
                        n,
                        p.parse::<u32>()
                            .map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?,
                    ),
                    None => (factor, 1),
                };
                match name {
                    "q" => a += power,
                    "t" => b += power,
                    _ => coeff *= Pow::pow(&parse_rational(name)?, power),
                }
            }
            out.add_term(a, b, coeff);
        }
        Ok(out)
    }
}

/// Pair covariances `phi(b^e b^e')` for `e, e'` in `{1, *}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CovarianceSpec {
    values: [[BigRational; 2]; 2],
}

impl Default for CovarianceSpec {
    /// `phi(b b*) = 1`, every other second moment vanishes.
    fn default() -> Self {
        let mut spec = Self::zeros();
        spec.set(Eps::One, Eps::Star, BigRational::one());
        spec
    }
}

impl CovarianceSpec {
    pub fn zeros() -> Self {
        Self {
            values: std::array::from_fn(|_| std::array::from_fn(|_| BigRational::zero())),
        }
    }

    pub fn get(&self, left: Eps, right: Eps) -> &BigRational {
        &self.values[left.index()][right.index()]
    }

    pub fn set(&mut self, left: Eps, right: Eps, value: BigRational) {
        self.values[left.index()][right.index()] = value;
    }

    /// Sets an entry from a float; the binary value is converted exactly.
    pub fn set_f64(&mut self, left: Eps, right: Eps, value: f64) -> Result<()> {
        let r = BigRational::from_float(value)
            .ok_or_else(|| Error::InvalidArgument(format!("covariance {value} is not finite")))?;
        self.set(left, right, r);
        Ok(())
    }

    pub fn get_f64(&self, left: Eps, right: Eps) -> f64 {
        rational_to_f64(self.get(left, right))
    }

    pub fn is_default(&self) -> bool {
        *self == Self::default()
    }
}

impl FromStr for CovarianceSpec {
    type Err = Error;

    /// Parses overrides such as `1*=1,*1=1/2`, starting from the default.
    fn from_str(s: &str) -> Result<Self> {
        let mut spec = Self::default();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {item:?}")))?;
            let letters: Vec<Eps> = key
                .trim()
                .chars()
                .map(|c| Eps::from_char(c).ok_or_else(|| Error::Parse(format!("bad key {key:?}"))))
                .collect::<Result<_>>()?;
            let [left, right] = letters[..] else {
                return Err(Error::Parse(format!(
                    "covariance keys have two letters, got {key:?}"
                )));
            };
            spec.set(left, right, parse_rational(value)?);
        }
        Ok(spec)
    }
}

fn check_wick_size(len: usize) -> Result<usize> {
    let n = len / 2;
    if n > MAX_ENUM_BLOCKS {
        return Err(Error::SizeLimit {
            what: "pairing block count",
            value: n,
            max: MAX_ENUM_BLOCKS,
        });
    }
    Ok(n)
}

/// `sum over pairings of [2n] of q^cross t^nest`, the `2n`-th moment of a
/// unit-norm `(q,t)`-Gaussian.
pub fn wick_field(n: usize) -> Result<QTPolynomial> {
    let mut counts: HashMap<(u32, u32), i64> = HashMap::new();
    for_each_pair_partition(n, |pairs| {
        let (c, v) = pair_stats(pairs);
        *counts.entry((c as u32, v as u32)).or_default() += 1;
    })?;
    Ok(QTPolynomial::from_counts(counts))
}

/// Mixed moment `sum_V q^cross t^nest prod_i cov(eps(w_i), eps(z_i))`.
///
/// Odd-length words have vanishing moments and return the zero polynomial.
pub fn wick_mixed(eps: &EpsilonString, cov: &CovarianceSpec) -> Result<QTPolynomial> {
    wick_sum(eps, cov, None)
}

/// Joint moment of `a(e_{l_1})^{eps(1)} ... a(e_{l_r})^{eps(r)}` for
/// orthonormal basis labels: only pairings matching equal labels contribute.
pub fn wick_joint(labels: &[usize], eps: &EpsilonString) -> Result<QTPolynomial> {
    wick_joint_with(labels, eps, &CovarianceSpec::default())
}

/// [`wick_joint`] with an explicit covariance.
pub fn wick_joint_with(
    labels: &[usize],
    eps: &EpsilonString,
    cov: &CovarianceSpec,
) -> Result<QTPolynomial> {
    if labels.len() != eps.len() {
        return Err(Error::InvalidArgument(format!(
            "{} labels for an epsilon string of length {}",
            labels.len(),
            eps.len()
        )));
    }
    wick_sum(eps, cov, Some(labels))
}

fn wick_sum(
    eps: &EpsilonString,
    cov: &CovarianceSpec,
    labels: Option<&[usize]>,
) -> Result<QTPolynomial> {
    if eps.len() % 2 == 1 {
        return Ok(QTPolynomial::zero());
    }
    let n = check_wick_size(eps.len())?;
    let letters = eps.letters();
    let nonzero: [[bool; 2]; 2] =
        std::array::from_fn(|a| std::array::from_fn(|b| !cov.values[a][b].is_zero()));

    // Keyed by (cross, nest, usage count of each covariance entry): the pair
    // weight depends on the pairing only through those counts.
    let mut buckets: HashMap<(u32, u32, [u32; 4]), i64> = HashMap::new();
    for_each_pair_partition(n, |pairs| {
        let mut usage = [0u32; 4];
        for &(w, z) in pairs {
            if let Some(l) = labels {
                if l[w - 1] != l[z - 1] {
                    return;
                }
            }
            let (a, b) = (letters[w - 1].index(), letters[z - 1].index());
            if !nonzero[a][b] {
                return;
            }
            usage[2 * a + b] += 1;
        }
        let (c, v) = pair_stats(pairs);
        *buckets.entry((c as u32, v as u32, usage)).or_default() += 1;
    })?;

    let mut out = QTPolynomial::zero();
    for ((c, v, usage), count) in buckets {
        let mut weight = BigRational::from_integer(BigInt::from(count));
        for (slot, &k) in usage.iter().enumerate() {
            if k > 0 {
                weight *= Pow::pow(&cov.values[slot / 2][slot % 2], k);
            }
        }
        out.add_term(c, v, weight);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> QTPolynomial {
        s.parse().unwrap()
    }

    fn eps(s: &str) -> EpsilonString {
        s.parse().unwrap()
    }

    #[test]
    fn evaluation() {
        assert_eq!(poly("1 + q*t").eval(2.0, 3.0), 7.0);
        assert_eq!(QTPolynomial::zero().eval(0.3, -4.0), 0.0);
        assert_eq!(poly("q + t").eval(0.5, 1.25), 1.75);
        assert_eq!(poly("2*q^2*t - 3 + t^3").eval(2.0, 0.5), 2.0 * 4.0 * 0.5 - 3.0 + 0.125);
    }

    #[test]
    fn rendering() {
        assert_eq!(QTPolynomial::zero().to_string(), "0");
        assert_eq!(poly("t + q + 1").to_string(), "1 + q + t");
        assert_eq!(poly("-q + 2*t^2 - 1/2*q^3*t").to_string(), "-q + 2*t^2 - 1/2*q^3*t");
        assert_eq!(poly("q - q").to_string(), "0");
        assert_eq!(poly("3*q*q").to_string(), "3*q^2");
    }

    #[test]
    fn rational_parsing() {
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(parse_rational("0.5").unwrap(), half);
        assert_eq!(parse_rational("1/2").unwrap(), half);
        assert_eq!(parse_rational("5e-1").unwrap(), half);
        assert_eq!(parse_rational("-1.25").unwrap(), BigRational::new((-5).into(), 4.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn field_moments() {
        assert_eq!(wick_field(1).unwrap(), QTPolynomial::one());
        assert_eq!(wick_field(2).unwrap(), poly("1 + q + t"));
        let zero = BigRational::zero();
        assert_eq!(wick_field(3).unwrap().substitute_q(&zero), poly("1 + 2*t + t^2 + t^3"));
        assert!(wick_field(0).is_err());
        assert!(wick_field(9).is_err());
    }

    #[test]
    fn mixed_moments() {
        let cov = CovarianceSpec::default();
        assert_eq!(wick_mixed(&eps("11**"), &cov).unwrap(), poly("q + t"));
        assert_eq!(wick_mixed(&eps("1*1*"), &cov).unwrap(), QTPolynomial::one());
        assert!(wick_mixed(&eps("1***"), &cov).unwrap().is_zero());
        assert!(wick_mixed(&eps("1*1"), &cov).unwrap().is_zero());
        assert!(wick_mixed(&eps(&"1*".repeat(9)), &cov).is_err());
    }

    #[test]
    fn general_covariance() {
        let cov: CovarianceSpec = "1*=1,*1=1/2,11=0,**=0".parse().unwrap();
        // {(1,2),(3,4)} and {(1,3),(2,4)} read (1,*),(*,1); {(1,4),(2,3)} reads (1,1),(*,*)
        assert_eq!(wick_mixed(&eps("1**1"), &cov).unwrap(), poly("1/2 + 1/2*q"));
        let all_ones: CovarianceSpec = "1*=1,*1=1,11=1,**=1".parse().unwrap();
        assert_eq!(wick_mixed(&eps("1111"), &all_ones).unwrap(), wick_field(2).unwrap());
    }

    #[test]
    fn joint_moments() {
        assert_eq!(wick_joint(&[1, 2, 2, 1], &eps("11**")).unwrap(), poly("t"));
        assert_eq!(wick_joint(&[1, 2, 1, 2], &eps("11**")).unwrap(), poly("q"));
        for e in EpsilonString::all_of_length(4) {
            assert!(wick_joint(&[1, 2, 2, 3], &e).unwrap().is_zero());
        }
        assert!(wick_joint(&[1, 2], &eps("11**")).is_err());
    }

    #[test]
    fn epsilon_strings() {
        assert_eq!(eps("1*1*").to_string(), "1*1*");
        assert!("".parse::<EpsilonString>().is_err());
        assert!("12".parse::<EpsilonString>().is_err());
        let all = EpsilonString::all_of_length(3);
        assert_eq!(all.len(), 8);
        assert_eq!(all[0].to_string(), "111");
        assert_eq!(all[1].to_string(), "11*");
        assert_eq!(all[7].to_string(), "***");
    }
}
