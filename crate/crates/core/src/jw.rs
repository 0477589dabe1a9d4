//! The two-parameter Jordan-Wigner model.
//!
//! `b_{n,i}` acts on `(R^2)^{(x) n}` as
//! `sigma_{mu(1,i)} (x) ... (x) sigma_{mu(i-1,i)} (x) gamma (x) sigma_1 (x) ... (x) sigma_1`
//! with `sigma_x = diag(1, sqrt(t) x)` and `gamma = [[0, 1], [0, 0]]`.
//!
//! Every such product maps a basis vector to a multiple of a single basis
//! vector, so operators are stored slot-by-slot as 2x2 monomial matrices and
//! states as sparse maps from basis bitmasks to coefficients. Slot `j`
//! (1-based) is bit `j - 1`; a set bit selects the second basis vector of
//! that factor ("occupied"), and the vacuum `e_0` is the all-zero mask.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::coeffs::CoefficientTable;
use crate::error::{Error, Result};
use crate::format_f64;
use crate::wickpoly::Eps;

/// Largest width for [`MonomialOperator::to_dense`].
pub const MAX_DENSE_WIDTH: usize = 6;
/// Largest width accepted by [`check_commutation`].
pub const MAX_CHECK_WIDTH: usize = 10;

/// A basis vector of `(R^2)^{(x) n}` as a little-endian bitmask.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mask(Vec<u64>);

impl Mask {
    pub fn zero(width: usize) -> Self {
        Self(vec![0; width.div_ceil(64).max(1)])
    }

    /// Whether 1-based slot `j` is occupied.
    pub fn get(&self, slot: usize) -> bool {
        let b = slot - 1;
        self.0[b / 64] >> (b % 64) & 1 == 1
    }

    pub fn set(&mut self, slot: usize, on: bool) {
        let b = slot - 1;
        if on {
            self.0[b / 64] |= 1 << (b % 64);
        } else {
            self.0[b / 64] &= !(1 << (b % 64));
        }
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    /// Occupied slots in increasing order.
    pub fn occupied(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(64 * k + b + 1)
            })
        })
    }

    /// Value of the mask as an integer, for widths up to 64.
    pub fn as_u64(&self) -> Option<u64> {
        if self.0[1..].iter().all(|&w| w == 0) {
            Some(self.0[0])
        } else {
            None
        }
    }

    pub fn from_u64(width: usize, value: u64) -> Self {
        let mut m = Self::zero(width);
        m.0[0] = value;
        m
    }

    /// `0b` followed by slots `width..=1`, most significant first.
    pub fn render(&self, width: usize) -> String {
        let mut s = String::with_capacity(width + 2);
        s.push_str("0b");
        for slot in (1..=width).rev() {
            s.push(if self.get(slot) { '1' } else { '0' });
        }
        s
    }

    /// Inverse of [`Mask::render`]; returns the mask and its width.
    pub fn parse(s: &str) -> Result<(Self, usize)> {
        let digits = s
            .trim()
            .strip_prefix("0b")
            .ok_or_else(|| Error::Parse(format!("bitmask must start with 0b: {s:?}")))?;
        let width = digits.len();
        if width == 0 {
            return Err(Error::Parse("empty bitmask".into()));
        }
        let mut m = Self::zero(width);
        for (k, c) in digits.chars().enumerate() {
            let slot = width - k;
            match c {
                '0' => {}
                '1' => m.set(slot, true),
                _ => return Err(Error::Parse(format!("bad bitmask digit {c:?} in {s:?}"))),
            }
        }
        Ok((m, width))
    }
}

/// A 2x2 monomial matrix in the (empty, occupied) basis of one slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SlotAction {
    /// `diag(empty, occupied)`
    Diag { empty: f64, occupied: f64 },
    /// `[[0, lower], [raise, 0]]`: `lower` takes occupied to empty, `raise`
    /// takes empty to occupied.
    Flip { lower: f64, raise: f64 },
}

impl SlotAction {
    pub const IDENTITY: SlotAction = SlotAction::Diag {
        empty: 1.0,
        occupied: 1.0,
    };
    /// `gamma`
    pub const LOWER: SlotAction = SlotAction::Flip {
        lower: 1.0,
        raise: 0.0,
    };
    /// `gamma*`
    pub const RAISE: SlotAction = SlotAction::Flip {
        lower: 0.0,
        raise: 1.0,
    };

    /// Image of one slot state: `(new_bit, coefficient)`.
    pub fn apply(self, occupied: bool) -> (bool, f64) {
        match (self, occupied) {
            (SlotAction::Diag { empty, .. }, false) => (false, empty),
            (SlotAction::Diag { occupied: o, .. }, true) => (true, o),
            (SlotAction::Flip { raise, .. }, false) => (true, raise),
            (SlotAction::Flip { lower, .. }, true) => (false, lower),
        }
    }

    /// `self * other` (apply `other` first).
    pub fn compose(self, other: SlotAction) -> SlotAction {
        use SlotAction::*;
        match (self, other) {
            (Diag { empty: a, occupied: b }, Diag { empty: c, occupied: d }) => Diag {
                empty: a * c,
                occupied: b * d,
            },
            (Diag { empty: a, occupied: b }, Flip { lower: l, raise: r }) => Flip {
                lower: a * l,
                raise: b * r,
            },
            (Flip { lower: l, raise: r }, Diag { empty: a, occupied: b }) => Flip {
                lower: l * b,
                raise: r * a,
            },
            (Flip { lower: l1, raise: r1 }, Flip { lower: l2, raise: r2 }) => Diag {
                empty: l1 * r2,
                occupied: r1 * l2,
            },
        }
    }

    /// Transpose, which is the adjoint for real entries.
    pub fn transpose(self) -> SlotAction {
        match self {
            SlotAction::Flip { lower, raise } => SlotAction::Flip {
                lower: raise,
                raise: lower,
            },
            diag => diag,
        }
    }

    fn entries(self) -> [f64; 2] {
        match self {
            SlotAction::Diag { empty, occupied } => [empty, occupied],
            SlotAction::Flip { lower, raise } => [lower, raise],
        }
    }

    fn with_entries(self, e: [f64; 2]) -> SlotAction {
        match self {
            SlotAction::Diag { .. } => SlotAction::Diag {
                empty: e[0],
                occupied: e[1],
            },
            SlotAction::Flip { .. } => SlotAction::Flip {
                lower: e[0],
                raise: e[1],
            },
        }
    }

    fn is_zero(self) -> bool {
        self.entries() == [0.0, 0.0]
    }

    fn matrix(self) -> [[f64; 2]; 2] {
        match self {
            SlotAction::Diag { empty, occupied } => [[empty, 0.0], [0.0, occupied]],
            SlotAction::Flip { lower, raise } => [[0.0, lower], [raise, 0.0]],
        }
    }
}

/// A tensor product of 2x2 monomial matrices times a scalar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonomialOperator {
    pub slots: Vec<SlotAction>,
    pub scalar: f64,
}

impl MonomialOperator {
    pub fn identity(n: usize) -> Self {
        Self {
            slots: vec![SlotAction::IDENTITY; n],
            scalar: 1.0,
        }
    }

    pub fn width(&self) -> usize {
        self.slots.len()
    }

    pub fn is_zero(&self) -> bool {
        self.scalar == 0.0 || self.slots.iter().any(|s| s.is_zero())
    }

    /// `self * other`.
    pub fn compose(&self, other: &MonomialOperator) -> Result<MonomialOperator> {
        if self.width() != other.width() {
            return Err(Error::WidthMismatch {
                expected: self.width(),
                found: other.width(),
            });
        }
        Ok(MonomialOperator {
            slots: self
                .slots
                .iter()
                .zip(&other.slots)
                .map(|(&a, &b)| a.compose(b))
                .collect(),
            scalar: self.scalar * other.scalar,
        })
    }

    pub fn scaled(&self, c: f64) -> MonomialOperator {
        MonomialOperator {
            slots: self.slots.clone(),
            scalar: self.scalar * c,
        }
    }

    pub fn adjoint(&self) -> MonomialOperator {
        MonomialOperator {
            slots: self.slots.iter().map(|s| s.transpose()).collect(),
            scalar: self.scalar,
        }
    }

    /// Image of one basis vector, `None` when it is annihilated.
    pub fn apply_basis(&self, mask: &Mask) -> Option<(Mask, f64)> {
        let mut out = mask.clone();
        let mut c = self.scalar;
        for (k, slot) in self.slots.iter().enumerate() {
            let (bit, f) = slot.apply(mask.get(k + 1));
            if f == 0.0 {
                return None;
            }
            out.set(k + 1, bit);
            c *= f;
        }
        Some((out, c))
    }

    /// Canonical form: every non-zero slot scaled so its first non-zero
    /// entry is 1, with the factors moved into the scalar. `None` for the
    /// zero operator.
    pub fn normalized(&self) -> Option<MonomialOperator> {
        if self.is_zero() {
            return None;
        }
        let mut scalar = self.scalar;
        let slots = self
            .slots
            .iter()
            .map(|&s| {
                let e = s.entries();
                let lead = if e[0] != 0.0 { e[0] } else { e[1] };
                scalar *= lead;
                s.with_entries([e[0] / lead, e[1] / lead])
            })
            .collect();
        Some(MonomialOperator { slots, scalar })
    }

    /// Dense `2^n x 2^n` realisation (row = output mask), for `n <= 6`.
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        let n = self.width();
        if n > MAX_DENSE_WIDTH {
            return Err(Error::SizeLimit {
                what: "dense operator width",
                value: n,
                max: MAX_DENSE_WIDTH,
            });
        }
        let dim = 1usize << n;
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            if let Some((out, c)) = self.apply_basis(&Mask::from_u64(n, col as u64)) {
                m[(out.as_u64().unwrap() as usize, col)] += c;
            }
        }
        Ok(m)
    }

    /// Dense realisation by explicit Kronecker products of the slot
    /// matrices, slot 1 being the least significant factor.
    pub fn to_dense_kronecker(&self) -> Result<DMatrix<f64>> {
        if self.width() > MAX_DENSE_WIDTH {
            return Err(Error::SizeLimit {
                what: "dense operator width",
                value: self.width(),
                max: MAX_DENSE_WIDTH,
            });
        }
        let mut acc = DMatrix::from_element(1, 1, self.scalar);
        for slot in &self.slots {
            let m = slot.matrix();
            let small = DMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]]);
            acc = small.kronecker(&acc);
        }
        Ok(acc)
    }

    /// Per-slot action table as JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("operator serialises")
    }
}

/// `b_{n,i}` (or its adjoint) for the given table.
pub fn build_jw(
    n: usize,
    i: usize,
    adjoint: bool,
    table: &CoefficientTable,
) -> Result<MonomialOperator> {
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, max: n });
    }
    if n > 1 && table.n() < n {
        return Err(Error::InvalidArgument(format!(
            "table covers {} indices, operator width is {n}",
            table.n()
        )));
    }
    let st = table.sqrt_t();
    let slots = (1..=n)
        .map(|j| match j.cmp(&i) {
            std::cmp::Ordering::Less => SlotAction::Diag {
                empty: 1.0,
                occupied: st * table.mu(j, i),
            },
            std::cmp::Ordering::Equal if adjoint => SlotAction::RAISE,
            std::cmp::Ordering::Equal => SlotAction::LOWER,
            std::cmp::Ordering::Greater => SlotAction::Diag {
                empty: 1.0,
                occupied: st,
            },
        })
        .collect();
    Ok(MonomialOperator { slots, scalar: 1.0 })
}

/// `b_{n,i}^e` with `e` from the `{1, *}` alphabet.
pub fn build_jw_eps(n: usize, i: usize, e: Eps, table: &CoefficientTable) -> Result<MonomialOperator> {
    build_jw(n, i, e == Eps::Star, table)
}

/// A finitely supported state; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    width: usize,
    coeffs: BTreeMap<Mask, f64>,
}

impl SparseState {
    pub fn zero(width: usize) -> Self {
        Self {
            width,
            coeffs: BTreeMap::new(),
        }
    }

    /// `e_0`
    pub fn vacuum(width: usize) -> Self {
        let mut s = Self::zero(width);
        s.add(Mask::zero(width), 1.0);
        s
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn add(&mut self, mask: Mask, c: f64) {
        if c == 0.0 {
            return;
        }
        match self.coeffs.entry(mask) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
        }
    }

    pub fn coeff(&self, mask: &Mask) -> f64 {
        self.coeffs.get(mask).copied().unwrap_or(0.0)
    }

    pub fn vacuum_coeff(&self) -> f64 {
        self.coeff(&Mask::zero(self.width))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mask, &f64)> {
        self.coeffs.iter()
    }

    /// CSV with header `bitmask,coefficient`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bitmask,coefficient\n");
        for (m, &c) in &self.coeffs {
            let _ = writeln!(out, "{},{}", m.render(self.width), format_f64(c));
        }
        out
    }

    /// Parses [`SparseState::to_csv`] output; the width is taken from the
    /// bitmask length, or `default_width` for an empty state.
    pub fn from_csv(text: &str, default_width: usize) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "bitmask,coefficient" => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header bitmask,coefficient, got {other:?}"
                )))
            }
        }
        let mut state: Option<SparseState> = None;
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let (mask, c) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad state row {line:?}")))?;
            let (mask, width) = Mask::parse(mask)?;
            let c: f64 = c
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient in {line:?}")))?;
            let s = state.get_or_insert_with(|| SparseState::zero(width));
            if s.width != width {
                return Err(Error::WidthMismatch {
                    expected: s.width,
                    found: width,
                });
            }
            s.add(mask, c);
        }
        Ok(state.unwrap_or_else(|| SparseState::zero(default_width)))
    }
}

impl fmt::Display for SparseState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_csv())
    }
}

/// Applies a monomial operator; each basis vector maps to at most one.
pub fn apply_monomial(op: &MonomialOperator, state: &SparseState) -> Result<SparseState> {
    if op.width() != state.width {
        return Err(Error::WidthMismatch {
            expected: op.width(),
            found: state.width,
        });
    }
    let mut out = SparseState::zero(state.width);
    for (mask, &c) in &state.coeffs {
        if let Some((image, f)) = op.apply_basis(mask) {
            out.add(image, c * f);
        }
    }
    Ok(out)
}

/// Coefficient picked up by `b_i^e` on a basis vector, from its occupied
/// slots other than `i`: `sqrt(t) mu(j,i)` for `j < i`, `sqrt(t)` for `j > i`.
fn string_factor(mask: &Mask, i: usize, table: &CoefficientTable) -> f64 {
    let st = table.sqrt_t();
    mask.occupied()
        .filter(|&j| j != i)
        .map(|j| if j < i { st * table.mu(j, i) } else { st })
        .product()
}

/// Image of a basis vector under `b_{n,i}^e`, in `O(popcount)`.
pub fn apply_jw_basis(mask: &Mask, i: usize, e: Eps, table: &CoefficientTable) -> Option<(Mask, f64)> {
    let raise = e == Eps::Star;
    if mask.get(i) == raise {
        return None;
    }
    let f = string_factor(mask, i, table);
    let mut out = mask.clone();
    out.set(i, raise);
    Some((out, f))
}

/// `b_{n,i}^e` applied to a state without building the operator.
pub fn apply_jw(i: usize, e: Eps, state: &SparseState, table: &CoefficientTable) -> SparseState {
    let mut out = SparseState::zero(state.width);
    for (mask, &c) in &state.coeffs {
        if let Some((image, f)) = apply_jw_basis(mask, i, e, table) {
            out.add(image, c * f);
        }
    }
    out
}

/// `sum_{i=1}^{n} b_{n,i}^e` applied to a state.
pub fn apply_jw_sum(e: Eps, state: &SparseState, table: &CoefficientTable) -> SparseState {
    let n = state.width;
    let st = table.sqrt_t();
    let mut out = SparseState::zero(n);
    for (mask, &c) in &state.coeffs {
        match e {
            Eps::One => {
                for i in mask.occupied() {
                    let f = string_factor(mask, i, table);
                    let mut image = mask.clone();
                    image.set(i, false);
                    out.add(image, c * f);
                }
            }
            Eps::Star => {
                let occupied: Vec<usize> = mask.occupied().collect();
                let mut below = 0;
                for i in 1..=n {
                    if below < occupied.len() && occupied[below] == i {
                        below += 1;
                        continue;
                    }
                    let mut f = st.powi((occupied.len() - below) as i32);
                    for &j in &occupied[..below] {
                        f *= st * table.mu(j, i);
                    }
                    let mut image = mask.clone();
                    image.set(i, true);
                    out.add(image, c * f);
                }
            }
        }
    }
    out
}

/// `phi_n(b_{i_1}^{e_1} ... b_{i_r}^{e_r}) = <(product) e_0, e_0>`; `ops` lists
/// `(index, adjoint)` left to right and is applied right to left.
pub fn vacuum_expectation(ops: &[(usize, bool)], n: usize, table: &CoefficientTable) -> Result<f64> {
    if n > 1 && table.n() < n {
        return Err(Error::InvalidArgument(format!(
            "table covers {} indices, model width is {n}",
            table.n()
        )));
    }
    let mut state = SparseState::vacuum(n);
    for &(i, adjoint) in ops.iter().rev() {
        if i == 0 || i > n {
            return Err(Error::IndexOutOfRange { index: i, max: n });
        }
        let e = if adjoint { Eps::Star } else { Eps::One };
        state = apply_jw(i, e, &state, table);
        if state.is_zero() {
            return Ok(0.0);
        }
    }
    Ok(state.vacuum_coeff())
}

/// One checked relation `b_i^e b_j^e' = mu_{e',e}(j,i) b_j^e' b_i^e`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutationCheck {
    pub i: usize,
    pub j: usize,
    pub e: Eps,
    pub e2: Eps,
    pub coefficient: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutationReport {
    pub n: usize,
    pub checks: usize,
    pub max_deviation: f64,
    /// Checks whose deviation exceeds [`CommutationReport::TOLERANCE`].
    pub failures: Vec<CommutationCheck>,
}

impl CommutationReport {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Deviation between two monomial operators compared slot by slot after
/// normalisation; infinite when their supports differ.
pub fn operator_deviation(a: &MonomialOperator, b: &MonomialOperator) -> f64 {
    match (a.normalized(), b.normalized()) {
        (None, None) => 0.0,
        (Some(x), Some(y)) => {
            let mut dev: f64 = 0.0;
            for (sa, sb) in x.slots.iter().zip(&y.slots) {
                let same_kind = std::mem::discriminant(sa) == std::mem::discriminant(sb);
                let (ea, eb) = (sa.entries(), sb.entries());
                let same_support = (ea[0] == 0.0) == (eb[0] == 0.0) && (ea[1] == 0.0) == (eb[1] == 0.0);
                if !same_kind || !same_support {
                    return f64::INFINITY;
                }
                dev = dev.max((ea[0] - eb[0]).abs()).max((ea[1] - eb[1]).abs());
            }
            let scale = x.scalar.abs().max(y.scalar.abs()).max(1.0);
            dev.max((x.scalar - y.scalar).abs() / scale)
        }
        _ => f64::INFINITY,
    }
}

/// Verifies every commutation relation among `b_{n,1}, ..., b_{n,n}` and
/// their adjoints by composing monomial operators.
pub fn check_commutation(n: usize, table: &CoefficientTable) -> Result<CommutationReport> {
    if n > MAX_CHECK_WIDTH {
        return Err(Error::SizeLimit {
            what: "commutation check width",
            value: n,
            max: MAX_CHECK_WIDTH,
        });
    }
    let ops: Vec<[MonomialOperator; 2]> = (1..=n)
        .map(|i| Ok([build_jw(n, i, false, table)?, build_jw(n, i, true, table)?]))
        .collect::<Result<_>>()?;
    let pick = |i: usize, e: Eps| &ops[i - 1][usize::from(e == Eps::Star)];
    let mut report = CommutationReport {
        n,
        checks: 0,
        max_deviation: 0.0,
        failures: Vec::new(),
    };
    for i in 1..=n {
        for j in (1..=n).filter(|&j| j != i) {
            for e in [Eps::One, Eps::Star] {
                for e2 in [Eps::One, Eps::Star] {
                    let lhs = pick(i, e).compose(pick(j, e2))?;
                    let coefficient = table.lookup(e2, e, j, i);
                    let rhs = pick(j, e2).compose(pick(i, e))?.scaled(coefficient);
                    let deviation = operator_deviation(&lhs, &rhs);
                    report.checks += 1;
                    report.max_deviation = report.max_deviation.max(deviation);
                    if deviation.is_nan() || deviation > CommutationReport::TOLERANCE {
                        report.failures.push(CommutationCheck {
                            i,
                            j,
                            e,
                            e2,
                            coefficient,
                            deviation,
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}
