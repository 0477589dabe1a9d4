//! A truncated `(q,t)`-Fock space over `R^d` with its standard orthonormal
//! basis `e_1, ..., e_d`.
//!
//! Vectors are finite combinations of basis words `e_{l_1} (x) ... (x) e_{l_n}`
//! of degree at most `m`; the empty word is the vacuum. Creation prepends a
//! letter, annihilation removes one with weight `q^{k-1} t^{n-k}`, and the
//! inner product is the `(q,t)`-symmetrised sum over permutations.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longest word accepted by the permutation sum of the inner product.
pub const MAX_INNER_DEGREE: usize = 8;
/// Largest Gram matrix dimension `d^n`.
pub const MAX_GRAM_DIM: usize = 256;

/// Basis dimension, truncation degree and deformation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockParams {
    pub d: usize,
    pub m: usize,
    pub q: f64,
    pub t: f64,
}

impl FockParams {
    pub fn new(d: usize, m: usize, q: f64, t: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Parameter("basis dimension d must be positive".into()));
        }
        if m == 0 {
            return Err(Error::Parameter("truncation degree m must be positive".into()));
        }
        if !q.is_finite() {
            return Err(Error::Parameter(format!("q = {q} is not finite")));
        }
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Parameter(format!("t = {t} must be positive")));
        }
        Ok(Self { d, m, q, t })
    }

    /// Whether `|q| < t`, the regime in which the inner product is positive.
    pub fn hilbert(&self) -> bool {
        self.q.abs() < self.t
    }

    fn check_letter(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.d {
            return Err(Error::IndexOutOfRange { index: i, max: self.d });
        }
        Ok(())
    }
}

/// A basis word; letters are 1-based basis indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn vacuum() -> Self {
        Self(Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("Omega");
        }
        let parts: Vec<String> = self.0.iter().map(|l| format!("e{l}")).collect();
        f.write_str(&parts.join("(x)"))
    }
}

/// All words of degree `n` over `[d]` in lexicographic order.
pub fn words_of_degree(d: usize, n: usize) -> Vec<Word> {
    let mut out = vec![Word::vacuum()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (1..=d).map(move |l| {
                    let mut next = w.0.clone();
                    next.push(l);
                    Word(next)
                })
            })
            .collect();
    }
    out
}

/// A finitely supported vector; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FockVector {
    coeffs: BTreeMap<Word, f64>,
}

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        Self::basis(Word::vacuum())
    }

    pub fn basis(word: Word) -> Self {
        let mut v = Self::zero();
        v.add(word, 1.0);
        v
    }

    /// Adds `c * word`.
    pub fn add(&mut self, word: Word, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.coeffs.entry(word.clone()).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.coeffs.remove(&word);
        }
    }

    pub fn add_vector(&mut self, other: &FockVector, scale: f64) {
        for (w, &c) in &other.coeffs {
            self.add(w.clone(), scale * c);
        }
    }

    pub fn coeff(&self, word: &Word) -> f64 {
        self.coeffs.get(word).copied().unwrap_or(0.0)
    }

    /// Coefficient of the vacuum.
    pub fn vacuum_coeff(&self) -> f64 {
        self.coeff(&Word::vacuum())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.keys().map(Word::degree).max()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &f64)> {
        self.coeffs.iter()
    }

    /// Euclidean norm of the coefficient vector (not the `(q,t)` norm).
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// Operators acting on the truncated Fock space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FockOp {
    /// `a(e_i)*`
    Create(usize),
    /// `a(e_i)`
    Annihilate(usize),
    /// `s(e_i) = a(e_i) + a(e_i)*`
    Field(usize),
    /// `t^N`
    NumberScale,
}

/// Inner product of two basis words: zero unless the degrees agree, else
/// `sum over pi in S_n of q^inv(pi) t^(C(n,2) - inv(pi)) prod_k <f_k, h_pi(k)>`.
///
/// Only permutations with `h_pi(k) = f_k` survive orthonormality; they are
/// enumerated explicitly by backtracking, counting inversions as they arise.
pub fn word_inner_product(f: &Word, h: &Word, p: &FockParams) -> Result<f64> {
    let n = f.degree();
    if n != h.degree() {
        return Ok(0.0);
    }
    if n > MAX_INNER_DEGREE {
        return Err(Error::SizeLimit {
            what: "word length in inner product",
            value: n,
            max: MAX_INNER_DEGREE,
        });
    }
    let pairs = n * n.saturating_sub(1) / 2;
    let mut by_inversions = vec![0u64; pairs + 1];
    let mut used = vec![false; n];
    count_matching_permutations(f.letters(), h.letters(), 0, 0, &mut used, &mut by_inversions);
    Ok(by_inversions
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(inv, &c)| c as f64 * p.q.powi(inv as i32) * p.t.powi((pairs - inv) as i32))
        .sum())
}

fn count_matching_permutations(
    f: &[usize],
    h: &[usize],
    k: usize,
    inversions: usize,
    used: &mut [bool],
    out: &mut [u64],
) {
    if k == f.len() {
        out[inversions] += 1;
        return;
    }
    for j in 0..h.len() {
        if used[j] || h[j] != f[k] {
            continue;
        }
        // earlier entries mapped above j each form an inversion with (k, j)
        let new_inv = used[j + 1..].iter().filter(|&&u| u).count();
        used[j] = true;
        count_matching_permutations(f, h, k + 1, inversions + new_inv, used, out);
        used[j] = false;
    }
}

/// Bilinear extension of [`word_inner_product`].
pub fn inner_product(u: &FockVector, v: &FockVector, p: &FockParams) -> Result<f64> {
    let mut total = 0.0;
    for (wu, cu) in u.iter() {
        for (wv, cv) in v.iter() {
            if wu.degree() == wv.degree() {
                total += cu * cv * word_inner_product(wu, wv, p)?;
            }
        }
    }
    Ok(total)
}

fn create(i: usize, v: &FockVector, p: &FockParams) -> Result<FockVector> {
    let mut out = FockVector::zero();
    for (w, &c) in v.iter() {
        if w.degree() >= p.m {
            return Err(Error::Truncation { max: p.m });
        }
        let mut letters = Vec::with_capacity(w.degree() + 1);
        letters.push(i);
        letters.extend_from_slice(w.letters());
        out.add(Word(letters), c);
    }
    Ok(out)
}

fn annihilate(i: usize, v: &FockVector, p: &FockParams) -> FockVector {
    let mut out = FockVector::zero();
    for (w, &c) in v.iter() {
        let n = w.degree();
        for (k, &letter) in w.letters().iter().enumerate() {
            if letter != i {
                continue;
            }
            // 1-based position k+1 carries q^k t^(n-k-1)
            let weight = p.q.powi(k as i32) * p.t.powi((n - k - 1) as i32);
            let mut rest = w.letters().to_vec();
            rest.remove(k);
            out.add(Word(rest), c * weight);
        }
    }
    out
}

/// Applies one operator to a vector.
///
/// Creation on a component of degree `m` is a [`Error::Truncation`] error.
pub fn apply_operator(op: FockOp, v: &FockVector, p: &FockParams) -> Result<FockVector> {
    match op {
        FockOp::Create(i) => {
            p.check_letter(i)?;
            create(i, v, p)
        }
        FockOp::Annihilate(i) => {
            p.check_letter(i)?;
            Ok(annihilate(i, v, p))
        }
        FockOp::Field(i) => {
            p.check_letter(i)?;
            let mut out = create(i, v, p)?;
            out.add_vector(&annihilate(i, v, p), 1.0);
            Ok(out)
        }
        FockOp::NumberScale => {
            let mut out = FockVector::zero();
            for (w, &c) in v.iter() {
                out.add(w.clone(), c * p.t.powi(w.degree() as i32));
            }
            Ok(out)
        }
    }
}

/// Applies the product `ops[0] ops[1] ... ops[k-1]` (rightmost first).
pub fn apply_product(ops: &[FockOp], v: &FockVector, p: &FockParams) -> Result<FockVector> {
    ops.iter()
        .rev()
        .try_fold(v.clone(), |acc, &op| apply_operator(op, &acc, p))
}

/// Vacuum expectation `<ops Omega, Omega>`, read off the vacuum coefficient.
pub fn vacuum_moment(ops: &[FockOp], p: &FockParams) -> Result<f64> {
    Ok(apply_product(ops, &FockVector::vacuum(), p)?.vacuum_coeff())
}

/// Largest coefficient-norm residual of
/// `a(f) a(g)* - q a(g)* a(f) - <f,g> t^N` over basis words of degree `<= m-2`.
pub fn commutator_residual(f: usize, g: usize, p: &FockParams) -> Result<f64> {
    p.check_letter(f)?;
    p.check_letter(g)?;
    if p.m < 2 {
        return Err(Error::Parameter(
            "commutator residual needs truncation m >= 2".into(),
        ));
    }
    let delta = if f == g { 1.0 } else { 0.0 };
    let mut worst: f64 = 0.0;
    for n in 0..=p.m - 2 {
        for w in words_of_degree(p.d, n) {
            let v = FockVector::basis(w);
            let mut r = apply_product(&[FockOp::Annihilate(f), FockOp::Create(g)], &v, p)?;
            r.add_vector(
                &apply_product(&[FockOp::Create(g), FockOp::Annihilate(f)], &v, p)?,
                -p.q,
            );
            r.add_vector(&apply_operator(FockOp::NumberScale, &v, p)?, -delta);
            worst = worst.max(r.coeff_norm());
        }
    }
    Ok(worst)
}

/// Gram matrix of the degree-`n` basis words in lexicographic order.
pub fn gram_matrix(n: usize, p: &FockParams) -> Result<DMatrix<f64>> {
    if n > MAX_INNER_DEGREE {
        return Err(Error::SizeLimit {
            what: "Gram degree",
            value: n,
            max: MAX_INNER_DEGREE,
        });
    }
    let dim = p
        .d
        .checked_pow(n as u32)
        .filter(|&x| x <= MAX_GRAM_DIM)
        .ok_or(Error::SizeLimit {
            what: "Gram dimension d^n",
            value: p.d.saturating_pow(n as u32),
            max: MAX_GRAM_DIM,
        })?;
    let words = words_of_degree(p.d, n);
    let mut g = DMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in a..dim {
            let x = word_inner_product(&words[a], &words[b], p)?;
            g[(a, b)] = x;
            g[(b, a)] = x;
        }
    }
    Ok(g)
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: usize, m: usize, q: f64, t: f64) -> FockParams {
        FockParams::new(d, m, q, t).unwrap()
    }

    fn w(letters: &[usize]) -> Word {
        Word(letters.to_vec())
    }

    #[test]
    fn param_validation() {
        assert!(FockParams::new(0, 2, 0.0, 1.0).is_err());
        assert!(FockParams::new(1, 0, 0.0, 1.0).is_err());
        assert!(FockParams::new(1, 2, 0.0, 0.0).is_err());
        assert!(FockParams::new(1, 2, f64::NAN, 1.0).is_err());
        assert!(params(1, 2, 0.5, 1.0).hilbert());
        assert!(!params(1, 2, 1.0, 1.0).hilbert());
        assert!(!params(1, 2, -2.0, 1.0).hilbert());
    }

    #[test]
    fn inner_product_examples() {
        let p = params(2, 4, 0.3, 0.8);
        let ip = |a: &[usize], b: &[usize]| word_inner_product(&w(a), &w(b), &p).unwrap();
        assert_eq!(ip(&[], &[]), 1.0);
        assert!((ip(&[1, 1], &[1, 1]) - (0.8 + 0.3)).abs() < 1e-15);
        assert!((ip(&[1, 2], &[2, 1]) - 0.3).abs() < 1e-15);
        assert_eq!(ip(&[1, 2], &[1, 2]), 0.8);
        assert_eq!(ip(&[1], &[1, 1]), 0.0);
        assert_eq!(ip(&[1], &[2]), 0.0);
    }

    #[test]
    fn inner_product_size_limit() {
        let p = params(1, 9, 0.3, 0.8);
        let long = w(&[1; 9]);
        assert!(matches!(
            word_inner_product(&long, &long, &p),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn full_symmetrisation_at_q_equals_t() {
        // q = t = 1 gives the permanent of the letter-agreement matrix: n! for equal letters
        let p = params(1, 4, 1.0, 1.0);
        assert_eq!(word_inner_product(&w(&[1; 4]), &w(&[1; 4]), &p).unwrap(), 24.0);
    }

    #[test]
    fn operator_examples() {
        let p = params(2, 3, 0.4, 0.9);
        assert!(apply_operator(FockOp::Annihilate(1), &FockVector::vacuum(), &p)
            .unwrap()
            .is_zero());
        assert_eq!(
            apply_operator(FockOp::Create(1), &FockVector::vacuum(), &p).unwrap(),
            FockVector::basis(w(&[1]))
        );
        let out = apply_operator(FockOp::Annihilate(1), &FockVector::basis(w(&[1, 2])), &p).unwrap();
        let mut expected = FockVector::zero();
        expected.add(w(&[2]), 0.9);
        assert_eq!(out, expected);

        let out = apply_operator(FockOp::Annihilate(1), &FockVector::basis(w(&[2, 1, 1])), &p).unwrap();
        assert!((out.coeff(&w(&[2, 1])) - (0.4 * 0.9 + 0.4 * 0.4)).abs() < 1e-15);

        let scaled = apply_operator(FockOp::NumberScale, &FockVector::basis(w(&[1, 2])), &p).unwrap();
        assert!((scaled.coeff(&w(&[1, 2])) - 0.81).abs() < 1e-15);
    }

    #[test]
    fn truncation_is_an_error() {
        let p = params(1, 2, 0.4, 0.9);
        let v = FockVector::basis(w(&[1, 1]));
        assert_eq!(
            apply_operator(FockOp::Create(1), &v, &p),
            Err(Error::Truncation { max: 2 })
        );
        assert!(vacuum_moment(&[FockOp::Field(1); 4], &params(1, 2, 0.1, 1.0)).is_err());
        assert!(apply_operator(FockOp::Create(3), &FockVector::vacuum(), &p).is_err());
    }

    #[test]
    fn moment_examples() {
        let p = params(2, 4, 0.3, 0.8);
        assert!((vacuum_moment(&[FockOp::Field(1); 2], &p).unwrap() - 1.0).abs() < 1e-15);
        assert!((vacuum_moment(&[FockOp::Field(1); 4], &p).unwrap() - 2.1).abs() < 1e-12);
        let ops = [
            FockOp::Annihilate(1),
            FockOp::Create(1),
            FockOp::Annihilate(2),
            FockOp::Create(2),
        ];
        assert!((vacuum_moment(&ops, &p).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(vacuum_moment(&[FockOp::Field(1); 3], &p).unwrap(), 0.0);
    }

    #[test]
    fn commutation_examples() {
        let p = params(1, 5, 0.4, 0.9);
        assert!(commutator_residual(1, 1, &p).unwrap() <= 1e-12);
        let p = params(2, 4, 0.7, 0.2);
        assert!(commutator_residual(1, 2, &p).unwrap() <= 1e-12);
        let p = params(2, 4, 1.0, 1.0);
        assert!(commutator_residual(2, 2, &p).unwrap() <= 1e-12);
        assert!(commutator_residual(1, 1, &params(1, 1, 0.1, 1.0)).is_err());
    }

    #[test]
    fn gram_examples() {
        let g = gram_matrix(1, &params(2, 2, 0.3, 0.9)).unwrap();
        assert_eq!(g, DMatrix::identity(2, 2));
        let g = gram_matrix(2, &params(1, 2, 0.3, 0.9)).unwrap();
        assert!((g[(0, 0)] - 1.2).abs() < 1e-15);
        let g = gram_matrix(2, &params(2, 2, 0.5, 1.0)).unwrap();
        assert!(symmetric_eigenvalues(&g)[0] >= -1e-10);
        assert!(gram_matrix(9, &params(1, 9, 0.5, 1.0)).is_err());
        assert!(gram_matrix(4, &params(5, 4, 0.5, 1.0)).is_err());
    }

    #[test]
    fn gram_fails_positivity_outside_regime() {
        // q = -2t: <e1e1, e1e1> = t + q < 0
        let g = gram_matrix(2, &params(1, 2, -2.0, 1.0)).unwrap();
        assert!(symmetric_eigenvalues(&g)[0] < 0.0);
    }

    #[test]
    fn word_listing() {
        assert_eq!(words_of_degree(2, 2), vec![w(&[1, 1]), w(&[1, 2]), w(&[2, 1]), w(&[2, 2])]);
        assert_eq!(words_of_degree(3, 0), vec![Word::vacuum()]);
    }
}
