//! Pair partitions, crossing/nesting statistics and tuple equivalence classes.
//!
//! Positions are 1-based throughout, so a pair partition of `[2n]` covers
//! `1..=2n`. A pair partition is always stored in canonical form: every pair
//! `(w, z)` has `w < z` and pairs are sorted by their left endpoint.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest block count accepted by the full enumeration, `(2n-1)!!` grows fast.
pub const MAX_ENUM_BLOCKS: usize = 8;

/// A perfect matching of `[2n]` in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairPartition {
    pairs: Vec<(usize, usize)>,
}

/// Crossing and nesting 4-tuples of a pair partition.
///
/// A crossing `(w_i, w_j, z_i, z_j)` satisfies `w_i < w_j < z_i < z_j`; a
/// nesting `(w_i, w_j, z_j, z_i)` satisfies `w_i < w_j < z_j < z_i`. Both are
/// listed in lexicographic order of the outer pair, then the inner one.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CrossNestReport {
    pub cross_set: Vec<[usize; 4]>,
    pub nest_set: Vec<[usize; 4]>,
}

impl CrossNestReport {
    pub fn cross_count(&self) -> usize {
        self.cross_set.len()
    }

    pub fn nest_count(&self) -> usize {
        self.nest_set.len()
    }
}

impl PairPartition {
    /// Builds a pair partition from pairs given in any order and orientation.
    ///
    /// Fails unless the pairs cover `1..=2n` exactly once.
    pub fn new<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut pairs: Vec<(usize, usize)> = pairs
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        pairs.sort_unstable();
        let size = 2 * pairs.len();
        let mut seen = vec![false; size + 1];
        for &(w, z) in &pairs {
            if w == z {
                return Err(Error::InvalidArgument(format!(
                    "pair ({w},{z}) repeats a position"
                )));
            }
            for p in [w, z] {
                if p == 0 || p > size {
                    return Err(Error::IndexOutOfRange { index: p, max: size });
                }
                if seen[p] {
                    return Err(Error::InvalidArgument(format!(
                        "position {p} appears in more than one pair"
                    )));
                }
                seen[p] = true;
            }
        }
        Ok(Self { pairs })
    }

    /// Canonical `(w_i, z_i)` list with `w_1 < ... < w_n`.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Number of blocks `n`.
    pub fn blocks(&self) -> usize {
        self.pairs.len()
    }

    /// Size `2n` of the underlying ground set.
    pub fn size(&self) -> usize {
        2 * self.pairs.len()
    }

    /// Position matched with `pos`.
    pub fn partner(&self, pos: usize) -> Option<usize> {
        self.pairs.iter().find_map(|&(w, z)| {
            if w == pos {
                Some(z)
            } else if z == pos {
                Some(w)
            } else {
                None
            }
        })
    }

    /// Block index (0-based, in canonical order) of every position.
    pub fn block_of_positions(&self) -> Vec<usize> {
        let mut out = vec![0; self.size()];
        for (b, &(w, z)) in self.pairs.iter().enumerate() {
            out[w - 1] = b;
            out[z - 1] = b;
        }
        out
    }

    /// Full crossing/nesting report.
    pub fn cross_nest(&self) -> CrossNestReport {
        let mut report = CrossNestReport::default();
        for (a, &(wi, zi)) in self.pairs.iter().enumerate() {
            for &(wj, zj) in &self.pairs[a + 1..] {
                // wi < wj by canonical order
                if wj < zi {
                    if zi < zj {
                        report.cross_set.push([wi, wj, zi, zj]);
                    } else {
                        report.nest_set.push([wi, wj, zj, zi]);
                    }
                }
            }
        }
        report
    }

    /// `(cross, nest)` counts without materialising the 4-tuples.
    pub fn stats(&self) -> (usize, usize) {
        pair_stats(&self.pairs)
    }
}

/// Counts crossings and nestings of a canonically ordered pair list.
pub(crate) fn pair_stats(pairs: &[(usize, usize)]) -> (usize, usize) {
    let mut cross = 0;
    let mut nest = 0;
    for (a, &(_, zi)) in pairs.iter().enumerate() {
        for &(wj, zj) in &pairs[a + 1..] {
            if wj < zi {
                if zi < zj {
                    cross += 1;
                } else {
                    nest += 1;
                }
            }
        }
    }
    (cross, nest)
}

impl fmt::Display for PairPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (w, z)) in self.pairs.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "({w},{z})")?;
        }
        f.write_str("}")
    }
}

impl FromStr for PairPartition {
    type Err = Error;

    /// Accepts `{(1,3),(2,4)}`, `(1,3)(2,4)` or a bare `1,3,2,4` list.
    fn from_str(s: &str) -> Result<Self> {
        let numbers: Vec<usize> = s
            .split(|c: char| !c.is_ascii_digit())
            .filter(|tok| !tok.is_empty())
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("{tok:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        if numbers.is_empty() || !numbers.len().is_multiple_of(2) {
            return Err(Error::Parse(format!(
                "expected a non-empty list of pairs, got {s:?}"
            )));
        }
        Self::new(numbers.chunks(2).map(|c| (c[0], c[1])))
    }
}

/// `(2n-1)!!`, the number of pair partitions of `[2n]`.
pub fn double_factorial_odd(n: usize) -> u128 {
    (1..=n as u128).map(|k| 2 * k - 1).product()
}

fn check_enum_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ENUM_BLOCKS {
        return Err(Error::SizeLimit {
            what: "pair partition block count",
            value: n,
            max: MAX_ENUM_BLOCKS,
        });
    }
    Ok(())
}

/// Visits every pair partition of `[2n]` in lexicographic order of the
/// canonical pair list, without allocating one vector per partition.
pub fn for_each_pair_partition<F>(n: usize, mut visit: F) -> Result<()>
where
    F: FnMut(&[(usize, usize)]),
{
    check_enum_size(n)?;
    let mut pairs = Vec::with_capacity(n);
    recurse(2 * n, 0u32, &mut pairs, &mut visit);
    Ok(())
}

fn recurse<F>(size: usize, used: u32, pairs: &mut Vec<(usize, usize)>, visit: &mut F)
where
    F: FnMut(&[(usize, usize)]),
{
    let full = (1u32 << size) - 1;
    if used == full {
        visit(pairs);
        return;
    }
    let first = (!used).trailing_zeros() as usize;
    let used = used | (1 << first);
    for partner in first + 1..size {
        if used & (1 << partner) == 0 {
            pairs.push((first + 1, partner + 1));
            recurse(size, used | (1 << partner), pairs, visit);
            pairs.pop();
        }
    }
}

/// All pair partitions of `[2n]`, `1 <= n <= 8`, in lexicographic order.
pub fn enumerate_pair_partitions(n: usize) -> Result<Vec<PairPartition>> {
    let mut out = Vec::with_capacity(double_factorial_odd(n.min(MAX_ENUM_BLOCKS)) as usize);
    for_each_pair_partition(n, |pairs| {
        out.push(PairPartition {
            pairs: pairs.to_vec(),
        })
    })?;
    Ok(out)
}

/// A set partition of `[r]` stored as its restricted-growth string: entry
/// `k` is the block label of position `k + 1`, blocks labelled in order of
/// first occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SetPartition {
    rgs: Vec<usize>,
}

impl SetPartition {
    /// Validates a restricted-growth string.
    pub fn from_rgs(rgs: Vec<usize>) -> Result<Self> {
        let mut next = 0;
        for &label in &rgs {
            if label > next {
                return Err(Error::InvalidArgument(format!(
                    "{rgs:?} is not a restricted-growth string"
                )));
            }
            if label == next {
                next += 1;
            }
        }
        Ok(Self { rgs })
    }

    pub fn rgs(&self) -> &[usize] {
        &self.rgs
    }

    /// Size `r` of the ground set.
    pub fn len(&self) -> usize {
        self.rgs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rgs.is_empty()
    }

    pub fn num_blocks(&self) -> usize {
        self.rgs.iter().max().map_or(0, |m| m + 1)
    }

    /// Blocks as sorted lists of 1-based positions, ordered by first element.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (pos, &label) in self.rgs.iter().enumerate() {
            blocks[label].push(pos + 1);
        }
        blocks
    }

    /// The pair partition when every block has exactly two elements.
    pub fn as_pair_partition(&self) -> Option<PairPartition> {
        let blocks = self.blocks();
        if blocks.is_empty() || blocks.iter().any(|b| b.len() != 2) {
            return None;
        }
        // blocks are already ordered by first element
        Some(PairPartition {
            pairs: blocks.iter().map(|b| (b[0], b[1])).collect(),
        })
    }

    pub fn has_singleton(&self) -> bool {
        self.blocks().iter().any(|b| b.len() == 1)
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, block) in self.blocks().iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            f.write_str("{")?;
            for (e, pos) in block.iter().enumerate() {
                if e > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{pos}")?;
            }
            f.write_str("}")?;
        }
        f.write_str("}")
    }
}

/// Equivalence class of a tuple: positions holding equal values share a block.
pub fn class_of<T: Eq + Hash>(tuple: &[T]) -> SetPartition {
    let mut labels: HashMap<&T, usize> = HashMap::with_capacity(tuple.len());
    let rgs = tuple
        .iter()
        .map(|v| {
            let next = labels.len();
            *labels.entry(v).or_insert(next)
        })
        .collect();
    SetPartition { rgs }
}
