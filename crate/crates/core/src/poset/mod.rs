//! Finite posets stored as a dense, transitively closed strict order.
//!
//! Every comparability query is a single bit test. The incomparability rows
//! are cached as well because the games query them on every move.

mod embed;
mod interval;
mod io;
mod matching;
mod random;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bitset::BitSet;

pub use embed::{contains_induced, contains_induced_brute_force};
pub use interval::{realize_interval_chains, IntervalPoint};
pub use io::PosetFile;
pub use matching::{max_antichain, min_chain_partition, width, ChainPartition, Width};
pub use random::{random_poset, random_width_poset};

pub type Point = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("relation pair ({0}, {1}) references a point outside 0..{2}")]
    OutOfRange(usize, usize, usize),
    #[error("reflexive pair ({0}, {0}) violates irreflexivity")]
    Reflexive(usize),
    #[error("cycle through {0} and {1} violates antisymmetry")]
    Cycle(usize, usize),
    #[error("points incomparable to {point} are not consecutive in the chain")]
    ContiguityViolation { point: usize },
    #[error("point {0} lies on the chain it is measured against")]
    PointOnChain(usize),
    #[error("side chain {chain} has non-monotone interval endpoints at entry {index}")]
    NonMonotone { chain: usize, index: usize },
    #[error("interval [{lo}, {hi}] is empty or exceeds the base chain")]
    BadInterval { lo: usize, hi: usize },
    #[error("could not generate a poset of width {want} after {attempts} attempts (last width {got})")]
    GenerationFailed { want: usize, got: usize, attempts: usize },
    #[error("poset file: {0}")]
    Format(String),
}

/// Inclusive run of positions `lo..=hi` along some chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
}

impl Interval {
    pub fn new(lo: usize, hi: usize) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: usize) -> bool {
        self.lo <= p && p <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// `self ⋐ other`: a proper subinterval avoiding both endpoints of `other`.
    pub fn strictly_inside(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn positions(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Poset {
    n: usize,
    up: Vec<BitSet>,
    down: Vec<BitSet>,
    incomp: Vec<BitSet>,
    labels: BTreeMap<Point, String>,
}

impl std::fmt::Debug for Poset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Poset")
            .field("n", &self.n)
            .field("cover", &self.cover_pairs())
            .finish()
    }
}

/// Builds a poset from arbitrary relation pairs `(x, y)` meaning `x < y`.
/// The relation is closed transitively; cycles and reflexive pairs are rejected.
pub fn validate_poset(n: usize, pairs: &[(Point, Point)]) -> Result<Poset, PosetError> {
    let mut succ = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for &(x, y) in pairs {
        if x >= n || y >= n {
            return Err(PosetError::OutOfRange(x, y, n));
        }
        if x == y {
            return Err(PosetError::Reflexive(x));
        }
        succ[x].push(y);
        indeg[y] += 1;
    }

    // Kahn's algorithm; leftovers sit on or behind a cycle.
    let mut order = Vec::with_capacity(n);
    let mut stack: Vec<usize> = (0..n).rev().filter(|&x| indeg[x] == 0).collect();
    while let Some(x) = stack.pop() {
        order.push(x);
        for &y in &succ[x] {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                stack.push(y);
            }
        }
    }
    if order.len() < n {
        let x = (0..n).find(|&x| indeg[x] > 0).unwrap();
        // walk backwards along unresolved edges until a repeat
        let mut seen = vec![false; n];
        let mut cur = x;
        loop {
            seen[cur] = true;
            let next = succ[cur].iter().copied().find(|&y| indeg[y] > 0).unwrap();
            if seen[next] {
                return Err(PosetError::Cycle(cur, next));
            }
            cur = next;
        }
    }

    let mut up = vec![BitSet::new(n); n];
    for &x in order.iter().rev() {
        let mut row = BitSet::new(n);
        for &y in &succ[x] {
            row.insert(y);
            row.union_with(&up[y]);
        }
        up[x] = row;
    }
    Ok(Poset::from_closed_up(up))
}

impl Poset {
    /// Trusts that `up` is already a transitively closed strict order.
    pub(crate) fn from_closed_up(up: Vec<BitSet>) -> Poset {
        let n = up.len();
        let mut down = vec![BitSet::new(n); n];
        for (x, row) in up.iter().enumerate() {
            for y in row.iter() {
                down[y].insert(x);
            }
        }
        let mut incomp = Vec::with_capacity(n);
        for x in 0..n {
            let mut row = BitSet::full(n);
            row.remove(x);
            row.difference_with(&up[x]);
            row.difference_with(&down[x]);
            incomp.push(row);
        }
        Poset {
            n,
            up,
            down,
            incomp,
            labels: BTreeMap::new(),
        }
    }

    pub fn chain(n: usize) -> Poset {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        validate_poset(n, &pairs).expect("chain is a valid order")
    }

    pub fn antichain(n: usize) -> Poset {
        validate_poset(n, &[]).expect("antichain is a valid order")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn lt(&self, x: Point, y: Point) -> bool {
        self.up[x].contains(y)
    }

    #[inline]
    pub fn comparable(&self, x: Point, y: Point) -> bool {
        x == y || self.up[x].contains(y) || self.down[x].contains(y)
    }

    #[inline]
    pub fn incomparable(&self, x: Point, y: Point) -> bool {
        self.incomp[x].contains(y)
    }

    pub fn up_set(&self, x: Point) -> &BitSet {
        &self.up[x]
    }

    pub fn down_set(&self, x: Point) -> &BitSet {
        &self.down[x]
    }

    /// Points incomparable to `x`, excluding `x`.
    pub fn incomparables(&self, x: Point) -> &BitSet {
        &self.incomp[x]
    }

    pub fn labels(&self) -> &BTreeMap<Point, String> {
        &self.labels
    }

    pub fn set_label(&mut self, x: Point, label: impl Into<String>) {
        self.labels.insert(x, label.into());
    }

    pub fn label(&self, x: Point) -> Option<&str> {
        self.labels.get(&x).map(String::as_str)
    }

    pub fn comparable_pair_count(&self) -> usize {
        self.up.iter().map(BitSet::count).sum()
    }

    /// Transitive reduction: pairs `x < y` with nothing strictly between.
    pub fn cover_pairs(&self) -> Vec<(Point, Point)> {
        let mut out = Vec::new();
        for x in 0..self.n {
            let mut covers = self.up[x].clone();
            for z in self.up[x].iter() {
                covers.difference_with(&self.up[z]);
            }
            out.extend(covers.iter().map(|y| (x, y)));
        }
        out
    }

    /// Exhaustive check of the closure invariant; quadratic in bitset rows.
    pub fn is_transitively_closed(&self) -> bool {
        (0..self.n).all(|x| {
            !self.up[x].contains(x) && self.up[x].iter().all(|y| self.up[y].is_subset(&self.up[x]))
        })
    }

    pub fn is_chain(&self, points: &[Point]) -> bool {
        points
            .iter()
            .enumerate()
            .all(|(i, &x)| points[i + 1..].iter().all(|&y| self.comparable(x, y)))
    }

    pub fn is_antichain(&self, points: &[Point]) -> bool {
        points
            .iter()
            .enumerate()
            .all(|(i, &x)| points[i + 1..].iter().all(|&y| self.incomparable(x, y)))
    }

    /// Induced subposet on `points` (relabelled `0..points.len()` in the given order).
    pub fn restrict(&self, points: &[Point]) -> Poset {
        let k = points.len();
        let mut up = vec![BitSet::new(k); k];
        for (i, &x) in points.iter().enumerate() {
            for (j, &y) in points.iter().enumerate() {
                if self.lt(x, y) {
                    up[i].insert(j);
                }
            }
        }
        Poset::from_closed_up(up)
    }

    /// Positions of `incomparables(x)` along `chain`, as one interval (or `None`).
    pub fn incomparability_interval(
        &self,
        chain: &[Point],
        x: Point,
    ) -> Result<Option<Interval>, PosetError> {
        if chain.contains(&x) {
            return Err(PosetError::PointOnChain(x));
        }
        let hits: Vec<usize> = chain
            .iter()
            .enumerate()
            .filter(|&(_, &c)| self.incomparable(x, c))
            .map(|(i, _)| i)
            .collect();
        match (hits.first(), hits.last()) {
            (Some(&lo), Some(&hi)) => {
                if hi - lo + 1 != hits.len() {
                    return Err(PosetError::ContiguityViolation { point: x });
                }
                Ok(Some(Interval::new(lo, hi)))
            }
            _ => Ok(None),
        }
    }

    /// Longest-chain level of each point (minimal elements are level 0).
    pub fn levels(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&x| self.down[x].count());
        let mut level = vec![0; self.n];
        for &x in &order {
            level[x] = self.down[x].iter().map(|y| level[y] + 1).max().unwrap_or(0);
        }
        level
    }
}
