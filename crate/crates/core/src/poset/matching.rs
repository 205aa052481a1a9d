//! Dilworth machinery: maximum matching on the split graph (`x` on the left,
//! `y` on the right, an edge whenever `x < y`) gives a minimum chain cover of
//! size `n - |M|`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{Point, Poset};
use crate::bitset::BitSet;

const NIL: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainPartition {
    /// Each chain sorted ascending in the order.
    pub chains: Vec<Vec<Point>>,
}

impl ChainPartition {
    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    /// Chain index of every point.
    pub fn chain_of(&self, n: usize) -> Vec<usize> {
        let mut owner = vec![NIL; n];
        for (i, c) in self.chains.iter().enumerate() {
            for &x in c {
                owner[x] = i;
            }
        }
        owner
    }

    pub fn is_valid_for(&self, p: &Poset) -> bool {
        let mut seen = vec![false; p.len()];
        for c in &self.chains {
            for w in c.windows(2) {
                if !p.lt(w[0], w[1]) {
                    return false;
                }
            }
            for &x in c {
                if std::mem::replace(&mut seen[x], true) {
                    return false;
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Width {
    pub width: usize,
    /// Lexicographically least maximum antichain.
    pub antichain: Vec<Point>,
}

/// Hopcroft–Karp restricted to the points in `mask`. Returns `mate_left`
/// (`x -> y` with `x < y`) indexed by point id.
fn hopcroft_karp(p: &Poset, mask: &BitSet) -> (usize, Vec<usize>) {
    let n = p.len();
    let mut mate_l = vec![NIL; n];
    let mut mate_r = vec![NIL; n];
    let left: Vec<usize> = mask.iter().collect();
    let adj = |x: usize| {
        let mut row = p.up_set(x).clone();
        row.intersect_with(mask);
        row
    };
    let rows: Vec<BitSet> = (0..n)
        .map(|x| if mask.contains(x) { adj(x) } else { BitSet::new(0) })
        .collect();

    let mut size = 0;
    // greedy seed: match each x to its least free successor
    for &x in &left {
        if let Some(y) = rows[x].iter().find(|&y| mate_r[y] == NIL) {
            mate_l[x] = y;
            mate_r[y] = x;
            size += 1;
        }
    }

    let mut dist = vec![NIL; n];
    loop {
        let mut queue = VecDeque::new();
        for &x in &left {
            if mate_l[x] == NIL {
                dist[x] = 0;
                queue.push_back(x);
            } else {
                dist[x] = NIL;
            }
        }
        let mut found = false;
        while let Some(x) = queue.pop_front() {
            for y in rows[x].iter() {
                let m = mate_r[y];
                if m == NIL {
                    found = true;
                } else if dist[m] == NIL {
                    dist[m] = dist[x] + 1;
                    queue.push_back(m);
                }
            }
        }
        if !found {
            break;
        }
        for &x in &left {
            if mate_l[x] == NIL && augment(x, &rows, &mut mate_l, &mut mate_r, &mut dist) {
                size += 1;
            }
        }
    }
    (size, mate_l)
}

fn augment(
    x: usize,
    rows: &[BitSet],
    mate_l: &mut [usize],
    mate_r: &mut [usize],
    dist: &mut [usize],
) -> bool {
    // iterative DFS along layered edges
    let mut stack: Vec<(usize, Vec<usize>)> = vec![(x, rows[x].iter().collect())];
    let mut path: Vec<(usize, usize)> = Vec::new();
    while let Some((u, cands)) = stack.last_mut() {
        let u = *u;
        match cands.pop() {
            None => {
                dist[u] = NIL;
                stack.pop();
                path.pop();
            }
            Some(y) => {
                let m = mate_r[y];
                if m == NIL {
                    path.push((u, y));
                    for &(a, b) in &path {
                        mate_l[a] = b;
                        mate_r[b] = a;
                    }
                    return true;
                }
                if dist[m] != NIL && dist[m] == dist[u] + 1 {
                    path.push((u, y));
                    stack.push((m, rows[m].iter().collect()));
                }
            }
        }
    }
    false
}

fn width_of_mask(p: &Poset, mask: &BitSet) -> usize {
    let (m, _) = hopcroft_karp(p, mask);
    mask.count() - m
}

/// Minimum chain cover; the number of chains equals the width.
pub fn min_chain_partition(p: &Poset) -> ChainPartition {
    let n = p.len();
    let all = BitSet::full(n);
    let (_, mate_l) = hopcroft_karp(p, &all);
    let mut has_pred = vec![false; n];
    for &y in mate_l.iter().filter(|&&y| y != NIL) {
        has_pred[y] = true;
    }
    let mut chains = Vec::new();
    for start in (0..n).filter(|&x| !has_pred[x]) {
        let mut chain = vec![start];
        let mut cur = start;
        while mate_l[cur] != NIL {
            cur = mate_l[cur];
            chain.push(cur);
        }
        chains.push(chain);
    }
    ChainPartition { chains }
}

/// Lexicographically least maximum antichain, built greedily: `x` joins when a
/// maximum antichain still extends the chosen prefix plus `x`.
pub fn max_antichain(p: &Poset) -> Vec<Point> {
    let n = p.len();
    let target = width_of_mask(p, &BitSet::full(n));
    let mut chosen = Vec::new();
    let mut cand = BitSet::full(n);
    for x in 0..n {
        if chosen.len() == target {
            break;
        }
        if !cand.contains(x) {
            continue;
        }
        let mut rest = cand.clone();
        rest.intersect_with(p.incomparables(x));
        if chosen.len() + 1 + width_of_mask(p, &rest) == target {
            chosen.push(x);
            cand = rest;
        } else {
            cand.remove(x);
        }
    }
    chosen
}

pub fn width(p: &Poset) -> Width {
    let antichain = max_antichain(p);
    Width {
        width: antichain.len(),
        antichain,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::validate_poset;

    fn brute_width(p: &Poset) -> usize {
        let n = p.len();
        (0u32..1 << n)
            .filter(|&m| {
                let pts: Vec<_> = (0..n).filter(|&i| m >> i & 1 == 1).collect();
                p.is_antichain(&pts)
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn chain_and_antichain() {
        assert_eq!(width(&Poset::chain(5)).width, 1);
        assert_eq!(min_chain_partition(&Poset::chain(5)).len(), 1);
        let a = Poset::antichain(3);
        assert_eq!(width(&a).width, 3);
        assert_eq!(
            min_chain_partition(&a).chains,
            vec![vec![0], vec![1], vec![2]]
        );
    }

    #[test]
    fn witness_is_lexicographically_least() {
        // 0<2, 1<2, 3 isolated: maximum antichains {0,1,3}
        let p = validate_poset(4, &[(0, 2), (1, 2)]).unwrap();
        assert_eq!(width(&p).antichain, vec![0, 1, 3]);
        // two chains 0<1, 2<3 plus cross 0<3: antichains of size 2: {0,2},{1,2},{1,3}
        let q = validate_poset(4, &[(0, 1), (2, 3), (0, 3)]).unwrap();
        assert_eq!(width(&q).antichain, vec![0, 2]);
    }

    #[test]
    fn matches_brute_force_on_random_posets() {
        for seed in 0..60 {
            let p = crate::poset::random_poset(10, 0.3, seed);
            let w = width(&p);
            assert_eq!(w.width, brute_width(&p), "seed {seed}");
            assert!(p.is_antichain(&w.antichain));
            let cp = min_chain_partition(&p);
            assert!(cp.is_valid_for(&p));
            assert_eq!(cp.len(), w.width);
        }
    }
}
