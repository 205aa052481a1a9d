//! Grundy number (worst first-fit order) and the width-2 search.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::game::GameRng;
use crate::poset::{validate_poset, Point, Poset};

/// Exact search is attempted up to this many points.
const EXACT_LIMIT: usize = 15;
/// Width-2 enumeration is exhaustive up to this many points.
const ENUM_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrundyReport {
    pub value: usize,
    /// A first-fit order achieving `value`.
    pub order: Vec<Point>,
    /// `false` when `value` is only a lower bound.
    pub exact: bool,
    pub nodes: u64,
}

/// First-fit colors of `order`, returned per point.
pub(crate) fn first_fit(p: &Poset, order: &[Point]) -> Vec<usize> {
    let mut color = vec![0usize; p.len()];
    for &x in order {
        let mut used: Vec<bool> = vec![false; p.len() + 2];
        for y in p.incomparables(x).iter() {
            used[color[y]] = true;
        }
        color[x] = (1..).find(|&c| !used[c]).expect("unbounded search");
    }
    color
}

fn max_degree(p: &Poset) -> usize {
    (0..p.len()).map(|x| p.incomparables(x).count()).max().unwrap_or(0)
}

struct Dfs {
    inc: Vec<u16>,
    n: usize,
    goal: u8,
    memo: HashMap<u64, u8>,
    nodes: u64,
    max_nodes: u64,
}

impl Dfs {
    fn ff(&self, colors: u64, x: usize) -> u8 {
        let mut hits = 0u32;
        let mut m = self.inc[x];
        while m != 0 {
            let y = m.trailing_zeros() as usize;
            m &= m - 1;
            hits |= 1 << (colors >> (4 * y) & 0xf);
        }
        (!hits & !1).trailing_zeros() as u8
    }

    /// Largest final color reachable from `colors`, capped at `goal`.
    fn best(&mut self, colors: u64) -> Option<u8> {
        if let Some(&v) = self.memo.get(&colors) {
            return Some(v);
        }
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return None;
        }
        let mut best = (0..self.n).map(|x| (colors >> (4 * x) & 0xf) as u8).max().unwrap_or(0);
        for x in 0..self.n {
            if best >= self.goal {
                break;
            }
            if colors >> (4 * x) & 0xf == 0 {
                let c = self.ff(colors, x);
                best = best.max(self.best(colors | (c as u64) << (4 * x))?);
            }
        }
        self.memo.insert(colors, best);
        Some(best)
    }

    fn order(&mut self, target: u8) -> Vec<Point> {
        let mut colors = 0u64;
        let mut order = Vec::with_capacity(self.n);
        while order.len() < self.n {
            let x = (0..self.n)
                .filter(|&x| colors >> (4 * x) & 0xf == 0)
                .find(|&x| {
                    let c = self.ff(colors, x);
                    self.best(colors | (c as u64) << (4 * x)).is_some_and(|v| v >= target)
                })
                .expect("memoized path reaches the target");
            colors |= (self.ff(colors, x) as u64) << (4 * x);
            order.push(x);
        }
        order
    }
}

fn random_orders(p: &Poset, samples: usize, seed: u64) -> (usize, Vec<Point>) {
    let mut rng = GameRng::seed_from_u64(seed);
    let mut order: Vec<Point> = (0..p.len()).collect();
    let mut best = (0, order.clone());
    for _ in 0..samples {
        order.shuffle(&mut rng);
        let v = first_fit(p, &order).into_iter().max().unwrap_or(0);
        if v > best.0 {
            best = (v, order.clone());
        }
    }
    best
}

fn grundy_with_goal(p: &Poset, goal: usize, max_nodes: u64) -> GrundyReport {
    let n = p.len();
    let ub = (max_degree(p) + 1).min(n);
    let cap = goal.min(ub);
    let (lb, lb_order) = random_orders(p, 64, n as u64);
    if lb >= cap || n > EXACT_LIMIT {
        return GrundyReport {
            value: lb,
            order: lb_order,
            exact: lb == ub,
            nodes: 0,
        };
    }
    let mut dfs = Dfs {
        inc: (0..n)
            .map(|x| p.incomparables(x).iter().fold(0u16, |m, y| m | 1 << y))
            .collect(),
        n,
        goal: cap as u8,
        memo: HashMap::new(),
        nodes: 0,
        max_nodes,
    };
    match dfs.best(0) {
        Some(v) => {
            let order = dfs.order(v);
            GrundyReport {
                value: v as usize,
                order,
                exact: (v as usize) < cap || cap == ub,
                nodes: dfs.nodes,
            }
        }
        None => {
            let (value, order) = random_orders(p, 20_000, 1 + n as u64);
            GrundyReport {
                value: value.max(lb),
                order: if value >= lb { order } else { lb_order },
                exact: false,
                nodes: dfs.nodes,
            }
        }
    }
}

/// Maximum first-fit color count over all orders. Exact up to 15 points and
/// within `max_nodes`; otherwise a lower bound from sampled orders.
pub fn grundy_number(p: &Poset, max_nodes: u64) -> GrundyReport {
    if p.is_empty() {
        return GrundyReport {
            value: 0,
            order: Vec::new(),
            exact: true,
            nodes: 0,
        };
    }
    grundy_with_goal(p, usize::MAX, max_nodes)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Width2Witness {
    pub n: usize,
    pub poset: Poset,
    pub order: Vec<Point>,
    pub gamma: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Width2Search {
    pub target: usize,
    pub n_max: usize,
    /// Smallest poset reaching `target` in the exhaustive range.
    pub found: Option<Width2Witness>,
    /// A width-2 graph with Γ ≥ t has at least 2t − 2 points (see `min_points`);
    /// sizes below this were skipped.
    pub min_points: usize,
    /// Sizes in `min_points..=exhaustive_up_to` were fully enumerated.
    pub exhaustive_up_to: usize,
    /// No width-2 poset with at most `n_max` points reaches `target`.
    pub proven_absent: bool,
    pub posets_checked: u64,
    /// Best Γ seen by sampling sizes beyond the exhaustive range.
    pub heuristic_best: Option<Width2Witness>,
}

/// Incomparability graphs of width-2 posets are triangle-free. A point of
/// color `t` sees colors `1..t` on distinct neighbors, and its color-`(t−1)`
/// neighbor needs `t − 2` further neighbors outside that closed neighborhood.
fn min_points(target: usize) -> usize {
    match target {
        0 | 1 => 1,
        t => 2 * t - 2,
    }
}

/// Width-2 poset: base chain `0..p`, side chain `p..p+q`; side point `j` is
/// incomparable to base positions `lo_j..hi_j`, above those below `lo_j`,
/// below those from `hi_j` on. Bounds nondecreasing in `j`.
fn build(p: usize, spec: &[(usize, usize)]) -> Poset {
    let n = p + spec.len();
    let mut pairs = Vec::new();
    pairs.extend((1..p).map(|i| (i - 1, i)));
    pairs.extend((1..spec.len()).map(|j| (p + j - 1, p + j)));
    for (j, &(lo, hi)) in spec.iter().enumerate() {
        if lo > 0 {
            pairs.push((lo - 1, p + j));
        }
        if hi < p {
            pairs.push((p + j, hi));
        }
    }
    validate_poset(n, &pairs).expect("monotone specs are acyclic")
}

fn enumerate_specs(p: usize, q: usize, f: &mut dyn FnMut(&[(usize, usize)]) -> bool) {
    fn rec(p: usize, q: usize, spec: &mut Vec<(usize, usize)>, f: &mut dyn FnMut(&[(usize, usize)]) -> bool) -> bool {
        if spec.len() == q {
            return !spec.iter().any(|&(lo, hi)| lo < hi) || f(spec);
        }
        let (lo0, hi0) = spec.last().copied().unwrap_or((0, 0));
        for lo in lo0..=p {
            for hi in hi0.max(lo)..=p {
                spec.push((lo, hi));
                let go = rec(p, q, spec, f);
                spec.pop();
                if !go {
                    return false;
                }
            }
        }
        true
    }
    rec(p, q, &mut Vec::new(), f);
}

/// Every two-chain presentation of a width-2 poset on `n` points (larger
/// chain first). Isomorphic posets may repeat.
pub fn width2_presentations(n: usize) -> Vec<Poset> {
    let mut out = Vec::new();
    for p in n.div_ceil(2)..n {
        enumerate_specs(p, n - p, &mut |spec| {
            out.push(build(p, spec));
            true
        });
    }
    out
}

fn random_spec(p: usize, q: usize, rng: &mut GameRng) -> Vec<(usize, usize)> {
    let mut los: Vec<usize> = (0..q).map(|_| rng.gen_range(0..=p)).collect();
    let mut lens: Vec<usize> = (0..q).map(|_| rng.gen_range(0..=3.min(p))).collect();
    los.sort_unstable();
    lens.shuffle(rng);
    let mut spec: Vec<(usize, usize)> = Vec::with_capacity(q);
    for j in 0..q {
        let lo = los[j];
        let prev_hi = spec.last().map_or(0, |s| s.1);
        let hi = (lo + lens[j]).min(p).max(prev_hi);
        spec.push((lo, hi));
    }
    spec
}

/// Looks for a width-2 poset with Γ ≥ `target`: exhaustively over all
/// two-chain presentations up to 12 points (stopping at the first size that
/// has one), then by sampling random presentations up to `n_max` points.
pub fn search_width2_grundy(n_max: usize, target: usize, samples_per_size: usize, seed: u64) -> Width2Search {
    let lo_n = min_points(target).max(2);
    let mut out = Width2Search {
        target,
        n_max,
        found: None,
        min_points: lo_n,
        exhaustive_up_to: lo_n.saturating_sub(1),
        proven_absent: false,
        posets_checked: 0,
        heuristic_best: None,
    };
    for n in lo_n..=n_max.min(ENUM_LIMIT) {
        for p in n.div_ceil(2)..n {
            let mut checked = 0;
            enumerate_specs(p, n - p, &mut |spec| {
                checked += 1;
                let poset = build(p, spec);
                let g = grundy_with_goal(&poset, target, 2_000_000);
                if g.value >= target {
                    out.found = Some(Width2Witness {
                        n,
                        order: g.order,
                        gamma: g.value,
                        poset,
                    });
                    return false;
                }
                true
            });
            out.posets_checked += checked;
            if out.found.is_some() {
                break;
            }
        }
        if out.found.is_some() {
            break;
        }
        out.exhaustive_up_to = n;
    }
    out.proven_absent = out.found.is_none() && out.exhaustive_up_to >= n_max;

    let mut rng = GameRng::seed_from_u64(seed);
    for n in (ENUM_LIMIT + 1)..=n_max {
        for _ in 0..samples_per_size {
            let p = rng.gen_range(n.div_ceil(2)..n);
            let poset = build(p, &random_spec(p, n - p, &mut rng));
            let (gamma, order) = random_orders(&poset, 200, rng.gen());
            out.posets_checked += 1;
            if out.heuristic_best.as_ref().is_none_or(|b| gamma > b.gamma) {
                out.heuristic_best = Some(Width2Witness { n, poset, order, gamma });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{random_poset, width};

    // Independent oracle: Γ is the largest t admitting a proper coloring with
    // classes 1..t where each point of color i sees every color below i.
    fn gamma_by_complete_colorings(p: &Poset) -> usize {
        let n = p.len();
        let mut color = vec![0usize; n];
        let mut best = 0;
        fn rec(p: &Poset, x: usize, color: &mut Vec<usize>, best: &mut usize) {
            let n = p.len();
            if x == n {
                let t = *color.iter().max().unwrap_or(&0);
                let ok = (0..n).all(|v| {
                    (1..color[v]).all(|c| p.incomparables(v).iter().any(|u| color[u] == c))
                });
                if ok && t > *best {
                    *best = t;
                }
                return;
            }
            let deg = p.incomparables(x).count();
            for c in 1..=deg + 1 {
                if p.incomparables(x).iter().all(|u| u >= x || color[u] != c) {
                    color[x] = c;
                    rec(p, x + 1, color, best);
                }
            }
            color[x] = 0;
        }
        rec(p, 0, &mut color, &mut best);
        best
    }

    #[test]
    fn matches_complete_coloring_oracle() {
        for seed in 0..60 {
            let p = random_poset(3 + seed as usize % 6, 0.3, 500 + seed);
            let g = grundy_number(&p, 1_000_000);
            assert!(g.exact);
            assert_eq!(g.value, gamma_by_complete_colorings(&p), "seed {seed}");
            assert_eq!(first_fit(&p, &g.order).into_iter().max(), Some(g.value));
        }
    }

    #[test]
    fn enumeration_yields_width_two() {
        let mut count = 0;
        enumerate_specs(3, 2, &mut |spec| {
            assert_eq!(width(&build(3, spec)).width, 2);
            count += 1;
            true
        });
        assert!(count > 0);
    }

    #[test]
    fn search_examples() {
        let s = search_width2_grundy(4, 2, 0, 0);
        assert_eq!(s.found.as_ref().map(|w| w.n), Some(2));
        let s = search_width2_grundy(8, 3, 0, 0);
        let w = s.found.expect("Γ = 3 reachable");
        assert!(w.n <= 8 && w.gamma >= 3);
        assert_eq!(width(&w.poset).width, 2);
        let s = search_width2_grundy(12, 10, 0, 0);
        assert!(s.found.is_none() && s.proven_absent);
    }

    #[test]
    fn prune_bound_is_tight_for_small_targets() {
        // P4 needs four points; nothing smaller reaches 3.
        let s = search_width2_grundy(8, 3, 0, 0);
        assert_eq!(s.found.unwrap().n, min_points(3));
    }
}
