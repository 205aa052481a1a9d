//! Induced-subposet search: does the host contain a copy of a small pattern?

use super::{Point, Poset};
use crate::bitset::BitSet;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Rel {
    Below,
    Above,
    Incomparable,
}

fn rel(p: &Poset, a: Point, b: Point) -> Rel {
    if p.lt(a, b) {
        Rel::Below
    } else if p.lt(b, a) {
        Rel::Above
    } else {
        Rel::Incomparable
    }
}

fn rel_mask(host: &Poset, x: Point, r: Rel) -> &BitSet {
    match r {
        Rel::Below => host.up_set(x),
        Rel::Above => host.down_set(x),
        Rel::Incomparable => host.incomparables(x),
    }
}

/// Longest chain strictly above each point.
fn heights_above(p: &Poset) -> Vec<usize> {
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by_key(|&x| p.up_set(x).count());
    let mut h = vec![0; p.len()];
    for &x in &order {
        h[x] = p.up_set(x).iter().map(|y| h[y] + 1).max().unwrap_or(0);
    }
    h
}

/// Returns an embedding `pattern point -> host point` preserving `<` and `∥`
/// exactly, or `None`. Backtracking picks the pattern point with the fewest
/// remaining candidates and forward-checks every other pattern point.
pub fn contains_induced(host: &Poset, pattern: &Poset) -> Option<Vec<Point>> {
    let k = pattern.len();
    if k == 0 {
        return Some(Vec::new());
    }
    if k > host.len() {
        return None;
    }
    let (hl, hh) = (host.levels(), heights_above(host));
    let (ql, qh) = (pattern.levels(), heights_above(pattern));
    let cands: Vec<BitSet> = (0..k)
        .map(|q| {
            let (qd, qu, qi) = (
                pattern.down_set(q).count(),
                pattern.up_set(q).count(),
                pattern.incomparables(q).count(),
            );
            BitSet::from_iter_with_len(
                host.len(),
                (0..host.len()).filter(|&p| {
                    hl[p] >= ql[q]
                        && hh[p] >= qh[q]
                        && host.down_set(p).count() >= qd
                        && host.up_set(p).count() >= qu
                        && host.incomparables(p).count() >= qi
                }),
            )
        })
        .collect();
    let mut assignment = vec![None; k];
    if backtrack(host, pattern, &mut assignment, cands) {
        Some(assignment.into_iter().map(Option::unwrap).collect())
    } else {
        None
    }
}

fn backtrack(
    host: &Poset,
    pattern: &Poset,
    assignment: &mut [Option<Point>],
    cands: Vec<BitSet>,
) -> bool {
    let next = (0..pattern.len())
        .filter(|&q| assignment[q].is_none())
        .min_by_key(|&q| cands[q].count());
    let Some(q) = next else {
        return true;
    };
    for p in cands[q].iter() {
        let mut next_cands = cands.clone();
        let mut dead = false;
        for r in 0..pattern.len() {
            if r == q || assignment[r].is_some() {
                continue;
            }
            next_cands[r].intersect_with(rel_mask(host, p, rel(pattern, q, r)));
            next_cands[r].remove(p);
            if next_cands[r].is_empty() {
                dead = true;
                break;
            }
        }
        if dead {
            continue;
        }
        assignment[q] = Some(p);
        if backtrack(host, pattern, assignment, next_cands) {
            return true;
        }
        assignment[q] = None;
    }
    false
}

/// Reference search: every `|Q|`-subset of the host, every bijection onto it.
pub fn contains_induced_brute_force(host: &Poset, pattern: &Poset) -> bool {
    let (n, k) = (host.len(), pattern.len());
    if k > n {
        return false;
    }
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        let mut perm = subset.clone();
        if any_permutation_matches(host, pattern, &mut perm, 0) {
            return true;
        }
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if subset[i] < n - k + i {
                subset[i] += 1;
                for j in i + 1..k {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
        if k == 0 {
            return true;
        }
    }
}

fn any_permutation_matches(host: &Poset, pattern: &Poset, perm: &mut Vec<usize>, i: usize) -> bool {
    if i == perm.len() {
        return (0..perm.len()).all(|a| {
            (0..perm.len()).all(|b| a == b || pattern.lt(a, b) == host.lt(perm[a], perm[b]))
        });
    }
    for j in i..perm.len() {
        perm.swap(i, j);
        if any_permutation_matches(host, pattern, perm, i + 1) {
            perm.swap(i, j);
            return true;
        }
        perm.swap(i, j);
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_in_chain() {
        let emb = contains_induced(&Poset::chain(3), &Poset::chain(2)).unwrap();
        assert!(emb[0] < emb[1]);
    }

    #[test]
    fn antichain_not_in_chain() {
        assert!(contains_induced(&Poset::chain(6), &Poset::antichain(2)).is_none());
    }

    #[test]
    fn embedding_preserves_relations() {
        for seed in 0..30 {
            let host = crate::poset::random_poset(9, 0.35, seed);
            let pat = crate::poset::random_poset(4, 0.4, seed + 1000);
            let fast = contains_induced(&host, &pat);
            assert_eq!(fast.is_some(), contains_induced_brute_force(&host, &pat));
            if let Some(e) = fast {
                for a in 0..4 {
                    for b in 0..4 {
                        if a != b {
                            assert_eq!(pat.lt(a, b), host.lt(e[a], e[b]));
                        }
                    }
                }
            }
        }
    }
}
