use super::{Interval, Poset, PosetError};
use crate::bitset::BitSet;

/// A point of a chain family realized over a base chain: the point is
/// incomparable exactly to base positions in `interval`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalPoint {
    pub chain: usize,
    pub interval: Interval,
}

/// Realizes chains whose points carry base-chain intervals.
///
/// `x < y` iff they share a chain and `x` is listed first, or `hi(x) < lo(y)`.
/// Within a chain both endpoints must be nondecreasing in listing order, which
/// makes the relation a strict partial order. Base-chain points are encoded as
/// singleton intervals `[p, p]`.
pub fn realize_interval_chains(points: &[IntervalPoint]) -> Result<Poset, PosetError> {
    let n = points.len();
    let mut last: Vec<Option<Interval>> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for p in points {
        if p.interval.lo > p.interval.hi {
            return Err(PosetError::BadInterval {
                lo: p.interval.lo,
                hi: p.interval.hi,
            });
        }
        if p.chain >= last.len() {
            last.resize(p.chain + 1, None);
            counts.resize(p.chain + 1, 0);
        }
        if let Some(prev) = last[p.chain] {
            if p.interval.lo < prev.lo || p.interval.hi < prev.hi {
                return Err(PosetError::NonMonotone {
                    chain: p.chain,
                    index: counts[p.chain],
                });
            }
        }
        last[p.chain] = Some(p.interval);
        counts[p.chain] += 1;
    }

    let mut by_lo: Vec<usize> = (0..n).collect();
    by_lo.sort_by_key(|&i| points[i].interval.lo);
    let los: Vec<usize> = by_lo.iter().map(|&i| points[i].interval.lo).collect();

    let mut up = vec![BitSet::new(n); n];
    for x in 0..n {
        let hi = points[x].interval.hi;
        let start = los.partition_point(|&lo| lo <= hi);
        for &y in &by_lo[start..] {
            up[x].insert(y);
        }
        for y in x + 1..n {
            if points[y].chain == points[x].chain {
                up[x].insert(y);
            }
        }
    }
    let poset = Poset::from_closed_up(up);
    debug_assert!(n > 600 || poset.is_transitively_closed());
    Ok(poset)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(m: usize) -> Vec<IntervalPoint> {
        (0..m)
            .map(|p| IntervalPoint {
                chain: 0,
                interval: Interval::new(p, p),
            })
            .collect()
    }

    #[test]
    fn side_point_incomparable_to_its_interval() {
        let mut pts = base(4);
        pts.push(IntervalPoint {
            chain: 1,
            interval: Interval::new(1, 2),
        });
        let p = realize_interval_chains(&pts).unwrap();
        assert!(p.is_transitively_closed());
        assert_eq!(p.incomparables(4).iter().collect::<Vec<_>>(), vec![1, 2]);
        assert!(p.lt(0, 4) && p.lt(4, 3));
    }

    #[test]
    fn rejects_non_monotone_chain() {
        let mut pts = base(3);
        pts.push(IntervalPoint {
            chain: 1,
            interval: Interval::new(1, 2),
        });
        pts.push(IntervalPoint {
            chain: 1,
            interval: Interval::new(0, 2),
        });
        assert!(matches!(
            realize_interval_chains(&pts),
            Err(PosetError::NonMonotone { chain: 1, index: 1 })
        ));
    }
}
