use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{realize_interval_chains, validate_poset, Interval, IntervalPoint, Poset, PosetError};

const MAX_ATTEMPTS: usize = 100;

/// Random order: a hidden linear extension plus independent edges of
/// probability `density`, then closed.
pub fn random_poset(n: usize, density: f64, seed: u64) -> Poset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                pairs.push((perm[i], perm[j]));
            }
        }
    }
    validate_poset(n, &pairs).expect("edges follow a linear extension")
}

/// Poset of width exactly `w` on `n` points: a base chain plus `w - 1` side
/// chains of monotone base intervals, all side chains touching one common
/// base position.
pub fn random_width_poset(w: usize, n: usize, seed: u64) -> Result<Poset, PosetError> {
    assert!(w >= 1 && n >= w, "need w >= 1 and n >= w");
    if w == 1 {
        return Ok(Poset::chain(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = 0;
    for _ in 0..MAX_ATTEMPTS {
        let points = sample_interval_chains(w, n, &mut rng);
        let p = realize_interval_chains(&points)?;
        last = super::width(&p).width;
        if last == w {
            return Ok(p);
        }
    }
    Err(PosetError::GenerationFailed {
        want: w,
        got: last,
        attempts: MAX_ATTEMPTS,
    })
}

fn sample_interval_chains(w: usize, n: usize, rng: &mut ChaCha8Rng) -> Vec<IntervalPoint> {
    let side_total_min = w - 1;
    let m = rng.gen_range(1..=(n - side_total_min)).max(n / w).min(n - side_total_min);
    let mut sizes = vec![1usize; w - 1];
    for _ in 0..(n - m - side_total_min) {
        let c = rng.gen_range(0..w - 1);
        sizes[c] += 1;
    }
    let anchor = rng.gen_range(0..m);
    let mut points: Vec<IntervalPoint> = (0..m)
        .map(|p| IntervalPoint {
            chain: 0,
            interval: Interval::new(p, p),
        })
        .collect();
    for (c, &s) in sizes.iter().enumerate() {
        let mut los = Vec::with_capacity(s);
        let mut his = Vec::with_capacity(s);
        // one interval through the anchor; sorting endpoints separately keeps it
        los.push(rng.gen_range(0..=anchor));
        his.push(rng.gen_range(anchor..m));
        for _ in 1..s {
            let a = rng.gen_range(0..m);
            let len = rng.gen_range(0..m.min(1 + m / 2));
            los.push(a);
            his.push((a + len).min(m - 1));
        }
        los.sort_unstable();
        his.sort_unstable();
        for (lo, hi) in los.into_iter().zip(his) {
            points.push(IntervalPoint {
                chain: c + 1,
                interval: Interval::new(lo, hi),
            });
        }
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::width;

    #[test]
    fn width_one_is_chain() {
        let p = random_width_poset(1, 7, 3).unwrap();
        assert!(p.is_chain(&(0..7).collect::<Vec<_>>()));
    }

    #[test]
    fn width_w_on_w_points_is_antichain() {
        let p = random_width_poset(3, 3, 11).unwrap();
        assert!(p.is_antichain(&[0, 1, 2]));
    }

    #[test]
    fn requested_width_is_realized() {
        let p = random_width_poset(3, 30, 7).unwrap();
        assert_eq!(p.len(), 30);
        assert_eq!(width(&p).width, 3);
        for seed in 0..40 {
            let w = 2 + (seed as usize % 3);
            let p = random_width_poset(w, 10 + seed as usize, seed).unwrap();
            assert_eq!(width(&p).width, w);
        }
    }

    #[test]
    fn random_poset_is_deterministic() {
        assert_eq!(random_poset(12, 0.3, 5), random_poset(12, 0.3, 5));
    }
}
