//! Generators for the adversarial posets, each paired with the role metadata
//! the scripted strategies consume.
//!
//! Side chains are realized over a base chain `C` (positions `0..m`): a side
//! point is incomparable exactly to the base positions of its interval, and
//! points of different side chains are comparable iff their intervals are
//! strictly separated.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poset::{
    realize_interval_chains, validate_poset, Interval, IntervalPoint, Point, Poset, PosetError,
};

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("side-chain sizes must be strictly descending and at least 1: {0:?}")]
    NonDescendingSizes(Vec<usize>),
    #[error("invalid parameters: {0}")]
    BadParams(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Role {
    /// Position on the base chain `C`.
    Base { pos: usize },
    /// Point of side chain `chain` (1-based) assigned base interval `interval`.
    Side {
        chain: usize,
        index: usize,
        interval: Interval,
        duplicate: usize,
    },
    /// Point `local` of copy `copy` in a stack of copies.
    Copy { copy: usize, local: Point },
    /// Point of a fixed pattern with no further structure.
    Plain,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub sizes: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub copies: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionMeta {
    pub name: String,
    pub params: ConstructionParams,
    /// `roles[x]` is the role of point `x`.
    pub roles: Vec<Role>,
    /// Base chain `C`, ascending.
    #[serde(default)]
    pub base: Vec<Point>,
    /// Side chains `C₁, C₂, …`, each ascending.
    #[serde(default)]
    pub side_chains: Vec<Vec<Point>>,
    /// Metadata of the stacked pattern, for stacks.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub inner: Option<Box<ConstructionMeta>>,
}

impl ConstructionMeta {
    pub fn interval_of(&self, x: Point) -> Option<Interval> {
        match self.roles.get(x) {
            Some(Role::Side { interval, .. }) => Some(*interval),
            _ => None,
        }
    }

    pub fn side_chain_of(&self, x: Point) -> Option<usize> {
        match self.roles.get(x) {
            Some(Role::Side { chain, .. }) => Some(*chain),
            _ => None,
        }
    }

    pub fn base_pos(&self, x: Point) -> Option<usize> {
        match self.roles.get(x) {
            Some(Role::Base { pos }) => Some(*pos),
            _ => None,
        }
    }

    pub fn m(&self) -> usize {
        self.base.len()
    }

    /// Size of one copy and the copy count, for stacks.
    pub fn copy_layout(&self) -> Option<(usize, usize)> {
        let inner = self.inner.as_ref()?;
        Some((inner.roles.len(), self.params.copies?))
    }
}

/// One side chain: intervals over base positions with multiplicities, listed
/// so both endpoints are nondecreasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideChainSpec {
    pub entries: Vec<(Interval, usize)>,
}

impl SideChainSpec {
    pub fn is_monotone(&self) -> bool {
        self.entries
            .windows(2)
            .all(|w| w[0].0.lo <= w[1].0.lo && w[0].0.hi <= w[1].0.hi)
    }
}

pub fn monotone_chain_poset(
    m: usize,
    specs: &[SideChainSpec],
) -> Result<(Poset, ConstructionMeta), ConstructionError> {
    if m == 0 {
        return Err(ConstructionError::BadParams("base chain must be nonempty".into()));
    }
    let mut points: Vec<IntervalPoint> = (0..m)
        .map(|p| IntervalPoint {
            chain: 0,
            interval: Interval::new(p, p),
        })
        .collect();
    let mut roles: Vec<Role> = (0..m).map(|pos| Role::Base { pos }).collect();
    let mut side_chains = Vec::with_capacity(specs.len());
    for (c, spec) in specs.iter().enumerate() {
        let mut chain = Vec::new();
        for (entry, &(interval, mult)) in spec.entries.iter().enumerate() {
            if interval.lo > interval.hi || interval.hi >= m {
                return Err(PosetError::BadInterval {
                    lo: interval.lo,
                    hi: interval.hi,
                }
                .into());
            }
            for duplicate in 0..mult {
                chain.push(points.len());
                roles.push(Role::Side {
                    chain: c + 1,
                    index: entry,
                    interval,
                    duplicate,
                });
                points.push(IntervalPoint {
                    chain: c + 1,
                    interval,
                });
            }
        }
        side_chains.push(chain);
    }
    let poset = realize_interval_chains(&points)?;
    let meta = ConstructionMeta {
        name: "monotone_chains".into(),
        params: ConstructionParams {
            m: Some(m),
            ..Default::default()
        },
        roles,
        base: (0..m).collect(),
        side_chains,
        inner: None,
    };
    Ok((poset, meta))
}

/// Boundary intervals of `0..m`: prefixes ascending, then proper suffixes ascending.
pub fn boundary_intervals(m: usize) -> Vec<Interval> {
    let mut out: Vec<Interval> = (0..m).map(|j| Interval::new(0, j)).collect();
    out.extend((1..m).map(|i| Interval::new(i, m - 1)));
    out
}

pub fn lemma2_default_m(k: usize) -> usize {
    1 << (k + 2)
}

/// Width-2 adversary: base chain of length `m`, side chain `C′` holding `2k`
/// points for each interval containing the minimum or the maximum of `C`.
pub fn lemma2_poset(k: usize, m: usize) -> Result<(Poset, ConstructionMeta), ConstructionError> {
    if k < 1 || m < 2 {
        return Err(ConstructionError::BadParams(format!(
            "lemma2 needs k >= 1 and m >= 2 (got k={k}, m={m})"
        )));
    }
    let spec = SideChainSpec {
        entries: boundary_intervals(m).into_iter().map(|i| (i, 2 * k)).collect(),
    };
    let (p, mut meta) = monotone_chain_poset(m, &[spec])?;
    meta.name = "lemma2".into();
    meta.params.k = Some(k);
    Ok((p, meta))
}

/// Residual colour counts `r₁ … r_w` of the phased attack: `r₁ = k` and each
/// phase kills `⌈rᵢ / (⌊a/2⌋ + 1)⌉` colours.
pub fn phase_residuals(a: usize, w: usize, k: usize) -> Vec<usize> {
    let h = a / 2;
    let mut r = vec![k];
    for _ in 1..w {
        let cur = *r.last().unwrap();
        r.push(cur - cur.div_ceil(h + 1));
    }
    r
}

/// Default sizes `(n₁ … n_{w−1}, m)`.
///
/// One Alice round (at most `a` colourings) leaves an uncoloured run of at
/// least `(s - a) / (a + 1)` out of `s`, so `g(s) = (a+1)s + a` undoes a round;
/// each window is sized to survive its phase with a headroom factor of 4.
pub fn lemma4_default_sizing(a: usize, w: usize, k: usize) -> (Vec<usize>, usize) {
    const HEADROOM: usize = 4;
    let r = phase_residuals(a, w, k);
    let kills: Vec<usize> = r.windows(2).map(|p| p[0] - p[1]).collect();
    let g = |s: usize| (a + 1) * s + a;
    let mut sizes = vec![0; w - 1];
    let mut s = 1;
    for _ in 1..kills[w - 2].max(1) {
        s = g(s);
    }
    sizes[w - 2] = HEADROOM * s;
    for i in (0..w - 2).rev() {
        let mut s = sizes[i + 1];
        for _ in 0..kills[i] {
            s = g(s);
        }
        sizes[i] = (HEADROOM * s).max(sizes[i + 1] + 1);
    }
    let m = 2 * sizes[0];
    (sizes, m)
}

/// Exponential adversary: base chain of length `m` and chains `C₁ … C_{w−1}`
/// where `Cᵢ` holds `(a+1)k` points for every size-`nᵢ` interval of `C`.
pub fn lemma4_poset(
    a: usize,
    w: usize,
    k: usize,
    sizes: &[usize],
    m: usize,
) -> Result<(Poset, ConstructionMeta), ConstructionError> {
    if a < 2 || w < 2 || k < 1 {
        return Err(ConstructionError::BadParams(format!(
            "lemma4 needs a >= 2, w >= 2, k >= 1 (got a={a}, w={w}, k={k})"
        )));
    }
    if sizes.len() != w - 1
        || sizes.windows(2).any(|p| p[0] <= p[1])
        || sizes.last().is_some_and(|&s| s < 1)
    {
        return Err(ConstructionError::NonDescendingSizes(sizes.to_vec()));
    }
    if m < sizes[0] {
        return Err(ConstructionError::BadParams(format!(
            "base chain length {m} shorter than n₁ = {}",
            sizes[0]
        )));
    }
    let specs: Vec<SideChainSpec> = sizes
        .iter()
        .map(|&n| SideChainSpec {
            entries: (0..=m - n)
                .map(|s| (Interval::new(s, s + n - 1), (a + 1) * k))
                .collect(),
        })
        .collect();
    let (p, mut meta) = monotone_chain_poset(m, &specs)?;
    meta.name = "lemma4".into();
    meta.params = ConstructionParams {
        k: Some(k),
        m: Some(m),
        a: Some(a),
        w: Some(w),
        sizes: sizes.to_vec(),
        copies: None,
    };
    Ok((p, meta))
}

/// `n` copies of `q`, every point of copy `i` below every point of copy `j > i`.
pub fn stack_copies(
    q: &Poset,
    n: usize,
    inner: Option<&ConstructionMeta>,
) -> Result<(Poset, ConstructionMeta), ConstructionError> {
    if n < 1 {
        return Err(ConstructionError::BadParams("need at least one copy".into()));
    }
    let size = q.len();
    let cover = q.cover_pairs();
    let maxima: Vec<Point> = (0..size).filter(|&x| q.up_set(x).is_empty()).collect();
    let minima: Vec<Point> = (0..size).filter(|&x| q.down_set(x).is_empty()).collect();
    let mut pairs = Vec::new();
    for c in 0..n {
        let off = c * size;
        pairs.extend(cover.iter().map(|&(a, b)| (a + off, b + off)));
        if c + 1 < n {
            for &hi in &maxima {
                for &lo in &minima {
                    pairs.push((hi + off, lo + off + size));
                }
            }
        }
    }
    let mut p = validate_poset(n * size, &pairs)?;
    let mut roles = Vec::with_capacity(n * size);
    for copy in 0..n {
        for local in 0..size {
            roles.push(Role::Copy { copy, local });
            if let Some(l) = q.label(local) {
                p.set_label(copy * size + local, format!("{copy}:{l}"));
            }
        }
    }
    let meta = ConstructionMeta {
        name: "stack".into(),
        params: ConstructionParams {
            copies: Some(n),
            ..Default::default()
        },
        roles,
        base: Vec::new(),
        side_chains: Vec::new(),
        inner: Some(Box::new(inner.cloned().unwrap_or_else(|| plain_meta(q, "pattern")))),
    };
    Ok((p, meta))
}

fn plain_meta(q: &Poset, name: &str) -> ConstructionMeta {
    ConstructionMeta {
        name: name.into(),
        params: ConstructionParams::default(),
        roles: vec![Role::Plain; q.len()],
        base: Vec::new(),
        side_chains: Vec::new(),
        inner: None,
    }
}

/// The 10-point fence: `rᵢ < rⱼ` iff `i + 1 < j`.
pub fn fence_r() -> Poset {
    let mut pairs = Vec::new();
    for i in 0..10 {
        for j in i + 2..10 {
            pairs.push((i, j));
        }
    }
    let mut p = validate_poset(10, &pairs).expect("fence is an order");
    for i in 0..10 {
        p.set_label(i, format!("r{}", i + 1));
    }
    p
}

/// Every side point's recorded interval matches its incomparability interval
/// against the base chain.
pub fn meta_matches_poset(p: &Poset, meta: &ConstructionMeta) -> Result<bool, PosetError> {
    for chain in &meta.side_chains {
        for &x in chain {
            let got = p.incomparability_interval(&meta.base, x)?;
            if got != meta.interval_of(x) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{contains_induced, width};

    #[test]
    fn single_side_point() {
        let spec = SideChainSpec {
            entries: vec![(Interval::new(1, 1), 1)],
        };
        let (p, meta) = monotone_chain_poset(3, &[spec]).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.incomparables(3).iter().collect::<Vec<_>>(), vec![1]);
        assert!(meta_matches_poset(&p, &meta).unwrap());
    }

    #[test]
    fn three_entry_side_chain_has_width_two() {
        let spec = SideChainSpec {
            entries: vec![
                (Interval::new(0, 0), 1),
                (Interval::new(0, 1), 1),
                (Interval::new(1, 1), 1),
            ],
        };
        let (p, meta) = monotone_chain_poset(2, &[spec]).unwrap();
        assert_eq!(meta.side_chains[0].len(), 3);
        assert_eq!(width(&p).width, 2);
    }

    #[test]
    fn overlapping_side_chains_give_width_three() {
        let s1 = SideChainSpec {
            entries: vec![(Interval::new(0, 1), 1)],
        };
        let s2 = SideChainSpec {
            entries: vec![(Interval::new(1, 2), 1)],
        };
        let (p, _) = monotone_chain_poset(3, &[s1, s2]).unwrap();
        let w = width(&p);
        assert_eq!(w.width, 3);
        // side points 3, 4 and base position 1
        assert_eq!(w.antichain, vec![1, 3, 4]);
    }

    #[test]
    fn non_monotone_spec_is_rejected() {
        let spec = SideChainSpec {
            entries: vec![(Interval::new(1, 2), 1), (Interval::new(0, 2), 1)],
        };
        assert!(!spec.is_monotone());
        assert!(monotone_chain_poset(3, &[spec]).is_err());
    }

    #[test]
    fn lemma2_counts_and_order() {
        let (p, _) = lemma2_poset(1, 2).unwrap();
        assert_eq!(p.len(), 2 + 2 * (2 * 2 - 1));
        let (_, meta) = lemma2_poset(1, 3).unwrap();
        let seq: Vec<(usize, usize)> = meta.side_chains[0]
            .iter()
            .map(|&x| meta.interval_of(x).unwrap())
            .map(|i| (i.lo + 1, i.hi + 1))
            .collect();
        assert_eq!(
            seq,
            vec![(1, 1), (1, 1), (1, 2), (1, 2), (1, 3), (1, 3), (2, 3), (2, 3), (3, 3), (3, 3)]
        );
    }

    #[test]
    fn lemma2_width_and_meta() {
        for k in 1..=3 {
            for m in [2, 5, 8] {
                let (p, meta) = lemma2_poset(k, m).unwrap();
                assert_eq!(width(&p).width, 2);
                assert!(p.is_transitively_closed());
                assert!(meta_matches_poset(&p, &meta).unwrap());
            }
        }
    }

    #[test]
    fn lemma2_interval_readback() {
        let (p, meta) = lemma2_poset(1, 2).unwrap();
        let x = *meta.side_chains[0]
            .iter()
            .find(|&&x| meta.interval_of(x) == Some(Interval::new(0, 1)))
            .unwrap();
        assert_eq!(
            p.incomparability_interval(&meta.base, x).unwrap(),
            Some(Interval::new(0, 1))
        );
    }

    #[test]
    fn lemma4_small_instance() {
        let (p, meta) = lemma4_poset(2, 3, 1, &[4, 2], 8).unwrap();
        assert_eq!(p.len(), 8 + (8 - 4 + 1) * 3 + (8 - 2 + 1) * 3);
        assert_eq!(width(&p).width, 3);
        assert!(p.is_transitively_closed());
        assert!(meta_matches_poset(&p, &meta).unwrap());
    }

    #[test]
    fn lemma4_degenerate_width_two() {
        let (p, meta) = lemma4_poset(2, 2, 1, &[3], 6).unwrap();
        assert_eq!(meta.side_chains.len(), 1);
        assert!(meta.side_chains[0]
            .iter()
            .all(|&x| meta.interval_of(x).unwrap().len() == 3));
        assert_eq!(width(&p).width, 2);
    }

    #[test]
    fn lemma4_rejects_bad_sizes() {
        assert!(matches!(
            lemma4_poset(2, 3, 1, &[2, 4], 8),
            Err(ConstructionError::NonDescendingSizes(_))
        ));
    }

    #[test]
    fn phase_residual_arithmetic() {
        assert_eq!(phase_residuals(2, 3, 3), vec![3, 1, 0]);
        assert_eq!(phase_residuals(4, 3, 3), vec![3, 2, 1]);
    }

    #[test]
    fn default_sizing_is_descending() {
        let (sizes, m) = lemma4_default_sizing(2, 3, 3);
        assert!(sizes.windows(2).all(|p| p[0] > p[1]));
        assert!(m >= sizes[0]);
    }

    #[test]
    fn stacks_preserve_width() {
        let (p, meta) = stack_copies(&Poset::antichain(2), 3, None).unwrap();
        assert_eq!(p.len(), 6);
        assert_eq!(width(&p).width, 2);
        assert_eq!(meta.copy_layout(), Some((2, 3)));
        assert!(p.lt(0, 2) && p.lt(1, 5));
        for seed in 0..20 {
            let q = crate::poset::random_poset(7, 0.3, seed);
            let (s, _) = stack_copies(&q, 3, None).unwrap();
            assert_eq!(s.len(), 21);
            assert_eq!(width(&s).width, width(&q).width);
        }
    }

    #[test]
    fn fence_structure() {
        let r = fence_r();
        assert_eq!(r.comparable_pair_count(), 45 - 9);
        for i in 0..10 {
            for j in 0..10 {
                if i != j {
                    assert_eq!(r.incomparable(i, j), i.abs_diff(j) == 1);
                }
            }
        }
        assert_eq!(width(&r).width, 2);
        assert_eq!(r.incomparables(2).iter().collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn fence_width_by_enumeration() {
        let r = fence_r();
        let best = (0u32..1 << 10)
            .filter(|&m| {
                let pts: Vec<_> = (0..10).filter(|&i| m >> i & 1 == 1).collect();
                r.is_antichain(&pts)
            })
            .map(u32::count_ones)
            .max();
        assert_eq!(best, Some(2));
    }

    #[test]
    fn stacked_lemma2_is_fence_free() {
        let (q, meta) = lemma2_poset(2, 8).unwrap();
        let (p, _) = stack_copies(&q, 3, Some(&meta)).unwrap();
        assert!(p.len() >= 150);
        assert!(contains_induced(&p, &fence_r()).is_none());
    }
}
