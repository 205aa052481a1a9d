//! The Presenter/Painter game on a chain with a family of intervals of
//! bounded strict nesting, and Painter's recursive strategy.
//!
//! Positions are `0..m`. Colors of `Γ` are `1..=palette`; `⊥` is a special
//! color that can never be forbidden.

mod painter;
mod presenter;

pub use painter::{pair_color, pair_of, Painter, PainterTelemetry, RecursivePainter};
pub use presenter::{
    necessity_script, play_wgame, random_family, FuzzPresenter, Presenter, ScriptedPresenter,
    WGameFailure, WGameOptions, WGameReproducer, WWinner,
};

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poset::{Interval, Point};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestedIntervalFamily {
    pub m: usize,
    pub intervals: Vec<Interval>,
}

impl NestedIntervalFamily {
    /// Deduplicated and sorted.
    pub fn new(m: usize, intervals: impl IntoIterator<Item = Interval>) -> Self {
        let mut intervals: Vec<Interval> = intervals.into_iter().collect();
        intervals.sort();
        intervals.dedup();
        NestedIntervalFamily { m, intervals }
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Members strictly nested in some other member; the family the embedded
    /// game can ever see.
    pub fn non_maximal(&self) -> NestedIntervalFamily {
        NestedIntervalFamily::new(
            self.m,
            self.intervals
                .iter()
                .copied()
                .filter(|i| self.intervals.iter().any(|j| i.strictly_inside(j))),
        )
    }

    pub fn nested_depth(&self) -> usize {
        nested_depth(&self.intervals)
    }
}

/// Length of the longest `I₁ ⋐ I₂ ⋐ …` chain.
pub fn nested_depth(intervals: &[Interval]) -> usize {
    let mut by_len: Vec<Interval> = intervals.to_vec();
    by_len.sort_by_key(|i| (i.len(), i.lo));
    by_len.dedup();
    let mut depth = vec![1usize; by_len.len()];
    for b in 0..by_len.len() {
        for a in 0..b {
            if by_len[a].strictly_inside(&by_len[b]) {
                depth[b] = depth[b].max(depth[a] + 1);
            }
        }
    }
    depth.into_iter().max().unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WColor {
    Bot,
    Color(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "snake_case")]
pub enum PresenterAction {
    Assign { point: Point, color: WColor },
    Present { interval: Interval, forbidden: u32 },
    Ask { point: Point },
}

/// What Painter owes after a Presenter action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Obligation {
    None,
    UpToTwo(Interval),
    Color(Point),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "by", rename_all = "snake_case")]
pub enum WEvent {
    Presenter(PresenterAction),
    Painter { colorings: Vec<(Point, u32)> },
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum WGameError {
    #[error("illegal presentation: {0}")]
    IllegalPresent(String),
    #[error("illegal assignment: {0}")]
    IllegalAssign(String),
    #[error("strategy stuck: {0}")]
    StrategyStuck(String),
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
}

#[derive(Debug)]
struct FamilyIndex {
    set: HashSet<Interval>,
    list: Vec<Interval>,
}

#[derive(Debug, Clone)]
pub struct WGameState {
    m: usize,
    palette: u32,
    family: Option<Arc<FamilyIndex>>,
    colors: Vec<Option<WColor>>,
    /// Bit `c-1` set when some presented interval over the point forbids `c`.
    forbidden: Vec<u64>,
    presented: Vec<(Interval, u32)>,
    uncolored: usize,
    presenter_won: bool,
    log: Vec<WEvent>,
}

impl WGameState {
    /// `family = None` accepts any interval for presentation.
    pub fn new(m: usize, palette: u32, family: Option<&NestedIntervalFamily>) -> Self {
        assert!((1..=64).contains(&palette), "palette must be 1..=64");
        WGameState {
            m,
            palette,
            family: family.map(|f| {
                Arc::new(FamilyIndex {
                    set: f.intervals.iter().copied().collect(),
                    list: f.intervals.clone(),
                })
            }),
            colors: vec![None; m],
            forbidden: vec![0; m],
            presented: Vec::new(),
            uncolored: m,
            presenter_won: false,
            log: Vec::new(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn palette(&self) -> u32 {
        self.palette
    }

    pub fn in_family(&self, i: &Interval) -> bool {
        i.hi < self.m && self.family.as_ref().is_none_or(|f| f.set.contains(i))
    }

    pub fn family_intervals(&self) -> Option<&[Interval]> {
        self.family.as_deref().map(|f| f.list.as_slice())
    }

    pub fn color(&self, x: Point) -> Option<WColor> {
        self.colors[x]
    }

    pub fn colors(&self) -> &[Option<WColor>] {
        &self.colors
    }

    pub fn forbidden_mask(&self, x: Point) -> u64 {
        self.forbidden[x]
    }

    pub fn forbidden_masks(&self) -> &[u64] {
        &self.forbidden
    }

    pub fn presented(&self) -> &[(Interval, u32)] {
        &self.presented
    }

    pub fn uncolored_count(&self) -> usize {
        self.uncolored
    }

    pub fn uncolored_points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.m).filter(|&x| self.colors[x].is_none())
    }

    pub fn log(&self) -> &[WEvent] {
        &self.log
    }

    pub fn presenter_won(&self) -> bool {
        self.presenter_won
    }

    pub fn is_over(&self) -> bool {
        self.presenter_won || self.uncolored == 0
    }

    pub fn is_available(&self, x: Point, c: u32) -> bool {
        (1..=self.palette).contains(&c) && self.forbidden[x] >> (c - 1) & 1 == 0
    }

    /// `Γ` minus the colors forbidden at `x`, plus `⊥`.
    pub fn available_colors(&self, x: Point) -> Vec<WColor> {
        let mut out: Vec<WColor> = (1..=self.palette)
            .filter(|&c| self.is_available(x, c))
            .map(WColor::Color)
            .collect();
        out.push(WColor::Bot);
        out
    }

    /// A presentation of `i` forbidding `c` is legal.
    pub fn can_present(&self, i: &Interval, c: u32) -> bool {
        self.in_family(i)
            && (1..=self.palette).contains(&c)
            && i.positions().all(|x| self.colors[x] != Some(WColor::Color(c)))
    }

    fn paint(&mut self, x: Point, c: WColor) {
        self.colors[x] = Some(c);
        self.uncolored -= 1;
    }

    pub fn apply_presenter(&mut self, action: PresenterAction) -> Result<Obligation, WGameError> {
        if self.is_over() {
            return Err(WGameError::IllegalAssign("game is over".into()));
        }
        let ob = match action {
            PresenterAction::Assign { point, color } => {
                if point >= self.m || self.colors[point].is_some() {
                    return Err(WGameError::IllegalAssign(format!("point {point} not uncolored")));
                }
                if let WColor::Color(c) = color {
                    if !self.is_available(point, c) {
                        return Err(WGameError::IllegalAssign(format!(
                            "color {c} not available at {point}"
                        )));
                    }
                }
                self.paint(point, color);
                Obligation::None
            }
            PresenterAction::Present { interval, forbidden } => {
                if !self.in_family(&interval) {
                    return Err(WGameError::IllegalPresent(format!("{interval} not in the family")));
                }
                if !self.can_present(&interval, forbidden) {
                    return Err(WGameError::IllegalPresent(format!(
                        "color {forbidden} invalid or already used inside {interval}"
                    )));
                }
                for x in interval.positions() {
                    self.forbidden[x] |= 1 << (forbidden - 1);
                }
                self.presented.push((interval, forbidden));
                Obligation::UpToTwo(interval)
            }
            PresenterAction::Ask { point } => {
                if point >= self.m || self.colors[point].is_some() {
                    return Err(WGameError::IllegalAssign(format!("point {point} not uncolored")));
                }
                if (1..=self.palette).all(|c| !self.is_available(point, c)) {
                    self.presenter_won = true;
                    Obligation::None
                } else {
                    Obligation::Color(point)
                }
            }
        };
        self.log.push(WEvent::Presenter(action));
        Ok(ob)
    }

    pub fn apply_painter(&mut self, ob: Obligation, reply: &[(Point, u32)]) -> Result<(), WGameError> {
        match ob {
            Obligation::None if reply.is_empty() => {}
            Obligation::None => {
                return Err(WGameError::IllegalAssign("painter owes nothing".into()));
            }
            Obligation::UpToTwo(i) => {
                if reply.len() > 2 || (reply.len() == 2 && reply[0].0 == reply[1].0) {
                    return Err(WGameError::IllegalAssign("at most two distinct points".into()));
                }
                if let Some(&(x, _)) = reply.iter().find(|(x, _)| !i.contains(*x)) {
                    return Err(WGameError::IllegalAssign(format!("point {x} outside {i}")));
                }
            }
            Obligation::Color(p) => {
                if reply.len() != 1 || reply[0].0 != p {
                    return Err(WGameError::IllegalAssign(format!("must color exactly point {p}")));
                }
            }
        }
        for &(x, c) in reply {
            if self.colors[x].is_some() {
                return Err(WGameError::IllegalAssign(format!("point {x} already colored")));
            }
            if !self.is_available(x, c) {
                return Err(WGameError::IllegalAssign(format!("color {c} not available at {x}")));
            }
            self.paint(x, WColor::Color(c));
        }
        if !matches!(ob, Obligation::None) {
            self.log.push(WEvent::Painter {
                colorings: reply.to_vec(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: usize, hi: usize) -> Interval {
        Interval::new(lo, hi)
    }

    #[test]
    fn depth_examples() {
        assert_eq!(nested_depth(&[iv(2, 4), iv(1, 5), iv(0, 6)]), 3);
        assert_eq!(nested_depth(&[iv(1, 3), iv(0, 3)]), 1);
        assert_eq!(nested_depth(&[]), 0);
    }

    #[test]
    fn depth_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let f: Vec<Interval> = (0..rng.gen_range(0..7))
                .map(|_| {
                    let lo = rng.gen_range(0..8);
                    iv(lo, rng.gen_range(lo..8))
                })
                .collect();
            // longest chain over all orderings of subsets
            let mut best = 0;
            for mask in 0u32..1 << f.len() {
                let mut s: Vec<Interval> =
                    (0..f.len()).filter(|&b| mask >> b & 1 == 1).map(|b| f[b]).collect();
                s.sort_by_key(|i| i.len());
                if s.windows(2).all(|p| p[0].strictly_inside(&p[1])) {
                    best = best.max(s.len());
                }
            }
            assert_eq!(nested_depth(&f), best);
        }
    }

    #[test]
    fn availability() {
        let mut s = WGameState::new(3, 2, None);
        assert_eq!(
            s.available_colors(1),
            vec![WColor::Color(1), WColor::Color(2), WColor::Bot]
        );
        s.apply_presenter(PresenterAction::Present {
            interval: iv(0, 1),
            forbidden: 2,
        })
        .unwrap();
        assert_eq!(s.available_colors(1), vec![WColor::Color(1), WColor::Bot]);
    }

    #[test]
    fn lone_color_forbidden_leaves_only_bot() {
        let mut s = WGameState::new(2, 1, None);
        s.apply_presenter(PresenterAction::Present {
            interval: iv(0, 0),
            forbidden: 1,
        })
        .unwrap();
        assert_eq!(s.available_colors(0), vec![WColor::Bot]);
        s.apply_presenter(PresenterAction::Ask { point: 0 }).unwrap();
        assert!(s.presenter_won());
    }

    #[test]
    fn bot_never_conflicts() {
        let mut s = WGameState::new(2, 1, None);
        s.apply_presenter(PresenterAction::Present {
            interval: iv(0, 1),
            forbidden: 1,
        })
        .unwrap();
        s.apply_painter(Obligation::UpToTwo(iv(0, 1)), &[]).unwrap();
        s.apply_presenter(PresenterAction::Assign {
            point: 0,
            color: WColor::Bot,
        })
        .unwrap();
        assert_eq!(s.color(0), Some(WColor::Bot));
    }

    #[test]
    fn presenting_over_forbidden_color_is_illegal() {
        let mut s = WGameState::new(3, 2, None);
        s.apply_presenter(PresenterAction::Assign {
            point: 1,
            color: WColor::Color(2),
        })
        .unwrap();
        assert!(matches!(
            s.apply_presenter(PresenterAction::Present {
                interval: iv(0, 2),
                forbidden: 2
            }),
            Err(WGameError::IllegalPresent(_))
        ));
    }

    #[test]
    fn family_membership_enforced() {
        let fam = NestedIntervalFamily::new(4, [iv(1, 2)]);
        let mut s = WGameState::new(4, 2, Some(&fam));
        assert!(s
            .apply_presenter(PresenterAction::Present {
                interval: iv(0, 2),
                forbidden: 1
            })
            .is_err());
        assert_eq!(fam.non_maximal().len(), 0);
    }
}
