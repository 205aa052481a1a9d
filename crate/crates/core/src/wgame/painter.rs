//! Painter's recursive strategy with `2^{w-1}` colors.
//!
//! Colors are pairs `(i, j)` with `i ∈ 1..=2^{w-2}` and `j ∈ {0, 1}`, encoded
//! as `c = 2i - j` (so `i = ⌈c/2⌉`, `j = c mod 2`). Painter runs an embedded
//! `(w-1)`-game over the same chain whose color `i` stands for the pair
//! `(i, ·)`.
//!
//! Invariant maintained after every round, for each presented interval `J`
//! that was not passed down, with `f(J) = (i, j)`: every uncolored `u ∈ J`
//! either has `(i, ·)`-colored points of `J` on both sides, or lies in a
//! passed interval whose embedded forbidden color is `i` (then both `(i, ·)`
//! are dead at `u`). Any interval free of `(i, ·)` colors that meets such a
//! flanked point is therefore strictly nested in `J`.

use serde::{Deserialize, Serialize};

use super::{NestedIntervalFamily, PresenterAction, WColor, WGameError, WGameState};
use crate::poset::{Interval, Point};

pub fn pair_of(c: u32) -> (u32, u32) {
    (c.div_ceil(2), c % 2)
}

pub fn pair_color(i: u32, j: u32) -> u32 {
    2 * i - j
}

/// Counters per strategy branch, summed over all recursion levels.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PainterTelemetry {
    pub assigns: u64,
    /// Presentations answered by sealing with the complementary color.
    pub sealed: u64,
    /// Presentations passed to the embedded game.
    pub passed: u64,
    pub asks: u64,
    /// Times the extremal sealing rule failed and the subset search was used.
    pub fallback: u64,
    pub colorings: u64,
}

impl PainterTelemetry {
    fn add(&mut self, o: &PainterTelemetry) {
        self.assigns += o.assigns;
        self.sealed += o.sealed;
        self.passed += o.passed;
        self.asks += o.asks;
        self.fallback += o.fallback;
        self.colorings += o.colorings;
    }
}

/// Painter side of the protocol. `state` already reflects Presenter's action.
pub trait Painter {
    fn on_assign(&mut self, state: &WGameState, point: Point, color: WColor) -> Result<(), WGameError>;
    fn on_present(
        &mut self,
        state: &WGameState,
        interval: Interval,
        forbidden: u32,
    ) -> Result<Vec<(Point, u32)>, WGameError>;
    fn on_ask(&mut self, state: &WGameState, point: Point) -> Result<u32, WGameError>;
    /// Exhaustive invariant check, for tests.
    fn audit(&self, _state: &WGameState) -> Result<(), String> {
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Embedded {
    painter: RecursivePainter,
    state: WGameState,
}

#[derive(Debug, Clone)]
pub struct RecursivePainter {
    w: usize,
    inner: Option<Box<Embedded>>,
    /// Aligned with the outer game's presented list.
    passed: Vec<bool>,
    check: bool,
    telemetry: PainterTelemetry,
}

fn stuck(e: WGameError) -> WGameError {
    WGameError::StrategyStuck(format!("embedded game rejected a mirrored move: {e}"))
}

impl RecursivePainter {
    /// Painter for the `w`-game on a chain of length `m`. With a family, the
    /// embedded games validate passed intervals against its non-maximal part.
    pub fn new(w: usize, m: usize, family: Option<&NestedIntervalFamily>) -> Self {
        assert!((1..=7).contains(&w), "w must be in 1..=7");
        let inner = (w >= 2).then(|| {
            let fam = family.map(NestedIntervalFamily::non_maximal);
            Box::new(Embedded {
                painter: RecursivePainter::new(w - 1, m, fam.as_ref()),
                state: WGameState::new(m, 1 << (w - 2), fam.as_ref()),
            })
        });
        RecursivePainter {
            w,
            inner,
            passed: Vec::new(),
            check: true,
            telemetry: PainterTelemetry::default(),
        }
    }

    pub fn palette(&self) -> u32 {
        1 << (self.w - 1)
    }

    /// Toggles the per-round invariant check (on by default).
    pub fn with_checks(mut self, on: bool) -> Self {
        self.set_checks(on);
        self
    }

    fn set_checks(&mut self, on: bool) {
        self.check = on;
        if let Some(e) = self.inner.as_mut() {
            e.painter.set_checks(on);
        }
    }

    pub fn telemetry(&self) -> PainterTelemetry {
        let mut t = self.telemetry.clone();
        if let Some(e) = &self.inner {
            t.add(&e.painter.telemetry());
        }
        t
    }

    /// Presented intervals passed down at each level, outermost first.
    pub fn passed_intervals(&self) -> Vec<Vec<Interval>> {
        let mut out = Vec::new();
        let mut cur = self;
        while let Some(e) = &cur.inner {
            out.push(e.state.presented().iter().map(|p| p.0).collect());
            cur = &e.painter;
        }
        out
    }

    /// Outer color for an embedded color `i` at `x`: the first available of `(i, 1)`, `(i, 0)`.
    fn lift(state: &WGameState, x: Point, i: u32) -> Result<u32, WGameError> {
        [pair_color(i, 1), pair_color(i, 0)]
            .into_iter()
            .find(|&c| state.is_available(x, c))
            .ok_or_else(|| WGameError::StrategyStuck(format!("both (i={i}, ·) forbidden at {x}")))
    }

    fn covered_mask(&self) -> Option<&[u64]> {
        self.inner.as_ref().map(|e| e.state.forbidden_masks())
    }

    fn check_round(&self, state: &WGameState, reply: &[(Point, u32)]) -> Result<(), WGameError> {
        if !self.check {
            return Ok(());
        }
        let Some(cover) = self.covered_mask() else {
            return Ok(());
        };
        let color_at = |x: Point| {
            reply
                .iter()
                .find(|r| r.0 == x)
                .map(|r| WColor::Color(r.1))
                .or(state.color(x))
        };
        invariant_fast(color_at, state.presented(), &self.passed, cover)
            .map_err(WGameError::InvariantViolated)
    }

    /// Colors the extremal points of `interval` where `comp` is available;
    /// falls back to any ≤2-subset that keeps the invariant.
    fn seal(
        &mut self,
        state: &WGameState,
        interval: Interval,
        comp: u32,
    ) -> Result<Vec<(Point, u32)>, WGameError> {
        let cands: Vec<Point> = interval
            .positions()
            .filter(|&x| state.color(x).is_none() && state.is_available(x, comp))
            .collect();
        let mut picks: Vec<Point> = match (cands.first(), cands.last()) {
            (Some(&a), Some(&b)) if a != b => vec![a, b],
            (Some(&a), _) => vec![a],
            _ => Vec::new(),
        };
        let cover = self.covered_mask().expect("sealing needs an embedded game");
        let holds = |picks: &[Point]| {
            let color_at = |x: Point| {
                if picks.contains(&x) {
                    Some(WColor::Color(comp))
                } else {
                    state.color(x)
                }
            };
            invariant_fast(color_at, state.presented(), &self.passed, cover).is_ok()
        };
        let mut fell_back = false;
        if self.check && !holds(&picks) {
            fell_back = true;
            let mut subsets: Vec<Vec<Point>> = vec![Vec::new()];
            subsets.extend(cands.iter().map(|&a| vec![a]));
            for (ai, &a) in cands.iter().enumerate() {
                subsets.extend(cands[ai + 1..].iter().map(|&b| vec![a, b]));
            }
            picks = subsets.into_iter().find(|s| holds(s)).ok_or_else(|| {
                WGameError::StrategyStuck(format!(
                    "no selection of at most two points seals {interval} with color {comp}"
                ))
            })?;
        }
        if fell_back {
            self.telemetry.fallback += 1;
        }
        Ok(picks.into_iter().map(|x| (x, comp)).collect())
    }
}

impl Painter for RecursivePainter {
    fn on_assign(&mut self, state: &WGameState, point: Point, color: WColor) -> Result<(), WGameError> {
        self.telemetry.assigns += 1;
        if let Some(e) = self.inner.as_mut() {
            let ec = match color {
                WColor::Bot => WColor::Bot,
                WColor::Color(c) => WColor::Color(pair_of(c).0),
            };
            e.state
                .apply_presenter(PresenterAction::Assign { point, color: ec })
                .map_err(stuck)?;
            e.painter.on_assign(&e.state, point, ec)?;
        }
        self.check_round(state, &[])
    }

    fn on_present(
        &mut self,
        state: &WGameState,
        interval: Interval,
        forbidden: u32,
    ) -> Result<Vec<(Point, u32)>, WGameError> {
        let idx = state.presented().len() - 1;
        self.passed.push(false);
        if self.inner.is_none() {
            return Ok(Vec::new());
        }
        let (i, j) = pair_of(forbidden);
        let comp = pair_color(i, 1 - j);
        let pass = state.presented()[..idx]
            .iter()
            .any(|(big, g)| *g == comp && interval.strictly_inside(big));
        let reply = if pass {
            self.telemetry.passed += 1;
            self.passed[idx] = true;
            let e = self.inner.as_mut().unwrap();
            let ob = e
                .state
                .apply_presenter(PresenterAction::Present {
                    interval,
                    forbidden: i,
                })
                .map_err(stuck)?;
            let sub = e.painter.on_present(&e.state, interval, i)?;
            e.state.apply_painter(ob, &sub).map_err(stuck)?;
            sub.into_iter()
                .map(|(x, ic)| Ok((x, Self::lift(state, x, ic)?)))
                .collect::<Result<Vec<_>, WGameError>>()?
        } else {
            self.telemetry.sealed += 1;
            let picks = self.seal(state, interval, comp)?;
            let e = self.inner.as_mut().unwrap();
            for &(x, _) in &picks {
                e.state
                    .apply_presenter(PresenterAction::Assign {
                        point: x,
                        color: WColor::Bot,
                    })
                    .map_err(stuck)?;
                e.painter.on_assign(&e.state, x, WColor::Bot)?;
            }
            picks
        };
        self.telemetry.colorings += reply.len() as u64;
        self.check_round(state, &reply)?;
        Ok(reply)
    }

    fn on_ask(&mut self, state: &WGameState, point: Point) -> Result<u32, WGameError> {
        self.telemetry.asks += 1;
        self.telemetry.colorings += 1;
        let c = match self.inner.as_mut() {
            None => (1..=state.palette())
                .find(|&c| state.is_available(point, c))
                .ok_or_else(|| WGameError::StrategyStuck(format!("no color available at {point}")))?,
            Some(e) => {
                let ob = e
                    .state
                    .apply_presenter(PresenterAction::Ask { point })
                    .map_err(stuck)?;
                if e.state.presenter_won() {
                    return Err(WGameError::StrategyStuck(format!(
                        "embedded game has no color for {point}"
                    )));
                }
                let i = e.painter.on_ask(&e.state, point)?;
                e.state.apply_painter(ob, &[(point, i)]).map_err(stuck)?;
                Self::lift(state, point, i)?
            }
        };
        self.check_round(state, &[(point, c)])?;
        Ok(c)
    }

    fn audit(&self, state: &WGameState) -> Result<(), String> {
        let Some(e) = &self.inner else {
            return Ok(());
        };
        let depth = super::nested_depth(&e.state.presented().iter().map(|p| p.0).collect::<Vec<_>>());
        if depth > self.w - 2 {
            return Err(format!(
                "passed family has nesting depth {depth} in a {}-game",
                self.w
            ));
        }
        invariant_brute_force(state, &self.passed, e.state.forbidden_masks())?;
        e.painter.audit(&e.state)
    }
}

/// Flanking form of the invariant.
fn invariant_fast(
    color_at: impl Fn(Point) -> Option<WColor>,
    presented: &[(Interval, u32)],
    passed: &[bool],
    cover: &[u64],
) -> Result<(), String> {
    for (idx, &(big, f)) in presented.iter().enumerate() {
        if passed[idx] {
            continue;
        }
        let (i, _) = pair_of(f);
        let is_i = |x: &Point| matches!(color_at(*x), Some(WColor::Color(c)) if pair_of(c).0 == i);
        let first = big.positions().find(is_i);
        let last = big.positions().rev().find(is_i);
        for u in big.positions() {
            if color_at(u).is_some() || cover[u] >> (i - 1) & 1 == 1 {
                continue;
            }
            let flanked = first.is_some_and(|a| a < u) && last.is_some_and(|b| u < b);
            if !flanked {
                return Err(format!(
                    "uncolored {u} in {big} (f = {f}) is neither flanked by pair {i} nor dead"
                ));
            }
        }
    }
    Ok(())
}

/// Direct quantification: for every unpassed presented `J` with `f(J) = (i, j)`
/// and every interval `K` of the chain free of `(i, ·)` colors that meets a
/// live uncolored point of `J`, `K ⋐ J`; and every presented `I ⋐ J` with
/// `f(I) = (i, 1-j)` still holding live uncolored points was passed down.
fn invariant_brute_force(state: &WGameState, passed: &[bool], cover: &[u64]) -> Result<(), String> {
    let m = state.m();
    let presented = state.presented();
    for (jdx, &(big, f)) in presented.iter().enumerate() {
        if passed[jdx] {
            continue;
        }
        let (i, j) = pair_of(f);
        let has_i = |x: Point| matches!(state.color(x), Some(WColor::Color(c)) if pair_of(c).0 == i);
        let live = |x: Point| state.color(x).is_none() && cover[x] >> (i - 1) & 1 == 0;
        // prefix counts make each K an O(1) test
        let mut pi = vec![0usize; m + 1];
        let mut pl = vec![0usize; m + 1];
        for x in 0..m {
            pi[x + 1] = pi[x] + usize::from(has_i(x));
            pl[x + 1] = pl[x] + usize::from(live(x) && big.contains(x));
        }
        for s in 0..m {
            for t in s..m {
                let k = Interval::new(s, t);
                if pi[t + 1] - pi[s] == 0 && pl[t + 1] - pl[s] > 0 && !k.strictly_inside(&big) {
                    return Err(format!("{k} is free of pair {i}, meets live points of {big} but is not nested in it"));
                }
            }
        }
        let comp = pair_color(i, 1 - j);
        for (idx, &(small, g)) in presented.iter().enumerate() {
            if g == comp && small.strictly_inside(&big) && small.positions().any(live) && !passed[idx] {
                return Err(format!("{small} nested in {big} with complementary color was not passed"));
            }
        }
    }
    Ok(())
}
