//! Exact values on small posets: game values by memoized minimax, the
//! classical parameters, and best-response search against a fixed agent.

mod game;
mod grundy;
mod response;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{GameConfig, GameState, Mode, Move, MoveRecord, Outcome, Player};
use crate::poset::{width, Point, Poset};

pub use grundy::{grundy_number, search_width2_grundy, width2_presentations, GrundyReport, Width2Search, Width2Witness};
pub use response::{best_response_search, BestResponse};

use game::Solver;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum SolveError {
    #[error("node budget exhausted after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },
    #[error("{n} points exceed the solver limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("fixed agent failed after {} moves: {error}", line.len())]
    AgentFailed { error: String, line: Vec<(Player, Move)> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Largest poset the game solvers accept.
    pub max_points: usize,
    pub max_nodes: u64,
    /// Memoization switch; off is only useful for soundness spot checks.
    pub memo: bool,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_points: 10,
            max_nodes: 20_000_000,
            memo: true,
        }
    }
}

impl Budget {
    pub fn points(max_points: usize) -> Self {
        Budget {
            max_points,
            ..Budget::default()
        }
    }

    fn admit(&self, p: &Poset) -> Result<(), SolveError> {
        if p.len() > self.max_points {
            return Err(SolveError::TooLarge {
                n: p.len(),
                limit: self.max_points,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    Chig,
    Grg,
    Colg,
    Grundy,
    Col,
    Width,
}

impl std::str::FromStr for Param {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "chig" => Param::Chig,
            "grg" => Param::Grg,
            "colg" => Param::Colg,
            "grundy" => Param::Grundy,
            "col" => Param::Col,
            "width" => Param::Width,
            _ => return Err(format!("unknown parameter {s:?}")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub param: Param,
    pub a: usize,
    pub b: usize,
    pub mode: Mode,
    pub value: usize,
    /// `false` only for a Grundy lower bound.
    pub exact: bool,
    /// Optimal line for game parameters, in transcript form.
    pub pv: Vec<MoveRecord>,
    /// Witness points: a first-fit order for Γ, a smallest-last order for
    /// col, a maximum antichain for width.
    pub witness: Vec<Point>,
    pub nodes: u64,
    pub memo_entries: usize,
}

impl SolveReport {
    fn plain(param: Param, value: usize, witness: Vec<Point>) -> Self {
        SolveReport {
            param,
            a: 0,
            b: 0,
            mode: Mode::Standard,
            value,
            exact: true,
            pv: Vec::new(),
            witness,
            nodes: 0,
            memo_entries: 0,
        }
    }
}

/// Replays `line` through the engine, returning the records and final state.
fn replay(p: &Poset, cfg: GameConfig, line: &[(Player, Move)]) -> (Vec<MoveRecord>, GameState) {
    let mut state = GameState::new(Arc::new(p.clone()), cfg).expect("validated config");
    for &(actor, mv) in line {
        state.apply_move(actor, mv).expect("solver lines follow engine rules");
    }
    (state.history().to_vec(), state)
}

/// Least palette size for which Alice wins the coloring game.
///
/// Every `k` from 1 upward is solved on its own; no monotonicity in `k` is
/// assumed. A palette below the width is solved too, so the result is never
/// below the width by construction alone.
pub fn game_chromatic_value(p: &Poset, a: usize, b: usize, mode: Mode, budget: &Budget) -> Result<SolveReport, SolveError> {
    budget.admit(p)?;
    let mut nodes = 0;
    for k in 1..=p.len().max(1) {
        let mut cfg = GameConfig::coloring(a, b, k);
        cfg.mode = mode;
        let mut s = Solver::new(p, cfg, budget.memo, budget.max_nodes.saturating_sub(nodes))?;
        let win = s.alice_wins(&s.root())?;
        if win {
            let pv = s.principal_variation()?;
            let (pv, state) = replay(p, cfg, &pv);
            debug_assert!(state.uncolored_count() == 0);
            return Ok(SolveReport {
                param: Param::Chig,
                a,
                b,
                mode,
                value: k,
                exact: true,
                pv,
                witness: Vec::new(),
                nodes: nodes + s.nodes,
                memo_entries: s.memo_len(),
            });
        }
        nodes += s.nodes;
    }
    // n colors always suffice.
    unreachable!("Alice wins with one color per point")
}

fn value_game(p: &Poset, cfg: GameConfig, param: Param, budget: &Budget) -> Result<SolveReport, SolveError> {
    budget.admit(p)?;
    let mut s = Solver::new(p, cfg, budget.memo, budget.max_nodes)?;
    let value = s.value(&s.root())? as usize;
    let pv = s.principal_variation()?;
    let (pv, state) = replay(p, cfg, &pv);
    debug_assert_eq!(state.outcome(), Outcome::Value(value));
    Ok(SolveReport {
        param,
        a: cfg.a,
        b: cfg.b,
        mode: cfg.mode,
        value,
        exact: true,
        pv,
        witness: Vec::new(),
        nodes: s.nodes,
        memo_entries: s.memo_len(),
    })
}

/// Number of first-fit colors under optimal play; Alice minimizes.
pub fn grundy_game_value(p: &Poset, a: usize, b: usize, mode: Mode, budget: &Budget) -> Result<SolveReport, SolveError> {
    let mut cfg = GameConfig::grundy(a, b);
    cfg.mode = mode;
    value_game(p, cfg, Param::Grg, budget)
}

/// `1 +` the largest back-degree at marking time under optimal play.
pub fn marking_game_value(p: &Poset, a: usize, b: usize, mode: Mode, budget: &Budget) -> Result<SolveReport, SolveError> {
    let mut cfg = GameConfig::marking(a, b);
    cfg.mode = mode;
    value_game(p, cfg, Param::Colg, budget)
}

/// Coloring number of the incomparability graph via smallest-last ordering.
/// The witness lists points in marking order (reverse removal order).
pub fn coloring_number(p: &Poset) -> SolveReport {
    let n = p.len();
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = (0..n).map(|x| p.incomparables(x).count()).collect();
    let mut removal = Vec::with_capacity(n);
    let mut degeneracy = 0;
    for _ in 0..n {
        let x = (0..n).filter(|&x| alive[x]).min_by_key(|&x| deg[x]).expect("points remain");
        degeneracy = degeneracy.max(deg[x]);
        alive[x] = false;
        removal.push(x);
        for y in p.incomparables(x).iter() {
            if alive[y] {
                deg[y] -= 1;
            }
        }
    }
    removal.reverse();
    let value = if n == 0 { 0 } else { degeneracy + 1 };
    SolveReport::plain(Param::Col, value, removal)
}

pub fn width_report(p: &Poset) -> SolveReport {
    let w = width(p);
    SolveReport::plain(Param::Width, w.width, w.antichain)
}

pub fn grundy_report(p: &Poset) -> SolveReport {
    let g = grundy_number(p, 5_000_000);
    SolveReport {
        exact: g.exact,
        nodes: g.nodes,
        ..SolveReport::plain(Param::Grundy, g.value, g.order)
    }
}

/// Dispatches on `param`; `a`, `b` and `mode` matter only for game values.
pub fn solve(p: &Poset, param: Param, a: usize, b: usize, mode: Mode, budget: &Budget) -> Result<SolveReport, SolveError> {
    match param {
        Param::Chig => game_chromatic_value(p, a, b, mode, budget),
        Param::Grg => grundy_game_value(p, a, b, mode, budget),
        Param::Colg => marking_game_value(p, a, b, mode, budget),
        Param::Grundy => Ok(grundy_report(p)),
        Param::Col => Ok(coloring_number(p)),
        Param::Width => Ok(width_report(p)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::random_poset;

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn two_antichain_values() {
        let p = Poset::antichain(2);
        assert_eq!(game_chromatic_value(&p, 1, 0, Mode::Standard, &b()).unwrap().value, 2);
        assert_eq!(game_chromatic_value(&p, 1, 1, Mode::Standard, &b()).unwrap().value, 2);
        for (a, bb) in [(1, 0), (0, 1), (1, 1), (2, 1)] {
            assert_eq!(grundy_game_value(&p, a, bb, Mode::Standard, &b()).unwrap().value, 2);
        }
        assert_eq!(marking_game_value(&p, 1, 1, Mode::Standard, &b()).unwrap().value, 2);
    }

    #[test]
    fn chains_are_trivial() {
        let p = Poset::chain(6);
        for (a, bb) in [(1, 0), (1, 1), (2, 3)] {
            assert_eq!(game_chromatic_value(&p, a, bb, Mode::Standard, &b()).unwrap().value, 1);
            assert_eq!(marking_game_value(&p, a, bb, Mode::Standard, &b()).unwrap().value, 1);
        }
        assert_eq!(grundy_number(&p, 1000).value, 1);
    }

    // Degeneracy oracle: max over orders of min back-degree, by brute force.
    fn col_brute(p: &Poset) -> usize {
        let n = p.len();
        let mut best = usize::MAX;
        let mut perm: Vec<usize> = (0..n).collect();
        fn rec(p: &Poset, perm: &mut Vec<usize>, i: usize, best: &mut usize) {
            if i == perm.len() {
                let mut worst = 0;
                for j in 0..perm.len() {
                    let back = (0..j).filter(|&t| p.incomparable(perm[t], perm[j])).count();
                    worst = worst.max(back);
                }
                *best = (*best).min(worst + 1);
                return;
            }
            for j in i..perm.len() {
                perm.swap(i, j);
                rec(p, perm, i + 1, best);
                perm.swap(i, j);
            }
        }
        rec(p, &mut perm, 0, &mut best);
        best
    }

    #[test]
    fn identities_on_random_posets() {
        for seed in 0..40 {
            let n = 2 + (seed as usize % 6);
            let p = random_poset(n, 0.3, seed);
            let w = width(&p).width;
            assert_eq!(game_chromatic_value(&p, 1, 0, Mode::Standard, &b()).unwrap().value, w);
            assert_eq!(grundy_game_value(&p, 1, 0, Mode::Standard, &b()).unwrap().value, w);
            let col = coloring_number(&p).value;
            assert_eq!(col, col_brute(&p), "seed {seed}");
            assert_eq!(marking_game_value(&p, 1, 0, Mode::Standard, &b()).unwrap().value, col);
            let gamma = grundy_number(&p, 1_000_000);
            assert!(gamma.exact);
            assert_eq!(grundy_game_value(&p, 0, 1, Mode::Standard, &b()).unwrap().value, gamma.value);
        }
    }

    #[test]
    fn memo_on_and_off_agree() {
        let off = Budget { memo: false, ..b() };
        for seed in 0..12 {
            let p = random_poset(5, 0.3, 100 + seed);
            for (a, bb) in [(1, 1), (2, 1), (1, 2)] {
                for mode in [Mode::Standard, Mode::Auxiliary] {
                    let x = game_chromatic_value(&p, a, bb, mode, &b()).unwrap().value;
                    assert_eq!(x, game_chromatic_value(&p, a, bb, mode, &off).unwrap().value);
                    let g = grundy_game_value(&p, a, bb, mode, &b()).unwrap().value;
                    assert_eq!(g, grundy_game_value(&p, a, bb, mode, &off).unwrap().value);
                    let m = marking_game_value(&p, a, bb, mode, &b()).unwrap().value;
                    assert_eq!(m, marking_game_value(&p, a, bb, mode, &off).unwrap().value);
                }
            }
        }
    }

    #[test]
    fn principal_variations_replay() {
        for seed in 0..10 {
            let p = random_poset(7, 0.35, 200 + seed);
            let r = game_chromatic_value(&p, 1, 1, Mode::Standard, &b()).unwrap();
            let (_, state) = replay(&p, GameConfig::coloring(1, 1, r.value), &as_line(&r.pv));
            assert_eq!(state.outcome(), Outcome::AliceWins);
            let r = grundy_game_value(&p, 1, 1, Mode::Standard, &b()).unwrap();
            let (_, state) = replay(&p, GameConfig::grundy(1, 1), &as_line(&r.pv));
            assert_eq!(state.outcome(), Outcome::Value(r.value));
        }
    }

    fn as_line(pv: &[MoveRecord]) -> Vec<(Player, Move)> {
        pv.iter().map(|r| (r.actor, r.mv)).collect()
    }

    #[test]
    fn budget_is_enforced() {
        let p = Poset::antichain(11);
        assert!(matches!(
            game_chromatic_value(&p, 1, 1, Mode::Standard, &b()),
            Err(SolveError::TooLarge { .. })
        ));
        let tiny = Budget { max_nodes: 10, ..b() };
        assert!(matches!(
            grundy_game_value(&Poset::antichain(8), 1, 1, Mode::Standard, &tiny),
            Err(SolveError::BudgetExceeded { .. })
        ));
    }
}
