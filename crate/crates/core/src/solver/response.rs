//! Optimal opposition against one fixed agent.

use std::sync::Arc;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::game::{Agent, GameConfig, GameRng, GameState, Move, Outcome, Player, Variant};
use crate::poset::Poset;

use super::{Budget, SolveError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestResponse {
    /// Best outcome the free side can force: a win when one exists, else the
    /// fixed side's win; for value games the free side's optimum.
    pub outcome: Outcome,
    /// A line reaching `outcome`.
    pub line: Vec<(Player, Move)>,
    pub nodes: u64,
}

struct Ctx {
    free: Player,
    variant: Variant,
    nodes: u64,
    max_nodes: u64,
    path: Vec<(Player, Move)>,
}

impl Ctx {
    /// Whether `a` is strictly better than `b` for the free side.
    fn better(&self, a: Outcome, b: Outcome) -> bool {
        match (a, b) {
            (Outcome::Value(x), Outcome::Value(y)) => match self.free {
                Player::Alice => x < y,
                Player::Bob => x > y,
            },
            _ => a == self.ideal() && b != a,
        }
    }

    fn ideal(&self) -> Outcome {
        match self.free {
            Player::Alice => Outcome::AliceWins,
            Player::Bob => Outcome::BobWins,
        }
    }

    fn fail(&self, error: impl ToString) -> SolveError {
        SolveError::AgentFailed {
            error: error.to_string(),
            line: self.path.clone(),
        }
    }
}

fn search(state: &GameState, agent: &mut dyn Agent, ctx: &mut Ctx) -> Result<(Outcome, Vec<(Player, Move)>), SolveError> {
    if state.is_over() {
        return Ok((state.outcome(), Vec::new()));
    }
    if ctx.variant == Variant::Coloring && state.stranded_point().is_some() {
        return Ok((Outcome::BobWins, Vec::new()));
    }
    ctx.nodes += 1;
    if ctx.nodes > ctx.max_nodes {
        return Err(SolveError::BudgetExceeded { nodes: ctx.nodes });
    }
    let turn = state.turn().expect("ongoing game has a mover");
    if turn != ctx.free {
        let mv = agent.choose(state, &mut GameRng::seed_from_u64(0)).map_err(|e| ctx.fail(e))?;
        let mut next = state.clone();
        next.apply_move(turn, mv).map_err(|e| ctx.fail(e))?;
        agent.observe(&next, turn, &mv).map_err(|e| ctx.fail(e))?;
        ctx.path.push((turn, mv));
        let (outcome, mut line) = search(&next, agent, ctx)?;
        ctx.path.pop();
        line.insert(0, (turn, mv));
        return Ok((outcome, line));
    }
    let mut best: Option<(Outcome, Vec<(Player, Move)>)> = None;
    for mv in state.legal_moves() {
        let mut next = state.clone();
        next.apply_move(turn, mv).expect("legal move applies");
        let mut branch = agent.boxed_clone();
        ctx.path.push((turn, mv));
        branch.observe(&next, turn, &mv).map_err(|e| ctx.fail(e))?;
        let (outcome, mut line) = search(&next, branch.as_mut(), ctx)?;
        ctx.path.pop();
        if best.as_ref().is_none_or(|(b, _)| ctx.better(outcome, *b)) {
            line.insert(0, (turn, mv));
            let done = outcome == ctx.ideal();
            best = Some((outcome, line));
            if done {
                break;
            }
        }
    }
    Ok(best.expect("an ongoing game has a legal move"))
}

/// Minimax where `fixed` plays one side deterministically (every call sees
/// a fresh RNG seeded with 0) and the other side searches all legal moves.
/// A stranded point ends coloring games as a Bob win. An agent error or an
/// illegal agent move is reported with the line that provoked it.
pub fn best_response_search(
    p: &Poset,
    config: GameConfig,
    fixed: &dyn Agent,
    fixed_side: Player,
    budget: &Budget,
) -> Result<BestResponse, SolveError> {
    let state = GameState::new(Arc::new(p.clone()), config).map_err(|e| SolveError::Unsupported(e.to_string()))?;
    let mut agent = fixed.boxed_clone();
    let mut ctx = Ctx {
        free: fixed_side.other(),
        variant: config.variant,
        nodes: 0,
        max_nodes: budget.max_nodes,
        path: Vec::new(),
    };
    agent.start(&state).map_err(|e| ctx.fail(e))?;
    let (outcome, line) = search(&state, agent.as_mut(), &mut ctx)?;
    Ok(BestResponse {
        outcome,
        line,
        nodes: ctx.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::lemma2_poset;
    use crate::poset::random_width_poset;
    use crate::solver::game_chromatic_value;
    use crate::strategies::{ChainPartitionAlice, RandomAgent, RegionBob};
    use crate::game::Mode;

    #[test]
    fn lemma2_bob_beats_every_alice() {
        let (p, meta) = lemma2_poset(2, 8).unwrap();
        let bob = RegionBob::lemma2(&meta).unwrap();
        let cfg = GameConfig::coloring(1, 1, 2).auxiliary();
        let r = best_response_search(&p, cfg, &bob, Player::Bob, &Budget::default()).unwrap();
        assert_eq!(r.outcome, Outcome::BobWins);
    }

    #[test]
    fn chain_alice_beats_every_bob_on_width_two() {
        for seed in 0..12 {
            let n = 3 + seed as usize % 6;
            let p = random_width_poset(2, n, seed).unwrap();
            let alice = ChainPartitionAlice::new(&p).unwrap();
            let cfg = GameConfig::coloring(2, 1, 4);
            let r = best_response_search(&p, cfg, &alice, Player::Alice, &Budget::default()).unwrap();
            assert_eq!(r.outcome, Outcome::AliceWins, "seed {seed}");
        }
    }

    #[test]
    fn fixed_random_bob_is_no_stronger_than_optimal() {
        // Against the minimum winning palette Alice wins under optimal Bob,
        // so she also wins when Bob is a fixed agent.
        for seed in 0..8 {
            let p = crate::poset::random_poset(6, 0.3, 40 + seed);
            let k = game_chromatic_value(&p, 1, 1, Mode::Standard, &Budget::default()).unwrap().value;
            let cfg = GameConfig::coloring(1, 1, k);
            let r = best_response_search(&p, cfg, &RandomAgent, Player::Bob, &Budget::default()).unwrap();
            assert_eq!(r.outcome, Outcome::AliceWins);
        }
    }
}
