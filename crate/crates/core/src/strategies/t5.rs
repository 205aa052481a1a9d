//! Alice for the `(2, 1)` coloring game on posets of width `w` with
//! `w · 2^{w−1}` colors.
//!
//! The poset is split into `w` chains, each owning a palette of `2^{w−1}`
//! colors and its own interval game whose family is `{ I_i(x) : x ∉ C_i }`,
//! the incomparability intervals along chain `i`. A Bob coloring of `x ∈ C_j`
//! with a color of palette `i` becomes an assignment in game `j` (the color
//! itself when `i = j`, else `⊥`) and, when `i ≠ j`, a presentation of
//! `I_i(x)` forbidding that color in game `i`. Painter's replies are Alice's
//! next moves; spare moves ask for the least uncolored point of the chain
//! with most uncolored points. A color is available at a point of game `i`
//! exactly when it is legal in the poset, which is checked on every move.

use std::collections::VecDeque;

use serde::Serialize;
use serde_json::{json, Value};

use crate::game::{Agent, AgentError, Color, GameRng, GameState, Mode, Move, Player, Variant};
use crate::poset::{min_chain_partition, Interval, Point, Poset};
use crate::wgame::{NestedIntervalFamily, Obligation, Painter, PresenterAction, RecursivePainter, WColor, WGameState};

#[derive(Debug, Clone)]
struct ChainGame {
    points: Vec<Point>,
    state: WGameState,
    painter: RecursivePainter,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ChainAliceTelemetry {
    pub same_chain: usize,
    pub presentations: usize,
    pub painter_replies: usize,
    pub idle_asks: usize,
    /// Buffered replies left over when Alice's turn ended.
    pub max_surplus: usize,
    pub sealed: u64,
    pub passed_down: u64,
}

#[derive(Debug, Clone)]
pub struct ChainPartitionAlice {
    w: usize,
    palette: u32,
    chains: Vec<ChainGame>,
    /// `(chain, position)` of every point.
    place: Vec<(usize, usize)>,
    /// `intervals[i][x]`: positions of chain `i` incomparable to `x`.
    intervals: Vec<Vec<Option<Interval>>>,
    buffer: VecDeque<(Point, Color)>,
    telemetry: ChainAliceTelemetry,
    notes: Vec<Value>,
    checks: Option<bool>,
}

impl ChainPartitionAlice {
    pub fn new(poset: &Poset) -> Result<Self, AgentError> {
        let part = min_chain_partition(poset);
        let w = part.len().max(1);
        if w > 7 {
            return Err(AgentError::Precondition(format!("width {w} exceeds 7")));
        }
        let n = poset.len();
        let mut place = vec![(0, 0); n];
        for (i, c) in part.chains.iter().enumerate() {
            for (pos, &x) in c.iter().enumerate() {
                place[x] = (i, pos);
            }
        }
        let mut intervals = vec![vec![None; n]; part.len()];
        for (i, chain) in part.chains.iter().enumerate() {
            for x in (0..n).filter(|&x| place[x].0 != i) {
                intervals[i][x] = poset
                    .incomparability_interval(chain, x)
                    .map_err(|e| AgentError::Precondition(e.to_string()))?;
            }
        }
        let palette = 1u32 << (w - 1);
        let chains = part
            .chains
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let fam = NestedIntervalFamily::new(c.len(), intervals[i].iter().flatten().copied());
                if fam.nested_depth() + 1 > w {
                    return Err(AgentError::Precondition(format!(
                        "chain {i}: nested depth {} exceeds w - 1 = {}",
                        fam.nested_depth(),
                        w - 1
                    )));
                }
                Ok(ChainGame {
                    points: c.clone(),
                    state: WGameState::new(c.len(), palette, Some(&fam)),
                    painter: RecursivePainter::new(w, c.len(), Some(&fam)),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ChainPartitionAlice {
            w,
            palette,
            chains,
            place,
            intervals,
            buffer: VecDeque::new(),
            telemetry: ChainAliceTelemetry::default(),
            notes: Vec::new(),
            checks: None,
        })
    }

    /// Forces the painters' per-round invariant checks on or off; by default
    /// they run when every chain has at most 64 points.
    pub fn with_checks(mut self, on: bool) -> Self {
        self.checks = Some(on);
        self
    }

    /// Colors needed: `w · 2^{w−1}`.
    pub fn colors_needed(&self) -> usize {
        self.w * self.palette as usize
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn telemetry(&self) -> ChainAliceTelemetry {
        let mut t = self.telemetry.clone();
        for c in &self.chains {
            let pt = c.painter.telemetry();
            t.sealed += pt.sealed;
            t.passed_down += pt.passed;
        }
        t
    }

    fn color_of(&self, chain: usize, g: u32) -> Color {
        chain * self.palette as usize + g as usize
    }

    /// Runs one Presenter action in game `i`; returns Painter's colorings as real moves.
    fn step(&mut self, i: usize, action: PresenterAction) -> Result<Vec<(Point, Color)>, AgentError> {
        let game = &mut self.chains[i];
        let illegal = |e: crate::wgame::WGameError| AgentError::TranslationIllegal(format!("chain {i}: {action:?}: {e}"));
        let ob = game.state.apply_presenter(action).map_err(illegal)?;
        if game.state.presenter_won() {
            return Err(AgentError::StrategyStuck(format!("chain {i}: Presenter won the interval game")));
        }
        let reply = match action {
            PresenterAction::Assign { point, color } => game.painter.on_assign(&game.state, point, color).map(|_| Vec::new()),
            PresenterAction::Present { interval, forbidden } => game.painter.on_present(&game.state, interval, forbidden),
            PresenterAction::Ask { point } => game.painter.on_ask(&game.state, point).map(|c| vec![(point, c)]),
        }
        .map_err(|e| AgentError::StrategyStuck(format!("chain {i}: {e}")))?;
        game.state
            .apply_painter(ob, &reply)
            .map_err(|e| AgentError::Invariant(format!("chain {i}: painter reply rejected: {e}")))?;
        debug_assert!(!matches!(ob, Obligation::Color(_)) || reply.len() == 1);
        let points = &self.chains[i].points;
        Ok(reply
            .into_iter()
            .map(|(pos, c)| (points[pos], i * self.palette as usize + c as usize))
            .collect())
    }

    /// Availability in the chain game agrees with legality in the poset.
    fn check_correspondence(&self, state: &GameState, x: Point) -> Result<(), AgentError> {
        let (i, pos) = self.place[x];
        let g = &self.chains[i].state;
        if !state.is_uncolored(x) {
            return Ok(());
        }
        for c in 1..=self.palette {
            let real = self.color_of(i, c);
            if real <= state.config().k && state.can_color(x, real) != g.is_available(pos, c) {
                return Err(AgentError::Invariant(format!(
                    "point {x}: color {real} legal={} but available={}",
                    state.can_color(x, real),
                    g.is_available(pos, c)
                )));
            }
        }
        Ok(())
    }
}

impl Agent for ChainPartitionAlice {
    fn name(&self) -> String {
        "alice-chains".into()
    }

    fn start(&mut self, state: &GameState) -> Result<(), AgentError> {
        let cfg = state.config();
        if cfg.variant != Variant::Coloring || cfg.mode != Mode::Standard || cfg.b != 1 || cfg.a < 2 {
            return Err(AgentError::Precondition("expects the standard (a,1) coloring game with a >= 2".into()));
        }
        if cfg.k < self.colors_needed() {
            return Err(AgentError::Precondition(format!(
                "width {} needs {} colors, got {}",
                self.w,
                self.colors_needed(),
                cfg.k
            )));
        }
        if state.len() != self.place.len() {
            return Err(AgentError::Precondition("poset size changed".into()));
        }
        let on = self
            .checks
            .unwrap_or_else(|| self.chains.iter().all(|c| c.points.len() <= 64));
        for c in &mut self.chains {
            c.painter = std::mem::replace(&mut c.painter, RecursivePainter::new(1, 0, None)).with_checks(on);
        }
        Ok(())
    }

    fn choose(&mut self, state: &GameState, _rng: &mut GameRng) -> Result<Move, AgentError> {
        let (x, color) = match self.buffer.pop_front() {
            Some(m) => m,
            None => {
                let i = (0..self.chains.len())
                    .filter(|&i| self.chains[i].state.uncolored_count() > 0)
                    .max_by_key(|&i| (self.chains[i].state.uncolored_count(), std::cmp::Reverse(i)))
                    .ok_or_else(|| AgentError::StrategyStuck("nothing left to ask".into()))?;
                let pos = self.chains[i].state.uncolored_points().next().unwrap();
                self.telemetry.idle_asks += 1;
                self.step(i, PresenterAction::Ask { point: pos })?[0]
            }
        };
        self.check_correspondence(state, x)?;
        if !state.can_color(x, color) {
            return Err(AgentError::TranslationIllegal(format!(
                "painter chose color {color} for point {x}, which is illegal"
            )));
        }
        Ok(Move::Color { point: x, color })
    }

    fn observe(&mut self, state: &GameState, actor: Player, mv: &Move) -> Result<(), AgentError> {
        let Move::Color { point: x, color } = *mv else {
            return Ok(());
        };
        if actor == Player::Alice {
            if state.turn() != Some(Player::Alice) && !self.buffer.is_empty() {
                self.telemetry.max_surplus = self.telemetry.max_surplus.max(self.buffer.len());
                self.notes.push(json!({"surplus": self.buffer.len()}));
            }
            return Ok(());
        }
        let (j, pos) = self.place[x];
        let i = (color - 1) / self.palette as usize;
        let g = ((color - 1) % self.palette as usize) as u32 + 1;
        if i == j {
            self.telemetry.same_chain += 1;
            self.step(j, PresenterAction::Assign { point: pos, color: WColor::Color(g) })?;
        } else {
            self.step(j, PresenterAction::Assign { point: pos, color: WColor::Bot })?;
            if i < self.chains.len() && self.chains[i].state.uncolored_count() > 0 {
                if let Some(interval) = self.intervals[i][x] {
                    self.telemetry.presentations += 1;
                    let replies = self.step(i, PresenterAction::Present { interval, forbidden: g })?;
                    self.telemetry.painter_replies += replies.len();
                    self.buffer.extend(replies);
                }
            }
        }
        if self.chains[i.min(self.chains.len() - 1)].points.len() <= 64 {
            for &y in &self.chains[i.min(self.chains.len() - 1)].points {
                self.check_correspondence(state, y)?;
            }
        }
        Ok(())
    }

    fn drain_notes(&mut self) -> Vec<Value> {
        std::mem::take(&mut self.notes)
    }

    fn boxed_clone(&self) -> Box<dyn Agent> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{lemma2_poset, lemma4_default_sizing, lemma4_poset};
    use crate::game::{play_match, GameConfig, MatchOptions, Outcome};
    use crate::poset::random_width_poset;
    use crate::strategies::{DangerAgent, GreedyAgent, MinimaxAgent, RandomAgent};
    use std::sync::Arc;

    fn bobs() -> Vec<Box<dyn Agent>> {
        vec![
            Box::new(RandomAgent),
            Box::new(GreedyAgent),
            Box::new(DangerAgent),
            Box::new(MinimaxAgent::lookahead2()),
        ]
    }

    fn run(p: Poset, seeds: u64) {
        let p = Arc::new(p);
        let alice = ChainPartitionAlice::new(&p).unwrap();
        let k = alice.colors_needed();
        for seed in 0..seeds {
            for bob in bobs() {
                let mut bob = bob;
                let mut a = alice.clone();
                let t = play_match(p.clone(), GameConfig::coloring(2, 1, k), &mut a, bob.as_mut(), seed, &MatchOptions::default())
                    .unwrap_or_else(|e| panic!("{} seed {seed}: {}", bob.name(), e.kind));
                assert_eq!(t.outcome, Outcome::AliceWins, "{} seed {seed}", bob.name());
                assert_eq!(a.telemetry().max_surplus, 0);
            }
        }
    }

    #[test]
    fn wins_on_random_width_posets() {
        for w in 1..=4 {
            for seed in 0..6 {
                run(random_width_poset(w, 10 + 6 * w, seed).unwrap(), 2);
            }
        }
    }

    #[test]
    fn wins_on_bob_constructions() {
        run(lemma2_poset(2, 16).unwrap().0, 2);
        let (sizes, m) = (vec![8, 2], 16);
        run(lemma4_poset(2, 3, 1, &sizes, m).unwrap().0, 1);
        let _ = lemma4_default_sizing;
    }

    #[test]
    fn refuses_too_few_colors() {
        let p = Arc::new(random_width_poset(3, 12, 0).unwrap());
        let mut a = ChainPartitionAlice::new(&p).unwrap();
        let s = GameState::new(p, GameConfig::coloring(2, 1, 11)).unwrap();
        assert!(matches!(a.start(&s), Err(AgentError::Precondition(_))));
    }
}
