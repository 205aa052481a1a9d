//! Lifting an auxiliary-game Bob to the standard `(a, b)` game on a stack of
//! copies.
//!
//! Each copy runs its own auxiliary `(⌊a/b⌋, 1)` game with a fresh embedded
//! Bob. Bob's `b` moves per turn go to the live copies with the fewest
//! embedded rounds. Alice's moves in a copy since Bob last moved there become
//! her reply; more than `⌊a/b⌋` of them, or any move in a copy Bob has not
//! opened yet, invalidates the copy. Copies are mutually comparable, so
//! legality inside a copy is exactly legality in the stack.

use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::constructions::ConstructionMeta;
use crate::game::{
    Agent, AgentError, GameConfig, GameRng, GameState, Mode, Move, Player, Termination, Transcript,
    TranscriptHeader, Variant,
};
use crate::poset::{Point, Poset};

use super::baseline::greedy_move;

pub type AgentFactory = Arc<dyn Fn() -> Box<dyn Agent> + Send + Sync>;

/// Default stack height: enough copies that Alice cannot spoil all of them
/// within `horizon` embedded rounds.
pub fn default_copies(a: usize, b: usize, horizon: usize) -> usize {
    let q = a / b.max(1);
    (a + 1) * (b * (q + 1)).pow(horizon as u32) + 1
}

struct Slot {
    state: Option<GameState>,
    agent: Box<dyn Agent>,
    pending: Vec<Move>,
    alive: bool,
    rounds: usize,
}

impl Clone for Slot {
    fn clone(&self) -> Self {
        Slot {
            state: self.state.clone(),
            agent: self.agent.boxed_clone(),
            pending: self.pending.clone(),
            alive: self.alive,
            rounds: self.rounds,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct LiftTelemetry {
    pub copies: usize,
    pub opened: usize,
    /// Copies Alice touched before Bob opened them.
    pub spoiled_fresh: usize,
    /// Copies where Alice replied with more than `⌊a/b⌋` moves.
    pub over_quota: usize,
    pub winning_copy: Option<usize>,
    pub bob_moves: usize,
}

#[derive(Clone)]
pub struct LiftBob {
    inner_name: String,
    factory: AgentFactory,
    pattern: Arc<Poset>,
    copies: usize,
    slots: Vec<Slot>,
    embedded: Option<GameConfig>,
    won: bool,
    telemetry: LiftTelemetry,
    notes: Vec<Value>,
}

impl LiftBob {
    /// `meta` must describe a stack of `pattern`.
    pub fn new(pattern: Arc<Poset>, meta: &ConstructionMeta, factory: AgentFactory) -> Result<Self, AgentError> {
        let (size, copies) = meta
            .copy_layout()
            .ok_or_else(|| AgentError::Precondition("lift needs a stack of copies".into()))?;
        if size != pattern.len() {
            return Err(AgentError::Precondition(format!(
                "copy size {size} differs from the pattern size {}",
                pattern.len()
            )));
        }
        let inner_name = factory().name();
        Ok(LiftBob {
            inner_name,
            factory,
            pattern,
            copies,
            slots: Vec::new(),
            embedded: None,
            won: false,
            telemetry: LiftTelemetry::default(),
            notes: Vec::new(),
        })
    }

    pub fn telemetry(&self) -> &LiftTelemetry {
        &self.telemetry
    }

    /// Embedded auxiliary games of all opened copies, as standalone transcripts.
    pub fn embedded_transcripts(&self) -> Vec<(usize, Transcript)> {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| {
                let st = s.state.as_ref()?;
                let header = TranscriptHeader {
                    config: *st.config(),
                    poset_hash: self.pattern.structure_hash(),
                    n: self.pattern.len(),
                    seed: None,
                    alice: "lifted".into(),
                    bob: self.inner_name.clone(),
                };
                Some((i, Transcript::from_state(st, header, Termination::Aborted)))
            })
            .collect()
    }

    pub fn pattern(&self) -> &Arc<Poset> {
        &self.pattern
    }

    fn invalidate(&mut self, copy: usize, over_quota: bool) {
        let slot = &mut self.slots[copy];
        if !slot.alive {
            return;
        }
        slot.alive = false;
        if over_quota {
            self.telemetry.over_quota += 1;
        } else {
            self.telemetry.spoiled_fresh += 1;
        }
        self.notes.push(json!({"lift": "invalidated", "copy": copy, "over_quota": over_quota}));
    }

    fn translate(mv: Move, off: usize) -> Move {
        match mv {
            Move::Color { point, color } => Move::Color { point: point + off, color },
            Move::Choose { point } => Move::Choose { point: point + off },
            Move::Mark { point } => Move::Mark { point: point + off },
            Move::Pass => Move::Pass,
        }
    }

    fn localize(mv: Move, size: usize) -> (usize, Move) {
        let p: Point = mv.point().expect("colorings carry a point");
        let local = match mv {
            Move::Color { color, .. } => Move::Color { point: p % size, color },
            Move::Choose { .. } => Move::Choose { point: p % size },
            Move::Mark { .. } => Move::Mark { point: p % size },
            Move::Pass => Move::Pass,
        };
        (p / size, local)
    }

    fn open_or_flush(&mut self, copy: usize) -> Result<(), AgentError> {
        let cfg = self.embedded.expect("started");
        let slot = &mut self.slots[copy];
        let Some(st) = slot.state.as_mut() else {
            let st = GameState::new(self.pattern.clone(), cfg).map_err(|e| AgentError::Precondition(e.to_string()))?;
            slot.agent.start(&st)?;
            slot.state = Some(st);
            self.telemetry.opened += 1;
            return Ok(());
        };
        for mv in std::mem::take(&mut slot.pending) {
            st.apply_move(Player::Alice, mv)
                .map_err(|e| AgentError::TranslationIllegal(format!("copy {copy}: {mv}: {e}")))?;
            slot.agent.observe(st, Player::Alice, &mv)?;
        }
        if st.turn() == Some(Player::Alice) {
            st.apply_move(Player::Alice, Move::Pass)
                .map_err(|e| AgentError::TranslationIllegal(format!("copy {copy}: pass: {e}")))?;
            slot.agent.observe(st, Player::Alice, &Move::Pass)?;
        }
        Ok(())
    }
}

impl Agent for LiftBob {
    fn name(&self) -> String {
        format!("lift({})", self.inner_name)
    }

    fn start(&mut self, state: &GameState) -> Result<(), AgentError> {
        let cfg = *state.config();
        if cfg.mode != Mode::Standard || cfg.b == 0 {
            return Err(AgentError::Precondition("lift plays Bob in the standard game with b >= 1".into()));
        }
        if state.len() != self.copies * self.pattern.len() {
            return Err(AgentError::Precondition("poset is not the announced stack".into()));
        }
        let q = cfg.a / cfg.b;
        self.embedded = Some(match cfg.variant {
            Variant::Coloring => GameConfig::coloring(q, 1, cfg.k).auxiliary(),
            Variant::Grundy => GameConfig::grundy(q, 1).auxiliary(),
            Variant::Marking => return Err(AgentError::Precondition("lift does not play the marking game".into())),
        });
        self.slots = (0..self.copies)
            .map(|_| Slot {
                state: None,
                agent: (self.factory)(),
                pending: Vec::new(),
                alive: true,
                rounds: 0,
            })
            .collect();
        self.won = false;
        self.telemetry = LiftTelemetry {
            copies: self.copies,
            ..Default::default()
        };
        Ok(())
    }

    fn choose(&mut self, state: &GameState, rng: &mut GameRng) -> Result<Move, AgentError> {
        if self.embedded.is_none() {
            self.start(state)?;
        }
        if self.won {
            return greedy_move(state).ok_or_else(|| AgentError::StrategyStuck("no legal move".into()));
        }
        let copy = self
            .slots
            .iter()
            .enumerate()
            .filter(|(_, s)| s.alive && s.state.as_ref().is_none_or(|st| st.turn().is_some()))
            .min_by_key(|(i, s)| (s.rounds, *i))
            .map(|(i, _)| i)
            .ok_or_else(|| AgentError::AllCopiesInvalidated(format!("all {} copies spoiled", self.copies)))?;
        self.open_or_flush(copy)?;
        let size = self.pattern.len();
        let slot = &mut self.slots[copy];
        let st = slot.state.as_mut().unwrap();
        let local = slot.agent.choose(st, rng)?;
        st.apply_move(Player::Bob, local)
            .map_err(|e| AgentError::TranslationIllegal(format!("copy {copy}: embedded move {local}: {e}")))?;
        slot.agent.observe(st, Player::Bob, &local)?;
        slot.rounds += 1;
        let real = Self::translate(local, copy * size);
        state
            .check_move(Player::Bob, &real)
            .map_err(|e| AgentError::TranslationIllegal(format!("copy {copy}: {real}: {e}")))?;
        let won = match st.config().variant {
            Variant::Coloring => st.stranded_point().is_some(),
            _ => slot.agent.claims_win(),
        };
        self.telemetry.bob_moves += 1;
        if won {
            self.won = true;
            self.telemetry.winning_copy = Some(copy);
            self.notes.push(json!({"lift": "won", "copy": copy, "rounds": self.slots[copy].rounds}));
        }
        Ok(real)
    }

    fn observe(&mut self, _state: &GameState, actor: Player, mv: &Move) -> Result<(), AgentError> {
        if actor != Player::Alice || self.won || self.slots.is_empty() {
            return Ok(());
        }
        let q = self.embedded.map_or(0, |c| c.a);
        let (copy, local) = Self::localize(*mv, self.pattern.len());
        let slot = &mut self.slots[copy];
        if !slot.alive {
            return Ok(());
        }
        if slot.state.is_none() {
            self.invalidate(copy, false);
        } else {
            slot.pending.push(local);
            if slot.pending.len() > q {
                self.invalidate(copy, true);
            }
        }
        Ok(())
    }

    fn drain_notes(&mut self) -> Vec<Value> {
        std::mem::take(&mut self.notes)
    }

    fn claims_win(&self) -> bool {
        self.won
    }

    fn boxed_clone(&self) -> Box<dyn Agent> {
        Box::new(self.clone())
    }
}

/// First-fit order adversary for the auxiliary Grundy game: chooses the points
/// of `order` until some point receives color `target`.
#[derive(Debug, Clone)]
pub struct GammaOrderBob {
    order: Vec<Point>,
    target: usize,
    reached: bool,
}

impl GammaOrderBob {
    pub fn new(order: Vec<Point>, target: usize) -> Self {
        GammaOrderBob {
            order,
            target,
            reached: false,
        }
    }
}

/// Length of the shortest prefix of `order` whose first-fit coloring uses
/// color `target`.
pub fn gamma_prefix(p: &Poset, order: &[Point], target: usize) -> Option<usize> {
    let mut color = vec![0usize; p.len()];
    for (i, &x) in order.iter().enumerate() {
        let used: Vec<usize> = order[..i].iter().filter(|&&y| p.incomparable(x, y)).map(|&y| color[y]).collect();
        color[x] = (1..).find(|c| !used.contains(c)).unwrap();
        if color[x] >= target {
            return Some(i + 1);
        }
    }
    None
}

impl Agent for GammaOrderBob {
    fn name(&self) -> String {
        "gamma-order".into()
    }

    fn choose(&mut self, state: &GameState, _rng: &mut GameRng) -> Result<Move, AgentError> {
        self.order
            .iter()
            .find(|&&x| state.is_uncolored(x))
            .map(|&point| Move::Choose { point })
            .or_else(|| greedy_move(state))
            .ok_or_else(|| AgentError::StrategyStuck("no legal move".into()))
    }

    fn observe(&mut self, state: &GameState, _actor: Player, _mv: &Move) -> Result<(), AgentError> {
        self.reached |= state.max_color_used() >= self.target;
        Ok(())
    }

    fn claims_win(&self) -> bool {
        self.reached
    }

    fn boxed_clone(&self) -> Box<dyn Agent> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{lemma2_poset, stack_copies};
    use crate::game::{play_match, MatchOptions, Outcome};
    use crate::poset::validate_poset;
    use crate::strategies::{DangerAgent, GreedyAgent, MinimaxAgent, RandomAgent, RegionBob};

    fn alices() -> Vec<Box<dyn Agent>> {
        vec![
            Box::new(RandomAgent),
            Box::new(GreedyAgent),
            Box::new(DangerAgent),
            Box::new(MinimaxAgent::lookahead2()),
        ]
    }

    #[test]
    fn default_copy_count() {
        assert_eq!(default_copies(1, 1, 2), 9);
        assert_eq!(default_copies(1, 2, 4), 33);
    }

    #[test]
    fn lifted_lemma2_wins_standard_game() {
        let (q, qmeta) = lemma2_poset(2, 16).unwrap();
        let n = default_copies(1, 1, 2);
        let (p, meta) = stack_copies(&q, n, Some(&qmeta)).unwrap();
        let (p, q) = (Arc::new(p), Arc::new(q));
        for seed in 0..4 {
            for alice in alices() {
                let mut alice = alice;
                let m2 = qmeta.clone();
                let factory: AgentFactory = Arc::new(move || Box::new(RegionBob::lemma2(&m2).unwrap()));
                let mut bob = LiftBob::new(q.clone(), &meta, factory).unwrap();
                let opts = MatchOptions {
                    stop_when_stranded: true,
                    ..Default::default()
                };
                let t = play_match(p.clone(), GameConfig::coloring(1, 1, 2), alice.as_mut(), &mut bob, seed, &opts)
                    .unwrap_or_else(|e| panic!("{} seed {seed}: {}", alice.name(), e.kind));
                assert_eq!(t.outcome, Outcome::BobWins, "{} seed {seed}", alice.name());
                for (_, et) in bob.embedded_transcripts() {
                    et.replay(q.clone()).unwrap();
                }
            }
        }
    }

    /// Alice spends her move on the copy Bob just opened, then on the next one.
    #[test]
    fn spoiling_alice_only_delays() {
        struct Spoiler(usize);
        impl Agent for Spoiler {
            fn name(&self) -> String {
                "spoiler".into()
            }
            fn choose(&mut self, s: &GameState, _: &mut GameRng) -> Result<Move, AgentError> {
                // color the least free point of the most recently touched copy
                let last = s.history().iter().rev().find(|r| r.actor == Player::Bob).and_then(|r| r.mv.point());
                let copy = last.map_or(0, |x| x / self.0);
                let x = (copy * self.0..s.len()).find(|&x| !s.legal_colors(x).is_empty()).unwrap();
                Ok(Move::Color { point: x, color: s.legal_colors(x)[0] })
            }
            fn boxed_clone(&self) -> Box<dyn Agent> {
                Box::new(Spoiler(self.0))
            }
        }
        let (q, qmeta) = lemma2_poset(2, 16).unwrap();
        let (p, meta) = stack_copies(&q, default_copies(1, 1, 2), Some(&qmeta)).unwrap();
        let factory: AgentFactory = Arc::new(move || Box::new(RegionBob::lemma2(&qmeta).unwrap()));
        let mut bob = LiftBob::new(Arc::new(q.clone()), &meta, factory).unwrap();
        let t = play_match(Arc::new(p), GameConfig::coloring(1, 1, 2), &mut Spoiler(q.len()), &mut bob, 0, &MatchOptions {
            stop_when_stranded: true,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(t.outcome, Outcome::BobWins);
    }

    #[test]
    fn lifted_gamma_order_forces_three_colors() {
        // incomparability graph a-b-c-d is a path
        let q = validate_poset(4, &[(0, 2), (0, 3), (1, 3)]).unwrap();
        let order = vec![0, 3, 1, 2];
        assert_eq!(gamma_prefix(&q, &order, 3), Some(4));
        let copies = default_copies(1, 2, 4);
        let (p, meta) = stack_copies(&q, copies, None).unwrap();
        let (p, q) = (Arc::new(p), Arc::new(q));
        for seed in 0..4 {
            for alice in alices() {
                let mut alice = alice;
                let o = order.clone();
                let factory: AgentFactory = Arc::new(move || Box::new(GammaOrderBob::new(o.clone(), 3)));
                let mut bob = LiftBob::new(q.clone(), &meta, factory).unwrap();
                let t = play_match(p.clone(), GameConfig::grundy(1, 2), alice.as_mut(), &mut bob, seed, &MatchOptions::default())
                    .unwrap_or_else(|e| panic!("{} seed {seed}: {}", alice.name(), e.kind));
                match t.outcome {
                    Outcome::Value(v) => assert!(v >= 3, "{} seed {seed}: {v}", alice.name()),
                    o => panic!("{o:?}"),
                }
                assert!(bob.telemetry().winning_copy.is_some());
            }
        }
    }
}
