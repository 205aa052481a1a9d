use std::sync::Arc;

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    GameConfig, GameState, IllegalMove, Mode, Move, Player, Termination, Transcript,
    TranscriptHeader, Variant,
};
use crate::game::transcript::Annotation;
use crate::poset::Poset;

pub type GameRng = rand_chacha::ChaCha8Rng;

/// Failures raised by agents. Scripted strategies use the specific variants
/// to flag broken preconditions or violated invariants loudly.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum AgentError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("supply exhausted: {0}")]
    SupplyExhausted(String),
    #[error("region collapsed: {0}")]
    RegionCollapse(String),
    #[error("all copies invalidated: {0}")]
    AllCopiesInvalidated(String),
    #[error("strategy stuck: {0}")]
    StrategyStuck(String),
    #[error("translated move illegal: {0}")]
    TranslationIllegal(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("input: {0}")]
    Input(String),
}

/// A player. `choose` is called once per move while the agent is on turn;
/// `observe` sees every applied move, including the agent's own.
pub trait Agent: Send {
    fn name(&self) -> String;

    /// Called once on the initial state before any move.
    fn start(&mut self, _state: &GameState) -> Result<(), AgentError> {
        Ok(())
    }

    fn choose(&mut self, state: &GameState, rng: &mut GameRng) -> Result<Move, AgentError>;

    fn observe(&mut self, _state: &GameState, _actor: Player, _mv: &Move) -> Result<(), AgentError> {
        Ok(())
    }

    /// Telemetry gathered since the last call.
    fn drain_notes(&mut self) -> Vec<serde_json::Value> {
        Vec::new()
    }

    /// The agent's own plan has reached a won position.
    fn claims_win(&self) -> bool {
        false
    }

    fn boxed_clone(&self) -> Box<dyn Agent>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchOptions {
    /// Stop as soon as some uncolored point can never be colored.
    pub stop_when_stranded: bool,
    /// Stop once a stranded point exists and an agent claims its plan has won;
    /// incidental strandings alone do not end the match.
    #[serde(default)]
    pub stop_on_claim: bool,
    pub max_moves: Option<usize>,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions {
            stop_when_stranded: false,
            stop_on_claim: false,
            max_moves: None,
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum MatchErrorKind {
    #[error("{actor} proposed illegal move {mv}: {reason}")]
    Illegal {
        actor: Player,
        mv: Move,
        reason: IllegalMove,
    },
    #[error("{actor} failed: {error}")]
    Agent { actor: Player, error: AgentError },
    #[error("move limit {0} reached")]
    MoveLimit(usize),
}

/// A protocol or strategy failure together with the transcript so far.
#[derive(Debug, Clone, Error)]
#[error("{kind}")]
pub struct MatchError {
    pub kind: MatchErrorKind,
    pub partial: Box<Transcript>,
}

fn rng_for(seed: u64, stream: u64) -> GameRng {
    let mut r = GameRng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Drives a match to completion. Deterministic given `seed` and deterministic agents.
pub fn play_match(
    poset: Arc<Poset>,
    config: GameConfig,
    alice: &mut (dyn Agent + 'static),
    bob: &mut (dyn Agent + 'static),
    seed: u64,
    opts: &MatchOptions,
) -> Result<Transcript, MatchError> {
    let header = TranscriptHeader {
        config,
        poset_hash: poset.structure_hash(),
        n: poset.len(),
        seed: Some(seed),
        alice: alice.name(),
        bob: bob.name(),
    };
    let mut state = GameState::new(poset, config).map_err(|e| MatchError {
        kind: MatchErrorKind::Agent {
            actor: Player::Alice,
            error: AgentError::Precondition(e.to_string()),
        },
        partial: Box::new(Transcript {
            header: header.clone(),
            moves: Vec::new(),
            annotations: Vec::new(),
            outcome: super::Outcome::Ongoing,
            termination: Termination::Aborted,
            colors_used: 0,
            max_back_degree: 0,
        }),
    })?;
    let mut rngs = [rng_for(seed, 1), rng_for(seed, 2)];
    let mut notes: Vec<Annotation> = Vec::new();

    let fail = |state: &GameState, notes: &[Annotation], kind: MatchErrorKind| {
        let mut t = Transcript::from_state(state, header.clone(), Termination::Aborted);
        t.annotations = notes.to_vec();
        MatchError {
            kind,
            partial: Box::new(t),
        }
    };
    let collect = |agent: &mut dyn Agent, actor: Player, after: usize, notes: &mut Vec<Annotation>| {
        notes.extend(
            agent
                .drain_notes()
                .into_iter()
                .map(|data| Annotation { after, actor, data }),
        );
    };

    for (actor, agent) in [(Player::Alice, &mut *alice), (Player::Bob, &mut *bob)] {
        if let Err(error) = agent.start(&state) {
            return Err(fail(&state, &notes, MatchErrorKind::Agent { actor, error }));
        }
        collect(agent, actor, 0, &mut notes);
    }

    let mut termination = Termination::Complete;
    while let Some(actor) = state.turn() {
        let claimed = opts.stop_on_claim && (alice.claims_win() || bob.claims_win());
        if (opts.stop_when_stranded || claimed) && state.stranded_point().is_some() {
            termination = Termination::Stranded;
            break;
        }
        if let Some(limit) = opts.max_moves {
            if state.history().len() >= limit {
                return Err(fail(&state, &notes, MatchErrorKind::MoveLimit(limit)));
            }
        }
        let (agent, rng): (&mut (dyn Agent + 'static), _) = match actor {
            Player::Alice => (&mut *alice, &mut rngs[0]),
            Player::Bob => (&mut *bob, &mut rngs[1]),
        };
        let mv = match agent.choose(&state, rng) {
            Ok(mv) => mv,
            Err(error) => {
                collect(agent, actor, state.history().len(), &mut notes);
                return Err(fail(&state, &notes, MatchErrorKind::Agent { actor, error }));
            }
        };
        if let Err(reason) = state.apply_move(actor, mv) {
            return Err(fail(&state, &notes, MatchErrorKind::Illegal { actor, mv, reason }));
        }
        let after = state.history().len();
        for (who, agent) in [(Player::Alice, &mut *alice), (Player::Bob, &mut *bob)] {
            if let Err(error) = agent.observe(&state, actor, &mv) {
                collect(agent, who, after, &mut notes);
                return Err(fail(&state, &notes, MatchErrorKind::Agent { actor: who, error }));
            }
            collect(agent, who, after, &mut notes);
        }
    }
    let mut t = Transcript::from_state(&state, header, termination);
    t.annotations = notes;
    Ok(t)
}

/// Uniformly random legal move, or `None` when the game is over.
///
/// Samples (point, color) pairs by rejection and falls back to enumeration
/// when legal moves are sparse.
pub fn random_legal_move(state: &GameState, rng: &mut GameRng) -> Option<Move> {
    let actor = state.turn()?;
    let pass = state.config().mode == Mode::Auxiliary && actor == Player::Alice;
    let free: Vec<usize> = state.uncolored().iter().collect();
    let k = match state.config().variant {
        Variant::Coloring => state.config().k,
        _ => 1,
    };
    let slots = free.len() * k + usize::from(pass);
    for _ in 0..64 {
        let s = rng.gen_range(0..slots);
        if s == free.len() * k {
            return Some(Move::Pass);
        }
        let point = free[s / k];
        let mv = match state.config().variant {
            Variant::Coloring => Move::Color {
                point,
                color: s % k + 1,
            },
            Variant::Grundy => Move::Choose { point },
            Variant::Marking => Move::Mark { point },
        };
        if state.check_move(actor, &mv).is_ok() {
            return Some(mv);
        }
    }
    let moves = state.legal_moves();
    (!moves.is_empty()).then(|| moves[rng.gen_range(0..moves.len())])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Outcome;
    use crate::poset::random_poset;

    #[derive(Clone)]
    struct RandomAgent;

    impl Agent for RandomAgent {
        fn name(&self) -> String {
            "random".into()
        }
        fn choose(&mut self, state: &GameState, rng: &mut GameRng) -> Result<Move, AgentError> {
            Ok(random_legal_move(state, rng).unwrap())
        }
        fn boxed_clone(&self) -> Box<dyn Agent> {
            Box::new(self.clone())
        }
    }

    #[derive(Clone)]
    struct Cheater;

    impl Agent for Cheater {
        fn name(&self) -> String {
            "cheater".into()
        }
        fn choose(&mut self, _: &GameState, _: &mut GameRng) -> Result<Move, AgentError> {
            Ok(Move::Pass)
        }
        fn boxed_clone(&self) -> Box<dyn Agent> {
            Box::new(self.clone())
        }
    }

    #[test]
    fn deterministic_and_replayable() {
        for seed in 0..40 {
            let p = Arc::new(random_poset(12, 0.25, seed));
            for cfg in [
                GameConfig::coloring(1, 1, 3),
                GameConfig::coloring(2, 1, 2).auxiliary(),
                GameConfig::grundy(1, 2),
                GameConfig::marking(2, 1),
            ] {
                let opts = MatchOptions::default();
                let t1 = play_match(p.clone(), cfg, &mut RandomAgent, &mut RandomAgent, seed, &opts).unwrap();
                let t2 = play_match(p.clone(), cfg, &mut RandomAgent, &mut RandomAgent, seed, &opts).unwrap();
                assert_eq!(t1, t2);
                let colored = t1.moves.iter().filter(|m| m.mv != Move::Pass).count();
                assert!(colored <= p.len());
                let s = t1.replay(p.clone()).unwrap();
                assert_eq!(s.outcome(), t1.outcome);
                let back = Transcript::from_jsonl(&t1.to_jsonl()).unwrap();
                assert_eq!(back, t1);
            }
        }
    }

    #[test]
    fn illegal_agent_move_is_reported() {
        let p = Arc::new(Poset::antichain(3));
        let err = play_match(
            p,
            GameConfig::coloring(1, 1, 3),
            &mut Cheater,
            &mut RandomAgent,
            0,
            &MatchOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err.kind, MatchErrorKind::Illegal { reason: IllegalMove::BadPass, .. }));
        assert_eq!(err.partial.termination, Termination::Aborted);
    }

    #[test]
    fn stranded_stop_is_replayable() {
        let p = Arc::new(Poset::antichain(6));
        let t = play_match(
            p.clone(),
            GameConfig::coloring(1, 1, 2),
            &mut RandomAgent,
            &mut RandomAgent,
            3,
            &MatchOptions {
                stop_when_stranded: true,
                stop_on_claim: false,
                max_moves: None,
            },
        )
        .unwrap();
        assert_eq!(t.outcome, Outcome::BobWins);
        t.replay(p).unwrap();
    }

    #[test]
    fn random_move_is_legal_and_covers_pass() {
        let p = Arc::new(random_poset(10, 0.2, 5));
        let mut s = GameState::new(p, GameConfig::coloring(2, 1, 2).auxiliary()).unwrap();
        let mut rng = GameRng::seed_from_u64(1);
        let mut saw_pass = false;
        while let Some(who) = s.turn() {
            let mv = random_legal_move(&s, &mut rng).unwrap();
            assert!(s.legal_moves().contains(&mv));
            saw_pass |= mv == Move::Pass;
            s.apply_move(who, mv).unwrap();
        }
        let _ = saw_pass;
    }
}
