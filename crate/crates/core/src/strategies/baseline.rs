//! Opponent suite: random, greedy, danger-driven heuristic, depth-limited
//! minimax (lookahead-2 is minimax at depth 2 over sampled moves) and a
//! stdin-driven agent for stepping through games by hand.

use std::io::{BufRead, Write};
use std::sync::{Arc, Mutex};

use rand::seq::SliceRandom;

use crate::bitset::BitSet;
use crate::game::{
    random_legal_move, Agent, AgentError, GameRng, GameState, Mode, Move, Outcome, Player,
    Variant,
};

#[derive(Debug, Clone, Default)]
pub struct RandomAgent;

impl Agent for RandomAgent {
    fn name(&self) -> String {
        "random".into()
    }

    fn choose(&mut self, state: &GameState, rng: &mut GameRng) -> Result<Move, AgentError> {
        random_legal_move(state, rng).ok_or_else(|| AgentError::Precondition("no legal move".into()))
    }

    fn boxed_clone(&self) -> Box<dyn Agent> {
        Box::new(self.clone())
    }
}

/// First uncolored point, least legal color.
#[derive(Debug, Clone, Default)]
pub struct GreedyAgent;

pub(crate) fn greedy_move(state: &GameState) -> Option<Move> {
    let cfg = state.config();
    match cfg.variant {
        Variant::Coloring => state.uncolored().iter().find_map(|x| {
            (1..=cfg.k)
                .find(|&c| state.can_color(x, c))
                .map(|color| Move::Color { point: x, color })
        }),
        Variant::Grundy => state.uncolored().first().map(|point| Move::Choose { point }),
        Variant::Marking => state.uncolored().first().map(|point| Move::Mark { point }),
    }
    .or_else(|| (cfg.mode == Mode::Auxiliary && state.turn() == Some(Player::Alice)).then_some(Move::Pass))
}

impl Agent for GreedyAgent {
    fn name(&self) -> String {
        "greedy".into()
    }

    fn choose(&mut self, state: &GameState, _rng: &mut GameRng) -> Result<Move, AgentError> {
        greedy_move(state).ok_or_else(|| AgentError::Precondition("no legal move".into()))
    }

    fn boxed_clone(&self) -> Box<dyn Agent> {
        Box::new(self.clone())
    }
}

/// `ge[t]`: uncolored points with at least `t` blocked colors, `t = 0..=k`.
fn blocked_levels(state: &GameState) -> Vec<BitSet> {
    let k = state.config().k;
    let mut ge = vec![BitSet::new(state.len()); k + 1];
    ge[0] = state.uncolored().clone();
    for c in 1..=k {
        let row = state.blocked(c).expect("palette color");
        for t in (1..=c).rev() {
            let mut add = ge[t - 1].clone();
            add.intersect_with(row);
            ge[t].union_with(&add);
        }
    }
    ge
}

/// Static evaluation from Alice's side (larger is better for Alice).
pub fn evaluate(state: &GameState) -> f64 {
    match state.outcome() {
        Outcome::AliceWins => return 1e9,
        Outcome::BobWins => return -1e9,
        Outcome::Value(v) => return -1e6 * v as f64,
        Outcome::Ongoing => {}
    }
    match state.config().variant {
        Variant::Coloring => {
            let ge = blocked_levels(state);
            let k = state.config().k;
            let stranded = ge[k].count();
            if stranded > 0 {
                return -1e8 - stranded as f64;
            }
            let one = if k >= 1 { ge[k - 1].count() } else { 0 };
            let two = if k >= 2 { ge[k - 2].count() } else { 0 };
            -(30.0 * one as f64 + two as f64)
        }
        Variant::Grundy => {
            let ff: usize = state.uncolored().iter().map(|x| state.first_fit_color(x)).sum();
            -(1000.0 * state.max_color_used() as f64 + ff as f64)
        }
        Variant::Marking => {
            let marked: BitSet = {
                let mut all = BitSet::full(state.len());
                all.difference_with(state.uncolored());
                all
            };
            let pending: usize = state
                .uncolored()
                .iter()
                .map(|x| {
                    let mut r = marked.clone();
                    r.intersect_with(state.poset().incomparables(x));
                    r.count()
                })
                .sum();
            -(1000.0 * state.max_back_degree() as f64 + pending as f64)
        }
    }
}

/// Picks moves by a one-step damage estimate: Alice rescues the most
/// endangered point with the least disruptive color, Bob does the opposite.
#[derive(Debug, Clone, Default)]
pub struct DangerAgent;

impl DangerAgent {
    fn coloring_move(state: &GameState, me: Player) -> Option<Move> {
        let k = state.config().k;
        let ge = blocked_levels(state);
        let free = state.uncolored();
        let legal_count = |x: usize| (1..=k).filter(|&c| state.can_color(x, c)).count();
        // newly blocked uncolored incomparables when x takes c, weighted by urgency
        let damage = |x: usize, c: usize| {
            let row = state.blocked(c).unwrap();
            let mut score = 0usize;
            for (t, weight) in [(k.saturating_sub(1), 1000usize), (k.saturating_sub(2), 30), (0, 1)] {
                let mut s = state.poset().incomparables(x).clone();
                s.intersect_with(&ge[t]);
                s.intersect_with(free);
                s.difference_with(row);
                score += weight * s.count();
            }
            score
        };
        match me {
            Player::Alice => {
                let x = free
                    .iter()
                    .filter(|&x| legal_count(x) > 0)
                    .min_by_key(|&x| (legal_count(x), x))?;
                let c = (1..=k)
                    .filter(|&c| state.can_color(x, c))
                    .min_by_key(|&c| (damage(x, c), c))?;
                Some(Move::Color { point: x, color: c })
            }
            Player::Bob => {
                let mut best: Option<(usize, Move)> = None;
                for x in free.iter() {
                    for c in (1..=k).filter(|&c| state.can_color(x, c)) {
                        let d = damage(x, c);
                        if best.as_ref().is_none_or(|b| d > b.0) {
                            best = Some((d, Move::Color { point: x, color: c }));
                        }
                    }
                }
                best.map(|b| b.1)
            }
        }
    }
}

impl Agent for DangerAgent {
    fn name(&self) -> String {
        "danger".into()
    }

    fn choose(&mut self, state: &GameState, _rng: &mut GameRng) -> Result<Move, AgentError> {
        let me = state.turn().ok_or_else(|| AgentError::Precondition("game over".into()))?;
        let free = state.uncolored();
        let mv = match state.config().variant {
            Variant::Coloring => Self::coloring_move(state, me),
            Variant::Grundy => {
                let key = |x: usize| state.first_fit_color(x);
                let pick = match me {
                    Player::Alice => free.iter().min_by_key(|&x| (key(x), x)),
                    Player::Bob => free.iter().max_by_key(|&x| (key(x), std::cmp::Reverse(x))),
                };
                pick.map(|point| Move::Choose { point })
            }
            Variant::Marking => {
                let mut marked = BitSet::full(state.len());
                marked.difference_with(free);
                let back = |x: usize| {
                    let mut r = marked.clone();
                    r.intersect_with(state.poset().incomparables(x));
                    r.count()
                };
                let pick = match me {
                    Player::Alice => free.iter().max_by_key(|&x| (back(x), std::cmp::Reverse(x))),
                    Player::Bob => free.iter().min_by_key(|&x| (back(x), x)),
                };
                pick.map(|point| Move::Mark { point })
            }
        };
        mv.or_else(|| greedy_move(state))
            .ok_or_else(|| AgentError::Precondition("no legal move".into()))
    }

    fn boxed_clone(&self) -> Box<dyn Agent> {
        Box::new(self.clone())
    }
}

/// Depth-limited alpha-beta over the static evaluation. `depth = None`
/// searches to the end of the game (tiny posets only). With `width`, each
/// node looks at that many sampled moves plus the greedy move.
#[derive(Debug, Clone)]
pub struct MinimaxAgent {
    pub depth: Option<usize>,
    pub width: Option<usize>,
}

impl MinimaxAgent {
    pub fn new(depth: Option<usize>) -> Self {
        MinimaxAgent { depth, width: None }
    }

    pub fn lookahead2() -> Self {
        MinimaxAgent {
            depth: Some(2),
            width: Some(16),
        }
    }

    fn candidates(&self, state: &GameState, rng: &mut GameRng) -> Vec<Move> {
        let mut moves = state.legal_moves();
        if let Some(w) = self.width {
            if moves.len() > w {
                let g = greedy_move(state);
                moves.shuffle(rng);
                moves.truncate(w);
                if let Some(g) = g {
                    if !moves.contains(&g) {
                        moves.push(g);
                    }
                }
            }
        }
        moves
    }

    fn search(
        &self,
        state: &GameState,
        depth: Option<usize>,
        mut alpha: f64,
        mut beta: f64,
        rng: &mut GameRng,
    ) -> f64 {
        let Some(who) = state.turn() else {
            return evaluate(state);
        };
        if depth == Some(0) || state.decided_outcome() == Outcome::BobWins {
            return evaluate(state);
        }
        let next = depth.map(|d| d - 1);
        let mut best = if who == Player::Alice { f64::NEG_INFINITY } else { f64::INFINITY };
        for mv in self.candidates(state, rng) {
            let mut child = state.clone();
            child.apply_move(who, mv).expect("legal move");
            let v = self.search(&child, next, alpha, beta, rng);
            if who == Player::Alice {
                best = best.max(v);
                alpha = alpha.max(v);
            } else {
                best = best.min(v);
                beta = beta.min(v);
            }
            if alpha >= beta {
                break;
            }
        }
        best
    }
}

impl Agent for MinimaxAgent {
    fn name(&self) -> String {
        match (self.depth, self.width) {
            (Some(2), Some(_)) => "lookahead2".into(),
            (Some(d), _) => format!("minimax:{d}"),
            (None, _) => "minimax".into(),
        }
    }

    fn choose(&mut self, state: &GameState, rng: &mut GameRng) -> Result<Move, AgentError> {
        let who = state.turn().ok_or_else(|| AgentError::Precondition("game over".into()))?;
        let next = self.depth.map(|d| d.saturating_sub(1));
        let mut best: Option<(f64, Move)> = None;
        for mv in self.candidates(state, rng) {
            let mut child = state.clone();
            child.apply_move(who, mv).expect("legal move");
            let v = self.search(&child, next, f64::NEG_INFINITY, f64::INFINITY, rng);
            let better = match (&best, who) {
                (None, _) => true,
                (Some((b, _)), Player::Alice) => v > *b,
                (Some((b, _)), Player::Bob) => v < *b,
            };
            if better {
                best = Some((v, mv));
            }
        }
        best.map(|b| b.1)
            .ok_or_else(|| AgentError::Precondition("no legal move".into()))
    }

    fn boxed_clone(&self) -> Box<dyn Agent> {
        Box::new(self.clone())
    }
}

/// Reads moves as `color <point> <color>`, `choose <point>`, `mark <point>`,
/// `pass`, or the shorthand `<point> [<color>]`; reprompts on bad input.
#[derive(Clone)]
pub struct StdinAgent {
    input: Arc<Mutex<Box<dyn BufRead + Send>>>,
}

impl StdinAgent {
    pub fn new() -> Self {
        Self::from_reader(Box::new(std::io::BufReader::new(std::io::stdin())))
    }

    pub fn from_reader(r: Box<dyn BufRead + Send>) -> Self {
        StdinAgent {
            input: Arc::new(Mutex::new(r)),
        }
    }

    fn parse(line: &str, variant: Variant) -> Option<Move> {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().ok();
        match (parts.as_slice(), variant) {
            (["pass"], _) => Some(Move::Pass),
            (["color", p, c], _) | ([p, c], Variant::Coloring) => Some(Move::Color {
                point: num(p)?,
                color: num(c)?,
            }),
            (["choose", p], _) | ([p], Variant::Grundy) => Some(Move::Choose { point: num(p)? }),
            (["mark", p], _) | ([p], Variant::Marking) => Some(Move::Mark { point: num(p)? }),
            _ => None,
        }
    }
}

impl Default for StdinAgent {
    fn default() -> Self {
        Self::new()
    }
}

impl Agent for StdinAgent {
    fn name(&self) -> String {
        "stdin".into()
    }

    fn choose(&mut self, state: &GameState, _rng: &mut GameRng) -> Result<Move, AgentError> {
        let who = state.turn().ok_or_else(|| AgentError::Precondition("game over".into()))?;
        let mut input = self.input.lock().map_err(|_| AgentError::Input("poisoned".into()))?;
        loop {
            eprint!(
                "[round {} {who}, {} left this turn] move> ",
                state.round(),
                state.remaining()
            );
            let _ = std::io::stderr().flush();
            let mut line = String::new();
            if input.read_line(&mut line).map_err(|e| AgentError::Input(e.to_string()))? == 0 {
                return Err(AgentError::Input("end of input".into()));
            }
            match Self::parse(&line, state.config().variant) {
                Some(mv) => match state.check_move(who, &mv) {
                    Ok(()) => return Ok(mv),
                    Err(e) => eprintln!("illegal: {e}"),
                },
                None => eprintln!("could not parse {:?}", line.trim()),
            }
        }
    }

    fn boxed_clone(&self) -> Box<dyn Agent> {
        Box::new(self.clone())
    }
}
