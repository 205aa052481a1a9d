//! Rule engine for the coloring, Grundy and marking games on a poset.
//!
//! Colors are `1..=k`; a color class must stay a chain, so `x` may take color
//! `c` iff no point incomparable to `x` already has `c`. Each color keeps a
//! `blocked` row (union of incomparables of its class) so legality is O(1).

mod agent;
mod transcript;

pub use agent::{
    play_match, random_legal_move, Agent, AgentError, GameRng, MatchError, MatchErrorKind,
    MatchOptions,
};
pub use transcript::{Annotation, MoveRecord, Termination, Transcript, TranscriptError, TranscriptHeader};

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::BitSet;
use crate::poset::{Point, Poset};

pub type Color = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Coloring,
    Grundy,
    Marking,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Alice moves first; both players use their exact quotas.
    Standard,
    /// Bob moves first with quota `b`; Alice replies with `0..=a` moves.
    Auxiliary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Alice,
    Bob,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::Alice => Player::Bob,
            Player::Bob => Player::Alice,
        }
    }
}

impl std::fmt::Display for Player {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Player::Alice => "alice",
            Player::Bob => "bob",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameConfig {
    pub variant: Variant,
    pub a: usize,
    pub b: usize,
    /// Palette size; ignored outside the coloring variant.
    pub k: usize,
    pub mode: Mode,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("a + b must be at least 1")]
    NoMoves,
    #[error("coloring game needs k >= 1")]
    EmptyPalette,
}

impl GameConfig {
    pub fn coloring(a: usize, b: usize, k: usize) -> Self {
        GameConfig {
            variant: Variant::Coloring,
            a,
            b,
            k,
            mode: Mode::Standard,
        }
    }

    pub fn grundy(a: usize, b: usize) -> Self {
        GameConfig {
            variant: Variant::Grundy,
            a,
            b,
            k: 0,
            mode: Mode::Standard,
        }
    }

    pub fn marking(a: usize, b: usize) -> Self {
        GameConfig {
            variant: Variant::Marking,
            a,
            b,
            k: 0,
            mode: Mode::Standard,
        }
    }

    pub fn auxiliary(self) -> Self {
        GameConfig {
            mode: Mode::Auxiliary,
            ..self
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.a + self.b == 0 {
            return Err(ConfigError::NoMoves);
        }
        if self.variant == Variant::Coloring && self.k == 0 {
            return Err(ConfigError::EmptyPalette);
        }
        Ok(())
    }

    pub fn quota(&self, p: Player) -> usize {
        match p {
            Player::Alice => self.a,
            Player::Bob => self.b,
        }
    }

    pub fn first_mover(&self) -> Player {
        match self.mode {
            Mode::Standard => Player::Alice,
            Mode::Auxiliary => Player::Bob,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Move {
    Color { point: Point, color: Color },
    Choose { point: Point },
    Mark { point: Point },
    Pass,
}

impl Move {
    pub fn point(&self) -> Option<Point> {
        match *self {
            Move::Color { point, .. } | Move::Choose { point } | Move::Mark { point } => Some(point),
            Move::Pass => None,
        }
    }
}

impl std::fmt::Display for Move {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Move::Color { point, color } => write!(f, "color {point} {color}"),
            Move::Choose { point } => write!(f, "choose {point}"),
            Move::Mark { point } => write!(f, "mark {point}"),
            Move::Pass => f.write_str("pass"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Uncolored,
    Colored(Color),
    Marked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "result", content = "value", rename_all = "snake_case")]
pub enum Outcome {
    Ongoing,
    AliceWins,
    BobWins,
    /// Colors used (Grundy) or `1 + max back-degree` (marking).
    Value(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum IllegalMove {
    #[error("the game is over")]
    GameOver,
    #[error("not {0}'s turn")]
    WrongTurn(Player),
    #[error("{0} has no moves left this turn")]
    QuotaExhausted(Player),
    #[error("point {0} out of range")]
    OutOfRange(Point),
    #[error("point {0} is already taken")]
    Taken(Point),
    #[error("color {0} outside the palette")]
    BadColor(Color),
    #[error("color {color} on point {point} conflicts with an incomparable point")]
    Conflict { point: Point, color: Color },
    #[error("move kind does not fit the variant")]
    WrongKind,
    #[error("pass is not allowed here")]
    BadPass,
}

#[derive(Debug, Clone)]
pub struct GameState {
    poset: Arc<Poset>,
    config: GameConfig,
    status: Vec<PointStatus>,
    uncolored: BitSet,
    /// `classes[c-1]`: points of color `c`.
    classes: Vec<BitSet>,
    /// `blocked[c-1]`: points with an incomparable point of color `c`.
    blocked: Vec<BitSet>,
    back_degree: Vec<usize>,
    marked: BitSet,
    turn: Player,
    remaining: usize,
    moved_this_turn: usize,
    round: usize,
    over: Option<Outcome>,
    history: Vec<MoveRecord>,
}

impl GameState {
    pub fn new(poset: Arc<Poset>, config: GameConfig) -> Result<GameState, ConfigError> {
        config.validate()?;
        let n = poset.len();
        let palette = if config.variant == Variant::Coloring {
            config.k
        } else {
            0
        };
        let mut s = GameState {
            status: vec![PointStatus::Uncolored; n],
            uncolored: BitSet::full(n),
            classes: vec![BitSet::new(n); palette],
            blocked: vec![BitSet::new(n); palette],
            back_degree: vec![0; n],
            marked: BitSet::new(n),
            turn: config.first_mover(),
            remaining: config.quota(config.first_mover()),
            moved_this_turn: 0,
            round: 1,
            over: None,
            history: Vec::new(),
            poset,
            config,
        };
        if s.remaining == 0 {
            s.end_turn();
        }
        s.check_terminal();
        Ok(s)
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn poset_arc(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.status.len()
    }

    pub fn is_empty(&self) -> bool {
        self.status.is_empty()
    }

    /// Player on turn, or `None` once the game is over.
    pub fn turn(&self) -> Option<Player> {
        self.over.is_none().then_some(self.turn)
    }

    /// Moves the player on turn may still make in this turn.
    pub fn remaining(&self) -> usize {
        self.remaining
    }

    pub fn moved_this_turn(&self) -> usize {
        self.moved_this_turn
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn history(&self) -> &[MoveRecord] {
        &self.history
    }

    pub fn status(&self, x: Point) -> PointStatus {
        self.status[x]
    }

    pub fn color_of(&self, x: Point) -> Option<Color> {
        match self.status[x] {
            PointStatus::Colored(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_uncolored(&self, x: Point) -> bool {
        self.uncolored.contains(x)
    }

    pub fn uncolored(&self) -> &BitSet {
        &self.uncolored
    }

    pub fn uncolored_count(&self) -> usize {
        self.uncolored.count()
    }

    /// Highest color index that currently has a class (palette size for coloring).
    pub fn palette_len(&self) -> usize {
        self.classes.len()
    }

    pub fn class(&self, c: Color) -> Option<&BitSet> {
        self.classes.get(c.checked_sub(1)?)
    }

    pub fn blocked(&self, c: Color) -> Option<&BitSet> {
        self.blocked.get(c.checked_sub(1)?)
    }

    /// `x` may take color `c` without breaking the chain-class rule.
    pub fn can_color(&self, x: Point, c: Color) -> bool {
        self.uncolored.contains(x)
            && c >= 1
            && c <= self.config.k
            && !self.blocked[c - 1].contains(x)
    }

    pub fn legal_colors(&self, x: Point) -> Vec<Color> {
        (1..=self.config.k).filter(|&c| self.can_color(x, c)).collect()
    }

    /// Least color absent among the colored incomparables of `x`.
    pub fn first_fit_color(&self, x: Point) -> Color {
        (1..)
            .find(|&c| self.blocked.get(c - 1).is_none_or(|row| !row.contains(x)))
            .unwrap()
    }

    pub fn back_degree(&self, x: Point) -> usize {
        self.back_degree[x]
    }

    pub fn max_back_degree(&self) -> usize {
        self.marked.iter().map(|x| self.back_degree[x]).max().unwrap_or(0)
    }

    pub fn colors_used(&self) -> usize {
        self.classes.iter().filter(|c| !c.is_empty()).count()
    }

    pub fn max_color_used(&self) -> usize {
        self.classes.iter().rposition(|c| !c.is_empty()).map_or(0, |i| i + 1)
    }

    /// Uncolored points with at least one legal color.
    fn colorable(&self) -> BitSet {
        let mut dead = self.uncolored.clone();
        for row in &self.blocked {
            dead.intersect_with(row);
        }
        let mut live = self.uncolored.clone();
        live.difference_with(&dead);
        live
    }

    /// An uncolored point no color can ever reach again (coloring variant).
    /// Such a point decides the game for Bob.
    pub fn stranded_point(&self) -> Option<Point> {
        if self.config.variant != Variant::Coloring {
            return None;
        }
        let mut dead = self.uncolored.clone();
        for row in &self.blocked {
            dead.intersect_with(row);
        }
        dead.first()
    }

    fn pass_allowed(&self) -> bool {
        self.config.mode == Mode::Auxiliary && self.turn == Player::Alice
    }

    pub fn legal_moves(&self) -> Vec<Move> {
        if self.over.is_some() {
            return Vec::new();
        }
        let mut out = Vec::new();
        match self.config.variant {
            Variant::Coloring => {
                for x in self.uncolored.iter() {
                    for c in 1..=self.config.k {
                        if !self.blocked[c - 1].contains(x) {
                            out.push(Move::Color { point: x, color: c });
                        }
                    }
                }
            }
            Variant::Grundy => out.extend(self.uncolored.iter().map(|point| Move::Choose { point })),
            Variant::Marking => out.extend(self.uncolored.iter().map(|point| Move::Mark { point })),
        }
        if self.pass_allowed() {
            out.push(Move::Pass);
        }
        out
    }

    pub fn check_move(&self, actor: Player, mv: &Move) -> Result<(), IllegalMove> {
        if self.over.is_some() {
            return Err(IllegalMove::GameOver);
        }
        if actor != self.turn {
            let ran_out = self.history.last().is_some_and(|r| r.actor == actor);
            return Err(if ran_out {
                IllegalMove::QuotaExhausted(actor)
            } else {
                IllegalMove::WrongTurn(actor)
            });
        }
        let point = match (self.config.variant, mv) {
            (_, Move::Pass) => {
                return if self.pass_allowed() {
                    Ok(())
                } else {
                    Err(IllegalMove::BadPass)
                };
            }
            (Variant::Coloring, Move::Color { point, .. })
            | (Variant::Grundy, Move::Choose { point })
            | (Variant::Marking, Move::Mark { point }) => *point,
            _ => return Err(IllegalMove::WrongKind),
        };
        if point >= self.len() {
            return Err(IllegalMove::OutOfRange(point));
        }
        if !self.uncolored.contains(point) {
            return Err(IllegalMove::Taken(point));
        }
        if let Move::Color { color, .. } = *mv {
            if color == 0 || color > self.config.k {
                return Err(IllegalMove::BadColor(color));
            }
            if self.blocked[color - 1].contains(point) {
                return Err(IllegalMove::Conflict { point, color });
            }
        }
        Ok(())
    }

    pub fn apply_move(&mut self, actor: Player, mv: Move) -> Result<(), IllegalMove> {
        self.check_move(actor, &mv)?;
        self.history.push(MoveRecord {
            actor,
            mv,
            round: self.round,
        });
        match mv {
            Move::Pass => {
                self.remaining = 0;
                self.end_turn();
                self.check_terminal();
                return Ok(());
            }
            Move::Color { point, color } => self.paint(point, color),
            Move::Choose { point } => {
                let c = self.first_fit_color(point);
                self.paint(point, c);
            }
            Move::Mark { point } => {
                let mut seen = self.marked.clone();
                seen.intersect_with(self.poset.incomparables(point));
                self.back_degree[point] = seen.count();
                self.marked.insert(point);
                self.uncolored.remove(point);
                self.status[point] = PointStatus::Marked;
            }
        }
        debug_assert!(self.chain_classes_hold());
        if self.uncolored.is_empty() {
            self.over = Some(self.final_outcome());
            return Ok(());
        }
        self.remaining -= 1;
        self.moved_this_turn += 1;
        if self.remaining == 0 {
            self.end_turn();
        }
        self.check_terminal();
        Ok(())
    }

    fn paint(&mut self, x: Point, c: Color) {
        if self.classes.len() < c {
            let n = self.len();
            self.classes.resize(c, BitSet::new(n));
            self.blocked.resize(c, BitSet::new(n));
        }
        self.classes[c - 1].insert(x);
        self.blocked[c - 1].union_with(self.poset.incomparables(x));
        self.uncolored.remove(x);
        self.status[x] = PointStatus::Colored(c);
    }

    fn end_turn(&mut self) {
        let first = self.config.first_mover();
        let mut next = self.turn.other();
        if self.config.quota(next) == 0 {
            next = self.turn;
        }
        if next == first {
            self.round += 1;
        }
        self.turn = next;
        self.remaining = self.config.quota(next);
        self.moved_this_turn = 0;
    }

    /// Ends the game if the player on turn is stuck with points left.
    fn check_terminal(&mut self) {
        if self.over.is_some() {
            return;
        }
        if self.uncolored.is_empty() {
            self.over = Some(self.final_outcome());
        } else if self.config.variant == Variant::Coloring && self.colorable().is_empty() {
            self.over = Some(Outcome::BobWins);
        }
    }

    fn final_outcome(&self) -> Outcome {
        match self.config.variant {
            Variant::Coloring => Outcome::AliceWins,
            Variant::Grundy => Outcome::Value(self.max_color_used()),
            Variant::Marking => Outcome::Value(1 + self.max_back_degree()),
        }
    }

    pub fn outcome(&self) -> Outcome {
        self.over.unwrap_or(Outcome::Ongoing)
    }

    pub fn is_over(&self) -> bool {
        self.over.is_some()
    }

    /// `outcome`, except that a stranded point already counts as a Bob win.
    pub fn decided_outcome(&self) -> Outcome {
        match self.over {
            Some(o) => o,
            None if self.stranded_point().is_some() => Outcome::BobWins,
            None => Outcome::Ongoing,
        }
    }

    /// Every color class is a chain.
    pub fn chain_classes_hold(&self) -> bool {
        self.classes.iter().all(|class| {
            class
                .iter()
                .all(|x| !class.intersects(self.poset.incomparables(x)))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{random_poset, validate_poset};

    fn arc(p: Poset) -> Arc<Poset> {
        Arc::new(p)
    }

    #[test]
    fn incomparable_same_color_is_illegal() {
        let mut s = GameState::new(arc(Poset::antichain(2)), GameConfig::coloring(1, 1, 1)).unwrap();
        s.apply_move(Player::Alice, Move::Color { point: 0, color: 1 }).unwrap();
        // Bob is stuck: game over with an uncolored point left
        assert!(!s.legal_moves().contains(&Move::Color { point: 1, color: 1 }));
        assert_eq!(s.outcome(), Outcome::BobWins);
    }

    #[test]
    fn chain_allows_everything() {
        let s = GameState::new(arc(Poset::chain(4)), GameConfig::coloring(1, 1, 3)).unwrap();
        assert_eq!(s.legal_moves().len(), 12);
    }

    #[test]
    fn grundy_moves_ignore_palette() {
        let s = GameState::new(arc(Poset::antichain(3)), GameConfig::grundy(1, 1)).unwrap();
        assert_eq!(
            s.legal_moves(),
            (0..3).map(|point| Move::Choose { point }).collect::<Vec<_>>()
        );
    }

    #[test]
    fn first_fit_values() {
        let p = validate_poset(4, &[]).unwrap();
        let mut s = GameState::new(arc(p), GameConfig::coloring(4, 0, 3)).unwrap();
        assert_eq!(s.first_fit_color(3), 1);
        s.apply_move(Player::Alice, Move::Color { point: 0, color: 1 }).unwrap();
        s.apply_move(Player::Alice, Move::Color { point: 1, color: 3 }).unwrap();
        assert_eq!(s.first_fit_color(3), 2);
        s.apply_move(Player::Alice, Move::Color { point: 2, color: 2 }).unwrap();
        assert_eq!(s.first_fit_color(3), 4);
    }

    #[test]
    fn auxiliary_pass_ends_round() {
        let cfg = GameConfig::coloring(2, 1, 3).auxiliary();
        let mut s = GameState::new(arc(Poset::antichain(4)), cfg).unwrap();
        assert_eq!(s.turn(), Some(Player::Bob));
        assert_eq!(s.apply_move(Player::Bob, Move::Pass), Err(IllegalMove::BadPass));
        s.apply_move(Player::Bob, Move::Color { point: 0, color: 1 }).unwrap();
        assert_eq!(s.turn(), Some(Player::Alice));
        assert!(s.legal_moves().contains(&Move::Pass));
        s.apply_move(Player::Alice, Move::Pass).unwrap();
        assert_eq!(s.turn(), Some(Player::Bob));
        assert_eq!(s.round(), 2);
    }

    #[test]
    fn grundy_choose_gets_first_fit() {
        let mut s = GameState::new(arc(Poset::antichain(2)), GameConfig::grundy(1, 1)).unwrap();
        s.apply_move(Player::Alice, Move::Choose { point: 0 }).unwrap();
        s.apply_move(Player::Bob, Move::Choose { point: 1 }).unwrap();
        assert_eq!(s.color_of(1), Some(2));
        assert_eq!(s.outcome(), Outcome::Value(2));
    }

    #[test]
    fn alice_quota_bookkeeping() {
        let mut s = GameState::new(arc(Poset::chain(5)), GameConfig::coloring(2, 1, 1)).unwrap();
        s.apply_move(Player::Alice, Move::Color { point: 0, color: 1 }).unwrap();
        assert_eq!(s.turn(), Some(Player::Alice));
        s.apply_move(Player::Alice, Move::Color { point: 1, color: 1 }).unwrap();
        assert_eq!(s.turn(), Some(Player::Bob));
        assert_eq!(
            s.apply_move(Player::Alice, Move::Color { point: 2, color: 1 }),
            Err(IllegalMove::QuotaExhausted(Player::Alice))
        );
        assert_eq!(s.apply_move(Player::Bob, Move::Pass), Err(IllegalMove::BadPass));
    }

    #[test]
    fn mid_turn_completion_is_alice_win() {
        let mut s = GameState::new(arc(Poset::chain(1)), GameConfig::coloring(2, 1, 1)).unwrap();
        s.apply_move(Player::Alice, Move::Color { point: 0, color: 1 }).unwrap();
        assert_eq!(s.outcome(), Outcome::AliceWins);
    }

    #[test]
    fn zero_quota_turns_are_skipped() {
        let mut s = GameState::new(arc(Poset::antichain(3)), GameConfig::grundy(0, 1)).unwrap();
        assert_eq!(s.turn(), Some(Player::Bob));
        s.apply_move(Player::Bob, Move::Choose { point: 0 }).unwrap();
        assert_eq!(s.turn(), Some(Player::Bob));
    }

    #[test]
    fn marking_back_degree() {
        let mut s = GameState::new(arc(Poset::antichain(3)), GameConfig::marking(1, 1)).unwrap();
        for (i, who) in [Player::Alice, Player::Bob, Player::Alice].into_iter().enumerate() {
            s.apply_move(who, Move::Mark { point: i }).unwrap();
        }
        assert_eq!(s.back_degree(2), 2);
        assert_eq!(s.outcome(), Outcome::Value(3));
    }

    #[test]
    fn stranded_point_decides() {
        let p = validate_poset(3, &[(0, 1)]).unwrap();
        // 2 is incomparable to 0 and 1
        let mut s = GameState::new(arc(p), GameConfig::coloring(1, 1, 2)).unwrap();
        s.apply_move(Player::Alice, Move::Color { point: 0, color: 1 }).unwrap();
        s.apply_move(Player::Bob, Move::Color { point: 1, color: 2 }).unwrap();
        assert_eq!(s.outcome(), Outcome::BobWins);
        assert_eq!(s.stranded_point(), Some(2));
    }

    #[test]
    fn terminal_outcomes_are_exclusive() {
        use rand::{Rng, SeedableRng};
        for seed in 0..200 {
            let p = random_poset(8, 0.3, seed);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let k = rng.gen_range(1..4);
            let mut s = GameState::new(arc(p), GameConfig::coloring(1, 1, k)).unwrap();
            while let Some(who) = s.turn() {
                let moves = s.legal_moves();
                let mv = moves[rng.gen_range(0..moves.len())];
                s.apply_move(who, mv).unwrap();
                assert!(s.chain_classes_hold());
            }
            match s.outcome() {
                Outcome::AliceWins => assert_eq!(s.uncolored_count(), 0),
                Outcome::BobWins => assert!(s.uncolored_count() > 0),
                o => panic!("unexpected {o:?}"),
            }
        }
    }
}
