//! Memoized minimax over a packed game state (at most 16 points).
//!
//! Colors live in 4-bit nibbles of a `u64`. For the coloring game the key
//! relabels colors by first appearance along the point order, which is sound
//! because the palette is symmetric; Grundy and marking keys are exact.

use std::collections::HashMap;

use crate::game::{GameConfig, Mode, Move, Player, Variant};
use crate::poset::Poset;

use super::SolveError;

pub(crate) const MAX_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct Node {
    /// Nibble `x`: color of point `x`, 0 if free (marking: 1 if marked).
    pub colors: u64,
    pub turn: Player,
    pub rem: u8,
    /// Marking only: largest back-degree so far.
    pub extra: u8,
}

pub(crate) struct Solver {
    n: usize,
    inc: Vec<u16>,
    cfg: GameConfig,
    memo_on: bool,
    bool_memo: HashMap<Node, bool>,
    val_memo: HashMap<Node, u8>,
    pub nodes: u64,
    max_nodes: u64,
}

fn nib(colors: u64, x: usize) -> u8 {
    (colors >> (4 * x) & 0xf) as u8
}

fn with(colors: u64, x: usize, c: u8) -> u64 {
    colors | (c as u64) << (4 * x)
}

impl Solver {
    pub fn new(p: &Poset, cfg: GameConfig, memo_on: bool, max_nodes: u64) -> Result<Self, SolveError> {
        if p.len() > MAX_POINTS {
            return Err(SolveError::TooLarge { n: p.len(), limit: MAX_POINTS });
        }
        if cfg.variant == Variant::Coloring && cfg.k > 15 {
            return Err(SolveError::Unsupported(format!("palette {} exceeds 15", cfg.k)));
        }
        cfg.validate().map_err(|e| SolveError::Unsupported(e.to_string()))?;
        let inc = (0..p.len())
            .map(|x| p.incomparables(x).iter().fold(0u16, |m, y| m | 1 << y))
            .collect();
        Ok(Solver {
            n: p.len(),
            inc,
            cfg,
            memo_on,
            bool_memo: HashMap::new(),
            val_memo: HashMap::new(),
            nodes: 0,
            max_nodes,
        })
    }

    pub fn memo_len(&self) -> usize {
        self.bool_memo.len() + self.val_memo.len()
    }

    pub fn root(&self) -> Node {
        let first = self.cfg.first_mover();
        let mut node = Node {
            colors: 0,
            turn: first,
            rem: self.cfg.quota(first) as u8,
            extra: 0,
        };
        if node.rem == 0 {
            self.end_turn(&mut node);
        }
        node
    }

    fn end_turn(&self, node: &mut Node) {
        let mut next = node.turn.other();
        if self.cfg.quota(next) == 0 {
            next = node.turn;
        }
        node.turn = next;
        node.rem = self.cfg.quota(next) as u8;
    }

    fn free(&self, node: &Node) -> impl Iterator<Item = usize> + '_ {
        let colors = node.colors;
        (0..self.n).filter(move |&x| nib(colors, x) == 0)
    }

    fn all_taken(&self, node: &Node) -> bool {
        self.free(node).next().is_none()
    }

    fn class_hits(&self, node: &Node, x: usize) -> u16 {
        // bit c: some incomparable of x has color c
        let mut hits = 0u16;
        let mut m = self.inc[x];
        while m != 0 {
            let y = m.trailing_zeros() as usize;
            m &= m - 1;
            hits |= 1 << nib(node.colors, y);
        }
        hits & !1
    }

    fn stranded(&self, node: &Node) -> bool {
        let full = ((1u32 << (self.cfg.k + 1)) - 2) as u16;
        self.free(node).any(|x| self.class_hits(node, x) & full == full)
    }

    fn canonical(&self, node: &Node) -> Node {
        let mut map = [0u8; 16];
        let mut next = 1u8;
        let mut colors = 0u64;
        for x in 0..self.n {
            let c = nib(node.colors, x);
            if c != 0 {
                if map[c as usize] == 0 {
                    map[c as usize] = next;
                    next += 1;
                }
                colors = with(colors, x, map[c as usize]);
            }
        }
        Node { colors, ..*node }
    }

    /// Successor after `mv`, following the engine's turn rules.
    pub fn child(&self, node: &Node, mv: Move) -> Node {
        let mut out = *node;
        match mv {
            Move::Pass => {
                self.end_turn(&mut out);
                return out;
            }
            Move::Color { point, color } => out.colors = with(out.colors, point, color as u8),
            Move::Choose { point } => {
                let hits = self.class_hits(node, point);
                let c = (!hits & !1).trailing_zeros() as u8;
                out.colors = with(out.colors, point, c);
            }
            Move::Mark { point } => {
                let back = (0..self.n)
                    .filter(|&y| self.inc[point] >> y & 1 == 1 && nib(node.colors, y) != 0)
                    .count() as u8;
                out.extra = out.extra.max(back);
                out.colors = with(out.colors, point, 1);
            }
        }
        out.rem -= 1;
        if out.rem == 0 {
            self.end_turn(&mut out);
        }
        out
    }

    /// Moves in a fixed order. Coloring moves use at most one unused color
    /// (the least), since unused colors are interchangeable.
    pub fn moves(&self, node: &Node) -> Vec<Move> {
        let mut out = Vec::new();
        match self.cfg.variant {
            Variant::Coloring => {
                let used = (0..self.n).map(|x| nib(node.colors, x)).max().unwrap_or(0) as usize;
                let top = (used + 1).min(self.cfg.k);
                for x in self.free(node) {
                    let hits = self.class_hits(node, x);
                    for c in 1..=top {
                        if hits >> c & 1 == 0 {
                            out.push(Move::Color { point: x, color: c });
                        }
                    }
                }
            }
            Variant::Grundy => out.extend(self.free(node).map(|point| Move::Choose { point })),
            Variant::Marking => out.extend(self.free(node).map(|point| Move::Mark { point })),
        }
        if self.cfg.mode == Mode::Auxiliary && node.turn == Player::Alice {
            out.push(Move::Pass);
        }
        out
    }

    fn tick(&mut self) -> Result<(), SolveError> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(SolveError::BudgetExceeded { nodes: self.nodes });
        }
        Ok(())
    }

    /// Coloring: does Alice win from `node`?
    pub fn alice_wins(&mut self, node: &Node) -> Result<bool, SolveError> {
        if self.all_taken(node) {
            return Ok(true);
        }
        if self.stranded(node) {
            return Ok(false);
        }
        let key = self.canonical(node);
        if self.memo_on {
            if let Some(&v) = self.bool_memo.get(&key) {
                return Ok(v);
            }
        }
        self.tick()?;
        let alice = node.turn == Player::Alice;
        let mut result = !alice;
        for mv in self.moves(node) {
            let child = self.child(node, mv);
            if self.alice_wins(&child)? == alice {
                result = alice;
                break;
            }
        }
        if self.memo_on {
            self.bool_memo.insert(key, result);
        }
        Ok(result)
    }

    /// Grundy or marking: final value under optimal play (Alice minimizes).
    pub fn value(&mut self, node: &Node) -> Result<u8, SolveError> {
        if self.all_taken(node) {
            return Ok(match self.cfg.variant {
                Variant::Marking => node.extra + 1,
                _ => (0..self.n).map(|x| nib(node.colors, x)).max().unwrap_or(0),
            });
        }
        if self.memo_on {
            if let Some(&v) = self.val_memo.get(node) {
                return Ok(v);
            }
        }
        self.tick()?;
        let alice = node.turn == Player::Alice;
        let mut best: Option<u8> = None;
        for mv in self.moves(node) {
            let child = self.child(node, mv);
            let v = self.value(&child)?;
            best = Some(match best {
                None => v,
                Some(b) if alice => b.min(v),
                Some(b) => b.max(v),
            });
        }
        let v = best.expect("a free point always yields a move");
        if self.memo_on {
            self.val_memo.insert(*node, v);
        }
        Ok(v)
    }

    /// Principal variation from the root: the first optimal move at each node.
    pub fn principal_variation(&mut self) -> Result<Vec<(Player, Move)>, SolveError> {
        let mut node = self.root();
        let mut line = Vec::new();
        let coloring = self.cfg.variant == Variant::Coloring;
        loop {
            if self.all_taken(&node) || (coloring && self.stranded(&node)) {
                return Ok(line);
            }
            let alice = node.turn == Player::Alice;
            let mut pick = None;
            if coloring {
                let target = self.alice_wins(&node)?;
                for mv in self.moves(&node) {
                    if self.alice_wins(&self.child(&node, mv))? == target {
                        pick = Some(mv);
                        break;
                    }
                }
            } else {
                let target = self.value(&node)?;
                for mv in self.moves(&node) {
                    if self.value(&self.child(&node, mv))? == target {
                        pick = Some(mv);
                        break;
                    }
                }
            }
            let mv = pick.expect("an optimal move exists");
            line.push((if alice { Player::Alice } else { Player::Bob }, mv));
            node = self.child(&node, mv);
        }
    }
}
