//! Bob's region attack on the side-chain constructions.
//!
//! Bob keeps a run `R` of uncolored base points and a set `A` of his own
//! colored side points, every one incomparable to all of `R`. Each move adds
//! a side point whose interval covers the (possibly shrunken) region and
//! gives it a color not yet dead on `R`. A color is dead on `R` once every
//! point of `R` has an incomparable point of that color, which also credits
//! Alice's own colorings. When all `k` colors are dead, the points of `R` can
//! never be colored.
//!
//! The two-chain attack has a single phase over the boundary intervals. The
//! phased attack walks side chains `C₁, C₂, …` with shrinking windows and moves
//! on once the phase has killed `⌈rᵢ / (⌊a/2⌋ + 1)⌉` of the `rᵢ` live colors.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use serde_json::{json, Value};

use crate::bitset::BitSet;
use crate::constructions::{ConstructionMeta, Role};
use crate::game::{Agent, AgentError, Color, GameRng, GameState, Mode, Move, Variant};
use crate::poset::{Interval, Point};

use super::baseline::greedy_move;

#[derive(Debug, Clone)]
struct Phase {
    /// Window → its duplicates, ascending.
    windows: Vec<(Interval, Vec<Point>)>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RegionTelemetry {
    pub bob_moves: usize,
    /// Live colors at the start of each phase entered, then what was left.
    pub residuals: Vec<usize>,
    /// Colors that died during each phase entered.
    pub phase_kills: Vec<usize>,
    /// Phases left before reaching their kill threshold.
    pub early_switches: usize,
    pub smallest_region: Option<usize>,
    pub won_at_move: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RegionBob {
    name: &'static str,
    k: usize,
    a: usize,
    base: Vec<Point>,
    phases: Vec<Phase>,
    halving_bound: bool,
    region: Interval,
    phase: usize,
    dead_at_phase_start: usize,
    dead_now: usize,
    a_points: Vec<Point>,
    won: bool,
    telemetry: RegionTelemetry,
    notes: Vec<Value>,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    window: Interval,
    region: Interval,
    point: Point,
    color: Color,
    dead_after: usize,
    urgency: usize,
    margin: usize,
}

impl RegionBob {
    /// Bob for the width-2 boundary-interval construction.
    pub fn lemma2(meta: &ConstructionMeta) -> Result<Self, AgentError> {
        if meta.name != "lemma2" {
            return Err(AgentError::Precondition(format!("expected a lemma2 instance, got {}", meta.name)));
        }
        let k = meta.params.k.unwrap_or(0);
        Ok(Self::build("lemma2", meta, k, 1, true))
    }

    /// Bob for the phased construction.
    pub fn lemma4(meta: &ConstructionMeta) -> Result<Self, AgentError> {
        if meta.name != "lemma4" {
            return Err(AgentError::Precondition(format!("expected a lemma4 instance, got {}", meta.name)));
        }
        let (k, a, w) = (
            meta.params.k.unwrap_or(0),
            meta.params.a.unwrap_or(0),
            meta.params.w.unwrap_or(0),
        );
        let h = (a / 2).max(1) as f64;
        if (k as f64) >= (1.0 + 1.0 / h).powi(w as i32 - 1) {
            return Err(AgentError::Precondition(format!(
                "k={k} is not below (1 + 1/{h})^{}",
                w - 1
            )));
        }
        Ok(Self::build("lemma4", meta, k, a, false))
    }

    fn build(name: &'static str, meta: &ConstructionMeta, k: usize, a: usize, halving_bound: bool) -> Self {
        let mut phases = vec![BTreeMap::<Interval, Vec<Point>>::new(); meta.side_chains.len()];
        for (x, role) in meta.roles.iter().enumerate() {
            if let Role::Side { chain, interval, .. } = role {
                phases[chain - 1].entry(*interval).or_default().push(x);
            }
        }
        let phases = phases
            .into_iter()
            .map(|w| Phase {
                windows: w.into_iter().collect(),
            })
            .collect();
        RegionBob {
            name,
            k,
            a,
            base: meta.base.clone(),
            phases,
            halving_bound,
            region: Interval::new(0, meta.m().max(1) - 1),
            phase: 0,
            dead_at_phase_start: 0,
            dead_now: 0,
            a_points: Vec::new(),
            won: false,
            telemetry: RegionTelemetry::default(),
            notes: Vec::new(),
        }
    }

    pub fn telemetry(&self) -> &RegionTelemetry {
        &self.telemetry
    }

    pub fn region(&self) -> Interval {
        self.region
    }

    pub fn has_won(&self) -> bool {
        self.won
    }

    fn region_bits(&self, n: usize, r: Interval) -> BitSet {
        BitSet::from_iter_with_len(n, r.positions().map(|p| self.base[p]))
    }

    fn dead_mask(&self, state: &GameState, bits: &BitSet) -> u64 {
        (1..=self.k)
            .filter(|&c| bits.is_subset(state.blocked(c).unwrap()))
            .fold(0, |m, c| m | 1 << c)
    }

    /// Maximal uncolored runs of base positions inside `r`.
    fn runs(&self, state: &GameState, r: Interval) -> Vec<Interval> {
        let mut out = Vec::new();
        let mut start = None;
        for p in r.positions() {
            match (state.is_uncolored(self.base[p]), start) {
                (true, None) => start = Some(p),
                (false, Some(s)) => {
                    out.push(Interval::new(s, p - 1));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push(Interval::new(s, r.hi));
        }
        out
    }

    fn margin(&self, state: &GameState, r: Interval) -> usize {
        let free = |p: usize| state.is_uncolored(self.base[p]);
        let left = (0..r.lo).rev().take_while(|&p| free(p)).count();
        let right = (r.hi + 1..self.base.len()).take_while(|&p| free(p)).count();
        left.min(right)
    }

    fn candidates(&self, state: &GameState, phase: usize) -> (Vec<Candidate>, bool) {
        let runs = self.runs(state, self.region);
        let n = state.len();
        let mut dead_cache: HashMap<Interval, (u64, usize)> = HashMap::new();
        let mut out = Vec::new();
        let mut supply_short = false;
        for (window, dups) in &self.phases[phase].windows {
            let Some(region) = runs
                .iter()
                .filter_map(|run| {
                    let lo = run.lo.max(window.lo);
                    let hi = run.hi.min(window.hi);
                    (lo <= hi).then(|| Interval::new(lo, hi))
                })
                .max_by_key(|r| (r.len(), std::cmp::Reverse(r.lo)))
            else {
                continue;
            };
            let (dead, margin) = *dead_cache.entry(region).or_insert_with(|| {
                let bits = self.region_bits(n, region);
                (self.dead_mask(state, &bits), self.margin(state, region))
            });
            for color in (1..=self.k).filter(|c| dead & (1 << c) == 0) {
                match dups.iter().find(|&&x| state.can_color(x, color)) {
                    Some(&point) => out.push(Candidate {
                        window: *window,
                        region,
                        point,
                        color,
                        dead_after: dead.count_ones() as usize + 1,
                        urgency: 0,
                        margin,
                    }),
                    None => supply_short |= dups.iter().all(|&x| !state.is_uncolored(x)),
                }
            }
        }
        // a color with few ways to die at a given region size is threatened
        let mut ways: HashMap<(usize, Color), usize> = HashMap::new();
        for c in &out {
            *ways.entry((c.region.len(), c.color)).or_default() += 1;
        }
        for c in &mut out {
            c.urgency = ways[&(c.region.len(), c.color)];
        }
        (out, supply_short)
    }

    fn pick(&self, cands: &[Candidate]) -> Option<Candidate> {
        cands
            .iter()
            .max_by_key(|c| {
                (
                    c.dead_after == self.k,
                    c.region.len(),
                    c.dead_after,
                    std::cmp::Reverse(c.urgency),
                    c.margin,
                    std::cmp::Reverse(c.window.lo),
                    std::cmp::Reverse(c.window.hi),
                    std::cmp::Reverse(c.color),
                )
            })
            .copied()
    }

    fn threshold(&self, live_at_start: usize) -> usize {
        live_at_start.div_ceil(self.a / 2 + 1)
    }

    fn enter_phase(&mut self, phase: usize, dead: usize) {
        self.phase = phase;
        self.dead_at_phase_start = dead;
        self.telemetry.residuals.push(self.k - dead);
        self.telemetry.phase_kills.push(0);
    }

    fn check_invariants(&self, state: &GameState, c: &Candidate) -> Result<(), AgentError> {
        let (region, color) = (c.region, c.color);
        let bits = self.region_bits(state.len(), region);
        if !bits.is_subset(state.uncolored()) {
            return Err(AgentError::Invariant(format!("region {region:?} holds colored points")));
        }
        for &x in &self.a_points {
            if !bits.is_subset(state.poset().incomparables(x)) {
                return Err(AgentError::Invariant(format!(
                    "side point {x} is comparable to part of the region {region:?}"
                )));
            }
            if state.color_of(x) == Some(color) {
                return Err(AgentError::Invariant(format!("color {color} reused on A")));
            }
        }
        // a winning move may trade the region for a credited color
        if self.halving_bound && c.dead_after < self.k {
            let r = self.telemetry.bob_moves as i32;
            let m = self.base.len() as f64;
            let bound = m / 2f64.powi(r) - r as f64;
            if (region.len() as f64) < bound {
                return Err(AgentError::Invariant(format!(
                    "region {} fell below m/2^r - r = {bound} after {r} replies",
                    region.len()
                )));
            }
        }
        Ok(())
    }
}

impl Agent for RegionBob {
    fn name(&self) -> String {
        format!("bob-{}", self.name)
    }

    fn start(&mut self, state: &GameState) -> Result<(), AgentError> {
        let cfg = state.config();
        if cfg.variant != Variant::Coloring || cfg.mode != Mode::Auxiliary || cfg.b != 1 || cfg.k != self.k {
            return Err(AgentError::Precondition(format!(
                "{} expects the auxiliary (a,1) coloring game with k={}",
                self.name, self.k
            )));
        }
        self.telemetry = RegionTelemetry::default();
        self.notes.clear();
        self.a_points.clear();
        self.won = false;
        self.dead_now = 0;
        self.region = Interval::new(0, self.base.len().max(1) - 1);
        self.enter_phase(0, 0);
        Ok(())
    }

    fn choose(&mut self, state: &GameState, _rng: &mut GameRng) -> Result<Move, AgentError> {
        if self.telemetry.residuals.is_empty() {
            self.start(state)?;
        }
        if self.won {
            return greedy_move(state).ok_or_else(|| AgentError::StrategyStuck("no legal move".into()));
        }
        // credit colors that died since the last move, Alice's included
        let best_run = self
            .runs(state, self.region)
            .into_iter()
            .map(|r| (self.dead_mask(state, &self.region_bits(state.len(), r)).count_ones() as usize, r))
            .max_by_key(|&(d, r)| (d, r.len()));
        if let Some((d, run)) = best_run {
            self.dead_now = self.dead_now.max(d);
            if d == self.k {
                self.won = true;
                self.region = run;
                self.telemetry.won_at_move = Some(self.telemetry.bob_moves);
                *self.telemetry.phase_kills.last_mut().unwrap() = d - self.dead_at_phase_start;
                self.telemetry.residuals.push(0);
                self.notes.push(json!({"strategy": self.name, "region": [run.lo, run.hi], "dead": d, "won": true, "credited": true}));
                return greedy_move(state).ok_or_else(|| AgentError::StrategyStuck("no legal move".into()));
            }
        }
        let live_at_start = self.k - self.dead_at_phase_start;
        if self.dead_now - self.dead_at_phase_start >= self.threshold(live_at_start)
            && self.phase + 1 < self.phases.len()
        {
            self.enter_phase(self.phase + 1, self.dead_now);
        }
        let mut choice = None;
        let mut short = false;
        while choice.is_none() {
            let (cands, s) = self.candidates(state, self.phase);
            short |= s;
            choice = self.pick(&cands);
            if choice.is_none() {
                if self.phase + 1 < self.phases.len() {
                    self.telemetry.early_switches += 1;
                    self.enter_phase(self.phase + 1, self.dead_now);
                } else {
                    break;
                }
            }
        }
        let Some(c) = choice else {
            return Err(if short {
                AgentError::SupplyExhausted(format!("{}: no uncolored duplicate left for the region {:?}", self.name, self.region))
            } else {
                AgentError::RegionCollapse(format!("{}: no live color can be killed on {:?}", self.name, self.region))
            });
        };
        self.check_invariants(state, &c)?;
        self.telemetry.bob_moves += 1;
        self.region = c.region;
        self.a_points.push(c.point);
        self.dead_now = c.dead_after;
        *self.telemetry.phase_kills.last_mut().unwrap() = self.dead_now - self.dead_at_phase_start;
        self.telemetry.smallest_region = Some(self.telemetry.smallest_region.map_or(c.region.len(), |s| s.min(c.region.len())));
        if c.dead_after == self.k {
            self.won = true;
            self.telemetry.won_at_move = Some(self.telemetry.bob_moves);
            self.telemetry.residuals.push(0);
        }
        self.notes.push(json!({
            "strategy": self.name,
            "phase": self.phase + 1,
            "region": [c.region.lo, c.region.hi],
            "window": [c.window.lo, c.window.hi],
            "dead": c.dead_after,
            "won": self.won,
        }));
        Ok(Move::Color {
            point: c.point,
            color: c.color,
        })
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{lemma2_default_m, lemma2_poset, lemma4_default_sizing, lemma4_poset};
    use crate::game::{play_match, GameConfig, MatchOptions, Outcome, Player, Termination};
    use crate::strategies::{RegionAdversary, DangerAgent, GreedyAgent, MinimaxAgent, RandomAgent};
    use std::sync::Arc;

    fn alices(meta: &ConstructionMeta) -> Vec<Box<dyn Agent>> {
        vec![
            Box::new(RegionAdversary::new(meta)),
            Box::new(RandomAgent),
            Box::new(GreedyAgent),
            Box::new(DangerAgent),
            Box::new(MinimaxAgent::lookahead2()),
        ]
    }

    #[test]
    fn lemma2_opening_move() {
        let (p, meta) = lemma2_poset(3, 32).unwrap();
        let p = Arc::new(p);
        let mut bob = RegionBob::lemma2(&meta).unwrap();
        let s = GameState::new(p, GameConfig::coloring(1, 1, 3).auxiliary()).unwrap();
        bob.start(&s).unwrap();
        let mv = bob.choose(&s, &mut rand::SeedableRng::seed_from_u64(0)).unwrap();
        // first duplicate of the whole base chain, color 1
        let whole = meta.roles.iter().position(|r| matches!(r, Role::Side { interval, .. } if *interval == Interval::new(0, 31))).unwrap();
        assert_eq!(mv, Move::Color { point: whole, color: 1 });
    }

    #[test]
    fn lemma2_wins_against_suite() {
        for k in 1..=3 {
            let (p, meta) = lemma2_poset(k, lemma2_default_m(k)).unwrap();
            let p = Arc::new(p);
            for seed in 0..8 {
                for alice in alices(&meta) {
                    let mut alice = alice;
                    let mut bob = RegionBob::lemma2(&meta).unwrap();
                    let opts = MatchOptions {
                        stop_when_stranded: true,
                        ..Default::default()
                    };
                    let t = play_match(p.clone(), GameConfig::coloring(1, 1, k).auxiliary(), alice.as_mut(), &mut bob, seed, &opts)
                        .unwrap_or_else(|e| panic!("k={k} seed={seed} {}: {:?}", alice.name(), e.kind));
                    assert_eq!(t.outcome, Outcome::BobWins, "k={k} seed={seed} {}", alice.name());
                    assert_eq!(t.termination, Termination::Stranded);
                    assert!(bob.telemetry().bob_moves <= k);
                    t.replay(p.clone()).unwrap();
                }
            }
        }
    }

    #[test]
    fn lemma2_answers_one_sided_blocks() {
        // Alice blocks color 2 on the left of the region every chance she gets
        struct Blocker(Vec<Point>);
        impl Agent for Blocker {
            fn name(&self) -> String {
                "blocker".into()
            }
            fn choose(&mut self, s: &GameState, _: &mut GameRng) -> Result<Move, AgentError> {
                Ok((0..8)
                    .find(|&p| s.can_color(self.0[p], 2))
                    .map_or(Move::Pass, |p| Move::Color { point: self.0[p], color: 2 }))
            }
            fn boxed_clone(&self) -> Box<dyn Agent> {
                Box::new(Blocker(self.0.clone()))
            }
        }
        let (p, meta) = lemma2_poset(3, 32).unwrap();
        let mut bob = RegionBob::lemma2(&meta).unwrap();
        let t = play_match(Arc::new(p), GameConfig::coloring(1, 1, 3).auxiliary(), &mut Blocker(meta.base.clone()), &mut bob, 0, &MatchOptions {
            stop_when_stranded: true,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(t.outcome, Outcome::BobWins);
        assert_eq!(t.moves.iter().filter(|r| r.actor == Player::Bob).count(), 3);
    }

    #[test]
    fn lemma4_wins_and_phases_add_up() {
        let (a, w, k) = (2, 3, 3);
        let (sizes, m) = lemma4_default_sizing(a, w, k);
        let (p, meta) = lemma4_poset(a, w, k, &sizes, m).unwrap();
        let p = Arc::new(p);
        for seed in 0..3 {
            for alice in alices(&meta) {
                let mut alice = alice;
                let mut bob = RegionBob::lemma4(&meta).unwrap();
                let opts = MatchOptions {
                    stop_on_claim: true,
                    ..Default::default()
                };
                let t = play_match(p.clone(), GameConfig::coloring(a, 1, k).auxiliary(), alice.as_mut(), &mut bob, seed, &opts)
                    .unwrap_or_else(|e| panic!("seed={seed} {}: {:?}", alice.name(), e.kind));
                assert_eq!(t.outcome, Outcome::BobWins, "seed={seed} {}", alice.name());
                let tel = bob.telemetry();
                assert_eq!(tel.early_switches, 0);
                // credited colors can end phase 1 early, e.g. [3, 0]
                assert!(tel.residuals == vec![3, 1, 0] || tel.residuals == vec![3, 0], "{:?}", tel.residuals);
                assert_eq!(*tel.residuals.last().unwrap(), 0);
                for (i, kills) in tel.phase_kills.iter().enumerate() {
                    assert_eq!(tel.residuals[i] - kills, tel.residuals[i + 1]);
                }
            }
        }
    }

    #[test]
    fn lemma4_rejects_too_many_colors() {
        let (sizes, m) = (vec![8, 2], 16);
        let (_, meta) = lemma4_poset(2, 3, 4, &sizes, m).unwrap();
        assert!(matches!(RegionBob::lemma4(&meta), Err(AgentError::Precondition(_))));
    }
}
