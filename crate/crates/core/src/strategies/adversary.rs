//! An Alice aimed at the region attacks: she alternates between splitting the
//! longest uncolored base run at its midpoint and shading part of it with a
//! side point, so that colors die on only part of the run.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::constructions::{ConstructionMeta, Role};
use crate::game::{Agent, AgentError, GameRng, GameState, Move, Variant};
use crate::poset::{Interval, Point};

use super::DangerAgent;

#[derive(Debug, Clone)]
pub struct RegionAdversary {
    base: Vec<Point>,
    side: Vec<(Interval, Point)>,
}

impl RegionAdversary {
    pub fn new(meta: &ConstructionMeta) -> Self {
        let side = meta
            .roles
            .iter()
            .enumerate()
            .filter_map(|(x, r)| match r {
                Role::Side { interval, .. } => Some((*interval, x)),
                _ => None,
            })
            .collect();
        RegionAdversary {
            base: meta.base.clone(),
            side,
        }
    }

    fn longest_run(&self, state: &GameState) -> Option<Interval> {
        let mut best: Option<Interval> = None;
        let mut start = None;
        for p in 0..=self.base.len() {
            let free = p < self.base.len() && state.is_uncolored(self.base[p]);
            match (free, start) {
                (true, None) => start = Some(p),
                (false, Some(s)) => {
                    let run = Interval::new(s, p - 1);
                    if best.is_none_or(|b| run.len() > b.len()) {
                        best = Some(run);
                    }
                    start = None;
                }
                _ => {}
            }
        }
        best
    }

    fn colored(state: &GameState, x: Point, rng: &mut GameRng) -> Option<Move> {
        let colors = state.legal_colors(x);
        colors.choose(rng).map(|&color| Move::Color { point: x, color })
    }
}

impl Agent for RegionAdversary {
    fn name(&self) -> String {
        "region-adversary".into()
    }

    fn choose(&mut self, state: &GameState, rng: &mut GameRng) -> Result<Move, AgentError> {
        if state.config().variant == Variant::Coloring {
            if let Some(run) = self.longest_run(state) {
                let mid = self.base[(run.lo + run.hi) / 2];
                let shade = self
                    .side
                    .iter()
                    .filter(|(i, y)| state.is_uncolored(*y) && i.intersects(&run) && !i.contains_interval(&run))
                    .max_by_key(|(i, _)| i.hi.min(run.hi) + 1 - i.lo.max(run.lo))
                    .map(|&(_, y)| y);
                let mv = match shade {
                    Some(y) if rng.gen_bool(0.5) => Self::colored(state, y, rng),
                    _ => None,
                }
                .or_else(|| Self::colored(state, mid, rng));
                if let Some(mv) = mv {
                    return Ok(mv);
                }
            }
        }
        DangerAgent.choose(state, rng)
    }

    fn boxed_clone(&self) -> Box<dyn Agent> {
        Box::new(self.clone())
    }
}
