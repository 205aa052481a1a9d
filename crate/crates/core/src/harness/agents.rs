//! Agents by name, for spec files and the CLI.

use std::sync::Arc;

use crate::constructions::ConstructionMeta;
use crate::game::Agent;
use crate::poset::{Point, Poset};
use crate::strategies::{
    AgentFactory, ChainPartitionAlice, DangerAgent, GreedyAgent, LiftBob, MinimaxAgent, RandomAgent,
    RegionAdversary, RegionBob, StdinAgent,
};

use super::HarnessError;

pub const AGENT_NAMES: &[&str] = &[
    "random",
    "greedy",
    "danger",
    "lookahead2",
    "minimax",
    "region-adversary",
    "stdin",
    "bob-lemma2",
    "bob-lemma4",
    "bob-lift-lemma2",
    "alice-t5",
];

/// Copy 0 of a stack and the stacked pattern's metadata.
pub(crate) fn stack_pattern(p: &Poset, meta: &ConstructionMeta) -> Result<(Arc<Poset>, ConstructionMeta), HarnessError> {
    let (size, _) = meta
        .copy_layout()
        .ok_or_else(|| HarnessError::MetaMismatch(format!("{} is not a stack of copies", meta.name)))?;
    let inner = meta.inner.as_deref().expect("stacks carry inner metadata").clone();
    let points: Vec<Point> = (0..size).collect();
    Ok((Arc::new(p.restrict(&points)), inner))
}

fn need<'a>(meta: Option<&'a ConstructionMeta>, name: &str) -> Result<&'a ConstructionMeta, HarnessError> {
    meta.ok_or_else(|| HarnessError::MetaMismatch(format!("{name} needs construction metadata")))
}

/// Builds agent `name` for a game on `poset`. Scripted strategies need the
/// construction metadata the instance was generated with.
pub fn make_agent(name: &str, poset: &Poset, meta: Option<&ConstructionMeta>) -> Result<Box<dyn Agent>, HarnessError> {
    let mismatch = |e: crate::game::AgentError| HarnessError::MetaMismatch(e.to_string());
    Ok(match name {
        "random" => Box::new(RandomAgent),
        "greedy" => Box::new(GreedyAgent),
        "danger" => Box::new(DangerAgent),
        "lookahead2" => Box::new(MinimaxAgent::lookahead2()),
        "minimax" => Box::new(MinimaxAgent::new(None)),
        "stdin" => Box::new(StdinAgent::new()),
        "region-adversary" => match meta {
            Some(m) if !m.base.is_empty() => Box::new(RegionAdversary::new(m)),
            _ => Box::new(DangerAgent),
        },
        "bob-lemma2" => Box::new(RegionBob::lemma2(need(meta, name)?).map_err(mismatch)?),
        "bob-lemma4" => Box::new(RegionBob::lemma4(need(meta, name)?).map_err(mismatch)?),
        "bob-lift-lemma2" => {
            let (pattern, inner) = stack_pattern(poset, need(meta, name)?)?;
            RegionBob::lemma2(&inner).map_err(mismatch)?;
            let factory: AgentFactory =
                Arc::new(move || Box::new(RegionBob::lemma2(&inner).expect("checked above")));
            Box::new(LiftBob::new(pattern, need(meta, name)?, factory).map_err(mismatch)?)
        }
        "alice-t5" => Box::new(ChainPartitionAlice::new(poset).map_err(mismatch)?),
        _ => return Err(HarnessError::UnknownAgent(name.into())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{lemma2_poset, stack_copies};

    #[test]
    fn every_listed_name_builds() {
        let (q, qmeta) = lemma2_poset(2, 8).unwrap();
        let (p, meta) = stack_copies(&q, 3, Some(&qmeta)).unwrap();
        for &name in AGENT_NAMES {
            let (poset, m) = match name {
                "bob-lift-lemma2" => (&p, &meta),
                _ => (&q, &qmeta),
            };
            if name == "bob-lemma4" {
                assert!(make_agent(name, poset, Some(m)).is_err());
                continue;
            }
            make_agent(name, poset, Some(m)).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(make_agent("nobody", &q, None).is_err());
    }
}
