//! One function per scenario unit (a seeded game or instance check), and the
//! per-cell aggregation into verification records.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::constructions::{
    fence_r, lemma2_default_m, lemma2_poset, lemma4_default_sizing, lemma4_poset, stack_copies, ConstructionMeta,
};
use crate::game::{play_match, GameConfig, GameRng, MatchOptions, Outcome, Transcript};
use crate::poset::{contains_induced, random_poset, random_width_poset, width, Poset};
use crate::solver::{
    coloring_number, game_chromatic_value, grundy_game_value, grundy_number, marking_game_value, search_width2_grundy,
    Budget,
};
use crate::strategies::{default_copies, AgentFactory, ChainPartitionAlice, LiftBob, RegionBob};
use crate::wgame::{
    play_wgame, random_family, FuzzPresenter, RecursivePainter, WGameOptions, WGameReproducer, WGameState, WWinner,
};

use super::agents::{make_agent, stack_pattern};
use super::{HarnessError, Reproducer, Scenario, SeedBlock, Verdict, VerificationRecord};

/// Scripted strategies under verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Bob on the width-2 boundary-interval construction, auxiliary (1,1).
    Lemma2,
    /// Phased Bob on the multi-chain construction, auxiliary (a,1).
    Lemma4,
    /// The width-2 Bob lifted to the standard (1,1) game on stacked copies.
    Lift,
    /// Chain-partition Alice with `w·2^(w−1)` colors, standard (2,1).
    T5,
}

impl Strategy {
    fn scenario(self) -> Scenario {
        match self {
            Strategy::Lemma2 => Scenario::Lemma2,
            Strategy::Lemma4 => Scenario::Lemma4,
            Strategy::Lift => Scenario::Lift,
            Strategy::T5 => Scenario::T5,
        }
    }
}

#[derive(Debug, Clone)]
enum Stat {
    Sum(u64),
    Max(u64),
    /// Histogram bucket.
    Tally(String),
}

pub(crate) struct Unit {
    pub ok: bool,
    error: String,
    stats: Vec<(&'static str, Stat)>,
    transcript: Option<Transcript>,
    poset: Option<Poset>,
    artifact: Option<Value>,
}

impl Unit {
    fn pass(stats: Vec<(&'static str, Stat)>) -> Self {
        Unit {
            ok: true,
            error: String::new(),
            stats,
            transcript: None,
            poset: None,
            artifact: None,
        }
    }

    fn fail(error: impl Into<String>) -> Self {
        Unit {
            ok: false,
            error: error.into(),
            ..Unit::pass(Vec::new())
        }
    }

    fn check(mut self, cond: bool, msg: impl FnOnce() -> String) -> Self {
        if self.ok && !cond {
            self.ok = false;
            self.error = msg();
        }
        self
    }
}

fn meta_mismatch(msg: impl Into<String>) -> HarnessError {
    HarnessError::MetaMismatch(msg.into())
}

/// Plays one seeded match of `strategy` on an instance against `opponent`
/// and checks the strategy's guarantee.
pub(crate) fn strategy_game(
    strategy: Strategy,
    poset: &Arc<Poset>,
    meta: Option<&ConstructionMeta>,
    opponent: &str,
    seed: u64,
) -> Result<Unit, HarnessError> {
    let need = |name: &str| -> Result<&ConstructionMeta, HarnessError> {
        match meta {
            Some(m) if m.name == name => Ok(m),
            Some(m) => Err(meta_mismatch(format!("expected a {name} instance, got {}", m.name))),
            None => Err(meta_mismatch(format!("{name} needs construction metadata"))),
        }
    };
    let mut opp = make_agent(opponent, poset, meta)?;
    let stranded = MatchOptions {
        stop_when_stranded: true,
        ..Default::default()
    };
    let unit = match strategy {
        Strategy::Lemma2 => {
            let m = need("lemma2")?;
            let k = m.params.k.unwrap_or(0);
            let mut bob = RegionBob::lemma2(m).map_err(|e| meta_mismatch(e.to_string()))?;
            let cfg = GameConfig::coloring(1, 1, k).auxiliary();
            finish(play_match(poset.clone(), cfg, opp.as_mut(), &mut bob, seed, &stranded), Outcome::BobWins, |_| {
                let t = bob.telemetry();
                (
                    t.bob_moves <= k,
                    format!("Bob needed {} moves for {k} colors", t.bob_moves),
                    vec![("bob_moves", Stat::Sum(t.bob_moves as u64)), ("max_bob_moves", Stat::Max(t.bob_moves as u64))],
                )
            })
        }
        Strategy::Lemma4 => {
            let m = need("lemma4")?;
            let (k, a) = (m.params.k.unwrap_or(0), m.params.a.unwrap_or(0));
            let mut bob = RegionBob::lemma4(m).map_err(|e| meta_mismatch(e.to_string()))?;
            let cfg = GameConfig::coloring(a, 1, k).auxiliary();
            let opts = MatchOptions {
                stop_on_claim: true,
                ..Default::default()
            };
            finish(play_match(poset.clone(), cfg, opp.as_mut(), &mut bob, seed, &opts), Outcome::BobWins, |_| {
                let t = bob.telemetry();
                let adds_up = t
                    .phase_kills
                    .iter()
                    .enumerate()
                    .all(|(i, kills)| t.residuals.get(i + 1) == Some(&(t.residuals[i] - kills)));
                let ok = adds_up && t.residuals.last() == Some(&0) && t.early_switches == 0;
                (
                    ok,
                    format!("phase accounting {:?} / kills {:?} / early {}", t.residuals, t.phase_kills, t.early_switches),
                    vec![
                        ("residuals", Stat::Tally(format!("{:?}", t.residuals))),
                        ("bob_moves", Stat::Sum(t.bob_moves as u64)),
                    ],
                )
            })
        }
        Strategy::Lift => {
            let stack = need("stack")?;
            let (pattern, inner) = stack_pattern(poset, stack)?;
            if inner.name != "lemma2" {
                return Err(meta_mismatch(format!("lift expects stacked lemma2 copies, got {}", inner.name)));
            }
            let k = inner.params.k.unwrap_or(0);
            RegionBob::lemma2(&inner).map_err(|e| meta_mismatch(e.to_string()))?;
            let factory: AgentFactory = Arc::new(move || Box::new(RegionBob::lemma2(&inner).expect("checked")));
            let mut bob = LiftBob::new(pattern.clone(), stack, factory).map_err(|e| meta_mismatch(e.to_string()))?;
            let cfg = GameConfig::coloring(1, 1, k);
            finish(play_match(poset.clone(), cfg, opp.as_mut(), &mut bob, seed, &stranded), Outcome::BobWins, |_| {
                let bad: Vec<String> = bob
                    .embedded_transcripts()
                    .into_iter()
                    .filter_map(|(c, t)| t.replay(pattern.clone()).err().map(|e| format!("copy {c}: {e}")))
                    .collect();
                let t = bob.telemetry();
                (
                    bad.is_empty(),
                    format!("embedded transcripts do not replay: {}", bad.join("; ")),
                    vec![
                        ("opened", Stat::Sum(t.opened as u64)),
                        ("spoiled_fresh", Stat::Sum(t.spoiled_fresh as u64)),
                        ("over_quota", Stat::Sum(t.over_quota as u64)),
                        ("max_opened", Stat::Max(t.opened as u64)),
                    ],
                )
            })
        }
        Strategy::T5 => {
            let mut alice = ChainPartitionAlice::new(poset).map_err(|e| meta_mismatch(e.to_string()))?;
            let cfg = GameConfig::coloring(2, 1, alice.colors_needed());
            let w = alice.width();
            finish(
                play_match(poset.clone(), cfg, &mut alice, opp.as_mut(), seed, &MatchOptions::default()),
                Outcome::AliceWins,
                |_| {
                    let t = alice.telemetry();
                    (
                        true,
                        String::new(),
                        vec![
                            ("presentations", Stat::Sum(t.presentations as u64)),
                            ("painter_replies", Stat::Sum(t.painter_replies as u64)),
                            ("max_surplus", Stat::Max(t.max_surplus as u64)),
                            ("width", Stat::Tally(w.to_string())),
                        ],
                    )
                },
            )
        }
    };
    Ok(unit)
}

fn finish(
    result: Result<Transcript, crate::game::MatchError>,
    want: Outcome,
    check: impl FnOnce(&Transcript) -> (bool, String, Vec<(&'static str, Stat)>),
) -> Unit {
    match result {
        Err(e) => Unit {
            transcript: Some(*e.partial.clone()),
            ..Unit::fail(e.kind.to_string())
        },
        Ok(t) if t.outcome != want => Unit {
            transcript: Some(t.clone()),
            ..Unit::fail(format!("outcome {:?}, expected {want:?}", t.outcome))
        },
        Ok(t) => {
            let (ok, msg, stats) = check(&t);
            let mut u = Unit::pass(stats).check(ok, || msg);
            if !u.ok {
                u.transcript = Some(t);
            }
            u
        }
    }
}

fn cell_get(scenario: Scenario, cell: &BTreeMap<String, usize>, key: &str) -> usize {
    cell.get(key).copied().unwrap_or_else(|| {
        scenario
            .grid_keys()
            .iter()
            .find(|(k, _)| *k == key)
            .map_or(0, |&(_, v)| v)
    })
}

/// The construction a strategy scenario's cell plays on (`None` for t5,
/// whose instances depend on the seed).
fn cell_instance(scenario: Scenario, cell: &BTreeMap<String, usize>) -> Result<Option<(Arc<Poset>, ConstructionMeta)>, HarnessError> {
    let g = |k| cell_get(scenario, cell, k);
    let built = match scenario {
        Scenario::Lemma2 => {
            let m = if g("m") == 0 { lemma2_default_m(g("k")) } else { g("m") };
            lemma2_poset(g("k"), m)?
        }
        Scenario::Lemma4 => {
            let (sizes, m) = lemma4_default_sizing(g("a"), g("w"), g("k"));
            lemma4_poset(g("a"), g("w"), g("k"), &sizes, m)?
        }
        Scenario::Lift => {
            let (q, qmeta) = lemma2_poset(g("k"), g("m"))?;
            let copies = if g("copies") == 0 { default_copies(1, 1, g("k")) } else { g("copies") };
            stack_copies(&q, copies, Some(&qmeta))?
        }
        _ => return Ok(None),
    };
    Ok(Some((Arc::new(built.0), built.1)))
}

fn t5_instance(cell: &BTreeMap<String, usize>, seed: u64) -> Result<Arc<Poset>, HarnessError> {
    let get = |k| cell_get(Scenario::T5, cell, k);
    let (w, n) = (get("w").max(1), get("n"));
    let n = GameRng::seed_from_u64(seed).gen_range(w..=n.max(w));
    random_width_poset(w, n, seed)
        .map(Arc::new)
        .map_err(|e| HarnessError::Spec(e.to_string()))
}

fn identity_unit(n_max: usize, seed: u64) -> Unit {
    let mut rng = GameRng::seed_from_u64(seed);
    let n = rng.gen_range(1..=n_max.max(1));
    let p = random_poset(n, rng.gen_range(0.1..0.7), seed);
    let budget = Budget::default();
    let mode = crate::game::Mode::Standard;
    let w = width(&p).width;
    let mut checks = Vec::new();
    let mut run = || -> Result<(), crate::solver::SolveError> {
        checks.push(("chig(1,0)", game_chromatic_value(&p, 1, 0, mode, &budget)?.value, w));
        checks.push(("grg(1,0)", grundy_game_value(&p, 1, 0, mode, &budget)?.value, w));
        let gamma = grundy_number(&p, 10_000_000);
        checks.push(("grg(0,1)", grundy_game_value(&p, 0, 1, mode, &budget)?.value, gamma.value));
        checks.push(("colg(1,0)", marking_game_value(&p, 1, 0, mode, &budget)?.value, coloring_number(&p).value));
        Ok(())
    };
    let mut unit = match run() {
        Err(e) => Unit::fail(e.to_string()),
        Ok(()) => {
            let bad: Vec<String> = checks
                .iter()
                .filter(|(_, got, want)| got != want)
                .map(|(name, got, want)| format!("{name} = {got}, expected {want}"))
                .collect();
            Unit::pass(vec![("checks", Stat::Sum(checks.len() as u64)), ("max_n", Stat::Max(n as u64))])
                .check(bad.is_empty(), || bad.join("; "))
        }
    };
    if !unit.ok {
        unit.poset = Some(p);
    }
    unit
}

fn fence_unit(m: usize, copies: usize, orders: usize, seed: u64) -> Result<Unit, HarnessError> {
    let (q, qmeta) = lemma2_poset(2, m)?;
    let (p, _) = stack_copies(&q, copies, Some(&qmeta))?;
    let fence = fence_r();
    let embedded = contains_induced(&p, &fence);
    let mut rng = GameRng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..p.len()).collect();
    let mut best = 0;
    for _ in 0..orders {
        order.shuffle(&mut rng);
        best = best.max(first_fit_max(&p, &order));
    }
    Ok(Unit::pass(vec![
        ("points", Stat::Max(p.len() as u64)),
        ("max_first_fit", Stat::Max(best as u64)),
    ])
    .check(embedded.is_none(), || format!("fence embeds at {embedded:?}")))
}

fn first_fit_max(p: &Poset, order: &[usize]) -> usize {
    let mut color = vec![0usize; p.len()];
    let mut used = vec![usize::MAX; p.len() + 2];
    let mut top = 0;
    for (step, &x) in order.iter().enumerate() {
        for y in p.incomparables(x).iter() {
            used[color[y]] = step;
        }
        let c = (1..).find(|&c| used[c] != step).expect("some color is free");
        color[x] = c;
        top = top.max(c);
    }
    top
}

fn wgame_unit(w: usize, m_max: usize, seed: u64) -> Unit {
    let mut rng = GameRng::seed_from_u64(seed);
    let m = rng.gen_range(1..=m_max.max(1));
    let fam = random_family(m, w, rng.gen_range(0..3 * m), &mut rng);
    let mix = [rng.gen_range(0.0..1.0), rng.gen_range(0.5..3.0), rng.gen_range(0.2..1.0)];
    let state = WGameState::new(m, 1 << (w - 1), Some(&fam));
    let mut painter = RecursivePainter::new(w, m, Some(&fam));
    let bias = if seed % 2 == 0 { 0.6 } else { 0.0 };
    let mut pres = FuzzPresenter::new(mix, 4 * m).with_nest_bias(bias);
    let opts = WGameOptions {
        audit: m <= 24,
        ..Default::default()
    };
    let depth_ok = fam.nested_depth() < w || fam.is_empty();
    match play_wgame(state, &mut pres, &mut painter, &mut rng, &opts) {
        Ok((WWinner::Painter, _)) => {
            let t = painter.telemetry();
            Unit::pass(vec![
                ("sealed", Stat::Sum(t.sealed as u64)),
                ("passed", Stat::Sum(t.passed as u64)),
                ("audited", Stat::Sum((m <= 24) as u64)),
            ])
            .check(depth_ok, || "family exceeds nesting depth".into())
        }
        Ok((winner, _)) => Unit::fail(format!("game ended with {winner:?}")),
        Err(f) => Unit {
            artifact: serde_json::to_value(WGameReproducer::from_failure(w, &fam, &f)).ok(),
            ..Unit::fail(f.error.to_string())
        },
    }
}

fn growth_unit(target: usize, n_max: usize, samples: usize, seed: u64) -> Unit {
    let s = search_width2_grundy(n_max, target, samples, seed);
    let mut stats = vec![
        ("posets_checked", Stat::Sum(s.posets_checked)),
        ("exhaustive_up_to", Stat::Max(s.exhaustive_up_to as u64)),
    ];
    if let Some(f) = &s.found {
        stats.push(("found_n", Stat::Max(f.n as u64)));
        stats.push(("found_gamma", Stat::Max(f.gamma as u64)));
    }
    if let Some(h) = &s.heuristic_best {
        stats.push(("heuristic_gamma", Stat::Max(h.gamma as u64)));
        stats.push(("heuristic_n", Stat::Max(h.n as u64)));
    }
    let decided = s.found.is_some() || s.proven_absent;
    let mut u = Unit::pass(stats).check(decided, || "search ended without a verdict".into());
    u.artifact = serde_json::to_value(&s.found).ok();
    u
}

/// Runs one unit of a scenario grid cell from scratch.
pub(crate) fn run_unit(
    scenario: Scenario,
    cell: &BTreeMap<String, usize>,
    opponent: Option<&str>,
    seed: u64,
) -> Result<Unit, HarnessError> {
    let g = |k| cell_get(scenario, cell, k);
    match scenario {
        Scenario::Lemma2 | Scenario::Lemma4 | Scenario::Lift | Scenario::T5 => {
            let opp = opponent.ok_or_else(|| HarnessError::Spec(format!("{scenario} needs an opponent")))?;
            let (poset, meta) = match cell_instance(scenario, cell)? {
                Some((p, m)) => (p, Some(m)),
                None => (t5_instance(cell, seed)?, None),
            };
            strategy_game(strategy_of(scenario), &poset, meta.as_ref(), opp, seed)
        }
        Scenario::IdentitySuite => Ok(identity_unit(g("n_max"), seed)),
        Scenario::T6Fence => fence_unit(g("m"), g("copies"), g("orders"), seed),
        Scenario::WgameFuzz => Ok(wgame_unit(g("w").max(1), g("m_max"), seed)),
        Scenario::GrundyGrowth => Ok(growth_unit(g("target"), g("n_max"), g("samples"), seed)),
    }
}

fn strategy_of(s: Scenario) -> Strategy {
    match s {
        Scenario::Lemma2 => Strategy::Lemma2,
        Scenario::Lemma4 => Strategy::Lemma4,
        Scenario::Lift => Strategy::Lift,
        _ => Strategy::T5,
    }
}

#[derive(Default)]
struct Tally {
    units: u64,
    failures: u64,
    stats: BTreeMap<String, Value>,
    first_failure: Option<(u64, Unit)>,
}

impl Tally {
    fn add(&mut self, seed: u64, unit: Unit) {
        self.units += 1;
        for (key, stat) in &unit.stats {
            let slot = self.stats.entry(key.to_string()).or_insert(Value::Null);
            match stat {
                Stat::Sum(v) => *slot = json!(slot.as_u64().unwrap_or(0) + v),
                Stat::Max(v) => *slot = json!(slot.as_u64().unwrap_or(0).max(*v)),
                Stat::Tally(label) => {
                    if !slot.is_object() {
                        *slot = json!({});
                    }
                    let n = slot[label].as_u64().unwrap_or(0);
                    slot[label] = json!(n + 1);
                }
            }
        }
        if !unit.ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some((seed, unit));
            }
        }
    }
}

fn record(
    scenario: Scenario,
    cell: &BTreeMap<String, usize>,
    opponent: Option<&str>,
    seeds: SeedBlock,
    tally: Tally,
    hash: &str,
    start: Instant,
    strategy: Option<(Strategy, Option<&Poset>, Option<&ConstructionMeta>)>,
) -> VerificationRecord {
    let reproducer = tally.first_failure.map(|(seed, u)| {
        let (strategy, poset, meta) = match strategy {
            Some((s, p, m)) => (Some(s), p.cloned().or(u.poset.clone()), m.cloned()),
            None => (None, u.poset.clone(), None),
        };
        Reproducer {
            scenario,
            cell: cell.clone(),
            opponent: opponent.map(String::from),
            seed,
            error: u.error,
            strategy,
            poset,
            meta,
            transcript: u.transcript,
            artifact: u.artifact,
        }
    });
    VerificationRecord {
        scenario,
        cell: cell.clone(),
        opponent: opponent.map(String::from),
        seeds,
        verdict: if tally.failures == 0 { Verdict::Pass } else { Verdict::Fail },
        units: tally.units,
        failures: tally.failures,
        stats: tally.stats,
        reproducer,
        reproducer_path: None,
        spec_hash: hash.to_string(),
        wall_ms: start.elapsed().as_millis() as u64,
    }
}

pub(crate) fn run_cell(
    scenario: Scenario,
    cell: &BTreeMap<String, usize>,
    opponent: Option<&str>,
    seeds: SeedBlock,
    hash: &str,
) -> Result<VerificationRecord, HarnessError> {
    let start = Instant::now();
    let mut tally = Tally::default();
    match cell_instance(scenario, cell)? {
        Some((poset, meta)) => {
            let strategy = strategy_of(scenario);
            let opp = opponent.expect("validated: strategy scenarios have opponents");
            for seed in seeds.seeds() {
                tally.add(seed, strategy_game(strategy, &poset, Some(&meta), opp, seed)?);
            }
            let s = Some((strategy, Some(poset.as_ref()), Some(&meta)));
            Ok(record(scenario, cell, opponent, seeds, tally, hash, start, s))
        }
        None if scenario == Scenario::T5 => {
            let opp = opponent.expect("validated: strategy scenarios have opponents");
            let mut failing: Option<Arc<Poset>> = None;
            for seed in seeds.seeds() {
                let poset = t5_instance(cell, seed)?;
                let unit = strategy_game(Strategy::T5, &poset, None, opp, seed)?;
                if !unit.ok && failing.is_none() {
                    failing = Some(poset);
                }
                tally.add(seed, unit);
            }
            let s = Some((Strategy::T5, failing.as_deref(), None));
            Ok(record(scenario, cell, opponent, seeds, tally, hash, start, s))
        }
        None => {
            for seed in seeds.seeds() {
                tally.add(seed, run_unit(scenario, cell, opponent, seed)?);
            }
            Ok(record(scenario, cell, opponent, seeds, tally, hash, start, None))
        }
    }
}

/// Plays `strategy` on one instance against every opponent for every seed.
/// The instance must carry the metadata the strategy needs (none for t5).
pub fn verify_strategy(
    strategy: Strategy,
    poset: Arc<Poset>,
    meta: Option<&ConstructionMeta>,
    opponents: &[String],
    seeds: SeedBlock,
) -> Result<VerificationRecord, HarnessError> {
    let start = Instant::now();
    let mut tally = Tally::default();
    let mut failing_opp = None;
    for opp in opponents {
        for seed in seeds.seeds() {
            let unit = strategy_game(strategy, &poset, meta, opp, seed)?;
            if !unit.ok && failing_opp.is_none() {
                failing_opp = Some(opp.clone());
            }
            tally.add(seed, unit);
        }
    }
    let mut cell = BTreeMap::from([("n".to_string(), poset.len())]);
    if let Some(m) = meta {
        let p = &m.params;
        for (key, v) in [("k", p.k), ("m", p.m), ("a", p.a), ("w", p.w), ("copies", p.copies)] {
            if let Some(v) = v {
                cell.insert(key.to_string(), v);
            }
        }
    }
    let label = opponents.join(",");
    let mut rec = record(
        strategy.scenario(),
        &cell,
        Some(&label),
        seeds,
        tally,
        "",
        start,
        Some((strategy, Some(poset.as_ref()), meta)),
    );
    if let (Some(rep), Some(opp)) = (rec.reproducer.as_mut(), failing_opp) {
        rep.opponent = Some(opp);
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verify_rejects_mismatched_metadata() {
        let (p, meta) = lemma2_poset(2, 8).unwrap();
        let r = verify_strategy(Strategy::Lemma4, Arc::new(p), Some(&meta), &["random".into()], SeedBlock { start: 0, count: 1 });
        assert!(matches!(r, Err(HarnessError::MetaMismatch(_))));
    }

    #[test]
    fn verify_lemma2_and_t5() {
        let (p, meta) = lemma2_poset(2, 16).unwrap();
        let seeds = SeedBlock { start: 0, count: 5 };
        let opps: Vec<String> = ["random", "greedy", "region-adversary"].map(String::from).to_vec();
        let r = verify_strategy(Strategy::Lemma2, Arc::new(p.clone()), Some(&meta), &opps, seeds).unwrap();
        assert_eq!((r.verdict, r.units), (Verdict::Pass, 15));
        let opps: Vec<String> = ["random", "lookahead2"].map(String::from).to_vec();
        let r = verify_strategy(Strategy::T5, Arc::new(p), None, &opps, seeds).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn first_fit_max_matches_solver_helper() {
        let p = random_poset(12, 0.3, 3);
        let order: Vec<usize> = (0..12).rev().collect();
        let colors = crate::solver::grundy_number(&p, 1000);
        assert!(first_fit_max(&p, &order) <= colors.value);
        assert_eq!(first_fit_max(&p, &colors.order), colors.value);
    }

    #[test]
    fn fence_and_wgame_units_pass() {
        assert!(fence_unit(8, 3, 50, 0).unwrap().ok);
        for seed in 0..20 {
            assert!(wgame_unit(3, 20, seed).ok);
        }
    }

    #[test]
    fn identity_units_pass() {
        for seed in 0..10 {
            let u = identity_unit(7, seed);
            assert!(u.ok, "{}", u.error);
        }
    }
}
