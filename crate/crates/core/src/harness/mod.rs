//! Experiment orchestration: scenario grids, strategy verification campaigns,
//! reproducers and reports.
//!
//! An [`ExperimentSpec`] fully determines a run. Grid cells are independent
//! and run on a rayon pool sized by `POSETGAME_WORKERS`; records come back in
//! grid order, so outputs are identical across reruns and worker counts.

mod agents;
mod report;
mod scenarios;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::constructions::ConstructionMeta;
use crate::game::Transcript;
use crate::poset::Poset;

pub use agents::{make_agent, AGENT_NAMES};
pub use report::{export_report, ReportFormat};
pub use scenarios::{verify_strategy, Strategy};

pub const WORKERS_ENV: &str = "POSETGAME_WORKERS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid spec: {0}")]
    Spec(String),
    #[error("instance does not fit the strategy: {0}")]
    MetaMismatch(String),
    #[error("unknown agent {0:?}")]
    UnknownAgent(String),
    #[error("construction: {0}")]
    Construction(#[from] crate::constructions::ConstructionError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    IdentitySuite,
    Lemma2,
    Lemma4,
    Lift,
    T5,
    T6Fence,
    WgameFuzz,
    GrundyGrowth,
}

impl Scenario {
    pub fn id(self) -> &'static str {
        match self {
            Scenario::IdentitySuite => "identity-suite",
            Scenario::Lemma2 => "lemma2",
            Scenario::Lemma4 => "lemma4",
            Scenario::Lift => "lift",
            Scenario::T5 => "t5",
            Scenario::T6Fence => "t6-fence",
            Scenario::WgameFuzz => "wgame-fuzz",
            Scenario::GrundyGrowth => "grundy-growth",
        }
    }

    /// Grid keys the scenario reads, with defaults.
    pub(crate) fn grid_keys(self) -> &'static [(&'static str, usize)] {
        match self {
            Scenario::IdentitySuite => &[("n_max", 9)],
            Scenario::Lemma2 => &[("k", 2), ("m", 0)],
            Scenario::Lemma4 => &[("a", 2), ("w", 3), ("k", 3)],
            Scenario::Lift => &[("k", 2), ("m", 16), ("copies", 0)],
            Scenario::T5 => &[("w", 2), ("n", 30)],
            Scenario::T6Fence => &[("m", 8), ("copies", 3), ("orders", 10_000)],
            Scenario::WgameFuzz => &[("w", 2), ("m_max", 48)],
            Scenario::GrundyGrowth => &[("target", 3), ("n_max", 8), ("samples", 0)],
        }
    }

    /// Whether the scenario plays matches against the opponent list.
    pub(crate) fn uses_opponents(self) -> bool {
        matches!(self, Scenario::Lemma2 | Scenario::Lemma4 | Scenario::Lift | Scenario::T5)
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedBlock {
    pub start: u64,
    pub count: u64,
}

impl SeedBlock {
    pub fn seeds(&self) -> std::ops::Range<u64> {
        self.start..self.start + self.count
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputPaths {
    /// Directory for `records.json` and failure reproducers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub scenario: Scenario,
    /// Parameter grid; the run covers the cartesian product.
    #[serde(default)]
    pub grid: BTreeMap<String, Vec<usize>>,
    pub seeds: SeedBlock,
    /// Agent names for the side opposing the scripted strategy.
    #[serde(default)]
    pub opponents: Vec<String>,
    #[serde(default)]
    pub output: OutputPaths,
}

impl ExperimentSpec {
    pub fn from_json(s: &str) -> Result<Self, HarnessError> {
        let spec: ExperimentSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let keys = self.scenario.grid_keys();
        for (key, values) in &self.grid {
            if !keys.iter().any(|(k, _)| k == key) {
                return Err(HarnessError::Spec(format!("{} has no grid key {key:?}", self.scenario)));
            }
            if values.is_empty() {
                return Err(HarnessError::Spec(format!("grid key {key:?} is empty")));
            }
        }
        if self.seeds.count == 0 {
            return Err(HarnessError::Spec("seed block is empty".into()));
        }
        if self.scenario.uses_opponents() {
            if self.opponents.is_empty() {
                return Err(HarnessError::Spec(format!("{} needs opponents", self.scenario)));
            }
            for o in &self.opponents {
                if !AGENT_NAMES.contains(&o.as_str()) {
                    return Err(HarnessError::UnknownAgent(o.clone()));
                }
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("spec serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    /// Grid cells in lexicographic key order, defaults filled in.
    pub fn cells(&self) -> Vec<BTreeMap<String, usize>> {
        let mut cells = vec![BTreeMap::new()];
        for &(key, default) in self.scenario.grid_keys() {
            let values = self.grid.get(key).cloned().unwrap_or_else(|| vec![default]);
            cells = cells
                .into_iter()
                .flat_map(|c| {
                    values.iter().map(move |&v| {
                        let mut c = c.clone();
                        c.insert(key.to_string(), v);
                        c
                    })
                })
                .collect();
        }
        cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Enough to rerun one failing game or instance standalone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reproducer {
    pub scenario: Scenario,
    pub cell: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opponent: Option<String>,
    pub seed: u64,
    pub error: String,
    /// Set for strategy matches, which rerun on the stored instance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Strategy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poset: Option<Poset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<ConstructionMeta>,
    /// Transcript of the failing match, when there was one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript: Option<Transcript>,
    /// Further artifacts, e.g. a Presenter/Painter action log.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub artifact: Option<serde_json::Value>,
}

impl Reproducer {
    /// Reruns the failing unit; `Ok(Verdict::Fail)` means the failure reproduced.
    pub fn replay(&self) -> Result<Verdict, HarnessError> {
        let unit = match (self.strategy, &self.poset, &self.opponent) {
            (Some(strategy), Some(poset), Some(opp)) => {
                scenarios::strategy_game(strategy, &std::sync::Arc::new(poset.clone()), self.meta.as_ref(), opp, self.seed)?
            }
            _ => scenarios::run_unit(self.scenario, &self.cell, self.opponent.as_deref(), self.seed)?,
        };
        Ok(if unit.ok { Verdict::Pass } else { Verdict::Fail })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub scenario: Scenario,
    pub cell: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opponent: Option<String>,
    pub seeds: SeedBlock,
    pub verdict: Verdict,
    pub units: u64,
    pub failures: u64,
    /// Scenario-specific aggregates (telemetry, bounds, counts).
    pub stats: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reproducer: Option<Reproducer>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reproducer_path: Option<PathBuf>,
    pub spec_hash: String,
    pub wall_ms: u64,
}

/// Worker count from `POSETGAME_WORKERS`, else rayon's default.
pub fn workers() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok().and_then(|s| s.parse().ok()).filter(|&n| n > 0)
}

/// Runs every grid cell (× opponent) and writes outputs when the spec names
/// a directory. Failures are records, not errors.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<VerificationRecord>, HarnessError> {
    spec.validate()?;
    let hash = spec.hash();
    let opponents: Vec<Option<String>> = if spec.scenario.uses_opponents() {
        spec.opponents.iter().cloned().map(Some).collect()
    } else {
        vec![None]
    };
    let jobs: Vec<(BTreeMap<String, usize>, Option<String>)> = spec
        .cells()
        .into_iter()
        .flat_map(|c| opponents.iter().map(move |o| (c.clone(), o.clone())))
        .collect();
    let run = || -> Result<Vec<VerificationRecord>, HarnessError> {
        jobs.par_iter()
            .map(|(cell, opp)| scenarios::run_cell(spec.scenario, cell, opp.as_deref(), spec.seeds, &hash))
            .collect()
    };
    let mut records = match workers() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::Spec(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    if let Some(dir) = &spec.output.dir {
        write_outputs(dir, &mut records)?;
    }
    Ok(records)
}

fn write_outputs(dir: &Path, records: &mut [VerificationRecord]) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir)?;
    for (i, r) in records.iter_mut().enumerate() {
        if let Some(rep) = &r.reproducer {
            let repro_dir = dir.join("repro");
            std::fs::create_dir_all(&repro_dir)?;
            let path = repro_dir.join(format!("{}-{i:03}.json", r.scenario));
            std::fs::write(&path, serde_json::to_string_pretty(rep)?)?;
            r.reproducer_path = Some(path);
        }
    }
    std::fs::write(dir.join("records.json"), serde_json::to_string_pretty(records)?)?;
    Ok(())
}

/// 0 when every record passed, 1 otherwise.
pub fn exit_code(records: &[VerificationRecord]) -> i32 {
    if records.iter().all(|r| r.verdict == Verdict::Pass) {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(json: &str) -> ExperimentSpec {
        ExperimentSpec::from_json(json).unwrap()
    }

    #[test]
    fn shipped_specs_load() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("experiments");
        let mut seen = 0;
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            let s = ExperimentSpec::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert!(!s.cells().is_empty(), "{}", path.display());
            seen += 1;
        }
        assert_eq!(seen, 8);
    }

    #[test]
    fn cells_cover_the_grid() {
        let s = spec(r#"{"name":"x","scenario":"lemma2","grid":{"k":[1,2,3]},"seeds":{"start":0,"count":2},"opponents":["random"]}"#);
        let cells = s.cells();
        assert_eq!(cells.len(), 3);
        assert_eq!(cells[2]["k"], 3);
        assert_eq!(cells[0]["m"], 0);
    }

    #[test]
    fn validation_rejects_bad_specs() {
        let bad = [
            r#"{"name":"x","scenario":"lemma2","grid":{"q":[1]},"seeds":{"start":0,"count":1},"opponents":["random"]}"#,
            r#"{"name":"x","scenario":"lemma2","seeds":{"start":0,"count":1},"opponents":[]}"#,
            r#"{"name":"x","scenario":"lemma2","seeds":{"start":0,"count":1},"opponents":["nobody"]}"#,
            r#"{"name":"x","scenario":"t5","seeds":{"start":0,"count":0},"opponents":["random"]}"#,
        ];
        for b in bad {
            assert!(ExperimentSpec::from_json(b).is_err(), "{b}");
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let s = spec(r#"{"name":"x","scenario":"lemma2","grid":{"k":[1,2]},"seeds":{"start":0,"count":3},"opponents":["random","greedy"]}"#);
        let a = run_experiment(&s).unwrap();
        let b = run_experiment(&s).unwrap();
        assert_eq!(a.len(), 4);
        assert!(a.iter().all(|r| r.verdict == Verdict::Pass));
        let strip = |rs: &[VerificationRecord]| export_report(rs, ReportFormat::Json, false).unwrap();
        assert_eq!(strip(&a), strip(&b));
        assert_eq!(exit_code(&a), 0);
    }

    #[test]
    fn failures_carry_replayable_reproducers() {
        // too short a base chain for three colors: Bob runs out of room
        let s = spec(r#"{"name":"x","scenario":"lemma2","grid":{"k":[3],"m":[2]},"seeds":{"start":0,"count":3},"opponents":["greedy"]}"#);
        let r = run_experiment(&s).unwrap();
        assert_eq!(r[0].verdict, Verdict::Fail);
        let rep = r[0].reproducer.as_ref().expect("failures carry reproducers");
        assert_eq!(rep.replay().unwrap(), Verdict::Fail);
        assert_eq!(exit_code(&r), 1);
    }

    #[test]
    fn outputs_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = spec(r#"{"name":"x","scenario":"grundy-growth","grid":{"target":[3]},"seeds":{"start":0,"count":1}}"#);
        s.output.dir = Some(dir.path().to_path_buf());
        let r = run_experiment(&s).unwrap();
        assert_eq!(r[0].verdict, Verdict::Pass);
        assert!(dir.path().join("records.json").exists());
    }
}
