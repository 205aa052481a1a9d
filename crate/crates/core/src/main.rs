use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use posetgame::constructions::{
    fence_r, lemma2_default_m, lemma2_poset, lemma4_default_sizing, lemma4_poset, stack_copies, ConstructionMeta,
};
use posetgame::game::{play_match, GameConfig, MatchOptions, Mode};
use posetgame::harness::{
    exit_code, export_report, make_agent, run_experiment, ExperimentSpec, ReportFormat, VerificationRecord,
};
use posetgame::poset::{random_poset, random_width_poset, Poset};
use posetgame::solver::{solve, Budget, Param};

#[derive(Parser)]
#[command(
    name = "posetgame",
    version,
    about = "Coloring, Grundy and marking games on posets",
    after_help = "Experiment cells run in parallel; POSETGAME_WORKERS caps the worker threads."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance (poset plus construction metadata) as JSON.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        #[arg(long, short, global = true)]
        out: Option<PathBuf>,
    },
    /// Play one match and print its transcript as JSON lines.
    Play {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "greedy")]
        alice: String,
        #[arg(long, default_value = "greedy")]
        bob: String,
        #[arg(long, value_enum, default_value = "coloring")]
        variant: VariantArg,
        #[arg(long, default_value_t = 1)]
        a: usize,
        #[arg(long, default_value_t = 1)]
        b: usize,
        /// Palette size (coloring game only).
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_enum, default_value = "standard")]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// End the match once some point can never be colored.
        #[arg(long)]
        stop_when_stranded: bool,
    },
    /// Compute a parameter exactly and print a JSON report.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        param: Param,
        #[arg(long, default_value_t = 1)]
        a: usize,
        #[arg(long, default_value_t = 0)]
        b: usize,
        #[arg(long, value_enum, default_value = "standard")]
        mode: ModeArg,
        /// Largest poset the game solvers accept.
        #[arg(long, default_value_t = 10)]
        budget: usize,
        #[arg(long, default_value_t = 20_000_000)]
        max_nodes: u64,
    },
    /// Fuzz the recursive Painter against random Presenters.
    FuzzWgame {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        w: Vec<usize>,
        #[arg(long, default_value_t = 250)]
        games: u64,
        #[arg(long, default_value_t = 48)]
        m_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run an experiment spec; exit 0 if every cell passes, 1 otherwise.
    Verify {
        spec: PathBuf,
        /// Output directory, overriding the spec's.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "markdown")]
        format: FormatArg,
    },
    /// Render saved records.
    Report {
        records: PathBuf,
        #[arg(long, value_enum, default_value = "markdown")]
        format: FormatArg,
        /// Include wall times (makes output run-dependent).
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Subcommand)]
enum GenKind {
    Lemma2 {
        #[arg(long)]
        k: usize,
        /// Base chain length; defaults to 2^(k+2).
        #[arg(long)]
        m: Option<usize>,
    },
    Lemma4 {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        w: usize,
        #[arg(long)]
        k: usize,
        /// Side-chain sizes; default sizing when omitted.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Stack copies of an instance, each copy above the previous one.
    Stack {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        copies: usize,
    },
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    RandomWidth {
        #[arg(long)]
        w: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Fence,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Coloring,
    Grundy,
    Marking,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Standard,
    Auxiliary,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Standard => Mode::Standard,
            ModeArg::Auxiliary => Mode::Auxiliary,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Markdown,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> ReportFormat {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Markdown => ReportFormat::Markdown,
        }
    }
}

/// Instance file: a poset and, for constructions, its metadata.
#[derive(Serialize, Deserialize)]
struct Instance {
    poset: Poset,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<ConstructionMeta>,
}

type Res<T> = Result<T, Box<dyn std::error::Error>>;

fn load_instance(path: &PathBuf) -> Res<Instance> {
    let text = std::fs::read_to_string(path)?;
    // a bare poset file is accepted too
    match serde_json::from_str::<Instance>(&text) {
        Ok(i) => Ok(i),
        Err(_) => Ok(Instance {
            poset: Poset::from_json(&text)?,
            meta: None,
        }),
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Res<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn generate(kind: GenKind) -> Res<Instance> {
    let (poset, meta) = match kind {
        GenKind::Lemma2 { k, m } => {
            let (p, meta) = lemma2_poset(k, m.unwrap_or_else(|| lemma2_default_m(k)))?;
            (p, Some(meta))
        }
        GenKind::Lemma4 { a, w, k, sizes, m } => {
            let (ds, dm) = lemma4_default_sizing(a, w, k);
            let sizes = if sizes.is_empty() { ds } else { sizes };
            let (p, meta) = lemma4_poset(a, w, k, &sizes, m.unwrap_or(dm))?;
            (p, Some(meta))
        }
        GenKind::Stack { instance, copies } => {
            let i = load_instance(&instance)?;
            let (p, meta) = stack_copies(&i.poset, copies, i.meta.as_ref())?;
            (p, Some(meta))
        }
        GenKind::Random { n, density, seed } => (random_poset(n, density, seed), None),
        GenKind::RandomWidth { w, n, seed } => (random_width_poset(w, n, seed)?, None),
        GenKind::Fence => (fence_r(), None),
    };
    Ok(Instance { poset, meta })
}

fn print_records(records: &[VerificationRecord], format: ReportFormat) -> Res<()> {
    emit(None, &export_report(records, format, false)?)
}

fn run(cmd: Cmd) -> Res<i32> {
    match cmd {
        Cmd::Gen { kind, out } => {
            let inst = generate(kind)?;
            emit(out.as_ref(), &(serde_json::to_string(&inst)? + "\n"))?;
        }
        Cmd::Play {
            instance,
            alice,
            bob,
            variant,
            a,
            b,
            k,
            mode,
            seed,
            stop_when_stranded,
        } => {
            let inst = load_instance(&instance)?;
            let mut cfg = match variant {
                VariantArg::Coloring => GameConfig::coloring(a, b, k),
                VariantArg::Grundy => GameConfig::grundy(a, b),
                VariantArg::Marking => GameConfig::marking(a, b),
            };
            cfg.mode = mode.into();
            let mut alice = make_agent(&alice, &inst.poset, inst.meta.as_ref())?;
            let mut bob = make_agent(&bob, &inst.poset, inst.meta.as_ref())?;
            let opts = MatchOptions {
                stop_when_stranded,
                ..Default::default()
            };
            let poset = Arc::new(inst.poset);
            match play_match(poset, cfg, alice.as_mut(), bob.as_mut(), seed, &opts) {
                Ok(t) => t.write_jsonl(BufWriter::new(std::io::stdout()))?,
                Err(e) => {
                    e.partial.write_jsonl(BufWriter::new(std::io::stdout()))?;
                    eprintln!("match aborted: {}", e.kind);
                    return Ok(1);
                }
            }
        }
        Cmd::Solve {
            instance,
            param,
            a,
            b,
            mode,
            budget,
            max_nodes,
        } => {
            let inst = load_instance(&instance)?;
            let budget = Budget {
                max_nodes,
                ..Budget::points(budget)
            };
            let report = solve(&inst.poset, param, a, b, mode.into(), &budget)?;
            emit(None, &(serde_json::to_string_pretty(&report)? + "\n"))?;
        }
        Cmd::FuzzWgame { w, games, m_max, seed } => {
            let spec = ExperimentSpec::from_json(&serde_json::json!({
                "name": "fuzz-wgame",
                "scenario": "wgame-fuzz",
                "grid": { "w": w, "m_max": [m_max] },
                "seeds": { "start": seed, "count": games },
            }).to_string())?;
            let records = run_experiment(&spec)?;
            print_records(&records, ReportFormat::Markdown)?;
            return Ok(exit_code(&records));
        }
        Cmd::Verify { spec, out, format } => {
            let mut spec = ExperimentSpec::load(&spec)?;
            if out.is_some() {
                spec.output.dir = out;
            }
            let records = run_experiment(&spec)?;
            print_records(&records, format.into())?;
            return Ok(exit_code(&records));
        }
        Cmd::Report { records, format, timing } => {
            let records: Vec<VerificationRecord> = serde_json::from_str(&std::fs::read_to_string(records)?)?;
            emit(None, &export_report(&records, format.into(), timing)?)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
