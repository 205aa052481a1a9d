//! JSONL transcripts: a header line, one line per move, annotation lines from
//! agent telemetry, and a closing result line.

use std::io::{BufRead, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{GameConfig, GameState, IllegalMove, Move, Outcome, Player};
use crate::poset::Poset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub actor: Player,
    #[serde(rename = "move")]
    pub mv: Move,
    #[serde(rename = "roundNo")]
    pub round: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptHeader {
    pub config: GameConfig,
    pub poset_hash: String,
    pub n: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub alice: String,
    #[serde(default)]
    pub bob: String,
}

/// Agent telemetry attached after move number `after` (0 = before any move).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub after: usize,
    pub actor: Player,
    pub data: serde_json::Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Played until the engine declared the game over.
    Complete,
    /// Stopped early at a stranded point (Bob has already won).
    Stranded,
    /// Aborted by an agent or protocol error.
    Aborted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub header: TranscriptHeader,
    pub moves: Vec<MoveRecord>,
    pub annotations: Vec<Annotation>,
    pub outcome: Outcome,
    pub termination: Termination,
    pub colors_used: usize,
    pub max_back_degree: usize,
}

#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("poset hash mismatch: transcript {expected}, poset {got}")]
    HashMismatch { expected: String, got: String },
    #[error("move {index} rejected on replay: {source}")]
    Illegal { index: usize, source: IllegalMove },
    #[error("replayed outcome {got:?} differs from recorded {expected:?}")]
    OutcomeMismatch { expected: Outcome, got: Outcome },
    #[error("bad config: {0}")]
    Config(#[from] super::ConfigError),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Line {
    Header(TranscriptHeader),
    Move(MoveRecord),
    Note(Annotation),
    Result {
        outcome: Outcome,
        termination: Termination,
        colors_used: usize,
        max_back_degree: usize,
    },
}

impl Transcript {
    pub fn from_state(state: &GameState, header: TranscriptHeader, termination: Termination) -> Self {
        let outcome = match termination {
            Termination::Stranded => state.decided_outcome(),
            _ => state.outcome(),
        };
        Transcript {
            header,
            moves: state.history().to_vec(),
            annotations: Vec::new(),
            outcome,
            termination,
            colors_used: state.colors_used(),
            max_back_degree: state.max_back_degree(),
        }
    }

    /// Replays the moves from the initial state and checks the recorded outcome.
    pub fn replay(&self, poset: Arc<Poset>) -> Result<GameState, TranscriptError> {
        let got = poset.structure_hash();
        if got != self.header.poset_hash {
            return Err(TranscriptError::HashMismatch {
                expected: self.header.poset_hash.clone(),
                got,
            });
        }
        let mut s = GameState::new(poset, self.header.config)?;
        for (index, r) in self.moves.iter().enumerate() {
            s.apply_move(r.actor, r.mv)
                .map_err(|source| TranscriptError::Illegal { index, source })?;
        }
        let got = match self.termination {
            Termination::Stranded => s.decided_outcome(),
            _ => s.outcome(),
        };
        if self.termination != Termination::Aborted && got != self.outcome {
            return Err(TranscriptError::OutcomeMismatch {
                expected: self.outcome,
                got,
            });
        }
        Ok(s)
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut emit = |line: &Line| -> std::io::Result<()> {
            serde_json::to_writer(&mut w, line)?;
            w.write_all(b"\n")
        };
        emit(&Line::Header(self.header.clone()))?;
        let mut notes = self.annotations.iter().peekable();
        for i in 0..=self.moves.len() {
            while let Some(a) = notes.next_if(|a| a.after <= i) {
                emit(&Line::Note(a.clone()))?;
            }
            if let Some(m) = self.moves.get(i) {
                emit(&Line::Move(*m))?;
            }
        }
        for a in notes {
            emit(&Line::Note(a.clone()))?;
        }
        emit(&Line::Result {
            outcome: self.outcome,
            termination: self.termination,
            colors_used: self.colors_used,
            max_back_degree: self.max_back_degree,
        })
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Transcript, TranscriptError> {
        let mut header = None;
        let mut moves = Vec::new();
        let mut annotations = Vec::new();
        let mut result = None;
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: Line = serde_json::from_str(&line).map_err(|e| TranscriptError::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
            match parsed {
                Line::Header(h) => header = Some(h),
                Line::Move(m) => moves.push(m),
                Line::Note(a) => annotations.push(a),
                Line::Result {
                    outcome,
                    termination,
                    colors_used,
                    max_back_degree,
                } => result = Some((outcome, termination, colors_used, max_back_degree)),
            }
        }
        let header = header.ok_or(TranscriptError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let (outcome, termination, colors_used, max_back_degree) =
            result.unwrap_or((Outcome::Ongoing, Termination::Aborted, 0, 0));
        Ok(Transcript {
            header,
            moves,
            annotations,
            outcome,
            termination,
            colors_used,
            max_back_degree,
        })
    }

    pub fn from_jsonl(s: &str) -> Result<Transcript, TranscriptError> {
        Self::read_jsonl(s.as_bytes())
    }
}
