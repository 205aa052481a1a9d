//! Coloring, Grundy and marking games played directly on finite posets.
//!
//! The crate bundles the order-theoretic substrate ([`poset`]), adversarial
//! instance generators ([`constructions`]), a rule-complete game engine
//! ([`game`]), the Presenter/Painter interval game ([`wgame`]), scripted
//! strategies ([`strategies`]), exact small-instance solvers ([`solver`]) and
//! the experiment harness ([`harness`]).

pub mod bitset;
pub mod constructions;
pub mod game;
pub mod harness;
pub mod poset;
pub mod solver;
pub mod strategies;
pub mod wgame;
