//! Agents: the baseline opponent suite plus the scripted constructive
//! strategies.

mod adversary;
mod baseline;
mod lift;
mod region;
mod t5;

pub use adversary::RegionAdversary;
pub use baseline::{evaluate, DangerAgent, GreedyAgent, MinimaxAgent, RandomAgent, StdinAgent};
pub use lift::{default_copies, gamma_prefix, AgentFactory, GammaOrderBob, LiftBob, LiftTelemetry};
pub use region::{RegionBob, RegionTelemetry};
pub use t5::{ChainAliceTelemetry, ChainPartitionAlice};
