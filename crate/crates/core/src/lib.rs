//! Equilibrium solver, auditor and simulator for two-stage, four-player
//! elimination tournaments in which some players ("hawks") may sabotage
//! their rivals and others ("doves") never do.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs. Work that can be spread over threads (the
//! best-response grid oracle and Monte Carlo trials) goes through the
//! [`Executor`] trait so that a std companion can plug in a thread pool
//! without changing any result bit.
//!
//! Module map:
//!
//! * [`primitives`]: effective effort, cost family, contest success functions.
//! * [`stage2`]: closed-form final contest and the payoff menu.
//! * [`stage1`]: semifinal contests with type-dependent continuation values.
//! * [`tournament`]: backward induction over the whole bracket.
//! * [`verify`]: FOC/SOC residuals, corner deviations, grid oracle, existence gate.
//! * [`sim`]: seeded Monte Carlo replay of a solved tournament.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
mod exec;
mod math;
pub mod primitives;
pub mod roots;
pub mod sim;
pub mod stage1;
pub mod stage2;
pub mod tournament;
pub mod verify;

pub use crate::error::{Error, Result};
pub use crate::exec::{Executor, Sequential};
pub use crate::primitives::{CostSpec, CsfSpec, EffortPair};
pub use crate::sim::{SimConfig, SimMode, SimResult};
pub use crate::stage1::{ContinuationValues, HdMatch};
pub use crate::stage2::{Pairing, PayoffMenu, Stage2Solution};
pub use crate::tournament::{
    Bracket, MatchKind, MatchSolution, PlayerType, SolverSettings, SpeSolution, TournamentSpec,
};
pub use crate::verify::{GateResult, VerificationReport};
