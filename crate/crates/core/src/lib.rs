//! Query-bounded online learning laboratory.
//!
//! The crate is organised around four layers:
//!
//! * [`model`]: instance spaces, concept classes, piecewise-constant streams,
//!   discrete pattern classes and their JSON formats.
//! * [`littlestone`]: Littlestone dimension, shattered trees and the Standard
//!   Optimal Algorithm (SOA).
//! * [`arena`]: the continuous-time game. Exact mistake integrals, the uniform
//!   and adaptive samplers, adversarial stream generators, Monte Carlo harness.
//! * [`blind`]: exact solvers for discrete blind prediction. Blind learning
//!   dimension, query learning distance, a minimax game oracle and the
//!   BP-SOA strategy.
//!
//! The `qstream` binary wraps all of it behind subcommands; see [`cli`].

pub mod arena;
pub mod blind;
pub mod cli;
pub mod error;
pub mod littlestone;
pub mod model;
pub mod rng;

pub use error::{Error, Result};
pub use model::{
    ConceptClass, DiscretePattern, InstanceId, InstanceSpace, Label, LabelVector, PatternClass,
    PiecewiseStream, QueryBudgetPolicy, Segment, Validate, Violation,
};
