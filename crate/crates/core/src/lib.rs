//! Sequential FIFO routing games.
//!
//! Agents travel a digraph whose edges are unit-capacity FIFO queues: every
//! round each non-empty queue lets its front agent out, and that agent picks
//! her next edge. This crate simulates these dynamics under three
//! tie-breaking rules, solves best-response, winning-strategy and subgame
//! perfect equilibrium problems on them, and compiles SAT/QBF formulas into
//! games whose solutions encode the formula's truth.

pub mod engine;
pub mod error;
pub mod fixtures;
pub mod formula;
pub mod gadgets;
pub mod io;
pub mod model;
pub mod solvers;

pub use error::{FrogError, Result};
pub use model::{
    Agent, AgentId, Configuration, Delay, DelayVector, Digraph, EdgeIdx, Instance, Path, PathProfile,
    RuleKind, SearchBudget, SourceRank, TieRule, VertexId,
};
