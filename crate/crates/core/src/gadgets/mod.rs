//! Gadgets and formula reductions.
//!
//! Every reduction produces a game with one or two strategic agents and a
//! crowd of scripted agents whose paths are fixed. The central gadget, the
//! loosener, watches whether a strategic agent is on a given edge at a given
//! round and, if so, frees up later edges one round earlier.

mod blueprint;
mod builder;
mod loosener;
mod reduce;
mod testbed;

pub use blueprint::{ERef, GadgetBlueprint, Role, ScriptedAgent, VRef};
pub use builder::{Built, Draft, GameBuilder};
pub use loosener::{build_loosener, LoosenerSpec};
pub use testbed::{run_loosener, LoosenerRun};
pub use reduce::{
    pad_inapprox, reduce_3sat, reduce_qsat, reduce_qsat_spe_rr, CalibratedRounds, Manifest, ReduceOptions, Reduction,
    Variant,
};
