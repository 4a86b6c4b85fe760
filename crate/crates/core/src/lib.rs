//! Neuroevolution of two-behavior locomotion policies.
//!
//! A single feedforward policy receives a behavior cue in its input and is
//! trained with a mirrored-sampling evolution strategy to produce one of two
//! behaviors on demand. Optional neuro-regulation gates half of the hidden
//! layer with the other half. The crate provides:
//!
//! * [`policy`]: standard and gated networks and their flat genome,
//! * [`es`]: the evolution strategy (sampling, rank shaping, Adam update),
//! * [`env`]: deterministic hopper and walker surrogates,
//! * [`eval`]: rollouts and the naive / two-episode / paired-behavior
//!   evaluation strategies,
//! * [`specialization`]: gate-usage specialization reports,
//! * [`harness`]: replicated experiments, CSV output, summaries and replay.

pub mod env;
pub mod error;
pub mod es;
pub mod eval;
pub mod harness;
pub mod params_file;
pub mod policy;
pub mod rng;
pub mod specialization;

pub use error::{Error, Result};
