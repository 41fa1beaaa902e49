//! Fairness-aware boosting under multiple protected attributes.
//!
//! The crate trains an ensemble of decision stumps whose distribution update
//! is boosted by per-instance discrimination costs, records a three-objective
//! trace (0-1 loss, balanced loss, multi-max mistreatment) for every partial
//! ensemble, and selects a final model from the Pareto front of that trace by
//! pseudo-weight distance to a user preference vector.
//!
//! Everything here is pure computation over in-memory data and builds without
//! `std` (an allocator is required). File formats, ingestion and the command
//! line live in the companion `mfpb` crate.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod boost;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod metrics;
pub mod pareto;
pub mod stump;

mod math;

pub use boost::{BoostConfig, Ensemble, Member, Mode, ObjectiveSplit, TrainingTrace};
pub use dataset::{Dataset, GroupCounts, Label, ProtectedAttribute, Split};
pub use error::{Error, Result};
pub use eval::EvalReport;
pub use metrics::{AttributeFairness, FairnessReport, GroupRates, SolutionVector};
pub use pareto::{FrontEntry, ParetoFront, PreferenceVector};
pub use stump::Stump;
