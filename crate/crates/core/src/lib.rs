//! Online learning of time-varying graph topologies from streaming smooth
//! signals, with dynamic priors on how the graph evolves.
//!
//! Each round the learner folds a new pairwise-distance vector into a
//! forgetting-factor aggregate, takes one projected gradient step on the
//! log-degree-barrier smoothness objective, and then applies a dynamic model
//! ([`predictor::Predictor`]) to anticipate the next graph.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod learner;
pub mod metrics;
pub mod objective;
pub mod predictor;
pub mod sim;
pub mod solver;

pub use error::{Error, Result};
pub use graph::{DistanceVector, GraphVector};
pub use learner::{run, Evaluation, LearnerState, RunTrace, StepRule};
pub use objective::ObjectiveParams;
pub use predictor::{PredictionContext, Predictor};
