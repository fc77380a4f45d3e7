//! Differentiable actor and critic networks.
//!
//! Every forward pass records a [`NetTape`] of intermediate activations;
//! `backward` walks it in reverse, accumulating exact gradients into the
//! owning [`ParamTree`]. Gradients are checked against central finite
//! differences in [`gradcheck`].

mod actor;
mod critic;
mod graph;
pub mod gradcheck;
mod layers;
mod optim;
mod params;

pub use actor::{Actor, ActorTape, GaussianSample, LOG_STD_MAX, LOG_STD_MIN, SQUASH_EPS};
pub use critic::{Critic, CriticEval};
pub use graph::{CrowdFeatures, GraphNet, NetConfig, NetTape};
pub use layers::{penultimate_normalize, NORM_EPS};
pub use optim::{OptimizerConfig, OptimizerState};
pub use params::{Param, ParamId, ParamTree};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NetError {
    #[error("tape already consumed by a previous backward pass")]
    TapeConsumed,
    #[error("gradient has {got} entries, network output has {expected}")]
    OutputShape { expected: usize, got: usize },
}

/// Anything that owns a parameter tree.
pub trait HasParams {
    fn params(&self) -> &ParamTree;
    fn params_mut(&mut self) -> &mut ParamTree;
}
