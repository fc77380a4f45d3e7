//! Incremental residual learning: a single-transition actor–critic that
//! learns a bounded correction on top of a frozen base controller.
//!
//! Each environment step produces one [`Transition`], which
//! [`TrainerState::train_step`] consumes to update the critic (scaled
//! semi-gradient TD), the actor (reparameterized entropy-regularized
//! objective) and the temperature, in that order. Nothing is stored
//! between steps besides the parameters and running statistics.

mod base;
mod compose;
mod episode;
mod stats;
mod trainer;

pub use base::{BasePolicy, SfmBase, ZeroBase};
pub use compose::{compose_action, compose_jacobian};
pub use episode::{evaluate, evaluate_episode, run_episode, Controller, EpisodeOutcome, EvalSummary};
pub use stats::{normalize_update, scale_td_error, OnlineStat, ScaleState, SIGMA_FLOOR};
pub use trainer::{RngState, TrainStepTrace, TrainerConfig, TrainerState, Transition};
