//! Incremental residual reinforcement learning for crowd navigation.
//!
//! The crate bundles everything needed to train and evaluate a residual
//! navigation policy one transition at a time:
//!
//! - [`sim`]: a 2D circle-crossing world with a holonomic robot and a crowd.
//! - [`peds`]: social-force and ORCA pedestrian controllers. The social-force
//!   controller doubles as the robot's frozen base policy.
//! - [`net`]: graph-attention actor and critic networks with hand-written
//!   reverse-mode gradients.
//! - [`irrl`]: the bufferless actor-critic update, TD-error scaling and
//!   action composition.
//! - [`harness`]: run configuration, multi-seed campaigns, metrics,
//!   checkpoints and SVG plots.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory
//! (`cargo run --release --example <name>`).

pub mod harness;
pub mod irrl;
pub mod net;
pub mod peds;
pub mod sim;

/// Planar vector in meters or m/s, depending on context.
pub type Vec2 = nalgebra::Vector2<f64>;

/// Planar velocity command `[v_x, v_y]`.
pub type Action2 = Vec2;
