//! Circle-crossing navigation world.

mod env;
mod frame;
mod reward;
pub mod trajectory;

pub use env::{
    EnvConfig, EnvState, PedModel, SimError, StepResult, Terminal, WorldAgent, SWEEP_SUBSTEPS,
};
pub use frame::{to_robot_frame, ObservationFrame, RobotFrame, HUMAN_FEATURES, ROBOT_FEATURES};
pub use reward::{reward, shaped_reward, COLLISION_REWARD, DISCOMFORT_DIST, GOAL_REWARD};
