//! Pedestrian controllers.
//!
//! Both controllers read only the pre-step state, so every agent in a step
//! can be evaluated independently.

mod orca;
mod sfm;

pub use orca::{orca_constraint, orca_velocity, HalfPlane, OrcaParams};
pub use sfm::{sfm_accel, sfm_policy, SfmParams};

use rand_chacha::ChaCha8Rng;

use crate::sim::WorldAgent;
use crate::Vec2;

/// Controller used to move the crowd.
#[derive(Clone, Debug, PartialEq)]
pub enum CrowdModel {
    Sfm(SfmParams),
    Orca(OrcaParams),
}

impl CrowdModel {
    /// Next world-frame velocity of `me`.
    pub fn velocity(
        &self,
        me: &WorldAgent,
        neighbors: &[WorldAgent],
        dt: f64,
        rng: &mut ChaCha8Rng,
    ) -> Vec2 {
        match self {
            CrowdModel::Sfm(p) => sfm_policy(me, neighbors, p, dt, rng),
            CrowdModel::Orca(p) => orca_velocity(me, neighbors, p, dt),
        }
    }
}

/// Unit vector toward the goal, or zero once within `arrival_radius`.
pub(crate) fn goal_direction(me: &WorldAgent, arrival_radius: f64) -> Vec2 {
    let to_goal = me.goal - me.position;
    let dist = to_goal.norm();
    if dist <= arrival_radius || dist == 0.0 {
        Vec2::zeros()
    } else {
        to_goal / dist
    }
}

pub(crate) fn clip_norm(v: Vec2, max: f64) -> Vec2 {
    let n = v.norm();
    if n > max {
        v * (max / n)
    } else {
        v
    }
}
