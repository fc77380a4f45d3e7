use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{clip_norm, goal_direction};
use crate::sim::WorldAgent;
use crate::Vec2;

const COINCIDENT: f64 = 1e-9;

/// Social-force constants. Pedestrians and the robot base policy each get
/// their own block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SfmParams {
    /// Relaxation time τ of the goal-driving term (s).
    pub relax_time: f64,
    /// Repulsion strength A (m/s²).
    pub rep_strength: f64,
    /// Repulsion range B (m).
    pub rep_range: f64,
    /// Contact (body) force gain; 0 disables it.
    pub body_force: f64,
    /// Neighbors farther than this (center distance, m) are ignored.
    pub neighbor_cutoff: f64,
    /// Within this distance of the goal the driving direction is zero.
    pub arrival_radius: f64,
}

impl Default for SfmParams {
    fn default() -> Self {
        Self {
            relax_time: 0.5,
            rep_strength: 2.0,
            rep_range: 0.35,
            body_force: 0.0,
            neighbor_cutoff: 5.0,
            arrival_radius: 0.3,
        }
    }
}

impl SfmParams {
    /// Parameters of the robot's base controller: a wider repulsion range
    /// than the pedestrian defaults.
    pub fn robot_base() -> Self {
        Self {
            rep_range: 0.7,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.relax_time > 0.0) {
            return Err(format!("relax_time must be positive, got {}", self.relax_time));
        }
        if !(self.rep_strength >= 0.0) {
            return Err(format!("rep_strength must be non-negative, got {}", self.rep_strength));
        }
        if !(self.rep_range > 0.0) {
            return Err(format!("rep_range must be positive, got {}", self.rep_range));
        }
        Ok(())
    }
}

/// Social-force acceleration acting on `me` (world frame).
pub fn sfm_accel(
    me: &WorldAgent,
    neighbors: &[WorldAgent],
    params: &SfmParams,
    rng: &mut ChaCha8Rng,
) -> Vec2 {
    let drive = goal_direction(me, params.arrival_radius) * me.pref_speed;
    let mut accel = (drive - me.velocity) / params.relax_time;
    for other in neighbors {
        let offset = me.position - other.position;
        let dist = offset.norm();
        if dist > params.neighbor_cutoff {
            continue;
        }
        let radii = me.radius + other.radius;
        let normal = if dist < COINCIDENT {
            let angle = rng.random::<f64>() * std::f64::consts::TAU;
            Vec2::new(angle.cos(), angle.sin())
        } else {
            offset / dist
        };
        let dist = dist.max(0.0);
        accel += normal * (params.rep_strength * ((radii - dist) / params.rep_range).exp());
        if params.body_force > 0.0 && dist < radii {
            accel += normal * (params.body_force * (radii - dist));
        }
    }
    accel
}

/// One explicit Euler step of the social force, clipped to the preferred speed.
pub fn sfm_policy(
    me: &WorldAgent,
    neighbors: &[WorldAgent],
    params: &SfmParams,
    dt: f64,
    rng: &mut ChaCha8Rng,
) -> Vec2 {
    let v = me.velocity + sfm_accel(me, neighbors, params, rng) * dt;
    clip_norm(v, me.pref_speed)
}
