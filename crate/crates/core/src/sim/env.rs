use std::f64::consts::{FRAC_PI_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::frame::{to_robot_frame, ObservationFrame, RobotFrame};
use super::reward::shaped_reward;
use crate::peds::CrowdModel;
use crate::Vec2;

/// Collision checks per step are taken at `dt / SWEEP_SUBSTEPS` intervals.
pub const SWEEP_SUBSTEPS: usize = 4;
const PLACEMENT_ATTEMPTS: usize = 100;
const SPEED_SLACK: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("invalid environment config: {field} {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("could not place agent {agent} after {attempts} attempts; circle too small for the crowd")]
    Placement { agent: usize, attempts: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PedModel {
    Sfm,
    Orca,
}

impl std::str::FromStr for PedModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sfm" => Ok(PedModel::Sfm),
            "orca" => Ok(PedModel::Orca),
            other => Err(format!("unknown pedestrian model `{other}` (expected sfm or orca)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    pub n_humans: usize,
    pub circle_radius: f64,
    pub dt: f64,
    pub time_limit: f64,
    pub robot_radius: f64,
    pub human_radius: f64,
    pub discomfort_dist: f64,
    pub goal_tolerance: f64,
    pub ped_model: PedModel,
    pub position_jitter: f64,
    /// Preferred (and maximum) speed of every agent.
    pub pref_speed: f64,
    pub pedestrians_see_robot: bool,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            n_humans: 5,
            circle_radius: 4.0,
            dt: 0.25,
            time_limit: 30.0,
            robot_radius: 0.3,
            human_radius: 0.3,
            discomfort_dist: 0.2,
            goal_tolerance: 0.3,
            ped_model: PedModel::Sfm,
            position_jitter: 0.5,
            pref_speed: 1.0,
            pedestrians_see_robot: true,
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        fn positive(field: &'static str, v: f64) -> Result<(), SimError> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(SimError::InvalidConfig {
                    field,
                    reason: format!("must be positive, got {v}"),
                })
            }
        }
        fn non_negative(field: &'static str, v: f64) -> Result<(), SimError> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(SimError::InvalidConfig {
                    field,
                    reason: format!("must be non-negative, got {v}"),
                })
            }
        }
        positive("dt", self.dt)?;
        positive("time_limit", self.time_limit)?;
        positive("circle_radius", self.circle_radius)?;
        positive("robot_radius", self.robot_radius)?;
        positive("human_radius", self.human_radius)?;
        positive("pref_speed", self.pref_speed)?;
        non_negative("discomfort_dist", self.discomfort_dist)?;
        non_negative("goal_tolerance", self.goal_tolerance)?;
        non_negative("position_jitter", self.position_jitter)?;
        Ok(())
    }

    /// Upper bound on the number of steps in one episode.
    pub fn max_steps(&self) -> usize {
        (self.time_limit / self.dt).ceil() as usize
    }
}

/// One disc-shaped agent in world coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorldAgent {
    pub position: Vec2,
    pub velocity: Vec2,
    pub goal: Vec2,
    pub radius: f64,
    pub pref_speed: f64,
}

impl WorldAgent {
    fn at_rest(position: Vec2, goal: Vec2, radius: f64, pref_speed: f64) -> Self {
        Self {
            position,
            velocity: Vec2::zeros(),
            goal,
            radius,
            pref_speed,
        }
    }

    /// Center distance minus both radii; negative when overlapping.
    pub fn surface_distance(&self, other: &WorldAgent) -> f64 {
        (self.position - other.position).norm() - self.radius - other.radius
    }
}

/// How an episode step ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Terminal {
    None,
    Success,
    Collision,
    Timeout,
}

impl Terminal {
    pub fn is_done(self) -> bool {
        self != Terminal::None
    }

    /// Time-limit endings are truncations; they keep bootstrapping.
    pub fn is_truncation(self) -> bool {
        self == Terminal::Timeout
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Terminal::None => "none",
            Terminal::Success => "success",
            Terminal::Collision => "collision",
            Terminal::Timeout => "timeout",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepResult {
    pub obs: ObservationFrame,
    pub reward: f64,
    pub terminal: Terminal,
    /// Swept minimum robot–pedestrian surface distance (`+inf` with no crowd).
    pub min_separation: f64,
}

/// Full simulator state. Cloning yields an independent copy, random streams included.
#[derive(Clone, Debug)]
pub struct EnvState {
    pub robot: WorldAgent,
    pub humans: Vec<WorldAgent>,
    pub sim_time: f64,
    pub step_count: usize,
    rng: ChaCha8Rng,
    /// One stream per agent, index 0 is the robot.
    agent_rngs: Vec<ChaCha8Rng>,
}

impl PartialEq for EnvState {
    fn eq(&self, other: &Self) -> bool {
        self.robot == other.robot
            && self.humans == other.humans
            && self.sim_time.to_bits() == other.sim_time.to_bits()
            && self.step_count == other.step_count
            && self.rng == other.rng
            && self.agent_rngs == other.agent_rngs
    }
}

impl EnvState {
    /// Places the robot at the bottom of the circle and the crowd at random
    /// jittered angles, every agent aimed at its antipode.
    pub fn reset(config: &EnvConfig, seed: u64) -> Result<(Self, ObservationFrame), SimError> {
        config.validate()?;
        let r = config.circle_radius;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let robot = WorldAgent::at_rest(
            Vec2::new(0.0, -r),
            Vec2::new(0.0, r),
            config.robot_radius,
            config.pref_speed,
        );
        debug_assert!((robot.position.y - r * (-FRAC_PI_2).sin()).abs() < 1e-12);

        let mut humans: Vec<WorldAgent> = Vec::with_capacity(config.n_humans);
        for i in 0..config.n_humans {
            let mut placed = None;
            for _ in 0..PLACEMENT_ATTEMPTS {
                let angle = rng.random::<f64>() * TAU;
                let jitter = Vec2::new(
                    rng.random_range(-1.0..=1.0),
                    rng.random_range(-1.0..=1.0),
                ) * config.position_jitter;
                let pos = Vec2::new(r * angle.cos(), r * angle.sin()) + jitter;
                let goal = -pos;
                let clear = |other: &WorldAgent| {
                    let min_gap = config.human_radius + other.radius + config.discomfort_dist;
                    (pos - other.position).norm() > min_gap && (goal - other.goal).norm() > min_gap
                };
                if clear(&robot) && humans.iter().all(clear) {
                    placed = Some(WorldAgent::at_rest(
                        pos,
                        goal,
                        config.human_radius,
                        config.pref_speed,
                    ));
                    break;
                }
            }
            match placed {
                Some(h) => humans.push(h),
                None => {
                    return Err(SimError::Placement {
                        agent: i + 1,
                        attempts: PLACEMENT_ATTEMPTS,
                    })
                }
            }
        }

        let agent_rngs = (0..=config.n_humans)
            .map(|i| {
                let mut s = ChaCha8Rng::seed_from_u64(seed);
                s.set_stream(1 + i as u64);
                s
            })
            .collect();
        let obs = to_robot_frame(&robot, &humans);
        Ok((
            Self {
                robot,
                humans,
                sim_time: 0.0,
                step_count: 0,
                rng,
                agent_rngs,
            },
            obs,
        ))
    }

    pub fn observe(&self) -> ObservationFrame {
        to_robot_frame(&self.robot, &self.humans)
    }

    pub fn robot_frame(&self) -> RobotFrame {
        RobotFrame::of(&self.robot)
    }

    /// Random stream owned by the robot (used by the base policy).
    pub fn robot_rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.agent_rngs[0]
    }

    /// Shared environment stream; placement draws come from here.
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Neighbor list seen by pedestrian `i`.
    pub fn neighbors_of_human(&self, i: usize, include_robot: bool) -> Vec<WorldAgent> {
        let mut out: Vec<WorldAgent> = self
            .humans
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, h)| *h)
            .collect();
        if include_robot {
            out.push(self.robot);
        }
        out
    }

    fn crowd_velocities(&mut self, config: &EnvConfig, peds: &CrowdModel) -> Vec<Vec2> {
        (0..self.humans.len())
            .map(|i| {
                let neighbors = self.neighbors_of_human(i, config.pedestrians_see_robot);
                let me = self.humans[i];
                peds.velocity(&me, &neighbors, config.dt, &mut self.agent_rngs[i + 1])
            })
            .collect()
    }

    fn advance_crowd(&mut self, config: &EnvConfig, velocities: &[Vec2]) {
        for (h, v) in self.humans.iter_mut().zip(velocities) {
            h.velocity = *v;
            h.position += v * config.dt;
            if (h.position - h.goal).norm() <= config.goal_tolerance {
                h.goal = -h.goal;
            }
        }
    }

    /// Advances every agent by one `dt`. `robot_action` is in the robot's
    /// body frame and must already respect the robot's speed limit.
    pub fn step(
        &mut self,
        config: &EnvConfig,
        robot_action: Vec2,
        peds: &CrowdModel,
    ) -> StepResult {
        debug_assert!(robot_action.norm() <= self.robot.pref_speed + SPEED_SLACK);
        let dt = config.dt;
        let robot_vel = self.robot_frame().vector_to_world(&robot_action);
        let crowd_vel = self.crowd_velocities(config, peds);

        let mut min_sep = f64::INFINITY;
        for (h, v) in self.humans.iter().zip(&crowd_vel) {
            let gap = h.position - self.robot.position;
            let closing = (v - robot_vel) * dt;
            let radii = self.robot.radius + h.radius;
            for k in 1..=SWEEP_SUBSTEPS {
                let s = k as f64 / SWEEP_SUBSTEPS as f64;
                min_sep = min_sep.min((gap + closing * s).norm() - radii);
            }
        }

        self.robot.velocity = robot_vel;
        self.robot.position += robot_vel * dt;
        self.advance_crowd(config, &crowd_vel);
        self.step_count += 1;
        self.sim_time = self.step_count as f64 * dt;

        let reached = (self.robot.position - self.robot.goal).norm() <= config.goal_tolerance;
        let terminal = if min_sep < 0.0 {
            Terminal::Collision
        } else if reached {
            Terminal::Success
        } else if self.sim_time >= config.time_limit {
            Terminal::Timeout
        } else {
            Terminal::None
        };
        StepResult {
            obs: self.observe(),
            reward: shaped_reward(min_sep, reached, config.discomfort_dist),
            terminal,
            min_separation: min_sep,
        }
    }

    /// Moves the crowd alone (the robot is ignored and stays put). Returns the
    /// swept minimum pairwise surface distance among pedestrians.
    pub fn step_crowd(&mut self, config: &EnvConfig, peds: &CrowdModel) -> f64 {
        let cfg = EnvConfig {
            pedestrians_see_robot: false,
            ..config.clone()
        };
        let vel = self.crowd_velocities(&cfg, peds);
        let mut min_sep = f64::INFINITY;
        for i in 0..self.humans.len() {
            for j in (i + 1)..self.humans.len() {
                let (a, b) = (&self.humans[i], &self.humans[j]);
                let gap = b.position - a.position;
                let closing = (vel[j] - vel[i]) * cfg.dt;
                for k in 1..=SWEEP_SUBSTEPS {
                    let s = k as f64 / SWEEP_SUBSTEPS as f64;
                    min_sep = min_sep.min((gap + closing * s).norm() - a.radius - b.radius);
                }
            }
        }
        self.advance_crowd(&cfg, &vel);
        self.step_count += 1;
        self.sim_time = self.step_count as f64 * cfg.dt;
        min_sep
    }
}
