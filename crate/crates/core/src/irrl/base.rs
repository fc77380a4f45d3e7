use crate::peds::{sfm_policy, SfmParams};
use crate::sim::{EnvConfig, EnvState};
use crate::{Action2, Vec2};

/// Frozen controller whose action the residual policy corrects.
pub trait BasePolicy {
    /// Body-frame action for the robot in the current state. May draw from
    /// the robot's random stream.
    fn act(&self, env: &mut EnvState, config: &EnvConfig) -> Action2;
}

/// The robot driven by the social force model, treating every pedestrian
/// as a neighbor.
#[derive(Clone, Debug, PartialEq)]
pub struct SfmBase {
    pub params: SfmParams,
}

impl BasePolicy for SfmBase {
    fn act(&self, env: &mut EnvState, config: &EnvConfig) -> Action2 {
        let robot = env.robot;
        let frame = env.robot_frame();
        let humans = std::mem::take(&mut env.humans);
        let v = sfm_policy(&robot, &humans, &self.params, config.dt, env.robot_rng());
        env.humans = humans;
        frame.vector_to_body(&v)
    }
}

/// Always zero; the residual alone drives the robot.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ZeroBase;

impl BasePolicy for ZeroBase {
    fn act(&self, _env: &mut EnvState, _config: &EnvConfig) -> Action2 {
        Vec2::zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sfm_base_heads_for_the_goal_from_rest() {
        let cfg = EnvConfig {
            n_humans: 0,
            ..EnvConfig::default()
        };
        let (mut env, _) = EnvState::reset(&cfg, 0).unwrap();
        let base = SfmBase {
            params: SfmParams::default(),
        };
        let a = base.act(&mut env, &cfg);
        // body X points at the goal when the robot is at rest
        assert!(a.x > 0.0);
        assert!(a.y.abs() < 1e-12);
        assert!(a.norm() <= cfg.pref_speed + 1e-12);
    }
}
