use std::f64::consts::PI;

use nalgebra::Rotation2;

use super::WorldAgent;
use crate::Vec2;

/// Length of the robot feature row `[p_x^g, p_y^g, θ^g, v_x, v_y]`.
pub const ROBOT_FEATURES: usize = 5;
/// Length of a pedestrian feature row `[p_x, p_y, v_x, v_y]`.
pub const HUMAN_FEATURES: usize = 4;

const STILL_SPEED: f64 = 1e-6;

/// Body-fixed frame of the robot: origin at its center, X along its heading.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RobotFrame {
    pub origin: Vec2,
    pub heading: f64,
}

impl RobotFrame {
    /// Heading follows the velocity; a (nearly) stationary robot faces its goal.
    pub fn of(robot: &WorldAgent) -> Self {
        let heading = if robot.velocity.norm() >= STILL_SPEED {
            robot.velocity.y.atan2(robot.velocity.x)
        } else {
            let to_goal = robot.goal - robot.position;
            to_goal.y.atan2(to_goal.x)
        };
        Self {
            origin: robot.position,
            heading,
        }
    }

    fn rotation(&self) -> Rotation2<f64> {
        Rotation2::new(self.heading)
    }

    /// Rotates a world-frame direction into the body frame.
    pub fn vector_to_body(&self, v: &Vec2) -> Vec2 {
        self.rotation().inverse() * v
    }

    /// Rotates a body-frame direction into the world frame.
    pub fn vector_to_world(&self, v: &Vec2) -> Vec2 {
        self.rotation() * v
    }

    pub fn point_to_body(&self, p: &Vec2) -> Vec2 {
        self.vector_to_body(&(p - self.origin))
    }

    pub fn point_to_world(&self, p: &Vec2) -> Vec2 {
        self.vector_to_world(p) + self.origin
    }
}

/// Robot-frame observation fed to the networks.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationFrame {
    pub robot_feat: [f64; ROBOT_FEATURES],
    pub human_feats: Vec<[f64; HUMAN_FEATURES]>,
}

impl ObservationFrame {
    pub fn goal(&self) -> Vec2 {
        Vec2::new(self.robot_feat[0], self.robot_feat[1])
    }

    pub fn goal_bearing(&self) -> f64 {
        self.robot_feat[2]
    }
}

/// Expresses the robot goal and the crowd in the robot's body frame.
///
/// Pedestrian velocities are relative to the robot (`v_human − v_robot`).
pub fn to_robot_frame(robot: &WorldAgent, humans: &[WorldAgent]) -> ObservationFrame {
    let frame = RobotFrame::of(robot);
    let goal = frame.point_to_body(&robot.goal);
    let vel = frame.vector_to_body(&robot.velocity);
    let mut bearing = goal.y.atan2(goal.x);
    if bearing <= -PI {
        bearing = PI;
    }
    let human_feats = humans
        .iter()
        .map(|h| {
            let p = frame.point_to_body(&h.position);
            let v = frame.vector_to_body(&(h.velocity - robot.velocity));
            [p.x, p.y, v.x, v.y]
        })
        .collect();
    ObservationFrame {
        robot_feat: [goal.x, goal.y, bearing, vel.x, vel.y],
        human_feats,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn agent(p: (f64, f64), v: (f64, f64), g: (f64, f64)) -> WorldAgent {
        WorldAgent {
            position: Vec2::new(p.0, p.1),
            velocity: Vec2::new(v.0, v.1),
            goal: Vec2::new(g.0, g.1),
            radius: 0.3,
            pref_speed: 1.0,
        }
    }

    #[test]
    fn identity_frame() {
        let robot = agent((0.0, 0.0), (1.0, 0.0), (5.0, 0.0));
        let human = agent((1.0, 2.0), (1.0, 0.0), (0.0, 0.0));
        let obs = to_robot_frame(&robot, &[human]);
        assert_eq!(obs.human_feats[0], [1.0, 2.0, 0.0, 0.0]);
        assert_eq!(obs.robot_feat, [5.0, 0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn quarter_turn() {
        // moving +Y: body X is world +Y
        let robot = agent((0.0, 0.0), (0.0, 1.0), (0.0, 5.0));
        let obs = to_robot_frame(&robot, &[]);
        assert_abs_diff_eq!(obs.robot_feat[0], 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(obs.robot_feat[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(obs.robot_feat[2], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(obs.robot_feat[3], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(obs.robot_feat[4], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn stationary_robot_faces_goal() {
        let robot = agent((0.0, -4.0), (0.0, 0.0), (0.0, 4.0));
        let obs = to_robot_frame(&robot, &[]);
        assert_abs_diff_eq!(obs.robot_feat[0], 8.0, epsilon = 1e-12);
        assert_abs_diff_eq!(obs.robot_feat[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(obs.goal_bearing(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn bearing_behind_is_plus_pi() {
        let robot = agent((0.0, 0.0), (1.0, 0.0), (-3.0, 0.0));
        let obs = to_robot_frame(&robot, &[]);
        assert_eq!(obs.goal_bearing(), PI);
    }

    proptest! {
        #[test]
        fn round_trip(px in -10.0..10.0f64, py in -10.0..10.0f64,
                      vx in -1.0..1.0f64, vy in -1.0..1.0f64,
                      hx in -10.0..10.0f64, hy in -10.0..10.0f64) {
            let robot = agent((px, py), (vx, vy), (3.0, -2.0));
            let human = agent((hx, hy), (0.0, 0.0), (0.0, 0.0));
            let obs = to_robot_frame(&robot, &[human]);
            let frame = RobotFrame::of(&robot);
            let h = obs.human_feats[0];
            let back = frame.point_to_world(&Vec2::new(h[0], h[1]));
            prop_assert!((back - human.position).norm() < 1e-9);
            let goal = frame.point_to_world(&obs.goal());
            prop_assert!((goal - robot.goal).norm() < 1e-9);
            prop_assert!(obs.goal_bearing() > -PI && obs.goal_bearing() <= PI);
        }
    }
}
