/// Reward for any step where the robot overlaps a pedestrian.
pub const COLLISION_REWARD: f64 = -0.25;
/// Reward for the step on which the goal is reached.
pub const GOAL_REWARD: f64 = 1.0;
/// Surface distance below which proximity is penalized.
pub const DISCOMFORT_DIST: f64 = 0.2;
const DISCOMFORT_SCALE: f64 = 0.125;

/// Step reward from the minimum robot–pedestrian surface distance `d_t`.
///
/// Cases are checked in order, so a collision outranks reaching the goal
/// and discomfort outranks it too.
pub fn reward(d_t: f64, reached_goal: bool) -> f64 {
    shaped_reward(d_t, reached_goal, DISCOMFORT_DIST)
}

/// [`reward`] with a configurable discomfort distance.
pub fn shaped_reward(d_t: f64, reached_goal: bool, discomfort_dist: f64) -> f64 {
    if d_t < 0.0 {
        COLLISION_REWARD
    } else if d_t < discomfort_dist {
        (d_t - discomfort_dist) * DISCOMFORT_SCALE
    } else if reached_goal {
        GOAL_REWARD
    } else {
        0.0
    }
}
