//! Optimal reciprocal collision avoidance for disc agents without obstacles.
//!
//! Constraint construction and the incremental linear programs follow the
//! RVO2 reference formulation.

use serde::{Deserialize, Serialize};

use super::{clip_norm, goal_direction};
use crate::sim::WorldAgent;
use crate::Vec2;

const LP_EPSILON: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrcaParams {
    /// Look-ahead for agent–agent collisions (s).
    pub time_horizon: f64,
    /// Neighbors farther than this (center distance, m) are ignored.
    pub neighbor_dist: f64,
    pub max_speed: f64,
    /// Added to the combined radius when building constraints only.
    pub safety_margin: f64,
    pub arrival_radius: f64,
}

impl Default for OrcaParams {
    fn default() -> Self {
        Self {
            time_horizon: 2.0,
            neighbor_dist: 5.0,
            max_speed: 1.0,
            safety_margin: 0.05,
            arrival_radius: 0.3,
        }
    }
}

impl OrcaParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.time_horizon > 0.0) {
            return Err(format!("time_horizon must be positive, got {}", self.time_horizon));
        }
        if !(self.max_speed > 0.0) {
            return Err(format!("max_speed must be positive, got {}", self.max_speed));
        }
        Ok(())
    }
}

/// Velocities `v` with `det(direction, v - point) <= 0` are permitted
/// (the region to the left of the directed line).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane {
    pub point: Vec2,
    pub direction: Vec2,
}

fn det(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Half-plane of velocities for `me` that avoid `other` over the time
/// horizon, taking half of the avoidance effort.
pub fn orca_constraint(me: &WorldAgent, other: &WorldAgent, params: &OrcaParams, dt: f64) -> HalfPlane {
    let rel_pos = other.position - me.position;
    let rel_vel = me.velocity - other.velocity;
    let dist_sq = rel_pos.norm_squared();
    let radius = me.radius + other.radius + params.safety_margin;
    let radius_sq = radius * radius;

    let (direction, u) = if dist_sq > radius_sq {
        let inv_horizon = 1.0 / params.time_horizon;
        // from cutoff-circle center to relative velocity
        let w = rel_vel - rel_pos * inv_horizon;
        let w_len_sq = w.norm_squared();
        let dot = w.dot(&rel_pos);
        if dot < 0.0 && dot * dot > radius_sq * w_len_sq {
            // project on the cutoff circle
            let w_len = w_len_sq.sqrt();
            let unit_w = w / w_len;
            (
                Vec2::new(unit_w.y, -unit_w.x),
                unit_w * (radius * inv_horizon - w_len),
            )
        } else {
            // project on a leg of the cone
            let leg = (dist_sq - radius_sq).sqrt();
            let direction = if det(&rel_pos, &w) > 0.0 {
                Vec2::new(
                    rel_pos.x * leg - rel_pos.y * radius,
                    rel_pos.x * radius + rel_pos.y * leg,
                ) / dist_sq
            } else {
                -Vec2::new(
                    rel_pos.x * leg + rel_pos.y * radius,
                    -rel_pos.x * radius + rel_pos.y * leg,
                ) / dist_sq
            };
            let u = direction * rel_vel.dot(&direction) - rel_vel;
            (direction, u)
        }
    } else {
        // already overlapping: resolve within one time step
        let inv_step = 1.0 / dt;
        let w = rel_vel - rel_pos * inv_step;
        let w_len = w.norm();
        let unit_w = if w_len > 0.0 { w / w_len } else { Vec2::new(0.0, 1.0) };
        (
            Vec2::new(unit_w.y, -unit_w.x),
            unit_w * (radius * inv_step - w_len),
        )
    };
    HalfPlane {
        point: me.velocity + u * 0.5,
        direction,
    }
}

/// Optimizes along line `line_no` subject to lines `0..line_no` and the speed disc.
fn lp1(lines: &[HalfPlane], line_no: usize, radius: f64, opt: &Vec2, direction_opt: bool) -> Option<Vec2> {
    let line = &lines[line_no];
    let dot = line.point.dot(&line.direction);
    let disc = dot * dot + radius * radius - line.point.norm_squared();
    if disc < 0.0 {
        return None;
    }
    let sqrt_disc = disc.sqrt();
    let mut t_left = -dot - sqrt_disc;
    let mut t_right = -dot + sqrt_disc;
    for other in &lines[..line_no] {
        let denom = det(&line.direction, &other.direction);
        let numer = det(&other.direction, &(line.point - other.point));
        if denom.abs() <= LP_EPSILON {
            if numer < 0.0 {
                return None;
            }
            continue;
        }
        let t = numer / denom;
        if denom >= 0.0 {
            t_right = t_right.min(t);
        } else {
            t_left = t_left.max(t);
        }
        if t_left > t_right {
            return None;
        }
    }
    let t = if direction_opt {
        if opt.dot(&line.direction) > 0.0 {
            t_right
        } else {
            t_left
        }
    } else {
        line.direction.dot(&(opt - line.point)).clamp(t_left, t_right)
    };
    Some(line.point + line.direction * t)
}

/// Returns the index of the first violated line that could not be satisfied
/// (`lines.len()` on success) and the best velocity found.
fn lp2(lines: &[HalfPlane], radius: f64, opt: &Vec2, direction_opt: bool) -> (usize, Vec2) {
    let mut result = if direction_opt {
        opt * radius
    } else {
        clip_norm(*opt, radius)
    };
    for (i, line) in lines.iter().enumerate() {
        if det(&line.direction, &(line.point - result)) > 0.0 {
            match lp1(lines, i, radius, opt, direction_opt) {
                Some(v) => result = v,
                None => return (i, result),
            }
        }
    }
    (lines.len(), result)
}

/// Infeasible fallback: minimizes the largest constraint violation.
fn lp3(lines: &[HalfPlane], begin: usize, radius: f64, mut result: Vec2) -> Vec2 {
    let mut distance = 0.0;
    for i in begin..lines.len() {
        let li = &lines[i];
        if det(&li.direction, &(li.point - result)) <= distance {
            continue;
        }
        let mut projected = Vec::with_capacity(i);
        for lj in &lines[..i] {
            let d = det(&li.direction, &lj.direction);
            let point = if d.abs() <= LP_EPSILON {
                if li.direction.dot(&lj.direction) > 0.0 {
                    continue;
                }
                (li.point + lj.point) * 0.5
            } else {
                li.point + li.direction * (det(&lj.direction, &(li.point - lj.point)) / d)
            };
            let direction = (lj.direction - li.direction).normalize();
            projected.push(HalfPlane { point, direction });
        }
        let opt = Vec2::new(-li.direction.y, li.direction.x);
        let (fail, candidate) = lp2(&projected, radius, &opt, true);
        if fail >= projected.len() {
            result = candidate;
        }
        distance = det(&li.direction, &(li.point - result));
    }
    result
}

/// ORCA velocity for `me`: closest feasible velocity to its preferred one.
pub fn orca_velocity(me: &WorldAgent, neighbors: &[WorldAgent], params: &OrcaParams, dt: f64) -> Vec2 {
    let max_speed = params.max_speed.min(me.pref_speed);
    let preferred = goal_direction(me, params.arrival_radius) * me.pref_speed;
    let lines: Vec<HalfPlane> = neighbors
        .iter()
        .filter(|o| (o.position - me.position).norm() <= params.neighbor_dist)
        .map(|o| orca_constraint(me, o, params, dt))
        .collect();
    let (fail, result) = lp2(&lines, max_speed, &preferred, false);
    let v = if fail < lines.len() {
        lp3(&lines, fail, max_speed, result)
    } else {
        result
    };
    clip_norm(v, max_speed)
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn unconstrained_is_preferred() {
        let me = agent((0.0, 0.0), (0.0, 0.0), (3.0, 4.0));
        let v = orca_velocity(&me, &[], &OrcaParams::default(), 0.25);
        assert!((v - Vec2::new(0.6, 0.8)).norm() < 1e-15);
    }

    #[test]
    fn far_neighbor_is_culled() {
        let me = agent((0.0, 0.0), (0.0, 0.0), (3.0, 4.0));
        let far = agent((0.0, 9.0), (0.0, 0.0), (0.0, 9.0));
        let v = orca_velocity(&me, &[far], &OrcaParams::default(), 0.25);
        assert_eq!(v, Vec2::new(0.6, 0.8));
    }

    #[test]
    fn head_on_pair_is_point_symmetric() {
        let a = agent((-2.0, 0.0), (1.0, 0.0), (4.0, 0.0));
        let b = agent((2.0, 0.0), (-1.0, 0.0), (-4.0, 0.0));
        let p = OrcaParams::default();
        let la = orca_constraint(&a, &b, &p, 0.25);
        let lb = orca_constraint(&b, &a, &p, 0.25);
        assert!((la.point + lb.point).norm() < 1e-12);
        assert!((la.direction + lb.direction).norm() < 1e-12);
        let va = orca_velocity(&a, &[b], &p, 0.25);
        let vb = orca_velocity(&b, &[a], &p, 0.25);
        assert!((va + vb).norm() < 1e-9);
        assert!(va.y.abs() > 1e-3, "agents should side-step");
    }

    #[test]
    fn head_on_pair_never_overlaps() {
        // a perfectly collinear pair deadlocks, so offset it slightly
        let mut a = agent((-4.0, -0.05), (0.0, 0.0), (4.0, -0.05));
        let mut b = agent((4.0, 0.05), (0.0, 0.0), (-4.0, 0.05));
        let p = OrcaParams::default();
        let dt = 0.25;
        for _ in 0..80 {
            let va = orca_velocity(&a, &[b], &p, dt);
            let vb = orca_velocity(&b, &[a], &p, dt);
            assert!((va + vb).norm() < 1e-9);
            for k in 1..=4 {
                let s = k as f64 * dt / 4.0;
                let gap = (b.position + vb * s) - (a.position + va * s);
                assert!(gap.norm() > 0.6);
            }
            a.velocity = va;
            b.velocity = vb;
            a.position += va * dt;
            b.position += vb * dt;
        }
        assert!((a.position - a.goal).norm() < 0.5);
    }

    #[test]
    fn satisfies_constraints_when_feasible() {
        let me = agent((0.0, 0.0), (0.8, 0.0), (5.0, 0.0));
        let others = [
            agent((2.0, 0.5), (-0.5, 0.0), (0.0, 0.0)),
            agent((2.5, -1.5), (-0.2, 0.3), (0.0, 0.0)),
        ];
        let p = OrcaParams::default();
        let lines: Vec<_> = others.iter().map(|o| orca_constraint(&me, o, &p, 0.25)).collect();
        assert_eq!(lp2(&lines, p.max_speed, &Vec2::new(1.0, 0.0), false).0, lines.len());
        let v = orca_velocity(&me, &others, &p, 0.25);
        for o in &others {
            let l = orca_constraint(&me, o, &p, 0.25);
            assert!(det(&l.direction, &(l.point - v)) <= 1e-9);
        }
        assert!(v.norm() <= p.max_speed + 1e-12);
    }

    #[test]
    fn infeasible_falls_back_within_speed() {
        // boxed in on all sides by close, approaching neighbors
        let me = agent((0.0, 0.0), (0.0, 0.0), (5.0, 0.0));
        let others: Vec<_> = (0..6)
            .map(|k| {
                let a = k as f64 * std::f64::consts::TAU / 6.0;
                let p = Vec2::new(a.cos(), a.sin()) * 0.62;
                agent((p.x, p.y), (-p.x, -p.y), (0.0, 0.0))
            })
            .collect();
        let v = orca_velocity(&me, &others, &OrcaParams::default(), 0.25);
        assert!(v.norm() <= 1.0 + 1e-12);
        assert!(v.x.is_finite() && v.y.is_finite());
    }
}
