use nalgebra::Matrix2;

use crate::{Action2, Vec2};

/// Executed action `a_base + a_res`, rescaled onto the speed limit if it
/// exceeds `v_max`.
pub fn compose_action(a_base: Action2, a_res: Action2, v_max: f64) -> Action2 {
    let u = a_base + a_res;
    let n = u.norm();
    if n > v_max {
        u * (v_max / n)
    } else {
        u
    }
}

/// Jacobian of [`compose_action`] with respect to `a_res`.
pub fn compose_jacobian(a_base: Action2, a_res: Action2, v_max: f64) -> Matrix2<f64> {
    let u = a_base + a_res;
    let n = u.norm();
    if n > v_max {
        let dir: Vec2 = u / n;
        (Matrix2::identity() - dir * dir.transpose()) * (v_max / n)
    } else {
        Matrix2::identity()
    }
}
