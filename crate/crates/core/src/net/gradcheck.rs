//! Central finite-difference oracle for parameter gradients.

use super::HasParams;

/// Default perturbation for 64-bit checks.
pub const FD_STEP: f64 = 1e-5;

/// Relative error with an absolute floor so tiny gradients compare sanely.
pub fn relative_error(analytic: f64, numeric: f64, floor: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor)
}

/// Central differences of `loss` w.r.t. every scalar parameter of `model`,
/// returned per tensor in registration order. Parameters are restored.
pub fn numeric_gradient<M: HasParams>(model: &mut M, loss: impl Fn(&M) -> f64, h: f64) -> Vec<Vec<f64>> {
    let shapes: Vec<usize> = model.params().iter().map(|p| p.value.len()).collect();
    let mut out = Vec::with_capacity(shapes.len());
    for (t, len) in shapes.into_iter().enumerate() {
        let mut g = vec![0.0; len];
        for (i, slot) in g.iter_mut().enumerate() {
            *slot = numeric_partial(model, &loss, t, i, h);
        }
        out.push(g);
    }
    out
}

/// Central difference for one scalar (tensor `tensor`, flat index `index`).
pub fn numeric_partial<M: HasParams>(model: &mut M, loss: &impl Fn(&M) -> f64, tensor: usize, index: usize, h: f64) -> f64 {
    let orig = model.params().iter().nth(tensor).expect("tensor index").value[index];
    set(model, tensor, index, orig + h);
    let plus = loss(model);
    set(model, tensor, index, orig - h);
    let minus = loss(model);
    set(model, tensor, index, orig);
    (plus - minus) / (2.0 * h)
}

fn set<M: HasParams>(model: &mut M, tensor: usize, index: usize, v: f64) {
    model.params_mut().iter_mut().nth(tensor).expect("tensor index").value[index] = v;
}

/// Worst relative error between stored analytic gradients and the oracle.
pub fn max_relative_error<M: HasParams>(model: &M, numeric: &[Vec<f64>], floor: f64) -> (f64, String) {
    let mut worst = (0.0, String::new());
    for (p, num) in model.params().iter().zip(numeric) {
        for (i, (a, n)) in p.grad.iter().zip(num).enumerate() {
            let e = relative_error(*a, *n, floor);
            if e > worst.0 {
                worst = (e, format!("{}[{i}]: analytic {a:e} numeric {n:e}", p.name));
            }
        }
    }
    worst
}
