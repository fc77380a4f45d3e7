use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::params::{ParamId, ParamTree};

/// Norm below which penultimate normalization divides by this constant instead.
pub const NORM_EPS: f64 = 1e-8;

/// `ψ / ‖ψ‖₂`, with the norm floored at [`NORM_EPS`].
pub fn penultimate_normalize(feat: &[f64]) -> Vec<f64> {
    let n = l2(feat).max(NORM_EPS);
    feat.iter().map(|x| x / n).collect()
}

pub(crate) fn l2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Gradient of [`penultimate_normalize`] given the upstream gradient.
pub(crate) fn normalize_backward(normed: &[f64], norm: f64, d_normed: &[f64], d_in: &mut [f64]) {
    if norm >= NORM_EPS {
        let proj: f64 = normed.iter().zip(d_normed).map(|(a, b)| a * b).sum();
        for ((d, g), y) in d_in.iter_mut().zip(d_normed).zip(normed) {
            *d = (g - y * proj) / norm;
        }
    } else {
        for (d, g) in d_in.iter_mut().zip(d_normed) {
            *d = g / NORM_EPS;
        }
    }
}

/// Uniform(−1/√fan_in, 1/√fan_in).
pub(crate) fn fan_in_uniform(n: usize, fan_in: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let bound = 1.0 / (fan_in as f64).sqrt();
    (0..n).map(|_| rng.random_range(-bound..bound)).collect()
}

/// Dense affine layer `y = W x + b`, `W` stored row-major as `[out, inp]`.
#[derive(Clone, Debug)]
pub(crate) struct Linear {
    pub w: ParamId,
    pub b: ParamId,
    pub inp: usize,
    pub out: usize,
}

impl Linear {
    pub fn new(params: &mut ParamTree, name: &str, inp: usize, out: usize, rng: Option<&mut ChaCha8Rng>) -> Self {
        let (w, b) = match rng {
            Some(rng) => (
                fan_in_uniform(out * inp, inp, rng),
                fan_in_uniform(out, inp, rng),
            ),
            None => (vec![0.0; out * inp], vec![0.0; out]),
        };
        Self {
            w: params.add(format!("{name}.weight"), vec![out, inp], w),
            b: params.add(format!("{name}.bias"), vec![out], b),
            inp,
            out,
        }
    }

    pub fn forward(&self, params: &ParamTree, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.inp);
        let w = params.value(self.w);
        let b = params.value(self.b);
        for (o, yo) in y.iter_mut().enumerate() {
            let row = &w[o * self.inp..(o + 1) * self.inp];
            *yo = b[o] + dot(row, x);
        }
    }

    /// Accumulates `dW += dy xᵀ`, `db += dy`; writes `dx = Wᵀ dy` when asked.
    pub fn backward(&self, params: &mut ParamTree, x: &[f64], dy: &[f64], dx: Option<&mut [f64]>) {
        {
            let bias = params.get_mut(self.b);
            for (g, d) in bias.grad.iter_mut().zip(dy) {
                *g += d;
            }
        }
        let wp = params.get_mut(self.w);
        for (o, &d) in dy.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            let grow = &mut wp.grad[o * self.inp..(o + 1) * self.inp];
            for (g, xi) in grow.iter_mut().zip(x) {
                *g += d * xi;
            }
        }
        if let Some(dx) = dx {
            transpose_mul(&wp.value, self.inp, dy, dx);
        }
    }

    /// `dx = Wᵀ dy` without touching gradient slots.
    pub fn input_grad(&self, params: &ParamTree, dy: &[f64], dx: &mut [f64]) {
        transpose_mul(params.value(self.w), self.inp, dy, dx);
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `dx = Wᵀ dy` for row-major `W` with `cols` columns.
pub(crate) fn transpose_mul(w: &[f64], cols: usize, dy: &[f64], dx: &mut [f64]) {
    dx.iter_mut().for_each(|v| *v = 0.0);
    for (o, &d) in dy.iter().enumerate() {
        if d == 0.0 {
            continue;
        }
        let row = &w[o * cols..(o + 1) * cols];
        for (v, wi) in dx.iter_mut().zip(row) {
            *v += d * wi;
        }
    }
}
