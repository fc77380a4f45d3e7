use std::f64::consts::PI;

use super::graph::{GraphNet, NetConfig, NetTape};
use super::{HasParams, NetError, ParamTree};
use crate::sim::ObservationFrame;
use crate::Vec2;

pub const LOG_STD_MIN: f64 = -10.0;
pub const LOG_STD_MAX: f64 = 2.0;
/// Stabilizer inside the tanh log-determinant.
pub const SQUASH_EPS: f64 = 1e-6;

/// One reparameterized draw from the squashed Gaussian policy.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSample {
    /// `residual_bound · tanh(pre_squash)`, body frame.
    pub residual_action: Vec2,
    pub pre_squash: [f64; 2],
    pub log_prob: f64,
    pub mean: [f64; 2],
    pub log_std: [f64; 2],
    pub noise: [f64; 2],
}

#[derive(Clone, Debug)]
pub struct ActorTape {
    net: NetTape,
    sample: GaussianSample,
    raw_log_std: [f64; 2],
}

impl ActorTape {
    pub fn sample(&self) -> &GaussianSample {
        &self.sample
    }

    pub fn net(&self) -> &NetTape {
        &self.net
    }
}

/// Residual policy: crowd graph + base action in, squashed Gaussian out.
#[derive(Clone, Debug)]
pub struct Actor {
    net: GraphNet,
    residual_bound: f64,
}

impl Actor {
    pub fn new(config: &NetConfig, residual_bound: f64, seed: u64) -> Self {
        Self {
            net: GraphNet::new(config, 4, seed),
            residual_bound,
        }
    }

    pub fn residual_bound(&self) -> f64 {
        self.residual_bound
    }

    pub fn net(&self) -> &GraphNet {
        &self.net
    }

    /// Mean and clamped log-std heads, plus the raw log-std.
    fn heads(out: &[f64]) -> ([f64; 2], [f64; 2], [f64; 2]) {
        let mean = [out[0], out[1]];
        let raw = [out[2], out[3]];
        let log_std = [
            raw[0].clamp(LOG_STD_MIN, LOG_STD_MAX),
            raw[1].clamp(LOG_STD_MIN, LOG_STD_MAX),
        ];
        (mean, log_std, raw)
    }

    /// Samples `z = mean + std ⊙ noise` and squashes it. `noise` must be
    /// standard-normal draws supplied by the caller.
    pub fn forward(&self, obs: &ObservationFrame, a_base: Vec2, noise: [f64; 2]) -> (GaussianSample, ActorTape) {
        let tape = self.net.forward(obs, [a_base.x, a_base.y]);
        let (mean, log_std, raw_log_std) = Self::heads(tape.output());
        let b = self.residual_bound;
        let mut z = [0.0; 2];
        let mut action = [0.0; 2];
        let mut log_prob = 0.0;
        for k in 0..2 {
            let std = log_std[k].exp();
            z[k] = mean[k] + std * noise[k];
            let t = z[k].tanh();
            action[k] = b * t;
            let standardized = (z[k] - mean[k]) / std;
            log_prob += -0.5 * standardized * standardized - log_std[k] - 0.5 * (2.0 * PI).ln()
                - (1.0 - t * t + SQUASH_EPS).ln()
                - b.ln();
        }
        let sample = GaussianSample {
            residual_action: Vec2::new(action[0], action[1]),
            pre_squash: z,
            log_prob,
            mean,
            log_std,
            noise,
        };
        (
            sample.clone(),
            ActorTape {
                net: tape,
                sample,
                raw_log_std,
            },
        )
    }

    pub fn sample(&self, obs: &ObservationFrame, a_base: Vec2, noise: [f64; 2]) -> GaussianSample {
        self.forward(obs, a_base, noise).0
    }

    /// Noise-free action `residual_bound · tanh(mean)`.
    pub fn deterministic_action(&self, obs: &ObservationFrame, a_base: Vec2) -> Vec2 {
        let tape = self.net.forward(obs, [a_base.x, a_base.y]);
        let out = tape.output();
        Vec2::new(out[0].tanh(), out[1].tanh()) * self.residual_bound
    }

    /// Backpropagates a loss `L(residual_action, log_prob)` given its partial
    /// derivatives, along the reparameterized path with the noise held fixed.
    pub fn backward(&mut self, tape: &mut ActorTape, d_action: Vec2, d_log_prob: f64) -> Result<(), NetError> {
        let s = &tape.sample;
        let b = self.residual_bound;
        let mut d_out = [0.0; 4];
        for k in 0..2 {
            let t = s.pre_squash[k].tanh();
            let sech2 = 1.0 - t * t;
            let dz = d_action[k] * b * sech2 + d_log_prob * 2.0 * t * sech2 / (sech2 + SQUASH_EPS);
            d_out[k] = dz;
            let raw = tape.raw_log_std[k];
            if (LOG_STD_MIN..=LOG_STD_MAX).contains(&raw) {
                d_out[2 + k] = dz * s.log_std[k].exp() * s.noise[k] - d_log_prob;
            }
        }
        self.net.backward(&mut tape.net, &d_out).map(|_| ())
    }
}

impl HasParams for Actor {
    fn params(&self) -> &ParamTree {
        self.net.params()
    }

    fn params_mut(&mut self) -> &mut ParamTree {
        self.net.params_mut()
    }
}
