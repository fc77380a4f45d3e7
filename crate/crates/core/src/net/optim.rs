use serde::{Deserialize, Serialize};

use super::params::ParamTree;

/// Update rule applied to accumulated gradients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum OptimizerConfig {
    Sgd,
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

impl OptimizerConfig {
    /// Adam without first-moment averaging.
    pub const fn adam_no_momentum() -> Self {
        OptimizerConfig::Adam {
            beta1: 0.0,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self::adam_no_momentum()
    }
}

/// Per-parameter optimizer memory. Empty for plain SGD.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OptimizerState {
    pub steps: u64,
    pub first: Vec<Vec<f64>>,
    pub second: Vec<Vec<f64>>,
}

impl OptimizerState {
    pub fn for_params(config: &OptimizerConfig, params: &ParamTree) -> Self {
        match config {
            OptimizerConfig::Sgd => Self::default(),
            OptimizerConfig::Adam { .. } => {
                let zeros: Vec<Vec<f64>> = params.iter().map(|p| vec![0.0; p.value.len()]).collect();
                Self {
                    steps: 0,
                    first: zeros.clone(),
                    second: zeros,
                }
            }
        }
    }

    /// Descends along the stored gradients and zeroes them. Returns `false`
    /// (and leaves values and moments untouched) if any gradient is non-finite.
    pub fn step(&mut self, config: &OptimizerConfig, params: &mut ParamTree, lr: f64) -> bool {
        match *config {
            OptimizerConfig::Sgd => params.sgd_step(lr),
            OptimizerConfig::Adam { beta1, beta2, eps } => {
                if !params.grads_finite() {
                    params.reject_step();
                    return false;
                }
                self.steps += 1;
                let t = self.steps as i32;
                let c1 = 1.0 - beta1.powi(t);
                let c2 = 1.0 - beta2.powi(t);
                for ((p, m), v) in params.iter_mut().zip(&mut self.first).zip(&mut self.second) {
                    for i in 0..p.value.len() {
                        let g = p.grad[i];
                        m[i] = beta1 * m[i] + (1.0 - beta1) * g;
                        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
                        p.value[i] -= lr * (m[i] / c1) / ((v[i] / c2).sqrt() + eps);
                    }
                }
                params.zero_grad();
                true
            }
        }
    }
}
