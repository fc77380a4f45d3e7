use super::graph::{GraphNet, NetConfig, NetTape};
use super::{HasParams, NetError, ParamTree};
use crate::sim::ObservationFrame;
use crate::Vec2;

/// Q-value with the tape needed to differentiate it.
#[derive(Clone, Debug)]
pub struct CriticEval {
    pub q_value: f64,
    pub tape: NetTape,
}

/// Action-value network over the crowd graph and the combined action.
#[derive(Clone, Debug)]
pub struct Critic {
    net: GraphNet,
}

impl Critic {
    pub fn new(config: &NetConfig, seed: u64) -> Self {
        Self {
            net: GraphNet::new(config, 1, seed),
        }
    }

    pub fn net(&self) -> &GraphNet {
        &self.net
    }

    pub fn forward(&self, obs: &ObservationFrame, u: Vec2) -> CriticEval {
        let tape = self.net.forward(obs, [u.x, u.y]);
        CriticEval {
            q_value: tape.output()[0],
            tape,
        }
    }

    pub fn q(&self, obs: &ObservationFrame, u: Vec2) -> f64 {
        self.forward(obs, u).q_value
    }

    /// Accumulates `dq·∂Q/∂φ` and returns `dq·∂Q/∂u`.
    pub fn backward(&mut self, tape: &mut NetTape, dq: f64) -> Result<Vec2, NetError> {
        self.net.backward(tape, &[dq]).map(|g| Vec2::new(g[0], g[1]))
    }

    /// `dq·∂Q/∂u` with the critic's parameters left untouched.
    pub fn action_grad(&self, tape: &mut NetTape, dq: f64) -> Result<Vec2, NetError> {
        self.net.input_grad(tape, &[dq]).map(|g| Vec2::new(g[0], g[1]))
    }
}

impl HasParams for Critic {
    fn params(&self) -> &ParamTree {
        self.net.params()
    }

    fn params_mut(&mut self) -> &mut ParamTree {
        self.net.params_mut()
    }
}
