use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::layers::{dot, fan_in_uniform, l2, normalize_backward, Linear, NORM_EPS};
use super::params::{ParamId, ParamTree};
use super::{HasParams, NetError};
use crate::sim::{ObservationFrame, HUMAN_FEATURES, ROBOT_FEATURES};

/// Width of the extra 2-vector appended after crowd aggregation
/// (base action for the actor, combined action for the critic).
pub const EXTRA_INPUTS: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetConfig {
    pub embed_dim: usize,
    pub hidden_dim: usize,
    /// Negative slope of the LeakyReLU inside the attention score.
    pub leaky_slope: f64,
}

impl Default for NetConfig {
    fn default() -> Self {
        Self {
            embed_dim: 64,
            hidden_dim: 128,
            leaky_slope: 0.2,
        }
    }
}

/// Output of the crowd aggregation stage.
#[derive(Clone, Debug, PartialEq)]
pub struct CrowdFeatures {
    /// `[robot embedding ‖ attention-pooled value]`.
    pub feature: Vec<f64>,
    /// Attention weights; index 0 is the robot's self-loop.
    pub attention: Vec<f64>,
}

/// Recorded activations of one forward pass.
#[derive(Clone, Debug)]
pub struct NetTape {
    robot_in: [f64; ROBOT_FEATURES],
    robot_pre: Vec<f64>,
    human_in: Vec<[f64; HUMAN_FEATURES]>,
    human_pre: Vec<f64>,
    /// Node embeddings, row 0 is the robot.
    nodes: Vec<f64>,
    scores_pre: Vec<f64>,
    scores_act: Vec<f64>,
    attention: Vec<f64>,
    values: Vec<f64>,
    trunk_in: Vec<f64>,
    hidden_pre: Vec<f64>,
    psi_norm: f64,
    psi_hat: Vec<f64>,
    output: Vec<f64>,
    consumed: bool,
}

impl NetTape {
    pub fn output(&self) -> &[f64] {
        &self.output
    }

    /// Input to the final linear layer (unit norm unless the ε-guard fired).
    pub fn penultimate(&self) -> &[f64] {
        &self.psi_hat
    }

    pub fn attention(&self) -> &[f64] {
        &self.attention
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed
    }

    fn consume(&mut self) -> Result<(), NetError> {
        if self.consumed {
            return Err(NetError::TapeConsumed);
        }
        self.consumed = true;
        Ok(())
    }
}

/// Star-graph attention encoder followed by a normalized MLP head.
///
/// The robot node attends over itself and every pedestrian node with a
/// GATv2 score `aᵀ·LeakyReLU(W·[h_robot ‖ h_j])`; softmax weights pool
/// `W_v·h_j`. The pooled vector, the robot embedding and a 2-vector extra
/// input feed one ReLU hidden layer whose output is L2-normalized before
/// the final linear layer.
#[derive(Clone, Debug)]
pub struct GraphNet {
    config: NetConfig,
    params: ParamTree,
    robot_embed: Linear,
    human_embed: Linear,
    attn_w: ParamId,
    attn_a: ParamId,
    attn_value: ParamId,
    trunk: Linear,
    head: Linear,
}

impl GraphNet {
    /// Hidden layers get fan-in uniform weights; the head starts at zero.
    pub fn new(config: &NetConfig, out_dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = config.embed_dim;
        let mut params = ParamTree::new();
        let robot_embed = Linear::new(&mut params, "robot_embed", ROBOT_FEATURES, d, Some(&mut rng));
        let human_embed = Linear::new(&mut params, "human_embed", HUMAN_FEATURES, d, Some(&mut rng));
        let attn_w = params.add("attention.w", vec![d, 2 * d], fan_in_uniform(2 * d * d, 2 * d, &mut rng));
        let attn_a = params.add("attention.a", vec![d], fan_in_uniform(d, d, &mut rng));
        let attn_value = params.add("attention.value", vec![d, d], fan_in_uniform(d * d, d, &mut rng));
        let trunk = Linear::new(&mut params, "trunk", 2 * d + EXTRA_INPUTS, config.hidden_dim, Some(&mut rng));
        let head = Linear::new(&mut params, "head", config.hidden_dim, out_dim, None);
        Self {
            config: config.clone(),
            params,
            robot_embed,
            human_embed,
            attn_w,
            attn_a,
            attn_value,
            trunk,
            head,
        }
    }

    pub fn config(&self) -> &NetConfig {
        &self.config
    }

    pub fn out_dim(&self) -> usize {
        self.head.out
    }

    fn leaky(&self, x: f64) -> f64 {
        if x > 0.0 {
            x
        } else {
            self.config.leaky_slope * x
        }
    }

    /// Aggregated crowd feature for `obs` (no tape).
    pub fn aggregate_crowd(&self, obs: &ObservationFrame) -> CrowdFeatures {
        let tape = self.forward(obs, [0.0; EXTRA_INPUTS]);
        let d = self.config.embed_dim;
        CrowdFeatures {
            feature: tape.trunk_in[..2 * d].to_vec(),
            attention: tape.attention,
        }
    }

    pub fn forward(&self, obs: &ObservationFrame, extra: [f64; EXTRA_INPUTS]) -> NetTape {
        let d = self.config.embed_dim;
        let n_h = obs.human_feats.len();
        let n_nodes = n_h + 1;
        let p = &self.params;

        let mut robot_pre = vec![0.0; d];
        self.robot_embed.forward(p, &obs.robot_feat, &mut robot_pre);
        let mut nodes = vec![0.0; n_nodes * d];
        for (n, x) in nodes[..d].iter_mut().zip(&robot_pre) {
            *n = x.max(0.0);
        }
        let mut human_pre = vec![0.0; n_h * d];
        for (j, h) in obs.human_feats.iter().enumerate() {
            let pre = &mut human_pre[j * d..(j + 1) * d];
            self.human_embed.forward(p, h, pre);
            for (n, x) in nodes[(j + 1) * d..(j + 2) * d].iter_mut().zip(pre.iter()) {
                *n = x.max(0.0);
            }
        }

        let w = p.value(self.attn_w);
        let a = p.value(self.attn_a);
        let wv = p.value(self.attn_value);
        let h_r = &nodes[..d];
        let src: Vec<f64> = (0..d).map(|i| dot(&w[i * 2 * d..i * 2 * d + d], h_r)).collect();
        let mut scores_pre = vec![0.0; n_nodes * d];
        let mut scores_act = vec![0.0; n_nodes * d];
        let mut logits = vec![0.0; n_nodes];
        let mut values = vec![0.0; n_nodes * d];
        for k in 0..n_nodes {
            let h_k = &nodes[k * d..(k + 1) * d];
            let zk = &mut scores_pre[k * d..(k + 1) * d];
            let gk = &mut scores_act[k * d..(k + 1) * d];
            for i in 0..d {
                zk[i] = src[i] + dot(&w[i * 2 * d + d..(i + 1) * 2 * d], h_k);
                gk[i] = self.leaky(zk[i]);
            }
            logits[k] = dot(a, gk);
            let vk = &mut values[k * d..(k + 1) * d];
            for i in 0..d {
                vk[i] = dot(&wv[i * d..(i + 1) * d], h_k);
            }
        }
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut attention: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = attention.iter().sum();
        attention.iter_mut().for_each(|x| *x /= total);

        let mut trunk_in = vec![0.0; 2 * d + EXTRA_INPUTS];
        trunk_in[..d].copy_from_slice(h_r);
        for (k, alpha) in attention.iter().enumerate() {
            for (t, v) in trunk_in[d..2 * d].iter_mut().zip(&values[k * d..(k + 1) * d]) {
                *t += alpha * v;
            }
        }
        trunk_in[2 * d..].copy_from_slice(&extra);

        let mut hidden_pre = vec![0.0; self.trunk.out];
        self.trunk.forward(p, &trunk_in, &mut hidden_pre);
        let psi: Vec<f64> = hidden_pre.iter().map(|x| x.max(0.0)).collect();
        let psi_norm = l2(&psi);
        let scale = psi_norm.max(NORM_EPS);
        let psi_hat: Vec<f64> = psi.iter().map(|x| x / scale).collect();
        let mut output = vec![0.0; self.head.out];
        self.head.forward(p, &psi_hat, &mut output);

        NetTape {
            robot_in: obs.robot_feat,
            robot_pre,
            human_in: obs.human_feats.clone(),
            human_pre,
            nodes,
            scores_pre,
            scores_act,
            attention,
            values,
            trunk_in,
            hidden_pre,
            psi_norm,
            psi_hat,
            output,
            consumed: false,
        }
    }

    /// Gradient of the trunk input w.r.t. `d_out`, optionally accumulating
    /// head and trunk parameter gradients.
    fn trunk_backward(&mut self, tape: &NetTape, d_out: &[f64], accumulate: bool) -> Vec<f64> {
        let mut d_psi_hat = vec![0.0; self.head.inp];
        if accumulate {
            self.head.backward(&mut self.params, &tape.psi_hat, d_out, Some(&mut d_psi_hat));
        } else {
            self.head.input_grad(&self.params, d_out, &mut d_psi_hat);
        }
        let mut d_hidden = vec![0.0; self.head.inp];
        normalize_backward(&tape.psi_hat, tape.psi_norm, &d_psi_hat, &mut d_hidden);
        for (g, pre) in d_hidden.iter_mut().zip(&tape.hidden_pre) {
            if *pre <= 0.0 {
                *g = 0.0;
            }
        }
        let mut d_trunk_in = vec![0.0; self.trunk.inp];
        if accumulate {
            self.trunk.backward(&mut self.params, &tape.trunk_in, &d_hidden, Some(&mut d_trunk_in));
        } else {
            self.trunk.input_grad(&self.params, &d_hidden, &mut d_trunk_in);
        }
        d_trunk_in
    }

    /// Reverse pass: accumulates `∂(d_out·output)/∂θ` into the gradient slots
    /// and returns the gradient w.r.t. the extra input.
    pub fn backward(&mut self, tape: &mut NetTape, d_out: &[f64]) -> Result<[f64; EXTRA_INPUTS], NetError> {
        self.check(tape, d_out)?;
        let d = self.config.embed_dim;
        let d_trunk_in = self.trunk_backward(tape, d_out, true);
        self.encoder_backward(tape, &d_trunk_in[..d], &d_trunk_in[d..2 * d]);
        Ok([d_trunk_in[2 * d], d_trunk_in[2 * d + 1]])
    }

    /// Gradient w.r.t. the extra input only; parameter gradients are untouched.
    pub fn input_grad(&self, tape: &mut NetTape, d_out: &[f64]) -> Result<[f64; EXTRA_INPUTS], NetError> {
        self.check(tape, d_out)?;
        let mut d_psi_hat = vec![0.0; self.head.inp];
        self.head.input_grad(&self.params, d_out, &mut d_psi_hat);
        let mut d_hidden = vec![0.0; self.head.inp];
        normalize_backward(&tape.psi_hat, tape.psi_norm, &d_psi_hat, &mut d_hidden);
        let w = self.params.value(self.trunk.w);
        let cols = self.trunk.inp;
        let mut out = [0.0; EXTRA_INPUTS];
        for (o, (g, pre)) in d_hidden.iter().zip(&tape.hidden_pre).enumerate() {
            if *pre > 0.0 {
                for (e, slot) in out.iter_mut().enumerate() {
                    *slot += g * w[o * cols + cols - EXTRA_INPUTS + e];
                }
            }
        }
        Ok(out)
    }

    fn check(&self, tape: &mut NetTape, d_out: &[f64]) -> Result<(), NetError> {
        if d_out.len() != self.head.out {
            return Err(NetError::OutputShape {
                expected: self.head.out,
                got: d_out.len(),
            });
        }
        tape.consume()
    }

    fn encoder_backward(&mut self, tape: &NetTape, d_robot: &[f64], d_pooled: &[f64]) {
        let d = self.config.embed_dim;
        let n_nodes = tape.attention.len();
        let slope = self.config.leaky_slope;

        let mut d_nodes = vec![0.0; n_nodes * d];
        d_nodes[..d].copy_from_slice(d_robot);

        // softmax pooling
        let d_alpha: Vec<f64> = (0..n_nodes)
            .map(|k| dot(d_pooled, &tape.values[k * d..(k + 1) * d]))
            .collect();
        let mean: f64 = tape.attention.iter().zip(&d_alpha).map(|(a, g)| a * g).sum();
        let d_logits: Vec<f64> = tape
            .attention
            .iter()
            .zip(&d_alpha)
            .map(|(a, g)| a * (g - mean))
            .collect();

        let mut d_src = vec![0.0; d];
        {
            let a = self.params.value(self.attn_a).to_vec();
            let mut dz = vec![0.0; d];
            let mut d_a = vec![0.0; d];
            let mut d_w_dst = vec![0.0; d * d];
            let w = self.params.value(self.attn_w).to_vec();
            let wv = self.params.value(self.attn_value).to_vec();
            let mut d_wv = vec![0.0; d * d];
            for k in 0..n_nodes {
                let h_k = &tape.nodes[k * d..(k + 1) * d];
                let g_k = &tape.scores_act[k * d..(k + 1) * d];
                let z_k = &tape.scores_pre[k * d..(k + 1) * d];
                let dl = d_logits[k];
                for i in 0..d {
                    d_a[i] += dl * g_k[i];
                    dz[i] = dl * a[i] * if z_k[i] > 0.0 { 1.0 } else { slope };
                    d_src[i] += dz[i];
                }
                let dh_k = &mut d_nodes[k * d..(k + 1) * d];
                for i in 0..d {
                    if dz[i] != 0.0 {
                        let row = &w[i * 2 * d + d..(i + 1) * 2 * d];
                        for c in 0..d {
                            d_w_dst[i * d + c] += dz[i] * h_k[c];
                            dh_k[c] += dz[i] * row[c];
                        }
                    }
                    let dv = tape.attention[k] * d_pooled[i];
                    if dv != 0.0 {
                        let row = &wv[i * d..(i + 1) * d];
                        for c in 0..d {
                            d_wv[i * d + c] += dv * h_k[c];
                            dh_k[c] += dv * row[c];
                        }
                    }
                }
            }
            let h_r = &tape.nodes[..d];
            let mut d_h_r = vec![0.0; d];
            {
                let wp = self.params.get_mut(self.attn_w);
                for i in 0..d {
                    let row = &mut wp.grad[i * 2 * d..(i + 1) * 2 * d];
                    for c in 0..d {
                        row[c] += d_src[i] * h_r[c];
                        row[d + c] += d_w_dst[i * d + c];
                    }
                }
                for i in 0..d {
                    for c in 0..d {
                        d_h_r[c] += d_src[i] * w[i * 2 * d + c];
                    }
                }
            }
            for (g, v) in self.params.get_mut(self.attn_a).grad.iter_mut().zip(&d_a) {
                *g += v;
            }
            for (g, v) in self.params.get_mut(self.attn_value).grad.iter_mut().zip(&d_wv) {
                *g += v;
            }
            for (x, v) in d_nodes[..d].iter_mut().zip(&d_h_r) {
                *x += v;
            }
        }

        // embeddings
        let mut d_pre: Vec<f64> = d_nodes[..d]
            .iter()
            .zip(&tape.robot_pre)
            .map(|(g, p)| if *p > 0.0 { *g } else { 0.0 })
            .collect();
        self.robot_embed.backward(&mut self.params, &tape.robot_in, &d_pre, None);
        for (j, x) in tape.human_in.iter().enumerate() {
            let pre = &tape.human_pre[j * d..(j + 1) * d];
            let dn = &d_nodes[(j + 1) * d..(j + 2) * d];
            for ((o, g), p) in d_pre.iter_mut().zip(dn).zip(pre) {
                *o = if *p > 0.0 { *g } else { 0.0 };
            }
            self.human_embed.backward(&mut self.params, x, &d_pre, None);
        }
    }
}

impl HasParams for GraphNet {
    fn params(&self) -> &ParamTree {
        &self.params
    }

    fn params_mut(&mut self) -> &mut ParamTree {
        &mut self.params
    }
}
