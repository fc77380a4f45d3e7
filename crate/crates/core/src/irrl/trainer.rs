use std::cell::Cell;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::compose::{compose_action, compose_jacobian};
use super::stats::{scale_td_error, ScaleState};
use crate::net::{Actor, Critic, GaussianSample, HasParams, NetConfig, OptimizerConfig, OptimizerState};
use crate::sim::ObservationFrame;
use crate::{Action2, Vec2};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainerConfig {
    /// Per-step discount.
    pub gamma: f64,
    /// Target policy entropy (nats).
    pub target_entropy: f64,
    pub lr_actor: f64,
    pub lr_critic: f64,
    pub lr_alpha: f64,
    pub init_alpha: f64,
    /// Per-axis bound on the residual action (m/s).
    pub residual_bound: f64,
    /// Speed limit applied to the combined action (m/s).
    pub v_max: f64,
    /// Force the base action to zero (train a policy from scratch).
    pub scratch_mode: bool,
    pub optimizer: OptimizerConfig,
    pub net: NetConfig,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            target_entropy: -6.0,
            lr_actor: 1e-4,
            lr_critic: 1e-3,
            lr_alpha: 1e-4,
            init_alpha: 0.01,
            residual_bound: 0.5,
            v_max: 1.0,
            scratch_mode: false,
            optimizer: OptimizerConfig::default(),
            net: NetConfig::default(),
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(("gamma", format!("must lie in (0, 1), got {}", self.gamma)));
        }
        for (field, lr) in [
            ("lr_actor", self.lr_actor),
            ("lr_critic", self.lr_critic),
            ("lr_alpha", self.lr_alpha),
        ] {
            if !(lr > 0.0) {
                return Err((field, format!("must be positive, got {lr}")));
            }
        }
        if !(self.init_alpha > 0.0) {
            return Err(("init_alpha", format!("must be positive, got {}", self.init_alpha)));
        }
        if !(self.residual_bound > 0.0) {
            return Err(("residual_bound", format!("must be positive, got {}", self.residual_bound)));
        }
        if !(self.v_max > 0.0) {
            return Err(("v_max", format!("must be positive, got {}", self.v_max)));
        }
        if self.net.embed_dim == 0 || self.net.hidden_dim == 0 {
            return Err(("net", "layer widths must be nonzero".into()));
        }
        Ok(())
    }
}

thread_local! {
    static LIVE_TRANSITIONS: Cell<usize> = const { Cell::new(0) };
    static PEAK_TRANSITIONS: Cell<usize> = const { Cell::new(0) };
}

struct AuditToken;

impl AuditToken {
    fn new() -> Self {
        let live = LIVE_TRANSITIONS.with(|c| {
            c.set(c.get() + 1);
            c.get()
        });
        PEAK_TRANSITIONS.with(|p| p.set(p.get().max(live)));
        AuditToken
    }
}

impl Clone for AuditToken {
    fn clone(&self) -> Self {
        Self::new()
    }
}

impl Drop for AuditToken {
    fn drop(&mut self) {
        LIVE_TRANSITIONS.with(|c| c.set(c.get() - 1));
    }
}

/// The single piece of experience the learner ever holds.
#[derive(Clone)]
pub struct Transition {
    pub obs: ObservationFrame,
    pub base_action: Action2,
    /// The residual draw that was actually executed.
    pub sample: GaussianSample,
    pub reward: f64,
    pub next_obs: ObservationFrame,
    /// Base action at `next_obs`, reused as the next executed base action.
    pub next_base_action: Action2,
    /// The episode ended with this transition.
    pub terminal: bool,
    /// The episode ended because of the time limit.
    pub truncated: bool,
    _audit: AuditToken,
}

impl Transition {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        obs: ObservationFrame,
        base_action: Action2,
        sample: GaussianSample,
        reward: f64,
        next_obs: ObservationFrame,
        next_base_action: Action2,
        terminal: bool,
        truncated: bool,
    ) -> Self {
        Self {
            obs,
            base_action,
            sample,
            reward,
            next_obs,
            next_base_action,
            terminal,
            truncated,
            _audit: AuditToken::new(),
        }
    }

    /// Transitions currently alive on this thread.
    pub fn live_count() -> usize {
        LIVE_TRANSITIONS.with(|c| c.get())
    }

    /// Most transitions alive at once on this thread since the last reset.
    pub fn peak_count() -> usize {
        PEAK_TRANSITIONS.with(|c| c.get())
    }

    pub fn reset_peak() {
        PEAK_TRANSITIONS.with(|p| p.set(LIVE_TRANSITIONS.with(|c| c.get())));
    }
}

impl std::fmt::Debug for Transition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transition")
            .field("base_action", &self.base_action)
            .field("residual", &self.sample.residual_action)
            .field("reward", &self.reward)
            .field("terminal", &self.terminal)
            .field("truncated", &self.truncated)
            .finish()
    }
}

/// Diagnostics of one update.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainStepTrace {
    pub delta: f64,
    pub sigma: f64,
    pub actor_loss: f64,
    pub critic_loss: f64,
    pub alpha_loss: f64,
    /// Temperature after the update.
    pub alpha: f64,
    /// Combined action of the transition.
    pub u: Action2,
    /// All three updates were skipped because `delta` was not finite.
    pub skipped: bool,
}

/// Learner state: both networks, temperature, TD-scale statistics, counters
/// and the noise stream.
#[derive(Clone, Debug)]
pub struct TrainerState {
    pub config: TrainerConfig,
    pub actor: Actor,
    pub critic: Critic,
    pub log_alpha: f64,
    pub scale: ScaleState,
    /// Undiscounted return of the episode in progress.
    pub episode_return: f64,
    pub episode_count: u64,
    pub step_count: u64,
    pub skipped_steps: u64,
    pub last_sigma: f64,
    pub actor_optim: OptimizerState,
    pub critic_optim: OptimizerState,
    rng: ChaCha8Rng,
}

/// Serializable position of a ChaCha stream.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RngState {
    pub seed: [u8; 32],
    pub stream: u64,
    pub word_pos: u128,
}

impl RngState {
    pub fn capture(rng: &ChaCha8Rng) -> Self {
        Self {
            seed: rng.get_seed(),
            stream: rng.get_stream(),
            word_pos: rng.get_word_pos(),
        }
    }

    pub fn restore(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(self.word_pos);
        rng
    }
}

impl TrainerState {
    pub fn new(config: TrainerConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let actor = Actor::new(&config.net, config.residual_bound, rng.next_u64());
        let critic = Critic::new(&config.net, rng.next_u64());
        let actor_optim = OptimizerState::for_params(&config.optimizer, actor.params());
        let critic_optim = OptimizerState::for_params(&config.optimizer, critic.params());
        Self {
            log_alpha: config.init_alpha.ln(),
            config,
            actor,
            critic,
            scale: ScaleState::default(),
            episode_return: 0.0,
            episode_count: 0,
            step_count: 0,
            skipped_steps: 0,
            last_sigma: 1.0,
            actor_optim,
            critic_optim,
            rng,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.log_alpha.exp()
    }

    pub fn rng_state(&self) -> RngState {
        RngState::capture(&self.rng)
    }

    pub fn set_rng_state(&mut self, state: &RngState) {
        self.rng = state.restore();
    }

    /// Base action as seen by the learner (zero in scratch mode).
    pub fn effective_base(&self, base: Action2) -> Action2 {
        if self.config.scratch_mode {
            Vec2::zeros()
        } else {
            base
        }
    }

    fn noise(&mut self) -> [f64; 2] {
        [StandardNormal.sample(&mut self.rng), StandardNormal.sample(&mut self.rng)]
    }

    /// Stochastic residual for exploration.
    pub fn sample_residual(&mut self, obs: &ObservationFrame, base: Action2) -> GaussianSample {
        let noise = self.noise();
        self.actor.sample(obs, self.effective_base(base), noise)
    }

    /// Combined action for `residual` on top of `base`.
    pub fn compose(&self, base: Action2, residual: Action2) -> Action2 {
        compose_action(self.effective_base(base), residual, self.config.v_max)
    }

    /// One incremental update from the latest transition, which is consumed.
    pub fn train_step(&mut self, t: Transition) -> TrainStepTrace {
        let gamma = self.config.gamma;
        let v_max = self.config.v_max;
        let base = self.effective_base(t.base_action);
        let next_base = self.effective_base(t.next_base_action);

        self.episode_return += t.reward;
        let (sigma, scale) = if t.terminal {
            scale_td_error(t.reward, 0.0, Some(self.episode_return), self.scale)
        } else {
            scale_td_error(t.reward, gamma, None, self.scale)
        };
        self.scale = scale;
        self.last_sigma = sigma;
        let alpha = self.alpha();

        let noise = self.noise();
        let bootstrap = if t.terminal && !t.truncated {
            0.0
        } else {
            let next = self.actor.sample(&t.next_obs, next_base, noise);
            let u_next = compose_action(next_base, next.residual_action, v_max);
            gamma * (self.critic.q(&t.next_obs, u_next) - alpha * next.log_prob)
        };
        let target = t.reward + bootstrap;
        let u = compose_action(base, t.sample.residual_action, v_max);
        let mut eval = self.critic.forward(&t.obs, u);
        let delta = target - eval.q_value;

        let mut trace = TrainStepTrace {
            delta,
            sigma,
            actor_loss: f64::NAN,
            critic_loss: f64::NAN,
            alpha_loss: f64::NAN,
            alpha,
            u,
            skipped: false,
        };

        // a fresh draw keeps the noise stream aligned whether or not we update
        let actor_noise = self.noise();
        if delta.is_finite() {
            let scaled = delta / sigma;
            trace.critic_loss = -scaled * eval.q_value;
            self.critic
                .backward(&mut eval.tape, -scaled)
                .expect("fresh critic tape");
            self.critic_optim
                .step(&self.config.optimizer, self.critic.params_mut(), self.config.lr_critic);

            let (sample, mut tape) = self.actor.forward(&t.obs, base, actor_noise);
            let u_new = compose_action(base, sample.residual_action, v_max);
            let jac = compose_jacobian(base, sample.residual_action, v_max);
            let mut q_eval = self.critic.forward(&t.obs, u_new);
            let dq_du = self
                .critic
                .action_grad(&mut q_eval.tape, 1.0)
                .expect("fresh critic tape");
            trace.actor_loss = -q_eval.q_value + alpha * sample.log_prob;
            let d_action = -(jac.transpose() * dq_du);
            self.actor
                .backward(&mut tape, d_action, alpha)
                .expect("fresh actor tape");
            self.actor_optim
                .step(&self.config.optimizer, self.actor.params_mut(), self.config.lr_actor);

            let entropy_gap = sample.log_prob + self.config.target_entropy;
            trace.alpha_loss = -alpha * entropy_gap;
            let grad = -alpha * entropy_gap;
            if grad.is_finite() {
                self.log_alpha -= self.config.lr_alpha * grad;
            }
            trace.alpha = self.alpha();
        } else {
            trace.skipped = true;
            self.skipped_steps += 1;
        }

        self.step_count += 1;
        if t.terminal {
            self.episode_count += 1;
            self.episode_return = 0.0;
        }
        trace
    }
}
