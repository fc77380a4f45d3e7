use serde::{Deserialize, Serialize};

use super::base::BasePolicy;
use super::compose::compose_action;
use super::trainer::{TrainerState, Transition};
use crate::net::Actor;
use crate::peds::CrowdModel;
use crate::sim::trajectory::Trajectory;
use crate::sim::{EnvConfig, EnvState, SimError, Terminal};
use crate::Action2;

/// How one episode ended and what it earned.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeOutcome {
    pub terminal: Terminal,
    pub steps: usize,
    pub sim_time: f64,
    pub return_discounted: f64,
    pub return_undiscounted: f64,
}

/// Runs one training episode, performing exactly one update per step.
pub fn run_episode(
    trainer: &mut TrainerState,
    env_config: &EnvConfig,
    crowd: &CrowdModel,
    base: &dyn BasePolicy,
    seed: u64,
) -> Result<EpisodeOutcome, SimError> {
    let (mut env, mut obs) = EnvState::reset(env_config, seed)?;
    let gamma = trainer.config.gamma;
    let mut base_action = base.act(&mut env, env_config);
    let mut discount = 1.0;
    let mut ret = (0.0, 0.0);
    loop {
        let sample = trainer.sample_residual(&obs, base_action);
        let u = trainer.compose(base_action, sample.residual_action);
        let step = env.step(env_config, u, crowd);
        let next_base = base.act(&mut env, env_config);
        ret.0 += discount * step.reward;
        ret.1 += step.reward;
        discount *= gamma;
        let done = step.terminal.is_done();
        let next_obs = step.obs;
        let t = Transition::new(
            obs,
            base_action,
            sample,
            step.reward,
            next_obs.clone(),
            next_base,
            done,
            step.terminal.is_truncation(),
        );
        trainer.train_step(t);
        if done {
            return Ok(EpisodeOutcome {
                terminal: step.terminal,
                steps: env.step_count,
                sim_time: env.sim_time,
                return_discounted: ret.0,
                return_undiscounted: ret.1,
            });
        }
        obs = next_obs;
        base_action = next_base;
    }
}

/// Deterministic controller used for evaluation: a base policy plus an
/// optional frozen residual actor.
pub struct Controller<'a> {
    pub base: &'a dyn BasePolicy,
    pub residual: Option<&'a Actor>,
    pub v_max: f64,
}

impl Controller<'_> {
    fn act(&self, env: &mut EnvState, config: &EnvConfig) -> Action2 {
        let base = self.base.act(env, config);
        match self.residual {
            Some(actor) => {
                let res = actor.deterministic_action(&env.observe(), base);
                compose_action(base, res, self.v_max)
            }
            None => compose_action(base, Action2::zeros(), self.v_max),
        }
    }
}

/// Plays one episode without learning, optionally recording it.
pub fn evaluate_episode(
    controller: &Controller<'_>,
    env_config: &EnvConfig,
    crowd: &CrowdModel,
    gamma: f64,
    seed: u64,
    mut record: Option<&mut Trajectory>,
) -> Result<EpisodeOutcome, SimError> {
    let (mut env, _) = EnvState::reset(env_config, seed)?;
    if let Some(tr) = record.as_deref_mut() {
        *tr = Trajectory::start(&env);
    }
    let mut discount = 1.0;
    let mut ret = (0.0, 0.0);
    loop {
        let u = controller.act(&mut env, env_config);
        let step = env.step(env_config, u, crowd);
        if let Some(tr) = record.as_deref_mut() {
            tr.record(&env, step.reward, step.terminal);
        }
        ret.0 += discount * step.reward;
        ret.1 += step.reward;
        discount *= gamma;
        if step.terminal.is_done() {
            return Ok(EpisodeOutcome {
                terminal: step.terminal,
                steps: env.step_count,
                sim_time: env.sim_time,
                return_discounted: ret.0,
                return_undiscounted: ret.1,
            });
        }
    }
}

/// Aggregate of a batch of evaluation episodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub episodes: usize,
    pub success_rate: f64,
    pub collision_rate: f64,
    pub timeout_rate: f64,
    /// Mean duration of successful episodes (NaN if none succeeded).
    pub exec_time_mean: f64,
    pub return_discounted_mean: f64,
    pub return_undiscounted_mean: f64,
}

impl EvalSummary {
    pub fn from_outcomes(outcomes: &[EpisodeOutcome]) -> Self {
        let n = outcomes.len() as f64;
        let count = |t: Terminal| outcomes.iter().filter(|o| o.terminal == t).count() as f64;
        let successes: Vec<f64> = outcomes
            .iter()
            .filter(|o| o.terminal == Terminal::Success)
            .map(|o| o.sim_time)
            .collect();
        let exec_time_mean = if successes.is_empty() {
            f64::NAN
        } else {
            successes.iter().sum::<f64>() / successes.len() as f64
        };
        Self {
            episodes: outcomes.len(),
            success_rate: count(Terminal::Success) / n,
            collision_rate: count(Terminal::Collision) / n,
            timeout_rate: count(Terminal::Timeout) / n,
            exec_time_mean,
            return_discounted_mean: outcomes.iter().map(|o| o.return_discounted).sum::<f64>() / n,
            return_undiscounted_mean: outcomes.iter().map(|o| o.return_undiscounted).sum::<f64>() / n,
        }
    }
}

/// Evaluates `controller` on one episode per seed.
pub fn evaluate(
    controller: &Controller<'_>,
    env_config: &EnvConfig,
    crowd: &CrowdModel,
    gamma: f64,
    seeds: impl IntoIterator<Item = u64>,
) -> Result<Vec<EpisodeOutcome>, SimError> {
    seeds
        .into_iter()
        .map(|s| evaluate_episode(controller, env_config, crowd, gamma, s, None))
        .collect()
}
