//! Streams rewards from base-policy episodes through the TD-error scale
//! estimator and compares it with a batch recomputation.

use irrl::harness::RunConfig;
use irrl::irrl::{scale_td_error, BasePolicy, SfmBase, ScaleState};
use irrl::sim::EnvState;

fn population_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = RunConfig::default();
    let gamma = cfg.trainer.gamma;
    let crowd = cfg.crowd_model();
    let base = SfmBase {
        params: cfg.sfm_base.clone(),
    };

    let mut scale = ScaleState::default();
    let (mut rewards, mut gammas, mut sq_returns) = (Vec::new(), Vec::new(), Vec::new());
    for episode in 0..20 {
        let (mut state, _) = EnvState::reset(&cfg.env, 1000 + episode)?;
        let mut g = 0.0;
        loop {
            let action = base.act(&mut state, &cfg.env);
            let step = state.step(&cfg.env, action, &crowd);
            g += step.reward;
            let done = step.terminal.is_done();
            let (sigma, next) = if done {
                scale_td_error(step.reward, 0.0, Some(g), scale)
            } else {
                scale_td_error(step.reward, gamma, None, scale)
            };
            scale = next;
            rewards.push(step.reward);
            gammas.push(if done { 0.0 } else { gamma });
            if done {
                sq_returns.push(g * g);
                let mean_g2 = sq_returns.iter().sum::<f64>() / sq_returns.len() as f64;
                let batch = if sq_returns.len() > 1 {
                    (population_variance(&rewards) + mean_g2 * population_variance(&gammas)).sqrt()
                } else {
                    1.0
                };
                println!(
                    "episode {episode:>2} {:>9}  G {g:+.3}  sigma_delta {sigma:.6}  batch {batch:.6}",
                    step.terminal.as_str()
                );
                break;
            }
        }
    }
    Ok(())
}
