//! Trains a residual policy on top of the social-force base for one seed,
//! printing an evaluation line every `eval_every` episodes.
//!
//! ```text
//! cargo run --release --example train_residual -- [episodes] [seed]
//! ```

use std::time::Instant;

use irrl::harness::{evaluate_base, RunConfig, SeedRun};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let mut cfg = RunConfig::default();
    cfg.episodes = args.next().map_or(Ok(1000), |a| a.parse())?;
    let seed: u64 = args.next().map_or(Ok(1), |a| a.parse())?;

    let base = evaluate_base(&cfg, cfg.eval_episodes, &[seed], None)?;
    println!(
        "base policy: return {:.4}, success {:.2}",
        base.return_mean_discounted.mean, base.success_rate.mean
    );

    let started = Instant::now();
    let mut run = SeedRun::new(&cfg, seed);
    run.run_until(
        cfg.episodes as u64,
        |row| {
            println!(
                "episode {:>6}  return {:.4}  success {:.2}  collision {:.2}  timeout {:.2}  alpha {:.4}",
                row.episode, row.eval_return_mean, row.eval_success, row.eval_collision, row.eval_timeout, row.alpha
            );
            Ok(())
        },
        |_| Ok(()),
    )?;
    println!(
        "{} training steps in {:.1}s, {} skipped updates",
        run.trainer.step_count,
        started.elapsed().as_secs_f64(),
        run.skipped_updates()
    );
    Ok(())
}
