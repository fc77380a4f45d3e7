//! Trains the residual policy and a from-scratch policy side by side and
//! compares their evaluation returns.

use irrl::harness::{RunConfig, SeedRun};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let episodes: u64 = std::env::args().nth(1).map_or(Ok(1000), |a| a.parse())?;
    let cfg = RunConfig::default();
    let mut scratch_cfg = cfg.clone();
    scratch_cfg.trainer.scratch_mode = true;
    scratch_cfg.trainer.residual_bound = scratch_cfg.trainer.v_max;

    let mut residual = SeedRun::new(&cfg, 1);
    let mut scratch = SeedRun::new(&scratch_cfg, 1);
    println!("{:>8} {:>10} {:>10}", "episode", "residual", "scratch");
    let every = cfg.eval_every as u64;
    let mut done = 0;
    while done < episodes {
        done = (done + every).min(episodes);
        for run in [&mut residual, &mut scratch] {
            while run.episodes_done() < done {
                run.train_episode()?;
            }
        }
        let a = residual.evaluate(cfg.eval_episodes)?;
        let b = scratch.evaluate(cfg.eval_episodes)?;
        println!("{done:>8} {:>10.4} {:>10.4}", a.return_discounted_mean, b.return_discounted_mean);
    }
    Ok(())
}
