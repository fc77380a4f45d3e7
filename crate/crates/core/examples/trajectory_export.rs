//! Records one base-policy episode to CSV and renders it as SVG.
//!
//! ```text
//! cargo run --release --example trajectory_export -- [episode_seed] [out_dir]
//! ```

use std::path::PathBuf;

use irrl::harness::{eval_seed, plot, RunConfig};
use irrl::irrl::{evaluate_episode, Controller, SfmBase};
use irrl::sim::trajectory::Trajectory;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let index: u64 = args.next().map_or(Ok(0), |a| a.parse())?;
    let out = PathBuf::from(args.next().unwrap_or_else(|| "trajectory_out".into()));
    std::fs::create_dir_all(&out)?;

    let cfg = RunConfig::default();
    let base = SfmBase {
        params: cfg.sfm_base.clone(),
    };
    let controller = Controller {
        base: &base,
        residual: None,
        v_max: cfg.trainer.v_max,
    };
    let mut traj = Trajectory::default();
    let outcome = evaluate_episode(
        &controller,
        &cfg.env,
        &cfg.crowd_model(),
        cfg.trainer.gamma,
        eval_seed(index),
        Some(&mut traj),
    )?;

    let csv = out.join("episode.csv");
    traj.write_csv(&csv)?;
    let svg = out.join("episode.svg");
    std::fs::write(&svg, plot::trajectory_svg(&traj, cfg.env.goal_tolerance))?;
    println!(
        "{} after {:.2}s, return {:.4}: wrote {} and {}",
        outcome.terminal.as_str(),
        outcome.sim_time,
        outcome.return_discounted,
        csv.display(),
        svg.display()
    );
    Ok(())
}
