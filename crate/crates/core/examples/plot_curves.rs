//! Runs a short two-seed campaign and renders its learning curves.
//!
//! ```text
//! cargo run --release --example plot_curves -- [out_dir]
//! ```

use std::path::PathBuf;

use irrl::harness::{plot, train_campaign, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "plot_curves_out".into()));
    let cfg = RunConfig {
        episodes: 300,
        eval_every: 50,
        eval_episodes: 50,
        seeds: vec![1, 2],
        output_dir: out.join("run"),
        ..RunConfig::default()
    };
    let manifest = train_campaign(&cfg, true, None)?;
    let curves: Vec<PathBuf> = manifest.seeds.iter().map(|s| s.curve.clone()).collect();
    for svg in plot::plot_curves(&curves, &out)? {
        println!("wrote {}", svg.display());
    }
    Ok(())
}
