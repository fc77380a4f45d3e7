//! Evaluates the frozen social-force base policy on its own.
//!
//! ```text
//! cargo run --release --example sfm_baseline -- [episodes] [sfm|orca]
//! ```

use irrl::harness::{evaluate_base, RunConfig};
use irrl::sim::PedModel;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let episodes: usize = args.next().map_or(Ok(500), |a| a.parse())?;
    let mut cfg = RunConfig::default();
    if args.next().as_deref() == Some("orca") {
        cfg.env.ped_model = PedModel::Orca;
    }
    let report = evaluate_base(&cfg, episodes, &[1], None)?;
    print!("{}", report.table());
    Ok(())
}
