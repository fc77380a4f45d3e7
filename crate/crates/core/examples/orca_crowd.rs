//! Runs ORCA-only crowds (no robot) and reports the closest approach
//! between any two pedestrians.

use irrl::harness::RunConfig;
use irrl::peds::CrowdModel;
use irrl::sim::{EnvState, PedModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = RunConfig::default();
    cfg.env.ped_model = PedModel::Orca;
    let crowd = cfg.crowd_model();
    assert!(matches!(crowd, CrowdModel::Orca(_)));

    let mut closest = f64::INFINITY;
    let mut overlaps = 0;
    for seed in 0..100 {
        let (mut state, _) = EnvState::reset(&cfg.env, seed)?;
        for _ in 0..cfg.env.max_steps() {
            let sep = state.step_crowd(&cfg.env, &crowd);
            closest = closest.min(sep);
            if sep < 0.0 {
                overlaps += 1;
            }
        }
    }
    println!("100 episodes: closest surface distance {closest:.4} m, overlapping steps {overlaps}");
    Ok(())
}
