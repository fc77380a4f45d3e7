//! Compares hand-written network gradients with central finite differences.

use irrl::net::gradcheck::{max_relative_error, numeric_gradient, FD_STEP};
use irrl::net::{Actor, Critic, HasParams, NetConfig};
use irrl::sim::ObservationFrame;
use irrl::Vec2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let config = NetConfig {
        embed_dim: 8,
        hidden_dim: 16,
        ..NetConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let obs = ObservationFrame {
        robot_feat: [3.1, 0.4, 0.2, -0.1, 0.0],
        human_feats: (0..5)
            .map(|_| [rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
            .collect(),
    };

    // Fresh heads are zero, which would hide the deeper layers.
    let mut critic = Critic::new(&config, 1);
    let mut actor = Actor::new(&config, 0.5, 2);
    for p in critic.params_mut().iter_mut().chain(actor.params_mut().iter_mut()) {
        if p.name.starts_with("head.") {
            p.value.iter_mut().for_each(|v| *v = rng.random_range(-0.5..0.5));
        }
    }

    let u = Vec2::new(0.4, -0.2);
    let mut eval = critic.forward(&obs, u);
    critic.backward(&mut eval.tape, 1.0).expect("fresh tape");
    let numeric = numeric_gradient(&mut critic, |c| c.q(&obs, u), FD_STEP);
    let (err, at) = max_relative_error(&critic, &numeric, 1e-6);
    println!("critic: {} parameters, worst relative error {err:.2e} ({at})", critic.params().numel());

    let base = Vec2::new(0.6, 0.1);
    let noise = [0.3, -0.8];
    let loss = |a: &Actor| {
        let s = a.sample(&obs, base, noise);
        s.residual_action.x - 2.0 * s.residual_action.y + 0.1 * s.log_prob
    };
    let (_, mut tape) = actor.forward(&obs, base, noise);
    actor.backward(&mut tape, Vec2::new(1.0, -2.0), 0.1).expect("fresh tape");
    let numeric = numeric_gradient(&mut actor, loss, FD_STEP);
    let (err, at) = max_relative_error(&actor, &numeric, 1e-6);
    println!("actor:  {} parameters, worst relative error {err:.2e} ({at})", actor.params().numel());
}
