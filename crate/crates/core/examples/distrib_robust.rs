//! Distributionally robust classification: an adversary moves each sample
//! inside a ball of radius `r` while the network maximizes the margin.
//!
//! ```bash
//! cargo run --release --example distrib_robust -- 0.3
//! ```

use conic_saddle::diagnostics::{best_response_min, MultistartConfig};
use conic_saddle::games::{toy_dataset, DistribRobustGame, TwoLayerMarginGame};
use conic_saddle::particles::{init_ensemble, Ensemble, InitMode, SaddleState};
use conic_saddle::solver::{run_trajectory, SolverConfig};
use conic_saddle::PayoffOracle;
use rand::Rng;

fn main() -> conic_saddle::Result<()> {
    let radius = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.2);
    let inner = TwoLayerMarginGame::new(toy_dataset(), 3, true, false)?;
    let game = DistribRobustGame::new(inner, radius, 2, true)?;

    let mut rng = conic_saddle::rng::substream(0, "adversary");
    let labels = game.adversary_labels();
    let moves = labels.iter().map(|_| game.x_domain().random_point(&mut rng)).collect();
    let adversary = Ensemble::uniform(moves)?.with_labels(labels)?;
    let m = 50;
    let neurons = init_ensemble(game.y_domain(), 2 * m, &InitMode::UniformRandom, rng.random())?
        .ensemble
        .with_labels(TwoLayerMarginGame::neuron_labels(m))?;

    let cfg = SolverConfig::mirror_prox(0.2, 0.2, 2000);
    let traj = run_trajectory(&game, &SaddleState::new(adversary, neurons), &cfg, |_, _, _| Ok(()))?;
    let (mu, nu) = (&traj.final_state.mu, &traj.final_state.nu);

    let ms = MultistartConfig::defaults_for(&game, 0);
    println!("radius {radius}");
    println!("clean margin  {:.4}", game.inner().margin(nu));
    println!("robust margin {:.4}", best_response_min(&game, nu, mu, &ms)?);
    println!("worst-case perturbations carrying weight:");
    for (i, w) in mu.weights().iter().enumerate().filter(|(_, w)| **w > 1e-3) {
        let u = &mu.positions[i];
        println!("  sample {} weight {w:.3} u = ({:+.3}, {:+.3})", mu.labels[i], u[0], u[1]);
    }
    Ok(())
}
