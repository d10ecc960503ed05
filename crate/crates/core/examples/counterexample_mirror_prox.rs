//! Descent-ascent versus mirror prox on the synthetic counterexample
//! `f(x, y) = sin 4πx + sin 4πy + 2 cos 2π(x + y)`, started next to its
//! unique equilibrium.
//!
//! ```bash
//! cargo run --release --example counterexample_mirror_prox
//! ```

use conic_saddle::diagnostics::ni_error_grid;
use conic_saddle::games::FourierPayoff;
use conic_saddle::particles::{init_ensemble, InitMode, SaddleState};
use conic_saddle::runner::synthetic_reference;
use conic_saddle::solver::{run_trajectory, SolverConfig};
use conic_saddle::PayoffOracle;

fn main() -> conic_saddle::Result<()> {
    let game = FourierPayoff::synthetic_counterexample();
    let star = synthetic_reference();
    let near = |reference| InitMode::Near { reference, jitter: 0.03 };
    let mu = init_ensemble(game.x_domain(), 4, &near(star.mu.clone()), 1)?.ensemble;
    let nu = init_ensemble(game.y_domain(), 4, &near(star.nu.clone()), 2)?.ensemble;
    let init = SaddleState::new(mu, nu);

    let (eta, sigma, steps) = (0.05, 0.005, 4000);
    for (name, cfg) in [
        ("CP-MDA", SolverConfig::descent_ascent(eta, sigma, steps)),
        ("CP-MP ", SolverConfig::mirror_prox(eta, sigma, steps)),
    ] {
        let cfg = SolverConfig { record_every: 500, ..cfg };
        print!("{name}");
        run_trajectory(&game, &init, &cfg, |_, state, _| {
            print!("  {:.1e}", ni_error_grid(&game, state, 1024)?.value);
            Ok(())
        })?;
        println!();
    }
    Ok(())
}
