//! Mirror prox on a random Fourier payoff, then a Lyapunov certificate
//! against an equilibrium estimated by clustering a longer run.
//!
//! ```bash
//! cargo run --release --example fourier_random -- 2
//! ```

use conic_saddle::diagnostics::{default_lyapunov_params, lyapunov, ni_error_grid};
use conic_saddle::games::FourierPayoff;
use conic_saddle::particles::{init_ensemble, InitMode, SaddleState};
use conic_saddle::runner::cluster_state;
use conic_saddle::solver::{run_trajectory, SolverConfig};
use conic_saddle::PayoffOracle;

fn main() -> conic_saddle::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let game = FourierPayoff::random(1, 1, 3, 3, seed)?;
    let mu = init_ensemble(game.x_domain(), 15, &InitMode::UniformRandom, seed)?.ensemble;
    let nu = init_ensemble(game.y_domain(), 15, &InitMode::UniformRandom, seed + 1)?.ensemble;
    let init = SaddleState::new(mu, nu);

    let (eta, sigma) = (0.04, 0.001);
    let cfg = SolverConfig { record_every: 40, ..SolverConfig::mirror_prox(eta, sigma, 800) };
    let mut states = Vec::new();
    let traj = run_trajectory(&game, &init, &cfg, |k, state, _| {
        states.push((k, state.clone()));
        Ok(())
    })?;

    let reference = cluster_state(game.x_domain(), game.y_domain(), &traj.final_state, 1e-4, None)?;
    println!("estimated equilibrium: {} + {} atoms", reference.mu.len(), reference.nu.len());
    for (w, x) in reference.mu.weights().iter().zip(&reference.mu.positions) {
        println!("  mu  {w:.4} at {:.4}", x[0]);
    }
    for (w, y) in reference.nu.weights().iter().zip(&reference.nu.positions) {
        println!("  nu  {w:.4} at {:.4}", y[0]);
    }

    let params = default_lyapunov_params(eta, sigma, reference.d_star(game.x_domain(), game.y_domain())?, None)?;
    println!("{:>5} {:>12} {:>12}", "k", "NI", "V");
    for (k, state) in states.iter().filter(|(k, _)| *k <= 400) {
        let ni = ni_error_grid(&game, state, 1024)?.value;
        let v = lyapunov(game.x_domain(), game.y_domain(), state, &reference, params)?.v_total;
        println!("{k:>5} {ni:>12.3e} {v:>12.3e}");
    }
    Ok(())
}
