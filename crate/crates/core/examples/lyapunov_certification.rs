//! Lyapunov potential of mirror-prox iterates around the known equilibrium
//! of the counterexample, split into its weight and position parts.
//!
//! ```bash
//! cargo run --release --example lyapunov_certification
//! ```

use conic_saddle::diagnostics::{default_lyapunov_params, lyapunov};
use conic_saddle::games::FourierPayoff;
use conic_saddle::particles::{init_ensemble, InitMode, SaddleState};
use conic_saddle::runner::synthetic_reference;
use conic_saddle::solver::{run_trajectory, SolverConfig};
use conic_saddle::PayoffOracle;

fn main() -> conic_saddle::Result<()> {
    let game = FourierPayoff::synthetic_counterexample();
    let star = synthetic_reference();
    let near = |reference| InitMode::Near { reference, jitter: 0.02 };
    let mu = init_ensemble(game.x_domain(), 4, &near(star.mu.clone()), 3)?.ensemble;
    let nu = init_ensemble(game.y_domain(), 4, &near(star.nu.clone()), 4)?.ensemble;

    let (eta, sigma) = (0.02, 0.002);
    let params = default_lyapunov_params(eta, sigma, star.d_star(game.x_domain(), game.y_domain())?, None)?;
    println!("lambda = {:.3}, support radius = {:.4}", params.lambda, params.support_radius());
    println!("{:>5} {:>11} {:>11} {:>11} {:>11} {:>11}", "k", "V_wei(mu)", "V_pos(mu)", "V_wei(nu)", "V_pos(nu)", "V");
    let cfg = SolverConfig { record_every: 300, ..SolverConfig::mirror_prox(eta, sigma, 3000) };
    run_trajectory(&game, &SaddleState::new(mu, nu), &cfg, |k, state, _| {
        let r = lyapunov(game.x_domain(), game.y_domain(), state, &star, params)?;
        println!(
            "{k:>5} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e}",
            r.v_wei_mu, r.v_pos_mu, r.v_wei_nu, r.v_pos_nu, r.v_total
        );
        Ok(())
    })?;
    Ok(())
}
