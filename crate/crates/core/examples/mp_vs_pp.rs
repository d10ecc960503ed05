//! Distance between one mirror-prox step and the exact proximal-point step
//! from the same state, over a range of step sizes. The local log-log slope
//! approaches 3 once `σ · curvature` is small.
//!
//! ```bash
//! cargo run --release --example mp_vs_pp
//! ```

use conic_saddle::diagnostics::compare_mp_pp;
use conic_saddle::games::FourierPayoff;
use conic_saddle::particles::{Ensemble, SaddleState};

fn main() -> conic_saddle::Result<()> {
    let game = FourierPayoff::synthetic_counterexample();
    let mu = Ensemble::from_weights(&[0.45, 0.55], vec![vec![0.38], vec![0.87]])?;
    let nu = Ensemble::from_weights(&[0.52, 0.48], vec![vec![0.13], vec![0.62]])?;
    let z = SaddleState::new(mu, nu);

    let mut prev: Option<(f64, f64)> = None;
    println!("{:>9} {:>12} {:>7} {:>10}", "eta", "distance", "slope", "pp_iters");
    for i in 0..8 {
        let eta = 0.04 / 2f64.powi(i);
        let r = compare_mp_pp(&game, &z, eta, eta, 1e-14, 2000)?;
        let local = prev.map(|(e, d)| (r.distance / d).ln() / (eta / e).ln());
        let local = local.map_or_else(|| "-".to_string(), |s| format!("{s:.2}"));
        println!("{eta:>9.6} {:>12.4e} {local:>7} {:>10}", r.distance, if r.pp_converged { "ok" } else { "no" });
        prev = Some((eta, r.distance));
    }
    Ok(())
}
