//! Finite games are the special case with frozen positions: descent-ascent
//! is multiplicative weights and the two-step inner loop is entropic
//! mirror prox. Only the latter converges to the mixed equilibrium.
//!
//! ```bash
//! cargo run --release --example matrix_game
//! ```

use conic_saddle::diagnostics::{ni_error_multistart, MultistartConfig};
use conic_saddle::games::MatrixGame;
use conic_saddle::solver::{run_trajectory, SolverConfig};

fn main() -> conic_saddle::Result<()> {
    let game = MatrixGame::new(vec![
        vec![0.0, 1.0, -1.0],
        vec![-1.0, 0.0, 1.0],
        vec![1.0, -1.0, 0.0],
    ])?;
    let init = game.state(&[0.6, 0.3, 0.1], &[0.2, 0.2, 0.6])?;
    let ms = MultistartConfig::defaults_for(&game, 0);
    for (name, cfg) in [
        ("multiplicative weights", SolverConfig::descent_ascent(0.1, 0.0, 3000)),
        ("mirror prox", SolverConfig::mirror_prox(0.1, 0.0, 3000)),
    ] {
        let cfg = SolverConfig { record_every: 1000, ..cfg };
        println!("{name}");
        run_trajectory(&game, &init, &cfg, |k, s, _| {
            let a: Vec<String> = s.mu.weights().iter().map(|w| format!("{w:.3}")).collect();
            println!("  k = {k:>4}  NI = {:.2e}  rows [{}]", ni_error_multistart(&game, s, &ms)?, a.join(", "));
            Ok(())
        })?;
    }
    Ok(())
}
