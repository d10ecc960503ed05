//! Saves a run's final state in the text checkpoint format, reloads it,
//! and clusters it into a reference equilibrium file.
//!
//! ```bash
//! cargo run --release --example checkpoint_and_cluster
//! ```

use conic_saddle::checkpoint::Checkpoint;
use conic_saddle::games::FourierPayoff;
use conic_saddle::particles::{init_ensemble, InitMode, SaddleState};
use conic_saddle::runner::{estimate_mne, load_reference};
use conic_saddle::solver::{run_trajectory, SolverConfig};
use conic_saddle::PayoffOracle;

fn main() -> conic_saddle::Result<()> {
    let game = FourierPayoff::random(1, 1, 3, 3, 6)?;
    let mu = init_ensemble(game.x_domain(), 15, &InitMode::Grid, 0)?.ensemble;
    let nu = init_ensemble(game.y_domain(), 15, &InitMode::Grid, 0)?.ensemble;
    let traj = run_trajectory(&game, &SaddleState::new(mu, nu), &SolverConfig::mirror_prox(0.04, 0.001, 800), |_, _, _| {
        Ok(())
    })?;

    let dir = std::env::temp_dir().join("conic-saddle-example");
    std::fs::create_dir_all(&dir)?;
    let state_path = dir.join("final_state.txt");
    Checkpoint::new(traj.final_state, game.x_domain().clone(), game.y_domain().clone()).save(&state_path)?;
    println!("{}", std::fs::read_to_string(&state_path)?.lines().take(6).collect::<Vec<_>>().join("\n"));
    println!("...");

    let ref_path = dir.join("reference.txt");
    estimate_mne(&state_path, 1e-4, None, &ref_path)?;
    let reference = load_reference(&ref_path)?;
    println!("\n{}", std::fs::read_to_string(&ref_path)?);
    println!("{} + {} atoms", reference.mu.len(), reference.nu.len());
    Ok(())
}
