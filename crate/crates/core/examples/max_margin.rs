//! Max-margin classification with a two-layer network: samples against
//! neurons, `σ(s) = max(0, s)³`, bias appended.
//!
//! ```bash
//! cargo run --release --example max_margin
//! ```

use conic_saddle::diagnostics::{estimate_reference_by_clustering, ni_error_multistart, ClusterParams, MultistartConfig};
use conic_saddle::games::{toy_dataset, TwoLayerMarginGame, POSITIVE};
use conic_saddle::particles::{init_ensemble, Ensemble, InitMode, SaddleState};
use conic_saddle::solver::{run_trajectory, SolverConfig};
use conic_saddle::PayoffOracle;

fn main() -> conic_saddle::Result<()> {
    let game = TwoLayerMarginGame::new(toy_dataset(), 3, true, false)?;
    let n = game.samples().len();
    let m = 50;
    let samples = Ensemble::uniform((0..n).map(|i| vec![i as f64]).collect())?.with_labels((0..n).collect())?;
    let neurons = init_ensemble(game.y_domain(), 2 * m, &InitMode::UniformRandom, 0)?
        .ensemble
        .with_labels(TwoLayerMarginGame::neuron_labels(m))?;
    let init = SaddleState::new(samples, neurons);

    let ms = MultistartConfig::defaults_for(&game, 0);
    let cfg = SolverConfig { record_every: 250, ..SolverConfig::mirror_prox(0.2, 0.2, 2000) };
    let traj = run_trajectory(&game, &init, &cfg, |k, state, _| {
        let ni = ni_error_multistart(&game, state, &ms)?;
        println!("k = {k:>4}  NI = {ni:.3e}  margin = {:.5}", game.margin(&state.nu));
        Ok(())
    })?;

    let nu = &traj.final_state.nu;
    let params = ClusterParams { weight_floor: 1e-4, merge_radius: 1e-3 };
    let atoms = estimate_reference_by_clustering(game.y_domain(), nu, params)?;
    println!("{} neurons collapse onto {} atoms:", nu.len(), atoms.len());
    for (j, w) in atoms.weights().iter().enumerate() {
        let sign = if atoms.labels[j] == POSITIVE { '+' } else { '-' };
        let theta: Vec<String> = atoms.positions[j].iter().map(|c| format!("{c:+.4}")).collect();
        println!("  {sign} {w:.4} [{}]", theta.join(", "));
    }
    for s in game.samples() {
        println!("  y = {:+} NN(x) = {:.4}", s.y, game.network_output(nu, &s.x));
    }
    Ok(())
}
