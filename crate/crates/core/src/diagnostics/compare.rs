//! Distance between a mirror-prox step and a proximal-point step.

use crate::games::PayoffOracle;
use crate::particles::SaddleState;
use crate::solver::{combined_distance, cp_outer_step, pp_fixed_point, SolverConfig};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MpPpComparison {
    pub distance: f64,
    pub pp_converged: bool,
    pub pp_residual: f64,
}

/// Runs one two-step prox-anchored outer step and the proximal-point fixed
/// point from the same `z`, and measures how far apart they land.
pub fn compare_mp_pp(
    oracle: &dyn PayoffOracle,
    z: &SaddleState,
    eta: f64,
    sigma: f64,
    pp_tol: f64,
    max_inner: usize,
) -> Result<MpPpComparison> {
    let mp = cp_outer_step(oracle, z, &SolverConfig::mirror_prox(eta, sigma, 1))?;
    let pp = pp_fixed_point(oracle, z, eta, sigma, pp_tol, max_inner)?;
    Ok(MpPpComparison {
        distance: combined_distance(oracle.x_domain(), oracle.y_domain(), &mp, &pp.state)?,
        pp_converged: pp.converged,
        pp_residual: pp.residual,
    })
}
