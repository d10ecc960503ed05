//! Payoff oracles `f(x, y)` with analytic gradients.
//!
//! The min player picks `x`, the max player picks `y`. Some games live on a
//! disjoint union of copies of a domain (a finite sample set, or the two
//! signed copies of the neuron sphere); a particle then carries a `label`
//! selecting its copy, and the oracle sees it through [`Site`].

mod fourier;
mod margin;
mod matrix;

pub use fourier::{FourierPayoff, FourierTerm};
pub use margin::{toy_dataset, DistribRobustGame, Sample, TwoLayerMarginGame, NEGATIVE, POSITIVE};
pub use matrix::MatrixGame;

use crate::geometry::DomainSpec;

/// A point of one player's strategy space: copy index plus coordinates.
#[derive(Clone, Copy, Debug)]
pub struct Site<'a> {
    pub label: usize,
    pub pos: &'a [f64],
}

impl<'a> Site<'a> {
    pub fn new(label: usize, pos: &'a [f64]) -> Self {
        Site { label, pos }
    }

    /// Site on a domain without labels.
    pub fn at(pos: &'a [f64]) -> Self {
        Site { label: 0, pos }
    }
}

/// `L0 = sup f - inf f` and `L1 = sup max(|∂ₓf|, |∂ᵧf|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothnessBounds {
    pub l0: f64,
    pub l1: f64,
}

pub trait PayoffOracle: Sync {
    fn x_domain(&self) -> &DomainSpec;
    fn y_domain(&self) -> &DomainSpec;

    /// Number of labelled copies of the x domain (1 for plain domains).
    fn x_labels(&self) -> usize {
        1
    }

    fn y_labels(&self) -> usize {
        1
    }

    fn eval(&self, x: Site, y: Site) -> f64;

    /// Value together with both partial gradients.
    fn eval_and_grads(&self, x: Site, y: Site) -> (f64, Vec<f64>, Vec<f64>);

    fn grad_x(&self, x: Site, y: Site) -> Vec<f64> {
        self.eval_and_grads(x, y).1
    }

    fn grad_y(&self, x: Site, y: Site) -> Vec<f64> {
        self.eval_and_grads(x, y).2
    }

    fn smoothness_bounds(&self) -> Option<SmoothnessBounds> {
        None
    }
}

/// `G[i][j] = f(x_i, y_j)`.
pub fn payoff_matrix(
    oracle: &dyn PayoffOracle,
    mu: &crate::particles::Ensemble,
    nu: &crate::particles::Ensemble,
) -> Vec<Vec<f64>> {
    (0..mu.len())
        .map(|i| (0..nu.len()).map(|j| oracle.eval(mu.site(i), nu.site(j))).collect())
        .collect()
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    /// Central finite differences of `eval` in each free coordinate.
    pub fn fd_grads(oracle: &dyn PayoffOracle, x: Site, y: Site, h: f64) -> (Vec<f64>, Vec<f64>) {
        let mut gx = vec![0.0; x.pos.len()];
        for (c, g) in gx.iter_mut().enumerate() {
            let mut p = x.pos.to_vec();
            let mut m = x.pos.to_vec();
            p[c] += h;
            m[c] -= h;
            *g = (oracle.eval(Site::new(x.label, &p), y) - oracle.eval(Site::new(x.label, &m), y)) / (2.0 * h);
        }
        let mut gy = vec![0.0; y.pos.len()];
        for (c, g) in gy.iter_mut().enumerate() {
            let mut p = y.pos.to_vec();
            let mut m = y.pos.to_vec();
            p[c] += h;
            m[c] -= h;
            *g = (oracle.eval(x, Site::new(y.label, &p)) - oracle.eval(x, Site::new(y.label, &m))) / (2.0 * h);
        }
        (gx, gy)
    }

    /// Relative error with an absolute floor for near-zero gradients.
    pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
        let diff = a.iter().zip(b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
        let scale = b.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
        diff / scale
    }
}
