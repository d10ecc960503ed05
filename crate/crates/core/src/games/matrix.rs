//! Finite zero-sum games `f(i, j) = A[i][j]`.

use rand_distr::{Distribution, StandardNormal};

use super::{PayoffOracle, Site, SmoothnessBounds};
use crate::geometry::DomainSpec;
use crate::particles::{Ensemble, SaddleState};
use crate::{Error, Result};

/// Row player minimizes, column player maximizes. Both domains are finite;
/// a particle selects its pure strategy through its label.
#[derive(Clone, Debug)]
pub struct MatrixGame {
    rows: Vec<Vec<f64>>,
    x_domain: DomainSpec,
    y_domain: DomainSpec,
}

fn index_points(n: usize) -> DomainSpec {
    DomainSpec::fixed_finite((0..n).map(|i| vec![i as f64]).collect())
}

impl MatrixGame {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        if m == 0 {
            return Err(Error::InvalidArgument("payoff matrix is empty".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch { expected: m, got: r.len() });
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("payoff matrix has non-finite entries".into()));
        }
        let n = rows.len();
        Ok(MatrixGame { rows, x_domain: index_points(n), y_domain: index_points(m) })
    }

    /// Entries i.i.d. standard normal.
    pub fn random(n: usize, m: usize, seed: u64) -> Result<Self> {
        let mut rng = crate::rng::substream(seed, "matrix-entries");
        Self::new((0..n).map(|_| (0..m).map(|_| StandardNormal.sample(&mut rng)).collect()).collect())
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// One particle per pure strategy with the given mixed strategies as weights.
    pub fn state(&self, a: &[f64], b: &[f64]) -> Result<SaddleState> {
        let player = |w: &[f64]| -> Result<Ensemble> {
            Ensemble::from_weights(w, (0..w.len()).map(|i| vec![i as f64]).collect())?.with_labels((0..w.len()).collect())
        };
        if a.len() != self.rows.len() {
            return Err(Error::DimensionMismatch { expected: self.rows.len(), got: a.len() });
        }
        if b.len() != self.rows[0].len() {
            return Err(Error::DimensionMismatch { expected: self.rows[0].len(), got: b.len() });
        }
        Ok(SaddleState::new(player(a)?, player(b)?))
    }
}

impl PayoffOracle for MatrixGame {
    fn x_domain(&self) -> &DomainSpec {
        &self.x_domain
    }

    fn y_domain(&self) -> &DomainSpec {
        &self.y_domain
    }

    fn x_labels(&self) -> usize {
        self.rows.len()
    }

    fn y_labels(&self) -> usize {
        self.rows[0].len()
    }

    fn eval(&self, x: Site, y: Site) -> f64 {
        self.rows[x.label][y.label]
    }

    fn eval_and_grads(&self, x: Site, y: Site) -> (f64, Vec<f64>, Vec<f64>) {
        (self.eval(x, y), vec![0.0; x.pos.len()], vec![0.0; y.pos.len()])
    }

    fn smoothness_bounds(&self) -> Option<SmoothnessBounds> {
        let entries = self.rows.iter().flatten();
        let hi = entries.clone().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = entries.copied().fold(f64::INFINITY, f64::min);
        Some(SmoothnessBounds { l0: hi - lo, l1: 0.0 })
    }
}
