//! First variations and Nikaido-Isoda error estimates.
//!
//! `NI(μ, ν) = max_y (μᵀF)(y) - min_x (Fν)(x)`, where
//! `(Fν)(x) = Σ_j b_j f(x, y_j)` and `(μᵀF)(y) = Σ_i a_i f(x_i, y)`.
//! Both estimators search a finite candidate set for the best responses, so
//! they return lower bounds on the true error.

use rand::Rng;

use crate::games::{PayoffOracle, Site};
use crate::geometry::DomainSpec;
use crate::particles::{Ensemble, SaddleState};
use crate::{Error, Result};

/// `(Fν)(x) = Σ_j b_j f(x, y_j)`.
pub fn first_variation_x(oracle: &dyn PayoffOracle, nu: &Ensemble, x: Site) -> f64 {
    let b = nu.weights();
    (0..nu.len()).map(|j| b[j] * oracle.eval(x, nu.site(j))).sum()
}

/// `(μᵀF)(y) = Σ_i a_i f(x_i, y)`.
pub fn first_variation_y(oracle: &dyn PayoffOracle, mu: &Ensemble, y: Site) -> f64 {
    let a = mu.weights();
    (0..mu.len()).map(|i| a[i] * oracle.eval(mu.site(i), y)).sum()
}

fn first_variation_x_grad(oracle: &dyn PayoffOracle, nu: &Ensemble, b: &[f64], x: Site) -> (f64, Vec<f64>) {
    let mut v = 0.0;
    let mut g = vec![0.0; x.pos.len()];
    for j in 0..nu.len() {
        let (f, fx, _) = oracle.eval_and_grads(x, nu.site(j));
        v += b[j] * f;
        for (gi, d) in g.iter_mut().zip(fx) {
            *gi += b[j] * d;
        }
    }
    (v, g)
}

fn first_variation_y_grad(oracle: &dyn PayoffOracle, mu: &Ensemble, a: &[f64], y: Site) -> (f64, Vec<f64>) {
    let mut v = 0.0;
    let mut g = vec![0.0; y.pos.len()];
    for i in 0..mu.len() {
        let (f, _, fy) = oracle.eval_and_grads(mu.site(i), y);
        v += a[i] * f;
        for (gi, d) in g.iter_mut().zip(fy) {
            *gi += a[i] * d;
        }
    }
    (v, g)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridNi {
    /// Raw grid estimate; may be slightly negative near an equilibrium.
    pub value: f64,
    /// `L1 · (√dx + √dy) / (2 · grid)` when smoothness bounds are known:
    /// `value + slack` upper-bounds the true error.
    pub lipschitz_slack: Option<f64>,
}

fn torus_grid(dim: usize, per_dim: usize) -> impl Iterator<Item = Vec<f64>> {
    let total = per_dim.pow(dim as u32);
    (0..total).map(move |mut idx| {
        let mut p = vec![0.0; dim];
        for c in (0..dim).rev() {
            p[c] = (idx % per_dim) as f64 / per_dim as f64;
            idx /= per_dim;
        }
        p
    })
}

/// NI error with both best responses searched over a uniform grid of
/// `grid_points_per_dim^d` points. Both domains must be tori.
pub fn ni_error_grid(oracle: &dyn PayoffOracle, state: &SaddleState, grid_points_per_dim: usize) -> Result<GridNi> {
    let (DomainSpec::Torus { dim: dx }, DomainSpec::Torus { dim: dy }) = (oracle.x_domain(), oracle.y_domain()) else {
        return Err(Error::UnsupportedDomain {
            op: "ni_error_grid",
            hint: "grid search needs torus domains; use ni_error_multistart",
        });
    };
    if grid_points_per_dim < 2 {
        return Err(Error::InvalidArgument("grid_points_per_dim must be at least 2".into()));
    }
    let mut best_y = f64::NEG_INFINITY;
    for label in 0..oracle.y_labels() {
        for y in torus_grid(*dy, grid_points_per_dim) {
            best_y = best_y.max(first_variation_y(oracle, &state.mu, Site::new(label, &y)));
        }
    }
    let mut best_x = f64::INFINITY;
    for label in 0..oracle.x_labels() {
        for x in torus_grid(*dx, grid_points_per_dim) {
            best_x = best_x.min(first_variation_x(oracle, &state.nu, Site::new(label, &x)));
        }
    }
    let slack = oracle.smoothness_bounds().map(|b| {
        b.l1 * ((*dx as f64).sqrt() + (*dy as f64).sqrt()) / (2.0 * grid_points_per_dim as f64)
    });
    Ok(GridNi { value: best_y - best_x, lipschitz_slack: slack })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultistartConfig {
    pub restarts: usize,
    pub ascent_steps: usize,
    pub ascent_rate: f64,
    pub seed: u64,
}

impl MultistartConfig {
    /// 20 restarts, 200 steps, rate `0.1 / L1` (or `0.01` without bounds).
    pub fn defaults_for(oracle: &dyn PayoffOracle, seed: u64) -> Self {
        let ascent_rate = match oracle.smoothness_bounds() {
            Some(b) if b.l1 > 0.0 => 0.1 / b.l1,
            _ => 0.01,
        };
        MultistartConfig { restarts: 20, ascent_steps: 200, ascent_rate, seed }
    }
}

/// Best value of a first variation found by projected gradient search.
/// `direction = 1` maximizes, `-1` minimizes. Finite domains are enumerated.
fn search<R: Rng + ?Sized>(
    domain: &DomainSpec,
    labels: usize,
    warm: &Ensemble,
    direction: f64,
    cfg: &MultistartConfig,
    rng: &mut R,
    value_and_grad: impl Fn(Site) -> (f64, Vec<f64>),
) -> Result<f64> {
    let better = |a: f64, b: f64| if direction > 0.0 { a.max(b) } else { a.min(b) };
    let mut best = -direction * f64::INFINITY;
    if let DomainSpec::FixedFinite { points } = domain {
        for (label, p) in points.iter().enumerate() {
            best = better(best, value_and_grad(Site::new(label, p)).0);
        }
        return Ok(best);
    }
    for label in 0..labels {
        let mut starts: Vec<Vec<f64>> = (0..cfg.restarts).map(|_| domain.random_point(rng)).collect();
        starts.extend((0..warm.len()).filter(|&i| warm.labels[i] == label).map(|i| warm.positions[i].clone()));
        for start in starts {
            let mut x = start;
            let (mut v, mut g) = value_and_grad(Site::new(label, &x));
            best = better(best, v);
            for _ in 0..cfg.ascent_steps {
                let step: Vec<f64> = domain.tangent(&x, &g).into_iter().map(|c| direction * cfg.ascent_rate * c).collect();
                x = domain.retract(&x, &step)?;
                (v, g) = value_and_grad(Site::new(label, &x));
                best = better(best, v);
            }
        }
    }
    Ok(best)
}

/// `max_y (μᵀF)(y)` by multistart projected gradient ascent, warm-started
/// from the max player's particles `warm`.
pub fn best_response_max(
    oracle: &dyn PayoffOracle,
    mu: &Ensemble,
    warm: &Ensemble,
    cfg: &MultistartConfig,
) -> Result<f64> {
    let mut rng = crate::rng::substream(cfg.seed, "multistart-max");
    let a = mu.weights();
    search(oracle.y_domain(), oracle.y_labels(), warm, 1.0, cfg, &mut rng, |y| {
        first_variation_y_grad(oracle, mu, &a, y)
    })
}

/// `min_x (Fν)(x)` by multistart projected gradient descent, warm-started
/// from the min player's particles `warm`.
pub fn best_response_min(
    oracle: &dyn PayoffOracle,
    nu: &Ensemble,
    warm: &Ensemble,
    cfg: &MultistartConfig,
) -> Result<f64> {
    let mut rng = crate::rng::substream(cfg.seed, "multistart-min");
    let b = nu.weights();
    search(oracle.x_domain(), oracle.x_labels(), warm, -1.0, cfg, &mut rng, |x| {
        first_variation_x_grad(oracle, nu, &b, x)
    })
}

/// NI error with both best responses found by multistart search.
pub fn ni_error_multistart(oracle: &dyn PayoffOracle, state: &SaddleState, cfg: &MultistartConfig) -> Result<f64> {
    let max = best_response_max(oracle, &state.mu, &state.nu, cfg)?;
    let min = best_response_min(oracle, &state.nu, &state.mu, cfg)?;
    Ok(max - min)
}
