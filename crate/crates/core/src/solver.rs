//! Conic particle updates.
//!
//! One outer step runs an inner loop of linearized proximal updates. Each
//! inner iterate `z̃^{l+1}` is computed from the gradient of
//! `F(a, x, b, y) = Σ_ij a_i b_j f(x_i, y_j)` at `z̃^l`:
//!
//! ```text
//! ã^{l+1} ∝ anchor_a · exp(-η ∂_a F(z̃^l))
//! x̃^{l+1} = retract(anchor_x, -σ / a^k · ∂_x F(z̃^l))
//! ```
//!
//! and symmetrically (ascent) for `b, y`. With [`AnchorMode::ProxAnchored`]
//! the anchor is the outer iterate `z^k` (the inner loop solves the
//! linearized prox subproblem); with [`AnchorMode::LiteralAlg1`] it is the
//! previous inner iterate. One inner step is mirror descent-ascent, two
//! prox-anchored steps are mirror prox, and iterating to a fixed point
//! approximates the proximal point update.

use std::time::Instant;

use crate::games::PayoffOracle;
use crate::geometry::DomainSpec;
use crate::particles::{mirror_weight_step, Ensemble, SaddleState};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InnerSteps {
    Fixed(usize),
    ToTolerance { tol: f64, max_inner: usize },
}

impl InnerSteps {
    pub const DEFAULT_TOL: f64 = 1e-10;
    pub const DEFAULT_MAX_INNER: usize = 200;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnchorMode {
    ProxAnchored,
    LiteralAlg1,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub eta: f64,
    pub sigma: f64,
    pub outer_steps: usize,
    pub inner: InnerSteps,
    pub anchor: AnchorMode,
    pub seed: u64,
    pub record_every: usize,
}

impl SolverConfig {
    /// Conic particle mirror prox with the given step-sizes.
    pub fn mirror_prox(eta: f64, sigma: f64, outer_steps: usize) -> Self {
        SolverConfig {
            eta,
            sigma,
            outer_steps,
            inner: InnerSteps::Fixed(2),
            anchor: AnchorMode::ProxAnchored,
            seed: 0,
            record_every: 1,
        }
    }

    /// Conic particle mirror descent-ascent.
    pub fn descent_ascent(eta: f64, sigma: f64, outer_steps: usize) -> Self {
        SolverConfig {
            inner: InnerSteps::Fixed(1),
            ..Self::mirror_prox(eta, sigma, outer_steps)
        }
    }

    /// `σ = 0` is allowed: positions then stay put.
    pub fn validate(&self) -> Result<()> {
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::InvalidArgument(format!("eta must be positive, got {}", self.eta)));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidArgument(format!("sigma must be nonnegative, got {}", self.sigma)));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidArgument("record_every must be positive".into()));
        }
        match self.inner {
            InnerSteps::Fixed(0) => Err(Error::InvalidArgument("inner steps must be at least 1".into())),
            InnerSteps::ToTolerance { tol, max_inner } if !(tol > 0.0) || max_inner == 0 => Err(
                Error::InvalidArgument("to_tolerance needs tol > 0 and max_inner ≥ 1".into()),
            ),
            _ => Ok(()),
        }
    }
}

/// Partial derivatives of `F_{n,m}` at a state.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub grad_a: Vec<f64>,
    pub grad_x: Vec<Vec<f64>>,
    pub grad_b: Vec<f64>,
    pub grad_y: Vec<Vec<f64>>,
}

/// Gradients with the `a_i` (resp. `b_j`) factor of the position
/// derivatives left out: `gx[i] = Σ_j b_j ∂ₓf(x_i, y_j)`.
struct FieldGradients {
    ga: Vec<f64>,
    gx: Vec<Vec<f64>>,
    gb: Vec<f64>,
    gy: Vec<Vec<f64>>,
}

fn field_gradients(oracle: &dyn PayoffOracle, state: &SaddleState) -> FieldGradients {
    let (mu, nu) = (&state.mu, &state.nu);
    let a = mu.weights();
    let b = nu.weights();
    let dx = mu.positions.first().map_or(0, Vec::len);
    let dy = nu.positions.first().map_or(0, Vec::len);
    let mut ga = vec![0.0; mu.len()];
    let mut gx = vec![vec![0.0; dx]; mu.len()];
    let mut gb = vec![0.0; nu.len()];
    let mut gy = vec![vec![0.0; dy]; nu.len()];
    // Fixed i-major, j-minor accumulation order keeps results reproducible.
    for i in 0..mu.len() {
        for j in 0..nu.len() {
            let (v, fx, fy) = oracle.eval_and_grads(mu.site(i), nu.site(j));
            ga[i] += b[j] * v;
            gb[j] += a[i] * v;
            for (g, d) in gx[i].iter_mut().zip(&fx) {
                *g += b[j] * d;
            }
            for (g, d) in gy[j].iter_mut().zip(&fy) {
                *g += a[i] * d;
            }
        }
    }
    FieldGradients { ga, gx, gb, gy }
}

/// `∂F/∂a_i = (Gb)_i`, `∂F/∂x_i = a_i Σ_j b_j ∂ₓf(x_i, y_j)`, and the
/// symmetric quantities for the max player.
pub fn assemble_gradients(oracle: &dyn PayoffOracle, state: &SaddleState) -> Gradients {
    let f = field_gradients(oracle, state);
    let a = state.mu.weights();
    let b = state.nu.weights();
    Gradients {
        grad_a: f.ga,
        grad_x: f.gx.into_iter().zip(&a).map(|(g, w)| g.into_iter().map(|v| w * v).collect()).collect(),
        grad_b: f.gb,
        grad_y: f.gy.into_iter().zip(&b).map(|(g, w)| g.into_iter().map(|v| w * v).collect()).collect(),
    }
}

#[allow(clippy::too_many_arguments)]
fn update_player(
    domain: &DomainSpec,
    outer: &Ensemble,
    base: &Ensemble,
    current: &Ensemble,
    gw: &[f64],
    gp: &[Vec<f64>],
    eta: f64,
    sigma: f64,
    sign: f64,
) -> Result<Ensemble> {
    let log_weights = mirror_weight_step(&base.log_weights, gw, eta, sign);
    let positions = if sigma == 0.0 || domain.is_fixed() {
        base.positions.clone()
    } else {
        base.positions
            .iter()
            .enumerate()
            .map(|(i, x)| {
                // ∂_x F carries the current weight; the prox metric carries the outer weight.
                let ratio = (current.log_weights[i] - outer.log_weights[i]).exp();
                let step: Vec<f64> = domain.tangent(x, &gp[i]).into_iter().map(|v| sign * sigma * ratio * v).collect();
                domain.retract(x, &step)
            })
            .collect::<Result<Vec<_>>>()?
    };
    Ok(Ensemble {
        log_weights,
        positions,
        labels: outer.labels.clone(),
    })
}

/// One inner iteration from `current`, anchored according to `anchor`.
pub fn inner_step(
    oracle: &dyn PayoffOracle,
    outer: &SaddleState,
    current: &SaddleState,
    eta: f64,
    sigma: f64,
    anchor: AnchorMode,
) -> Result<SaddleState> {
    let g = field_gradients(oracle, current);
    let base = match anchor {
        AnchorMode::ProxAnchored => outer,
        AnchorMode::LiteralAlg1 => current,
    };
    let mu = update_player(oracle.x_domain(), &outer.mu, &base.mu, &current.mu, &g.ga, &g.gx, eta, sigma, -1.0)?;
    let nu = update_player(oracle.y_domain(), &outer.nu, &base.nu, &current.nu, &g.gb, &g.gy, eta, sigma, 1.0)?;
    Ok(SaddleState { mu, nu })
}

/// One outer iteration `z^k → z^{k+1}`.
pub fn cp_outer_step(oracle: &dyn PayoffOracle, z: &SaddleState, config: &SolverConfig) -> Result<SaddleState> {
    match config.inner {
        InnerSteps::Fixed(steps) => {
            let mut current = z.clone();
            for _ in 0..steps {
                current = inner_step(oracle, z, &current, config.eta, config.sigma, config.anchor)?;
            }
            Ok(current)
        }
        InnerSteps::ToTolerance { tol, max_inner } => {
            Ok(pp_fixed_point(oracle, z, config.eta, config.sigma, tol, max_inner)?.state)
        }
    }
}

#[derive(Clone, Debug)]
pub struct FixedPoint {
    pub state: SaddleState,
    /// Size of the last inner increment.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Distance used for inner-loop convergence and MP/PP comparison:
/// per player, `ℓ₁` over the weights plus the largest particle displacement,
/// summed over both players.
pub fn combined_distance(x_domain: &DomainSpec, y_domain: &DomainSpec, p: &SaddleState, q: &SaddleState) -> Result<f64> {
    let weights = l1_weight_gap(&p.mu, &q.mu) + l1_weight_gap(&p.nu, &q.nu);
    let moves = max_displacement(x_domain, &p.mu, &q.mu)? + max_displacement(y_domain, &p.nu, &q.nu)?;
    Ok(weights + moves)
}

pub fn l1_weight_gap(p: &Ensemble, q: &Ensemble) -> f64 {
    p.log_weights.iter().zip(&q.log_weights).map(|(a, b)| (a.exp() - b.exp()).abs()).sum()
}

pub fn max_displacement(domain: &DomainSpec, p: &Ensemble, q: &Ensemble) -> Result<f64> {
    let mut best = 0.0f64;
    for (x, y) in p.positions.iter().zip(&q.positions) {
        best = best.max(domain.distance(x, y)?);
    }
    Ok(best)
}

/// Iterates the prox-anchored inner map `P` until `‖P(w) - w‖` drops below
/// `tol` or `max_inner` iterations have run.
///
/// Iterates are relaxed, `w ← w + θ (P(w) - w)`, with `θ` halved whenever
/// the residual grows. Plain iteration (`θ = 1`) diverges once `σ` times the
/// curvature of the first variation exceeds 1; relaxation keeps the same
/// fixed point.
pub fn pp_fixed_point(
    oracle: &dyn PayoffOracle,
    z: &SaddleState,
    eta: f64,
    sigma: f64,
    tol: f64,
    max_inner: usize,
) -> Result<FixedPoint> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    let (xd, yd) = (oracle.x_domain(), oracle.y_domain());
    let relax_both = |from: &SaddleState, to: &SaddleState, theta: f64| -> Result<SaddleState> {
        Ok(SaddleState { mu: relax(xd, &from.mu, &to.mu, theta)?, nu: relax(yd, &from.nu, &to.nu, theta)? })
    };
    // last accepted iterate, its image and residual
    let mut accepted: Option<(SaddleState, SaddleState)> = None;
    let mut residual = f64::INFINITY;
    let mut theta = 1.0;
    let mut candidate = z.clone();
    for it in 1..=max_inner {
        let image = inner_step(oracle, z, &candidate, eta, sigma, AnchorMode::ProxAnchored)?;
        let r = combined_distance(xd, yd, &image, &candidate)?;
        if r < tol {
            return Ok(FixedPoint { state: image, residual: r, iterations: it, converged: true });
        }
        if r <= residual {
            residual = r;
            accepted = Some((candidate, image));
        } else {
            // backtrack with a shorter relaxation step
            theta *= 0.5;
        }
        let (base, base_image) = accepted.as_ref().expect("the first iterate is always accepted");
        candidate = relax_both(base, base_image, theta)?;
    }
    let state = accepted.map_or_else(|| z.clone(), |(_, image)| image);
    Ok(FixedPoint { state, residual, iterations: max_inner, converged: false })
}

fn relax(domain: &DomainSpec, from: &Ensemble, to: &Ensemble, theta: f64) -> Result<Ensemble> {
    if theta == 1.0 {
        return Ok(to.clone());
    }
    let moved: Vec<f64> = from.log_weights.iter().zip(&to.log_weights).map(|(a, b)| a + theta * (b - a)).collect();
    let positions = if domain.is_fixed() {
        from.positions.clone()
    } else {
        from.positions
            .iter()
            .zip(&to.positions)
            .map(|(x, y)| {
                let step: Vec<f64> = domain.chart_offset(x, y).into_iter().map(|v| theta * v).collect();
                domain.retract(x, &step)
            })
            .collect::<Result<Vec<_>>>()?
    };
    Ensemble::new(moved, positions, from.labels.clone())
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub k: usize,
    /// `‖a^k - a^{k-1}‖₁` for the step that produced iterate `k` (0 at `k = 0`).
    pub weight_movement_mu: f64,
    pub weight_movement_nu: f64,
    pub max_position_movement_mu: f64,
    pub max_position_movement_nu: f64,
    /// Seconds since the trajectory started.
    pub wall_time: f64,
}

impl StepRecord {
    /// Checks the per-step movement bounds `‖Δa‖₁ ≤ e^{2ηL0} - 1` and
    /// `‖Δx_i‖ ≤ σ e^{2ηL0} L1` (same for the max player).
    pub fn within_movement_bounds(&self, bounds: &crate::games::SmoothnessBounds, eta: f64, sigma: f64) -> bool {
        let growth = (2.0 * eta * bounds.l0).exp();
        let slack = 1e-12;
        self.weight_movement_mu <= growth - 1.0 + slack
            && self.weight_movement_nu <= growth - 1.0 + slack
            && self.max_position_movement_mu <= sigma * growth * bounds.l1 + slack
            && self.max_position_movement_nu <= sigma * growth * bounds.l1 + slack
    }
}

pub struct Trajectory {
    pub records: Vec<StepRecord>,
    pub final_state: SaddleState,
}

/// Applies `config.outer_steps` outer steps, recording (and calling `hook`)
/// at `k = 0, r, 2r, ...` where `r = record_every`.
pub fn run_trajectory(
    oracle: &dyn PayoffOracle,
    init: &SaddleState,
    config: &SolverConfig,
    mut hook: impl FnMut(usize, &SaddleState, &StepRecord) -> Result<()>,
) -> Result<Trajectory> {
    config.validate()?;
    let start = Instant::now();
    let mut state = init.clone();
    let mut records = Vec::with_capacity(config.outer_steps / config.record_every + 1);
    let first = StepRecord {
        k: 0,
        weight_movement_mu: 0.0,
        weight_movement_nu: 0.0,
        max_position_movement_mu: 0.0,
        max_position_movement_nu: 0.0,
        wall_time: 0.0,
    };
    hook(0, &state, &first)?;
    records.push(first);
    for k in 1..=config.outer_steps {
        let next = cp_outer_step(oracle, &state, config).map_err(|e| Error::Step { k, source: Box::new(e) })?;
        if k % config.record_every == 0 {
            let rec = StepRecord {
                k,
                weight_movement_mu: l1_weight_gap(&next.mu, &state.mu),
                weight_movement_nu: l1_weight_gap(&next.nu, &state.nu),
                max_position_movement_mu: max_displacement(oracle.x_domain(), &next.mu, &state.mu)?,
                max_position_movement_nu: max_displacement(oracle.y_domain(), &next.nu, &state.nu)?,
                wall_time: start.elapsed().as_secs_f64(),
            };
            hook(k, &next, &rec).map_err(|e| Error::Step { k, source: Box::new(e) })?;
            records.push(rec);
        }
        state = next;
    }
    Ok(Trajectory { records, final_state: state })
}
