//! Two-layer network classification games.
//!
//! The max player is a distribution over signed neurons `θ ∈ Θ₊ ⊔ Θ₋`
//! (label 0 is the positive copy, label 1 the negative copy of the unit
//! sphere). The min player is a distribution over training samples, either
//! exactly (max-margin) or up to a perturbation `u` in a radius-`r` ball
//! (distributionally-robust margin).

use super::{PayoffOracle, Site, SmoothnessBounds};
use crate::geometry::{norm, DomainSpec};
use crate::{Error, Result};

pub const POSITIVE: usize = 0;
pub const NEGATIVE: usize = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub x: Vec<f64>,
    pub y: f64,
}

/// Five labelled points in the plane: two positives, three negatives.
pub fn toy_dataset() -> Vec<Sample> {
    let s = |a: f64, b: f64, y: f64| Sample { x: vec![a, b], y };
    vec![
        s(0.0, 2.0, 1.0),
        s(-1.0, 0.5, 1.0),
        s(1.0, -0.5, -1.0),
        s(-0.5, -1.0, -1.0),
        s(0.8, 0.7, -1.0),
    ]
}

#[derive(Clone, Debug)]
pub struct TwoLayerMarginGame {
    samples: Vec<Sample>,
    power: u32,
    x_domain: DomainSpec,
    y_domain: DomainSpec,
}

fn activation(s: f64, p: u32) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        s.powi(p as i32)
    }
}

fn activation_slope(s: f64, p: u32) -> f64 {
    if s <= 0.0 {
        0.0
    } else if p == 1 {
        1.0
    } else {
        p as f64 * s.powi(p as i32 - 1)
    }
}

fn sign_of(label: usize) -> f64 {
    if label == POSITIVE {
        1.0
    } else {
        -1.0
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

impl TwoLayerMarginGame {
    /// Builds the game; `power = 1` (ReLU, non-smooth payoff) is rejected
    /// unless `allow_unsmooth` is set.
    pub fn new(mut samples: Vec<Sample>, power: u32, append_bias: bool, allow_unsmooth: bool) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("dataset is empty".into()));
        }
        if power == 0 {
            return Err(Error::InvalidArgument("activation power must be positive".into()));
        }
        if power == 1 && !allow_unsmooth {
            return Err(Error::InvalidArgument(
                "activation power 1 has a non-Lipschitz gradient; set allow_unsmooth to use it".into(),
            ));
        }
        let dim = samples[0].x.len();
        for s in &samples {
            if s.x.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: s.x.len() });
            }
            if s.y != 1.0 && s.y != -1.0 {
                return Err(Error::InvalidArgument(format!("label {} is not ±1", s.y)));
            }
        }
        if append_bias {
            for s in &mut samples {
                s.x.push(1.0);
            }
        }
        let d = samples[0].x.len();
        if d < 2 {
            return Err(Error::InvalidArgument("neuron sphere needs ambient dimension ≥ 2".into()));
        }
        let x_domain = DomainSpec::fixed_finite((0..samples.len()).map(|i| vec![i as f64]).collect());
        Ok(TwoLayerMarginGame {
            samples,
            power,
            x_domain,
            y_domain: DomainSpec::sphere(d),
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn covariate_dim(&self) -> usize {
        self.samples[0].x.len()
    }

    /// `sign(label) · y_i · max(0, θᵀx_i)^p`.
    pub fn margin_payoff(&self, sample: usize, label: usize, theta: &[f64]) -> f64 {
        let s = &self.samples[sample];
        unit_payoff(label, s.y, &s.x, theta, self.power)
    }

    /// Labels for `2m` neurons: the first `m` positive, the rest negative.
    pub fn neuron_labels(m: usize) -> Vec<usize> {
        (0..2 * m).map(|j| if j < m { POSITIVE } else { NEGATIVE }).collect()
    }

    /// `NN(x; ν) = Σ_j b_j sign_j σ(θ_jᵀ x)`.
    pub fn network_output(&self, nu: &crate::particles::Ensemble, x: &[f64]) -> f64 {
        let w = nu.weights();
        (0..nu.len())
            .map(|j| w[j] * sign_of(nu.labels[j]) * activation(dot(&nu.positions[j], x), self.power))
            .sum()
    }

    /// `min_i y_i NN(x_i; ν)`.
    pub fn margin(&self, nu: &crate::particles::Ensemble) -> f64 {
        self.samples
            .iter()
            .map(|s| s.y * self.network_output(nu, &s.x))
            .fold(f64::INFINITY, f64::min)
    }

    fn max_norm(&self) -> f64 {
        self.samples.iter().map(|s| norm(&s.x)).fold(0.0, f64::max)
    }
}

fn unit_payoff(label: usize, y: f64, x: &[f64], theta: &[f64], p: u32) -> f64 {
    sign_of(label) * y * activation(dot(theta, x), p)
}

fn unit_grad_theta(label: usize, y: f64, x: &[f64], theta: &[f64], p: u32) -> (f64, Vec<f64>, f64) {
    let s = dot(theta, x);
    let scale = sign_of(label) * y;
    let slope = scale * activation_slope(s, p);
    (scale * activation(s, p), x.iter().map(|v| slope * v).collect(), slope)
}

impl PayoffOracle for TwoLayerMarginGame {
    fn x_domain(&self) -> &DomainSpec {
        &self.x_domain
    }

    fn y_domain(&self) -> &DomainSpec {
        &self.y_domain
    }

    fn x_labels(&self) -> usize {
        self.samples.len()
    }

    fn y_labels(&self) -> usize {
        2
    }

    fn eval(&self, x: Site, y: Site) -> f64 {
        self.margin_payoff(x.label, y.label, y.pos)
    }

    fn eval_and_grads(&self, x: Site, y: Site) -> (f64, Vec<f64>, Vec<f64>) {
        let s = &self.samples[x.label];
        let (v, gy, _) = unit_grad_theta(y.label, s.y, &s.x, y.pos, self.power);
        (v, vec![0.0; x.pos.len()], gy)
    }

    fn smoothness_bounds(&self) -> Option<SmoothnessBounds> {
        let r = self.max_norm().powi(self.power as i32);
        Some(SmoothnessBounds { l0: 2.0 * r, l1: self.power as f64 * r })
    }
}

/// Margin game where each sample may be moved inside a radius-`r` ball
/// (bias coordinate pinned when a bias is appended). The min player's
/// particle with label `k` sits at `x̂_k + u`.
#[derive(Clone, Debug)]
pub struct DistribRobustGame {
    inner: TwoLayerMarginGame,
    radius: f64,
    particles_per_sample: usize,
    x_domain: DomainSpec,
}

impl DistribRobustGame {
    pub fn new(inner: TwoLayerMarginGame, radius: f64, particles_per_sample: usize, bias_appended: bool) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::InvalidArgument(format!("invalid robustness radius {radius}")));
        }
        if particles_per_sample == 0 {
            return Err(Error::InvalidArgument("particles_per_sample must be positive".into()));
        }
        let d = inner.covariate_dim();
        let mut frozen = vec![false; d];
        if bias_appended {
            frozen[d - 1] = true;
        }
        Ok(DistribRobustGame {
            inner,
            radius,
            particles_per_sample,
            x_domain: DomainSpec::ball(d, radius, frozen),
        })
    }

    pub fn inner(&self) -> &TwoLayerMarginGame {
        &self.inner
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn particles_per_sample(&self) -> usize {
        self.particles_per_sample
    }

    /// Sample labels for the adversary: `n` consecutive particles per sample.
    pub fn adversary_labels(&self) -> Vec<usize> {
        (0..self.inner.samples.len())
            .flat_map(|k| std::iter::repeat_n(k, self.particles_per_sample))
            .collect()
    }

    fn perturbed(&self, sample: usize, u: &[f64]) -> Vec<f64> {
        self.inner.samples[sample].x.iter().zip(u).map(|(a, b)| a + b).collect()
    }

    /// Margin payoff at the perturbed covariate `x̂_k + u`.
    pub fn robust_payoff(&self, sample: usize, u: &[f64], label: usize, theta: &[f64]) -> f64 {
        let s = &self.inner.samples[sample];
        unit_payoff(label, s.y, &self.perturbed(sample, u), theta, self.inner.power)
    }
}

impl PayoffOracle for DistribRobustGame {
    fn x_domain(&self) -> &DomainSpec {
        &self.x_domain
    }

    fn y_domain(&self) -> &DomainSpec {
        &self.inner.y_domain
    }

    fn x_labels(&self) -> usize {
        self.inner.samples.len()
    }

    fn y_labels(&self) -> usize {
        2
    }

    fn eval(&self, x: Site, y: Site) -> f64 {
        self.robust_payoff(x.label, x.pos, y.label, y.pos)
    }

    fn eval_and_grads(&self, x: Site, y: Site) -> (f64, Vec<f64>, Vec<f64>) {
        let s = &self.inner.samples[x.label];
        let xp = self.perturbed(x.label, x.pos);
        let (v, gy, slope) = unit_grad_theta(y.label, s.y, &xp, y.pos, self.inner.power);
        let gx = y.pos.iter().map(|t| slope * t).collect();
        (v, gx, gy)
    }

    fn smoothness_bounds(&self) -> Option<SmoothnessBounds> {
        let p = self.inner.power as i32;
        let r = self.inner.max_norm() + self.radius;
        Some(SmoothnessBounds {
            l0: 2.0 * r.powi(p),
            l1: self.inner.power as f64 * r.powi(p - 1) * r.max(1.0),
        })
    }
}
