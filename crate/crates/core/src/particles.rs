//! Weighted particle ensembles and weight-space primitives.
//!
//! Weights are stored as logs. The algorithm drives weights of particles
//! away from the equilibrium support towards zero geometrically, and log
//! storage keeps those values representable long after `exp` would
//! underflow.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::games::Site;
use crate::geometry::DomainSpec;
use crate::{Error, Result};

/// Tolerance on `logsumexp(log_weights) = 0`.
pub const SIMPLEX_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    pub log_weights: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
    /// Copy index of each particle on labelled domains; all zero otherwise.
    pub labels: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SaddleState {
    /// Min player.
    pub mu: Ensemble,
    /// Max player.
    pub nu: Ensemble,
}

impl SaddleState {
    pub fn new(mu: Ensemble, nu: Ensemble) -> Self {
        SaddleState { mu, nu }
    }
}

impl Ensemble {
    /// Builds an ensemble, normalizing the log-weights onto the simplex.
    pub fn new(log_weights: Vec<f64>, positions: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        if log_weights.is_empty() {
            return Err(Error::InvalidArgument("ensemble must have at least one particle".into()));
        }
        for len in [positions.len(), labels.len()] {
            if len != log_weights.len() {
                return Err(Error::DimensionMismatch { expected: log_weights.len(), got: len });
            }
        }
        if log_weights.iter().any(|w| w.is_nan() || *w == f64::INFINITY) {
            return Err(Error::InvalidArgument("log-weights must be finite or -inf".into()));
        }
        Ok(Ensemble {
            log_weights: log_normalize(&log_weights),
            positions,
            labels,
        })
    }

    pub fn uniform(positions: Vec<Vec<f64>>) -> Result<Self> {
        let n = positions.len();
        Self::new(vec![0.0; n], positions, vec![0; n])
    }

    pub fn from_weights(weights: &[f64], positions: Vec<Vec<f64>>) -> Result<Self> {
        let n = positions.len();
        Self::new(weights.iter().map(|w| w.ln()).collect(), positions, vec![0; n])
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: labels.len() });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.log_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_weights.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.log_weights.iter().map(|w| w.exp()).collect()
    }

    pub fn site(&self, i: usize) -> Site<'_> {
        Site::new(self.labels[i], &self.positions[i])
    }

    /// Checks the simplex invariant and domain membership of every particle.
    pub fn validate(&self, domain: &DomainSpec) -> Result<()> {
        let lse = logsumexp(&self.log_weights);
        if !(lse.abs() <= SIMPLEX_TOL) {
            return Err(Error::InvalidArgument(format!("log-weights are off the simplex (logsumexp = {lse:e})")));
        }
        for (i, p) in self.positions.iter().enumerate() {
            if !domain.contains(p) {
                return Err(Error::InvalidArgument(format!("particle {i} at {p:?} is outside {}", domain.descriptor())));
            }
            if let DomainSpec::FixedFinite { points } = domain {
                if points.get(self.labels[i]) != Some(p) {
                    return Err(Error::InvalidArgument(format!("particle {i} label does not index its point")));
                }
            }
        }
        Ok(())
    }
}

pub fn logsumexp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn log_normalize(v: &[f64]) -> Vec<f64> {
    let z = logsumexp(v);
    v.iter().map(|x| x - z).collect()
}

pub fn weights(ensemble: &Ensemble) -> Vec<f64> {
    ensemble.weights()
}

/// Entropic mirror step on the simplex, in log space:
/// `normalize(anchor + sign · η · g)`. The min player descends with
/// `sign = -1`, the max player ascends with `sign = +1`.
pub fn mirror_weight_step(anchor: &[f64], gradient: &[f64], eta: f64, sign: f64) -> Vec<f64> {
    let moved: Vec<f64> = anchor.iter().zip(gradient).map(|(a, g)| a + sign * eta * g).collect();
    log_normalize(&moved)
}

/// `KL(a, b) = Σ a_i log(a_i / b_i)`, with `0 log 0 = 0`; `+∞` when `a` is
/// not absolutely continuous with respect to `b`.
pub fn kl_divergence(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    let mut total = 0.0;
    for (&p, &q) in a.iter().zip(b) {
        if p > 0.0 {
            if q <= 0.0 {
                return Ok(f64::INFINITY);
            }
            total += p * (p / q).ln();
        }
    }
    Ok(total.max(0.0))
}

/// Unnormalized relative entropy `p log(p/q) - p + q` for scalars.
pub fn relative_entropy_scalar(p: f64, q: f64) -> f64 {
    if p == 0.0 {
        q
    } else if q <= 0.0 {
        f64::INFINITY
    } else {
        p * (p / q).ln() - p + q
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitMode {
    UniformRandom,
    Grid,
    /// Particles spread over reference atoms, each offset uniformly inside a
    /// metric ball of radius `jitter`.
    Near { reference: Ensemble, jitter: f64 },
}

#[derive(Clone, Debug)]
pub struct Initialized {
    pub ensemble: Ensemble,
    /// Set when near-mode jitter reaches half the minimal atom separation.
    pub warning: Option<String>,
}

/// Builds an ensemble of `n` uniformly weighted particles.
///
/// On a finite domain each particle's label is the index of its point.
pub fn init_ensemble(domain: &DomainSpec, n: usize, mode: &InitMode, seed: u64) -> Result<Initialized> {
    init_ensemble_with(domain, n, mode, &mut crate::rng::substream(seed, "init"))
}

/// Same as [`init_ensemble`], drawing from a caller-provided stream.
pub fn init_ensemble_with<R: Rng + ?Sized>(
    domain: &DomainSpec,
    n: usize,
    mode: &InitMode,
    rng: &mut R,
) -> Result<Initialized> {
    domain.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let mut warning = None;
    let (positions, labels): (Vec<Vec<f64>>, Vec<usize>) = match (mode, domain) {
        (InitMode::UniformRandom, DomainSpec::FixedFinite { points }) => (0..n)
            .map(|_| {
                let i = rng.random_range(0..points.len());
                (points[i].clone(), i)
            })
            .unzip(),
        (InitMode::Grid, DomainSpec::FixedFinite { points }) => {
            (0..n).map(|p| (points[p % points.len()].clone(), p % points.len())).unzip()
        }
        (InitMode::UniformRandom, _) => ((0..n).map(|_| domain.random_point(rng)).collect(), vec![0; n]),
        (InitMode::Grid, DomainSpec::Torus { dim }) => {
            let per_axis = (n as f64).powf(1.0 / *dim as f64).ceil().max(1.0) as usize;
            let pos = (0..n)
                .map(|p| {
                    let mut idx = p;
                    (0..*dim)
                        .map(|_| {
                            let c = idx % per_axis;
                            idx /= per_axis;
                            c as f64 / per_axis as f64
                        })
                        .rev()
                        .collect()
                })
                .collect();
            (pos, vec![0; n])
        }
        (InitMode::Grid, DomainSpec::Sphere { ambient_dim: 2 }) => {
            let pos = (0..n)
                .map(|p| {
                    let t = 2.0 * std::f64::consts::PI * p as f64 / n as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect();
            (pos, vec![0; n])
        }
        (InitMode::Grid, _) => {
            return Err(Error::UnsupportedDomain {
                op: "grid initialization",
                hint: "use a torus, a circle or a finite domain",
            })
        }
        (InitMode::Near { reference, jitter }, _) => {
            if !(jitter.is_finite() && *jitter >= 0.0) {
                return Err(Error::InvalidArgument(format!("invalid jitter {jitter}")));
            }
            let atoms = reference.len();
            if n < atoms {
                return Err(Error::InvalidArgument(format!("n = {n} is smaller than the {atoms} reference atoms")));
            }
            let sep = min_separation(domain, reference)?;
            if *jitter > 0.0 && *jitter >= sep / 2.0 {
                warning = Some(format!(
                    "jitter {jitter} is at least half the minimal atom separation {sep}; Lyapunov supports may overlap"
                ));
            }
            let per_atom = n.div_ceil(atoms);
            let mut pos = Vec::with_capacity(n);
            let mut labels = Vec::with_capacity(n);
            for p in 0..n {
                let atom = p / per_atom;
                let centre = &reference.positions[atom];
                let offset = ball_offset(rng, centre.len(), *jitter);
                let moved: Vec<f64> = centre.iter().zip(&offset).map(|(c, o)| c + o).collect();
                pos.push(domain.project(&moved)?);
                labels.push(reference.labels[atom]);
            }
            (pos, labels)
        }
    };
    Ok(Initialized {
        ensemble: Ensemble::new(vec![0.0; n], positions, labels)?,
        warning,
    })
}

/// Uniform sample from the Euclidean ball of radius `r` in `R^d`.
fn ball_offset<R: Rng + ?Sized>(rng: &mut R, d: usize, r: f64) -> Vec<f64> {
    if r == 0.0 {
        return vec![0.0; d];
    }
    let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
    let n = crate::geometry::norm(&g);
    let u: f64 = rng.random();
    let radius = r * u.powf(1.0 / d as f64);
    g.iter().map(|v| radius * v / n).collect()
}

/// Smallest distance between two atoms with the same label.
pub fn min_separation(domain: &DomainSpec, atoms: &Ensemble) -> Result<f64> {
    let mut best = f64::INFINITY;
    for i in 0..atoms.len() {
        for j in i + 1..atoms.len() {
            if atoms.labels[i] == atoms.labels[j] {
                best = best.min(domain.distance(&atoms.positions[i], &atoms.positions[j])?);
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn weights_examples() {
        let l2 = 2f64.ln();
        let e = Ensemble::new(vec![-l2, -l2], vec![vec![0.1], vec![0.2]], vec![0, 0]).unwrap();
        assert!(close(&e.weights(), &[0.5, 0.5], 1e-15));
        let one = Ensemble::uniform(vec![vec![0.3]]).unwrap();
        assert_eq!(one.weights(), vec![1.0]);
        let four = Ensemble::uniform(vec![vec![0.0]; 4]).unwrap();
        assert!(close(&four.weights(), &[0.25; 4], 1e-15));
    }

    #[test]
    fn mirror_step_examples() {
        let a = vec![0.5f64.ln(); 2];
        let out = mirror_weight_step(&a, &[1.0, 0.0], 2f64.ln(), -1.0);
        assert!(close(&out.iter().map(|v| v.exp()).collect::<Vec<_>>(), &[1.0 / 3.0, 2.0 / 3.0], 1e-15));

        let anchor = vec![0.2f64.ln(), 0.3f64.ln(), 0.5f64.ln()];
        let same = mirror_weight_step(&anchor, &[4.0, 4.0, 4.0], 0.7, 1.0);
        assert!(close(&same, &anchor, 1e-14));
        assert!(close(&mirror_weight_step(&anchor, &[1.0, -2.0, 3.0], 0.0, -1.0), &anchor, 1e-15));
    }

    #[test]
    fn kl_examples() {
        let a = [0.2, 0.3, 0.5];
        assert_eq!(kl_divergence(&a, &a).unwrap(), 0.0);
        assert!((kl_divergence(&[1.0, 0.0], &[0.5, 0.5]).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(kl_divergence(&[0.5, 0.5], &[1.0, 0.0]).unwrap(), f64::INFINITY);
        assert!(kl_divergence(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn init_examples() {
        let t = DomainSpec::torus(1);
        let g = init_ensemble(&t, 4, &InitMode::Grid, 0).unwrap().ensemble;
        assert_eq!(g.positions, vec![vec![0.0], vec![0.25], vec![0.5], vec![0.75]]);

        let reference = Ensemble::uniform(vec![vec![0.375], vec![0.875]]).unwrap();
        let exact = init_ensemble(&t, 4, &InitMode::Near { reference: reference.clone(), jitter: 0.0 }, 3)
            .unwrap()
            .ensemble;
        assert_eq!(exact.positions, vec![vec![0.375], vec![0.375], vec![0.875], vec![0.875]]);

        let mode = InitMode::Near { reference: reference.clone(), jitter: 0.03 };
        let a = init_ensemble(&t, 4, &mode, 9).unwrap();
        let b = init_ensemble(&t, 4, &mode, 9).unwrap();
        assert_eq!(a.ensemble, b.ensemble);
        assert!(a.warning.is_none());
        a.ensemble.validate(&t).unwrap();
        for (p, c) in a.ensemble.positions.iter().zip([0.375, 0.375, 0.875, 0.875]) {
            assert!(t.distance(p, &[c]).unwrap() <= 0.03);
        }

        let wide = init_ensemble(&t, 4, &InitMode::Near { reference, jitter: 0.3 }, 1).unwrap();
        assert!(wide.warning.is_some());

        let r = init_ensemble(&DomainSpec::sphere(3), 10, &InitMode::UniformRandom, 2).unwrap().ensemble;
        r.validate(&DomainSpec::sphere(3)).unwrap();

        let fin = DomainSpec::fixed_finite(vec![vec![0.0], vec![1.0], vec![2.0]]);
        let f = init_ensemble(&fin, 3, &InitMode::Grid, 0).unwrap().ensemble;
        assert_eq!(f.labels, vec![0, 1, 2]);
        f.validate(&fin).unwrap();
    }

    proptest! {
        #[test]
        fn mirror_step_stays_on_simplex(
            w in prop::collection::vec(-30.0f64..0.0, 1..12),
            scale in 1.0f64..500.0,
            eta in 1e-3f64..2.0,
            seed in any::<u64>(),
        ) {
            let anchor = log_normalize(&w);
            let mut rng = crate::rng::substream(seed, "prop");
            let g: Vec<f64> = (0..w.len()).map(|_| (2.0 * rng.random::<f64>() - 1.0) * scale / eta).collect();
            let out = mirror_weight_step(&anchor, &g, eta, -1.0);
            prop_assert!(out.iter().all(|v| !v.is_nan() && *v <= 1e-15));
            prop_assert!(logsumexp(&out).abs() <= SIMPLEX_TOL);
            let back = mirror_weight_step(&out, &g, -eta, -1.0);
            let (pa, pb): (Vec<f64>, Vec<f64>) = (anchor.iter().map(|v| v.exp()).collect(), back.iter().map(|v| v.exp()).collect());
            prop_assert!(close(&pa, &pb, 1e-10));
        }

        #[test]
        fn mirror_step_respects_movement_bound(
            w in prop::collection::vec(-5.0f64..0.0, 2..10),
            l0 in 0.1f64..5.0,
            eta in 1e-3f64..0.5,
            seed in any::<u64>(),
        ) {
            let anchor = log_normalize(&w);
            let mut rng = crate::rng::substream(seed, "prop");
            let g: Vec<f64> = (0..w.len()).map(|_| (2.0 * rng.random::<f64>() - 1.0) * l0).collect();
            let out = mirror_weight_step(&anchor, &g, eta, 1.0);
            let bound = (2.0 * eta * l0).exp();
            let mut l1 = 0.0;
            for (a, b) in anchor.iter().zip(&out) {
                let ratio = (b - a).exp();
                prop_assert!(ratio <= bound * (1.0 + 1e-12) && ratio >= (1.0 - 1e-12) / bound);
                l1 += (b.exp() - a.exp()).abs();
            }
            prop_assert!(l1 <= bound - 1.0 + 1e-12);
        }
    }
}
