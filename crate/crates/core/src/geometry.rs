//! Strategy domains and the point operations every particle update needs.
//!
//! Four domains are supported:
//!
//! - `Torus`: `(R/Z)^d` with representatives in `[0, 1)^d` and the quotient
//!   Euclidean metric.
//! - `Sphere`: the unit sphere in `R^d`, with the chordal metric.
//! - `Ball`: the closed radius-`r` Euclidean ball with some coordinates
//!   pinned to zero (used for bias coordinates of adversarial perturbations).
//! - `FixedFinite`: a finite set of points that particles never leave.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result};

/// Tolerance used when checking sphere/ball membership.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Below this norm a sphere normalization is treated as degenerate.
pub const SPHERE_DEGENERACY: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum DomainSpec {
    Torus { dim: usize },
    Sphere { ambient_dim: usize },
    Ball { ambient_dim: usize, radius: f64, frozen: Vec<bool> },
    FixedFinite { points: Vec<Vec<f64>> },
}

impl DomainSpec {
    pub fn torus(dim: usize) -> Self {
        DomainSpec::Torus { dim }
    }

    pub fn sphere(ambient_dim: usize) -> Self {
        DomainSpec::Sphere { ambient_dim }
    }

    pub fn ball(ambient_dim: usize, radius: f64, frozen: Vec<bool>) -> Self {
        DomainSpec::Ball {
            ambient_dim,
            radius,
            frozen,
        }
    }

    pub fn fixed_finite(points: Vec<Vec<f64>>) -> Self {
        DomainSpec::FixedFinite { points }
    }

    /// Checks the structural constraints of the descriptor itself.
    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::Torus { dim } if *dim == 0 => {
                Err(Error::InvalidArgument("torus dimension must be positive".into()))
            }
            DomainSpec::Sphere { ambient_dim } if *ambient_dim < 2 => Err(Error::InvalidArgument(
                "sphere ambient dimension must be at least 2".into(),
            )),
            DomainSpec::Ball {
                ambient_dim,
                radius,
                frozen,
            } => {
                if *ambient_dim == 0 {
                    return Err(Error::InvalidArgument("ball dimension must be positive".into()));
                }
                if !(radius.is_finite() && *radius >= 0.0) {
                    return Err(Error::InvalidArgument(format!("invalid ball radius {radius}")));
                }
                if frozen.len() != *ambient_dim {
                    return Err(Error::DimensionMismatch {
                        expected: *ambient_dim,
                        got: frozen.len(),
                    });
                }
                Ok(())
            }
            DomainSpec::FixedFinite { points } => {
                let Some(first) = points.first() else {
                    return Err(Error::InvalidArgument("finite domain has no points".into()));
                };
                for p in points {
                    if p.len() != first.len() {
                        return Err(Error::DimensionMismatch {
                            expected: first.len(),
                            got: p.len(),
                        });
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Number of coordinates of a point.
    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Torus { dim } => *dim,
            DomainSpec::Sphere { ambient_dim } => *ambient_dim,
            DomainSpec::Ball { ambient_dim, .. } => *ambient_dim,
            DomainSpec::FixedFinite { points } => points.first().map_or(0, Vec::len),
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, DomainSpec::FixedFinite { .. })
    }

    pub fn is_torus(&self) -> bool {
        matches!(self, DomainSpec::Torus { .. })
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Metric distance between two points of the domain.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        match self {
            DomainSpec::Torus { .. } => torus_distance(x, y),
            _ => Ok(euclidean(x, y)),
        }
    }

    /// Displacement `x - anchor` expressed in the local chart at `anchor`.
    ///
    /// On the torus each coordinate is wrapped into `[-1/2, 1/2)`; elsewhere
    /// this is the plain Euclidean difference.
    pub fn chart_offset(&self, anchor: &[f64], x: &[f64]) -> Vec<f64> {
        match self {
            DomainSpec::Torus { .. } => x
                .iter()
                .zip(anchor)
                .map(|(xi, ai)| wrap_signed(xi - ai))
                .collect(),
            _ => x.iter().zip(anchor).map(|(xi, ai)| xi - ai).collect(),
        }
    }

    /// Projects an ambient gradient onto the directions a step may take:
    /// the tangent space on spheres, the unfrozen coordinates on balls.
    pub fn tangent(&self, x: &[f64], g: &[f64]) -> Vec<f64> {
        match self {
            DomainSpec::Sphere { .. } => {
                let radial: f64 = x.iter().zip(g).map(|(a, b)| a * b).sum();
                g.iter().zip(x).map(|(gi, xi)| gi - radial * xi).collect()
            }
            DomainSpec::Ball { frozen, .. } => g.iter().zip(frozen).map(|(&v, &f)| if f { 0.0 } else { v }).collect(),
            DomainSpec::FixedFinite { .. } => vec![0.0; g.len()],
            DomainSpec::Torus { .. } => g.to_vec(),
        }
    }

    /// Whether `x` satisfies the domain's membership invariants.
    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            DomainSpec::Torus { .. } => x.iter().all(|&v| (0.0..1.0).contains(&v)),
            DomainSpec::Sphere { .. } => (norm(x) - 1.0).abs() <= MEMBERSHIP_TOL,
            DomainSpec::Ball { radius, frozen, .. } => {
                norm(x) <= radius + MEMBERSHIP_TOL
                    && x.iter().zip(frozen).all(|(&v, &f)| !f || v == 0.0)
            }
            DomainSpec::FixedFinite { points } => points.iter().any(|p| p.as_slice() == x),
        }
    }

    /// Moves from `x` along the tangent step `v` and maps the result back
    /// onto the domain.
    pub fn retract(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        self.check_dim(v)?;
        match self {
            DomainSpec::Torus { .. } => Ok(x.iter().zip(v).map(|(a, b)| reduce_mod1(a + b)).collect()),
            DomainSpec::Sphere { .. } => {
                let moved: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + b).collect();
                normalize(moved)
            }
            DomainSpec::Ball { radius, frozen, .. } => {
                let moved: Vec<f64> = x
                    .iter()
                    .zip(v)
                    .zip(frozen)
                    .map(|((a, b), &f)| if f { 0.0 } else { a + b })
                    .collect();
                Ok(scale_into_ball(moved, *radius))
            }
            DomainSpec::FixedFinite { .. } => Ok(x.to_vec()),
        }
    }

    /// Nearest valid point; idempotent bit-for-bit.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        match self {
            DomainSpec::Torus { .. } => Ok(x.iter().map(|&a| reduce_mod1(a)).collect()),
            DomainSpec::Sphere { .. } => {
                if (norm(x) - 1.0).abs() <= MEMBERSHIP_TOL {
                    Ok(x.to_vec())
                } else {
                    normalize(x.to_vec())
                }
            }
            DomainSpec::Ball { radius, frozen, .. } => {
                let zeroed: Vec<f64> = x
                    .iter()
                    .zip(frozen)
                    .map(|(&a, &f)| if f { 0.0 } else { a })
                    .collect();
                Ok(scale_into_ball(zeroed, *radius))
            }
            DomainSpec::FixedFinite { points } => {
                let nearest = points
                    .iter()
                    .min_by(|p, q| euclidean(p, x).total_cmp(&euclidean(q, x)))
                    .expect("validated finite domain is non-empty");
                Ok(nearest.clone())
            }
        }
    }

    /// Draws a point uniformly at random (uniform in volume for balls).
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            DomainSpec::Torus { dim } => (0..*dim).map(|_| rng.random::<f64>()).collect(),
            DomainSpec::Sphere { ambient_dim } => loop {
                let g: Vec<f64> = (0..*ambient_dim).map(|_| StandardNormal.sample(rng)).collect();
                if let Ok(p) = normalize(g) {
                    break p;
                }
            },
            DomainSpec::Ball {
                radius, frozen, ..
            } => {
                let free = frozen.iter().filter(|f| !**f).count();
                if free == 0 || *radius == 0.0 {
                    return vec![0.0; frozen.len()];
                }
                let dir = loop {
                    let g: Vec<f64> = (0..free).map(|_| StandardNormal.sample(rng)).collect();
                    if let Ok(p) = normalize(g) {
                        break p;
                    }
                };
                let u: f64 = rng.random();
                let r = radius * u.powf(1.0 / free as f64);
                let mut it = dir.into_iter();
                let p: Vec<f64> = frozen
                    .iter()
                    .map(|&f| if f { 0.0 } else { r * it.next().unwrap() })
                    .collect();
                scale_into_ball(p, *radius)
            }
            DomainSpec::FixedFinite { points } => points[rng.random_range(0..points.len())].clone(),
        }
    }

    /// Text descriptor used by the checkpoint format, e.g. `torus 1`,
    /// `sphere 3`, `ball 3 0.2 001`, `finite 5 1 0 1 2 3 4`.
    pub fn descriptor(&self) -> String {
        match self {
            DomainSpec::Torus { dim } => format!("torus {dim}"),
            DomainSpec::Sphere { ambient_dim } => format!("sphere {ambient_dim}"),
            DomainSpec::Ball {
                ambient_dim,
                radius,
                frozen,
            } => {
                let mask: String = frozen.iter().map(|&f| if f { '1' } else { '0' }).collect();
                format!("ball {ambient_dim} {} {mask}", fmt_f64(*radius))
            }
            DomainSpec::FixedFinite { points } => {
                let mut s = format!("finite {} {}", points.len(), self.dim());
                for p in points {
                    for v in p {
                        s.push(' ');
                        s.push_str(&fmt_f64(*v));
                    }
                }
                s
            }
        }
    }

    pub fn parse_descriptor(text: &str) -> std::result::Result<Self, String> {
        let toks: Vec<&str> = text.split_whitespace().collect();
        let num = |i: usize| -> std::result::Result<usize, String> {
            toks.get(i)
                .ok_or_else(|| format!("missing field {i} in domain descriptor"))?
                .parse::<usize>()
                .map_err(|e| e.to_string())
        };
        let real = |i: usize| -> std::result::Result<f64, String> {
            toks.get(i)
                .ok_or_else(|| format!("missing field {i} in domain descriptor"))?
                .parse::<f64>()
                .map_err(|e| e.to_string())
        };
        let spec = match toks.first().copied() {
            Some("torus") => DomainSpec::Torus { dim: num(1)? },
            Some("sphere") => DomainSpec::Sphere { ambient_dim: num(1)? },
            Some("ball") => {
                let ambient_dim = num(1)?;
                let radius = real(2)?;
                let mask = toks.get(3).ok_or("missing frozen mask")?;
                let frozen = mask
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(format!("bad mask character {c:?}")),
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                DomainSpec::Ball {
                    ambient_dim,
                    radius,
                    frozen,
                }
            }
            Some("finite") => {
                let count = num(1)?;
                let dim = num(2)?;
                if toks.len() != 3 + count * dim {
                    return Err("finite descriptor has the wrong number of coordinates".into());
                }
                let points = (0..count)
                    .map(|p| (0..dim).map(|c| real(3 + p * dim + c)).collect())
                    .collect::<std::result::Result<Vec<Vec<f64>>, String>>()?;
                DomainSpec::FixedFinite { points }
            }
            other => return Err(format!("unknown domain kind {other:?}")),
        };
        spec.validate().map_err(|e| e.to_string())?;
        Ok(spec)
    }
}

/// Quotient distance on the torus: `min_k ||x - y + k||_2` over integer shifts.
pub fn torus_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(x.iter()
        .zip(y)
        .map(|(a, b)| {
            let d = (a - b).abs().rem_euclid(1.0);
            let d = d.min(1.0 - d);
            d * d
        })
        .sum::<f64>()
        .sqrt())
}

pub fn retract(domain: &DomainSpec, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    domain.retract(x, v)
}

pub fn project_onto_domain(domain: &DomainSpec, x: &[f64]) -> Result<Vec<f64>> {
    domain.project(x)
}

/// Reduces into `[0, 1)`; the upper end guards against `1 - tiny` rounding to 1.
pub(crate) fn reduce_mod1(v: f64) -> f64 {
    let r = v - v.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Wraps a real into `[-1/2, 1/2)`.
pub(crate) fn wrap_signed(v: f64) -> f64 {
    v - (v + 0.5).floor()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn normalize(mut v: Vec<f64>) -> Result<Vec<f64>> {
    let n = norm(&v);
    if !(n >= SPHERE_DEGENERACY) {
        return Err(Error::DegenerateRetraction { norm: n });
    }
    v.iter_mut().for_each(|c| *c /= n);
    Ok(v)
}

fn scale_into_ball(mut v: Vec<f64>, radius: f64) -> Vec<f64> {
    let n = norm(&v);
    if n > radius + MEMBERSHIP_TOL {
        let s = radius / n;
        v.iter_mut().for_each(|c| *c *= s);
    }
    v
}

/// Shortest decimal that parses back to the same `f64`, which never needs
/// more than 17 significant digits.
pub(crate) fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:?}")
}
