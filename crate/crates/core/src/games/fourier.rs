//! Trigonometric-polynomial payoffs on `T^dx × T^dy`:
//! `f(x, y) = Re Σ c_{k,l} exp(2πi(<k,x> + <l,y>))`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand_distr::{Distribution, StandardNormal};

use super::{PayoffOracle, Site, SmoothnessBounds};
use crate::geometry::{fmt_f64, DomainSpec};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct FourierTerm {
    pub k: Vec<i64>,
    pub l: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug)]
pub struct FourierPayoff {
    dx: usize,
    dy: usize,
    terms: Vec<FourierTerm>,
    x_domain: DomainSpec,
    y_domain: DomainSpec,
}

/// All integer vectors of length `dim` with entries in `[-order, order]`,
/// in lexicographic order.
fn box_frequencies(dim: usize, order: usize) -> Vec<Vec<i64>> {
    let order = order as i64;
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (-order..=order).map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

fn l2(k: &[i64]) -> f64 {
    k.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt()
}

impl FourierPayoff {
    pub fn new(dx: usize, dy: usize, terms: Vec<FourierTerm>) -> Result<Self> {
        if dx == 0 || dy == 0 {
            return Err(Error::InvalidArgument("torus dimensions must be positive".into()));
        }
        for t in &terms {
            if t.k.len() != dx {
                return Err(Error::DimensionMismatch { expected: dx, got: t.k.len() });
            }
            if t.l.len() != dy {
                return Err(Error::DimensionMismatch { expected: dy, got: t.l.len() });
            }
        }
        Ok(FourierPayoff {
            dx,
            dy,
            terms,
            x_domain: DomainSpec::torus(dx),
            y_domain: DomainSpec::torus(dy),
        })
    }

    /// Real and imaginary parts of every coefficient with `|k|∞ ≤ k_order`,
    /// `|l|∞ ≤ l_order` drawn i.i.d. standard normal.
    pub fn random(dx: usize, dy: usize, k_order: usize, l_order: usize, seed: u64) -> Result<Self> {
        let mut rng = crate::rng::substream(seed, "fourier-coefficients");
        let ks = box_frequencies(dx, k_order);
        let ls = box_frequencies(dy, l_order);
        let mut terms = Vec::with_capacity(ks.len() * ls.len());
        for k in &ks {
            for l in &ls {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                terms.push(FourierTerm { k: k.clone(), l: l.clone(), re, im });
            }
        }
        Self::new(dx, dy, terms)
    }

    /// `f(x, y) = sin(4πx) + sin(4πy) + 2 cos(2πx + 2πy)` on `T^1 × T^1`,
    /// whose unique equilibrium is `(½δ_{3/8} + ½δ_{7/8}, ½δ_{1/8} + ½δ_{5/8})`.
    pub fn synthetic_counterexample() -> Self {
        let term = |k: i64, l: i64, re: f64, im: f64| FourierTerm { k: vec![k], l: vec![l], re, im };
        Self::new(
            1,
            1,
            vec![term(2, 0, 0.0, -1.0), term(0, 2, 0.0, -1.0), term(1, 1, 2.0, 0.0)],
        )
        .expect("static coefficients are well-formed")
    }

    pub fn terms(&self) -> &[FourierTerm] {
        &self.terms
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dx, self.dy)
    }

    /// `(max |k|∞, max |l|∞)` over the stored terms.
    pub fn orders(&self) -> (i64, i64) {
        let k = self.terms.iter().flat_map(|t| t.k.iter().map(|v| v.abs())).max().unwrap_or(0);
        let l = self.terms.iter().flat_map(|t| t.l.iter().map(|v| v.abs())).max().unwrap_or(0);
        (k, l)
    }

    fn phase(&self, t: &FourierTerm, x: &[f64], y: &[f64]) -> f64 {
        let s: f64 = t.k.iter().zip(x).map(|(&k, &v)| k as f64 * v).sum::<f64>()
            + t.l.iter().zip(y).map(|(&l, &v)| l as f64 * v).sum::<f64>();
        2.0 * PI * s
    }

    /// One line per frequency: `k_0 .. k_{dx-1} l_0 .. l_{dy-1} re im`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for t in &self.terms {
            for v in t.k.iter().chain(&t.l) {
                write!(s, "{v} ").unwrap();
            }
            writeln!(s, "{} {}", fmt_f64(t.re), fmt_f64(t.im)).unwrap();
        }
        s
    }

    pub fn from_text(text: &str, dx: usize, dy: usize) -> Result<Self> {
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != dx + dy + 2 {
                return Err(Error::parse(
                    lineno + 1,
                    format!("expected {} fields, found {}", dx + dy + 2, toks.len()),
                ));
            }
            let ints = toks[..dx + dy]
                .iter()
                .map(|t| t.parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(lineno + 1, e.to_string()))?;
            let re = toks[dx + dy].parse::<f64>().map_err(|e| Error::parse(lineno + 1, e.to_string()))?;
            let im = toks[dx + dy + 1].parse::<f64>().map_err(|e| Error::parse(lineno + 1, e.to_string()))?;
            terms.push(FourierTerm { k: ints[..dx].to_vec(), l: ints[dx..].to_vec(), re, im });
        }
        Self::new(dx, dy, terms)
    }
}

impl PayoffOracle for FourierPayoff {
    fn x_domain(&self) -> &DomainSpec {
        &self.x_domain
    }

    fn y_domain(&self) -> &DomainSpec {
        &self.y_domain
    }

    fn eval(&self, x: Site, y: Site) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let (s, c) = self.phase(t, x.pos, y.pos).sin_cos();
                t.re * c - t.im * s
            })
            .sum()
    }

    fn eval_and_grads(&self, x: Site, y: Site) -> (f64, Vec<f64>, Vec<f64>) {
        let mut value = 0.0;
        let mut gx = vec![0.0; self.dx];
        let mut gy = vec![0.0; self.dy];
        for t in &self.terms {
            let (s, c) = self.phase(t, x.pos, y.pos).sin_cos();
            value += t.re * c - t.im * s;
            // d/dphase Re(c e^{i phase}) = -re sin - im cos
            let dphase = -2.0 * PI * (t.re * s + t.im * c);
            for (g, &k) in gx.iter_mut().zip(&t.k) {
                *g += k as f64 * dphase;
            }
            for (g, &l) in gy.iter_mut().zip(&t.l) {
                *g += l as f64 * dphase;
            }
        }
        (value, gx, gy)
    }

    fn smoothness_bounds(&self) -> Option<SmoothnessBounds> {
        let mut l0 = 0.0;
        let mut l1 = 0.0;
        for t in &self.terms {
            let modulus = t.re.hypot(t.im);
            if t.k.iter().chain(&t.l).any(|&v| v != 0) {
                l0 += 2.0 * modulus;
            }
            l1 += 2.0 * PI * modulus * l2(&t.k).max(l2(&t.l));
        }
        Some(SmoothnessBounds { l0, l1 })
    }
}
