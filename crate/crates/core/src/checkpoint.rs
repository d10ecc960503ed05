//! Text format for saddle states and reference equilibria.
//!
//! ```text
//! conic-saddle-state v1
//! player mu
//! n 2
//! domain torus 1
//! -0.69314718055994529 0.375
//! -0.69314718055994529 0.875
//! player nu
//! n 2
//! domain torus 1
//! labels 0 1
//! ...
//! ```
//!
//! A `labels` line follows the domain line when any label is nonzero.
//! Reference files may add a `value <rho>` line after the header.

use std::fmt::Write as _;
use std::path::Path;

use crate::geometry::{fmt_f64, DomainSpec};
use crate::particles::{Ensemble, SaddleState};
use crate::{Error, Result};

pub const HEADER: &str = "conic-saddle-state v1";

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub state: SaddleState,
    pub x_domain: DomainSpec,
    pub y_domain: DomainSpec,
    pub value: Option<f64>,
}

fn write_player(out: &mut String, name: &str, e: &Ensemble, domain: &DomainSpec) {
    writeln!(out, "player {name}").unwrap();
    writeln!(out, "n {}", e.len()).unwrap();
    writeln!(out, "domain {}", domain.descriptor()).unwrap();
    if e.labels.iter().any(|&l| l != 0) {
        let labels: Vec<String> = e.labels.iter().map(|l| l.to_string()).collect();
        writeln!(out, "labels {}", labels.join(" ")).unwrap();
    }
    for (lw, pos) in e.log_weights.iter().zip(&e.positions) {
        out.push_str(&fmt_f64(*lw));
        for v in pos {
            out.push(' ');
            out.push_str(&fmt_f64(*v));
        }
        out.push('\n');
    }
}

impl Checkpoint {
    pub fn new(state: SaddleState, x_domain: DomainSpec, y_domain: DomainSpec) -> Self {
        Checkpoint { state, x_domain, y_domain, value: None }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{HEADER}\n");
        if let Some(v) = self.value {
            writeln!(out, "value {}", fmt_f64(v)).unwrap();
        }
        write_player(&mut out, "mu", &self.state.mu, &self.x_domain);
        write_player(&mut out, "nu", &self.state.nu, &self.y_domain);
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, HEADER)) => {}
            Some((n, other)) => return Err(Error::parse(n, format!("expected header {HEADER:?}, found {other:?}"))),
            None => return Err(Error::parse(1, "empty checkpoint")),
        }
        let mut lines = lines.peekable();
        let mut value = None;
        if let Some((n, l)) = lines.peek().copied() {
            if let Some(rest) = l.strip_prefix("value ") {
                value = Some(rest.trim().parse::<f64>().map_err(|e| Error::parse(n, e.to_string()))?);
                lines.next();
            }
        }
        let mut players = Vec::new();
        for name in ["mu", "nu"] {
            let (n, l) = lines.next().ok_or_else(|| Error::parse(0, format!("missing player {name}")))?;
            if l != format!("player {name}") {
                return Err(Error::parse(n, format!("expected `player {name}`")));
            }
            let (n, l) = lines.next().ok_or_else(|| Error::parse(n, "missing particle count"))?;
            let count: usize = l
                .strip_prefix("n ")
                .ok_or_else(|| Error::parse(n, "expected `n <count>`"))?
                .trim()
                .parse()
                .map_err(|e: std::num::ParseIntError| Error::parse(n, e.to_string()))?;
            let (n, l) = lines.next().ok_or_else(|| Error::parse(n, "missing domain"))?;
            let domain = DomainSpec::parse_descriptor(
                l.strip_prefix("domain ").ok_or_else(|| Error::parse(n, "expected `domain <descriptor>`"))?,
            )
            .map_err(|e| Error::parse(n, e))?;
            let mut labels = vec![0; count];
            if let Some((n, l)) = lines.peek().copied() {
                if let Some(rest) = l.strip_prefix("labels ") {
                    labels = rest
                        .split_whitespace()
                        .map(|t| t.parse::<usize>().map_err(|e| Error::parse(n, e.to_string())))
                        .collect::<Result<Vec<_>>>()?;
                    if labels.len() != count {
                        return Err(Error::parse(n, format!("expected {count} labels, found {}", labels.len())));
                    }
                    lines.next();
                }
            }
            let mut log_weights = Vec::with_capacity(count);
            let mut positions = Vec::with_capacity(count);
            for _ in 0..count {
                let (n, l) = lines.next().ok_or_else(|| Error::parse(0, format!("player {name} has too few particles")))?;
                let vals = l
                    .split_whitespace()
                    .map(|t| t.parse::<f64>().map_err(|e| Error::parse(n, e.to_string())))
                    .collect::<Result<Vec<_>>>()?;
                if vals.len() != domain.dim() + 1 {
                    return Err(Error::parse(n, format!("expected {} numbers, found {}", domain.dim() + 1, vals.len())));
                }
                log_weights.push(vals[0]);
                positions.push(vals[1..].to_vec());
            }
            // stored log-weights are already normalized; keep them bit-exact
            let e = Ensemble { log_weights, positions, labels };
            e.validate(&domain)?;
            players.push((e, domain));
        }
        if let Some((n, _)) = lines.next() {
            return Err(Error::parse(n, "trailing content"));
        }
        let (nu, y_domain) = players.pop().unwrap();
        let (mu, x_domain) = players.pop().unwrap();
        Ok(Checkpoint { state: SaddleState::new(mu, nu), x_domain, y_domain, value })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::particles::{init_ensemble, InitMode};

    #[test]
    fn round_trip_is_bit_exact() {
        let x = DomainSpec::ball(3, 0.2, vec![false, false, true]);
        let y = DomainSpec::sphere(3);
        let mu = init_ensemble(&x, 7, &InitMode::UniformRandom, 1).unwrap().ensemble;
        let mu = Ensemble::from_weights(&[0.1, 0.2, 0.05, 0.15, 0.2, 0.1, 0.2], mu.positions)
            .unwrap()
            .with_labels(vec![0, 0, 1, 1, 2, 3, 4])
            .unwrap();
        let nu = init_ensemble(&y, 4, &InitMode::UniformRandom, 2).unwrap().ensemble.with_labels(vec![0, 0, 1, 1]).unwrap();
        let mut c = Checkpoint::new(SaddleState::new(mu, nu), x, y);
        c.value = Some(-0.125);
        let back = Checkpoint::from_text(&c.to_text()).unwrap();
        assert_eq!(back, c);
        for (a, b) in back.state.mu.log_weights.iter().zip(&c.state.mu.log_weights) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn parse_errors_carry_lines() {
        let good = Checkpoint::new(
            SaddleState::new(Ensemble::uniform(vec![vec![0.5]]).unwrap(), Ensemble::uniform(vec![vec![0.25]]).unwrap()),
            DomainSpec::torus(1),
            DomainSpec::torus(1),
        )
        .to_text();
        let bad = good.replace("0.25", "zero");
        match Checkpoint::from_text(&bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 9),
            other => panic!("{other:?}"),
        }
        assert!(Checkpoint::from_text("conic-saddle-state v2\n").is_err());
    }
}
