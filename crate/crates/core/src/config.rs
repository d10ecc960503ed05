//! Run configuration, read from TOML.
//!
//! ```toml
//! version = 1
//!
//! [game]
//! family = "fourier_synthetic"   # fourier_random | fourier_synthetic | margin | distrib_robust
//!
//! [solver]
//! eta = 0.005
//! sigma = 0.005
//! outer_steps = 4000
//! inner = 2                      # or "to_tolerance"
//!
//! [init]
//! mode = "near"
//! jitter = 0.03
//!
//! [diagnostics]
//! ni = "grid"
//! lyapunov = true
//! reference = "known"
//! ```
//!
//! Every key is optional except `version` and `game.family`. Relative
//! paths are resolved against the directory holding the config file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::solver::{AnchorMode, InnerSteps, SolverConfig};
use crate::{Error, Result};

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub game: GameSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub init: InitSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub compare: CompareSection,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum GameFamily {
    FourierRandom,
    FourierSynthetic,
    Margin,
    DistribRobust,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GameSection {
    pub family: GameFamily,
    #[serde(default = "one")]
    pub dx: usize,
    #[serde(default = "one")]
    pub dy: usize,
    #[serde(default = "three")]
    pub k_order: usize,
    #[serde(default = "three")]
    pub l_order: usize,
    /// Coefficient file for `fourier_random`; drawn from the seed otherwise.
    pub coefficients: Option<PathBuf>,
    /// `"toy"` or a CSV file with rows `x_1,…,x_d,y`.
    #[serde(default = "toy")]
    pub dataset: String,
    #[serde(default = "three_u32")]
    pub power: u32,
    #[serde(default = "yes")]
    pub append_bias: bool,
    #[serde(default)]
    pub allow_unsmooth: bool,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "one")]
    pub particles_per_sample: usize,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum InnerSetting {
    Fixed(usize),
    Named(String),
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub eta: f64,
    pub sigma: f64,
    pub outer_steps: usize,
    pub inner: InnerSetting,
    pub tol: f64,
    pub max_inner: usize,
    pub anchor: String,
    pub seed: u64,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            eta: 0.01,
            sigma: 0.01,
            outer_steps: 100,
            inner: InnerSetting::Fixed(2),
            tol: InnerSteps::DEFAULT_TOL,
            max_inner: InnerSteps::DEFAULT_MAX_INNER,
            anchor: "prox_anchored".into(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct InitSection {
    /// `uniform_random`, `grid` or `near`.
    pub mode: String,
    pub n: usize,
    pub m: usize,
    pub jitter: f64,
    /// Atoms for `near` mode; the known equilibrium is used when absent.
    pub reference: Option<PathBuf>,
}

impl Default for InitSection {
    fn default() -> Self {
        InitSection { mode: "uniform_random".into(), n: 10, m: 10, jitter: 0.03, reference: None }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsSection {
    /// `grid`, `multistart` or `none`.
    pub ni: String,
    pub grid: usize,
    pub restarts: usize,
    pub ascent_steps: usize,
    pub ascent_rate: Option<f64>,
    pub lyapunov: bool,
    /// `known`, `clustered_from_final` or `file`.
    pub reference: String,
    pub reference_file: Option<PathBuf>,
    pub weight_floor: f64,
    pub merge_radius: Option<f64>,
    pub lambda: Option<f64>,
    pub tau: Option<f64>,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        DiagnosticsSection {
            ni: "grid".into(),
            grid: 1024,
            restarts: 20,
            ascent_steps: 200,
            ascent_rate: None,
            lyapunov: false,
            reference: "known".into(),
            reference_file: None,
            weight_floor: 1e-4,
            merge_radius: None,
            lambda: None,
            tau: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub trajectory: String,
    pub checkpoint: String,
    pub record_every: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            trajectory: "trajectory.jsonl".into(),
            checkpoint: "final_state.txt".into(),
            record_every: 1,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct CompareSection {
    pub etas: Vec<f64>,
    pub sigma_over_eta: f64,
    pub pp_tol: f64,
    pub max_inner: usize,
}

impl Default for CompareSection {
    fn default() -> Self {
        CompareSection { etas: vec![0.04, 0.02, 0.01], sigma_over_eta: 1.0, pp_tol: 1e-12, max_inner: 2000 }
    }
}

fn one() -> usize {
    1
}
fn three() -> usize {
    3
}
fn three_u32() -> u32 {
    3
}
fn yes() -> bool {
    true
}
fn toy() -> String {
    "toy".into()
}
fn default_radius() -> f64 {
    0.2
}

fn check(ok: bool, key: &str, msg: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(key, msg))
    }
}

fn one_of(value: &str, key: &str, allowed: &[&str]) -> Result<()> {
    check(allowed.contains(&value), key, format!("{value:?} is not one of {allowed:?}"))
}

/// Relative etas closer than this are rejected as duplicates.
pub const ETA_DUPLICATE_TOL: f64 = 1e-9;

/// `etas` must hold at least two positive, pairwise distinct values.
pub fn validate_etas(etas: &[f64], key: &str) -> Result<()> {
    check(etas.len() >= 2, key, "needs at least two step sizes")?;
    for (i, &a) in etas.iter().enumerate() {
        check(a.is_finite() && a > 0.0, key, format!("step size {a} must be positive"))?;
        for &b in &etas[i + 1..] {
            check(
                (a - b).abs() > ETA_DUPLICATE_TOL * a.abs().max(b.abs()),
                key,
                format!("step sizes {a} and {b} are (nearly) identical"),
            )?;
        }
    }
    Ok(())
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let key = e.message().split('`').nth(1).unwrap_or("config").to_string();
            Error::config(key, e.to_string().trim().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads, validates and resolves relative paths against the file's
    /// directory. Referenced files must exist.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base)?;
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) -> Result<()> {
        let fix = |p: &mut PathBuf, key: &str, must_exist: bool| -> Result<()> {
            if p.is_relative() {
                *p = base.join(&*p);
            }
            check(!must_exist || p.exists(), key, format!("{} does not exist", p.display()))
        };
        if let Some(p) = self.game.coefficients.as_mut() {
            fix(p, "game.coefficients", true)?;
        }
        if self.game.dataset != "toy" {
            let mut p = PathBuf::from(&self.game.dataset);
            fix(&mut p, "game.dataset", true)?;
            self.game.dataset = p.to_string_lossy().into_owned();
        }
        if let Some(p) = self.init.reference.as_mut() {
            fix(p, "init.reference", true)?;
        }
        if let Some(p) = self.diagnostics.reference_file.as_mut() {
            fix(p, "diagnostics.reference_file", true)?;
        }
        fix(&mut self.output.dir, "output.dir", false)
    }

    pub fn validate(&self) -> Result<()> {
        check(self.version == 1, "version", format!("unsupported config version {}", self.version))?;
        let g = &self.game;
        check(g.dx >= 1, "game.dx", "must be at least 1")?;
        check(g.dy >= 1, "game.dy", "must be at least 1")?;
        check(g.power >= 1, "game.power", "must be at least 1")?;
        check(g.power > 1 || g.allow_unsmooth, "game.power", "power 1 needs game.allow_unsmooth = true")?;
        check(g.radius.is_finite() && g.radius >= 0.0, "game.radius", "must be a nonnegative number")?;
        check(g.particles_per_sample >= 1, "game.particles_per_sample", "must be at least 1")?;

        let s = &self.solver;
        check(s.eta.is_finite() && s.eta > 0.0, "solver.eta", "must be positive")?;
        check(s.sigma.is_finite() && s.sigma >= 0.0, "solver.sigma", "must be nonnegative")?;
        check(s.tol.is_finite() && s.tol > 0.0, "solver.tol", "must be positive")?;
        check(s.max_inner >= 1, "solver.max_inner", "must be at least 1")?;
        match &s.inner {
            InnerSetting::Fixed(l) => check(*l >= 1, "solver.inner", "must be at least 1")?,
            InnerSetting::Named(name) => one_of(name, "solver.inner", &["to_tolerance"])?,
        }
        one_of(&s.anchor, "solver.anchor", &["prox_anchored", "literal_alg1"])?;

        let i = &self.init;
        one_of(&i.mode, "init.mode", &["uniform_random", "grid", "near"])?;
        check(i.n >= 1, "init.n", "must be at least 1")?;
        check(i.m >= 1, "init.m", "must be at least 1")?;
        check(i.jitter.is_finite() && i.jitter >= 0.0, "init.jitter", "must be nonnegative")?;

        let d = &self.diagnostics;
        one_of(&d.ni, "diagnostics.ni", &["grid", "multistart", "none"])?;
        check(d.grid >= 2, "diagnostics.grid", "must be at least 2")?;
        check(d.ni != "grid" || g.family == GameFamily::FourierRandom || g.family == GameFamily::FourierSynthetic,
            "diagnostics.ni", "grid search needs torus domains; use \"multistart\"")?;
        if let Some(r) = d.ascent_rate {
            check(r.is_finite() && r > 0.0, "diagnostics.ascent_rate", "must be positive")?;
        }
        one_of(&d.reference, "diagnostics.reference", &["known", "clustered_from_final", "file"])?;
        check(
            !(d.lyapunov && d.reference == "known" && g.family != GameFamily::FourierSynthetic),
            "diagnostics.reference",
            "\"known\" is only available for fourier_synthetic",
        )?;
        check(
            !(d.lyapunov && d.reference == "file" && d.reference_file.is_none()),
            "diagnostics.reference_file",
            "required when diagnostics.reference = \"file\"",
        )?;
        check(!d.lyapunov || s.sigma > 0.0, "solver.sigma", "the Lyapunov potential needs sigma > 0")?;
        check((0.0..1.0).contains(&d.weight_floor), "diagnostics.weight_floor", "must lie in [0, 1)")?;
        if let Some(r) = d.merge_radius {
            check(r > 0.0, "diagnostics.merge_radius", "must be positive")?;
        }
        for (v, key) in [(d.lambda, "diagnostics.lambda"), (d.tau, "diagnostics.tau")] {
            if let Some(v) = v {
                check(v.is_finite() && v > 0.0, key, "must be positive")?;
            }
        }
        check(d.lambda.is_some() == d.tau.is_some(), "diagnostics.tau", "set lambda and tau together")?;

        check(self.output.record_every >= 1, "output.record_every", "must be at least 1")?;
        check(!self.output.trajectory.is_empty(), "output.trajectory", "must be a file name")?;
        check(!self.output.checkpoint.is_empty(), "output.checkpoint", "must be a file name")?;

        let c = &self.compare;
        validate_etas(&c.etas, "compare.etas")?;
        check(c.sigma_over_eta.is_finite() && c.sigma_over_eta >= 0.0, "compare.sigma_over_eta", "must be nonnegative")?;
        check(c.pp_tol.is_finite() && c.pp_tol > 0.0, "compare.pp_tol", "must be positive")?;
        check(c.max_inner >= 1, "compare.max_inner", "must be at least 1")?;
        Ok(())
    }

    pub fn solver_config(&self) -> SolverConfig {
        let s = &self.solver;
        SolverConfig {
            eta: s.eta,
            sigma: s.sigma,
            outer_steps: s.outer_steps,
            inner: match s.inner {
                InnerSetting::Fixed(l) => InnerSteps::Fixed(l),
                InnerSetting::Named(_) => InnerSteps::ToTolerance { tol: s.tol, max_inner: s.max_inner },
            },
            anchor: if s.anchor == "literal_alg1" { AnchorMode::LiteralAlg1 } else { AnchorMode::ProxAnchored },
            seed: s.seed,
            record_every: self.output.record_every,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "version = 1\n[game]\nfamily = \"fourier_synthetic\"\n";

    #[test]
    fn minimal_config_uses_defaults() {
        let c = RunConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.game.family, GameFamily::FourierSynthetic);
        assert_eq!(c.solver_config().inner, InnerSteps::Fixed(2));
        assert_eq!(c.output.record_every, 1);
    }

    fn key_of(text: &str) -> String {
        match RunConfig::from_toml(text) {
            Err(Error::Config { key, .. }) => key,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors_name_the_key() {
        assert_eq!(key_of(&format!("{MINIMAL}[solver]\neta = -1.0\n")), "solver.eta");
        assert_eq!(key_of(&format!("{MINIMAL}[init]\nmode = \"sobol\"\n")), "init.mode");
        assert_eq!(key_of(&format!("{MINIMAL}[output]\nrecord_every = 0\n")), "output.record_every");
        assert_eq!(key_of(&format!("{MINIMAL}[compare]\netas = [0.01, 0.01]\n")), "compare.etas");
        assert_eq!(key_of("version = 2\n[game]\nfamily = \"margin\"\n"), "version");
        assert_eq!(key_of(&format!("{MINIMAL}[solver]\netaa = 1.0\n")), "etaa");
        assert!(key_of("version = 1\n[game]\nfamily = \"margin\"\n").starts_with("diagnostics.ni"));
    }

    #[test]
    fn to_tolerance_inner() {
        let c = RunConfig::from_toml(&format!("{MINIMAL}[solver]\ninner = \"to_tolerance\"\ntol = 1e-9\n")).unwrap();
        assert_eq!(c.solver_config().inner, InnerSteps::ToTolerance { tol: 1e-9, max_inner: 200 });
        assert_eq!(key_of(&format!("{MINIMAL}[solver]\ninner = \"forever\"\n")), "solver.inner");
    }
}
