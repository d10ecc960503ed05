//! Experiment pipelines behind the `conic-saddle` binary.
//!
//! Each subcommand has a library entry point here so that it can be driven
//! from tests and examples without spawning a process:
//!
//! | subcommand | entry point |
//! |------------|-------------|
//! | `run` | [`run`] (or [`execute`] without touching the disk) |
//! | `estimate-mne` | [`estimate_mne`] |
//! | `compare-mp-pp` | [`compare_sweep`] + [`write_sweep_csv`] |
//! | `ni-curve`, `lyapunov-curve` | [`extract_curve`] + [`write_curve_csv`] |

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::checkpoint::Checkpoint;
use crate::config::{GameFamily, RunConfig};
use crate::diagnostics::{
    compare_mp_pp, default_lyapunov_params, default_merge_radius, estimate_reference_by_clustering, lyapunov,
    ni_error_grid, ni_error_multistart, ClusterParams, LyapunovMode, LyapunovParams, MultistartConfig, ReferenceMne,
};
use crate::games::{toy_dataset, DistribRobustGame, FourierPayoff, PayoffOracle, Sample, TwoLayerMarginGame};
use crate::geometry::{fmt_f64, DomainSpec};
use crate::particles::{init_ensemble_with, Ensemble, InitMode, SaddleState};
use crate::rng::substream;
use crate::solver::run_trajectory;
use crate::{Error, Result};

/// Process exit code for an error: 1 for configuration problems, 2 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } => 1,
        _ => 2,
    }
}

pub enum Game {
    Fourier(FourierPayoff),
    Margin(TwoLayerMarginGame),
    Robust(DistribRobustGame),
}

impl Game {
    pub fn oracle(&self) -> &dyn PayoffOracle {
        match self {
            Game::Fourier(g) => g,
            Game::Margin(g) => g,
            Game::Robust(g) => g,
        }
    }
}

/// `"toy"` or a CSV file with rows `x_1,…,x_d,y` (a non-numeric first row is
/// taken as a header).
pub fn load_dataset(spec: &str) -> Result<Vec<Sample>> {
    if spec == "toy" {
        return Ok(toy_dataset());
    }
    let text = std::fs::read_to_string(spec)?;
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: std::result::Result<Vec<f64>, _> = line.split(',').map(|t| t.trim().parse::<f64>()).collect();
        match fields {
            Ok(v) if v.len() >= 2 => samples.push(Sample { x: v[..v.len() - 1].to_vec(), y: v[v.len() - 1] }),
            Ok(_) => return Err(Error::parse(i + 1, "a sample needs at least one covariate and a label")),
            Err(_) if samples.is_empty() && i == 0 => continue,
            Err(e) => return Err(Error::parse(i + 1, e.to_string())),
        }
    }
    Ok(samples)
}

pub fn build_game(cfg: &RunConfig, seed: u64) -> Result<Game> {
    let g = &cfg.game;
    Ok(match g.family {
        GameFamily::FourierSynthetic => Game::Fourier(FourierPayoff::synthetic_counterexample()),
        GameFamily::FourierRandom => match &g.coefficients {
            Some(path) => Game::Fourier(FourierPayoff::from_text(&std::fs::read_to_string(path)?, g.dx, g.dy)?),
            None => Game::Fourier(FourierPayoff::random(g.dx, g.dy, g.k_order, g.l_order, seed)?),
        },
        GameFamily::Margin => {
            Game::Margin(TwoLayerMarginGame::new(load_dataset(&g.dataset)?, g.power, g.append_bias, g.allow_unsmooth)?)
        }
        GameFamily::DistribRobust => {
            let inner = TwoLayerMarginGame::new(load_dataset(&g.dataset)?, g.power, g.append_bias, g.allow_unsmooth)?;
            Game::Robust(DistribRobustGame::new(inner, g.radius, g.particles_per_sample, g.append_bias)?)
        }
    })
}

/// `(½δ_{3/8} + ½δ_{7/8}, ½δ_{1/8} + ½δ_{5/8})`, value 0.
pub fn synthetic_reference() -> ReferenceMne {
    ReferenceMne::new(
        Ensemble::uniform(vec![vec![0.375], vec![0.875]]).expect("static atoms"),
        Ensemble::uniform(vec![vec![0.125], vec![0.625]]).expect("static atoms"),
        Some(0.0),
    )
    .expect("static reference")
}

pub fn load_reference(path: &Path) -> Result<ReferenceMne> {
    let c = Checkpoint::load(path)?;
    ReferenceMne::new(c.state.mu, c.state.nu, c.value)
}

pub fn save_reference(reference: &ReferenceMne, x_domain: &DomainSpec, y_domain: &DomainSpec, path: &Path) -> Result<()> {
    let mut c = Checkpoint::new(
        SaddleState::new(reference.mu.clone(), reference.nu.clone()),
        x_domain.clone(),
        y_domain.clone(),
    );
    c.value = reference.value;
    c.save(path)
}

fn init_mode(cfg: &RunConfig, atoms: Option<&Ensemble>) -> Result<InitMode> {
    Ok(match cfg.init.mode.as_str() {
        "grid" => InitMode::Grid,
        "near" => InitMode::Near {
            reference: atoms.ok_or_else(|| Error::config("init.reference", "near mode needs reference atoms"))?.clone(),
            jitter: cfg.init.jitter,
        },
        _ => InitMode::UniformRandom,
    })
}

fn neuron_labels_for(reference: Option<&Ensemble>, m: usize) -> Vec<usize> {
    match reference {
        Some(_) => Vec::new(),
        None => TwoLayerMarginGame::neuron_labels(m),
    }
}

/// Initial state for a configuration, plus any initialization warnings.
///
/// Fourier games place `n` and `m` particles. Margin games put one particle
/// on each sample and `2m` neurons (half per sign); the robust game puts
/// `particles_per_sample` adversaries on each sample.
pub fn initial_state(cfg: &RunConfig, game: &Game, seed: u64) -> Result<(SaddleState, Vec<String>)> {
    let near_ref = match (&cfg.init.reference, cfg.game.family) {
        (Some(path), _) => Some(load_reference(path)?),
        (None, GameFamily::FourierSynthetic) => Some(synthetic_reference()),
        _ => None,
    };
    let mu_mode = init_mode(cfg, near_ref.as_ref().map(|r| &r.mu))?;
    let nu_mode = init_mode(cfg, near_ref.as_ref().map(|r| &r.nu))?;
    let mut rng_mu = substream(seed, "init-mu");
    let mut rng_nu = substream(seed, "init-nu");
    let oracle = game.oracle();
    let mut warnings = Vec::new();
    let mut collect = |w: Option<String>| warnings.extend(w);

    let mu = match game {
        Game::Fourier(_) => {
            let init = init_ensemble_with(oracle.x_domain(), cfg.init.n, &mu_mode, &mut rng_mu)?;
            collect(init.warning);
            init.ensemble
        }
        Game::Margin(g) => {
            let n = g.samples().len();
            Ensemble::uniform((0..n).map(|i| vec![i as f64]).collect())?.with_labels((0..n).collect())?
        }
        Game::Robust(g) => match &mu_mode {
            InitMode::Near { .. } => {
                let init = init_ensemble_with(oracle.x_domain(), cfg.init.n, &mu_mode, &mut rng_mu)?;
                collect(init.warning);
                init.ensemble
            }
            _ => {
                let labels = g.adversary_labels();
                let positions = labels.iter().map(|_| oracle.x_domain().random_point(&mut rng_mu)).collect();
                Ensemble::uniform(positions)?.with_labels(labels)?
            }
        },
    };
    let nu = match game {
        Game::Fourier(_) => {
            let init = init_ensemble_with(oracle.y_domain(), cfg.init.m, &nu_mode, &mut rng_nu)?;
            collect(init.warning);
            init.ensemble
        }
        Game::Margin(_) | Game::Robust(_) => {
            let is_near = matches!(nu_mode, InitMode::Near { .. });
            let count = if is_near { cfg.init.m } else { 2 * cfg.init.m };
            let init = init_ensemble_with(oracle.y_domain(), count, &nu_mode, &mut rng_nu)?;
            collect(init.warning);
            let labels = neuron_labels_for(is_near.then_some(&init.ensemble), cfg.init.m);
            if labels.is_empty() {
                init.ensemble
            } else {
                init.ensemble.with_labels(labels)?
            }
        }
    };
    mu.validate(oracle.x_domain())?;
    nu.validate(oracle.y_domain())?;
    Ok((SaddleState::new(mu, nu), warnings))
}

mod maybe_inf {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) if x.is_finite() => s.serialize_f64(*x),
            Some(x) if *x == f64::INFINITY => s.serialize_str("inf"),
            Some(x) if *x == f64::NEG_INFINITY => s.serialize_str("-inf"),
            Some(_) => s.serialize_str("nan"),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Option::<Repr>::deserialize(d)? {
            None => Ok(None),
            Some(Repr::Num(x)) => Ok(Some(x)),
            Some(Repr::Text(t)) => super::parse_float(&t).map(Some).map_err(serde::de::Error::custom),
        }
    }
}

fn parse_float(t: &str) -> std::result::Result<f64, String> {
    match t {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        "nan" => Ok(f64::NAN),
        other => other.parse::<f64>().map_err(|e| format!("{other:?}: {e}")),
    }
}

/// One line of the trajectory JSONL.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    #[serde(default, with = "maybe_inf", skip_serializing_if = "Option::is_none")]
    pub ni: Option<f64>,
    #[serde(default, with = "maybe_inf", skip_serializing_if = "Option::is_none")]
    pub v_wei_mu: Option<f64>,
    #[serde(default, with = "maybe_inf", skip_serializing_if = "Option::is_none")]
    pub v_pos_mu: Option<f64>,
    #[serde(default, with = "maybe_inf", skip_serializing_if = "Option::is_none")]
    pub v_wei_nu: Option<f64>,
    #[serde(default, with = "maybe_inf", skip_serializing_if = "Option::is_none")]
    pub v_pos_nu: Option<f64>,
    #[serde(default, with = "maybe_inf", skip_serializing_if = "Option::is_none")]
    pub v_total: Option<f64>,
    pub weight_movement_mu: f64,
    pub weight_movement_nu: f64,
    pub max_pos_movement_mu: f64,
    pub max_pos_movement_nu: f64,
}

impl IterationRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

pub fn write_jsonl(records: &[IterationRecord], path: &Path) -> Result<()> {
    let mut out = String::new();
    for r in records {
        out.push_str(&r.to_json_line());
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// NI estimator selected by the configuration.
pub fn ni_estimate(cfg: &RunConfig, oracle: &dyn PayoffOracle, state: &SaddleState, seed: u64) -> Result<Option<f64>> {
    let d = &cfg.diagnostics;
    match d.ni.as_str() {
        "grid" => Ok(Some(ni_error_grid(oracle, state, d.grid)?.value)),
        "multistart" => {
            let mut ms = MultistartConfig::defaults_for(oracle, seed);
            ms.restarts = d.restarts;
            ms.ascent_steps = d.ascent_steps;
            if let Some(r) = d.ascent_rate {
                ms.ascent_rate = r;
            }
            Ok(Some(ni_error_multistart(oracle, state, &ms)?))
        }
        _ => Ok(None),
    }
}

/// Clusters both players of `state` into a reference equilibrium. Without
/// an explicit radius each player gets [`default_merge_radius`].
pub fn cluster_state(
    x_domain: &DomainSpec,
    y_domain: &DomainSpec,
    state: &SaddleState,
    weight_floor: f64,
    merge_radius: Option<f64>,
) -> Result<ReferenceMne> {
    let player = |domain: &DomainSpec, e: &Ensemble| -> Result<Ensemble> {
        let merge_radius = match merge_radius {
            Some(r) => r,
            None => default_merge_radius(domain, e)?,
        };
        estimate_reference_by_clustering(domain, e, ClusterParams { weight_floor, merge_radius })
    };
    ReferenceMne::new(player(x_domain, &state.mu)?, player(y_domain, &state.nu)?, None)
}

/// Partition parameters: explicit `lambda`/`tau` from the configuration,
/// or the defaults derived from the step sizes and the reference spacing.
pub fn lyapunov_params_for(cfg: &RunConfig, oracle: &dyn PayoffOracle, reference: &ReferenceMne) -> Result<LyapunovParams> {
    let (eta, sigma) = (cfg.solver.eta, cfg.solver.sigma);
    match (cfg.diagnostics.lambda, cfg.diagnostics.tau) {
        (Some(lambda), Some(tau)) => {
            Ok(LyapunovParams { lambda, tau, eta_over_sigma: eta / sigma, mode: LyapunovMode::General })
        }
        _ => default_lyapunov_params(eta, sigma, reference.d_star(oracle.x_domain(), oracle.y_domain())?, None),
    }
}

pub struct RunOutput {
    pub game: Game,
    pub initial_state: SaddleState,
    pub final_state: SaddleState,
    pub records: Vec<IterationRecord>,
    pub reference: Option<ReferenceMne>,
    pub warnings: Vec<String>,
}

/// Runs a configuration in memory. `seed` overrides `solver.seed`.
pub fn execute(cfg: &RunConfig, seed: Option<u64>) -> Result<RunOutput> {
    cfg.validate()?;
    let seed = seed.unwrap_or(cfg.solver.seed);
    let game = build_game(cfg, seed)?;
    let (init, warnings) = initial_state(cfg, &game, seed)?;
    let oracle = game.oracle();
    let mut solver = cfg.solver_config();
    solver.seed = seed;

    let mut snapshots = Vec::new();
    let mut records = Vec::new();
    let traj = run_trajectory(oracle, &init, &solver, |k, state, step| {
        records.push(IterationRecord {
            k,
            ni: ni_estimate(cfg, oracle, state, seed)?,
            v_wei_mu: None,
            v_pos_mu: None,
            v_wei_nu: None,
            v_pos_nu: None,
            v_total: None,
            weight_movement_mu: step.weight_movement_mu,
            weight_movement_nu: step.weight_movement_nu,
            max_pos_movement_mu: step.max_position_movement_mu,
            max_pos_movement_nu: step.max_position_movement_nu,
        });
        if cfg.diagnostics.lyapunov {
            snapshots.push(state.clone());
        }
        Ok(())
    })?;

    let reference = if cfg.diagnostics.lyapunov {
        let reference = match cfg.diagnostics.reference.as_str() {
            "known" => synthetic_reference(),
            "file" => {
                let path = cfg.diagnostics.reference_file.as_ref().expect("checked by validate");
                load_reference(path)?
            }
            _ => cluster_state(
                oracle.x_domain(),
                oracle.y_domain(),
                &traj.final_state,
                cfg.diagnostics.weight_floor,
                cfg.diagnostics.merge_radius,
            )?,
        };
        let params = lyapunov_params_for(cfg, oracle, &reference)?;
        for (rec, state) in records.iter_mut().zip(&snapshots) {
            let rep = lyapunov(oracle.x_domain(), oracle.y_domain(), state, &reference, params)
                .map_err(|e| Error::Step { k: rec.k, source: Box::new(e) })?;
            rec.v_wei_mu = Some(rep.v_wei_mu);
            rec.v_pos_mu = Some(rep.v_pos_mu);
            rec.v_wei_nu = Some(rep.v_wei_nu);
            rec.v_pos_nu = Some(rep.v_pos_nu);
            rec.v_total = Some(rep.v_total);
        }
        Some(reference)
    } else {
        None
    };
    Ok(RunOutput { game, initial_state: init, final_state: traj.final_state, records, reference, warnings })
}

pub struct RunFiles {
    pub trajectory: PathBuf,
    pub checkpoint: PathBuf,
}

/// [`execute`], then writes the trajectory JSONL and the final checkpoint
/// into `out_dir` (default `output.dir`).
pub fn run(cfg: &RunConfig, seed: Option<u64>, out_dir: Option<&Path>) -> Result<(RunOutput, RunFiles)> {
    let out = execute(cfg, seed)?;
    let dir = out_dir.map_or_else(|| cfg.output.dir.clone(), Path::to_path_buf);
    std::fs::create_dir_all(&dir)?;
    let files = RunFiles { trajectory: dir.join(&cfg.output.trajectory), checkpoint: dir.join(&cfg.output.checkpoint) };
    write_jsonl(&out.records, &files.trajectory)?;
    let oracle = out.game.oracle();
    Checkpoint::new(out.final_state.clone(), oracle.x_domain().clone(), oracle.y_domain().clone())
        .save(&files.checkpoint)?;
    Ok((out, files))
}

/// Clusters a checkpoint into a reference file.
pub fn estimate_mne(checkpoint: &Path, weight_floor: f64, merge_radius: Option<f64>, out: &Path) -> Result<ReferenceMne> {
    let c = Checkpoint::load(checkpoint)?;
    let reference = cluster_state(&c.x_domain, &c.y_domain, &c.state, weight_floor, merge_radius)?;
    save_reference(&reference, &c.x_domain, &c.y_domain, out)?;
    Ok(reference)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub eta: f64,
    pub distance: f64,
    pub pp_converged: bool,
    pub pp_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `log distance` against `log η` over converged
    /// rows with positive distance; `None` when fewer than two remain.
    pub slope: Option<f64>,
}

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// MP-vs-PP distance for each `η` (with `σ = sigma_over_eta · η`) from the
/// configured initial state.
pub fn compare_sweep(cfg: &RunConfig, etas: &[f64], seed: Option<u64>) -> Result<Sweep> {
    crate::config::validate_etas(etas, "--etas")?;
    let seed = seed.unwrap_or(cfg.solver.seed);
    let game = build_game(cfg, seed)?;
    let (z, _) = initial_state(cfg, &game, seed)?;
    let c = &cfg.compare;
    let rows = etas
        .iter()
        .map(|&eta| {
            let r = compare_mp_pp(game.oracle(), &z, eta, c.sigma_over_eta * eta, c.pp_tol, c.max_inner)?;
            Ok(SweepRow { eta, distance: r.distance, pp_converged: r.pp_converged, pp_residual: r.pp_residual })
        })
        .collect::<Result<Vec<_>>>()?;
    let usable: Vec<&SweepRow> = rows.iter().filter(|r| r.pp_converged && r.distance > 0.0).collect();
    let xs: Vec<f64> = usable.iter().map(|r| r.eta.ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|r| r.distance.ln()).collect();
    Ok(Sweep { slope: least_squares_slope(&xs, &ys), rows })
}

/// `eta,distance,pp_converged,pp_residual` rows, then a
/// `# loglog_slope,<value>` trailer (`undefined` when no fit exists).
pub fn sweep_csv(sweep: &Sweep) -> String {
    let mut out = String::from("eta,distance,pp_converged,pp_residual\n");
    for r in &sweep.rows {
        writeln!(out, "{},{},{},{}", fmt_f64(r.eta), fmt_f64(r.distance), r.pp_converged, fmt_f64(r.pp_residual))
            .unwrap();
    }
    match sweep.slope {
        Some(s) => writeln!(out, "# loglog_slope,{}", fmt_f64(s)).unwrap(),
        None => out.push_str("# loglog_slope,undefined\n"),
    }
    out
}

pub fn write_sweep_csv(sweep: &Sweep, path: &Path) -> Result<()> {
    std::fs::write(path, sweep_csv(sweep))?;
    Ok(())
}

/// `(k, value)` pairs of one numeric field of a trajectory JSONL.
pub fn extract_curve(jsonl: &str, field: &str) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    for (i, line) in jsonl.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| Error::parse(i + 1, msg);
        let v: serde_json::Value = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        let k = v.get("k").and_then(serde_json::Value::as_u64).ok_or_else(|| bad("missing integer field k".into()))?;
        let value = match v.get(field) {
            Some(serde_json::Value::Number(n)) => n.as_f64().ok_or_else(|| bad(format!("{field} is not a float")))?,
            Some(serde_json::Value::String(s)) => parse_float(s).map_err(bad)?,
            _ => return Err(bad(format!("missing numeric field {field}"))),
        };
        out.push((k as usize, value));
    }
    Ok(out)
}

pub fn curve_csv(field: &str, curve: &[(usize, f64)]) -> String {
    let mut out = format!("k,{field}\n");
    for (k, v) in curve {
        writeln!(out, "{k},{}", fmt_f64(*v)).unwrap();
    }
    out
}

/// Reads `jsonl`, writes `k,<field>` CSV to `out`, returns the row count.
pub fn write_curve_csv(jsonl: &Path, field: &str, out: &Path) -> Result<usize> {
    let curve = extract_curve(&std::fs::read_to_string(jsonl)?, field)?;
    std::fs::write(out, curve_csv(field, &curve))?;
    Ok(curve.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_encode_the_sentinel() {
        let r = IterationRecord {
            k: 3,
            ni: Some(0.1),
            v_wei_mu: Some(f64::INFINITY),
            v_pos_mu: Some(0.0),
            v_wei_nu: Some(1e-300),
            v_pos_nu: Some(2.5),
            v_total: Some(f64::INFINITY),
            weight_movement_mu: 0.0,
            weight_movement_nu: 0.0,
            max_pos_movement_mu: 0.0,
            max_pos_movement_nu: 0.0,
        };
        let line = r.to_json_line();
        assert!(line.contains("\"v_total\":\"inf\""), "{line}");
        let back: IterationRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back, r);
        let curve = extract_curve(&line, "v_total").unwrap();
        assert_eq!(curve, vec![(3, f64::INFINITY)]);
        assert_eq!(curve_csv("v_total", &curve), "k,v_total\n3,inf\n");
    }

    #[test]
    fn malformed_line_reports_its_number() {
        let text = "{\"k\":0,\"ni\":1.0}\n{\"k\":1,\"ni\":0.5}\nnot json\n";
        match extract_curve(text, "ni") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert_eq!(extract_curve("", "ni").unwrap(), vec![]);
    }

    #[test]
    fn slope_of_a_line() {
        assert_eq!(least_squares_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]), Some(2.0));
        assert_eq!(least_squares_slope(&[1.0], &[1.0]), None);
        assert_eq!(least_squares_slope(&[1.0, 1.0], &[1.0, 2.0]), None);
    }

    #[test]
    fn csv_dataset_with_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        std::fs::write(&p, "x1,x2,y\n0,2,1\n1,-0.5,-1\n").unwrap();
        let s = load_dataset(p.to_str().unwrap()).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[1], Sample { x: vec![1.0, -0.5], y: -1.0 });
    }
}
