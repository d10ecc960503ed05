//! End-to-end checks of the `conic-saddle` binary.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use conic_saddle::checkpoint::Checkpoint;
use conic_saddle::particles::Ensemble;
use conic_saddle::runner::{load_reference, IterationRecord};
use conic_saddle::{DomainSpec, SaddleState};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conic-saddle"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const COUNTEREXAMPLE: &str = r#"
version = 1
[game]
family = "fourier_synthetic"
[solver]
eta = 0.005
sigma = 0.005
outer_steps = 50
[init]
mode = "near"
jitter = 0.03
n = 4
m = 4
[diagnostics]
ni = "grid"
grid = 256
lyapunov = true
reference = "known"
"#;

fn records(path: &Path) -> Vec<IterationRecord> {
    std::fs::read_to_string(path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn zero_steps_gives_one_record_and_the_initial_state() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &COUNTEREXAMPLE.replace("outer_steps = 50", "outer_steps = 0"));
    let out = dir.path().join("out");
    let o = run(&["run", "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let recs = records(&out.join("trajectory.jsonl"));
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0].k, 0);
    assert_eq!(recs[0].weight_movement_mu, 0.0);

    let parsed = conic_saddle::config::RunConfig::load(&cfg).unwrap();
    let init = conic_saddle::runner::execute(&parsed, None).unwrap().initial_state;
    assert_eq!(Checkpoint::load(&out.join("final_state.txt")).unwrap().state, init);
}

#[test]
fn reruns_are_byte_identical_and_seed_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", COUNTEREXAMPLE);
    let read = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec!["run", "--config", s(&cfg), "--out", s(&out)];
        args.extend_from_slice(extra);
        let o = run(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        (std::fs::read(out.join("trajectory.jsonl")).unwrap(), std::fs::read(out.join("final_state.txt")).unwrap())
    };
    let a = read("a", &[]);
    let b = read("b", &[]);
    assert_eq!(a, b);
    let c = read("c", &["--seed", "17"]);
    assert_ne!(a.0, c.0);
}

#[test]
fn known_reference_puts_v_total_in_every_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", COUNTEREXAMPLE);
    let out = dir.path().join("out");
    assert!(run(&["run", "--config", s(&cfg), "--out", s(&out)]).status.success());
    let recs = records(&out.join("trajectory.jsonl"));
    assert_eq!(recs.len(), 51);
    assert!(recs.iter().all(|r| r.v_total.is_some() && r.ni.is_some()));
    assert!(recs.windows(2).all(|w| w[0].k < w[1].k));
    let v: Vec<f64> = recs.iter().map(|r| r.v_total.unwrap()).collect();
    assert!(v.last() < v.first());
}

#[test]
fn every_record_has_the_same_fields() {
    let variants = [
        COUNTEREXAMPLE.to_string(),
        COUNTEREXAMPLE.replace("lyapunov = true", "lyapunov = false"),
        COUNTEREXAMPLE.replace("ni = \"grid\"", "ni = \"none\""),
        COUNTEREXAMPLE.replace("reference = \"known\"", "reference = \"clustered_from_final\"").replace("outer_steps = 50", "outer_steps = 20"),
        "version = 1\n[game]\nfamily = \"margin\"\n[solver]\nouter_steps = 5\n[init]\nm = 5\n[diagnostics]\nni = \"multistart\"\nrestarts = 2\nascent_steps = 5\n".to_string(),
    ];
    let dir = tempfile::tempdir().unwrap();
    for (i, text) in variants.iter().enumerate() {
        let cfg = write(dir.path(), &format!("c{i}.toml"), text);
        let out = dir.path().join(format!("out{i}"));
        let o = run(&["run", "--config", s(&cfg), "--out", s(&out)]);
        assert!(o.status.success(), "variant {i}: {}", stderr(&o));
        let text = std::fs::read_to_string(out.join("trajectory.jsonl")).unwrap();
        let keys: BTreeSet<Vec<String>> = text
            .lines()
            .map(|l| {
                let v: serde_json::Value = serde_json::from_str(l).unwrap();
                v.as_object().unwrap().keys().cloned().collect()
            })
            .collect();
        assert_eq!(keys.len(), 1, "variant {i} mixes schemas: {keys:?}");
    }
}

#[test]
fn config_errors_exit_1_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    for (text, key) in [
        (COUNTEREXAMPLE.replace("eta = 0.005", "eta = -1.0"), "solver.eta"),
        (COUNTEREXAMPLE.replace("grid = 256", "grid = 1"), "diagnostics.grid"),
        (COUNTEREXAMPLE.replace("jitter = 0.03", "jitter = 0.03\nbogus = 1"), "bogus"),
        (COUNTEREXAMPLE.replace("version = 1", "version = 2"), "version"),
    ] {
        let cfg = write(dir.path(), "bad.toml", &text);
        let o = run(&["run", "--config", s(&cfg), "--out", s(&dir.path().join("o"))]);
        assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
        assert!(stderr(&o).contains(key), "{key} missing from {}", stderr(&o));
    }
}

#[test]
fn runtime_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let ck = Checkpoint::new(
        SaddleState::new(Ensemble::uniform(vec![vec![0.1], vec![0.2]]).unwrap(), Ensemble::uniform(vec![vec![0.3]]).unwrap()),
        DomainSpec::torus(1),
        DomainSpec::torus(1),
    );
    let path = dir.path().join("state.txt");
    ck.save(&path).unwrap();
    let o = run(&["estimate-mne", s(&path), "--weight-floor", "0.9", "--out", s(&dir.path().join("r.txt"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("floor"), "{}", stderr(&o));
}

#[test]
fn estimate_mne_on_a_sparse_checkpoint_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mu = Ensemble::from_weights(&[0.3, 0.7], vec![vec![0.2], vec![0.65]]).unwrap();
    let nu = Ensemble::from_weights(&[0.5, 0.25, 0.25], vec![vec![0.1], vec![0.4], vec![0.8]]).unwrap();
    let path = dir.path().join("state.txt");
    Checkpoint::new(SaddleState::new(mu.clone(), nu.clone()), DomainSpec::torus(1), DomainSpec::torus(1))
        .save(&path)
        .unwrap();
    let out = dir.path().join("ref.txt");
    let o = run(&["estimate-mne", s(&path), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = load_reference(&out).unwrap();
    let mut got: Vec<(f64, f64)> = r.mu.weights().into_iter().zip(r.mu.positions.iter().map(|p| p[0])).collect();
    got.sort_by(|a, b| a.1.total_cmp(&b.1));
    assert_eq!(got.len(), 2);
    assert!((got[0].0 - 0.3).abs() < 1e-12 && got[0].1 == 0.2);
    assert!((got[1].0 - 0.7).abs() < 1e-12 && got[1].1 == 0.65);
    assert_eq!(r.nu.len(), 3);
}

#[test]
fn clustering_arithmetic_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let mu = Ensemble::from_weights(&[0.3, 0.3, 0.4], vec![vec![0.1], vec![0.1001], vec![0.5]]).unwrap();
    let nu = Ensemble::uniform(vec![vec![0.25]]).unwrap();
    let path = dir.path().join("state.txt");
    Checkpoint::new(SaddleState::new(mu, nu), DomainSpec::torus(1), DomainSpec::torus(1)).save(&path).unwrap();
    let out = dir.path().join("ref.txt");
    let o = run(&["estimate-mne", s(&path), "--weight-floor", "0", "--merge-radius", "0.01", "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = load_reference(&out).unwrap();
    let w = r.mu.weights();
    assert!((w[0] - 0.6).abs() < 1e-12 && (r.mu.positions[0][0] - 0.10005).abs() < 1e-12);
    assert!((w[1] - 0.4).abs() < 1e-12 && r.mu.positions[1][0] == 0.5);
}

fn compare_csv(dir: &Path, config: &str, etas: &str) -> Output {
    let cfg = write(dir, "cmp.toml", config);
    let out = dir.join("cmp.csv");
    run(&["compare-mp-pp", "--config", s(&cfg), "--etas", etas, "--out", s(&out)])
}

fn trailer_slope(dir: &Path) -> String {
    let text = std::fs::read_to_string(dir.join("cmp.csv")).unwrap();
    assert!(text.starts_with("eta,distance,pp_converged,pp_residual\n"));
    text.lines().last().unwrap().strip_prefix("# loglog_slope,").unwrap().to_string()
}

#[test]
fn compare_slope_is_cubic_for_small_steps() {
    let dir = tempfile::tempdir().unwrap();
    let o = compare_csv(dir.path(), COUNTEREXAMPLE, "0.0005,0.00025");
    assert!(o.status.success(), "{}", stderr(&o));
    let slope: f64 = trailer_slope(dir.path()).parse().unwrap();
    assert!((2.5..=3.5).contains(&slope), "{slope}");
}

#[test]
#[ignore = "the two-point slope at these step sizes is about 2.2: sigma times the payoff curvature exceeds 1"]
fn compare_slope_at_coarse_steps() {
    let dir = tempfile::tempdir().unwrap();
    let o = compare_csv(dir.path(), COUNTEREXAMPLE, "0.02,0.01");
    assert!(o.status.success(), "{}", stderr(&o));
    let slope: f64 = trailer_slope(dir.path()).parse().unwrap();
    assert!((2.5..=3.5).contains(&slope), "{slope}");
}

#[test]
fn constant_game_has_no_slope() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "version = 1\n[game]\nfamily = \"fourier_random\"\nk_order = 0\nl_order = 0\n[init]\nn = 3\nm = 3\n";
    let o = compare_csv(dir.path(), cfg, "0.02,0.01");
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(trailer_slope(dir.path()), "undefined");
    let text = std::fs::read_to_string(dir.path().join("cmp.csv")).unwrap();
    for row in text.lines().skip(1).filter(|l| !l.starts_with('#')) {
        assert_eq!(row.split(',').nth(1).unwrap().parse::<f64>().unwrap(), 0.0, "{row}");
    }
}

#[test]
fn repeated_etas_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = compare_csv(dir.path(), COUNTEREXAMPLE, "0.01,0.0100000000001");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--etas"));
    assert_eq!(compare_csv(dir.path(), COUNTEREXAMPLE, "0.01").status.code(), Some(1));
}

#[test]
fn curves_preserve_count_and_precision() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", COUNTEREXAMPLE);
    let out = dir.path().join("out");
    assert!(run(&["run", "--config", s(&cfg), "--out", s(&out)]).status.success());
    let jsonl = out.join("trajectory.jsonl");
    let recs = records(&jsonl);
    for (cmd, pick) in [
        ("ni-curve", (|r: &IterationRecord| r.ni.unwrap()) as fn(&IterationRecord) -> f64),
        ("lyapunov-curve", |r: &IterationRecord| r.v_total.unwrap()),
    ] {
        let csv = dir.path().join(format!("{cmd}.csv"));
        let o = run(&[cmd, s(&jsonl), "--out", s(&csv)]);
        assert!(o.status.success(), "{}", stderr(&o));
        let text = std::fs::read_to_string(&csv).unwrap();
        let rows: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(rows.len(), recs.len());
        for (row, rec) in rows.iter().zip(&recs) {
            let (k, v) = row.split_once(',').unwrap();
            assert_eq!(k.parse::<usize>().unwrap(), rec.k);
            assert_eq!(v.parse::<f64>().unwrap().to_bits(), pick(rec).to_bits());
        }
    }
}

#[test]
fn curves_handle_empty_inf_and_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.jsonl", "");
    let csv = dir.path().join("e.csv");
    assert!(run(&["ni-curve", s(&empty), "--out", s(&csv)]).status.success());
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), "k,ni\n");

    let line = |k: usize, v: &str| {
        format!(
            "{{\"k\":{k},\"ni\":0.5,\"v_total\":{v},\"weight_movement_mu\":0.0,\"weight_movement_nu\":0.0,\
             \"max_pos_movement_mu\":0.0,\"max_pos_movement_nu\":0.0}}\n"
        )
    };
    let inf = write(dir.path(), "inf.jsonl", &(line(0, "\"inf\"") + &line(1, "0.25")));
    assert!(run(&["lyapunov-curve", s(&inf), "--out", s(&csv)]).status.success());
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), "k,v_total\n0,inf\n1,0.25\n");

    let bad = write(dir.path(), "bad.jsonl", &(line(0, "1.0") + &line(1, "1.0") + "{\"k\": 2, \"ni\": \n"));
    let o = run(&["ni-curve", s(&bad), "--out", s(&csv)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}
