use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_complex::Complex;
use zakharov_core::io::save_field;
use zakharov_core::{Field, Grid};

fn zkr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zkr")).args(args).output().expect("spawn zkr")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().last().expect("stderr line");
    serde_json::from_str(line).expect("structured error")
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write_input(dir: &Path, radial: bool) -> PathBuf {
    // the radial input must decay well inside the box to stay degree-0
    let g = if radial { Grid::new(16.0, 32) } else { Grid::new(8.0, 16) }.unwrap();
    let f = Field::from_fn(&g, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        let tilt = if radial { 1.0 } else { 1.0 + 0.5 * x[0] - 0.3 * x[1] * x[2] };
        Complex::new(tilt * (-r2 / 2.0).exp(), 0.0)
    });
    let path = dir.join(if radial { "radial.zkrf" } else { "input.zkrf" });
    save_field(&path, &f).unwrap();
    path
}

fn assert_same_tree(a: &Path, b: &Path) {
    let mut names: Vec<_> = std::fs::read_dir(a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let mut other: Vec<_> = std::fs::read_dir(b).unwrap().map(|e| e.unwrap().file_name()).collect();
    other.sort();
    assert_eq!(names, other);
    for n in names {
        let (x, y) = (a.join(&n), b.join(&n));
        if x.is_dir() {
            assert_same_tree(&x, &y);
        } else {
            assert!(std::fs::read(&x).unwrap() == std::fs::read(&y).unwrap(), "{} differs", n.to_string_lossy());
        }
    }
}

#[test]
fn physical_randomization_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), false);
    let (a, b) = (dir.path().join("a.zkrf"), dir.path().join("b.zkrf"));
    for out in [&a, &b] {
        let o = zkr(&["randomize", "--input", p(&input), "--kind", "phys", "--seed", "5", "--out", p(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(std::fs::read(a.with_extension("json")).unwrap(), std::fs::read(b.with_extension("json")).unwrap());
    let sc = read_json(&a.with_extension("json"));
    assert_eq!(sc["model"]["family"], "gaussian");
    assert_eq!(sc["model"]["seed"], 5);
    // a different seed gives a different field
    let c = dir.path().join("c.zkrf");
    assert!(zkr(&["randomize", "--input", p(&input), "--kind", "phys", "--seed", "6", "--out", p(&c)]).status.success());
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn angular_randomization_of_radial_input_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), true);
    let out = dir.path().join("r.zkrf");
    let o = zkr(&[
        "randomize", "--input", p(&input), "--kind", "angular", "--family", "bounded",
        "--set", "randomization.k_deg_max=4", "--out", p(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let sc = read_json(&out.with_extension("json"));
    assert_eq!(sc["angular"]["degenerate_radial"], true);
    assert!(sc["notes"][0].as_str().unwrap().contains("degree-0"));
    assert!(sc["frame"]["c_frame"].as_f64().unwrap() > 0.0);
    assert!(dir.path().join("r.frame.zkrb").exists());
    let frame = zakharov_core::io::load_frame(&dir.path().join("r.frame.zkrb")).unwrap();
    assert_eq!(frame.k_deg_max, 4);
}

#[test]
fn missing_input_is_a_structured_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = zkr(&["randomize", "--input", "/nonexistent/u.zkrf", "--kind", "phys", "--out", p(&dir.path().join("x.zkrf"))]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"], "io");
    assert_eq!(e["exit_code"], 2);
    let o = zkr(&["final-state", "--config", "/nonexistent/c.toml", "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_flags_are_preconditions() {
    let dir = tempfile::tempdir().unwrap();
    let o = zkr(&["evolve", "--jobs", "0", "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    let o = zkr(&["evolve", "--set", "spaces.nu=0.9", "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "precondition");
}

#[test]
fn zero_data_converges_trivially() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let o = zkr(&["final-state", "--set", "data.u.kind=zero", "--set", "data.v.kind=zero", "--out", p(&run)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = read_json(&run.join("manifest.json"));
    assert_eq!(m["status"], "converged");
    for key in ["xt_energy", "xt_strichartz", "xt_radial_angular", "yt", "u_plus_h1", "v_plus_l2", "sup_u_weighted"] {
        assert_eq!(m["norms"][key], 0.0, "{key}");
    }
}

#[test]
fn small_data_fixture_converges_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let o = zkr(&["final-state", "--config", p(&fixture("small_data.toml")), "--out", p(&run)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let c = read_json(&run.join("convergence.json"));
    assert_eq!(c["status"], "converged");
    assert!(c["contraction_ratio"].as_f64().unwrap() < 0.5);
    assert!(c["iterations"].as_u64().unwrap() <= 12);
    let csv = std::fs::read_to_string(run.join("norms.csv")).unwrap();
    assert!(csv.starts_with("run_id,norm_name,mu,q,s,sigma,T,value,truncation_diagnostic\n"));
    assert_eq!(csv.lines().count(), 5);
    let traj = read_json(&run.join("trajectory").join("manifest.json"));
    assert_eq!(traj["seeds"]["model"], 7);
    assert!(traj["snapshots"].as_array().unwrap().len() <= 21);

    // the stored config alone reproduces the run
    let again = dir.path().join("again");
    let o = zkr(&["final-state", "--config", p(&run.join("config.toml")), "--out", p(&again)]);
    assert!(o.status.success());
    assert_same_tree(&run, &again);
}

#[test]
fn file_inputs_are_pinned_into_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), false);
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        "[grid]\nl = 8.0\nn = 16\n[randomization]\nk_deg_max = 4\n[data.u]\nkind = \"file\"\npath = \"input.zkrf\"\n[data.v]\nkind = \"zero\"\n",
    )
    .unwrap();
    let run = dir.path().join("run");
    let o = zkr(&["final-state", "--config", p(&cfg), "--set", "data.u.path=input.zkrf", "--out", p(&run)]);
    assert!(o.status.code() == Some(0) || o.status.code() == Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(run.join("input_u.zkrf")).unwrap(), std::fs::read(&input).unwrap());
    let stored = std::fs::read_to_string(run.join("config.toml")).unwrap();
    assert!(stored.contains("path = \"input_u.zkrf\""));
    // grid mismatch between file and config is a precondition failure
    let o = zkr(&["final-state", "--config", p(&cfg), "--set", "grid.n=8", "--out", p(&dir.path().join("bad"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn large_data_fixture_fails_to_contract() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let o = zkr(&["final-state", "--config", p(&fixture("large_data.toml")), "--out", p(&run)]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "non_contraction");
    let c = read_json(&run.join("convergence.json"));
    assert_eq!(c["status"], "non_contraction");
    assert!(c["ratios"].as_array().unwrap().iter().all(|r| r.as_f64().unwrap() >= 1.0));
    assert_eq!(read_json(&run.join("manifest.json"))["exit_code"], 3);
}

#[test]
fn unknown_experiment_lists_the_available_ids() {
    let dir = tempfile::tempdir().unwrap();
    let o = zkr(&["diagnose", "--experiment", "no_such_thing", "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"], "unknown_experiment");
    let msg = e["message"].as_str().unwrap();
    for id in zakharov_core::diagnostics::EXPERIMENTS {
        assert!(msg.contains(id), "{id} missing from {msg}");
    }
}

#[test]
fn diagnose_and_report_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    assert!(zkr(&["final-state", "--config", p(&fixture("small_data.toml")), "--out", p(&run)]).status.success());
    let diag = run.join("diagnostics");
    let o = zkr(&[
        "diagnose", "--config", p(&fixture("small_data.toml")), "--experiment", "large_deviation",
        "--experiment", "scattering_residual", "--run", p(&run), "--out", p(&diag),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("large_deviation: PASS"), "{stdout}");
    assert!(diag.join("large_deviation.csv").exists());
    let series = std::fs::read_to_string(diag.join("scattering_residual.csv")).unwrap();
    assert!(series.starts_with("t,u_residual,v_residual,u_weighted,v_weighted\n"));

    let o = zkr(&["report", "--run", p(&run)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = read_json(&run.join("summary.json"));
    assert_eq!(s["status"], "converged");
    assert_eq!(s["diagnostics"]["large_deviation"], true);
    assert!(s["convergence"]["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn diagnose_defaults_to_configured_ids() {
    let dir = tempfile::tempdir().unwrap();
    let o = zkr(&["diagnose", "--config", p(&fixture("small_data.toml")), "--out", p(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("large_deviation: PASS") && stdout.contains("tail_probability: PASS"), "{stdout}");
    let j = read_json(&dir.path().join("tail_probability.json"));
    assert_eq!(j["schema_version"], 1);
}

#[test]
fn evolve_writes_a_conservative_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ev");
    let o = zkr(&["evolve", "--set", "time.dt=0.05", "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = read_json(&out.join("manifest.json"));
    assert!(m["norms"]["mass_drift"].as_f64().unwrap() < 1e-10);
    let t = read_json(&out.join("trajectory").join("manifest.json"));
    assert_eq!(t["snapshots"].as_array().unwrap().len(), 21);
    let (tr, _) = zakharov_core::io::load_trajectory::<f64>(&out.join("trajectory")).unwrap();
    assert!((tr.t_end() - 6.0).abs() < 1e-12);
}
