//! Subcommand bodies. Every artifact is a pure function of the resolved
//! config and the input files, so a run directory replays byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use zakharov_core::diagnostics::{scattering_residual, FitReport};
use zakharov_core::dyadic::{truncation_mass, xt_norm, yt_norm};
use zakharov_core::io::{
    load_json, save_field, save_frame, save_json, save_trajectory, write_norm_csv, FrameSidecar, GridRecord, NormRow,
    TrajectoryMeta,
};
use zakharov_core::randomize::{
    build_good_frame, randomize_angular, randomize_physical, AngularReport, FrameCertificate,
    FrameOptions, GoodFrame, PartitionOfUnity, RandomModel,
};
use zakharov_core::solver::{
    energy, evolve_forward, mass, non_contraction, picard_run, threshold_check, ConvergenceReport, ForwardOptions,
    GroundState, PicardStatus,
};
use zakharov_core::{Error, Field, Grid, Result};

use crate::config::{DataSource, Loaded, RunConfig};
use crate::data::{file_of, materialize, Norm};
use crate::experiments::{self, Outcome};

pub const RUN_SCHEMA_VERSION: u32 = 1;

/// `manifest.json` at the top of a run directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub run_id: String,
    pub command: String,
    pub grid: GridRecord,
    pub alpha: f64,
    pub t: f64,
    pub t_max: f64,
    pub dt: f64,
    pub sigma: f64,
    pub model: Option<RandomModel>,
    pub seeds: BTreeMap<String, u64>,
    pub status: String,
    pub exit_code: i32,
    pub norms: BTreeMap<String, f64>,
    pub files: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Phys,
    Angular,
}

/// JSON sidecar of `zkr randomize`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomizeSidecar {
    pub kind: Kind,
    pub model: RandomModel,
    pub draw: u64,
    pub input_l2: f64,
    pub output_l2: f64,
    pub translates: Option<usize>,
    pub frame: Option<FrameSidecar>,
    pub certificate: Option<FrameCertificate>,
    pub angular: Option<AngularReport>,
    pub notes: Vec<String>,
}

fn grid_of(cfg: &RunConfig) -> Result<Grid> {
    Grid::new(cfg.grid.l, cfg.grid.n)
}

fn frame_of(cfg: &RunConfig) -> Result<GoodFrame> {
    build_good_frame(&FrameOptions::with_degree(cfg.randomization.k_deg_max), cfg.randomization.seed)
}

fn degenerate_note() -> String {
    "input is radial: only degree-0 harmonics are active, so each draw multiplies every dyadic block by one sign".into()
}

/// Smallest stride dividing `steps` that leaves at most `target` intervals.
fn stride(steps: usize, target: usize) -> usize {
    (1..=steps.max(1)).find(|d| steps % d == 0 && steps / d <= target.max(1)).unwrap_or(1)
}

pub fn randomize(loaded: &Loaded, input: &Path, kind: Kind, out: &Path) -> Result<RandomizeSidecar> {
    let cfg = &loaded.config;
    let f: Field = zakharov_core::io::load_field(input)?;
    let model = cfg.randomization.model()?;
    let draw = cfg.randomization.draw;
    let mut sc = RandomizeSidecar {
        kind,
        model,
        draw,
        input_l2: f.norm_l2(),
        output_l2: 0.0,
        translates: None,
        frame: None,
        certificate: None,
        angular: None,
        notes: Vec::new(),
    };
    let g = match kind {
        Kind::Phys => {
            let pou = PartitionOfUnity::new(f.grid())?;
            sc.translates = Some(pou.n_translates());
            randomize_physical(&f, &pou, &model, draw)?
        }
        Kind::Angular => {
            let frame = frame_of(cfg)?;
            let (g, rep) = randomize_angular(&f, &frame, &model, draw, &cfg.randomization.angular())?;
            if rep.degenerate_radial {
                sc.notes.push(degenerate_note());
            }
            let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("field");
            save_frame(out.parent().unwrap_or(Path::new(".")), &format!("{stem}.frame"), &frame)?;
            sc.frame = Some(FrameSidecar::of(&frame));
            sc.certificate = Some(frame.certificate.clone());
            sc.angular = Some(rep);
            g
        }
    };
    sc.output_l2 = g.norm_l2();
    save_field(out, &g)?;
    save_json(&out.with_extension("json"), &sc)?;
    Ok(sc)
}

/// Copies file inputs into `dir` and points the stored config at the copies.
fn pin_inputs(loaded: &Loaded, dir: &Path) -> Result<RunConfig> {
    let mut cfg = loaded.config.clone();
    for (name, src) in [("input_u.zkrf", &mut cfg.data.u), ("input_v.zkrf", &mut cfg.data.v)] {
        if let Some(p) = file_of(src) {
            let from = loaded.resolve(&p);
            let to = dir.join(name);
            if from != to {
                fs::copy(&from, &to)
                    .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", from.display()))))?;
            }
            *src = DataSource::File { path: PathBuf::from(name) };
        }
    }
    fs::write(dir.join("config.toml"), cfg.to_toml()?)?;
    Ok(cfg)
}

pub fn evolve(loaded: &Loaded, out: &Path) -> Result<RunManifest> {
    let cfg = &loaded.config;
    let g = grid_of(cfg)?;
    let u0 = materialize(loaded, &cfg.data.u, &g, Norm::H1)?;
    let v0 = materialize(loaded, &cfg.data.v, &g, Norm::L2)?;
    fs::create_dir_all(out)?;
    pin_inputs(loaded, out)?;
    let steps = ((cfg.time.t_max - cfg.time.t) / cfg.time.dt).round() as usize;
    let mut opts = ForwardOptions::new(cfg.physics.alpha, cfg.time.dt);
    opts.save_every = stride(steps, cfg.time.snapshots);
    let tr = evolve_forward(&u0, &v0, cfg.time.t, cfg.time.t_max, &opts)?;
    let m0 = mass(&u0);
    let e0 = energy(&u0, &v0)?;
    let mut norms = BTreeMap::new();
    let mut dm: f64 = 0.0;
    let mut de: f64 = 0.0;
    for i in 0..tr.len() {
        dm = dm.max((mass(tr.u(i)) - m0).abs());
        de = de.max((energy(tr.u(i), tr.v(i))? - e0).abs());
    }
    norms.insert("mass".into(), m0);
    norms.insert("energy".into(), e0);
    norms.insert("mass_drift".into(), if m0 > 0.0 { dm / m0 } else { dm });
    norms.insert("energy_drift".into(), if e0 != 0.0 { de / e0.abs() } else { de });
    let meta = TrajectoryMeta { alpha: cfg.physics.alpha, seeds: BTreeMap::new(), norms: norms.clone() };
    save_trajectory(&out.join("trajectory"), &tr, &meta, 1)?;
    let man = RunManifest {
        schema_version: RUN_SCHEMA_VERSION,
        run_id: "evolve".into(),
        command: "evolve".into(),
        grid: GridRecord::of(&g),
        alpha: cfg.physics.alpha,
        t: cfg.time.t,
        t_max: cfg.time.t_max,
        dt: cfg.time.dt,
        sigma: cfg.spaces.sigma(),
        model: None,
        seeds: BTreeMap::new(),
        status: "completed".into(),
        exit_code: 0,
        norms,
        files: vec!["config.toml".into(), "trajectory/manifest.json".into()],
    };
    save_json(&out.join("manifest.json"), &man)?;
    Ok(man)
}

fn norm_rows(run_id: &str, cfg: &RunConfig, nl: &zakharov_core::Trajectory<f64>) -> Result<Vec<NormRow>> {
    let spec = cfg.picard_options().norm_spec()?;
    let xt = xt_norm(nl, &spec)?;
    let yt = yt_norm(nl, &spec)?;
    let top = nl.us().iter().map(|u| u.norm_l2()).fold(0.0, f64::max);
    let trunc = nl.us().iter().map(truncation_mass).fold(0.0, f64::max);
    let trunc = if top > 0.0 { trunc / top } else { 0.0 };
    let sigma = spec.sigma();
    let row = |name: &str, mu: f64, q: f64, s: f64, value: f64| NormRow {
        run_id: run_id.into(),
        norm_name: name.into(),
        mu,
        q,
        s,
        sigma,
        t: cfg.time.t,
        value,
        truncation_diagnostic: trunc,
    };
    // s = 0 marks norms without an angular component
    Ok(vec![
        row("xt_energy", 1.0, f64::INFINITY, 0.0, xt.energy),
        row("xt_strichartz", 0.0, 2.0, 0.0, xt.strichartz),
        row("xt_radial_angular", 0.25 + spec.eps(), 2.0, spec.s_angular(), xt.radial_angular),
        row("yt", 0.0, f64::INFINITY, 0.0, yt),
    ])
}

/// Randomize, solve backward from infinity, and record norms and residuals.
/// On non-convergence everything is still written before the error returns.
pub fn final_state(loaded: &Loaded, out: &Path) -> Result<RunManifest> {
    let cfg = &loaded.config;
    let g = grid_of(cfg)?;
    let u_in = materialize(loaded, &cfg.data.u, &g, Norm::H1)?;
    let v_in = materialize(loaded, &cfg.data.v, &g, Norm::L2)?;
    fs::create_dir_all(out)?;
    let stored = pin_inputs(loaded, out)?;
    let r = &stored.randomization;
    let run_id = format!("final-state-s{}-d{}", r.seed, r.draw);
    let mut files = vec!["config.toml".to_string()];
    let mut seeds = BTreeMap::new();
    let mut norms = BTreeMap::new();
    let model = cfg.randomization.model()?;
    let (u_plus, v_plus) = if r.enabled {
        seeds.insert("model".to_string(), r.seed);
        seeds.insert("frame".to_string(), r.seed);
        let pou = PartitionOfUnity::new(&g)?;
        let u = randomize_physical(&u_in, &pou, &model, r.draw)?;
        let frame = frame_of(cfg)?;
        let (v, rep) = randomize_angular(&v_in, &frame, &model, r.draw, &cfg.randomization.angular())?;
        save_frame(out, "frame", &frame)?;
        files.extend(["frame.zkrb".to_string(), "frame.json".to_string()]);
        norms.insert("c_frame".into(), frame.certificate.c_frame);
        norms.insert("angular_pass_through".into(), rep.pass_through_norm);
        (u, v)
    } else {
        (u_in, v_in)
    };
    save_field(&out.join("u_plus.zkrf"), &u_plus)?;
    save_field(&out.join("v_plus.zkrf"), &v_plus)?;
    files.extend(["u_plus.zkrf".to_string(), "v_plus.zkrf".to_string()]);
    norms.insert("u_plus_h1".into(), u_plus.norm_h1());
    norms.insert("v_plus_l2".into(), v_plus.norm_l2());

    let opts = cfg.picard_options();
    let (state, report) = picard_run(&u_plus, &v_plus, &opts, None)?;
    save_json(&out.join("convergence.json"), &report)?;
    files.push("convergence.json".into());
    norms.insert("contraction_ratio".into(), report.contraction_ratio);
    norms.insert("residual".into(), report.residual);
    norms.insert("iterations".into(), report.iterations as f64);

    let full = state.full();
    let series = scattering_residual(&full, &u_plus, &v_plus, cfg.physics.alpha, cfg.spaces.sigma())?;
    let mut buf = Vec::new();
    series.write_csv(&mut buf)?;
    fs::write(out.join("scattering.csv"), buf)?;
    save_json(&out.join("scattering.json"), &series)?;
    files.extend(["scattering.csv".to_string(), "scattering.json".to_string()]);
    norms.insert("sup_u_weighted".into(), series.sup_u_weighted);
    norms.insert("sup_v_weighted".into(), series.sup_v_weighted);

    let rows = norm_rows(&run_id, cfg, &state.nonlinear)?;
    for row in &rows {
        norms.insert(row.norm_name.clone(), row.value);
    }
    let mut buf = Vec::new();
    write_norm_csv(&mut buf, &rows)?;
    fs::write(out.join("norms.csv"), buf)?;
    files.push("norms.csv".into());

    let q = GroundState::default_profile()?;
    let th = threshold_check(full.u(0), full.v(0), &q)?;
    norms.insert("threshold_lhs".into(), th.lhs);
    norms.insert("threshold_rhs".into(), th.rhs);
    norms.insert("mass".into(), mass(full.u(0)));
    norms.insert("energy".into(), energy(full.u(0), full.v(0))?);

    let meta = TrajectoryMeta { alpha: cfg.physics.alpha, seeds: seeds.clone(), norms: norms.clone() };
    save_trajectory(&out.join("trajectory"), &full, &meta, stride(full.len() - 1, cfg.time.snapshots))?;
    files.push("trajectory/manifest.json".into());

    let (status, exit_code) = match report.status {
        PicardStatus::Converged => ("converged", 0),
        PicardStatus::MaxIterations => ("max_iterations", 3),
        PicardStatus::NonContraction => ("non_contraction", 3),
    };
    let man = RunManifest {
        schema_version: RUN_SCHEMA_VERSION,
        run_id,
        command: "final-state".into(),
        grid: GridRecord::of(&g),
        alpha: cfg.physics.alpha,
        t: cfg.time.t,
        t_max: cfg.time.t_max,
        dt: cfg.time.dt,
        sigma: cfg.spaces.sigma(),
        model: r.enabled.then_some(model),
        seeds,
        status: status.into(),
        exit_code,
        norms,
        files,
    };
    save_json(&out.join("manifest.json"), &man)?;
    match report.status {
        PicardStatus::Converged => Ok(man),
        PicardStatus::NonContraction => Err(non_contraction(&report)),
        PicardStatus::MaxIterations => Err(Error::NonContraction(format!(
            "no convergence to tol {} in {} iterations (last distance {:.3e})",
            opts.tol,
            report.iterations,
            report.distances.last().copied().unwrap_or(f64::NAN)
        ))),
    }
}

/// Runs each id; returns `(id, pass)` where series experiments count as passing.
pub fn diagnose(loaded: &Loaded, ids: &[String], out: &Path, run: Option<&Path>) -> Result<Vec<(String, bool)>> {
    let ids: Vec<String> = if ids.is_empty() { loaded.config.experiments.ids.clone() } else { ids.to_vec() };
    if ids.is_empty() {
        return Err(Error::InvalidParameter("no experiment given (use --experiment or experiments.ids)".into()));
    }
    // reject unknown ids before running anything
    for id in &ids {
        experiments::canonical(id)?;
    }
    fs::create_dir_all(out)?;
    let mut done = Vec::new();
    for id in &ids {
        let pass = match experiments::run(id, &loaded.config, out, run)? {
            Outcome::Fit(r) => r.pass,
            Outcome::Series => true,
        };
        done.push((experiments::canonical(id)?.to_string(), pass));
    }
    Ok(done)
}

/// Collected view of a run directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run_id: String,
    pub status: String,
    pub exit_code: i32,
    pub convergence: Option<ConvergenceReport>,
    pub norms: BTreeMap<String, f64>,
    pub diagnostics: BTreeMap<String, bool>,
}

/// Reads `manifest.json`, `convergence.json` and every fit report under
/// `diagnostics/`, and writes `summary.json`.
pub fn report(run: &Path) -> Result<RunSummary> {
    let man: RunManifest = load_json(&run.join("manifest.json"))?;
    if man.schema_version != RUN_SCHEMA_VERSION {
        return Err(Error::Format(format!("run manifest schema {}, expected {RUN_SCHEMA_VERSION}", man.schema_version)));
    }
    let conv = run.join("convergence.json");
    let convergence = if conv.exists() { Some(load_json(&conv)?) } else { None };
    let mut diagnostics = BTreeMap::new();
    let dd = run.join("diagnostics");
    if dd.is_dir() {
        let mut paths: Vec<PathBuf> = fs::read_dir(&dd)?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        paths.sort();
        for p in paths.iter().filter(|p| p.extension().is_some_and(|e| e == "json")) {
            // time series share the directory; only fit reports carry a verdict
            if let Ok(r) = FitReport::from_json(&fs::read_to_string(p)?) {
                diagnostics.insert(r.experiment.clone(), r.pass);
            }
        }
    }
    let s = RunSummary {
        run_id: man.run_id,
        status: man.status,
        exit_code: man.exit_code,
        convergence,
        norms: man.norms,
        diagnostics,
    };
    save_json(&run.join("summary.json"), &s)?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::stride;

    #[test]
    fn stride_divides_and_bounds() {
        assert_eq!(stride(40, 20), 2);
        assert_eq!(stride(40, 40), 1);
        assert_eq!(stride(7, 3), 7);
        assert_eq!(stride(0, 20), 1);
        for (s, t) in [(30, 20), (1000, 20), (12, 5)] {
            let d = stride(s, t);
            assert_eq!(s % d, 0);
            assert!(s / d <= t);
        }
    }
}
