//! Shipped fixtures behind `zkr diagnose`. Each fixture carries its own
//! geometry; the config supplies the random model and the sample counts.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex;
use zakharov_core::diagnostics::{
    coefficient_sums, dispersive_decay_mc, large_deviation_mc, mismatch_decay, scattering_residual,
    sobolev_embedding_check, tail_probability_mc, wave_aniso_mc, Criterion, DispersiveConfig, FitReport, Flow,
    MismatchCase, SobolevConfig, WaveConfig, BETAS, EXPERIMENTS,
};
use zakharov_core::io::{load_field, load_trajectory, save_json};
use zakharov_core::randomize::{build_good_frame, FrameOptions, PartitionOfUnity, RandomModel};
use zakharov_core::{Error, Field, Grid, Result};

use crate::config::RunConfig;

/// Alternative names accepted on the command line.
const ALIASES: [(&str, &str); 1] = [("mismatch_decay", "mismatch_spatial")];

pub fn canonical(id: &str) -> Result<&'static str> {
    if let Some(&(_, to)) = ALIASES.iter().find(|(from, _)| *from == id) {
        return Ok(to);
    }
    EXPERIMENTS.iter().copied().find(|e| *e == id).ok_or_else(|| Error::UnknownExperiment {
        id: id.to_string(),
        available: EXPERIMENTS.iter().chain(ALIASES.iter().map(|a| &a.0)).copied().collect::<Vec<_>>().join(", "),
    })
}

/// What an experiment produced.
pub enum Outcome {
    Fit(FitReport),
    /// A time series, written without a verdict.
    Series,
}

fn bump(g: &Grid, w: f64) -> Field {
    Field::from_fn(g, |x| Complex::new((-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (2.0 * w * w)).exp(), 0.0))
}

fn fixture_coefficients() -> Vec<f64> {
    (0..32).map(|j| 1.0 / (1.0 + j as f64)).collect()
}

fn standard_normal(seed: u64) -> Result<RandomModel> {
    RandomModel::gaussian(1.0, seed)
}

/// Runs `id` and writes `<id>.csv` / `<id>.json` into `out`. `run` is the
/// final-state directory needed by `scattering_residual`.
pub fn run(id: &str, cfg: &RunConfig, out: &Path, run: Option<&Path>) -> Result<Outcome> {
    let id = canonical(id)?;
    let model = cfg.randomization.model()?;
    let seed = cfg.randomization.seed;
    let draws = cfg.experiments.draws.max(2);
    let report = match id {
        "large_deviation" => large_deviation_mc(&fixture_coefficients(), &model, &BETAS, cfg.experiments.samples)?,
        "tail_probability" => {
            // the Gaussian tail oracle: N(0, 1), A = 1, lambda in [1, 3]
            let n = cfg.experiments.samples.max(100_000);
            let s = coefficient_sums(&[1.0], &standard_normal(seed)?, n);
            let lambdas: Vec<f64> = (0..9).map(|i| 1.0 + 0.25 * i as f64).collect();
            tail_probability_mc(&s, 1.0, &lambdas, Criterion::Within { lo: 0.4, hi: 0.6 })?
        }
        "mismatch_spatial" => {
            let g = Grid::new(48.0, 128)?;
            let pou = PartitionOfUnity::new(&g)?;
            let f = Field::plane_wave(&g, [30, 0, 0], Complex::new(1.0, 0.0));
            let case = MismatchCase::Spatial {
                block: Some(2),
                l_prime: [-6, 0, 0],
                direction: [1, 0, 0],
                separations: (4..=12).collect(),
            };
            mismatch_decay(&f, &pou, 2.0, 3.0, &case)?
        }
        "mismatch_low_high" => {
            let g = Grid::new(4.0, 128)?;
            let pou = PartitionOfUnity::new(&g)?;
            let f = Field::from_fn(&g, |x| Complex::new(1.0 + 0.5 * (0.5 * PI * x[0]).cos(), 0.0));
            mismatch_decay(&f, &pou, 2.0, 2.0, &MismatchCase::LowHigh { l: [0; 3], ks: (1..=5).collect() })?
        }
        "mismatch_high_low" => {
            let g = Grid::new(4.0, 128)?;
            let pou = PartitionOfUnity::new(&g)?;
            let f = Field::from_fn(&g, |x| Complex::new(1.0 + 0.5 * (0.5 * PI * x[0]).cos(), 0.0));
            mismatch_decay(&f, &pou, 2.0, 2.0, &MismatchCase::HighLow { l: [0; 3], j: 0, ks: (5..=g.k_max()).collect() })?
        }
        "dispersive_decay" | "dispersive_decay_deterministic" => {
            let g = Grid::new(16.0 * PI, 48)?;
            let pou = PartitionOfUnity::new(&g)?;
            let u = bump(&g, 1.0);
            let m = RandomModel::bounded(1.0, seed)?;
            let rand = id == "dispersive_decay";
            dispersive_decay_mc(&u, &pou, rand.then_some(&m), &DispersiveConfig::new(2.0, 6.0, 0.0, draws))?
        }
        "wave_aniso" => {
            let g = Grid::new(16.0, 32)?;
            let gauss = |x: [f64; 3]| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 4.5).exp();
            let v = Field::from_fn(&g, |x| {
                Complex::new((1.0 + x[0] - 0.5 * x[1] * x[2]) * gauss(x), 0.3 * x[2] * gauss(x))
            });
            let frame = build_good_frame(&FrameOptions::with_degree(6), seed)?;
            let m = RandomModel::bounded(1.0, seed)?;
            wave_aniso_mc(&v, &frame, &m, &WaveConfig::new(4.0, 4.0, 2.0, draws))?
        }
        "sobolev_embedding_schrodinger" | "sobolev_embedding_half_wave" => {
            let g = Grid::new(8.0, 32)?;
            let flow = if id.ends_with("schrodinger") { Flow::Schrodinger } else { Flow::HalfWave { alpha: 1.0 } };
            // focus at t = 2, inside the window
            let u0 = flow.propagate(&bump(&g, 0.4), -2.0)?;
            let mut sc = SobolevConfig::new(2.0, 6.0, 0.0, 1.0, 3.0);
            sc.ks = Some((-1..=2).collect());
            sobolev_embedding_check(&u0, flow, &sc)?
        }
        "scattering_residual" => {
            let dir = run.ok_or_else(|| {
                Error::InvalidParameter("scattering_residual needs --run <final-state directory>".into())
            })?;
            let (traj, m) = load_trajectory::<f64>(&dir.join("trajectory"))?;
            let up: Field = load_field(&dir.join("u_plus.zkrf"))?;
            let vp: Field = load_field(&dir.join("v_plus.zkrf"))?;
            let s = scattering_residual(&traj, &up, &vp, m.alpha, cfg.spaces.sigma())?;
            std::fs::create_dir_all(out)?;
            let mut buf = Vec::new();
            s.write_csv(&mut buf)?;
            std::fs::write(out.join("scattering_residual.csv"), buf)?;
            save_json(&out.join("scattering_residual.json"), &s)?;
            return Ok(Outcome::Series);
        }
        _ => unreachable!("canonical ids are exhaustive"),
    };
    report.emit(out)?;
    Ok(Outcome::Fit(report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_id_is_dispatched() {
        for id in EXPERIMENTS {
            assert_eq!(canonical(id).unwrap(), id);
        }
        assert_eq!(canonical("mismatch_decay").unwrap(), "mismatch_spatial");
        match canonical("nope") {
            Err(Error::UnknownExperiment { available, .. }) => assert!(available.contains("large_deviation")),
            _ => panic!("unknown id accepted"),
        }
    }
}
