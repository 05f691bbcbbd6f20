//! Time-weighted dispersive decay of physically randomized Schrodinger data.

use serde::{Deserialize, Serialize};

use super::fit::{mean_se, Criterion, Estimate, FitReport, FitSpace, ReportBuilder};
use crate::dyadic::besov_norm;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::randomize::{randomize_physical, PartitionOfUnity, RandomModel};
use crate::scalar::Real;

/// Allowed distance between fitted and predicted exponent.
pub const EXPONENT_TOLERANCE: f64 = 0.15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersiveConfig {
    pub q: f64,
    pub r: f64,
    pub mu: f64,
    pub t_list: Vec<f64>,
    /// The norm over `I_T` is taken on `[T, window T]`.
    pub window: f64,
    /// Simpson intervals per window in `ln t` (even).
    pub intervals: usize,
    pub n_draws: usize,
}

impl DispersiveConfig {
    /// `T = 1, sqrt 2, ..., 4` on windows `[T, 2T]`: all times lie in `[1, 8]`.
    pub fn new(q: f64, r: f64, mu: f64, n_draws: usize) -> Self {
        let t_list = (0..5).map(|i| 2f64.powf(0.5 * i as f64)).collect();
        Self { q, r, mu, t_list, window: 2.0, intervals: 8, n_draws }
    }

    /// `3/2 - 1/q - 3/r - mu`; the predicted exponent is its negative.
    pub fn gap(&self) -> f64 {
        1.5 - 1.0 / self.q - 3.0 / self.r - self.mu
    }

    fn validate(&self) -> Result<()> {
        if !(self.q >= 2.0) || !(self.r >= 2.0) || !(self.mu >= 0.0) || !(self.gap() > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need q, r >= 2, mu >= 0 and 3/2 - 1/q - 3/r - mu > 0; got ({}, {}, {})",
                self.q, self.r, self.mu
            )));
        }
        if self.t_list.len() < 4 || self.t_list.iter().any(|t| !(*t >= 1.0)) {
            return Err(Error::InvalidParameter("need at least 4 times T >= 1".into()));
        }
        if !(self.window > 1.0) || self.intervals == 0 || self.intervals % 2 != 0 || self.n_draws < 2 {
            return Err(Error::InvalidParameter("need window > 1, an even interval count and 2 draws".into()));
        }
        Ok(())
    }
}

/// Radius containing all but `1e-3` of the `H^1` mass: the frequency band
/// that sets the group velocity `2|xi|`.
fn h1_band<T: Real>(f: &SpectralField<T>) -> f64 {
    let a = f.coefficients();
    let table = f.grid().xi_abs_table();
    let mut pairs: Vec<(f64, f64)> = a
        .iter()
        .zip(table)
        .map(|(z, k)| {
            let k = k.as_f64();
            (k, (1.0 + k * k) * z.norm_sqr().as_f64())
        })
        .collect();
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut tail = 0.0;
    for &(k, m) in &pairs {
        tail += m;
        if tail > 1e-3 * total {
            return k;
        }
    }
    0.0
}

/// `(int_T^{wT} (t^mu ||<grad> e^{it Delta} u||_{B^0_{r,2}})^q dt)^{1/q}` for every `T`.
fn window_norms<T: Real>(u: &SpectralField<T>, cfg: &DispersiveConfig) -> Vec<f64> {
    let u = u.to_frequency().japanese();
    let m = cfg.intervals;
    let h = cfg.window.ln() / m as f64;
    let mut cache: Vec<(f64, f64)> = Vec::new();
    let mut g = |t: f64| -> f64 {
        if let Some(&(_, v)) = cache.iter().find(|(s, _)| (s - t).abs() < 1e-12 * t) {
            return v;
        }
        let b = besov_norm(&u.schrodinger_propagate(T::of(t)), T::zero(), T::of(cfg.r)).as_f64();
        let v = (t.powf(cfg.mu) * b).powf(cfg.q) * t;
        cache.push((t, v));
        v
    };
    cfg.t_list
        .iter()
        .map(|&t0| {
            let mut s = 0.0;
            for i in 0..=m {
                let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                s += w * g(t0 * (h * i as f64).exp());
            }
            (s * h / 3.0).powf(1.0 / cfg.q)
        })
        .collect()
}

/// Mean over draws of the windowed norm of `<grad> e^{it Delta} u_+^omega`
/// against `T`. With `model = None` the data is not randomized and the fit
/// is only recorded.
pub fn dispersive_decay_mc<T: Real>(
    u_plus: &SpectralField<T>,
    pou: &PartitionOfUnity<T>,
    model: Option<&RandomModel>,
    cfg: &DispersiveConfig,
) -> Result<FitReport> {
    cfg.validate()?;
    if u_plus.grid() != pou.grid() {
        return Err(Error::GridMismatch);
    }
    let draws = if model.is_some() { cfg.n_draws } else { 1 };
    let mut per_t = vec![Vec::with_capacity(draws); cfg.t_list.len()];
    let mut band: f64 = 0.0;
    for d in 0..draws {
        let data = match model {
            Some(m) => randomize_physical(u_plus, pou, m, d as u64)?,
            None => u_plus.clone(),
        };
        if d == 0 {
            band = h1_band(&data);
        }
        for (acc, v) in per_t.iter_mut().zip(window_norms(&data, cfg)) {
            acc.push(v);
        }
    }
    let (mean, se): (Vec<f64>, Vec<f64>) =
        per_t.iter().map(|v| if v.len() > 1 { mean_se(v) } else { (v[0], 0.0) }).unzip();
    let predicted = -cfg.gap();
    let t_end = cfg.t_list.iter().fold(0.0f64, |a, &b| a.max(b)) * cfg.window;
    let l = u_plus.grid().box_length().as_f64();
    let wrap = if band > 0.0 { l / (4.0 * band) } else { f64::INFINITY };
    let (id, criterion) = match model {
        Some(_) => (
            "dispersive_decay",
            Criterion::Within { lo: predicted - EXPONENT_TOLERANCE, hi: predicted + EXPONENT_TOLERANCE },
        ),
        None => ("dispersive_decay_deterministic", Criterion::None),
    };
    ReportBuilder::new(id, "T", "E ||<grad> e^{it Delta} u||_{L^q_mu B^0_{r,2}(T, wT)}", FitSpace::LogLog)
        .data(cfg.t_list.clone(), mean)
        .column("se", se)
        .criterion(Estimate::Slope, criterion)
        .summary("q", cfg.q)
        .summary("r", cfg.r)
        .summary("mu", cfg.mu)
        .summary("predicted_exponent", predicted)
        .summary("window", cfg.window)
        .summary("n_draws", draws as f64)
        .summary("h1_band", band)
        .summary("wrap_time", wrap)
        .note(format!(
            "norm over [T, {}T] instead of [T, inf); a pure power law keeps its exponent",
            cfg.window
        ))
        .note(if t_end <= wrap {
            format!("all times below the wrap time {wrap:.3}")
        } else {
            format!("times up to {t_end} exceed the wrap time {wrap:.3} of the 1e-3 H1 band")
        })
        .build()
}
