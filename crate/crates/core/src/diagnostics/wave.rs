//! Radial-angular Strichartz-type norms of angularly randomized half-wave data.

use serde::{Deserialize, Serialize};

use super::fit::{mean_se, Criterion, Estimate, FitReport, FitSpace, ReportBuilder};
use super::moments::{empirical_moment, BETAS};
use crate::dyadic::{aniso_norm, content_band, lp_project, Selector};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::quadrature::AngularQuadrature;
use crate::randomize::{AngularOptions, AngularRandomizer, GoodFrame, RandomModel};
use crate::scalar::Real;

/// Bound on the fitted growth exponent in `beta`.
pub const WAVE_BETA_CAP: f64 = 0.6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveConfig {
    /// Time exponent.
    pub p: f64,
    /// Radial exponent.
    pub q: f64,
    /// Angular exponent.
    pub s: f64,
    pub alpha: f64,
    /// The time norm is over `[0, t_max]`.
    pub t_max: f64,
    pub n_times: usize,
    /// Radius of the ball carrying the radial-angular norm.
    pub r_max: f64,
    pub n_draws: usize,
    pub betas: Vec<f64>,
    pub angular: AngularOptions,
}

impl WaveConfig {
    pub fn new(p: f64, q: f64, s: f64, n_draws: usize) -> Self {
        Self {
            p,
            q,
            s,
            alpha: 1.0,
            t_max: 2.0,
            n_times: 5,
            r_max: 6.0,
            n_draws,
            betas: BETAS.to_vec(),
            angular: AngularOptions { active_threshold: 1e-6, ..Default::default() },
        }
    }

    /// Regularity `1/p + 3/q - 3/2` of the block norm.
    pub fn mu(&self) -> f64 {
        1.0 / self.p + 3.0 / self.q - 1.5
    }

    pub fn admissible(&self) -> bool {
        1.0 / self.p + 2.0 / self.q < 1.0
    }

    fn validate(&self) -> Result<()> {
        if !self.admissible() {
            return Err(Error::InvalidParameter(format!(
                "(p, q) = ({}, {}) violates 1/p + 2/q < 1",
                self.p, self.q
            )));
        }
        if !(self.p >= 2.0) || !(self.q >= 2.0) || !(self.s >= 2.0) {
            return Err(Error::InvalidParameter("need p, q, s >= 2".into()));
        }
        if !(self.alpha > 0.0) || !(self.t_max > 0.0) || self.n_times < 2 || !(self.r_max > 0.0) {
            return Err(Error::InvalidParameter("need alpha, t_max, r_max > 0 and 2 times".into()));
        }
        if self.n_draws < 2 || self.betas.len() < 4 {
            return Err(Error::InvalidParameter("need 2 draws and 4 moment orders".into()));
        }
        Ok(())
    }
}

/// `(sum_k 2^{2k mu} ||P_k e^{i alpha t |grad|} v||^2_{L^p_t L^q_r L^s_theta})^{1/2}`,
/// time integral by the trapezoid rule on `[0, t_max]`.
pub fn wave_block_norm<T: Real>(v: &SpectralField<T>, cfg: &WaveConfig) -> Result<f64> {
    let g = v.grid();
    let va = v.to_frequency();
    let h = cfg.t_max / (cfg.n_times - 1) as f64;
    let mut acc = 0.0;
    for k in g.dyadic_range() {
        let pk = lp_project(&va, Selector::Eq(k))?;
        if pk.norm_l2() == T::zero() {
            continue;
        }
        // the propagator only rotates phases, so the band is time independent
        let quad = AngularQuadrature::adapted(content_band(&pk), cfg.r_max, 8.0);
        let mut s = 0.0;
        for i in 0..cfg.n_times {
            let t = i as f64 * h;
            let w = if i == 0 || i + 1 == cfg.n_times { 0.5 } else { 1.0 };
            let field = pk.half_wave_propagate(T::of(t), T::of(cfg.alpha))?;
            s += w * aniso_norm(&field, cfg.q, cfg.s, &quad)?.as_f64().powf(cfg.p);
        }
        let block = (s * h).powf(1.0 / cfg.p);
        acc += 2f64.powf(2.0 * k as f64 * cfg.mu()) * block * block;
    }
    Ok(acc.sqrt())
}

/// Per-draw block norms of `e^{i alpha t |grad|} v_+^omega`.
pub fn wave_norm_samples<T: Real>(
    v_plus: &SpectralField<T>,
    frame: &GoodFrame,
    model: &RandomModel,
    cfg: &WaveConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let rz = AngularRandomizer::new(v_plus, frame, &cfg.angular)?;
    (0..cfg.n_draws as u64).map(|d| wave_block_norm(&rz.draw(model, d)?, cfg)).collect()
}

/// `L^beta_omega` moments of the block norm against `beta`.
pub fn wave_aniso_mc<T: Real>(
    v_plus: &SpectralField<T>,
    frame: &GoodFrame,
    model: &RandomModel,
    cfg: &WaveConfig,
) -> Result<FitReport> {
    let z = wave_norm_samples(v_plus, frame, model, cfg)?;
    let finite = z.iter().all(|v| v.is_finite());
    let vn = v_plus.norm_l2().as_f64();
    let m: Vec<f64> = cfg.betas.iter().map(|&b| empirical_moment(&z, b)).collect();
    let normalized: Vec<f64> = m.iter().zip(&cfg.betas).map(|(m, b)| m / (b.sqrt() * vn)).collect();
    let constant = normalized.iter().fold(0.0f64, |a, &b| a.max(b));
    let (mean, se) = mean_se(&z);
    ReportBuilder::new("wave_aniso", "beta", "||Z||_{L^beta_omega}", FitSpace::LogLog)
        .data(cfg.betas.clone(), m)
        .column("normalized", normalized)
        .criterion(Estimate::Slope, Criterion::AtMost { bound: WAVE_BETA_CAP })
        .check("finite", finite)
        .summary("p", cfg.p)
        .summary("q", cfg.q)
        .summary("s", cfg.s)
        .summary("mu", cfg.mu())
        .summary("constant", constant)
        .summary("mean_norm", mean)
        .summary("mean_norm_se", se)
        .summary("n_draws", cfg.n_draws as f64)
        .note(format!("time norm over [0, {}], radial-angular norm on the ball of radius {}", cfg.t_max, cfg.r_max))
        .build()
}
