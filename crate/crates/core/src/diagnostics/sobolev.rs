//! Blockwise Sobolev-in-time inequality for free flows:
//! `||P_k u||_{L^inf_sigma L^r} <~ 2^{e k / q} ||P_k u||_{L^q_sigma L^r}` with
//! `e = 2` for the Schrodinger group and `e = 1` for the half-wave group.

use serde::{Deserialize, Serialize};

use super::fit::{Criterion, Estimate, FitReport, FitSpace, ReportBuilder};
use crate::dyadic::{lp_project, Selector};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "flow", rename_all = "snake_case")]
pub enum Flow {
    Schrodinger,
    HalfWave { alpha: f64 },
}

impl Flow {
    /// Time-derivative order of a block at frequency `2^k`: `2^{e k}`.
    pub fn order(self) -> f64 {
        match self {
            Flow::Schrodinger => 2.0,
            Flow::HalfWave { .. } => 1.0,
        }
    }

    fn speed(self) -> f64 {
        match self {
            Flow::Schrodinger => 1.0,
            Flow::HalfWave { alpha } => alpha,
        }
    }

    pub fn propagate<T: Real>(self, f: &SpectralField<T>, t: f64) -> Result<SpectralField<T>> {
        match self {
            Flow::Schrodinger => Ok(f.schrodinger_propagate(T::of(t))),
            Flow::HalfWave { alpha } => f.half_wave_propagate(T::of(t), T::of(alpha)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevConfig {
    pub q: f64,
    pub r: f64,
    pub sigma: f64,
    /// Time window `[t0, t1]`, `t0 >= 1`.
    pub t0: f64,
    pub t1: f64,
    /// Blocks to tabulate; `None` takes every nonzero resolved block.
    pub ks: Option<Vec<i32>>,
    /// Time samples per `2^{-e k_max}` (the fastest block's time scale).
    pub samples_per_scale: f64,
    /// Slack on the fitted `k`-slope above `e / q`.
    pub slope_slack: f64,
}

impl SobolevConfig {
    pub fn new(q: f64, r: f64, sigma: f64, t0: f64, t1: f64) -> Self {
        Self { q, r, sigma, t0, t1, ks: None, samples_per_scale: 8.0, slope_slack: 0.15 }
    }
}

/// Per-block ratio `sup_t t^sigma ||P_k u(t)||_{L^r} / (int (t^sigma ||P_k u(t)||_{L^r})^q dt)^{1/q}`
/// against `k`. The fitted slope of `log2` ratio must not exceed `e/q + slack`;
/// the uniform constant is the largest `ratio / 2^{e k / q}`.
pub fn sobolev_embedding_check<T: Real>(u0: &SpectralField<T>, flow: Flow, cfg: &SobolevConfig) -> Result<FitReport> {
    if !(cfg.r > 2.0) || !(cfg.q >= 1.0) || !(cfg.sigma >= 0.0) || !(cfg.t0 >= 1.0) || !(cfg.t1 > cfg.t0) {
        return Err(Error::InvalidParameter(format!(
            "need r > 2, q >= 1, sigma >= 0 and 1 <= t0 < t1; got r={}, q={}, sigma={}, [{}, {}]",
            cfg.r, cfg.q, cfg.sigma, cfg.t0, cfg.t1
        )));
    }
    let g = u0.grid();
    let ua = u0.to_frequency();
    let ks: Vec<i32> = match &cfg.ks {
        Some(ks) => ks.clone(),
        None => g.dyadic_range().collect(),
    };
    let mut blocks = Vec::new();
    for &k in &ks {
        let pk = lp_project(&ua, Selector::Eq(k))?;
        if pk.norm_l2().as_f64() > 1e-12 * ua.norm_l2().as_f64() {
            blocks.push((k, pk));
        }
    }
    if blocks.is_empty() {
        return Err(Error::InvalidParameter("data has no content in the requested blocks".into()));
    }
    let e = flow.order();
    let k_top = blocks.iter().map(|b| b.0).max().unwrap_or(0);
    let dt_max = 2f64.powf(-e * k_top as f64) / (flow.speed() * cfg.samples_per_scale);
    let n = ((cfg.t1 - cfg.t0) / dt_max).ceil().max(2.0) as usize;
    let h = (cfg.t1 - cfg.t0) / n as f64;
    let mut x = Vec::new();
    let mut ratio = Vec::new();
    let mut sup = Vec::new();
    let mut lq = Vec::new();
    for (k, pk) in &blocks {
        let mut top: f64 = 0.0;
        let mut acc = 0.0;
        for i in 0..=n {
            let t = cfg.t0 + i as f64 * h;
            let v = t.powf(cfg.sigma) * flow.propagate(pk, t)?.norm_lq(T::of(cfg.r)).as_f64();
            top = top.max(v);
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            acc += w * v.powf(cfg.q);
        }
        let l = (acc * h).powf(1.0 / cfg.q);
        x.push(*k as f64);
        ratio.push(top / l);
        sup.push(top);
        lq.push(l);
    }
    let normalized: Vec<f64> = x.iter().zip(&ratio).map(|(k, r)| r / 2f64.powf(e * k / cfg.q)).collect();
    let constant = normalized.iter().fold(0.0f64, |a, &b| a.max(b));
    let id = match flow {
        Flow::Schrodinger => "sobolev_embedding_schrodinger",
        Flow::HalfWave { .. } => "sobolev_embedding_half_wave",
    };
    ReportBuilder::new(id, "k", "sup / L^q_sigma", FitSpace::Log2Y)
        .data(x, ratio)
        .column("sup", sup)
        .column("lq", lq)
        .column("normalized", normalized)
        .criterion(Estimate::Slope, Criterion::AtMost { bound: e / cfg.q + cfg.slope_slack })
        .summary("constant", constant)
        .summary("order", e)
        .summary("q", cfg.q)
        .summary("r", cfg.r)
        .summary("sigma", cfg.sigma)
        .summary("time_step", h)
        .build()
}
