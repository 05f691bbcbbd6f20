//! Angular randomization: each dyadic block is expanded in a randomly
//! rotated spherical-harmonic frame and the expansion coefficients are
//! multiplied by independent draws.

pub mod bessel;
pub mod fb;
pub mod frame;
pub mod harmonics;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

pub use bessel::{bessel_j, spherical_j};
pub use fb::{
    bessel_synthesis_point, fb_analyze, fb_analyze_block_of, fb_synthesize, AngularOptions, BlockSynthesis,
    FourierBesselCoeffs, RadialNodes,
};
pub use frame::{build_good_frame, AnalysisNodes, FrameCertificate, FrameOptions, GoodFrame};

use super::model::{RandomModel, StreamTag};
use crate::dyadic::{lp_project, DyadicCutoff, Selector};
use crate::error::Result;
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::scalar::Real;

type Cx = Complex<f64>;

/// Per-block outcome of the analysis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularBlockReport {
    pub block: i32,
    /// `||P_m f||_{L^2}` on the grid.
    pub block_norm: f64,
    /// `||P_m f||` recovered from the radial profiles by Plancherel.
    pub profile_norm: f64,
    /// Relative `L^2` error of the unrandomized resynthesis.
    pub roundtrip_rel: f64,
    pub active_modes: usize,
    pub max_active_degree: usize,
}

/// Summary of what the angular procedure randomizes and what it leaves alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularReport {
    pub blocks: Vec<AngularBlockReport>,
    /// Zero mode, content past the top block and skipped blocks.
    pub pass_through_norm: f64,
    /// Sum over blocks of the angular truncation residual.
    pub residual_norm: f64,
    pub total_norm: f64,
    /// Only degree-0 profiles are active: the draw rescales each block.
    pub degenerate_radial: bool,
}

/// Angular randomizer for a fixed input and frame. Construction does the
/// analysis once; each draw is a sum of precomputed columns.
#[derive(Clone, Debug)]
pub struct AngularRandomizer<T: Real> {
    grid: GridSpec<T>,
    plans: Vec<BlockSynthesis>,
    labels: Vec<Vec<(usize, usize)>>,
    pass_through: SpectralField<T>,
    pub report: AngularReport,
}

impl<T: Real> AngularRandomizer<T> {
    pub fn new(f: &SpectralField<T>, frame: &GoodFrame, opts: &AngularOptions) -> Result<Self> {
        let grid = f.grid().clone();
        let nodes = frame.analysis_nodes();
        let total = f.norm_l2().as_f64();
        let mut plans = Vec::new();
        let mut labels = Vec::new();
        let mut blocks = Vec::new();
        let mut randomized = Vec::new();
        let mut residual = SpectralField::zeros(&grid);
        for m in grid.dyadic_range() {
            let pm = lp_project(f, Selector::Eq(m))?;
            let bn = pm.norm_l2().as_f64();
            if bn <= 1e-14 * total {
                continue;
            }
            let coeffs = fb_analyze_block_of(f, m, frame, &nodes, opts);
            let plan = BlockSynthesis::new(&grid, &coeffs, frame, opts.active_threshold)?;
            let lab: Vec<_> = plan.active.iter().map(|&j| frame.label(j)).collect();
            let mut acc = vec![Cx::new(0.0, 0.0); grid.len()];
            plan.accumulate(&vec![1.0; plan.active.len()], &mut acc);
            let synth = to_field(&grid, &acc)?;
            let diff = pm.sub(&synth);
            let profile_norm = (coeffs.plancherel_norm_sq() * 2f64.powi(-3 * m)).sqrt();
            blocks.push(AngularBlockReport {
                block: m,
                block_norm: bn,
                profile_norm,
                roundtrip_rel: diff.norm_l2().as_f64() / bn,
                active_modes: plan.active.len(),
                max_active_degree: lab.iter().map(|l| l.0).max().unwrap_or(0),
            });
            residual = residual.add(&diff);
            randomized.push(m);
            plans.push(plan);
            labels.push(lab);
        }
        let table = grid.xi_abs_table().to_vec();
        let pass = f.apply_symbol(|i| {
            let covered: T = randomized.iter().map(|&m| DyadicCutoff::rho(m, table[i])).sum();
            Complex::new(T::one() - covered, T::zero())
        });
        let pass_through_norm = pass.norm_l2().as_f64();
        let residual_norm = residual.norm_l2().as_f64();
        let pass_through = if opts.pass_through_residual { pass.add(&residual) } else { pass };
        let degenerate_radial = !blocks.is_empty() && blocks.iter().all(|b| b.max_active_degree == 0);
        Ok(Self {
            grid,
            plans,
            labels,
            pass_through,
            report: AngularReport { blocks, pass_through_norm, residual_norm, total_norm: total, degenerate_radial },
        })
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    /// The unrandomized part added to every draw.
    pub fn pass_through(&self) -> &SpectralField<T> {
        &self.pass_through
    }

    /// Draw `f^omega`; multipliers are `model.sample(Ang, draw, [m, k, l])`.
    pub fn draw(&self, model: &RandomModel, draw: u64) -> Result<SpectralField<T>> {
        let mut acc = vec![Cx::new(0.0, 0.0); self.grid.len()];
        for (plan, lab) in self.plans.iter().zip(&self.labels) {
            let y: Vec<f64> = lab
                .iter()
                .map(|&(k, l)| model.sample(StreamTag::Ang, draw, &[plan.block as i64, k as i64, l as i64]))
                .collect();
            plan.accumulate(&y, &mut acc);
        }
        Ok(to_field(&self.grid, &acc)?.add(&self.pass_through))
    }

    /// Exact `E ||f^omega||^2`: distinct multipliers are independent with
    /// mean zero, so the columns add in square.
    pub fn expected_norm_sq(&self, model: &RandomModel) -> f64 {
        let vol = self.grid.volume().as_f64();
        let mut s = 0.0;
        for plan in &self.plans {
            let na = plan.active.len();
            for j in 0..na {
                let mut acc = vec![Cx::new(0.0, 0.0); self.grid.len()];
                let mut e = vec![0.0; na];
                e[j] = 1.0;
                plan.accumulate(&e, &mut acc);
                s += vol * acc.iter().map(|z| z.norm_sqr()).sum::<f64>();
            }
        }
        model.variance() * s + self.pass_through.norm_l2().as_f64().powi(2)
    }
}

fn to_field<T: Real>(grid: &GridSpec<T>, acc: &[Cx]) -> Result<SpectralField<T>> {
    SpectralField::from_frequency(grid, acc.iter().map(|z| Complex::new(T::of(z.re), T::of(z.im))).collect())
}

/// One angular draw of `f`, with the analysis report.
pub fn randomize_angular<T: Real>(
    f: &SpectralField<T>,
    frame: &GoodFrame,
    model: &RandomModel,
    draw: u64,
    opts: &AngularOptions,
) -> Result<(SpectralField<T>, AngularReport)> {
    let r = AngularRandomizer::new(f, frame, opts)?;
    Ok((r.draw(model, draw)?, r.report))
}
