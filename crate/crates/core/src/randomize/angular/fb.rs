//! Fourier-Bessel analysis and synthesis of unit-frequency blocks.
//!
//! Block `m` is handled at unit scale through the bookkeeping
//! `rho = |xi| / 2^m`: `g_m = (P_m f)(2^{-m} .)` has transform
//! `hat g_m(zeta) = 2^{3m} F[P_m f](2^m zeta)`, so lattice coefficients are
//! read and written at `xi = 2^m rho theta` without any interpolation in `x`.

use std::f64::consts::PI;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::frame::{AnalysisNodes, GoodFrame};
use crate::dyadic::DyadicCutoff;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::quadrature::gauss_legendre_on;
use crate::scalar::Real;
use crate::trig::{LatticeSum, Ring};

type Cx = Complex<f64>;

/// Breakpoints of a block profile in `rho`: the unit-scale support
/// `(5/8, 8/5)` and the two kinks where one of the cutoffs leaves its plateau.
pub const PIECES: [f64; 4] = [5.0 / 8.0, 4.0 / 5.0, 5.0 / 4.0, 8.0 / 5.0];

/// Composite Gauss-Legendre nodes on the block support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialNodes {
    pub per_piece: usize,
    pub rho: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RadialNodes {
    pub fn new(per_piece: usize) -> Self {
        let mut rho = Vec::new();
        let mut weights = Vec::new();
        for w in PIECES.windows(2) {
            let (x, ww) = gauss_legendre_on(per_piece, w[0], w[1]);
            rho.extend(x);
            weights.extend(ww);
        }
        Self { per_piece, rho, weights }
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    /// Lagrange weights on the piece containing `r`: `(first node, weights)`.
    pub fn interpolation(&self, r: f64) -> (usize, Vec<f64>) {
        let piece = PIECES[1..3].iter().filter(|&&b| r >= b).count();
        let start = piece * self.per_piece;
        let xs = &self.rho[start..start + self.per_piece];
        let w = (0..xs.len())
            .map(|j| {
                let mut p = 1.0;
                for (i, &xi) in xs.iter().enumerate() {
                    if i != j {
                        p *= (r - xi) / (xs[j] - xi);
                    }
                }
                p
            })
            .collect();
        (start, w)
    }
}

/// Radial profiles `hat c^m_{k,l}(rho)` of one block on [`RadialNodes`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FourierBesselCoeffs {
    pub block: i32,
    pub k_deg_max: usize,
    pub radial: RadialNodes,
    /// `c[idx * radial.len() + i]`, `idx` the frame index of `(k, l)`.
    pub c: Vec<Cx>,
}

impl FourierBesselCoeffs {
    /// Zero profiles for hand-built test cases.
    pub fn zeros(block: i32, k_deg_max: usize, per_piece: usize) -> Self {
        let radial = RadialNodes::new(per_piece);
        let c = vec![Cx::new(0.0, 0.0); (k_deg_max + 1).pow(2) * radial.len()];
        Self { block, k_deg_max, radial, c }
    }

    pub fn n_funcs(&self) -> usize {
        (self.k_deg_max + 1).pow(2)
    }

    pub fn profile(&self, idx: usize) -> &[Cx] {
        let n = self.radial.len();
        &self.c[idx * n..(idx + 1) * n]
    }

    pub fn profile_mut(&mut self, idx: usize) -> &mut [Cx] {
        let n = self.radial.len();
        &mut self.c[idx * n..(idx + 1) * n]
    }

    /// `||hat c_idx||^2_{L^2(rho^2 d rho)}`.
    pub fn profile_norm_sq(&self, idx: usize) -> f64 {
        self.profile(idx)
            .iter()
            .zip(&self.radial.rho)
            .zip(&self.radial.weights)
            .map(|((c, r), w)| w * r * r * c.norm_sqr())
            .sum()
    }

    /// `(2 pi)^{-3} sum_{k,l} ||hat c||^2`, which equals `||g_m||^2` by Plancherel.
    pub fn plancherel_norm_sq(&self) -> f64 {
        (0..self.n_funcs()).map(|i| self.profile_norm_sq(i)).sum::<f64>() / (2.0 * PI).powi(3)
    }

    /// Interpolated profile value at `rho` inside the block support.
    pub fn value(&self, idx: usize, rho: f64) -> Cx {
        let (start, w) = self.radial.interpolation(rho);
        let p = self.profile(idx);
        w.iter().zip(&p[start..]).map(|(w, c)| c * w).sum()
    }

    /// Coefficients `c^n = (1/4) int_0^4 hat c(rho) e^{-i pi n rho / 2} d rho`,
    /// `|n| <= n_max`, of the profile as a function in `L^2(0, 4)`.
    pub fn fourier_series(&self, idx: usize, n_max: i64) -> Vec<(i64, Cx)> {
        let p = self.profile(idx);
        (-n_max..=n_max)
            .map(|n| {
                let s: Cx = p
                    .iter()
                    .zip(&self.radial.rho)
                    .zip(&self.radial.weights)
                    .map(|((c, &r), &w)| c * Cx::from_polar(w, -PI * n as f64 * r / 2.0))
                    .sum();
                (n, s / 4.0)
            })
            .collect()
    }
}

/// Analysis options.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularOptions {
    /// Gauss-Legendre nodes per radial piece.
    pub radial_per_piece: usize,
    /// Profiles below this fraction of the block norm are not synthesized.
    pub active_threshold: f64,
    /// Largest tolerated relative `L^2` norm outside the block support in [`fb_analyze`].
    pub band_tolerance: f64,
    /// Add the angular truncation residual of each block back unrandomized.
    pub pass_through_residual: bool,
}

impl Default for AngularOptions {
    fn default() -> Self {
        Self { radial_per_piece: 12, active_threshold: 1e-14, band_tolerance: 1e-4, pass_through_residual: false }
    }
}

fn analyze_core(
    m: i32,
    frame: &GoodFrame,
    nodes: &AnalysisNodes,
    radial: RadialNodes,
    ft: &LatticeSum,
    symbol: impl Fn(f64) -> f64,
) -> FourierBesselCoeffs {
    let scale = 2f64.powi(m);
    let rule = &nodes.rule;
    let mut rings = Vec::with_capacity(radial.len() * rule.n_rings());
    for &r in &radial.rho {
        let rr = scale * r;
        for ring in 0..rule.n_rings() {
            let c = rule.cos_theta(ring);
            let s = (1.0 - c * c).max(0.0).sqrt() * rr;
            let xy = (0..rule.n_phi()).map(|j| [s * rule.phi(j).cos(), s * rule.phi(j).sin()]).collect();
            rings.push(Ring { z: rr * c, xy });
        }
    }
    let vals = ft.eval_rings(&rings);
    let nf = frame.n_funcs();
    let nr = radial.len();
    let jac = scale.powi(3);
    let mut c = vec![Cx::new(0.0, 0.0); nf * nr];
    for (i, &r) in radial.rho.iter().enumerate() {
        let sym = symbol(scale * r) * jac;
        let mut node = 0;
        for ring in 0..rule.n_rings() {
            let w = rule.weight(ring);
            for v in &vals[i * rule.n_rings() + ring] {
                let gv = v * (sym * w);
                let b = &nodes.values[node * nf..(node + 1) * nf];
                for (idx, &bv) in b.iter().enumerate() {
                    c[idx * nr + i] += gv * bv;
                }
                node += 1;
            }
        }
    }
    FourierBesselCoeffs { block: m, k_deg_max: frame.k_deg_max, radial, c }
}

/// Expands a block field `g` (already localized to `|xi| ~ 2^m`) in the frame.
///
/// Off-lattice transform values come from the rectangle-rule Fourier
/// transform of the grid function, so `g` should decay inside the box.
pub fn fb_analyze<T: Real>(
    g: &SpectralField<T>,
    m: i32,
    frame: &GoodFrame,
    opts: &AngularOptions,
) -> Result<FourierBesselCoeffs> {
    let grid = g.grid();
    let a = g.coefficients();
    let scale = 2f64.powi(m);
    let (mut inside, mut outside) = (0.0, 0.0);
    for (z, &k) in a.iter().zip(grid.xi_abs_table()) {
        let r = k.as_f64() / scale;
        if r > PIECES[0] && r < PIECES[3] {
            inside += z.norm_sqr().as_f64();
        } else {
            outside += z.norm_sqr().as_f64();
        }
    }
    let total = inside + outside;
    let relative = if total > 0.0 { (outside / total).sqrt() } else { 0.0 };
    if relative > opts.band_tolerance {
        return Err(Error::OutOfBand { relative, tolerance: opts.band_tolerance });
    }
    let nodes = frame.analysis_nodes();
    let ft = LatticeSum::fourier_transform(g);
    Ok(analyze_core(m, frame, &nodes, RadialNodes::new(opts.radial_per_piece), &ft, |_| 1.0))
}

/// Expands `P_m f` using `F[P_m f] = rho_m F[f]`; `f` itself should be
/// localized in the box, the block need not be.
pub fn fb_analyze_block_of<T: Real>(
    f: &SpectralField<T>,
    m: i32,
    frame: &GoodFrame,
    nodes: &AnalysisNodes,
    opts: &AngularOptions,
) -> FourierBesselCoeffs {
    let ft = LatticeSum::fourier_transform(f);
    analyze_core(m, frame, nodes, RadialNodes::new(opts.radial_per_piece), &ft, |r| DyadicCutoff::rho(m, r))
}

/// Precomputed lattice synthesis of one block: coefficient at lattice point
/// `p` is `sum_j Y_j h[p][j]` over the active frame indices `j`.
#[derive(Clone, Debug)]
pub struct BlockSynthesis {
    pub block: i32,
    pub lattice: Vec<usize>,
    pub active: Vec<usize>,
    h: Vec<Cx>,
}

impl BlockSynthesis {
    pub fn new<T: Real>(
        grid: &GridSpec<T>,
        coeffs: &FourierBesselCoeffs,
        frame: &GoodFrame,
        active_threshold: f64,
    ) -> Result<Self> {
        if coeffs.k_deg_max != frame.k_deg_max {
            return Err(Error::InvalidParameter(format!(
                "coefficients carry degrees <= {}, frame has {}",
                coeffs.k_deg_max, frame.k_deg_max
            )));
        }
        let norms: Vec<f64> = (0..coeffs.n_funcs()).map(|i| coeffs.profile_norm_sq(i)).collect();
        let total: f64 = norms.iter().sum();
        let active: Vec<usize> =
            (0..norms.len()).filter(|&i| total > 0.0 && norms[i] > active_threshold * active_threshold * total).collect();
        let scale = 2f64.powi(coeffs.block);
        let (lo, hi) = (PIECES[0] * scale, PIECES[3] * scale);
        let lattice: Vec<usize> = (0..grid.len())
            .filter(|&i| {
                let k = grid.xi_abs(i).as_f64();
                k > lo && k < hi
            })
            .collect();
        let norm = scale.powi(-3) / grid.volume().as_f64();
        let nf = frame.n_funcs();
        let mut s = vec![0.0; nf];
        let mut b = vec![0.0; nf];
        let mut h = Vec::with_capacity(lattice.len() * active.len());
        for &i in &lattice {
            let xi = grid.xi(i).map(|x| x.as_f64());
            let k = grid.xi_abs(i).as_f64();
            frame.eval_into(xi[2] / k, xi[1].atan2(xi[0]), &mut s, &mut b);
            let (start, w) = coeffs.radial.interpolation(k / scale);
            for &j in &active {
                let p = &coeffs.profile(j)[start..];
                let c: Cx = w.iter().zip(p).map(|(w, c)| c * w).sum();
                h.push(c * (b[j] * norm));
            }
        }
        Ok(Self { block: coeffs.block, lattice, active, h })
    }

    /// Adds the synthesized block, with per-index signs, into `acc`.
    pub fn accumulate(&self, signs: &[f64], acc: &mut [Cx]) {
        let na = self.active.len();
        for (p, &i) in self.lattice.iter().enumerate() {
            let row = &self.h[p * na..(p + 1) * na];
            acc[i] += row.iter().zip(signs).map(|(h, s)| h * s).sum::<Cx>();
        }
    }
}

/// `g_m^omega` from its profiles: `hat g(rho theta) = sum Y_{k,l} hat c_{k,l}(rho) b_{k,l}(theta)`
/// evaluated on the lattice, then returned as a field on `grid`.
/// `signs = None` reconstructs the block.
pub fn fb_synthesize<T: Real>(
    grid: &GridSpec<T>,
    coeffs: &FourierBesselCoeffs,
    frame: &GoodFrame,
    signs: Option<&dyn Fn(usize, usize) -> f64>,
) -> Result<SpectralField<T>> {
    let plan = BlockSynthesis::new(grid, coeffs, frame, 0.0)?;
    let y: Vec<f64> = plan
        .active
        .iter()
        .map(|&j| {
            let (k, l) = frame.label(j);
            signs.map_or(1.0, |s| s(k, l))
        })
        .collect();
    let mut acc = vec![Cx::new(0.0, 0.0); grid.len()];
    plan.accumulate(&y, &mut acc);
    let data = acc.iter().map(|z| Complex::new(T::of(z.re), T::of(z.im))).collect();
    SpectralField::from_frequency(grid, data)
}

/// Physical-space value of a single-degree block from its profile via
///
/// `g(r w) = (2 pi)^{-3/2} i^k b(w) r^{-1/2} int hat c(rho) J_{k+1/2}(r rho) rho^{3/2} d rho`
///
/// (the inverse transform of `hat c(rho) b(theta)` under `F f = int f e^{-i x.zeta}`).
pub fn bessel_synthesis_point(coeffs: &FourierBesselCoeffs, frame: &GoodFrame, idx: usize, x: [f64; 3]) -> Cx {
    let (k, _) = frame.label(idx);
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let b = frame.eval(x)[idx];
    let mu = k as f64 + 0.5;
    let p = coeffs.profile(idx);
    let s: Cx = p
        .iter()
        .zip(&coeffs.radial.rho)
        .zip(&coeffs.radial.weights)
        .map(|((c, &rho), &w)| c * (w * super::bessel::bessel_j(mu, r * rho).expect("positive argument") * rho.powf(1.5)))
        .sum();
    let ik = Cx::new(0.0, 1.0).powu(k as u32);
    s * ik * b * (2.0 * PI).powf(-1.5) / r.sqrt()
}
