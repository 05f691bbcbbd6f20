//! Resonance function, bilinear Fourier multipliers and the boundary
//! operator `Omega_b`.
//!
//! With Fourier-series amplitudes `f = sum_xi a_xi e^{i xi.x}` a product has
//! amplitudes `sum_eta a_{xi-eta} b_eta`, so the lattice cell volume is
//! already absorbed. Output frequencies wrap periodically, which makes
//! `T_1(f, g)` equal to the collocation product on the grid.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dyadic::{grid_blocks, Block, DyadicCutoff, Paraproduct};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::scalar::Real;

type Cx = Complex<f64>;

/// Default cap on symbol evaluations in a direct double sum.
pub const DEFAULT_BUDGET: u64 = 1 << 34;

/// Default `|omega_r|` floor below which a masked pair is a mask defect.
pub const RESONANCE_FLOOR: f64 = 1e-6;

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// `omega_r(p, q) = |p + q|^2 + alpha |p| - |q|^2`.
pub fn resonance(p: [f64; 3], q: [f64; 3], alpha: f64) -> f64 {
    let xi = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
    resonance_at(xi, p, q, alpha)
}

/// Resonance with an explicit output frequency (the wrapped `p + q` on a grid).
pub fn resonance_at(xi: [f64; 3], p: [f64; 3], q: [f64; 3], alpha: f64) -> f64 {
    dot(xi, xi) + alpha * norm(p) - dot(q, q)
}

/// Symbol callback: `(p, q, xi)` with `p` the frequency of the first factor,
/// `q` of the second and `xi` the (wrapped) output frequency.
pub type SymbolFn<'a> = dyn Fn([f64; 3], [f64; 3], [f64; 3]) -> Cx + Sync + 'a;
/// Guard callback returning the quantity that must stay above the floor.
pub type GuardFn<'a> = dyn Fn([f64; 3], [f64; 3], [f64; 3]) -> f64 + Sync + 'a;

/// Multiplier `m(p, q)` with an optional paraproduct mask and singularity guard.
pub struct BilinearSymbol<'a> {
    symbol: Box<SymbolFn<'a>>,
    mask: Option<(Paraproduct, f64)>,
    guard: Option<(Box<GuardFn<'a>>, f64)>,
    budget: u64,
}

impl<'a> BilinearSymbol<'a> {
    pub fn new(symbol: impl Fn([f64; 3], [f64; 3], [f64; 3]) -> Cx + Sync + 'a) -> Self {
        Self { symbol: Box::new(symbol), mask: None, guard: None, budget: DEFAULT_BUDGET }
    }

    /// `m = 1`.
    pub fn unit() -> Self {
        Self::new(|_, _, _| Cx::new(1.0, 0.0))
    }

    /// Multiplies the symbol by the smooth pair weight of `kind`.
    pub fn with_mask(mut self, kind: Paraproduct, alpha: f64) -> Self {
        self.mask = Some((kind, alpha));
        self
    }

    /// Fails when `|guard| < floor` on a pair with nonzero mask weight.
    pub fn with_guard(mut self, guard: impl Fn([f64; 3], [f64; 3], [f64; 3]) -> f64 + Sync + 'a, floor: f64) -> Self {
        self.guard = Some((Box::new(guard), floor));
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn mask(&self) -> Option<Paraproduct> {
        self.mask.map(|m| m.0)
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }
}

/// Blocks carrying a lattice point, with their cutoff weights.
fn point_blocks<T: Real>(grid: &GridSpec<T>, idx: usize) -> Vec<(Block, f64)> {
    let r = grid.xi_abs(idx).as_f64();
    if r == 0.0 {
        return vec![(Block::Zero, 1.0)];
    }
    DyadicCutoff::blocks_at(r)
        .filter(|k| grid.dyadic_range().contains(k))
        .map(|k| (Block::K(k), DyadicCutoff::rho(k, r)))
        .filter(|&(_, w)| w != 0.0)
        .collect()
}

fn pair_mask_weight(kind: Paraproduct, alpha: f64, bp: &[(Block, f64)], bq: &[(Block, f64)]) -> f64 {
    let mut w = 0.0;
    for &(a, wa) in bp {
        for &(b, wb) in bq {
            if kind.contains(a, b, alpha) {
                w += wa * wb;
            }
        }
    }
    w
}

struct Support {
    lat: [usize; 3],
    freq: [f64; 3],
    amp: Cx,
    blocks: Vec<(Block, f64)>,
}

fn support<T: Real>(f: &SpectralField<T>, keep: impl Fn(&[(Block, f64)]) -> bool) -> Vec<Support> {
    let grid = f.grid();
    let a = f.coefficients();
    let mut out = Vec::new();
    for (i, z) in a.iter().enumerate() {
        if z.re == T::zero() && z.im == T::zero() {
            continue;
        }
        let blocks = point_blocks(grid, i);
        if !keep(&blocks) {
            continue;
        }
        out.push(Support {
            lat: grid.split(i),
            freq: grid.xi(i).map(|x| x.as_f64()),
            amp: Cx::new(z.re.as_f64(), z.im.as_f64()),
            blocks,
        });
    }
    out
}

/// `F(T_m(f, g))(xi) = sum_eta m(xi - eta, eta) a_{xi-eta} b_eta` by a direct
/// double sum over the nonzero, mask-eligible supports of `f` and `g`.
pub fn bilinear_apply<T: Real>(
    f: &SpectralField<T>,
    g: &SpectralField<T>,
    sym: &BilinearSymbol<'_>,
) -> Result<SpectralField<T>> {
    f.ensure_same_grid(g)?;
    let grid = f.grid();
    let n = grid.n();
    let (fs, gs) = match sym.mask {
        Some((kind, alpha)) => {
            let blocks = grid_blocks(grid);
            let pairs: Vec<(Block, Block)> = blocks
                .iter()
                .flat_map(|&a| blocks.iter().map(move |&b| (a, b)))
                .filter(|&(a, b)| kind.contains(a, b, alpha))
                .collect();
            let fs = support(f, |bl| bl.iter().any(|(b, _)| pairs.iter().any(|p| p.0 == *b)));
            let gs = support(g, |bl| bl.iter().any(|(b, _)| pairs.iter().any(|p| p.1 == *b)));
            (fs, gs)
        }
        None => (support(f, |_| true), support(g, |_| true)),
    };
    let required = fs.len() as u64 * gs.len() as u64;
    if required > sym.budget {
        return Err(Error::BudgetExceeded {
            required,
            budget: sym.budget,
            hint: format!("reduce N below {n} or restrict the pair set with a paraproduct mask"),
        });
    }
    let mut acc = vec![Cx::new(0.0, 0.0); grid.len()];
    let dk = grid.dk().as_f64();
    let half = (n / 2) as i64;
    let wrap = |s: usize| -> (usize, f64) {
        let i = s % n;
        let m = if (i as i64) < half { i as i64 } else { i as i64 - n as i64 };
        (i, m as f64 * dk)
    };
    for p in &fs {
        for q in &gs {
            let w = match sym.mask {
                Some((kind, alpha)) => pair_mask_weight(kind, alpha, &p.blocks, &q.blocks),
                None => 1.0,
            };
            if w == 0.0 {
                continue;
            }
            let (i0, x0) = wrap(p.lat[0] + q.lat[0]);
            let (i1, x1) = wrap(p.lat[1] + q.lat[1]);
            let (i2, x2) = wrap(p.lat[2] + q.lat[2]);
            let xi = [x0, x1, x2];
            if let Some((guard, floor)) = &sym.guard {
                let v = guard(p.freq, q.freq, xi);
                if !(v.abs() >= *floor) {
                    return Err(Error::ResonanceGuard { value: v, floor: *floor, p: p.freq, q: q.freq });
                }
            }
            acc[(i0 * n + i1) * n + i2] += (sym.symbol)(p.freq, q.freq, xi) * w * p.amp * q.amp;
        }
    }
    SpectralField::from_frequency(grid, acc.iter().map(|z| Complex::new(T::of(z.re), T::of(z.im))).collect())
}

/// Whether the XL pair set is nonempty on `grid` for speed `alpha`: some
/// resolved `k` has `|k - log2 alpha| > 4` (its partner can be the zero mode).
pub fn xl_is_resolved<T: Real>(grid: &GridSpec<T>, alpha: f64) -> bool {
    let la = alpha.log2();
    grid.dyadic_range().any(|k| (k as f64 - la).abs() > 4.0)
}

/// `Omega_b(v, u)`: symbol `P_XL(p, q) / omega_r(p, q)` with `v` the high
/// factor. Every masked pair must satisfy `|omega_r| >= floor`.
pub fn omega_b<T: Real>(v: &SpectralField<T>, u: &SpectralField<T>, alpha: T) -> Result<SpectralField<T>> {
    omega_b_with(v, u, alpha, RESONANCE_FLOOR, DEFAULT_BUDGET)
}

pub fn omega_b_with<T: Real>(
    v: &SpectralField<T>,
    u: &SpectralField<T>,
    alpha: T,
    floor: f64,
    budget: u64,
) -> Result<SpectralField<T>> {
    let a = alpha.as_f64();
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("wave speed must be positive, got {a}")));
    }
    let grid = v.grid();
    if !xl_is_resolved(grid, a) {
        return Err(Error::EmptyXlMask { k_max: grid.k_max(), threshold: a.log2() + 4.0 });
    }
    let sym = BilinearSymbol::new(move |p, q, xi| Cx::new(1.0 / resonance_at(xi, p, q, a), 0.0))
        .with_mask(Paraproduct::XL, a)
        .with_guard(move |p, q, xi| resonance_at(xi, p, q, a), floor)
        .with_budget(budget);
    bilinear_apply(v, u, &sym)
}

/// Smallest measured ratio `omega_r / min(|xi|^2, alpha |p| / 4)` over all
/// XL lattice pairs of a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceMargin {
    pub alpha: f64,
    pub pairs: u64,
    pub min_omega: f64,
    pub c0: f64,
}

/// Scans every XL lattice pair of `grid` (pairs where the mask weight is
/// nonzero) and records the resonance margin.
pub fn resonance_margin<T: Real>(grid: &GridSpec<T>, alpha: f64) -> Result<ResonanceMargin> {
    if !xl_is_resolved(grid, alpha) {
        return Err(Error::EmptyXlMask { k_max: grid.k_max(), threshold: alpha.log2() + 4.0 });
    }
    let ones = SpectralField::from_frequency(grid, vec![Complex::new(T::one(), T::zero()); grid.len()])?;
    let blocks = grid_blocks(grid);
    let kind = Paraproduct::XL;
    let highs: Vec<Block> =
        blocks.iter().copied().filter(|&a| blocks.iter().any(|&b| kind.contains(a, b, alpha))).collect();
    let lows: Vec<Block> =
        blocks.iter().copied().filter(|&b| blocks.iter().any(|&a| kind.contains(a, b, alpha))).collect();
    let fs = support(&ones, |bl| bl.iter().any(|(b, _)| highs.contains(b)));
    let gs = support(&ones, |bl| bl.iter().any(|(b, _)| lows.contains(b)));
    let n = grid.n();
    let dk = grid.dk().as_f64();
    let half = (n / 2) as i64;
    let coord = |s: usize| {
        let i = (s % n) as i64;
        (if i < half { i } else { i - n as i64 }) as f64 * dk
    };
    let mut m = ResonanceMargin { alpha, pairs: 0, min_omega: f64::INFINITY, c0: f64::INFINITY };
    for p in &fs {
        for q in &gs {
            if pair_mask_weight(kind, alpha, &p.blocks, &q.blocks) == 0.0 {
                continue;
            }
            let xi = [coord(p.lat[0] + q.lat[0]), coord(p.lat[1] + q.lat[1]), coord(p.lat[2] + q.lat[2])];
            let w = resonance_at(xi, p.freq, q.freq, alpha);
            let scale = dot(xi, xi).min(alpha * norm(p.freq) / 4.0);
            m.pairs += 1;
            m.min_omega = m.min_omega.min(w);
            if scale > 0.0 {
                m.c0 = m.c0.min(w / scale);
            }
        }
    }
    Ok(m)
}
