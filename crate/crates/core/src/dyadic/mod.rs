//! Littlewood-Paley projections, paraproducts, Besov and radial-angular norms,
//! and the time-weighted solution norms.

mod aniso;
mod cutoff;
mod weighted;

pub use aniso::{aniso_norm, block_aniso_besov, Resampling};
pub(crate) use aniso::content_band;
pub use cutoff::{smoothstep, DyadicCutoff, PLATEAU, SUPPORT};
pub use weighted::{xt_norm, yt_norm, WeightedNormSpec, XtBreakdown};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{czero, SpectralField};
use crate::grid::GridSpec;
use crate::scalar::Real;

/// Which Littlewood-Paley multiplier to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selector {
    /// `P_k`, symbol `rho_k`; `k` in `[k_min, k_max]`.
    Eq(i32),
    /// `P_{<=k}`, symbol `rho_{<=k}`; `k` in `[k_min - 1, k_max]`. At `k_min - 1`
    /// this is the projection onto the zero mode.
    AtMost(i32),
    /// `P_{>=k}`, symbol `1 - rho_{<=k-1}`; `k` in `[k_min, k_max + 1]`.
    AtLeast(i32),
}

fn check_range<T: Real>(g: &GridSpec<T>, k: i32, lo: i32, hi: i32) -> Result<()> {
    if k < lo || k > hi {
        Err(Error::DyadicOutOfRange { k, min: lo, max: hi })
    } else {
        let _ = g;
        Ok(())
    }
}

/// Symbol value of a selector at `|xi| = r` (`r = 0` handled exactly).
pub fn selector_symbol<T: Real>(sel: Selector, r: T) -> T {
    match sel {
        Selector::Eq(k) => DyadicCutoff::rho(k, r),
        Selector::AtMost(k) => DyadicCutoff::rho_le(k, r),
        Selector::AtLeast(k) => T::one() - DyadicCutoff::rho_le(k - 1, r),
    }
}

/// Applies `P_k`, `P_{<=k}` or `P_{>=k}`.
pub fn lp_project<T: Real>(f: &SpectralField<T>, sel: Selector) -> Result<SpectralField<T>> {
    let g = f.grid();
    match sel {
        Selector::Eq(k) => check_range(g, k, g.k_min(), g.k_max())?,
        Selector::AtMost(k) => check_range(g, k, g.k_min() - 1, g.k_max())?,
        Selector::AtLeast(k) => check_range(g, k, g.k_min(), g.k_max() + 1)?,
    }
    Ok(project_unchecked(f, sel))
}

pub(crate) fn project_unchecked<T: Real>(f: &SpectralField<T>, sel: Selector) -> SpectralField<T> {
    let table = f.grid().xi_abs_table().to_vec();
    f.apply_symbol(|i| Complex::new(selector_symbol(sel, table[i]), T::zero()))
}

/// `||P_{>=k_max+1} f||_{L^2}`: content beyond the resolved dyadic range.
pub fn truncation_mass<T: Real>(f: &SpectralField<T>) -> T {
    project_unchecked(f, Selector::AtLeast(f.grid().k_max() + 1)).norm_l2()
}

/// Block label of one factor in a paraproduct: a dyadic index or the zero mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Block {
    Zero,
    K(i32),
}

impl Block {
    /// `rho` of this block at `|xi| = r`.
    pub fn symbol<T: Real>(self, r: T) -> T {
        match self {
            Block::Zero => {
                if r == T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Block::K(k) => DyadicCutoff::rho(k, r),
        }
    }

    /// Whether this block is at or below dyadic level `k` (the zero mode always is).
    fn le(self, k: i32) -> bool {
        match self {
            Block::Zero => true,
            Block::K(j) => j <= k,
        }
    }
}

/// Frequency-interaction classes of a product `fg`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Paraproduct {
    /// low `f`, high `g`: `sum_k P_{<=k-5} f P_k g`
    LH,
    /// high `f`, low `g`
    HL,
    /// comparable: `sum_{|k1-k2|<=4} P_{k1} f P_{k2} g`
    HH,
    /// part of HL with `|k - log2 alpha| <= 4`
    AlphaL,
    /// part of HL with `|k - log2 alpha| > 4` (nonresonant)
    XL,
    /// `LH + HH + alphaL`
    R,
}

impl Paraproduct {
    pub const ALL: [Paraproduct; 6] =
        [Paraproduct::LH, Paraproduct::HL, Paraproduct::HH, Paraproduct::AlphaL, Paraproduct::XL, Paraproduct::R];

    /// Whether the block pair (`jf` for `f`, `kg` for `g`) belongs to the kind.
    pub fn contains(self, jf: Block, kg: Block, alpha: f64) -> bool {
        let la = alpha.log2();
        let near = |k: i32| (k as f64 - la).abs() <= 4.0;
        match self {
            Paraproduct::LH => matches!(kg, Block::K(k) if jf.le(k - 5)),
            Paraproduct::HL => matches!(jf, Block::K(k) if kg.le(k - 5)),
            Paraproduct::HH => matches!((jf, kg), (Block::K(a), Block::K(b)) if (a - b).abs() <= 4),
            Paraproduct::AlphaL => matches!(jf, Block::K(k) if kg.le(k - 5) && near(k)),
            Paraproduct::XL => matches!(jf, Block::K(k) if kg.le(k - 5) && !near(k)),
            Paraproduct::R => {
                Paraproduct::LH.contains(jf, kg, alpha)
                    || Paraproduct::HH.contains(jf, kg, alpha)
                    || Paraproduct::AlphaL.contains(jf, kg, alpha)
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Paraproduct::LH => "LH",
            Paraproduct::HL => "HL",
            Paraproduct::HH => "HH",
            Paraproduct::AlphaL => "alphaL",
            Paraproduct::XL => "XL",
            Paraproduct::R => "R",
        }
    }
}

/// Blocks of a grid: the zero mode followed by the resolved dyadic indices.
pub fn grid_blocks<T: Real>(g: &GridSpec<T>) -> Vec<Block> {
    std::iter::once(Block::Zero).chain(g.dyadic_range().map(Block::K)).collect()
}

/// Smooth pair weight `sum_{(j,k) in kind} rho_j(|p|) rho_k(|q|)` restricted to
/// blocks resolved on `g`. This is the symbol `P_kind(p, q)` of the kind.
pub fn pair_weight<T: Real>(kind: Paraproduct, g: &GridSpec<T>, p: f64, q: f64, alpha: f64) -> f64 {
    let blocks_of = |r: f64| -> Vec<(Block, f64)> {
        if r == 0.0 {
            vec![(Block::Zero, 1.0)]
        } else {
            DyadicCutoff::blocks_at(r)
                .filter(|k| g.dyadic_range().contains(k))
                .map(|k| (Block::K(k), DyadicCutoff::rho(k, r)))
                .collect()
        }
    };
    let mut w = 0.0;
    for (bj, wj) in blocks_of(p) {
        for &(bk, wk) in &blocks_of(q) {
            if kind.contains(bj, bk, alpha) {
                w += wj * wk;
            }
        }
    }
    w
}

/// `(fg)_kind` computed as a sum over `f`-blocks of physical-space products
/// `P_j f * (sum_{k : (j,k) in kind} P_k g)`.
pub fn paraproduct<T: Real>(
    f: &SpectralField<T>,
    g: &SpectralField<T>,
    kind: Paraproduct,
    alpha: T,
) -> Result<SpectralField<T>> {
    f.ensure_same_grid(g)?;
    if !(alpha > T::zero()) {
        return Err(Error::InvalidParameter(format!("wave speed must be positive, got {alpha}")));
    }
    let grid = f.grid();
    let a = alpha.as_f64();
    let blocks = grid_blocks(grid);
    let fa = f.to_frequency();
    let ga = g.to_frequency();
    let table = grid.xi_abs_table();
    let mut acc = vec![czero::<T>(); grid.len()];
    for &bj in &blocks {
        let partners: Vec<Block> = blocks.iter().copied().filter(|&bk| kind.contains(bj, bk, a)).collect();
        if partners.is_empty() {
            continue;
        }
        let pj = fa.apply_symbol(|i| Complex::new(bj.symbol(table[i]), T::zero()));
        if pj.data().iter().all(|z| z.norm_sqr() == T::zero()) {
            continue;
        }
        let gk = ga.apply_symbol(|i| {
            let s: T = partners.iter().map(|b| b.symbol(table[i])).sum();
            Complex::new(s, T::zero())
        });
        let prod = pj.mul(&gk);
        for (x, y) in acc.iter_mut().zip(prod.data()) {
            *x += *y;
        }
    }
    Ok(SpectralField::from_physical(grid, acc)?.into_frequency())
}

/// `(sum_k 2^{2k mu} ||P_k f||_{L^q}^2)^{1/2}` over the resolved range.
pub fn besov_norm<T: Real>(f: &SpectralField<T>, mu: T, q: T) -> T {
    let g = f.grid();
    let fa = f.to_frequency();
    let mut s = T::zero();
    for k in g.dyadic_range() {
        let pk = project_unchecked(&fa, Selector::Eq(k));
        let w = T::of(2f64.powf(2.0 * k as f64 * mu.as_f64()));
        s += w * pk.norm_lq(q).powi(2);
    }
    s.sqrt()
}
