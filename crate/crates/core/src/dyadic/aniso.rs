use serde::{Deserialize, Serialize};

use super::{project_unchecked, Selector};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::quadrature::AngularQuadrature;
use crate::scalar::Real;
use crate::trig::{LatticeSum, Ring};

/// How radial-angular norms of dyadic blocks choose their nodes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Resampling {
    /// One quadrature per block, adapted to the block's frequency band.
    #[default]
    Blockwise,
    /// A single quadrature adapted to the whole grid band.
    Global,
}

/// Smallest radius `K` such that the coefficients with `|xi| > K` carry at
/// most `1e-10` of the `L^2` mass: the band that the angular rule must resolve.
pub(crate) fn content_band<T: Real>(f: &SpectralField<T>) -> f64 {
    let a = f.coefficients();
    let table = f.grid().xi_abs_table();
    let mut pairs: Vec<(f64, f64)> =
        a.iter().zip(table).map(|(z, k)| (k.as_f64(), z.norm_sqr().as_f64())).collect();
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    if total == 0.0 {
        return 0.0;
    }
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let budget = 1e-20 * total;
    let mut tail = 0.0;
    for &(k, m) in &pairs {
        tail += m;
        if tail > budget {
            return k;
        }
    }
    0.0
}

fn rings_for(quad: &AngularQuadrature) -> Vec<Ring> {
    let s = &quad.sphere;
    let mut rings = Vec::with_capacity(quad.radii.len() * s.n_rings());
    for &r in &quad.radii {
        for ring in 0..s.n_rings() {
            let c = s.cos_theta(ring);
            let rho = r * (1.0 - c * c).max(0.0).sqrt();
            let xy = (0..s.n_phi()).map(|j| [rho * s.phi(j).cos(), rho * s.phi(j).sin()]).collect();
            rings.push(Ring { z: r * c, xy });
        }
    }
    rings
}

fn lp(vals: impl Iterator<Item = (f64, f64)>, p: f64) -> f64 {
    if p.is_infinite() {
        vals.map(|(v, _)| v).fold(0.0, f64::max)
    } else {
        vals.map(|(v, w)| w * v.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// `||f||_{L^q_r L^s_theta}`: angular `L^s` on each shell, then radial `L^q`
/// with weight `r^2 dr`; `q` or `s` may be infinite. Balls are centred at the
/// origin and sampled by trigonometric interpolation.
pub fn aniso_norm<T: Real>(f: &SpectralField<T>, q: f64, s: f64, quad: &AngularQuadrature) -> Result<T> {
    if !(q >= 1.0) || !(s >= 1.0) {
        return Err(Error::InvalidParameter(format!("exponents must be >= 1, got q={q}, s={s}")));
    }
    let band = content_band(f);
    if band == 0.0 {
        return Ok(T::zero());
    }
    let required = (band * quad.r_max()).ceil() as usize;
    if quad.degree() < required {
        return Err(Error::QuadratureDegree { required, available: quad.degree() });
    }
    let ls = LatticeSum::interpolant(f);
    let rings = rings_for(quad);
    let vals = ls.eval_rings(&rings);
    let sph = &quad.sphere;
    let nr = sph.n_rings();
    let shells: Vec<f64> = (0..quad.radii.len())
        .map(|i| {
            let it = (0..nr).flat_map(|ring| {
                let w = sph.weight(ring);
                vals[i * nr + ring].iter().map(move |z| (z.norm(), w))
            });
            lp(it, s)
        })
        .collect();
    let outer = lp(shells.iter().copied().zip(quad.radial_weights.iter().copied()), q);
    Ok(T::of(outer))
}

/// `(sum_k 2^{2k mu} ||P_k f||^2_{L^q_r L^s_theta})^{1/2}` over the resolved
/// dyadic range, on the ball of radius `r_max`.
pub fn block_aniso_besov<T: Real>(
    f: &SpectralField<T>,
    mu: f64,
    q: f64,
    s: f64,
    r_max: f64,
    resampling: Resampling,
) -> Result<T> {
    let g = f.grid();
    let fa = f.to_frequency();
    let ppw = 8.0;
    let global = AngularQuadrature::adapted(g.max_xi_corner().as_f64(), r_max, ppw);
    let mut acc = 0.0;
    for k in g.dyadic_range() {
        let pk = project_unchecked(&fa, Selector::Eq(k));
        if pk.norm_l2() == T::zero() {
            continue;
        }
        let norm = match resampling {
            Resampling::Global => aniso_norm(&pk, q, s, &global)?,
            Resampling::Blockwise => {
                let quad = AngularQuadrature::adapted(content_band(&pk), r_max, ppw);
                aniso_norm(&pk, q, s, &quad)?
            }
        };
        acc += 2f64.powf(2.0 * k as f64 * mu) * norm.as_f64().powi(2);
    }
    Ok(T::of(acc.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use num_complex::Complex;
    use std::f64::consts::PI;

    fn gaussian(g: &GridSpec<f64>, w: f64) -> SpectralField<f64> {
        SpectralField::from_fn(g, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            Complex::new((-r2 / (2.0 * w * w)).exp() * (1.0 + 0.3 * x[0] - 0.2 * x[1] * x[2]), 0.0)
        })
    }

    #[test]
    fn equal_exponents_match_grid_norm() {
        let g = GridSpec::new(12.0, 24).unwrap();
        let f = gaussian(&g, 0.9);
        let quad = AngularQuadrature::adapted(content_band(&f), 6.0, 12.0);
        for p in [2.0, 4.0] {
            let a = aniso_norm(&f, p, p, &quad).unwrap();
            let b = f.norm_lq(p);
            assert!((a / b - 1.0).abs() < 1e-4, "p={p}: {a} vs {b}");
        }
    }

    #[test]
    fn radial_field_angular_norm() {
        let g = GridSpec::new(24.0, 32).unwrap();
        let f = SpectralField::from_fn(&g, |x| {
            Complex::new((-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 4.0f64).exp(), 0.0)
        });
        let quad = AngularQuadrature::new(2.0, 1, 40);
        for s in [1.0, 2.0, 3.0, f64::INFINITY] {
            let shell = aniso_norm(&f, f64::INFINITY, s, &quad).unwrap();
            let expect = (-1.0f64).exp() * (4.0 * PI).powf(1.0 / s);
            assert!((shell - expect).abs() < 1e-8 * expect, "s={s}: {shell} vs {expect}");
        }
    }

    #[test]
    fn zero_field_and_degree_guard() {
        let g = GridSpec::new(12.0, 16).unwrap();
        let quad = AngularQuadrature::new(6.0, 10, 4);
        assert_eq!(aniso_norm(&SpectralField::zeros(&g), 2.0, 2.0, &quad).unwrap(), 0.0);
        let f = gaussian(&g, 1.0);
        assert!(matches!(aniso_norm(&f, 2.0, 2.0, &quad), Err(Error::QuadratureDegree { .. })));
    }
}
