//! Strang split-step evolution of
//! `i u_t + Delta u = Re(v) u`, `i v_t + alpha |grad| v = -alpha |grad| |u|^2`.
//!
//! The linear half steps are exact multipliers. In the nonlinear step `|u|`
//! is frozen and `|grad| |u|^2` is real, so `Re v` is frozen too and
//! `u <- u e^{-i dt Re v}`, `v <- v + i alpha dt |grad| |u|^2` is the exact flow.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::scalar::Real;
use crate::trajectory::{Provenance, Trajectory};

/// Coupling of the Schrodinger nonlinearity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    /// `Re(v) u`, the physical system; conserves mass exactly.
    #[default]
    RealPart,
    /// `v u`, the form the normal-form equations use. The nonlinear step is
    /// then a second-order midpoint step instead of an exact flow.
    Complex,
}

/// Optional 2/3-rule truncation of the nonlinear products.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dealias {
    #[default]
    Off,
    TwoThirds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForwardOptions {
    pub alpha: f64,
    pub dt: f64,
    /// Store every `save_every`-th step.
    pub save_every: usize,
    pub coupling: Coupling,
    pub dealias: Dealias,
}

impl ForwardOptions {
    pub fn new(alpha: f64, dt: f64) -> Self {
        Self { alpha, dt, save_every: 1, coupling: Coupling::RealPart, dealias: Dealias::Off }
    }
}

fn truncate<T: Real>(f: SpectralField<T>, mode: Dealias) -> SpectralField<T> {
    match mode {
        Dealias::Off => f,
        Dealias::TwoThirds => {
            let g = f.grid().clone();
            let cut = (g.n() / 3) as i64;
            f.into_frequency().apply_symbol(|i| {
                let keep = g.lattice(i).iter().all(|m| m.abs() <= cut);
                Complex::new(if keep { T::one() } else { T::zero() }, T::zero())
            })
        }
    }
}

/// One Strang step of length `dt`.
pub fn strang_step<T: Real>(
    u: &SpectralField<T>,
    v: &SpectralField<T>,
    opts: &ForwardOptions,
) -> Result<(SpectralField<T>, SpectralField<T>)> {
    let dt = T::of(opts.dt);
    let half = dt / T::of(2.0);
    let alpha = T::of(opts.alpha);
    let u = u.schrodinger_propagate(half).into_physical();
    let v = v.half_wave_propagate(half, alpha)?.into_physical();
    let (u, v) = match opts.coupling {
        Coupling::RealPart => {
            let un: Vec<_> = u
                .data()
                .iter()
                .zip(v.data())
                .map(|(a, b)| *a * Complex::from_polar(T::one(), -dt * b.re))
                .collect();
            let rho = truncate(u.abs_sq(), opts.dealias).abs_grad();
            let un = truncate(SpectralField::from_physical(u.grid(), un)?, opts.dealias);
            let vn = v.axpy(Complex::new(T::zero(), alpha * dt), &rho.into_physical());
            (un, vn)
        }
        Coupling::Complex => {
            let i = Complex::new(T::zero(), T::one());
            let w0 = truncate(u.abs_sq(), opts.dealias).abs_grad().into_physical();
            let vh = v.axpy(i * alpha * half, &w0);
            let un: Vec<_> = u.data().iter().zip(vh.data()).map(|(a, b)| *a * (-i * dt * *b).exp()).collect();
            let un = truncate(SpectralField::from_physical(u.grid(), un)?, opts.dealias).into_physical();
            let w1 = truncate(un.abs_sq(), opts.dealias).abs_grad().into_physical();
            let vn = v.axpy(i * alpha * half, &w0.add(&w1));
            (un, vn)
        }
    };
    let u = u.schrodinger_propagate(half);
    let v = v.half_wave_propagate(half, alpha)?;
    Ok((u, v))
}

/// Forward evolution on `[t0, t1]`; `observer(step, t, u, v)` sees every step.
pub fn evolve_forward_observed<T: Real>(
    u0: &SpectralField<T>,
    v0: &SpectralField<T>,
    t0: f64,
    t1: f64,
    opts: &ForwardOptions,
    observer: &mut dyn FnMut(usize, f64, &SpectralField<T>, &SpectralField<T>),
) -> Result<Trajectory<T>> {
    u0.ensure_same_grid(v0)?;
    if !(opts.alpha > 0.0) || !(opts.dt > 0.0) || opts.save_every == 0 || !(t1 > t0) {
        return Err(Error::InvalidParameter(format!(
            "need alpha > 0, dt > 0, save_every >= 1 and t1 > t0 (alpha = {}, dt = {}, save_every = {}, [{t0}, {t1}])",
            opts.alpha, opts.dt, opts.save_every
        )));
    }
    let grid = u0.grid();
    let limit = grid.dt_stability(T::of(opts.alpha)).as_f64();
    if opts.dt > limit {
        return Err(Error::InvalidParameter(format!("dt = {} exceeds the stability bound {limit:.4e}", opts.dt)));
    }
    let steps = ((t1 - t0) / opts.dt).round() as usize;
    if ((steps as f64) * opts.dt - (t1 - t0)).abs() > 1e-9 * (t1 - t0) {
        return Err(Error::InvalidParameter(format!("dt = {} does not divide [{t0}, {t1}]", opts.dt)));
    }
    if steps % opts.save_every != 0 {
        return Err(Error::InvalidParameter(format!("save_every = {} does not divide {steps} steps", opts.save_every)));
    }
    let mut u = u0.to_frequency();
    let mut v = v0.to_frequency();
    let mut us = vec![u.clone()];
    let mut vs = vec![v.clone()];
    observer(0, t0, &u, &v);
    for step in 1..=steps {
        let (un, vn) = strang_step(&u, &v, opts)?;
        let t = t0 + step as f64 * opts.dt;
        if !un.is_finite() || !vn.is_finite() {
            return Err(Error::NumericalAbort { step, time: t, reason: "non-finite field".into() });
        }
        u = un;
        v = vn;
        observer(step, t, &u, &v);
        if step % opts.save_every == 0 {
            us.push(u.clone());
            vs.push(v.clone());
        }
    }
    Trajectory::new(T::of(t0), T::of(opts.dt * opts.save_every as f64), us, vs, Provenance::Forward)
}

pub fn evolve_forward<T: Real>(
    u0: &SpectralField<T>,
    v0: &SpectralField<T>,
    t0: f64,
    t1: f64,
    opts: &ForwardOptions,
) -> Result<Trajectory<T>> {
    evolve_forward_observed(u0, v0, t0, t1, opts, &mut |_, _, _, _| {})
}
