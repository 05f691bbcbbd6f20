//! Backward Picard iteration for the normal-form final-state equations.
//!
//! With `u = u_li + u_nl`, `v = v_li + v_nl` and the backward integrals cut at
//! `T_max`, the map is
//!
//! ```text
//! u_nl(t) = -Omega_b(v, u)(t) + e^{i(t-T_max)Delta} Omega_b(v, u)(T_max)
//!           + int_t^{T_max} e^{i(t-s)Delta} [ i (vu)_R - i alpha Omega_b(|grad||u|^2, u)
//!                                             + i Omega_b(v, vu) ](s) ds
//! v_nl(t) = -i alpha int_t^{T_max} e^{i alpha (t-s)|grad|} |grad| |u|^2 (s) ds
//! ```
//!
//! with `R = LH + HH + alphaL`, taken as the complement of XL so that the
//! zero-mode pair (resonant, in no dyadic class) is kept. The second boundary term is what integrating
//! by parts on `[t, T_max]` leaves behind; it vanishes as `T_max -> inf`.
//! Integrals use the interaction picture: pull back by the free group,
//! cumulative trapezoid from `T_max`, push forward.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dyadic::{paraproduct, xt_norm, yt_norm, Paraproduct, WeightedNormSpec};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::normal_form::{omega_b_with, xl_is_resolved, DEFAULT_BUDGET, RESONANCE_FLOOR};
use crate::scalar::Real;
use crate::trajectory::{Provenance, Trajectory};

/// Switches for the individual terms of the fixed-point map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuhamelTerms {
    /// `-Omega_b(v, u)(t)` and its `T_max` counterpart.
    pub boundary: bool,
    /// `i (vu)_{LH+HH+alphaL}`.
    pub resonant: bool,
    /// `-i alpha Omega_b(|grad||u|^2, u)`.
    pub cubic_wave: bool,
    /// `i Omega_b(v, vu)`.
    pub cubic_product: bool,
    /// The wave Duhamel term.
    pub wave: bool,
}

impl Default for DuhamelTerms {
    fn default() -> Self {
        Self::all()
    }
}

impl DuhamelTerms {
    pub fn all() -> Self {
        Self { boundary: true, resonant: true, cubic_wave: true, cubic_product: true, wave: true }
    }

    pub fn none() -> Self {
        Self { boundary: false, resonant: false, cubic_wave: false, cubic_product: false, wave: false }
    }

    fn uses_omega(&self) -> bool {
        self.boundary || self.cubic_wave || self.cubic_product
    }
}

/// Limits of the bilinear sums inside the map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DuhamelSpec {
    pub alpha: f64,
    pub terms: DuhamelTerms,
    pub resonance_floor: f64,
    pub budget: u64,
}

impl DuhamelSpec {
    pub fn new(alpha: f64) -> Self {
        Self { alpha, terms: DuhamelTerms::all(), resonance_floor: RESONANCE_FLOOR, budget: DEFAULT_BUDGET }
    }
}

/// Free trajectory `(e^{itDelta} u_+, e^{i alpha t|grad|} v_+)` on `t_i = t + i dt`.
pub fn linear_trajectory<T: Real>(
    u_plus: &SpectralField<T>,
    v_plus: &SpectralField<T>,
    alpha: f64,
    t: f64,
    t_max: f64,
    dt: f64,
) -> Result<Trajectory<T>> {
    u_plus.ensure_same_grid(v_plus)?;
    let m = time_steps(t, t_max, dt)?;
    let a = T::of(alpha);
    let mut us = Vec::with_capacity(m + 1);
    let mut vs = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let s = T::of(t + i as f64 * dt);
        us.push(u_plus.schrodinger_propagate(s));
        vs.push(v_plus.half_wave_propagate(s, a)?);
    }
    Trajectory::new(T::of(t), T::of(dt), us, vs, Provenance::Linear)
}

fn time_steps(t: f64, t_max: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !(t_max > t) {
        return Err(Error::InvalidParameter(format!("need dt > 0 and T_max > T (dt = {dt}, [{t}, {t_max}])")));
    }
    let m = ((t_max - t) / dt).round() as usize;
    if m == 0 || ((m as f64) * dt - (t_max - t)).abs() > 1e-9 * (t_max - t) {
        return Err(Error::InvalidParameter(format!("dt = {dt} does not divide [{t}, {t_max}]")));
    }
    Ok(m)
}

/// `C_i = int_{t_i}^{t_M} H(s) ds` by the cumulative trapezoid.
fn backward_trapezoid<T: Real>(h: &[SpectralField<T>], dt: T) -> Vec<SpectralField<T>> {
    let m = h.len() - 1;
    let half = Complex::new(dt / T::of(2.0), T::zero());
    let mut c = vec![SpectralField::zeros(h[0].grid()); m + 1];
    for i in (0..m).rev() {
        c[i] = c[i + 1].axpy(half, &h[i].add(&h[i + 1]));
    }
    c
}

/// One application of the fixed-point map.
pub fn duhamel_apply<T: Real>(state: &Trajectory<T>, lin: &Trajectory<T>, spec: &DuhamelSpec) -> Result<Trajectory<T>> {
    if !state.same_time_grid(lin) || state.grid() != lin.grid() {
        return Err(Error::InvalidParameter("state and linear trajectories must share grid and time grid".into()));
    }
    if !(spec.alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("wave speed must be positive, got {}", spec.alpha)));
    }
    let m = state.len() - 1;
    let grid = state.grid().clone();
    let tiny = T::of(1e3) * T::epsilon();
    let end_scale = lin.u(m).norm_l2().max(lin.v(m).norm_l2()).max(T::one());
    if state.u(m).norm_l2() > tiny * end_scale || state.v(m).norm_l2() > tiny * end_scale {
        return Err(Error::InvalidParameter("nonlinear part must vanish at T_max".into()));
    }
    let alpha = T::of(spec.alpha);
    let terms = spec.terms;
    // Omega_b has an empty pair set when no resolved block is XL: it is then the zero operator
    let xl = xl_is_resolved(&grid, spec.alpha);
    let omega_on = terms.uses_omega() && xl;
    let omega = |f: &SpectralField<T>, g: &SpectralField<T>| {
        omega_b_with(f, g, alpha, spec.resonance_floor, spec.budget)
    };
    let i_unit = Complex::new(T::zero(), T::one());
    let dt = state.dt();

    let mut bnd = Vec::with_capacity(m + 1);
    let mut hu = Vec::with_capacity(m + 1);
    let mut hv = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let s = state.time(i);
        let u = lin.u(i).add(state.u(i)).into_frequency();
        let v = lin.v(i).add(state.v(i)).into_frequency();
        let wave_src = if terms.wave || (omega_on && terms.cubic_wave) {
            Some(u.abs_sq().abs_grad())
        } else {
            None
        };
        let mut f = SpectralField::zeros(&grid);
        if terms.resonant {
            // everything outside XL, including the zero-mode pair no dyadic class holds
            let mut r = v.mul(&u).into_frequency();
            if xl {
                r = r.sub(&paraproduct(&v, &u, Paraproduct::XL, alpha)?);
            }
            f = f.axpy(i_unit, &r);
        }
        if omega_on && terms.cubic_wave {
            let w = wave_src.as_ref().expect("computed above");
            f = f.axpy(-i_unit * alpha, &omega(w, &u)?);
        }
        if omega_on && terms.cubic_product {
            f = f.axpy(i_unit, &omega(&v, &v.mul(&u).into_frequency())?);
        }
        hu.push(f.schrodinger_propagate(-s));
        if terms.wave {
            let w = wave_src.as_ref().expect("computed above");
            hv.push(w.scale(-i_unit * alpha).half_wave_propagate(-s, alpha)?);
        }
        if omega_on && terms.boundary {
            bnd.push(omega(&v, &u)?);
        }
    }

    let cu = backward_trapezoid(&hu, dt);
    let cv = if terms.wave { Some(backward_trapezoid(&hv, dt)) } else { None };
    let t_max = state.t_end();
    let mut us = Vec::with_capacity(m + 1);
    let mut vs = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let t = state.time(i);
        let mut un = cu[i].schrodinger_propagate(t);
        if !bnd.is_empty() {
            un = un.sub(&bnd[i]).add(&bnd[m].schrodinger_propagate(t - t_max));
        }
        let vn = match &cv {
            Some(cv) => cv[i].half_wave_propagate(t, alpha)?,
            None => SpectralField::zeros(&grid),
        };
        if !un.is_finite() || !vn.is_finite() {
            return Err(Error::NumericalAbort { step: i, time: t.as_f64(), reason: "non-finite Duhamel iterate".into() });
        }
        us.push(un);
        vs.push(vn);
    }
    // the far boundary term cancels the near one exactly at T_max
    us[m] = SpectralField::zeros(&grid);
    vs[m] = SpectralField::zeros(&grid);
    let n = match state.provenance {
        Provenance::PicardIterate(k) => k + 1,
        _ => 1,
    };
    Trajectory::new(state.t0(), dt, us, vs, Provenance::PicardIterate(n))
}

/// Parameters of [`picard_solve`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    pub t: f64,
    pub t_max: f64,
    pub dt: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub duhamel: DuhamelSpec,
    /// `nu`, `eps` and ball radius of the `X_T^sigma + Y_T^sigma` distance.
    pub nu: f64,
    pub eps: f64,
    pub r_max: f64,
    /// Consecutive ratios `>= 1` that count as non-contraction.
    pub stall_limit: usize,
}

impl PicardOptions {
    pub fn new(alpha: f64, t: f64, t_max: f64, dt: f64) -> Self {
        Self {
            t,
            t_max,
            dt,
            max_iter: 12,
            tol: 1e-8,
            duhamel: DuhamelSpec::new(alpha),
            nu: 0.05,
            eps: 0.05,
            r_max: 4.0,
            stall_limit: 3,
        }
    }

    pub fn norm_spec(&self) -> Result<WeightedNormSpec> {
        WeightedNormSpec::new(self.nu, self.eps, self.t, self.r_max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PicardStatus {
    Converged,
    MaxIterations,
    NonContraction,
}

/// Power-law extrapolation of the neglected `int_{T_max}^inf`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    /// Fitted decay exponent of the `H^1` norm of the `u` integrand.
    pub u_rate: f64,
    /// Fitted decay exponent of the `L^2` norm of the `v` integrand.
    pub v_rate: f64,
    /// `||F(T_max)|| T_max / (rate - 1)`; `None` when the fitted rate is `<= 1`.
    pub u_tail: Option<f64>,
    pub v_tail: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub status: PicardStatus,
    pub iterations: usize,
    /// `X_T^sigma + Y_T^sigma` distance of successive iterates.
    pub distances: Vec<f64>,
    /// `distances[n] / distances[n-1]`.
    pub ratios: Vec<f64>,
    /// Largest observed ratio (0 when fewer than two distances exist).
    pub contraction_ratio: f64,
    /// `||x - Phi(x)||` of the returned iterate.
    pub residual: f64,
    /// Whether the XL pair set (and so `Omega_b`) is nonempty on this grid.
    pub normal_form_active: bool,
    pub tail: TailEstimate,
}

/// Converged (or last) iterate together with the free flow.
#[derive(Clone, Debug)]
pub struct FinalState<T: Real> {
    pub linear: Trajectory<T>,
    pub nonlinear: Trajectory<T>,
}

impl<T: Real> FinalState<T> {
    /// `(u_li + u_nl, v_li + v_nl)`.
    pub fn full(&self) -> Trajectory<T> {
        let mut t = self.linear.add(&self.nonlinear).expect("shared time grid");
        t.provenance = self.nonlinear.provenance.clone();
        t
    }
}

fn distance<T: Real>(a: &Trajectory<T>, b: &Trajectory<T>, spec: &WeightedNormSpec) -> Result<f64> {
    let d = a.sub(b)?;
    Ok(xt_norm(&d, spec)?.total() + yt_norm(&d, spec)?)
}

/// Least-squares slope of `log y` against `log t` over the second half of the snapshots.
fn decay_rate(times: &[f64], y: &[f64]) -> f64 {
    let start = times.len() / 2;
    let pts: Vec<(f64, f64)> = times[start..]
        .iter()
        .zip(&y[start..])
        .filter(|(_, v)| **v > 0.0)
        .map(|(t, v)| (t.ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        -sxy / sxx
    }
}

fn tail_estimate<T: Real>(full: &Trajectory<T>, alpha: f64) -> Result<TailEstimate> {
    let times: Vec<f64> = full.times().iter().map(|t| t.as_f64()).collect();
    let a = T::of(alpha);
    let mut fu = Vec::with_capacity(times.len());
    let mut fv = Vec::with_capacity(times.len());
    for i in 0..full.len() {
        let u = full.u(i);
        fu.push(full.v(i).mul(u).norm_h1().as_f64());
        fv.push((u.abs_sq().abs_grad().norm_l2() * a).as_f64());
    }
    let t_max = *times.last().expect("nonempty");
    let extrap = |rate: f64, last: f64| if rate > 1.0 { Some(last * t_max / (rate - 1.0)) } else { None };
    let u_rate = decay_rate(&times, &fu);
    let v_rate = decay_rate(&times, &fv);
    Ok(TailEstimate {
        u_rate,
        v_rate,
        u_tail: extrap(u_rate, *fu.last().expect("nonempty")),
        v_tail: extrap(v_rate, *fv.last().expect("nonempty")),
    })
}

/// Iterates the map from `init` (zero when `None`) and always returns the last
/// iterate; the status says whether it converged.
pub fn picard_run<T: Real>(
    u_plus: &SpectralField<T>,
    v_plus: &SpectralField<T>,
    opts: &PicardOptions,
    init: Option<&Trajectory<T>>,
) -> Result<(FinalState<T>, ConvergenceReport)> {
    if !(opts.t >= 1.0) {
        return Err(Error::InvalidParameter(format!("T must be at least 1, got {}", opts.t)));
    }
    if opts.max_iter == 0 || !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter("need max_iter >= 1 and tol > 0".into()));
    }
    let alpha = opts.duhamel.alpha;
    let lin = linear_trajectory(u_plus, v_plus, alpha, opts.t, opts.t_max, opts.dt)?;
    let spec = opts.norm_spec()?;
    let mut x = match init {
        Some(t) => {
            if !t.same_time_grid(&lin) || t.grid() != lin.grid() {
                return Err(Error::InvalidParameter("initial iterate must share the linear time grid".into()));
            }
            t.clone()
        }
        None => Trajectory::zeros(lin.grid(), lin.t0(), lin.dt(), lin.len() - 1),
    };
    let mut distances = Vec::new();
    let mut ratios = Vec::new();
    let mut status = PicardStatus::MaxIterations;
    let mut stalled = 0;
    for _ in 0..opts.max_iter {
        let next = duhamel_apply(&x, &lin, &opts.duhamel)?;
        let d = distance(&next, &x, &spec)?;
        if let Some(&prev) = distances.last() {
            let r = if prev > 0.0 { d / prev } else { f64::INFINITY };
            ratios.push(r);
            stalled = if r >= 1.0 { stalled + 1 } else { 0 };
        }
        distances.push(d);
        x = next;
        if d < opts.tol {
            status = PicardStatus::Converged;
            break;
        }
        if stalled >= opts.stall_limit {
            status = PicardStatus::NonContraction;
            break;
        }
    }
    let residual = distance(&duhamel_apply(&x, &lin, &opts.duhamel)?, &x, &spec)?;
    let state = FinalState { linear: lin, nonlinear: x };
    let tail = tail_estimate(&state.full(), alpha)?;
    let report = ConvergenceReport {
        status,
        iterations: distances.len(),
        contraction_ratio: ratios.iter().copied().fold(0.0, f64::max),
        distances,
        ratios,
        residual,
        normal_form_active: xl_is_resolved(state.linear.grid(), alpha),
        tail,
    };
    Ok((state, report))
}

/// [`picard_run`] from the zero iterate; non-contraction is an error.
pub fn picard_solve<T: Real>(
    u_plus: &SpectralField<T>,
    v_plus: &SpectralField<T>,
    opts: &PicardOptions,
) -> Result<(FinalState<T>, ConvergenceReport)> {
    let (state, report) = picard_run(u_plus, v_plus, opts, None)?;
    if report.status == PicardStatus::NonContraction {
        return Err(non_contraction(&report));
    }
    Ok((state, report))
}

pub fn non_contraction(report: &ConvergenceReport) -> Error {
    Error::NonContraction(format!(
        "successive-iterate ratios {:?} did not drop below 1; increase T or shrink the final data",
        report.ratios
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::normal_form::omega_b;
    use std::f64::consts::PI;

    type Cx = Complex<f64>;

    fn fixture_grid() -> GridSpec<f64> {
        GridSpec::new(8.0 * PI, 16).unwrap()
    }

    fn data(g: &GridSpec<f64>, size: f64) -> (SpectralField<f64>, SpectralField<f64>) {
        let u = SpectralField::from_fn(g, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            Cx::from_polar((-r2 / 4.0).exp(), 0.5 * x[0])
        });
        let v = SpectralField::from_fn(g, |x| {
            let r2 = (x[0] - 1.0).powi(2) + x[1] * x[1] + x[2] * x[2];
            Cx::new(1.0, 0.3) * (-r2 / 3.0).exp()
        });
        (u.scale_re(0.5 * size / u.norm_h1()), v.scale_re(0.5 * size / v.norm_l2()))
    }

    #[test]
    fn zero_data_converges_at_once() {
        let g = fixture_grid();
        let z = SpectralField::zeros(&g);
        let (st, rep) = picard_solve(&z, &z, &PicardOptions::new(1.0 / 32.0, 2.0, 4.0, 0.1)).unwrap();
        assert_eq!(rep.status, PicardStatus::Converged);
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.distances, vec![0.0]);
        assert!(st.full().us().iter().all(|f| f.norm_l2() == 0.0));
    }

    #[test]
    fn disabled_terms_give_zero_iterate() {
        let g = fixture_grid();
        let (u, v) = data(&g, 1e-2);
        let lin = linear_trajectory(&u, &v, 1.0 / 32.0, 2.0, 3.0, 0.1).unwrap();
        let zero = Trajectory::zeros(&g, lin.t0(), lin.dt(), lin.len() - 1);
        let mut spec = DuhamelSpec::new(1.0 / 32.0);
        spec.terms = DuhamelTerms::none();
        let out = duhamel_apply(&zero, &lin, &spec).unwrap();
        assert!(out.us().iter().chain(out.vs()).all(|f| f.norm_l2() == 0.0));
        assert_eq!(out.provenance, Provenance::PicardIterate(1));
    }

    #[test]
    fn boundary_term_alone() {
        let g = fixture_grid();
        let alpha = 1.0 / 32.0;
        let (u, v) = data(&g, 1e-2);
        let lin = linear_trajectory(&u, &v, alpha, 2.0, 3.0, 0.1).unwrap();
        let m = lin.len() - 1;
        let zero = Trajectory::zeros(&g, lin.t0(), lin.dt(), m);
        let mut spec = DuhamelSpec::new(alpha);
        spec.terms = DuhamelTerms { boundary: true, ..DuhamelTerms::none() };
        let out = duhamel_apply(&zero, &lin, &spec).unwrap();
        let far = omega_b(lin.v(m), lin.u(m), alpha).unwrap();
        for i in [0, 4] {
            let t = lin.time(i);
            let near = omega_b(lin.v(i), lin.u(i), alpha).unwrap();
            let want = far.schrodinger_propagate(t - 3.0).sub(&near);
            assert!(out.u(i).sub(&want).norm_l2() <= 1e-14 * want.norm_l2().max(1e-300));
            assert!(want.norm_l2() > 0.0);
        }
        assert_eq!(out.u(m).norm_l2(), 0.0);
    }

    /// `v_nl` for a prescribed two-mode `u(s) = e^{-(s-2)^2} (e^{i p x} + e^{i q x})`.
    fn wave_only(dt: f64) -> Trajectory<f64> {
        let g = fixture_grid();
        let m = (2.0 / dt).round() as usize;
        let shape = SpectralField::plane_wave(&g, [1, 0, 0], Cx::new(1.0, 0.0))
            .add(&SpectralField::plane_wave(&g, [-1, 2, 0], Cx::new(0.5, 0.0)));
        let us: Vec<_> = (0..=m).map(|i| shape.scale_re((-(1.0 + i as f64 * dt - 2.0f64).powi(2)).exp())).collect();
        let vs = vec![SpectralField::zeros(&g); m + 1];
        let lin = Trajectory::new(1.0, dt, us, vs, Provenance::Linear).unwrap();
        let zero = Trajectory::zeros(&g, 1.0, dt, m);
        let mut spec = DuhamelSpec::new(2.0);
        spec.terms = DuhamelTerms { wave: true, ..DuhamelTerms::none() };
        duhamel_apply(&zero, &lin, &spec).unwrap()
    }

    #[test]
    fn wave_duhamel_is_second_order() {
        let reference = wave_only(0.1 / 32.0);
        let err = |dt: f64| {
            let tr = wave_only(dt);
            let stride = (dt / reference.dt()).round() as usize;
            (0..tr.len()).map(|i| tr.v(i).sub(reference.v(i * stride)).norm_l2()).fold(0.0, f64::max)
        };
        let (a, b) = (err(0.1), err(0.05));
        let ratio = a / b;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        // u is untouched by the wave term
        assert!(reference.us().iter().all(|f| f.norm_l2() == 0.0));
        assert!(reference.v(0).norm_l2() > 0.0);
    }

    #[test]
    fn small_data_contracts() {
        let g = fixture_grid();
        let (u, v) = data(&g, 1e-2);
        let opts = PicardOptions::new(1.0 / 32.0, 2.0, 4.0, 0.1);
        let (st, rep) = picard_solve(&u, &v, &opts).unwrap();
        assert_eq!(rep.status, PicardStatus::Converged);
        assert!(rep.normal_form_active);
        assert!(rep.contraction_ratio < 0.5);
        assert!(rep.residual < opts.tol);
        let m = st.nonlinear.len() - 1;
        assert_eq!(st.nonlinear.u(m).norm_l2(), 0.0);
        assert_eq!(st.nonlinear.v(m).norm_l2(), 0.0);
        assert!(st.nonlinear.u(0).norm_l2() > 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = fixture_grid();
        let z = SpectralField::zeros(&g);
        assert!(picard_solve(&z, &z, &PicardOptions::new(1.0, 0.5, 4.0, 0.1)).is_err());
        assert!(picard_solve(&z, &z, &PicardOptions::new(1.0, 2.0, 2.0, 0.1)).is_err());
        assert!(picard_solve(&z, &z, &PicardOptions::new(1.0, 2.0, 4.0, 0.3)).is_err());
        // a nonzero end state is not an admissible iterate
        let (u, v) = data(&g, 1e-2);
        let lin = linear_trajectory(&u, &v, 1.0, 2.0, 3.0, 0.5).unwrap();
        assert!(duhamel_apply(&lin, &lin, &DuhamelSpec::new(1.0)).is_err());
    }

    #[test]
    fn decay_rate_fit() {
        let t: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        let y: Vec<f64> = t.iter().map(|t| 3.0 * t.powf(-1.5)).collect();
        assert!((decay_rate(&t, &y) - 1.5).abs() < 1e-12);
    }
}
