//! Positive radial ground state of `-Delta Q + Q = Q^3`.
//!
//! Shooting on `Q'' + (2/r) Q' - Q + Q^3 = 0`, `Q'(0) = 0`: too large a
//! `Q(0)` crosses zero, too small turns back up. The shot starts from the
//! Taylor series at `r = SERIES_RADIUS`. After bisection the shot is trusted
//! down to `Q = TAIL_SWITCH` and blended over a unit interval into the exact
//! solution `c e^{-r} / r` of the linearised equation, whose neglected cubic
//! term is below `TAIL_SWITCH^3`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::scalar::Real;

/// Radial step of the shooting integrator and of the stored profile.
pub const RADIAL_STEP: f64 = 1e-3;
const TAIL_SWITCH: f64 = 1e-4;
const SERIES_RADIUS: f64 = 0.25;
const SERIES_TERMS: usize = 60;
const RK_SUBSTEPS: usize = 4;
const RESIDUAL_STRIDE: usize = 4;

/// Ground state on a uniform radial grid `r_i = i h`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroundState {
    pub h: f64,
    pub q: Vec<f64>,
    pub dq: Vec<f64>,
    pub q0: f64,
    /// Sup over nodes of `|Q'' + 2Q'/r - Q + Q^3|` by 8th-order differences.
    pub residual: f64,
    /// Radius where the linear tail takes over.
    pub r_tail: f64,
    tail_c: f64,
}

#[derive(PartialEq)]
enum Shot {
    Over,
    Under,
}

fn rhs(r: f64, q: f64, p: f64) -> f64 {
    if r == 0.0 {
        // limit r -> 0: Q'' = (Q - Q^3) / 3
        (q - q * q * q) / 3.0
    } else {
        -2.0 * p / r + q - q * q * q
    }
}

/// `Q(r) = sum_k c_k r^{2k}` with `(2k)(2k+1) c_k = c_{k-1} - [Q^3]_{k-1}`.
fn series(a: f64, r: f64) -> (f64, f64) {
    let mut c = vec![a];
    let mut sq = vec![a * a];
    let mut cube = vec![a * a * a];
    for k in 1..SERIES_TERMS {
        c.push((c[k - 1] - cube[k - 1]) / ((2 * k) * (2 * k + 1)) as f64);
        sq.push((0..=k).map(|j| c[j] * c[k - j]).sum());
        cube.push((0..=k).map(|j| sq[j] * c[k - j]).sum());
    }
    let r2 = r * r;
    let (mut q, mut p, mut pow) = (0.0, 0.0, 1.0);
    for (k, ck) in c.iter().enumerate() {
        q += ck * pow;
        if k > 0 {
            p += 2.0 * k as f64 * ck * pow / r;
        }
        pow *= r2;
    }
    (q, p)
}

/// Series on `[0, SERIES_RADIUS]`, RK4 with `RK_SUBSTEPS` substeps per node beyond; stops at `r_max` or when the
/// shot classifies.
fn shoot(a: f64, r_max: f64, h: f64, mut keep: Option<&mut (Vec<f64>, Vec<f64>)>) -> Option<Shot> {
    let i0 = (SERIES_RADIUS / h).round() as usize;
    if let Some(k) = keep.as_deref_mut() {
        for i in 0..=i0 {
            let (q, p) = if i == 0 { (a, 0.0) } else { series(a, i as f64 * h) };
            k.0.push(q);
            k.1.push(p);
        }
    }
    let (mut q, mut p) = series(a, i0 as f64 * h);
    let steps = (r_max / h).round() as usize;
    let hs = h / RK_SUBSTEPS as f64;
    for i in i0..steps {
        for j in 0..RK_SUBSTEPS {
            let r = i as f64 * h + j as f64 * hs;
            let k1q = p;
            let k1p = rhs(r, q, p);
            let k2q = p + 0.5 * hs * k1p;
            let k2p = rhs(r + 0.5 * hs, q + 0.5 * hs * k1q, k2q);
            let k3q = p + 0.5 * hs * k2p;
            let k3p = rhs(r + 0.5 * hs, q + 0.5 * hs * k2q, k3q);
            let k4q = p + hs * k3p;
            let k4p = rhs(r + hs, q + hs * k3q, k4q);
            q += hs / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
            p += hs / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        }
        if let Some(k) = keep.as_deref_mut() {
            k.0.push(q);
            k.1.push(p);
        }
        if q < 0.0 {
            return Some(Shot::Over);
        }
        if p > 0.0 {
            return Some(Shot::Under);
        }
    }
    None
}

/// Eight-order central second and first derivative weights.
const D2: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
const D1: [f64; 5] = [0.0, 4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

impl GroundState {
    /// `r_max >= 15`; `tol` is the bisection tolerance on `Q(0)`.
    pub fn compute(r_max: f64, tol: f64) -> Result<Self> {
        if r_max < 15.0 {
            return Err(Error::InvalidParameter(format!("ground state needs r_max >= 15, got {r_max}")));
        }
        let h = RADIAL_STEP;
        // shots beyond the tail radius only grow the error mode
        let r_shoot = r_max.min(20.0);
        let (mut lo, mut hi) = (3.0, 6.0);
        if shoot(lo, r_shoot, h, None) != Some(Shot::Under) || shoot(hi, r_shoot, h, None) != Some(Shot::Over) {
            return Err(Error::Bracket(format!("Q(0) not bracketed by [{lo}, {hi}]")));
        }
        for _ in 0..200 {
            if hi - lo <= tol.max(f64::EPSILON * hi) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            match shoot(mid, r_shoot, h, None) {
                Some(Shot::Over) => hi = mid,
                Some(Shot::Under) | None => lo = mid,
            }
        }
        let a = 0.5 * (lo + hi);
        let mut kept = (Vec::new(), Vec::new());
        shoot(a, r_shoot, h, Some(&mut kept));
        let (mut q, mut dq) = kept;
        let i_tail = q.iter().position(|&v| v < TAIL_SWITCH).ok_or_else(|| {
            Error::Bracket(format!("shot for Q(0) = {a} never drops below {TAIL_SWITCH}"))
        })?;
        let r_tail = i_tail as f64 * h;
        let tail_c = q[i_tail] * r_tail * r_tail.exp();
        let blend = (1.0 / h).round() as usize;
        if q.len() <= i_tail + blend {
            return Err(Error::Bracket(format!("shot for Q(0) = {a} classified before the tail blend")));
        }
        let n = (r_max / h).round() as usize + 1;
        q.truncate(i_tail + blend + 1);
        dq.truncate(i_tail + blend + 1);
        for i in i_tail..n {
            let r = i as f64 * h;
            let e = tail_c * (-r).exp() / r;
            let de = -e * (1.0 + 1.0 / r);
            if i <= i_tail + blend {
                // quintic smoothstep: C^2 joins at both ends
                let s = (i - i_tail) as f64 / blend as f64;
                let w = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
                let dw = 30.0 * s * s * (1.0 - s) * (1.0 - s) / (blend as f64 * h);
                let diff = e - q[i];
                dq[i] = (1.0 - w) * dq[i] + w * de + dw * diff;
                q[i] += w * diff;
            } else {
                q.push(e);
                dq.push(de);
            }
        }
        let mut gs = Self { h, q, dq, q0: a, residual: 0.0, r_tail, tail_c };
        gs.residual = gs.ode_residual();
        Ok(gs)
    }

    /// Default construction: `r_max = 20`, bisection to machine precision.
    pub fn default_profile() -> Result<Self> {
        Self::compute(20.0, 1e-15)
    }

    pub fn r_max(&self) -> f64 {
        (self.q.len() - 1) as f64 * self.h
    }

    fn ode_residual(&self) -> f64 {
        let n = self.q.len() as i64;
        // stencil spacing RESIDUAL_STRIDE * h keeps roundoff (~eps Q / spacing^2) below 1e-9
        let s = RESIDUAL_STRIDE as i64;
        let h = self.h * RESIDUAL_STRIDE as f64;
        // Q is even in r: reflect for the stencil near the origin
        let at = |i: i64| self.q[i.unsigned_abs() as usize];
        let mut worst: f64 = 0.0;
        for i in 1..n - 4 * s {
            let r = i as f64 * self.h;
            let mut d2 = D2[0] * at(i);
            let mut d1 = 0.0;
            for j in 1..5i64 {
                d2 += D2[j as usize] * (at(i + j * s) + at(i - j * s));
                d1 += D1[j as usize] * (at(i + j * s) - at(i - j * s));
            }
            d2 /= h * h;
            d1 /= h;
            let q = at(i);
            worst = worst.max((d2 + 2.0 * d1 / r - q + q * q * q).abs());
        }
        worst
    }

    /// `Q(r)` by 4-point Lagrange interpolation, exact tail beyond the grid.
    pub fn value(&self, r: f64) -> f64 {
        let r = r.abs();
        if r >= self.r_max() {
            return self.tail_c * (-r).exp() / r;
        }
        let s = r / self.h;
        let i = (s.floor() as usize).clamp(1, self.q.len() - 3);
        let t = s - i as f64;
        let (a, b, c, d) = (self.q[i - 1], self.q[i], self.q[i + 1], self.q[i + 2]);
        // nodes at -1, 0, 1, 2
        -a * t * (t - 1.0) * (t - 2.0) / 6.0 + b * (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0
            - c * (t + 1.0) * t * (t - 2.0) / 2.0
            + d * (t + 1.0) * t * (t - 1.0) / 6.0
    }

    /// `4 pi int_0^{r_max} g(Q, Q') r^2 dr` by composite Simpson.
    fn radial_integral(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        let n = self.q.len() - 1;
        let m = n - n % 2;
        let mut s = 0.0;
        for i in 0..=m {
            let r = i as f64 * self.h;
            let w = if i == 0 || i == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += w * g(self.q[i], self.dq[i]) * r * r;
        }
        4.0 * std::f64::consts::PI * s * self.h / 3.0
    }

    /// `int |grad Q|^2`, `int Q^2`, `int Q^4` over R^3 (tail beyond `r_max`
    /// is below `e^{-2 r_max}` and neglected).
    pub fn integrals(&self) -> (f64, f64, f64) {
        (
            self.radial_integral(|_, p| p * p),
            self.radial_integral(|q, _| q * q),
            self.radial_integral(|q, _| q.powi(4)),
        )
    }

    /// Schrodinger energy `E_S(Q) = int |grad Q|^2 / 2 - Q^4 / 4`.
    pub fn schrodinger_energy(&self) -> f64 {
        let (g, _, q4) = self.integrals();
        0.5 * g - 0.25 * q4
    }

    /// `M(Q) = int Q^2 / 2`.
    pub fn mass(&self) -> f64 {
        0.5 * self.integrals().1
    }

    /// `Q(|x|)` sampled on a grid (origin at index 0, wrapped coordinates).
    pub fn field<T: Real>(&self, grid: &GridSpec<T>) -> SpectralField<T> {
        SpectralField::from_fn(grid, |x| {
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt().as_f64();
            num_complex::Complex::new(T::of(self.value(r)), T::zero())
        })
    }
}
