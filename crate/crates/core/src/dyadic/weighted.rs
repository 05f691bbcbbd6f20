use serde::{Deserialize, Serialize};

use super::aniso::{block_aniso_besov, Resampling};
use super::besov_norm;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::trajectory::Trajectory;

/// Parameters of the time-weighted norms `X_T^sigma`, `Y_T^sigma`.
///
/// `sigma = 1/2 - nu` is always derived, never stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedNormSpec {
    nu: f64,
    eps: f64,
    t: f64,
    /// Radius of the ball carrying the radial-angular norm.
    pub r_max: f64,
    pub resampling: Resampling,
}

impl WeightedNormSpec {
    /// `0 < nu <= 1/2`, `0 < eps < 3/4` (so that `q(eps)` lies in `(2, 4)`), `T >= 1`.
    pub fn new(nu: f64, eps: f64, t: f64, r_max: f64) -> Result<Self> {
        if !(nu > 0.0 && nu <= 0.5) {
            return Err(Error::InvalidParameter(format!("nu must lie in (0, 1/2], got {nu}")));
        }
        if !(eps > 0.0 && eps < 0.75) {
            return Err(Error::InvalidParameter(format!("eps must lie in (0, 3/4), got {eps}")));
        }
        if !(t >= 1.0) {
            return Err(Error::InvalidParameter(format!("T must be at least 1, got {t}")));
        }
        if !(r_max > 0.0) {
            return Err(Error::InvalidParameter(format!("ball radius must be positive, got {r_max}")));
        }
        Ok(Self { nu, eps, t, r_max, resampling: Resampling::Blockwise })
    }

    /// Defaults `nu = eps = 0.05`.
    pub fn with_defaults(t: f64, r_max: f64) -> Result<Self> {
        Self::new(0.05, 0.05, t, r_max)
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn sigma(&self) -> f64 {
        0.5 - self.nu
    }

    /// `q(e)` with `1/q(e) = 1/4 + e/3`; `q(eps)` is `self.q(self.eps())`.
    pub fn q(&self, e: f64) -> f64 {
        1.0 / (0.25 + e / 3.0)
    }

    /// Angular exponent `2 / (1 - nu)`.
    pub fn s_angular(&self) -> f64 {
        2.0 / (1.0 - self.nu)
    }
}

/// Composite trapezoid of `w(t)^2 y(t)^2`, square-rooted.
fn l2_time(times: &[f64], vals: &[f64], sigma: f64) -> f64 {
    if times.len() < 2 {
        return 0.0;
    }
    let g: Vec<f64> = times.iter().zip(vals).map(|(t, y)| (t.powf(sigma) * y).powi(2)).collect();
    let mut s = 0.0;
    for i in 1..g.len() {
        s += 0.5 * (times[i] - times[i - 1]) * (g[i] + g[i - 1]);
    }
    s.sqrt()
}

/// The three components of `||u||_{X_T^sigma}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct XtBreakdown {
    pub energy: f64,
    pub strichartz: f64,
    pub radial_angular: f64,
}

impl XtBreakdown {
    pub fn total(&self) -> f64 {
        self.energy + self.strichartz + self.radial_angular
    }
}

fn check_start<T: Real>(traj: &Trajectory<T>, spec: &WeightedNormSpec) -> Result<()> {
    let t0 = traj.t0().as_f64();
    if (t0 - spec.t()).abs() > 1e-9 * spec.t() {
        return Err(Error::InvalidParameter(format!(
            "trajectory starts at {t0}, norm spec expects T = {}",
            spec.t()
        )));
    }
    Ok(())
}

/// `||u||_{L^inf_sigma H^1} + ||<grad>u||_{L^2_sigma B^0_{6,2}}
///  + ||<grad>u||_{L^2_sigma B^{1/4+eps}_{(q(eps), 2/(1-nu)),2}}` on the stored snapshots.
pub fn xt_norm<T: Real>(traj: &Trajectory<T>, spec: &WeightedNormSpec) -> Result<XtBreakdown> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    check_start(traj, spec)?;
    let sigma = spec.sigma();
    let times: Vec<f64> = traj.times().iter().map(|t| t.as_f64()).collect();
    let mut energy: f64 = 0.0;
    let mut strich = Vec::with_capacity(traj.len());
    let mut radang = Vec::with_capacity(traj.len());
    let q = spec.q(spec.eps());
    let s = spec.s_angular();
    for (i, u) in traj.us().iter().enumerate() {
        energy = energy.max(times[i].powf(sigma) * u.norm_h1().as_f64());
        let ju = u.japanese();
        strich.push(besov_norm(&ju, T::zero(), T::of(6.0)).as_f64());
        radang.push(block_aniso_besov(&ju, 0.25 + spec.eps(), q, s, spec.r_max, spec.resampling)?.as_f64());
    }
    Ok(XtBreakdown {
        energy,
        strichartz: l2_time(&times, &strich, sigma),
        radial_angular: l2_time(&times, &radang, sigma),
    })
}

/// `sup_t t^sigma ||v(t)||_{L^2}` over the stored snapshots.
pub fn yt_norm<T: Real>(traj: &Trajectory<T>, spec: &WeightedNormSpec) -> Result<f64> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    check_start(traj, spec)?;
    let sigma = spec.sigma();
    Ok(traj
        .vs()
        .iter()
        .enumerate()
        .map(|(i, v)| traj.time(i).as_f64().powf(sigma) * v.norm_l2().as_f64())
        .fold(0.0, f64::max))
}
