//! Ground state, conserved functionals, forward evolution and the backward
//! Picard solver.

pub mod forward;
pub mod ground;
pub mod picard;

use serde::{Deserialize, Serialize};

pub use forward::{evolve_forward, evolve_forward_observed, strang_step, Coupling, Dealias, ForwardOptions};
pub use ground::GroundState;
pub use picard::{
    duhamel_apply, linear_trajectory, non_contraction, picard_run, picard_solve, ConvergenceReport, DuhamelSpec, DuhamelTerms,
    FinalState, PicardOptions, PicardStatus, TailEstimate,
};

use crate::error::Result;
use crate::field::SpectralField;
use crate::scalar::Real;

/// `M(u) = int |u|^2 / 2`.
pub fn mass<T: Real>(u: &SpectralField<T>) -> f64 {
    0.5 * u.norm_l2().as_f64().powi(2)
}

/// `E_Z(u, v) = int |grad u|^2 / 2 + |v|^2 / 4 + Re(v) |u|^2 / 2`.
pub fn energy<T: Real>(u: &SpectralField<T>, v: &SpectralField<T>) -> Result<f64> {
    u.ensure_same_grid(v)?;
    let coupling = v.re().mul(&u.abs_sq()).integral().re.as_f64();
    Ok(0.5 * u.norm_grad().as_f64().powi(2) + 0.25 * v.norm_l2().as_f64().powi(2) + 0.5 * coupling)
}

/// `E_S(u) = int |grad u|^2 / 2 - |u|^4 / 4`.
pub fn schrodinger_energy<T: Real>(u: &SpectralField<T>) -> f64 {
    0.5 * u.norm_grad().as_f64().powi(2) - 0.25 * u.norm_lq(T::of(4.0)).as_f64().powi(4)
}

/// `K(u) = int |grad u|^2 - 3 |u|^4 / 4`.
pub fn k_functional<T: Real>(u: &SpectralField<T>) -> f64 {
    u.norm_grad().as_f64().powi(2) - 0.75 * u.norm_lq(T::of(4.0)).as_f64().powi(4)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    Below,
    Above,
}

/// Both sides of `(2||grad u||^2 + ||v||^2) ||u||^2 < 8 E_S(Q) M(Q)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub lhs: f64,
    pub rhs: f64,
    pub class: Threshold,
}

pub fn threshold_check<T: Real>(u: &SpectralField<T>, v: &SpectralField<T>, q: &GroundState) -> Result<ThresholdReport> {
    u.ensure_same_grid(v)?;
    let lhs = threshold_lhs(u, v);
    let rhs = 8.0 * q.schrodinger_energy() * q.mass();
    let class = if lhs < rhs { Threshold::Below } else { Threshold::Above };
    Ok(ThresholdReport { lhs, rhs, class })
}

fn threshold_lhs<T: Real>(u: &SpectralField<T>, v: &SpectralField<T>) -> f64 {
    let g = u.norm_grad().as_f64().powi(2);
    let w = v.norm_l2().as_f64().powi(2);
    (2.0 * g + w) * u.norm_l2().as_f64().powi(2)
}

/// Scale `lambda*` where `lambda (u, v)` changes class, by bisection on
/// `[0, hi]` after doubling `hi` until the data is above threshold.
pub fn threshold_scale<T: Real>(u: &SpectralField<T>, v: &SpectralField<T>, q: &GroundState, tol: f64) -> Result<Option<f64>> {
    u.ensure_same_grid(v)?;
    let rhs = 8.0 * q.schrodinger_energy() * q.mass();
    let base = threshold_lhs(u, v);
    if base == 0.0 {
        return Ok(None);
    }
    // the left side is homogeneous of degree 4 in lambda
    let above = |l: f64| base * l.powi(4) >= rhs;
    let mut hi = 1.0;
    while !above(hi) {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
