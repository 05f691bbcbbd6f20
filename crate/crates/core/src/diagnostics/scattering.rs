//! Distance of a solution to its free asymptotics.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::scalar::Real;
use crate::trajectory::Trajectory;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringSeries {
    pub sigma: f64,
    pub times: Vec<f64>,
    /// `||u(t) - e^{it Delta} u_+||_{H^1}`.
    pub u_residual: Vec<f64>,
    /// `||v(t) - e^{i alpha t |grad|} v_+||_{L^2}`.
    pub v_residual: Vec<f64>,
    pub u_weighted: Vec<f64>,
    pub v_weighted: Vec<f64>,
    pub sup_u_weighted: f64,
    pub sup_v_weighted: f64,
}

impl ScatteringSeries {
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "t,u_residual,v_residual,u_weighted,v_weighted")?;
        for i in 0..self.times.len() {
            writeln!(
                w,
                "{:e},{:e},{:e},{:e},{:e}",
                self.times[i], self.u_residual[i], self.v_residual[i], self.u_weighted[i], self.v_weighted[i]
            )?;
        }
        Ok(())
    }
}

/// Residual series of `traj` against the free flows of `(u_+, v_+)`.
pub fn scattering_residual<T: Real>(
    traj: &Trajectory<T>,
    u_plus: &SpectralField<T>,
    v_plus: &SpectralField<T>,
    alpha: f64,
    sigma: f64,
) -> Result<ScatteringSeries> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    if traj.grid() != u_plus.grid() || traj.grid() != v_plus.grid() {
        return Err(Error::GridMismatch);
    }
    if !(sigma >= 0.0) || !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("need sigma >= 0 and alpha > 0, got {sigma}, {alpha}")));
    }
    let up = u_plus.to_frequency();
    let vp = v_plus.to_frequency();
    let mut s = ScatteringSeries {
        sigma,
        times: Vec::new(),
        u_residual: Vec::new(),
        v_residual: Vec::new(),
        u_weighted: Vec::new(),
        v_weighted: Vec::new(),
        sup_u_weighted: 0.0,
        sup_v_weighted: 0.0,
    };
    for i in 0..traj.len() {
        let t = traj.time(i);
        let du = traj.u(i).sub(&up.schrodinger_propagate(t)).norm_h1().as_f64();
        let dv = traj.v(i).sub(&vp.half_wave_propagate(t, T::of(alpha))?).norm_l2().as_f64();
        let w = t.as_f64().powf(sigma);
        s.times.push(t.as_f64());
        s.u_residual.push(du);
        s.v_residual.push(dv);
        s.u_weighted.push(w * du);
        s.v_weighted.push(w * dv);
        s.sup_u_weighted = s.sup_u_weighted.max(w * du);
        s.sup_v_weighted = s.sup_v_weighted.max(w * dv);
    }
    Ok(s)
}
