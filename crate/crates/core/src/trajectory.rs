//! Time-indexed `(u, v)` snapshots on a uniform grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::scalar::Real;

/// Where a trajectory came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Forward,
    Linear,
    PicardIterate(usize),
    Difference,
}

/// Snapshots `(u(t_i), v(t_i))` at `t_i = t0 + i dt`, `i = 0..=M`.
#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    t0: T,
    dt: T,
    u: Vec<SpectralField<T>>,
    v: Vec<SpectralField<T>>,
    pub provenance: Provenance,
}

impl<T: Real> Trajectory<T> {
    pub fn new(
        t0: T,
        dt: T,
        u: Vec<SpectralField<T>>,
        v: Vec<SpectralField<T>>,
        provenance: Provenance,
    ) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        if u.len() != v.len() {
            return Err(Error::InvalidParameter(format!(
                "u has {} snapshots, v has {}",
                u.len(),
                v.len()
            )));
        }
        if u.len() > 1 && !(dt > T::zero()) {
            return Err(Error::InvalidParameter("time step must be positive".into()));
        }
        let g = u[0].grid();
        if u.iter().chain(&v).any(|f| f.grid() != g) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { t0, dt, u, v, provenance })
    }

    /// Same field at every time.
    pub fn constant(t0: T, dt: T, m: usize, u: &SpectralField<T>, v: &SpectralField<T>) -> Result<Self> {
        Self::new(t0, dt, vec![u.clone(); m + 1], vec![v.clone(); m + 1], Provenance::Linear)
    }

    /// Zero fields on `[t0, t0 + m dt]`.
    pub fn zeros(grid: &GridSpec<T>, t0: T, dt: T, m: usize) -> Self {
        let z = SpectralField::zeros(grid);
        Self { t0, dt, u: vec![z.clone(); m + 1], v: vec![z; m + 1], provenance: Provenance::Linear }
    }

    pub fn grid(&self) -> &GridSpec<T> {
        self.u[0].grid()
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn t0(&self) -> T {
        self.t0
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn t_end(&self) -> T {
        self.time(self.len() - 1)
    }

    pub fn time(&self, i: usize) -> T {
        self.t0 + self.dt * T::of(i as f64)
    }

    pub fn times(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }

    pub fn u(&self, i: usize) -> &SpectralField<T> {
        &self.u[i]
    }

    pub fn v(&self, i: usize) -> &SpectralField<T> {
        &self.v[i]
    }

    pub fn us(&self) -> &[SpectralField<T>] {
        &self.u
    }

    pub fn vs(&self) -> &[SpectralField<T>] {
        &self.v
    }

    pub fn into_fields(self) -> (Vec<SpectralField<T>>, Vec<SpectralField<T>>) {
        (self.u, self.v)
    }

    pub fn same_time_grid(&self, other: &Self) -> bool {
        self.len() == other.len()
            && (self.t0 - other.t0).abs() <= T::tiny() * (T::one() + self.t0.abs())
            && (self.dt - other.dt).abs() <= T::tiny() * (T::one() + self.dt.abs())
    }

    fn zip(&self, other: &Self, op: impl Fn(&SpectralField<T>, &SpectralField<T>) -> SpectralField<T>) -> Result<Self> {
        if !self.same_time_grid(other) {
            return Err(Error::InvalidParameter("trajectories on different time grids".into()));
        }
        if self.grid() != other.grid() {
            return Err(Error::GridMismatch);
        }
        let u = self.u.iter().zip(&other.u).map(|(a, b)| op(a, b)).collect();
        let v = self.v.iter().zip(&other.v).map(|(a, b)| op(a, b)).collect();
        Ok(Self { t0: self.t0, dt: self.dt, u, v, provenance: Provenance::Difference })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.sub(b))
    }
}
