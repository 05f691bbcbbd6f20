//! Materializing the configured data on the configured grid.

use std::path::PathBuf;

use num_complex::Complex;
use zakharov_core::io::load_field;
use zakharov_core::{Error, Field, Grid, Result};

use crate::config::{DataSource, Loaded};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    H1,
    L2,
}

/// Builds the field of `src`; file inputs must live on `grid`.
pub fn materialize(loaded: &Loaded, src: &DataSource, grid: &Grid, norm: Norm) -> Result<Field> {
    match src {
        DataSource::Zero => Ok(Field::zeros(grid)),
        DataSource::File { path } => {
            let f: Field = load_field(&loaded.resolve(path))?;
            if f.grid() != grid {
                return Err(Error::InvalidParameter(format!(
                    "{} is on (L, N) = ({}, {}), config grid is ({}, {})",
                    path.display(),
                    f.grid().box_length(),
                    f.grid().n(),
                    grid.box_length(),
                    grid.n()
                )));
            }
            Ok(f)
        }
        DataSource::Gaussian { norm: size, width, center, wavevector } => {
            if !(*width > 0.0) || !(*size >= 0.0) {
                return Err(Error::InvalidParameter(format!("gaussian needs width > 0 and norm >= 0, got {width}, {size}")));
            }
            let g = Field::from_fn(grid, |x| {
                let r2: f64 = (0..3).map(|i| (x[i] - center[i]).powi(2)).sum();
                let phase: f64 = (0..3).map(|i| wavevector[i] * x[i]).sum();
                Complex::from_polar((-r2 / (2.0 * width * width)).exp(), phase)
            });
            let n = match norm {
                Norm::H1 => g.norm_h1(),
                Norm::L2 => g.norm_l2(),
            };
            Ok(g.scale_re(size / n))
        }
    }
}

/// Input files referenced by `src`, for copying into a run directory.
pub fn file_of(src: &DataSource) -> Option<PathBuf> {
    match src {
        DataSource::File { path } => Some(path.clone()),
        _ => None,
    }
}
