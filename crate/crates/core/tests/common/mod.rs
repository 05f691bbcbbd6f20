#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex;
use zakharov_core::solver::PicardOptions;
use zakharov_core::{Field, Grid};

pub type Cx = Complex<f64>;

pub fn gaussian(g: &Grid, c: [f64; 3], w: f64) -> Field {
    Field::from_fn(g, |x| {
        let r2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + (x[2] - c[2]).powi(2);
        Cx::new((-r2 / (2.0 * w * w)).exp(), 0.0)
    })
}

/// Grid of the small-data final-state fixture.
pub fn picard_grid() -> Grid {
    Grid::new(8.0 * PI, 16).unwrap()
}

/// Final data with `||u_+||_{H^1} = ||v_+||_{L^2} = size / 2`.
pub fn picard_data(g: &Grid, size: f64) -> (Field, Field) {
    let u = Field::from_fn(g, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        Cx::from_polar((-r2 / 4.0).exp(), 0.5 * x[0])
    });
    let v = Field::from_fn(g, |x| {
        let r2 = (x[0] - 1.0).powi(2) + x[1] * x[1] + x[2] * x[2];
        Cx::new(1.0, 0.3) * (-r2 / 3.0).exp()
    });
    (u.scale_re(0.5 * size / u.norm_h1()), v.scale_re(0.5 * size / v.norm_l2()))
}

/// `alpha = 1/32` on `[2, 6]` with `dt = 0.1`.
pub fn picard_options() -> PicardOptions {
    PicardOptions::new(1.0 / 32.0, 2.0, 6.0, 0.1)
}
