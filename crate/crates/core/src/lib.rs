//! Pseudospectral toolkit for the randomized final-state problem of the
//! three-dimensional Zakharov system
//!
//! ```text
//! i u_t + Delta u = Re(v) u,     i v_t + alpha |grad| v = -alpha |grad| |u|^2
//! ```
//!
//! on a periodic box standing in for R^3.

pub mod diagnostics;
pub mod dyadic;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod normal_form;
pub mod quadrature;
pub mod randomize;
pub mod scalar;
pub mod solver;
pub mod trajectory;
pub mod trig;

pub use error::{Error, Result};
pub use field::{Side, SpectralField};
pub use grid::GridSpec;
pub use scalar::Real;
pub use trajectory::{Provenance, Trajectory};

/// Double-precision grid.
pub type Grid = GridSpec<f64>;
/// Double-precision field.
pub type Field = SpectralField<f64>;
/// Single-precision grid.
pub type Grid32 = GridSpec<f32>;
/// Single-precision field.
pub type Field32 = SpectralField<f32>;
