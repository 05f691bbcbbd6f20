//! Monte Carlo and deterministic experiments. Each returns a [`FitReport`]
//! (or a time series) that serializes to CSV samples and a JSON summary.

pub mod dispersive;
pub mod fit;
pub mod mismatch;
pub mod moments;
pub mod scattering;
pub mod sobolev;
pub mod wave;

pub use dispersive::{dispersive_decay_mc, DispersiveConfig};
pub use fit::{fit_line, mean_se, Criterion, Estimate, FitReport, FitSpace, LinearFit, SCHEMA_VERSION};
pub use mismatch::{mismatch_decay, MismatchCase};
pub use moments::{
    coefficient_sums, empirical_moment, gaussian_abs_moment, large_deviation_mc, tail_probability_mc, BETAS,
};
pub use scattering::{scattering_residual, ScatteringSeries};
pub use sobolev::{sobolev_embedding_check, Flow, SobolevConfig};
pub use wave::{wave_aniso_mc, wave_block_norm, wave_norm_samples, WaveConfig};

/// Stable experiment ids, as written into reports and file names.
pub const EXPERIMENTS: [&str; 11] = [
    "large_deviation",
    "tail_probability",
    "mismatch_spatial",
    "mismatch_high_low",
    "mismatch_low_high",
    "dispersive_decay",
    "dispersive_decay_deterministic",
    "wave_aniso",
    "sobolev_embedding_schrodinger",
    "sobolev_embedding_half_wave",
    "scattering_residual",
];
