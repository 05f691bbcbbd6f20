//! Random coefficient families and reproducible substreams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution of the multipliers `X_k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    /// `N(0, variance)`.
    Gaussian { variance: f64 },
    /// Symmetric signs `+-bound` with probability 1/2 each.
    Bounded { bound: f64 },
}

/// Family plus master seed. Values are a pure function of
/// `(seed, tag, draw, index)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomModel {
    #[serde(flatten)]
    pub family: Family,
    pub seed: u64,
}

/// Substream namespaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StreamTag {
    Phys,
    Ang,
    Frame,
    Aux,
}

impl StreamTag {
    fn code(self) -> u64 {
        match self {
            StreamTag::Phys => u64::from_le_bytes(*b"phys\0\0\0\0"),
            StreamTag::Ang => u64::from_le_bytes(*b"ang\0\0\0\0\0"),
            StreamTag::Frame => u64::from_le_bytes(*b"frame\0\0\0"),
            StreamTag::Aux => u64::from_le_bytes(*b"aux\0\0\0\0\0"),
        }
    }
}

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable 64-bit identifier of a substream.
pub fn stream_id(seed: u64, tag: StreamTag, draw: u64, index: &[i64]) -> u64 {
    let mut h = splitmix(seed ^ 0x5a4b_5246);
    h = splitmix(h ^ tag.code());
    h = splitmix(h ^ draw);
    for &i in index {
        h = splitmix(h ^ (i as u64));
    }
    splitmix(h ^ index.len() as u64)
}

/// Generator for one substream.
pub fn substream(seed: u64, tag: StreamTag, draw: u64, index: &[i64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_id(seed, tag, draw, index))
}

impl RandomModel {
    pub fn gaussian(variance: f64, seed: u64) -> Result<Self> {
        if !(variance > 0.0) || !variance.is_finite() {
            return Err(Error::InvalidParameter(format!("variance must be positive, got {variance}")));
        }
        Ok(Self { family: Family::Gaussian { variance }, seed })
    }

    pub fn bounded(bound: f64, seed: u64) -> Result<Self> {
        if !(bound > 0.0) || !bound.is_finite() {
            return Err(Error::InvalidParameter(format!("bound must be positive, got {bound}")));
        }
        Ok(Self { family: Family::Bounded { bound }, seed })
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            Family::Gaussian { variance } => Self::gaussian(variance, self.seed).map(|_| ()),
            Family::Bounded { bound } => Self::bounded(bound, self.seed).map(|_| ()),
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..*self }
    }

    pub fn variance(&self) -> f64 {
        match self.family {
            Family::Gaussian { variance } => variance,
            Family::Bounded { bound } => bound * bound,
        }
    }

    /// `c` in `E e^{gamma X} <= e^{c gamma^2}`: `s^2 / 2` for both families
    /// (`cosh(gamma B) <= e^{gamma^2 B^2 / 2}`).
    pub fn mgf_constant(&self) -> f64 {
        self.variance() / 2.0
    }

    /// Draws one value from a generator.
    pub fn draw_from(&self, rng: &mut impl Rng) -> f64 {
        match self.family {
            Family::Gaussian { variance } => {
                let z: f64 = rng.sample(StandardNormal);
                z * variance.sqrt()
            }
            Family::Bounded { bound } => {
                if rng.random::<bool>() {
                    bound
                } else {
                    -bound
                }
            }
        }
    }

    /// `X_index(draw)`.
    pub fn sample(&self, tag: StreamTag, draw: u64, index: &[i64]) -> f64 {
        self.draw_from(&mut substream(self.seed, tag, draw, index))
    }
}

/// Physical-space coefficients `X_k(draw)` for a set of translates.
pub fn sample_coefficients(model: &RandomModel, draw: u64, indices: &[[i64; 3]]) -> Vec<([i64; 3], f64)> {
    indices.iter().map(|k| (*k, model.sample(StreamTag::Phys, draw, k))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_distinct() {
        let m = RandomModel::gaussian(1.0, 42).unwrap();
        let a = m.sample(StreamTag::Phys, 3, &[1, 2, 3]);
        assert_eq!(a, m.sample(StreamTag::Phys, 3, &[1, 2, 3]));
        assert_ne!(a, m.sample(StreamTag::Phys, 3, &[1, 2, 4]));
        assert_ne!(a, m.sample(StreamTag::Ang, 3, &[1, 2, 3]));
        assert_ne!(a, m.sample(StreamTag::Phys, 4, &[1, 2, 3]));
        assert_ne!(stream_id(1, StreamTag::Phys, 0, &[0]), stream_id(1, StreamTag::Phys, 0, &[0, 0]));
    }

    #[test]
    fn clt_mean_bound() {
        let n = 100_000u64;
        for m in [RandomModel::gaussian(2.0, 7).unwrap(), RandomModel::bounded(1.5, 7).unwrap()] {
            let mean = (0..n).map(|d| m.sample(StreamTag::Phys, d, &[0, 0, 0])).sum::<f64>() / n as f64;
            assert!(mean.abs() < 4.0 * m.variance().sqrt() / (n as f64).sqrt(), "{mean}");
        }
    }

    #[test]
    fn gaussian_mgf_bound() {
        let n = 100_000u64;
        let m = RandomModel::gaussian(1.0, 11).unwrap();
        let xs: Vec<f64> = (0..n).map(|d| m.sample(StreamTag::Phys, d, &[5, -1, 2]).exp()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        let se = sd / (n as f64).sqrt();
        let bound = m.mgf_constant().exp();
        assert!(mean <= bound * (1.0 + 5.0 * se / mean));
        // exact value e^{1/2}: the bound is attained for Gaussians
        assert!((mean - bound).abs() < 5.0 * se);
    }

    #[test]
    fn bounded_values() {
        let m = RandomModel::bounded(2.0, 1).unwrap();
        for d in 0..100 {
            assert_eq!(m.sample(StreamTag::Ang, d, &[1]).abs(), 2.0);
        }
        assert!(RandomModel::gaussian(0.0, 1).is_err());
        assert!(RandomModel::bounded(-1.0, 1).is_err());
    }
}
