//! Unit-scale partition of unity and physical-space randomization.

use num_complex::Complex;

use super::model::{RandomModel, StreamTag};
use crate::dyadic::smoothstep;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::scalar::Real;

/// Base bump `phi(r) = S(2 - r)`: 1 on `r <= 1`, 0 on `r >= 2`.
#[inline]
pub fn base_bump(r: f64) -> f64 {
    smoothstep(2.0 - r)
}

/// `psi_k = phi(. - k) / sum_l phi(. - l)` over integer translates `k` in the
/// fundamental box `[-L/2, L/2)^3`, with minimum-image distances.
#[derive(Clone, Debug)]
pub struct PartitionOfUnity<T: Real> {
    grid: GridSpec<T>,
    /// Integer translates along one axis.
    axis_translates: Vec<i64>,
    /// Per grid coordinate: translates within distance 2 and the signed
    /// minimum-image displacement `x - k`.
    near: Vec<Vec<(i64, f64)>>,
    /// `sum_l phi(x - l)` per grid node.
    norm: Vec<f64>,
}

fn wrap_disp(d: f64, l: f64) -> f64 {
    d - l * (d / l).round()
}

impl<T: Real> PartitionOfUnity<T> {
    pub fn new(grid: &GridSpec<T>) -> Result<Self> {
        let l = grid.box_length().as_f64();
        if l < 4.0 {
            return Err(Error::InvalidGrid(format!(
                "box of side {l} holds fewer than 4 unit cells per axis"
            )));
        }
        let lo = (-l / 2.0).ceil() as i64;
        let hi = ((l / 2.0).ceil() as i64) - 1;
        let axis_translates: Vec<i64> = (lo..=hi).collect();
        if axis_translates.len().pow(3) < 27 {
            return Err(Error::InvalidGrid("fewer than 27 translates".into()));
        }
        let n = grid.n();
        let dx = grid.dx().as_f64();
        let near: Vec<Vec<(i64, f64)>> = (0..n)
            .map(|j| {
                let x = crate::grid::wrap_index(j, n) as f64 * dx;
                axis_translates
                    .iter()
                    .filter_map(|&k| {
                        let d = wrap_disp(x - k as f64, l);
                        (d.abs() < 2.0).then_some((k, d))
                    })
                    .collect()
            })
            .collect();
        let mut pou = Self { grid: grid.clone(), axis_translates, near, norm: vec![0.0; grid.len()] };
        let norm: Vec<f64> = (0..grid.len()).map(|idx| pou.bump_sum(idx, |_| 1.0)).collect();
        if norm.iter().any(|&s| s <= 0.0) {
            return Err(Error::InvalidGrid("partition does not cover every node".into()));
        }
        pou.norm = norm;
        Ok(pou)
    }

    fn bump_sum(&self, idx: usize, coeff: impl Fn([i64; 3]) -> f64) -> f64 {
        let [i, j, k] = self.grid.split(idx);
        let mut s = 0.0;
        for &(a, da) in &self.near[i] {
            for &(b, db) in &self.near[j] {
                let r2 = da * da + db * db;
                if r2 >= 4.0 {
                    continue;
                }
                for &(c, dc) in &self.near[k] {
                    let r = (r2 + dc * dc).sqrt();
                    if r < 2.0 {
                        s += coeff([a, b, c]) * base_bump(r);
                    }
                }
            }
        }
        s
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    /// All translates, lexicographic.
    pub fn translates(&self) -> Vec<[i64; 3]> {
        let t = &self.axis_translates;
        let mut out = Vec::with_capacity(t.len().pow(3));
        for &a in t {
            for &b in t {
                for &c in t {
                    out.push([a, b, c]);
                }
            }
        }
        out
    }

    pub fn n_translates(&self) -> usize {
        self.axis_translates.len().pow(3)
    }

    /// `psi_k` on every node (dense).
    pub fn psi(&self, k: [i64; 3]) -> Vec<f64> {
        (0..self.grid.len())
            .map(|idx| self.bump_sum(idx, |l| if l == k { 1.0 } else { 0.0 }) / self.norm[idx])
            .collect()
    }

    /// `psi_k` as a real field.
    pub fn psi_field(&self, k: [i64; 3]) -> SpectralField<T> {
        let data = self.psi(k).into_iter().map(|p| Complex::new(T::of(p), T::zero())).collect();
        SpectralField::from_physical(&self.grid, data).expect("grid-sized")
    }

    /// `W(x) = sum_k X_k psi_k(x)` for coefficients given as a function of `k`.
    pub fn weight(&self, coeff: impl Fn([i64; 3]) -> f64) -> Vec<f64> {
        (0..self.grid.len()).map(|idx| self.bump_sum(idx, &coeff) / self.norm[idx]).collect()
    }
}

/// `f^omega = sum_k X_k(omega) psi_k f`, evaluated node-wise.
pub fn randomize_physical<T: Real>(
    f: &SpectralField<T>,
    pou: &PartitionOfUnity<T>,
    model: &RandomModel,
    draw: u64,
) -> Result<SpectralField<T>> {
    if f.grid() != pou.grid() {
        return Err(Error::GridMismatch);
    }
    let mut cache = std::collections::HashMap::new();
    for k in pou.translates() {
        cache.insert(k, model.sample(StreamTag::Phys, draw, &k));
    }
    Ok(apply_weights(f, pou, |k| cache[&k]))
}

/// `sum_k c(k) psi_k f` for arbitrary coefficients.
pub fn apply_weights<T: Real>(
    f: &SpectralField<T>,
    pou: &PartitionOfUnity<T>,
    coeff: impl Fn([i64; 3]) -> f64,
) -> SpectralField<T> {
    let w = pou.weight(coeff);
    let vals = f.values();
    let data = vals.iter().zip(&w).map(|(z, &w)| *z * T::of(w)).collect();
    SpectralField::from_physical(f.grid(), data).expect("grid-sized")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomize::model::RandomModel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn smooth(g: &GridSpec<f64>) -> SpectralField<f64> {
        SpectralField::from_fn(g, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            Complex::new((-r2 / 8.0).exp(), 0.3 * x[0] * (-r2 / 6.0).exp())
        })
    }

    #[test]
    fn sums_to_one_and_local() {
        for &(l, n) in &[(12.0, 24usize), (9.5, 16), (16.0 * std::f64::consts::PI, 32)] {
            let g = GridSpec::new(l, n).unwrap();
            let pou = PartitionOfUnity::new(&g).unwrap();
            let ones = pou.weight(|_| 1.0);
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            for _ in 0..100 {
                let idx = rng.random_range(0..g.len());
                assert!((ones[idx] - 1.0).abs() < 1e-12);
            }
            let k = [1, -2, 0];
            let psi = pou.psi(k);
            assert!(psi[g.lattice_index([0, 0, 0])] >= 0.0);
            for (idx, &p) in psi.iter().enumerate() {
                assert!(p >= 0.0);
                let x = g.position(idx);
                let d: f64 = (0..3).map(|a| wrap_disp(x[a] - k[a] as f64, l).powi(2)).sum::<f64>().sqrt();
                if d >= 2.0 {
                    assert_eq!(p, 0.0);
                }
            }
        }
    }

    #[test]
    fn psi_positive_at_centre() {
        let g = GridSpec::new(8.0, 16).unwrap();
        let pou = PartitionOfUnity::new(&g).unwrap();
        // dx = 1/2, so the translate centre is a node
        let psi = pou.psi([1, 1, -1]);
        assert!(psi[g.lattice_index([2, 2, -2])] > 0.0);
    }

    #[test]
    fn tiny_box_rejected() {
        let g = GridSpec::new(3.0, 8).unwrap();
        assert!(PartitionOfUnity::new(&g).is_err());
    }

    #[test]
    fn unit_coefficients_and_zero_field() {
        let g = GridSpec::new(10.0, 16).unwrap();
        let pou = PartitionOfUnity::new(&g).unwrap();
        let f = smooth(&g);
        assert!(apply_weights(&f, &pou, |_| 1.0).rel_l2_dist(&f) < 1e-12);
        let m = RandomModel::gaussian(1.0, 3).unwrap();
        assert_eq!(randomize_physical(&SpectralField::zeros(&g), &pou, &m, 0).unwrap().norm_l2(), 0.0);
    }

    #[test]
    fn linear_in_f() {
        let g = GridSpec::new(10.0, 16).unwrap();
        let pou = PartitionOfUnity::new(&g).unwrap();
        let m = RandomModel::bounded(1.0, 3).unwrap();
        let f = smooth(&g);
        let h = f.map_physical(|z| z * z);
        let lhs = randomize_physical(&f.add(&h.scale_re(2.0)), &pou, &m, 5).unwrap();
        let rhs = randomize_physical(&f, &pou, &m, 5)
            .unwrap()
            .add(&randomize_physical(&h, &pou, &m, 5).unwrap().scale_re(2.0));
        assert!(lhs.rel_l2_dist(&rhs) < 1e-13);
    }

    #[test]
    fn monte_carlo_energy_matches_block_sum() {
        let g = GridSpec::new(8.0, 16).unwrap();
        let pou = PartitionOfUnity::new(&g).unwrap();
        let f = smooth(&g);
        let oracle: f64 = pou
            .translates()
            .iter()
            .map(|&k| {
                let p = pou.psi(k);
                f.values().iter().zip(&p).map(|(z, w)| (z * w).norm_sqr()).sum::<f64>()
            })
            .sum::<f64>()
            * g.dx().powi(3);
        let m = RandomModel::gaussian(1.0, 9).unwrap();
        let xs: Vec<f64> = (0..200).map(|d| randomize_physical(&f, &pou, &m, d).unwrap().norm_l2().powi(2)).collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let se = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() / n.sqrt();
        assert!((mean - oracle).abs() < 3.0 * se, "{mean} vs {oracle} (se {se})");
    }
}
