//! Periodic box discretisation of R^3 and the 3D transform.
//!
//! Coefficients are Fourier-series amplitudes: `f(x) = sum_xi a_xi e^{i xi.x}`,
//! so `a = FFT(f) / N^3` and the L2 norm is `sqrt(L^3 sum |a|^2)`.
//! Physical index `j` sits at coordinate `wrap(j) * dx` with the origin at index 0.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

struct Inner<T: Real> {
    l: T,
    n: usize,
    k_min: i32,
    k_max: i32,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    xi_abs: Vec<T>,
}

/// Box side length, points per axis and the derived frequency/dyadic ranges.
///
/// Cheap to clone; FFT plans and the `|xi|` table are shared.
#[derive(Clone)]
pub struct GridSpec<T: Real> {
    inner: Arc<Inner<T>>,
}

impl<T: Real> fmt::Debug for GridSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridSpec")
            .field("L", &self.inner.l)
            .field("N", &self.inner.n)
            .field("k_min", &self.inner.k_min)
            .field("k_max", &self.inner.k_max)
            .finish()
    }
}

impl<T: Real> PartialEq for GridSpec<T> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n == other.inner.n && self.inner.l == other.inner.l)
    }
}

/// Lattice wrap: index `j` in `0..n` to the signed integer in `-n/2..n/2`.
#[inline]
pub fn wrap_index(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Inverse of [`wrap_index`] (periodic).
#[inline]
pub fn unwrap_index(m: i64, n: usize) -> usize {
    m.rem_euclid(n as i64) as usize
}

impl<T: Real> GridSpec<T> {
    /// Builds the grid for box side `l` with `n` points per axis.
    pub fn new(l: T, n: usize) -> Result<Self> {
        if !(l > T::zero()) || !l.is_finite() {
            return Err(Error::InvalidGrid(format!("box length must be positive, got {l}")));
        }
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and at least 8, got {n}"
            )));
        }
        let dk = (T::TAU() / l).as_f64();
        let max_xi = dk * (n / 2) as f64;
        let k_max = (max_xi * 5.0 / 8.0).log2().floor() as i32;
        let k_min = (dk * 5.0 / 8.0).log2().floor() as i32 + 1;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let dkt = T::TAU() / l;
        let mut xi_abs = Vec::with_capacity(n * n * n);
        for i in 0..n {
            let a = T::of(wrap_index(i, n) as f64) * dkt;
            for j in 0..n {
                let b = T::of(wrap_index(j, n) as f64) * dkt;
                for k in 0..n {
                    let c = T::of(wrap_index(k, n) as f64) * dkt;
                    xi_abs.push((a * a + b * b + c * c).sqrt());
                }
            }
        }
        Ok(Self { inner: Arc::new(Inner { l, n, k_min, k_max, fwd, inv, xi_abs }) })
    }

    pub fn box_length(&self) -> T {
        self.inner.l
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    /// Total number of lattice points, `N^3`.
    pub fn len(&self) -> usize {
        self.inner.n.pow(3)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lattice spacing in frequency, `2 pi / L`.
    pub fn dk(&self) -> T {
        T::TAU() / self.inner.l
    }

    /// Physical grid spacing, `L / N`.
    pub fn dx(&self) -> T {
        self.inner.l / T::of(self.inner.n as f64)
    }

    pub fn volume(&self) -> T {
        self.inner.l.powi(3)
    }

    /// Per-axis maximum frequency magnitude, `(N/2) dk`.
    pub fn max_xi(&self) -> T {
        self.dk() * T::of((self.inner.n / 2) as f64)
    }

    /// Largest `|xi|` on the lattice (box corner).
    pub fn max_xi_corner(&self) -> T {
        self.max_xi() * T::of(3f64.sqrt())
    }

    pub fn k_min(&self) -> i32 {
        self.inner.k_min
    }

    pub fn k_max(&self) -> i32 {
        self.inner.k_max
    }

    /// Inclusive dyadic range `k_min..=k_max`.
    pub fn dyadic_range(&self) -> std::ops::RangeInclusive<i32> {
        self.inner.k_min..=self.inner.k_max
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let n = self.inner.n;
        (i * n + j) * n + k
    }

    #[inline]
    pub fn split(&self, idx: usize) -> [usize; 3] {
        let n = self.inner.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    /// Integer lattice vector (in units of `dk`) at flat index.
    #[inline]
    pub fn lattice(&self, idx: usize) -> [i64; 3] {
        let n = self.inner.n;
        let [i, j, k] = self.split(idx);
        [wrap_index(i, n), wrap_index(j, n), wrap_index(k, n)]
    }

    /// Flat index of an integer lattice vector, periodically wrapped.
    #[inline]
    pub fn lattice_index(&self, m: [i64; 3]) -> usize {
        let n = self.inner.n;
        self.index(unwrap_index(m[0], n), unwrap_index(m[1], n), unwrap_index(m[2], n))
    }

    /// Whether the lattice vector lies inside the stored range `-N/2..N/2-1`.
    #[inline]
    pub fn in_lattice(&self, m: [i64; 3]) -> bool {
        let h = (self.inner.n / 2) as i64;
        m.iter().all(|&c| (-h..h).contains(&c))
    }

    #[inline]
    pub fn xi(&self, idx: usize) -> [T; 3] {
        let m = self.lattice(idx);
        let dk = self.dk();
        [T::of(m[0] as f64) * dk, T::of(m[1] as f64) * dk, T::of(m[2] as f64) * dk]
    }

    #[inline]
    pub fn xi_abs(&self, idx: usize) -> T {
        self.inner.xi_abs[idx]
    }

    /// Table of `|xi|` in flat index order.
    pub fn xi_abs_table(&self) -> &[T] {
        &self.inner.xi_abs
    }

    /// Physical position of a flat index (origin at index 0, wrapped).
    #[inline]
    pub fn position(&self, idx: usize) -> [T; 3] {
        let m = self.lattice(idx);
        let dx = self.dx();
        [T::of(m[0] as f64) * dx, T::of(m[1] as f64) * dx, T::of(m[2] as f64) * dx]
    }

    /// Whether the flat index is an unmatched `-N/2` mode along any axis.
    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let h = (self.inner.n / 2) as i64;
        self.lattice(idx).iter().any(|&c| c == -h)
    }

    /// Step bound for the split-step solver: the fastest linear phase
    /// advances by at most pi per step.
    pub fn dt_stability(&self, alpha: T) -> T {
        let k = self.max_xi_corner();
        T::PI() / (k * k + alpha * k)
    }

    /// Time for a Schrodinger packet at the highest resolved frequency
    /// (group velocity `2|xi|`) to cross half the box.
    pub fn wrap_time(&self) -> T {
        self.inner.l / (T::of(4.0) * self.max_xi())
    }

    /// Physical values to Fourier-series amplitudes, in place.
    pub fn forward(&self, buf: &mut [Complex<T>]) {
        self.fft3(buf, &self.inner.fwd);
        let s = T::one() / T::of(self.len() as f64);
        for z in buf.iter_mut() {
            *z = *z * s;
        }
    }

    /// Fourier-series amplitudes to physical values, in place.
    pub fn inverse(&self, buf: &mut [Complex<T>]) {
        self.fft3(buf, &self.inner.inv);
    }

    fn fft3(&self, buf: &mut [Complex<T>], fft: &Arc<dyn Fft<T>>) {
        let n = self.inner.n;
        assert_eq!(buf.len(), n * n * n, "buffer does not match grid");
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(buf, &mut scratch);
        let mut tmp = vec![Complex::new(T::zero(), T::zero()); n * n];
        for i in 0..n {
            let plane = &mut buf[i * n * n..(i + 1) * n * n];
            for j in 0..n {
                for k in 0..n {
                    tmp[k * n + j] = plane[j * n + k];
                }
            }
            fft.process_with_scratch(&mut tmp, &mut scratch);
            for j in 0..n {
                for k in 0..n {
                    plane[j * n + k] = tmp[k * n + j];
                }
            }
        }
        for j in 0..n {
            for i in 0..n {
                for k in 0..n {
                    tmp[k * n + i] = buf[(i * n + j) * n + k];
                }
            }
            fft.process_with_scratch(&mut tmp, &mut scratch);
            for i in 0..n {
                for k in 0..n {
                    buf[(i * n + j) * n + k] = tmp[k * n + i];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn dyadic_range_examples() {
        let g = GridSpec::<f64>::new(2.0 * PI, 16).unwrap();
        assert!((g.dk() - 1.0).abs() < 1e-15);
        assert_eq!(g.k_max(), 2);
        assert_eq!(GridSpec::<f64>::new(2.0 * PI, 8).unwrap().k_max(), 1);
        assert!(GridSpec::<f64>::new(2.0 * PI, 7).is_err());
        assert!(GridSpec::<f64>::new(2.0 * PI, 6).is_err());
        assert!(GridSpec::<f64>::new(-1.0, 16).is_err());
    }

    #[test]
    fn dyadic_range_invariants() {
        for &(l, n) in &[(2.0 * PI, 8), (16.0 * PI, 64), (4.0, 96), (8.0 * PI, 16)] {
            let g = GridSpec::<f64>::new(l, n).unwrap();
            assert!(2f64.powi(g.k_max()) * 1.6 <= g.max_xi() + 1e-12);
            assert!(g.k_min() as f64 >= g.dk().log2() - 1.0);
            assert!(g.k_min() <= g.k_max());
        }
    }

    #[test]
    fn wrap_roundtrip() {
        for n in [8usize, 10, 64] {
            for j in 0..n {
                assert_eq!(unwrap_index(wrap_index(j, n), n), j);
            }
        }
    }

    #[test]
    fn fft_matches_direct_dft_on_small_grid() {
        let g = GridSpec::<f64>::new(3.0, 8).unwrap();
        let mut buf: Vec<Complex<f64>> = (0..g.len())
            .map(|i| Complex::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let orig = buf.clone();
        g.forward(&mut buf);
        let n = 8;
        for &probe in &[0usize, 1, 77, 300, 511] {
            let [a, b, c] = g.split(probe);
            let mut s = Complex::new(0.0, 0.0);
            for (idx, v) in orig.iter().enumerate() {
                let [i, j, k] = g.split(idx);
                let ph = -2.0 * PI * ((a * i + b * j + c * k) as f64) / n as f64;
                s += v * Complex::new(ph.cos(), ph.sin());
            }
            s /= (n * n * n) as f64;
            assert!((s - buf[probe]).norm() < 1e-12);
        }
        g.inverse(&mut buf);
        for (x, y) in buf.iter().zip(&orig) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}
