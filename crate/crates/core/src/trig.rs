//! Off-lattice evaluation of lattice sums `E(y) = sum_m c_m e^{i s h m.y}`.
//!
//! With `c = a` (amplitudes), `h = dk`, `s = +1` this is trigonometric
//! interpolation of a field; with `c = f dx^3`, `h = dx`, `s = -1` it is the
//! continuous Fourier transform of the band-limited interpolant sampled on
//! the grid. Points are supplied in rings of common `z`, which lets the
//! `z`-sum be shared: cost `N^3` per ring plus `N^2` per point.

use num_complex::Complex;

use crate::field::{Side, SpectralField};
use crate::grid::wrap_index;
use crate::scalar::Real;

/// Points sharing one `z` coordinate.
#[derive(Clone, Debug)]
pub struct Ring {
    pub z: f64,
    pub xy: Vec<[f64; 2]>,
}

/// Precomputed lattice sum over an `N^3` coefficient array.
pub struct LatticeSum {
    n: usize,
    h: f64,
    sign: f64,
    c: Vec<Complex<f64>>,
    m: Vec<f64>,
}

impl LatticeSum {
    /// Trigonometric interpolant of a field.
    pub fn interpolant<T: Real>(f: &SpectralField<T>) -> Self {
        let g = f.grid();
        let a = f.coefficients();
        Self::new(g.n(), g.dk().as_f64(), 1.0, a.iter().map(|z| Complex::new(z.re.as_f64(), z.im.as_f64())).collect())
    }

    /// Continuous Fourier transform `F(zeta) = int f(x) e^{-i zeta.x} dx`
    /// of the grid function, by the rectangle rule.
    pub fn fourier_transform<T: Real>(f: &SpectralField<T>) -> Self {
        let g = f.grid();
        let vals = if f.side() == Side::Physical { f.data().to_vec() } else { f.values() };
        let w = g.dx().as_f64().powi(3);
        Self::new(
            g.n(),
            g.dx().as_f64(),
            -1.0,
            vals.iter().map(|z| Complex::new(z.re.as_f64() * w, z.im.as_f64() * w)).collect(),
        )
    }

    pub fn new(n: usize, h: f64, sign: f64, c: Vec<Complex<f64>>) -> Self {
        assert_eq!(c.len(), n * n * n);
        let m = (0..n).map(|j| wrap_index(j, n) as f64).collect();
        Self { n, h, sign, c, m }
    }

    fn phases(&self, y: f64) -> Vec<Complex<f64>> {
        let t = self.sign * self.h * y;
        self.m.iter().map(|&m| Complex::from_polar(1.0, t * m)).collect()
    }

    /// Values at every point of every ring, ring-major.
    pub fn eval_rings(&self, rings: &[Ring]) -> Vec<Vec<Complex<f64>>> {
        let n = self.n;
        let mut b = vec![Complex::new(0.0, 0.0); n * n];
        let mut col = vec![Complex::new(0.0, 0.0); n];
        rings
            .iter()
            .map(|ring| {
                let ez = self.phases(ring.z);
                for (ij, bb) in b.iter_mut().enumerate() {
                    let row = &self.c[ij * n..(ij + 1) * n];
                    *bb = row.iter().zip(&ez).map(|(c, e)| c * e).sum();
                }
                ring.xy
                    .iter()
                    .map(|&[x, y]| {
                        let ey = self.phases(y);
                        let ex = self.phases(x);
                        for (i, cc) in col.iter_mut().enumerate() {
                            *cc = b[i * n..(i + 1) * n].iter().zip(&ey).map(|(b, e)| b * e).sum();
                        }
                        col.iter().zip(&ex).map(|(c, e)| c * e).sum()
                    })
                    .collect()
            })
            .collect()
    }

    /// Value at a single point.
    pub fn eval(&self, p: [f64; 3]) -> Complex<f64> {
        self.eval_rings(&[Ring { z: p[2], xy: vec![[p[0], p[1]]] }])[0][0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn interpolant_hits_nodes_and_plane_waves() {
        let g = GridSpec::<f64>::new(5.0, 8).unwrap();
        let f = SpectralField::plane_wave(&g, [1, -2, 3], Complex::new(0.5, 0.25));
        let ls = LatticeSum::interpolant(&f);
        let p = [0.3, -1.7, 2.2];
        let xi = [1.0, -2.0, 3.0].map(|m: f64| m * g.dk());
        let ph = xi[0] * p[0] + xi[1] * p[1] + xi[2] * p[2];
        let exact = Complex::new(0.5, 0.25) * Complex::from_polar(1.0, ph);
        assert!((ls.eval(p) - exact).norm() < 1e-13);
    }

    #[test]
    fn fourier_transform_of_gaussian() {
        let g = GridSpec::<f64>::new(20.0, 48).unwrap();
        let f = SpectralField::from_fn(&g, |x| Complex::new((-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2.0).exp(), 0.0));
        let ls = LatticeSum::fourier_transform(&f);
        let z = [0.4, 1.1, -0.7];
        let k2 = z.iter().map(|t| t * t).sum::<f64>();
        let exact = (2.0 * std::f64::consts::PI).powf(1.5) * (-k2 / 2.0).exp();
        assert!((ls.eval(z).re - exact).abs() < 1e-10);
    }
}
