//! Quadrature rules: Gauss-Legendre, product rules on S^2, radial shells.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, exact to degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let m = 0.5 * (b + a);
    (x.iter().map(|t| m + h * t).collect(), w.iter().map(|t| t * h).collect())
}

/// Product rule on the unit sphere: Gauss-Legendre in `cos(theta)` times a
/// uniform rule in `phi`. Nodes are grouped in rings of constant `theta`.
#[derive(Clone, Debug)]
pub struct SphereRule {
    degree: usize,
    cos_theta: Vec<f64>,
    ring_weights: Vec<f64>,
    n_phi: usize,
}

impl SphereRule {
    /// Rule integrating spherical harmonics of degree `<= degree` exactly.
    pub fn new(degree: usize) -> Self {
        let n_theta = degree / 2 + 1;
        let n_phi = degree + 1;
        let (ct, w) = gauss_legendre(n_theta);
        let dphi = 2.0 * PI / n_phi as f64;
        Self { degree, cos_theta: ct, ring_weights: w.iter().map(|x| x * dphi).collect(), n_phi }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_rings(&self) -> usize {
        self.cos_theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn len(&self) -> usize {
        self.cos_theta.len() * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cos_theta(&self, ring: usize) -> f64 {
        self.cos_theta[ring]
    }

    pub fn phi(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_phi as f64
    }

    /// Weight of every node on `ring`.
    pub fn weight(&self, ring: usize) -> f64 {
        self.ring_weights[ring]
    }

    /// Unit vectors in ring-major order.
    pub fn nodes(&self) -> Vec<[f64; 3]> {
        let mut out = Vec::with_capacity(self.len());
        for &c in &self.cos_theta {
            let s = (1.0 - c * c).max(0.0).sqrt();
            for j in 0..self.n_phi {
                let p = self.phi(j);
                out.push([s * p.cos(), s * p.sin(), c]);
            }
        }
        out
    }

    /// Weights in the same order as [`Self::nodes`].
    pub fn weights(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for &w in &self.ring_weights {
            out.extend(std::iter::repeat_n(w, self.n_phi));
        }
        out
    }
}

/// Radial shells and angular nodes for the radial-angular norms.
///
/// `radial_weights` already contain the `r^2` Jacobian, so
/// `sum_i w_i g(r_i)` approximates `int_0^R g(r) r^2 dr`.
#[derive(Clone, Debug)]
pub struct AngularQuadrature {
    pub radii: Vec<f64>,
    pub radial_weights: Vec<f64>,
    pub sphere: SphereRule,
}

impl AngularQuadrature {
    /// Composite trapezoid on `[0, r_max]` with `n_r` intervals.
    pub fn new(r_max: f64, n_r: usize, degree: usize) -> Self {
        assert!(n_r >= 1 && r_max > 0.0);
        let h = r_max / n_r as f64;
        let radii: Vec<f64> = (1..=n_r).map(|i| i as f64 * h).collect();
        let radial_weights = radii
            .iter()
            .enumerate()
            .map(|(i, r)| if i + 1 == n_r { 0.5 * h * r * r } else { h * r * r })
            .collect();
        Self { radii, radial_weights, sphere: SphereRule::new(degree) }
    }

    /// Rule adapted to content of frequency up to `k_band` on the ball of
    /// radius `r_max`: angular degree `ceil(k_band r_max) + 3` and a radial
    /// step resolving the same band with `points_per_wavelength`.
    pub fn adapted(k_band: f64, r_max: f64, points_per_wavelength: f64) -> Self {
        let degree = (k_band * r_max).ceil() as usize + 3;
        let n_r = ((k_band * r_max * points_per_wavelength) / (2.0 * PI)).ceil().max(8.0) as usize;
        Self::new(r_max, n_r, degree)
    }

    pub fn degree(&self) -> usize {
        self.sphere.degree()
    }

    pub fn r_max(&self) -> f64 {
        *self.radii.last().expect("nonempty radial rule")
    }
}
