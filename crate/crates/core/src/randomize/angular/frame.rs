//! Good frames: Haar-random orthonormal bases of each harmonic eigenspace
//! with measured `L^q(S^2)` certificates.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::harmonics::{count_upto, offset, real_harmonics};
use crate::error::{Error, Result};
use crate::quadrature::SphereRule;
use crate::randomize::model::{substream, StreamTag};

/// Exponents at which frame growth is certified.
pub const CERT_EXPONENTS: [f64; 4] = [2.0, 4.0, 8.0, 16.0];

/// Construction parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameOptions {
    pub k_deg_max: usize,
    /// Degree of the analysis rule on S^2; must be at least `2 k_deg_max`.
    pub quad_degree: usize,
    /// Largest acceptable `C_frame`.
    pub cap: f64,
    pub max_attempts: usize,
}

impl Default for FrameOptions {
    fn default() -> Self {
        Self { k_deg_max: 15, quad_degree: 33, cap: 1.0, max_attempts: 5 }
    }
}

impl FrameOptions {
    pub fn with_degree(k_deg_max: usize) -> Self {
        Self { k_deg_max, quad_degree: 2 * k_deg_max + 3, ..Self::default() }
    }
}

/// Measured norms of the frame functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameCertificate {
    /// `max_l ||b_{k,l}||_{L^q}` per degree `k` (rows) and exponent (columns).
    pub lq_max: Vec<[f64; 4]>,
    /// `max_l ||b_{k,l}||_{L^inf}` per degree, sampled on the certificate rule.
    pub linf_max: Vec<f64>,
    /// `max_{k,l,q} ||b_{k,l}||_{L^q} / sqrt(q)`.
    pub c_frame: f64,
    pub cert_degree: usize,
}

/// Per-degree orthonormal bases `b_{k,l} = sum_m O^k_{l,m} Y_{k,m}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GoodFrame {
    pub k_deg_max: usize,
    pub seed: u64,
    /// Attempt index that produced the accepted frame (0-based).
    pub attempt: usize,
    /// Row-major `(2k+1) x (2k+1)` mixing matrices.
    pub mixing: Vec<Vec<f64>>,
    pub certificate: FrameCertificate,
    pub quad_degree: usize,
    #[serde(skip)]
    analysis: Option<AnalysisNodes>,
}

/// Frame functions tabulated on the analysis sphere rule.
#[derive(Clone, Debug)]
pub struct AnalysisNodes {
    pub rule: SphereRule,
    /// `values[node * n_funcs + idx]`
    pub values: Vec<f64>,
}

/// Haar-distributed orthogonal matrix: Gram-Schmidt on a Gaussian matrix.
fn haar_orthogonal(n: usize, rng: &mut impl rand::Rng) -> Vec<f64> {
    loop {
        let mut a: Vec<f64> = (0..n * n).map(|_| StandardNormal.sample(rng)).collect();
        let mut ok = true;
        for i in 0..n {
            for _ in 0..2 {
                for j in 0..i {
                    let d: f64 = (0..n).map(|c| a[i * n + c] * a[j * n + c]).sum();
                    for c in 0..n {
                        a[i * n + c] -= d * a[j * n + c];
                    }
                }
            }
            let nrm: f64 = (0..n).map(|c| a[i * n + c].powi(2)).sum::<f64>().sqrt();
            if nrm < 1e-8 {
                ok = false;
                break;
            }
            for c in 0..n {
                a[i * n + c] /= nrm;
            }
        }
        if ok {
            return a;
        }
    }
}

impl GoodFrame {
    /// Number of functions `sum_k (2k+1)`.
    pub fn n_funcs(&self) -> usize {
        count_upto(self.k_deg_max)
    }

    /// `N_k = 2k + 1`.
    pub fn dim(&self, k: usize) -> usize {
        2 * k + 1
    }

    /// Flat index of `b_{k,l}`, `l = 1..=2k+1`.
    pub fn index(&self, k: usize, l: usize) -> usize {
        assert!(l >= 1 && l <= 2 * k + 1);
        offset(k) + l - 1
    }

    /// Inverse of [`Self::index`].
    pub fn label(&self, idx: usize) -> (usize, usize) {
        let k = (idx as f64).sqrt().floor() as usize;
        (k, idx - k * k + 1)
    }

    /// Frame values at a direction given by `(cos theta, phi)`.
    pub fn eval_into(&self, x: f64, phi: f64, scratch: &mut [f64], out: &mut [f64]) {
        real_harmonics(self.k_deg_max, x, phi, scratch);
        for k in 0..=self.k_deg_max {
            let d = 2 * k + 1;
            let o = &self.mixing[k];
            let base = offset(k);
            for l in 0..d {
                out[base + l] = (0..d).map(|m| o[l * d + m] * scratch[base + m]).sum();
            }
        }
    }

    /// Frame values at a unit vector.
    pub fn eval(&self, dir: [f64; 3]) -> Vec<f64> {
        let r = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
        let x = if r > 0.0 { dir[2] / r } else { 1.0 };
        let phi = dir[1].atan2(dir[0]);
        let mut s = vec![0.0; self.n_funcs()];
        let mut out = vec![0.0; self.n_funcs()];
        self.eval_into(x, phi, &mut s, &mut out);
        out
    }

    /// Tabulation on the analysis rule (built on first use).
    pub fn analysis(&mut self) -> &AnalysisNodes {
        if self.analysis.is_none() {
            self.analysis = Some(self.tabulate(SphereRule::new(self.quad_degree)));
        }
        self.analysis.as_ref().expect("just built")
    }

    /// Tabulation on the analysis rule without caching.
    pub fn analysis_nodes(&self) -> AnalysisNodes {
        match &self.analysis {
            Some(a) => a.clone(),
            None => self.tabulate(SphereRule::new(self.quad_degree)),
        }
    }

    fn tabulate(&self, rule: SphereRule) -> AnalysisNodes {
        let nf = self.n_funcs();
        let mut values = vec![0.0; rule.len() * nf];
        let mut s = vec![0.0; nf];
        let mut node = 0;
        for ring in 0..rule.n_rings() {
            let x = rule.cos_theta(ring);
            for j in 0..rule.n_phi() {
                self.eval_into(x, rule.phi(j), &mut s, &mut values[node * nf..(node + 1) * nf]);
                node += 1;
            }
        }
        AnalysisNodes { rule, values }
    }

    /// Gram matrix of degree `k` on the analysis rule.
    pub fn gram(&self, k: usize) -> Vec<f64> {
        let a = self.analysis_nodes();
        let nf = self.n_funcs();
        let d = 2 * k + 1;
        let base = offset(k);
        let w = a.rule.weights();
        let mut g = vec![0.0; d * d];
        for (node, &wj) in w.iter().enumerate() {
            let v = &a.values[node * nf + base..node * nf + base + d];
            for i in 0..d {
                for j in 0..d {
                    g[i * d + j] += wj * v[i] * v[j];
                }
            }
        }
        g
    }

    fn certify(&self) -> FrameCertificate {
        // |b|^16 has degree 16 k: the rule integrates it exactly
        let cert_degree = 16 * self.k_deg_max.max(1);
        let a = self.tabulate(SphereRule::new(cert_degree));
        let nf = self.n_funcs();
        let w = a.rule.weights();
        let mut sums = vec![[0.0f64; 4]; nf];
        let mut sup = vec![0.0f64; nf];
        for (node, &wj) in w.iter().enumerate() {
            for (idx, (s, m)) in sums.iter_mut().zip(sup.iter_mut()).enumerate() {
                let b = a.values[node * nf + idx].abs();
                *m = m.max(b);
                let b2 = b * b;
                let b4 = b2 * b2;
                let b8 = b4 * b4;
                s[0] += wj * b2;
                s[1] += wj * b4;
                s[2] += wj * b8;
                s[3] += wj * b8 * b8;
            }
        }
        let mut lq_max = vec![[0.0; 4]; self.k_deg_max + 1];
        let mut linf_max = vec![0.0; self.k_deg_max + 1];
        let mut c_frame: f64 = 0.0;
        for (idx, s) in sums.iter().enumerate() {
            let (k, _) = self.label(idx);
            for (qi, &q) in CERT_EXPONENTS.iter().enumerate() {
                let norm = s[qi].powf(1.0 / q);
                lq_max[k][qi] = f64::max(lq_max[k][qi], norm);
                c_frame = c_frame.max(norm / q.sqrt());
            }
            linf_max[k] = f64::max(linf_max[k], sup[idx]);
        }
        FrameCertificate { lq_max, linf_max, c_frame, cert_degree }
    }

    /// Reassembles a stored frame, checking the matrix shapes.
    pub fn from_parts(
        k_deg_max: usize,
        seed: u64,
        attempt: usize,
        mixing: Vec<Vec<f64>>,
        certificate: FrameCertificate,
        quad_degree: usize,
    ) -> Result<Self> {
        if mixing.len() != k_deg_max + 1 {
            return Err(Error::Format(format!("{} mixing matrices for degree {k_deg_max}", mixing.len())));
        }
        if let Some(k) = mixing.iter().enumerate().position(|(k, m)| m.len() != (2 * k + 1).pow(2)) {
            return Err(Error::Format(format!("mixing matrix of degree {k} has the wrong size")));
        }
        if quad_degree < 2 * k_deg_max {
            return Err(Error::QuadratureDegree { required: 2 * k_deg_max, available: quad_degree });
        }
        Ok(Self { k_deg_max, seed, attempt, mixing, certificate, quad_degree, analysis: None })
    }

    /// Frame whose mixing matrices are identities (the reference harmonics).
    pub fn reference(k_deg_max: usize) -> Self {
        let mixing = (0..=k_deg_max)
            .map(|k| {
                let d = 2 * k + 1;
                (0..d * d).map(|i| if i / d == i % d { 1.0 } else { 0.0 }).collect()
            })
            .collect();
        let mut f = Self {
            k_deg_max,
            seed: 0,
            attempt: 0,
            mixing,
            certificate: FrameCertificate { lq_max: vec![], linf_max: vec![], c_frame: 0.0, cert_degree: 0 },
            quad_degree: 2 * k_deg_max + 3,
            analysis: None,
        };
        f.certificate = f.certify();
        f
    }
}

/// Draws Haar-random bases per degree, certifies them, and retries on a new
/// substream while `C_frame` exceeds the cap.
pub fn build_good_frame(opts: &FrameOptions, seed: u64) -> Result<GoodFrame> {
    if opts.quad_degree < 2 * opts.k_deg_max {
        return Err(Error::QuadratureDegree { required: 2 * opts.k_deg_max, available: opts.quad_degree });
    }
    let mut best = f64::INFINITY;
    for attempt in 0..opts.max_attempts.max(1) {
        let mixing = (0..=opts.k_deg_max)
            .map(|k| {
                let mut rng = substream(seed, StreamTag::Frame, attempt as u64, &[k as i64]);
                haar_orthogonal(2 * k + 1, &mut rng)
            })
            .collect();
        let mut frame = GoodFrame {
            k_deg_max: opts.k_deg_max,
            seed,
            attempt,
            mixing,
            certificate: FrameCertificate { lq_max: vec![], linf_max: vec![], c_frame: 0.0, cert_degree: 0 },
            quad_degree: opts.quad_degree,
            analysis: None,
        };
        frame.certificate = frame.certify();
        if frame.certificate.c_frame <= opts.cap {
            return Ok(frame);
        }
        best = best.min(frame.certificate.c_frame);
    }
    Err(Error::CertificateCap { cap: opts.cap, best, attempts: opts.max_attempts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn degree_zero_and_dimensions() {
        let f = build_good_frame(&FrameOptions::with_degree(3), 1).unwrap();
        assert_eq!(f.dim(3), 7);
        let b0 = f.eval([0.2, 0.1, 0.9])[0];
        assert!((b0.abs() - (4.0 * PI).powf(-0.5)).abs() < 1e-14);
        assert!((f.certificate.lq_max[0][0] - 1.0).abs() < 1e-12);
        for k in 0..=3 {
            let g = f.gram(k);
            let d = 2 * k + 1;
            for i in 0..d {
                for j in 0..d {
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((g[i * d + j] - e).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn reproducible_and_capped() {
        let a = build_good_frame(&FrameOptions::with_degree(4), 9).unwrap();
        let b = build_good_frame(&FrameOptions::with_degree(4), 9).unwrap();
        assert_eq!(a.mixing, b.mixing);
        let tight = FrameOptions { cap: 0.5, ..FrameOptions::with_degree(2) };
        assert!(matches!(build_good_frame(&tight, 1), Err(Error::CertificateCap { .. })));
        let bad = FrameOptions { quad_degree: 3, ..FrameOptions::with_degree(4) };
        assert!(matches!(build_good_frame(&bad, 1), Err(Error::QuadratureDegree { .. })));
    }

    #[test]
    fn labels_roundtrip() {
        let f = GoodFrame::reference(5);
        for k in 0..=5 {
            for l in 1..=2 * k + 1 {
                assert_eq!(f.label(f.index(k, l)), (k, l));
            }
        }
    }
}
