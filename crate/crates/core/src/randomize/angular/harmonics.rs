//! Real orthonormal spherical harmonics.

use std::f64::consts::PI;

/// Number of real harmonics of degree `<= k_max`.
pub fn count_upto(k_max: usize) -> usize {
    (k_max + 1) * (k_max + 1)
}

/// Offset of degree `k` in the stacked ordering `(k, m)`, `m = -k..=k`.
#[inline]
pub fn offset(k: usize) -> usize {
    k * k
}

/// All real harmonics `Y_{k,m}` with `k <= k_max` at the unit vector
/// `(sin t cos p, sin t sin p, cos t)` given by `(x = cos t, phi = p)`.
///
/// Output index is `k^2 + (m + k)`; `m > 0` carries `cos(m phi)`, `m < 0`
/// carries `sin(|m| phi)`. Each has unit `L^2(S^2)` norm.
pub fn real_harmonics(k_max: usize, x: f64, phi: f64, out: &mut [f64]) {
    assert!(out.len() >= count_upto(k_max));
    let s = (1.0 - x * x).max(0.0).sqrt();
    let n = k_max + 1;
    // pmm holds the sectoral values p_{m,m}
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    let sq2 = 2f64.sqrt();
    for m in 0..n {
        if m > 0 {
            pmm *= s * ((2 * m + 1) as f64 / (2 * m) as f64).sqrt();
        }
        let (sm, cm) = ((m as f64) * phi).sin_cos();
        let store = |l: usize, p: f64, out: &mut [f64]| {
            let base = l * l + l;
            if m == 0 {
                out[base] = p;
            } else {
                out[base + m] = sq2 * p * cm;
                out[base - m] = sq2 * p * sm;
            }
        };
        store(m, pmm, out);
        if m + 1 < n {
            let mut p_prev = pmm;
            let mut p = ((2 * m + 3) as f64).sqrt() * x * pmm;
            store(m + 1, p, out);
            for l in m + 2..n {
                let lf = l as f64;
                let mf = m as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
                let next = a * (x * p - b * p_prev);
                p_prev = p;
                p = next;
                store(l, p, out);
            }
        }
    }
}

/// Convenience wrapper returning a fresh vector.
pub fn harmonics_at(k_max: usize, dir: [f64; 3]) -> Vec<f64> {
    let r = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
    let x = if r > 0.0 { dir[2] / r } else { 1.0 };
    let phi = dir[1].atan2(dir[0]);
    let mut out = vec![0.0; count_upto(k_max)];
    real_harmonics(k_max, x, phi, &mut out);
    out
}
