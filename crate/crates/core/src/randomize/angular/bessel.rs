//! Bessel functions of half-integer order.

use crate::error::{Error, Result};

/// Spherical Bessel `j_n(t)` for `t > 0`.
pub fn spherical_j(n: usize, t: f64) -> f64 {
    if t < 0.05 + 0.05 * n as f64 {
        return series(n, t);
    }
    let s = t.sin();
    let c = t.cos();
    let j0 = s / t;
    if n == 0 {
        return j0;
    }
    let j1 = s / (t * t) - c / t;
    if n == 1 {
        return j1;
    }
    if t > n as f64 {
        let (mut a, mut b) = (j0, j1);
        for k in 1..n {
            let next = (2 * k + 1) as f64 / t * b - a;
            a = b;
            b = next;
        }
        return b;
    }
    // Miller: recur downward from well above n, normalise by j0 or j1
    let start = n + 20 + (40.0 * (n as f64).sqrt()) as usize + t as usize;
    let mut hi = 0.0f64;
    let mut cur = 1e-300f64;
    let mut at_n = 0.0;
    let mut v0 = 0.0;
    let mut v1 = 0.0;
    for k in (1..=start).rev() {
        // cur = j_k, hi = j_{k+1}
        let lower = (2 * k + 1) as f64 / t * cur - hi;
        hi = cur;
        cur = lower;
        if k - 1 == n {
            at_n = cur;
        }
        if k == 2 {
            v1 = cur;
        }
        if k == 1 {
            v0 = cur;
        }
        if cur.abs() > 1e250 {
            hi *= 1e-250;
            cur *= 1e-250;
            at_n *= 1e-250;
            v1 *= 1e-250;
            v0 *= 1e-250;
        }
    }
    if n == 0 {
        at_n = v0;
    }
    if j0.abs() > j1.abs() {
        at_n * j0 / v0
    } else {
        at_n * j1 / v1
    }
}

fn series(n: usize, t: f64) -> f64 {
    // t^n / (2n+1)!! * sum_k (-t^2/2)^k / (k! (2n+3)(2n+5)...(2n+2k+1))
    let mut lead = 1.0;
    for k in 0..n {
        lead *= t / (2 * k + 3) as f64;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    let x = -t * t / 2.0;
    for k in 1..30 {
        term *= x / (k as f64 * (2 * n + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// `J_mu(t)` for half-integer `mu = (2k+1)/2`, `t > 0`, via
/// `J_{k+1/2}(t) = sqrt(2t/pi) j_k(t)`.
pub fn bessel_j(mu: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("Bessel argument must be positive, got {t}")));
    }
    let two_mu = 2.0 * mu;
    if !(mu >= 0.5) || (two_mu - two_mu.round()).abs() > 1e-12 || (two_mu.round() as i64) % 2 == 0 {
        return Err(Error::InvalidParameter(format!("order must be a positive half-integer, got {mu}")));
    }
    let k = (mu - 0.5).round() as usize;
    Ok((2.0 * t / std::f64::consts::PI).sqrt() * spherical_j(k, t))
}
