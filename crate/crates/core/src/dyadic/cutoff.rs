use crate::scalar::Real;

/// Plateau radius of `eta0`.
pub const PLATEAU: f64 = 5.0 / 4.0;
/// Support radius of `eta0`.
pub const SUPPORT: f64 = 8.0 / 5.0;

/// Smoothstep of two-sided flatness order 4: `S(x) = x^5 (126 - 420x + 540x^2 - 315x^3 + 70x^4)`
/// on `[0, 1]`, clamped outside. `S` and its first four derivatives vanish at
/// 0 and agree with the constant 1 at 1.
#[inline]
pub fn smoothstep<T: Real>(x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    if x >= T::one() {
        return T::one();
    }
    let p = T::of(126.0) + x * (T::of(-420.0) + x * (T::of(540.0) + x * (T::of(-315.0) + x * T::of(70.0))));
    x.powi(5) * p
}

/// Littlewood-Paley cutoff family built from
/// `eta0(r) = S((8/5 - r) / (8/5 - 5/4))`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DyadicCutoff;

impl DyadicCutoff {
    #[inline]
    pub fn eta0<T: Real>(r: T) -> T {
        let s = T::of(SUPPORT);
        smoothstep((s - r.abs()) / (s - T::of(PLATEAU)))
    }

    /// `rho_{<=k}(|xi|) = eta0(|xi| / 2^k)`.
    #[inline]
    pub fn rho_le<T: Real>(k: i32, r: T) -> T {
        Self::eta0(r / T::of(2f64.powi(k)))
    }

    /// `rho_k = rho_{<=k} - rho_{<=k-1}`.
    #[inline]
    pub fn rho<T: Real>(k: i32, r: T) -> T {
        Self::rho_le(k, r) - Self::rho_le(k - 1, r)
    }

    /// Dyadic indices `k` with `rho_k(r) != 0` (at most two).
    pub fn blocks_at(r: f64) -> impl Iterator<Item = i32> {
        let lo = (r / SUPPORT).log2().floor() as i32;
        (lo..=lo + 2).filter(move |&k| r > 0.0 && Self::rho(k, r) != 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta0_plateau_and_support() {
        for i in 0..=1000 {
            let r = i as f64 * 3.0 / 1000.0;
            let e = DyadicCutoff::eta0(r);
            assert!((0.0..=1.0).contains(&e));
            if r <= PLATEAU {
                assert_eq!(e, 1.0);
            }
            if r >= SUPPORT {
                assert_eq!(e, 0.0);
            }
        }
        assert!(DyadicCutoff::eta0(1.4f64) > 0.0 && DyadicCutoff::eta0(1.4f64) < 1.0);
    }

    #[test]
    fn smoothstep_flatness() {
        let h = 1e-2;
        let s = |x: f64| smoothstep(x);
        // fifth-order contact at both ends: S(h) ~ 126 h^5 ~ 1 - S(1 - h)
        assert!((s(h) / h.powi(5) / 126.0 - 1.0).abs() < 0.05);
        assert!(((1.0 - s(1.0 - h)) / h.powi(5) / 126.0 - 1.0).abs() < 0.05);
        assert!((s(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn blocks_at_lists_support() {
        for &r in &[0.3, 1.0, 1.3, 2.0, 5.5, 100.0] {
            let mut total = 0.0;
            for k in -10..12 {
                let v = DyadicCutoff::rho(k, r);
                if v != 0.0 {
                    assert!(DyadicCutoff::blocks_at(r).any(|j| j == k));
                }
                total += v;
            }
            assert!((total - 1.0).abs() < 1e-14);
        }
    }
}
