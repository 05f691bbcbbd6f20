//! Decay of partition pieces against mismatched translates or frequencies:
//! `psi_l P_k (psi_{l'} f)` in `<l - l'>`, `P_k (psi_l P_j f)` and
//! `P_k (psi_l P_{<=k-5} f)` in `2^k`.

use serde::{Deserialize, Serialize};

use super::fit::{Criterion, Estimate, FitReport, FitSpace, ReportBuilder};
use crate::dyadic::{project_unchecked, Selector};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::randomize::PartitionOfUnity;
use crate::scalar::Real;

/// Separations up to this are not expected to decay.
pub const TRIVIAL_SEPARATION: f64 = 7.0;

/// Smallest frequency gap of the frequency cases.
pub const FREQUENCY_GAP: i32 = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum MismatchCase {
    /// `||psi_l P (psi_{l'} f)||` for `l = l' + d e` over the separations `d`;
    /// `P` is `P_k` (`block = Some(k)`) or `P_{<=0}`.
    Spatial { block: Option<i32>, l_prime: [i64; 3], direction: [i64; 3], separations: Vec<i64> },
    /// `||P_k (psi_l P_j f)||` against `k` with `j` fixed.
    HighLow { l: [i64; 3], j: i32, ks: Vec<i32> },
    /// `||P_k (psi_l P_{<=k-5} f)||` against `k`.
    LowHigh { l: [i64; 3], ks: Vec<i32> },
}

fn check_block<T: Real>(f: &SpectralField<T>, k: i32) -> Result<()> {
    let g = f.grid();
    if k < g.k_min() || k > g.k_max() {
        return Err(Error::DyadicOutOfRange { k, min: g.k_min(), max: g.k_max() });
    }
    Ok(())
}

/// Measured decay for one case, normalized by `||f||_{L^p}`; the fitted
/// slope must be at most `-d`.
pub fn mismatch_decay<T: Real>(
    f: &SpectralField<T>,
    pou: &PartitionOfUnity<T>,
    p: f64,
    d: f64,
    case: &MismatchCase,
) -> Result<FitReport> {
    if f.grid() != pou.grid() {
        return Err(Error::GridMismatch);
    }
    if !(p >= 1.0) || !(d > 0.0) {
        return Err(Error::InvalidParameter(format!("need p >= 1 and D > 0, got p={p}, D={d}")));
    }
    let pt = T::of(p);
    let fnorm = f.norm_lq(pt).as_f64();
    if fnorm == 0.0 {
        return Err(Error::InvalidParameter("f vanishes".into()));
    }
    let fa = f.to_frequency();
    let criterion = Criterion::AtMost { bound: -d };
    match case {
        MismatchCase::Spatial { block, l_prime, direction, separations } => {
            let sel = match block {
                Some(k) => {
                    check_block(f, *k)?;
                    Selector::Eq(*k)
                }
                None => Selector::AtMost(0),
            };
            let l = pou.grid().box_length().as_f64();
            let unit = direction.iter().map(|c| (c * c) as f64).sum::<f64>().sqrt();
            if unit == 0.0 {
                return Err(Error::InvalidParameter("zero direction".into()));
            }
            let translates = pou.translates();
            let piece = project_unchecked(&f.mul(&pou.psi_field(*l_prime)), sel);
            let mut x = Vec::new();
            let mut y = Vec::new();
            let mut sep = Vec::new();
            for &s in separations {
                let target = [0, 1, 2].map(|i| l_prime[i] + s * direction[i]);
                let dist = s.abs() as f64 * unit;
                if !translates.contains(&target) || dist > l / 4.0 {
                    return Err(Error::InvalidParameter(format!(
                        "translate {target:?} at distance {dist} is outside the box or beyond L/4 = {}",
                        l / 4.0
                    )));
                }
                let v = pou.psi_field(target).mul(&piece).norm_lq(pt).as_f64();
                x.push((1.0 + dist * dist).sqrt());
                y.push(v / fnorm);
                sep.push(dist);
            }
            let mask = sep.iter().map(|&s| s > TRIVIAL_SEPARATION).collect();
            ReportBuilder::new("mismatch_spatial", "<l - l'>", "||psi_l P(psi_l' f)|| / ||f||", FitSpace::LogLog)
                .data(x, y)
                .mask(mask)
                .column("separation", sep)
                .criterion(Estimate::Slope, criterion)
                .summary("p", p)
                .summary("decay_order", d)
                .note(format!("projection {sel:?}; separations <= {TRIVIAL_SEPARATION} recorded but not fitted"))
                .build()
        }
        MismatchCase::HighLow { l, j, ks } => {
            check_block(f, *j)?;
            for &k in ks {
                check_block(f, k)?;
            }
            let usable: Vec<i32> = ks.iter().copied().filter(|k| (k - j).abs() >= FREQUENCY_GAP).collect();
            if usable.len() < 4 {
                let g = f.grid();
                let available = g.dyadic_range().filter(|k| (k - j).abs() >= FREQUENCY_GAP).count();
                return Err(Error::InvalidParameter(format!(
                    "need 4 output blocks with |k - j| >= {FREQUENCY_GAP}; got {} and the grid resolves {available} for j = {j} in [{}, {}]",
                    usable.len(),
                    g.k_min(),
                    g.k_max()
                )));
            }
            let inner = project_unchecked(&fa, Selector::Eq(*j)).mul(&pou.psi_field(*l));
            let y: Vec<f64> = usable
                .iter()
                .map(|&k| project_unchecked(&inner, Selector::Eq(k)).norm_lq(pt).as_f64() / fnorm)
                .collect();
            ReportBuilder::new("mismatch_high_low", "k", "||P_k(psi_l P_j f)|| / ||f||", FitSpace::Log2Y)
                .data(usable.iter().map(|&k| k as f64).collect(), y)
                .criterion(Estimate::Slope, criterion)
                .summary("j", *j as f64)
                .summary("p", p)
                .summary("decay_order", d)
                .build()
        }
        MismatchCase::LowHigh { l, ks } => {
            for &k in ks {
                check_block(f, k)?;
            }
            let psi = pou.psi_field(*l);
            let y: Vec<f64> = ks
                .iter()
                .map(|&k| {
                    // below the lattice the low projection is the zero mode
                    let low = project_unchecked(&fa, Selector::AtMost(k - FREQUENCY_GAP));
                    project_unchecked(&low.mul(&psi), Selector::Eq(k)).norm_lq(pt).as_f64() / fnorm
                })
                .collect();
            ReportBuilder::new("mismatch_low_high", "k", "||P_k(psi_l P_<=k-5 f)|| / ||f||", FitSpace::Log2Y)
                .data(ks.iter().map(|&k| k as f64).collect(), y)
                .criterion(Estimate::Slope, criterion)
                .summary("p", p)
                .summary("decay_order", d)
                .build()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use num_complex::Complex;

    #[test]
    fn rejects_unresolved_frequency_sweeps() {
        let g = GridSpec::<f64>::new(8.0, 32).unwrap();
        let pou = PartitionOfUnity::new(&g).unwrap();
        let f = SpectralField::from_fn(&g, |_| Complex::new(1.0, 0.0));
        let ks: Vec<i32> = g.dyadic_range().collect();
        let case = MismatchCase::HighLow { l: [0; 3], j: g.k_min(), ks };
        let err = mismatch_decay(&f, &pou, 2.0, 2.0, &case).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)), "{err}");
        let far = MismatchCase::Spatial { block: None, l_prime: [0; 3], direction: [1, 0, 0], separations: vec![3] };
        assert!(mismatch_decay(&f, &pou, 2.0, 2.0, &far).is_err());
    }
}
