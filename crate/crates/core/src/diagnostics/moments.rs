//! Large-deviation moments and Gaussian tails of random sums `sum_k c_k X_k`.

use statrs::function::gamma::ln_gamma;

use super::fit::{pairwise_sum, Criterion, Estimate, FitReport, FitSpace, ReportBuilder};
use crate::error::{Error, Result};
use crate::randomize::{substream, Family, RandomModel, StreamTag};

/// Default moment orders.
pub const BETAS: [f64; 4] = [2.0, 4.0, 8.0, 16.0];

/// Bound on the fitted growth exponent in `beta`.
pub const BETA_EXPONENT_CAP: f64 = 0.55;

/// `(E |Z|^beta)^{1/beta}` for `Z ~ N(0, 1)`: `E |Z|^beta = 2^{beta/2} Gamma((beta+1)/2) / sqrt(pi)`.
pub fn gaussian_abs_moment(beta: f64) -> f64 {
    let ln = 0.5 * beta * 2f64.ln() + ln_gamma(0.5 * (beta + 1.0)) - 0.5 * std::f64::consts::PI.ln();
    (ln / beta).exp()
}

/// `n` samples of `sum_k c_k X_k`; draw `d` uses substream `(seed, Aux, d)`.
pub fn coefficient_sums(c: &[f64], model: &RandomModel, n: usize) -> Vec<f64> {
    (0..n as u64)
        .map(|d| {
            let mut rng = substream(model.seed, StreamTag::Aux, d, &[]);
            c.iter().map(|ck| ck * model.draw_from(&mut rng)).sum()
        })
        .collect()
}

/// `(mean |s|^beta)^{1/beta}`, scaled by the largest sample against overflow.
pub fn empirical_moment(samples: &[f64], beta: f64) -> f64 {
    let top = samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if top == 0.0 {
        return 0.0;
    }
    let p: Vec<f64> = samples.iter().map(|s| (s.abs() / top).powf(beta)).collect();
    top * (pairwise_sum(&p) / samples.len() as f64).powf(1.0 / beta)
}

/// Empirical `L^beta` moments of `sum_k c_k X_k` and their growth in `beta`.
///
/// The fit is `ln m_beta` against `ln beta` and must stay below
/// [`BETA_EXPONENT_CAP`]. For the Gaussian family the exact moment
/// `||c|| s ||N(0,1)||_beta` is stored and the ratio must lie in `[0.9, 1.1]`.
pub fn large_deviation_mc(c: &[f64], model: &RandomModel, betas: &[f64], n_samples: usize) -> Result<FitReport> {
    model.validate()?;
    if betas.iter().any(|b| !(2.0..=32.0).contains(b)) {
        return Err(Error::InvalidParameter(format!("moment orders must lie in [2, 32], got {betas:?}")));
    }
    if n_samples < 10_000 {
        return Err(Error::InvalidParameter(format!("need at least 1e4 samples, got {n_samples}")));
    }
    let cn = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(cn > 0.0) || !cn.is_finite() {
        return Err(Error::InvalidParameter("coefficient vector must be nonzero and finite".into()));
    }
    let s = coefficient_sums(c, model, n_samples);
    let m: Vec<f64> = betas.iter().map(|&b| empirical_moment(&s, b)).collect();
    let normalized: Vec<f64> = m.iter().zip(betas).map(|(m, b)| m / (b.sqrt() * cn)).collect();
    let constant = normalized.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut rb = ReportBuilder::new("large_deviation", "beta", "moment", FitSpace::LogLog)
        .data(betas.to_vec(), m.clone())
        .column("normalized", normalized)
        .criterion(Estimate::Slope, Criterion::AtMost { bound: BETA_EXPONENT_CAP })
        .summary("c_norm", cn)
        .summary("constant", constant)
        .summary("n_samples", n_samples as f64);
    rb = match model.family {
        Family::Gaussian { variance } => {
            let exact: Vec<f64> = betas.iter().map(|&b| cn * variance.sqrt() * gaussian_abs_moment(b)).collect();
            let ratio: Vec<f64> = m.iter().zip(&exact).map(|(a, b)| a / b).collect();
            let ok = ratio.iter().all(|r| (0.9..=1.1).contains(r));
            rb.column("exact", exact).column("ratio", ratio).check("gaussian_moment_ratio", ok)
        }
        Family::Bounded { .. } => rb.note("bounded family: no closed-form moments"),
    };
    rb.build()
}

/// Empirical `P(|F| > lambda)` against `lambda^2 / A^2`; the rate `c` of
/// `C' e^{-c lambda^2 / A^2}` is minus the fitted slope of `ln P`.
pub fn tail_probability_mc(samples: &[f64], a: f64, lambdas: &[f64], criterion: Criterion) -> Result<FitReport> {
    let n = samples.len();
    if n < 100_000 {
        return Err(Error::InvalidParameter(format!("need at least 1e5 samples, got {n}")));
    }
    if !(a > 0.0) || lambdas.iter().any(|l| !(*l > 0.0)) {
        return Err(Error::InvalidParameter("scale and thresholds must be positive".into()));
    }
    let mut sorted: Vec<f64> = samples.iter().map(|s| s.abs()).collect();
    sorted.sort_by(f64::total_cmp);
    let counts: Vec<f64> = lambdas.iter().map(|&l| (n - sorted.partition_point(|&s| s <= l)) as f64).collect();
    let p: Vec<f64> = counts.iter().map(|c| c / n as f64).collect();
    let se: Vec<f64> = p.iter().map(|p| (p * (1.0 - p) / n as f64).sqrt()).collect();
    let x: Vec<f64> = lambdas.iter().map(|l| l * l / (a * a)).collect();
    ReportBuilder::new("tail_probability", "lambda^2/A^2", "P(|F| > lambda)", FitSpace::LnY)
        .data(x, p)
        .column("lambda", lambdas.to_vec())
        .column("count", counts)
        .column("se", se)
        .criterion(Estimate::NegSlope, criterion)
        .summary("scale", a)
        .summary("n_samples", n as f64)
        .build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_moment_closed_form() {
        assert_relative_eq!(gaussian_abs_moment(2.0), 1.0, epsilon = 1e-12);
        assert_relative_eq!(gaussian_abs_moment(4.0), 3f64.powf(0.25), epsilon = 1e-12);
        assert_relative_eq!(gaussian_abs_moment(8.0), 105f64.powf(0.125), epsilon = 1e-12);
    }

    #[test]
    fn single_sign_coefficient_has_unit_moments() {
        let model = RandomModel::bounded(1.0, 3).unwrap();
        let r = large_deviation_mc(&[1.0], &model, &BETAS, 10_000).unwrap();
        assert!(r.y.iter().all(|m| (m - 1.0).abs() < 1e-12));
        assert!(r.fit.slope.abs() < 1e-12 && r.pass);
    }

    #[test]
    fn gaussian_sum_moments_match_exact() {
        let model = RandomModel::gaussian(2.0, 11).unwrap();
        let c = [0.3, -1.2, 0.7, 0.05, 2.0];
        let r = large_deviation_mc(&c, &model, &BETAS, 100_000).unwrap();
        assert!(r.checks["gaussian_moment_ratio"], "{:?}", r.columns["ratio"]);
        assert!(r.pass, "slope {}", r.fit.slope);
        let again = large_deviation_mc(&c, &model, &BETAS, 100_000).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn preconditions() {
        let model = RandomModel::bounded(1.0, 0).unwrap();
        assert!(large_deviation_mc(&[1.0], &model, &[1.0, 2.0, 4.0, 8.0], 10_000).is_err());
        assert!(large_deviation_mc(&[1.0], &model, &BETAS, 100).is_err());
        assert!(large_deviation_mc(&[0.0], &model, &BETAS, 10_000).is_err());
        assert!(tail_probability_mc(&[0.0; 10], 1.0, &[1.0], Criterion::None).is_err());
    }

    #[test]
    fn bounded_tail_vanishes_beyond_support() {
        let model = RandomModel::bounded(1.0, 5).unwrap();
        let s = coefficient_sums(&[1.0], &model, 100_000);
        let lambdas = [0.25, 0.5, 0.75, 0.9, 1.0, 1.5, 2.0];
        let r = tail_probability_mc(&s, 1.0, &lambdas, Criterion::None).unwrap();
        assert_eq!(r.y, vec![1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(r.in_fit.iter().filter(|&&m| m).count(), 4);
    }
}
