//! Least-squares exponent fits and the report type every experiment emits.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Smallest number of abscissae a fit may use.
pub const MIN_POINTS: usize = 4;

/// Ordinary least-squares line with standard errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
    pub n: usize,
}

/// Fits `y = a + b x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n != y.len() || n < MIN_POINTS {
        return Err(Error::InvalidParameter(format!(
            "a fit needs at least {MIN_POINTS} matching points, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite fit data".into()));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("fit abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let s2 = rss / (nf - 2.0);
    let slope_se = (s2 / sxx).sqrt();
    let intercept_se = (s2 * (1.0 / nf + mx * mx / sxx)).sqrt();
    Ok(LinearFit { slope, intercept, slope_se, intercept_se, n })
}

/// Coordinates in which the line is fitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitSpace {
    /// `ln y` against `ln x`.
    LogLog,
    /// `ln y` against `x`.
    LnY,
    /// `log2 y` against `x`.
    Log2Y,
}

impl FitSpace {
    pub fn transform(self, x: f64, y: f64) -> (f64, f64) {
        match self {
            FitSpace::LogLog => (x.ln(), y.ln()),
            FitSpace::LnY => (x, y.ln()),
            FitSpace::Log2Y => (x, y.log2()),
        }
    }
}

/// The quantity a criterion is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimate {
    Slope,
    NegSlope,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Criterion {
    AtMost { bound: f64 },
    AtLeast { bound: f64 },
    Within { lo: f64, hi: f64 },
    /// Recorded only.
    None,
}

impl Criterion {
    pub fn holds(&self, v: f64) -> bool {
        match *self {
            Criterion::AtMost { bound } => v <= bound,
            Criterion::AtLeast { bound } => v >= bound,
            Criterion::Within { lo, hi } => (lo..=hi).contains(&v),
            Criterion::None => true,
        }
    }
}

/// Samples, fit and verdict of one experiment.
///
/// `x`, `y` and `columns` are stored raw; the fit is over the points with
/// `in_fit` set, in `space` coordinates. [`FitReport::recompute`] rebuilds
/// the fit and verdict from these alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub schema_version: u32,
    pub experiment: String,
    pub x_label: String,
    pub y_label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub in_fit: Vec<bool>,
    /// Further per-abscissa columns (exact values, standard errors, ...).
    pub columns: BTreeMap<String, Vec<f64>>,
    pub space: FitSpace,
    pub estimate: Estimate,
    pub criterion: Criterion,
    pub fit: LinearFit,
    pub value: f64,
    /// Verdict of the fit alone.
    pub fit_pass: bool,
    /// Other checks that enter the verdict, by name.
    pub checks: BTreeMap<String, bool>,
    pub pass: bool,
    /// Scalar outputs such as fitted constants.
    pub summary: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

pub(crate) struct ReportBuilder {
    experiment: String,
    x_label: String,
    y_label: String,
    x: Vec<f64>,
    y: Vec<f64>,
    in_fit: Option<Vec<bool>>,
    columns: BTreeMap<String, Vec<f64>>,
    space: FitSpace,
    estimate: Estimate,
    criterion: Criterion,
    checks: BTreeMap<String, bool>,
    summary: BTreeMap<String, f64>,
    notes: Vec<String>,
}

impl ReportBuilder {
    pub fn new(experiment: &str, x_label: &str, y_label: &str, space: FitSpace) -> Self {
        Self {
            experiment: experiment.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            x: Vec::new(),
            y: Vec::new(),
            in_fit: None,
            columns: BTreeMap::new(),
            space,
            estimate: Estimate::Slope,
            criterion: Criterion::None,
            checks: BTreeMap::new(),
            summary: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn data(mut self, x: Vec<f64>, y: Vec<f64>) -> Self {
        self.x = x;
        self.y = y;
        self
    }

    pub fn mask(mut self, in_fit: Vec<bool>) -> Self {
        self.in_fit = Some(in_fit);
        self
    }

    pub fn column(mut self, name: &str, values: Vec<f64>) -> Self {
        self.columns.insert(name.into(), values);
        self
    }

    pub fn criterion(mut self, estimate: Estimate, criterion: Criterion) -> Self {
        self.estimate = estimate;
        self.criterion = criterion;
        self
    }

    pub fn check(mut self, name: &str, ok: bool) -> Self {
        self.checks.insert(name.into(), ok);
        self
    }

    pub fn summary(mut self, name: &str, v: f64) -> Self {
        self.summary.insert(name.into(), v);
        self
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    pub fn build(self) -> Result<FitReport> {
        let n = self.x.len();
        if self.y.len() != n || self.columns.values().any(|c| c.len() != n) {
            return Err(Error::InvalidParameter("report columns differ in length".into()));
        }
        // points that cannot be transformed (zero tail counts) are left out
        let in_fit = self.in_fit.unwrap_or_else(|| vec![true; n]);
        let in_fit: Vec<bool> = in_fit
            .iter()
            .zip(self.x.iter().zip(&self.y))
            .map(|(&m, (&x, &y))| {
                let (a, b) = self.space.transform(x, y);
                m && a.is_finite() && b.is_finite()
            })
            .collect();
        let mut r = FitReport {
            schema_version: SCHEMA_VERSION,
            experiment: self.experiment,
            x_label: self.x_label,
            y_label: self.y_label,
            x: self.x,
            y: self.y,
            in_fit,
            columns: self.columns,
            space: self.space,
            estimate: self.estimate,
            criterion: self.criterion,
            fit: LinearFit { slope: 0.0, intercept: 0.0, slope_se: 0.0, intercept_se: 0.0, n: 0 },
            value: 0.0,
            fit_pass: false,
            checks: self.checks,
            pass: false,
            summary: self.summary,
            notes: self.notes,
        };
        let (fit, value, fit_pass, pass) = r.recompute()?;
        r.fit = fit;
        r.value = value;
        r.fit_pass = fit_pass;
        r.pass = pass;
        Ok(r)
    }
}

impl FitReport {
    /// Fit, checked value, fit verdict and overall verdict from the stored samples.
    pub fn recompute(&self) -> Result<(LinearFit, f64, bool, bool)> {
        let (fx, fy): (Vec<f64>, Vec<f64>) = self
            .x
            .iter()
            .zip(&self.y)
            .zip(&self.in_fit)
            .filter(|(_, &m)| m)
            .map(|((&x, &y), _)| self.space.transform(x, y))
            .unzip();
        let fit = fit_line(&fx, &fy)?;
        let value = match self.estimate {
            Estimate::Slope => fit.slope,
            Estimate::NegSlope => -fit.slope,
        };
        let fit_pass = self.criterion.holds(value);
        let pass = fit_pass && self.checks.values().all(|&c| c);
        Ok((fit, value, fit_pass, pass))
    }

    /// Whether the stored fit and verdict agree with the stored samples.
    pub fn is_consistent(&self) -> bool {
        match self.recompute() {
            Ok((fit, value, fit_pass, pass)) => {
                let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs());
                close(fit.slope, self.fit.slope)
                    && close(fit.intercept, self.fit.intercept)
                    && close(value, self.value)
                    && fit_pass == self.fit_pass
                    && pass == self.pass
            }
            Err(_) => false,
        }
    }

    /// Sample table: `x,y,in_fit` followed by the extra columns in name order.
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        let mut header = vec!["x".to_string(), "y".to_string(), "in_fit".to_string()];
        header.extend(self.columns.keys().cloned());
        writeln!(w, "{}", header.join(","))?;
        for i in 0..self.x.len() {
            let mut row = vec![fmt(self.x[i]), fmt(self.y[i]), (self.in_fit[i] as u8).to_string()];
            row.extend(self.columns.values().map(|c| fmt(c[i])));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(s)?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::Format(format!("report schema {} (expected {SCHEMA_VERSION})", r.schema_version)));
        }
        Ok(r)
    }

    /// Writes `<dir>/<experiment>.csv` and `<dir>/<experiment>.json`.
    pub fn emit(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{}.csv", self.experiment));
        let json = dir.join(format!("{}.json", self.experiment));
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        std::fs::write(&csv, buf)?;
        std::fs::write(&json, self.to_json()? + "\n")?;
        Ok((csv, json))
    }
}

/// Round-trippable decimal.
fn fmt(v: f64) -> String {
    format!("{v:e}")
}

/// Mean and standard error of the mean.
pub fn mean_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let m = pairwise_sum(samples) / n;
    let dev: Vec<f64> = samples.iter().map(|s| (s - m).powi(2)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Fixed-order pairwise summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 5.0];
        let y: Vec<f64> = x.iter().map(|x| 0.5 - 2.0 * x).collect();
        let f = fit_line(&x, &y).unwrap();
        assert_relative_eq!(f.slope, -2.0, epsilon = 1e-14);
        assert_relative_eq!(f.intercept, 0.5, epsilon = 1e-14);
        assert!(f.slope_se < 1e-14);
    }

    #[test]
    fn standard_error_of_noisy_line() {
        // residuals +-1 alternate: rss = 4, s^2 = 2, sxx = 5
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, -1.0, 1.0, -1.0];
        let f = fit_line(&x, &y).unwrap();
        let rss: f64 = x.iter().zip(&y).map(|(a, b)| (b - f.intercept - f.slope * a).powi(2)).sum();
        assert_relative_eq!(f.slope_se, (rss / 2.0 / 5.0).sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn too_few_points() {
        assert!(fit_line(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(fit_line(&[1.0; 4], &[1.0, 2.0, 3.0, 4.0]).is_err());
    }

    fn sample() -> FitReport {
        let x = vec![1.0, 2.0, 4.0, 8.0, 16.0];
        let y: Vec<f64> = x.iter().map(|x: &f64| 3.0 * x.powf(-1.5)).collect();
        ReportBuilder::new("sample", "x", "y", FitSpace::LogLog)
            .data(x.clone(), y)
            .column("weight", x)
            .criterion(Estimate::Slope, Criterion::AtMost { bound: -1.0 })
            .summary("c", 3.0)
            .build()
            .unwrap()
    }

    #[test]
    fn report_verdict_and_recompute() {
        let r = sample();
        assert_relative_eq!(r.fit.slope, -1.5, epsilon = 1e-12);
        assert!(r.pass && r.is_consistent());
        let mut bad = r.clone();
        bad.y[4] *= 1e3;
        assert!(!bad.is_consistent());
    }

    #[test]
    fn nonpositive_values_drop_out_of_log_fits() {
        let r = ReportBuilder::new("z", "x", "y", FitSpace::LnY)
            .data(vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![1.0, 0.5, 0.25, 0.125, 0.0])
            .build()
            .unwrap();
        assert_eq!(r.in_fit, vec![true, true, true, true, false]);
        assert_relative_eq!(r.fit.slope, -(2f64.ln()), epsilon = 1e-12);
    }

    #[test]
    fn csv_and_json_round_trip() {
        let r = sample();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,y,in_fit,weight"));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(row, vec![1.0, 3.0, 1.0, 1.0]);
        assert_eq!(FitReport::from_json(&r.to_json().unwrap()).unwrap(), r);
        let dir = tempfile::tempdir().unwrap();
        let (c, j) = r.emit(dir.path()).unwrap();
        assert!(c.ends_with("sample.csv") && j.exists());
    }

    #[test]
    fn standard_error_shrinks_like_inverse_root() {
        let v: Vec<f64> = (0..40_000u64).map(|i| ((i * 2654435761) % 1000) as f64).collect();
        let (_, a) = mean_se(&v[..10_000]);
        let (_, b) = mean_se(&v);
        assert!((1.8..=2.2).contains(&(a / b)));
    }
}
