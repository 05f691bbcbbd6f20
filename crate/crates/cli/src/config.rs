//! Run configuration: a TOML file with nested sections, overridden key by key
//! from the command line.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::{Table, Value};
use zakharov_core::randomize::{AngularOptions, RandomModel};
use zakharov_core::solver::PicardOptions;
use zakharov_core::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub l: f64,
    pub n: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { l: 8.0 * std::f64::consts::PI, n: 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsSection {
    pub alpha: f64,
}

impl Default for PhysicsSection {
    fn default() -> Self {
        Self { alpha: 1.0 }
    }
}

/// `sigma = 1/2 - nu` is derived, never stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpacesSection {
    pub nu: f64,
    pub eps: f64,
}

impl Default for SpacesSection {
    fn default() -> Self {
        Self { nu: 0.05, eps: 0.05 }
    }
}

impl SpacesSection {
    pub fn sigma(&self) -> f64 {
        0.5 - self.nu
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeSection {
    pub t: f64,
    pub t_max: f64,
    pub dt: f64,
    /// Snapshots written per trajectory (roughly).
    pub snapshots: usize,
}

impl Default for TimeSection {
    fn default() -> Self {
        Self { t: 2.0, t_max: 6.0, dt: 0.1, snapshots: 20 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FamilyName {
    Gaussian,
    Bounded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomizationSection {
    pub family: FamilyName,
    pub variance: f64,
    pub bound: f64,
    pub seed: u64,
    pub draw: u64,
    pub k_deg_max: usize,
    /// Relative amplitude below which a harmonic degree counts as inactive.
    pub active_threshold: f64,
    /// Randomize the final data in `final-state`.
    pub enabled: bool,
}

impl Default for RandomizationSection {
    fn default() -> Self {
        Self { family: FamilyName::Gaussian, variance: 1.0, bound: 1.0, seed: 0, draw: 0, k_deg_max: 15, active_threshold: 1e-6, enabled: true }
    }
}

impl RandomizationSection {
    pub fn model(&self) -> Result<RandomModel> {
        match self.family {
            FamilyName::Gaussian => RandomModel::gaussian(self.variance, self.seed),
            FamilyName::Bounded => RandomModel::bounded(self.bound, self.seed),
        }
    }

    pub fn angular(&self) -> AngularOptions {
        AngularOptions { active_threshold: self.active_threshold, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 12 }
    }
}

/// Where a final-state or initial field comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    Zero,
    /// A ZKRF container; the path is relative to the config file.
    File { path: PathBuf },
    /// `norm * g / ||g||` with `g = exp(-|x - c|^2 / (2 w^2) + i k.x)`;
    /// the norm is `H^1` for `u` and `L^2` for `v`.
    Gaussian { norm: f64, width: f64, center: [f64; 3], wavevector: [f64; 3] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    pub u: DataSource,
    pub v: DataSource,
}

impl Default for DataSection {
    fn default() -> Self {
        Self {
            u: DataSource::Gaussian { norm: 0.05, width: 2f64.sqrt(), center: [0.0; 3], wavevector: [0.5, 0.0, 0.0] },
            v: DataSource::Gaussian { norm: 0.05, width: 1.5f64.sqrt(), center: [1.0, 0.0, 0.0], wavevector: [0.0; 3] },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentsSection {
    /// Ids run by `diagnose` when none is given on the command line.
    pub ids: Vec<String>,
    /// Monte Carlo sample count for the moment experiments.
    pub samples: usize,
    /// Draw count for the field experiments.
    pub draws: usize,
}

impl Default for ExperimentsSection {
    fn default() -> Self {
        Self { ids: Vec::new(), samples: 100_000, draws: 16 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub physics: PhysicsSection,
    pub spaces: SpacesSection,
    pub time: TimeSection,
    pub randomization: RandomizationSection,
    pub solver: SolverSection,
    pub data: DataSection,
    pub experiments: ExperimentsSection,
}

impl RunConfig {
    pub fn picard_options(&self) -> PicardOptions {
        let mut o = PicardOptions::new(self.physics.alpha, self.time.t, self.time.t_max, self.time.dt);
        o.tol = self.solver.tol;
        o.max_iter = self.solver.max_iter;
        o.nu = self.spaces.nu;
        o.eps = self.spaces.eps;
        o
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }
}

/// Config plus the directory its relative paths resolve against.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub config: RunConfig,
    pub base: PathBuf,
}

impl Loaded {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }
}

/// `section.key=value`; the value is parsed as TOML and falls back to a bare string.
pub fn parse_override(s: &str) -> Result<(Vec<String>, Value)> {
    let (key, raw) = s
        .split_once('=')
        .ok_or_else(|| Error::InvalidParameter(format!("override '{s}' is not key=value")))?;
    let path: Vec<String> = key.trim().split('.').map(str::to_string).collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(Error::InvalidParameter(format!("bad override key '{key}'")));
    }
    let raw = raw.trim();
    let value = match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => Value::String(raw.to_string()),
    };
    Ok((path, value))
}

fn apply(table: &mut Table, path: &[String], value: Value) -> Result<()> {
    let (last, parents) = path.split_last().expect("nonempty path");
    let mut t = table;
    for p in parents {
        let entry = t.entry(p.clone()).or_insert_with(|| Value::Table(Table::new()));
        t = match entry {
            Value::Table(inner) => inner,
            _ => return Err(Error::InvalidParameter(format!("'{p}' is not a section"))),
        };
    }
    // switching a tagged variant drops the old variant's fields
    if last == "kind" && t.get("kind") != Some(&value) {
        t.clear();
    }
    t.insert(last.clone(), value);
    Ok(())
}

/// Recursive merge of `top` into `base`. A tagged table whose `kind` changes
/// is replaced whole, so variant fields never mix.
fn merge(base: &mut Table, top: Table) {
    for (k, v) in top {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(t)) if b.get("kind") == t.get("kind") || t.get("kind").is_none() => {
                merge(b, t)
            }
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Reads `path` (if any) over the defaults, applies the overrides in order
/// and validates the result.
pub fn load(path: Option<&Path>, overrides: &[(Vec<String>, Value)]) -> Result<Loaded> {
    let mut table = Table::try_from(RunConfig::default()).map_err(|e| Error::Format(e.to_string()))?;
    let base = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", p.display()))))?;
            let t: Table = text.parse().map_err(|e| Error::Format(format!("{}: {e}", p.display())))?;
            merge(&mut table, t);
            p.parent().map(Path::to_path_buf).unwrap_or_default()
        }
        None => PathBuf::new(),
    };
    for (k, v) in overrides {
        apply(&mut table, k, v.clone())?;
    }
    let config: RunConfig = Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| Error::Format(format!("config: {e}")))?;
    validate(&config)?;
    Ok(Loaded { config, base })
}

fn validate(c: &RunConfig) -> Result<()> {
    if !(c.spaces.nu > 0.0 && c.spaces.nu < 0.5) || !(c.spaces.eps > 0.0) {
        return Err(Error::InvalidParameter(format!("need 0 < nu < 1/2 and eps > 0, got {:?}", c.spaces)));
    }
    if !(c.time.t >= 1.0) || !(c.time.t_max > c.time.t) || !(c.time.dt > 0.0) {
        return Err(Error::InvalidParameter(format!("need 1 <= T < T_max and dt > 0, got {:?}", c.time)));
    }
    if !(c.physics.alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {}", c.physics.alpha)));
    }
    if c.solver.max_iter == 0 || !(c.solver.tol > 0.0) {
        return Err(Error::InvalidParameter("need max_iter >= 1 and tol > 0".into()));
    }
    if !(c.randomization.active_threshold >= 0.0 && c.randomization.active_threshold < 1.0) {
        return Err(Error::InvalidParameter("need 0 <= randomization.active_threshold < 1".into()));
    }
    c.randomization.model()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_roundtrip_through_toml() {
        let c = RunConfig::default();
        let text = c.to_toml().unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, c);
        assert!(!text.contains("sigma"));
    }

    #[test]
    fn overrides_apply_in_order() {
        let o = vec![
            parse_override("grid.n=32").unwrap(),
            parse_override("randomization.family=bounded").unwrap(),
            parse_override("grid.n = 24").unwrap(),
        ];
        let l = load(None, &o).unwrap();
        assert_eq!(l.config.grid.n, 24);
        assert_eq!(l.config.randomization.family, FamilyName::Bounded);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(load(None, &[parse_override("grid.m=3").unwrap()]).is_err());
        assert!(load(None, &[parse_override("spaces.nu=0.7").unwrap()]).is_err());
        assert!(parse_override("novalue").is_err());
        assert!(load(None, &[parse_override("grid.n.x=1").unwrap()]).is_err());
    }

    #[test]
    fn data_variants_replace_rather_than_mix() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(&p, "[data.u]\nkind = \"file\"\npath = \"u.zkrf\"\n").unwrap();
        let l = load(Some(&p), &[parse_override("data.v.norm=2").unwrap()]).unwrap();
        assert_eq!(l.config.data.u, DataSource::File { path: "u.zkrf".into() });
        assert!(matches!(l.config.data.v, DataSource::Gaussian { norm, .. } if norm == 2.0));
        assert_eq!(l.resolve(Path::new("u.zkrf")), dir.path().join("u.zkrf"));
        let z = load(None, &[parse_override("data.u.kind=zero").unwrap()]).unwrap();
        assert_eq!(z.config.data.u, DataSource::Zero);
    }

    #[test]
    fn sigma_is_derived() {
        let s = SpacesSection { nu: 0.1, eps: 0.05 };
        assert!((s.sigma() - 0.4).abs() < 1e-15);
    }
}
