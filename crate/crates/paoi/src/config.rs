//! JSON configuration documents for the `simulate`, `sweep` and `calibrate`
//! subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use paoi_core::bounds::Method;
use paoi_core::calibration::{CalibrationPoint, ReplicationSettings, Scenario};
use paoi_core::simulator::ReplicationConfig;
use paoi_core::stochastic::{DistributionFamily, DistributionSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const DEFAULT_N: usize = 100_000;
pub const DEFAULT_REPLICATIONS: usize = 50;
pub const DEFAULT_WARMUP: f64 = 0.1;
pub const DEFAULT_ALPHA: f64 = 2.0;

fn default_mu() -> f64 {
    1.0
}
fn default_n() -> usize {
    DEFAULT_N
}
fn default_replications() -> usize {
    DEFAULT_REPLICATIONS
}
fn default_warmup() -> f64 {
    DEFAULT_WARMUP
}
fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}
fn default_scenario() -> Scenario {
    Scenario::SingleSource
}
fn exponential() -> DistributionFamily {
    DistributionFamily::Exponential
}
fn calibration_families() -> Vec<DistributionFamily> {
    vec![
        DistributionFamily::Exponential,
        DistributionFamily::UniformMean,
        DistributionFamily::FoldedNormal { cv: 0.5 },
    ]
}

/// `k * step / 100` for `k = 1..=count`, computed so each entry is the
/// double nearest to its decimal value.
fn decimal_grid(step_hundredths: u32, count: u32) -> Vec<f64> {
    (1..=count)
        .map(|k| f64::from(k * step_hundredths) / 100.0)
        .collect()
}

/// Per-source sweep grid: `0.05..=0.9` for one source, `0.025..=0.45` for
/// two, both relative to `mu`.
pub fn default_sweep_lambdas(scenario: Scenario, mu: f64) -> Vec<f64> {
    let grid = decimal_grid(5, 18);
    match scenario {
        Scenario::SingleSource => grid.into_iter().map(|x| x * mu).collect(),
        Scenario::TwoSource => grid.into_iter().map(|x| x * mu / 2.0).collect(),
    }
}

/// Per-source calibration grid: `0.1..=0.9` for one source, `0.05..=0.45`
/// for two.
pub fn default_calibration_lambdas(scenario: Scenario, mu: f64) -> Vec<f64> {
    let grid = decimal_grid(10, 9);
    match scenario {
        Scenario::SingleSource => grid.into_iter().map(|x| x * mu).collect(),
        Scenario::TwoSource => grid.into_iter().map(|x| x * mu / 2.0).collect(),
    }
}

pub fn default_methods(scenario: Scenario) -> Vec<Method> {
    match scenario {
        Scenario::SingleSource => vec![Method::Kingman, Method::Robust1, Method::Robust2],
        Scenario::TwoSource => vec![Method::Robust3],
    }
}

/// Reads and deserializes a JSON document.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path, e))
}

fn check_replication(n: usize, replications: usize, warmup: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::Validation(format!("n must be >= 2, got {n}")));
    }
    if replications == 0 {
        return Err(Error::Validation("replications must be >= 1".into()));
    }
    if !(0.0..=0.5).contains(&warmup) {
        return Err(Error::Validation(format!(
            "warmup must lie in [0, 0.5], got {warmup}"
        )));
    }
    Ok(())
}

fn check_lambdas(lambdas: &[f64], mu: f64, scenario: Scenario) -> Result<()> {
    if lambdas.is_empty() {
        return Err(Error::Validation("lambda grid is empty".into()));
    }
    let k = scenario.sources().count() as f64;
    for &l in lambdas {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::Validation(format!(
                "lambda {l} must be finite and > 0"
            )));
        }
        let load = k * l / mu;
        if load.is_nan() || load >= 1.0 {
            return Err(Error::Validation(format!(
                "lambda {l} is unstable for {}: load {} >= 1",
                scenario.name(),
                k * l / mu
            )));
        }
    }
    Ok(())
}

/// Where sweep coefficients come from: `"builtin"` or `{"file": "theta.json"}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaSource {
    #[default]
    Builtin,
    File(PathBuf),
}

/// Load sweep comparing simulated PAoI with the requested bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub scenario: Scenario,
    #[serde(default = "default_mu")]
    pub mu: f64,
    /// Per-source arrival rates; scenario default when absent.
    #[serde(default)]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default = "exponential")]
    pub interarrival: DistributionFamily,
    #[serde(default = "exponential")]
    pub service: DistributionFamily,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_warmup")]
    pub warmup: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub theta: ThetaSource,
    /// Scenario default when absent; `[]` gives simulation columns only.
    #[serde(default)]
    pub methods: Option<Vec<Method>>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

impl SweepConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            mu: 1.0,
            lambdas: None,
            interarrival: DistributionFamily::Exponential,
            service: DistributionFamily::Exponential,
            n: DEFAULT_N,
            replications: DEFAULT_REPLICATIONS,
            warmup: DEFAULT_WARMUP,
            seed: 0,
            theta: ThetaSource::Builtin,
            methods: None,
            alpha: DEFAULT_ALPHA,
        }
    }

    /// Loads a config; a relative theta path is resolved against the
    /// config's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: SweepConfig = read_json(path)?;
        if let ThetaSource::File(p) = &cfg.theta {
            if p.is_relative() {
                let base = path.parent().unwrap_or(Path::new(""));
                cfg.theta = ThetaSource::File(base.join(p));
            }
        }
        Ok(cfg)
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.lambdas
            .clone()
            .unwrap_or_else(|| default_sweep_lambdas(self.scenario, self.mu))
    }

    pub fn methods(&self) -> Vec<Method> {
        self.methods
            .clone()
            .unwrap_or_else(|| default_methods(self.scenario))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::Validation(format!(
                "mu must be finite and > 0, got {}",
                self.mu
            )));
        }
        check_lambdas(&self.lambdas(), self.mu, self.scenario)?;
        check_replication(self.n, self.replications, self.warmup)?;
        if !(self.alpha > 1.0 && self.alpha <= 2.0) {
            return Err(Error::Validation(format!(
                "alpha must lie in (1, 2], got {}",
                self.alpha
            )));
        }
        let methods = self.methods();
        for (i, m) in methods.iter().enumerate() {
            if m.sources() != self.scenario.sources() {
                return Err(Error::Validation(format!(
                    "method {m} does not apply to a {} sweep",
                    self.scenario.name()
                )));
            }
            if methods[..i].contains(m) {
                return Err(Error::Validation(format!("method {m} listed twice")));
            }
        }
        self.interarrival.at_mean(1.0)?;
        self.service.at_mean(1.0)?;
        Ok(())
    }
}

/// A single replicated simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    #[serde(default = "default_scenario")]
    pub scenario: Scenario,
    /// Per-source interarrival law.
    pub arrival: DistributionSpec,
    pub service: DistributionSpec,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_warmup")]
    pub warmup: f64,
    #[serde(default)]
    pub seed: u64,
}

impl SimulateConfig {
    pub fn replication_config(&self) -> Result<ReplicationConfig> {
        check_replication(self.n, self.replications, self.warmup)?;
        let cfg = ReplicationConfig {
            sources: self.scenario.sources(),
            arrival: self.arrival,
            service: self.service,
            n: self.n,
            replications: self.replications,
            warmup: self.warmup,
            master_seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub arrival: DistributionSpec,
    pub service: DistributionSpec,
}

/// Calibration grid: `lambdas x interarrival_families x service_families`
/// plus any explicit `points`. With neither `lambdas` nor `points` the
/// scenario's default rates are used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationGrid {
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default)]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default = "calibration_families")]
    pub interarrival_families: Vec<DistributionFamily>,
    #[serde(default = "calibration_families")]
    pub service_families: Vec<DistributionFamily>,
    #[serde(default)]
    pub points: Vec<PointSpec>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_warmup")]
    pub warmup: f64,
    #[serde(default)]
    pub seed: u64,
}

impl CalibrationGrid {
    pub fn settings(&self) -> ReplicationSettings {
        ReplicationSettings {
            n: self.n,
            replications: self.replications,
            warmup: self.warmup,
            master_seed: self.seed,
        }
    }

    /// Expands the grid in (lambda, interarrival family, service family)
    /// order, followed by the explicit points.
    pub fn points(&self, scenario: Scenario) -> Result<Vec<CalibrationPoint>> {
        check_replication(self.n, self.replications, self.warmup)?;
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::Validation(format!(
                "mu must be finite and > 0, got {}",
                self.mu
            )));
        }
        let lambdas = match &self.lambdas {
            Some(l) => l.clone(),
            None if self.points.is_empty() => default_calibration_lambdas(scenario, self.mu),
            None => Vec::new(),
        };
        if !lambdas.is_empty() {
            check_lambdas(&lambdas, self.mu, scenario)?;
        }
        let mut out = Vec::new();
        for &l in &lambdas {
            for fa in &self.interarrival_families {
                for fs in &self.service_families {
                    out.push(CalibrationPoint {
                        arrival: fa.at_mean(1.0 / l)?,
                        service: fs.at_mean(1.0 / self.mu)?,
                    });
                }
            }
        }
        out.extend(self.points.iter().map(|p| CalibrationPoint {
            arrival: p.arrival,
            service: p.service,
        }));
        if out.is_empty() {
            return Err(Error::Validation("calibration grid has no points".into()));
        }
        Ok(out)
    }
}
