//! Load sweeps: simulate every grid point, evaluate the requested bounds and
//! score them with the error-percent metric.

use paoi_core::bounds::{evaluate, kingman_for, paoi_from_system_bound, Method};
use paoi_core::calibration::{builtin_theta, map_variability, CalibrationCoefficients};
use paoi_core::simulator::{ReplicationConfig, SystemParams};
use paoi_core::stochastic::derive_seed;
use rayon::prelude::*;

use crate::config::{SweepConfig, ThetaSource};
use crate::dataset::read_theta;
use crate::parallel::replicate_par;
use crate::{Error, Result};

/// Seed lane for per-grid-point master seeds.
const GRID_LANE: u64 = 3;

/// Mean absolute relative deviation of `bound` from `simulated`, in percent.
pub fn error_percent(simulated: &[f64], bound: &[f64]) -> Result<f64> {
    if simulated.len() != bound.len() {
        return Err(Error::Validation(format!(
            "series lengths differ: {} simulated vs {} bound",
            simulated.len(),
            bound.len()
        )));
    }
    if simulated.is_empty() {
        return Err(Error::Validation("series are empty".into()));
    }
    let mut total = 0.0;
    for (&s, &b) in simulated.iter().zip(bound) {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::Validation(format!(
                "simulated value {s} must be > 0"
            )));
        }
        total += (b - s).abs() / s;
    }
    Ok(100.0 * total / simulated.len() as f64)
}

/// One `(lambda, method)` line of a report. `method` is `None` only when the
/// sweep evaluated no methods; bound cells are `None` when the bound failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub sim_paoi_mean: f64,
    pub sim_paoi_ci95: f64,
    pub method: Option<Method>,
    pub bound_paoi: Option<f64>,
    pub rel_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    /// `None` when the bound failed at every grid point.
    pub error_percent: Option<f64>,
}

/// A grid point (or one method at a grid point) that could not be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct PointIssue {
    pub lambda: f64,
    pub method: Option<Method>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepReport {
    /// Sorted by `(lambda, method name)`.
    pub rows: Vec<SweepRow>,
    /// Sorted by method name.
    pub summary: Vec<MethodSummary>,
    /// Not persisted in the CSV.
    pub issues: Vec<PointIssue>,
    /// Grid points whose mapped `gamma_s` was negative. Not persisted.
    pub extrapolated: Vec<f64>,
}

impl SweepReport {
    pub fn row(&self, lambda: f64, method: Method) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.lambda == lambda && r.method == Some(method))
    }

    pub fn error_percent(&self, method: Method) -> Option<f64> {
        self.summary
            .iter()
            .find(|s| s.method == method)
            .and_then(|s| s.error_percent)
    }

    /// No grid point simulated, or methods were requested and none produced
    /// a bound anywhere.
    pub fn failed(&self) -> bool {
        self.rows.is_empty()
            || (!self.summary.is_empty() && self.summary.iter().all(|s| s.error_percent.is_none()))
    }

    fn sort(&mut self) {
        let name = |m: &Option<Method>| m.map_or("", |m| m.name());
        self.rows.sort_by(|a, b| {
            a.lambda
                .total_cmp(&b.lambda)
                .then_with(|| name(&a.method).cmp(name(&b.method)))
        });
        self.summary
            .sort_by(|a, b| a.method.name().cmp(b.method.name()));
    }
}

/// Coefficients named by the config's theta source. A file must be for the
/// sweep's scenario.
pub fn resolve_theta(cfg: &SweepConfig) -> Result<CalibrationCoefficients> {
    match &cfg.theta {
        ThetaSource::Builtin => Ok(builtin_theta(cfg.scenario)),
        ThetaSource::File(path) => {
            let doc = read_theta(path)?;
            if doc.coefficients.scenario != cfg.scenario {
                return Err(Error::Validation(format!(
                    "{}: coefficients are for {}, sweep is {}",
                    path.display(),
                    doc.coefficients.scenario.name(),
                    cfg.scenario.name()
                )));
            }
            Ok(doc.coefficients)
        }
    }
}

struct PointResult {
    lambda: f64,
    sim: Result<(f64, f64), String>,
    bounds: Vec<(Method, Result<f64, String>)>,
    extrapolated: bool,
}

fn run_point(
    cfg: &SweepConfig,
    theta: &CalibrationCoefficients,
    methods: &[Method],
    index: usize,
    lambda: f64,
) -> PointResult {
    let mut out = PointResult {
        lambda,
        sim: Err(String::new()),
        bounds: Vec::new(),
        extrapolated: false,
    };
    let laws = cfg
        .interarrival
        .at_mean(1.0 / lambda)
        .and_then(|a| Ok((a, cfg.service.at_mean(1.0 / cfg.mu)?)));
    let (arrival, service) = match laws {
        Ok(l) => l,
        Err(e) => {
            out.sim = Err(e.to_string());
            return out;
        }
    };
    let rc = ReplicationConfig {
        sources: cfg.scenario.sources(),
        arrival,
        service,
        n: cfg.n,
        replications: cfg.replications,
        warmup: cfg.warmup,
        master_seed: derive_seed(cfg.seed, index as u64, GRID_LANE),
    };
    out.sim = replicate_par(&rc)
        .map(|s| (s.mean_paoi, s.ci95_paoi))
        .map_err(|e| e.to_string());
    if out.sim.is_err() {
        return out;
    }

    let robust = || -> paoi_core::Result<_> {
        let sigma_a = arrival
            .moments()
            .std_dev()
            .ok_or(paoi_core::Error::VarianceUnavailable)?;
        let sigma_s = service
            .moments()
            .std_dev()
            .ok_or(paoi_core::Error::VarianceUnavailable)?;
        let mapping = map_variability(sigma_a, sigma_s, lambda / cfg.mu, theta)?;
        let unc = mapping.uncertainty(cfg.alpha)?;
        let sys = SystemParams::new(lambda, cfg.mu, cfg.n, cfg.scenario.sources())?;
        Ok((mapping.extrapolated(), unc, sys))
    };
    let robust = if methods.iter().any(|m| *m != Method::Kingman) {
        Some(robust())
    } else {
        None
    };
    if let Some(Ok((extrapolated, ..))) = &robust {
        out.extrapolated = *extrapolated;
    }
    for &m in methods {
        let value = match (m, &robust) {
            (Method::Kingman, _) => kingman_for(&arrival, &service).map_err(|e| e.to_string()),
            (_, Some(Ok((_, unc, sys)))) => evaluate(m, sys, unc).map_err(|e| e.to_string()),
            (_, Some(Err(e))) => Err(e.to_string()),
            (_, None) => unreachable!("mapping computed for non-Kingman methods"),
        };
        out.bounds
            .push((m, value.map(|b| paoi_from_system_bound(&b, lambda))));
    }
    out
}

/// Runs the sweep. Per-point failures are recorded in the report; only an
/// invalid config or unreadable coefficients fail the call.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let theta = resolve_theta(cfg)?;
    let methods = cfg.methods();
    let lambdas = cfg.lambdas();
    let points: Vec<PointResult> = lambdas
        .par_iter()
        .enumerate()
        .map(|(i, &l)| run_point(cfg, &theta, &methods, i, l))
        .collect();

    let mut report = SweepReport::default();
    let mut series: Vec<(Vec<f64>, Vec<f64>)> = vec![(Vec::new(), Vec::new()); methods.len()];
    for p in points {
        let (mean, ci) = match p.sim {
            Ok(v) => v,
            Err(message) => {
                report.issues.push(PointIssue {
                    lambda: p.lambda,
                    method: None,
                    message,
                });
                continue;
            }
        };
        if p.extrapolated {
            report.extrapolated.push(p.lambda);
        }
        if methods.is_empty() {
            report.rows.push(SweepRow {
                lambda: p.lambda,
                sim_paoi_mean: mean,
                sim_paoi_ci95: ci,
                method: None,
                bound_paoi: None,
                rel_error: None,
            });
        }
        for (k, (m, value)) in p.bounds.into_iter().enumerate() {
            let bound = match value {
                Ok(b) => {
                    series[k].0.push(mean);
                    series[k].1.push(b);
                    Some(b)
                }
                Err(message) => {
                    report.issues.push(PointIssue {
                        lambda: p.lambda,
                        method: Some(m),
                        message,
                    });
                    None
                }
            };
            report.rows.push(SweepRow {
                lambda: p.lambda,
                sim_paoi_mean: mean,
                sim_paoi_ci95: ci,
                method: Some(m),
                bound_paoi: bound,
                rel_error: bound.map(|b| (b - mean).abs() / mean),
            });
        }
    }
    for (m, (sim, bound)) in methods.iter().zip(&series) {
        let error_percent = if sim.is_empty() {
            None
        } else {
            Some(error_percent(sim, bound)?)
        };
        report.summary.push(MethodSummary {
            method: *m,
            error_percent,
        });
    }
    report.sort();
    Ok(report)
}
