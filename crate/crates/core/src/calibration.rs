//! Variability-parameter calibration.
//!
//! Moments are mapped to uncertainty-set parameters by
//!
//! ```text
//! gamma_a = sigma_a
//! gamma_s = sqrt(theta0 + theta1 sigma_s^2 + theta2 sigma_a^2 rho^2) - sigma_a
//! ```
//!
//! The coefficients are fitted by ordinary least squares of
//! `(gamma_s* + sigma_a)^2` on `[1, sigma_s^2, sigma_a^2 rho^2]`, where
//! `gamma_s*` is the value that makes the closed-form bound hit the
//! simulated mean system time. The mapping is linear in theta after that
//! transform, so the fit is a plain linear solve.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::bounds::{bound_robust2_single, bound_robust3_two, UncertaintyParams};
use crate::math::FloatExt;
use crate::simulator::{replicate, ReplicationConfig, ReplicationSummary, Sources, SystemParams};
use crate::stochastic::{derive_seed, DistributionSpec};
use crate::{Error, Result};

/// Tail coefficient used throughout calibration.
pub const CALIBRATION_ALPHA: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum Scenario {
    SingleSource,
    TwoSource,
}

impl Scenario {
    pub fn sources(self) -> Sources {
        match self {
            Scenario::SingleSource => Sources::One,
            Scenario::TwoSource => Sources::Two,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scenario::SingleSource => "single_source",
            Scenario::TwoSource => "two_source",
        }
    }
}

impl core::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single_source" | "single" | "one" => Ok(Scenario::SingleSource),
            "two_source" | "two" => Ok(Scenario::TwoSource),
            _ => Err(Error::InvalidInput(format!("unknown scenario `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CalibrationCoefficients {
    pub scenario: Scenario,
    pub theta0: f64,
    pub theta1: f64,
    pub theta2: f64,
}

/// Published coefficients for the two scenarios.
pub fn builtin_theta(scenario: Scenario) -> CalibrationCoefficients {
    let (theta0, theta1, theta2) = match scenario {
        Scenario::SingleSource => (-0.376, 3.978, 0.5),
        Scenario::TwoSource => (-1.302, 6.021, 0.7),
    };
    CalibrationCoefficients {
        scenario,
        theta0,
        theta1,
        theta2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariabilityMapping {
    pub gamma_a: f64,
    /// Signed; negative values mean the regression is extrapolating.
    pub gamma_s: f64,
    pub radicand: f64,
}

impl VariabilityMapping {
    pub fn extrapolated(&self) -> bool {
        self.gamma_s < 0.0
    }

    pub fn uncertainty(&self, alpha: f64) -> Result<UncertaintyParams> {
        UncertaintyParams::new(alpha, self.gamma_a, self.gamma_s)
    }
}

/// Maps `(sigma_a, sigma_s, rho)` to `(gamma_a, gamma_s)`. `gamma_s` is
/// left signed; `gamma_a + gamma_s = sqrt(radicand) >= 0` always holds.
pub fn map_variability(
    sigma_a: f64,
    sigma_s: f64,
    rho: f64,
    theta: &CalibrationCoefficients,
) -> Result<VariabilityMapping> {
    for (name, v) in [("sigma_a", sigma_a), ("sigma_s", sigma_s), ("rho", rho)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::param(name, v, "must be finite and >= 0"));
        }
    }
    let radicand = theta.theta0
        + theta.theta1 * sigma_s * sigma_s
        + theta.theta2 * sigma_a * sigma_a * rho * rho;
    if radicand.is_nan() || radicand < 0.0 {
        return Err(Error::CalibrationOutOfRange { radicand });
    }
    Ok(VariabilityMapping {
        gamma_a: sigma_a,
        gamma_s: radicand.sqrt_() - sigma_a,
        radicand,
    })
}

/// Closed-form bound of the scenario implied by `sys.sources`.
pub fn scenario_bound(sys: &SystemParams, unc: &UncertaintyParams) -> Result<f64> {
    let b = match sys.sources {
        Sources::One => bound_robust2_single(sys, unc)?,
        Sources::Two => bound_robust3_two(sys, unc)?,
    };
    Ok(b.value)
}

/// Finds the `gamma_s` at which the scenario bound equals
/// `target_system_time`, by bisection over `[-gamma_a, hi]` with `hi`
/// doubled until the bound reaches the target. The bound is strictly
/// increasing in `gamma_s`, so the root is unique.
pub fn invert_gamma_s(
    sys: &SystemParams,
    alpha: f64,
    gamma_a: f64,
    target_system_time: f64,
) -> Result<f64> {
    sys.require_stable()?;
    if !(target_system_time.is_finite() && target_system_time > 0.0) {
        return Err(Error::param(
            "target_system_time",
            target_system_time,
            "must be > 0",
        ));
    }
    let bound = |gs: f64| -> Result<f64> {
        scenario_bound(sys, &UncertaintyParams::new(alpha, gamma_a, gs)?)
    };

    let mut lo = -gamma_a;
    let floor = bound(lo)?;
    if target_system_time < floor {
        return Err(Error::NoSolution {
            target: target_system_time,
            floor,
        });
    }
    if target_system_time == floor {
        return Ok(lo);
    }
    let mut hi = 1.0_f64.max(gamma_a);
    let mut grow = 0;
    while bound(hi)? < target_system_time {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 1100 {
            return Err(Error::InvalidInput("could not bracket gamma_s".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if bound(mid)? < target_system_time {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi.abs_().max(lo.abs_()).max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One calibration observation.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationRow {
    pub rho: f64,
    pub sigma_a: f64,
    pub sigma_s: f64,
    pub gamma_s_star: f64,
    pub kind_a: String,
    pub kind_s: String,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CalibrationDataset {
    pub rows: Vec<CalibrationRow>,
}

impl CalibrationDataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Regression target `(gamma_s* + sigma_a)^2` and regressors
/// `[1, sigma_s^2, sigma_a^2 rho^2]` of a row.
pub fn regression_terms(row: &CalibrationRow) -> ([f64; 3], f64) {
    let x = [
        1.0,
        row.sigma_s * row.sigma_s,
        row.sigma_a * row.sigma_a * row.rho * row.rho,
    ];
    let y = (row.gamma_s_star + row.sigma_a) * (row.gamma_s_star + row.sigma_a);
    (x, y)
}

/// Least squares `min ||X b - y||` for a three-column design via
/// Householder QR.
fn least_squares3(x: &[[f64; 3]], y: &[f64]) -> Result<[f64; 3]> {
    let rows = x.len();
    if rows < 3 {
        return Err(Error::Underdetermined { rows });
    }
    let mut a: Vec<[f64; 3]> = x.to_vec();
    let mut b: Vec<f64> = y.to_vec();
    let norms: [f64; 3] =
        core::array::from_fn(|j| a.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt_());

    for j in 0..3 {
        let norm = a[j..].iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt_();
        if norm.is_nan() || norm <= 1e-10 * norms[j] || norms[j] == 0.0 {
            return Err(Error::SingularDesign);
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        // v = a[j.., j] - alpha e_1
        let mut v: Vec<f64> = a[j..].iter().map(|r| r[j]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for c in j..3 {
            let dot: f64 = v.iter().zip(&a[j..]).map(|(vi, r)| vi * r[c]).sum();
            let s = 2.0 * dot / vnorm2;
            for (vi, r) in v.iter().zip(a[j..].iter_mut()) {
                r[c] -= s * vi;
            }
        }
        let dot: f64 = v.iter().zip(&b[j..]).map(|(vi, bi)| vi * bi).sum();
        let s = 2.0 * dot / vnorm2;
        for (vi, bi) in v.iter().zip(b[j..].iter_mut()) {
            *bi -= s * vi;
        }
    }

    let mut beta = [0.0; 3];
    for j in (0..3).rev() {
        let mut acc = b[j];
        for c in j + 1..3 {
            acc -= a[j][c] * beta[c];
        }
        beta[j] = acc / a[j][j];
    }
    Ok(beta)
}

/// Fits `(theta0, theta1, theta2)` by ordinary least squares.
pub fn fit_theta(
    dataset: &CalibrationDataset,
    scenario: Scenario,
) -> Result<CalibrationCoefficients> {
    let (x, y): (Vec<[f64; 3]>, Vec<f64>) = dataset.rows.iter().map(regression_terms).unzip();
    let [theta0, theta1, theta2] = least_squares3(&x, &y)?;
    Ok(CalibrationCoefficients {
        scenario,
        theta0,
        theta1,
        theta2,
    })
}

/// A grid point: per-source interarrival law and service law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationPoint {
    pub arrival: DistributionSpec,
    pub service: DistributionSpec,
}

/// Simulation settings shared by every grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationSettings {
    pub n: usize,
    pub replications: usize,
    pub warmup: f64,
    pub master_seed: u64,
}

/// Seed lane reserved for per-grid-point master seeds.
const GRID_LANE: u64 = 3;

/// Replication config for grid point `index`; its master seed is
/// `derive_seed(settings.master_seed, index, 3)`.
pub fn point_config(
    point: &CalibrationPoint,
    index: usize,
    scenario: Scenario,
    settings: &ReplicationSettings,
) -> ReplicationConfig {
    ReplicationConfig {
        sources: scenario.sources(),
        arrival: point.arrival,
        service: point.service,
        n: settings.n,
        replications: settings.replications,
        warmup: settings.warmup,
        master_seed: derive_seed(settings.master_seed, index as u64, GRID_LANE),
    }
}

/// Builds one dataset row: simulate, then invert the bound at the simulated
/// mean system time with `gamma_a = sigma_a`.
pub fn calibration_row_with<F>(
    point: &CalibrationPoint,
    index: usize,
    scenario: Scenario,
    settings: &ReplicationSettings,
    run: F,
) -> Result<CalibrationRow>
where
    F: FnOnce(&ReplicationConfig) -> Result<ReplicationSummary>,
{
    let cfg = point_config(point, index, scenario, settings);
    let sys = cfg.system();
    sys.require_stable()?;
    let (a, s) = (point.arrival.moments(), point.service.moments());
    let sigma_a = a.std_dev().ok_or(Error::VarianceUnavailable)?;
    let sigma_s = s.std_dev().ok_or(Error::VarianceUnavailable)?;
    let summary = run(&cfg)?;
    let gamma_s_star = invert_gamma_s(&sys, CALIBRATION_ALPHA, sigma_a, summary.mean_system_time)?;
    Ok(CalibrationRow {
        rho: sys.lambda / sys.mu,
        sigma_a,
        sigma_s,
        gamma_s_star,
        kind_a: point.arrival.kind_name().to_string(),
        kind_s: point.service.kind_name().to_string(),
        seed: cfg.master_seed,
    })
}

/// Sequential dataset construction. Failed points are skipped and reported
/// by grid index.
pub fn build_calibration_dataset(
    points: &[CalibrationPoint],
    scenario: Scenario,
    settings: &ReplicationSettings,
) -> (CalibrationDataset, Vec<(usize, Error)>) {
    let mut dataset = CalibrationDataset::default();
    let mut failures = Vec::new();
    for (i, p) in points.iter().enumerate() {
        match calibration_row_with(p, i, scenario, settings, replicate) {
            Ok(row) => dataset.rows.push(row),
            Err(e) => failures.push((i, e)),
        }
    }
    (dataset, failures)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        let s = builtin_theta(Scenario::SingleSource);
        assert_eq!((s.theta0, s.theta1, s.theta2), (-0.376, 3.978, 0.5));
        let t = builtin_theta(Scenario::TwoSource);
        assert_eq!((t.theta0, t.theta1, t.theta2), (-1.302, 6.021, 0.7));
        assert_ne!(s, t);
    }

    #[test]
    fn mapping_hand_value() {
        let m = map_variability(1.0, 1.0, 0.5, &builtin_theta(Scenario::SingleSource)).unwrap();
        assert_eq!(m.gamma_a, 1.0);
        assert!((m.radicand - 3.727).abs() < 1e-12);
        assert!((m.gamma_s - (3.727f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!((m.gamma_s - 0.930_55).abs() < 1e-4);
        assert!(!m.extrapolated());
    }

    #[test]
    fn mapping_rejects_negative_radicand() {
        let e = map_variability(0.0, 0.0, 0.5, &builtin_theta(Scenario::SingleSource)).unwrap_err();
        assert_eq!(e, Error::CalibrationOutOfRange { radicand: -0.376 });
    }

    #[test]
    fn light_load_mapping_extrapolates() {
        let theta = builtin_theta(Scenario::SingleSource);
        let m = map_variability(20.0, 1.0, 0.05, &theta).unwrap();
        assert!(m.extrapolated());
        assert!((m.gamma_a + m.gamma_s - m.radicand.sqrt()).abs() < 1e-12);
        assert!(m.uncertainty(2.0).is_ok());
    }

    #[test]
    fn inversion_at_zero() {
        let sys = SystemParams::new(0.6, 1.0, 500, Sources::One).unwrap();
        let target = scenario_bound(&sys, &UncertaintyParams::new(2.0, 1.5, 0.0).unwrap()).unwrap();
        let gs = invert_gamma_s(&sys, 2.0, 1.5, target).unwrap();
        assert!(gs.abs() <= 1e-8 * target, "{gs}");
    }

    #[test]
    fn inversion_is_monotone() {
        let sys = SystemParams::new(0.3, 1.0, 1000, Sources::Two).unwrap();
        let a = invert_gamma_s(&sys, 2.0, 1.0, 3.0).unwrap();
        let b = invert_gamma_s(&sys, 2.0, 1.0, 4.0).unwrap();
        assert!(b > a);
    }

    #[test]
    fn inversion_below_floor_fails() {
        // with gamma_a = 0 the smallest attainable bound is 1/mu
        let sys = SystemParams::new(0.5, 1.0, 100, Sources::One).unwrap();
        assert!(matches!(
            invert_gamma_s(&sys, 2.0, 0.0, 0.5),
            Err(Error::NoSolution { .. })
        ));
    }

    fn row(rho: f64, sa: f64, ss: f64, gs: f64) -> CalibrationRow {
        CalibrationRow {
            rho,
            sigma_a: sa,
            sigma_s: ss,
            gamma_s_star: gs,
            kind_a: "exponential".into(),
            kind_s: "exponential".into(),
            seed: 0,
        }
    }

    #[test]
    fn underdetermined_and_singular() {
        let d = CalibrationDataset {
            rows: alloc::vec![row(0.5, 1.0, 1.0, 0.3), row(0.6, 1.0, 1.2, 0.2)],
        };
        assert_eq!(
            fit_theta(&d, Scenario::SingleSource),
            Err(Error::Underdetermined { rows: 2 })
        );
        // sigma_s constant: column 2 is a multiple of column 1
        let d = CalibrationDataset {
            rows: alloc::vec![
                row(0.5, 1.0, 1.0, 0.3),
                row(0.6, 1.0, 1.0, 0.2),
                row(0.7, 2.0, 1.0, 0.1)
            ],
        };
        assert_eq!(
            fit_theta(&d, Scenario::SingleSource),
            Err(Error::SingularDesign)
        );
    }

    #[test]
    fn exact_fit_on_square_system() {
        let theta = builtin_theta(Scenario::SingleSource);
        let rows = [(0.2, 5.0, 1.0), (0.5, 1.0, 0.5), (0.8, 0.6, 2.0)]
            .iter()
            .map(|&(rho, sa, ss)| {
                let m = map_variability(sa, ss, rho, &theta).unwrap();
                row(rho, sa, ss, m.gamma_s)
            })
            .collect();
        let fit = fit_theta(&CalibrationDataset { rows }, Scenario::SingleSource).unwrap();
        assert!((fit.theta0 - theta.theta0).abs() < 1e-10);
        assert!((fit.theta1 - theta.theta1).abs() < 1e-10);
        assert!((fit.theta2 - theta.theta2).abs() < 1e-10);
    }
}
