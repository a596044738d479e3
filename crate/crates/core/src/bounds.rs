//! Worst-case system-time bounds over the uncertainty sets
//!
//! ```text
//! U_s = { X : (sum_{i=k..n} X_i - (n-k+1)/mu) / (n-k+1)^(1/alpha) <= gamma_s, 1 <= k <= n }
//! U_a = { T : (sum_{i=k+1..n} T_i - (n-k)/lambda) / (n-k)^(1/alpha) >= -gamma_a, 0 <= k < n }
//! ```
//!
//! and the classical Kingman bound. Every function returns a system-time
//! bound; [`paoi_from_system_bound`] shifts it by the mean interarrival time
//! to approximate the expected peak age.
//!
//! The single-source worst case is `max_{0<=m<n} f(m)` with
//! `f(m) = (m+1)/mu - m/lambda + gamma_s (m+1)^(1/alpha) + gamma_a m^(1/alpha)`.
//! `f` is concave, so its integer maximizer sits within one of `floor(l)`,
//! where `l` solves a simplified stationarity condition in closed form.
//! The two-source bound works the same way on the half-integer grid
//! `m in {-1/2, 0, 1/2, ..., n/2 - 1}`.

use core::fmt;
use core::str::FromStr;

use alloc::format;

use crate::math::FloatExt;
use crate::simulator::{Sources, SystemParams};
use crate::stochastic::DistributionSpec;
use crate::{Error, Result};

/// Tail coefficient and variability parameters of the uncertainty sets.
///
/// `gamma_s` may be negative (a calibrated mapping can extrapolate below
/// zero) as long as `gamma_a + gamma_s >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyParams {
    alpha: f64,
    gamma_a: f64,
    gamma_s: f64,
}

impl UncertaintyParams {
    pub fn new(alpha: f64, gamma_a: f64, gamma_s: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha <= 2.0) {
            return Err(Error::param("alpha", alpha, "must lie in (1, 2]"));
        }
        if !(gamma_a.is_finite() && gamma_a >= 0.0) {
            return Err(Error::param("gamma_a", gamma_a, "must be finite and >= 0"));
        }
        if !gamma_s.is_finite() || gamma_a + gamma_s < 0.0 {
            return Err(Error::param(
                "gamma_s",
                gamma_s,
                "must be finite with gamma_a + gamma_s >= 0",
            ));
        }
        Ok(Self {
            alpha,
            gamma_a,
            gamma_s,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma_a(&self) -> f64 {
        self.gamma_a
    }

    pub fn gamma_s(&self) -> f64 {
        self.gamma_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "kebab-case")
)]
pub enum Method {
    /// Enumeration of the single-source worst case.
    ExactSingle,
    /// Relaxed closed form, accurate under heavy load only.
    Robust1,
    /// Single-source closed form, exact on the worst case.
    Robust2,
    /// Enumeration of the two-source per-window bound.
    ExactTwo,
    /// Two-source closed form.
    Robust3,
    Kingman,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::ExactSingle,
        Method::Robust1,
        Method::Robust2,
        Method::ExactTwo,
        Method::Robust3,
        Method::Kingman,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::ExactSingle => "exact-single",
            Method::Robust1 => "robust1",
            Method::Robust2 => "robust2",
            Method::ExactTwo => "exact-two",
            Method::Robust3 => "robust3",
            Method::Kingman => "kingman",
        }
    }

    /// Scenario the method is defined for.
    pub fn sources(self) -> Sources {
        match self {
            Method::ExactTwo | Method::Robust3 => Sources::Two,
            _ => Sources::One,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown bound method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    /// System-time bound, never negative.
    pub value: f64,
    pub method: Method,
    /// Maximizing `m` (a half-integer for two-source methods).
    pub maximizer: Option<f64>,
    /// The closed form's hypotheses did not hold and the value came from
    /// enumerating the same objective.
    pub fallback: bool,
    pub lambda: f64,
    pub mu: f64,
    pub n: Option<usize>,
    pub uncertainty: Option<UncertaintyParams>,
}

impl BoundResult {
    fn new(method: Method, sys: &SystemParams, unc: &UncertaintyParams) -> Self {
        Self {
            value: 0.0,
            method,
            maximizer: None,
            fallback: false,
            lambda: sys.lambda,
            mu: sys.mu,
            n: Some(sys.n),
            uncertainty: Some(*unc),
        }
    }

    fn with(mut self, value: f64, maximizer: Option<f64>) -> Self {
        self.value = value.max(0.0);
        self.maximizer = maximizer;
        self
    }
}

fn require(sys: &SystemParams, sources: Sources) -> Result<()> {
    if sys.sources == sources {
        Ok(())
    } else {
        Err(Error::WrongScenario {
            expected: match sources {
                Sources::One => "single-source",
                Sources::Two => "two-source",
            },
        })
    }
}

/// Single-source objective `f(m)`.
fn single_objective(sys: &SystemParams, unc: &UncertaintyParams, m: f64) -> f64 {
    let p = 1.0 / unc.alpha;
    (m + 1.0) / sys.mu - m / sys.lambda
        + unc.gamma_s * (m + 1.0).powf_(p)
        + unc.gamma_a * m.powf_(p)
}

/// Two-source objective at `m = h / 2`; `h = -1` is the window holding only
/// the last update, whose interarrival sum is empty.
fn two_objective(sys: &SystemParams, unc: &UncertaintyParams, h: i64) -> f64 {
    if h < 0 {
        return 1.0 / sys.mu + unc.gamma_s;
    }
    let m = h as f64 / 2.0;
    let p = 1.0 / unc.alpha;
    2.0 * (m + 1.0) / sys.mu - m / sys.lambda
        + 2.0 * unc.gamma_s * (m + 1.0).powf_(p)
        + unc.gamma_a * m.powf_(p)
}

/// Argmax over an ascending candidate sequence; ties keep the first.
fn argmax<I: Iterator<Item = (f64, f64)>>(iter: I) -> Option<(f64, f64)> {
    iter.fold(None, |best, (m, v)| match best {
        Some((_, bv)) if v <= bv => best,
        _ => Some((m, v)),
    })
}

/// Exact single-source worst case by enumerating `m = n - k` over
/// `0..n`. Overloaded systems are allowed since the maximum is finite.
pub fn worst_case_exact_single(sys: &SystemParams, unc: &UncertaintyParams) -> Result<BoundResult> {
    require(sys, Sources::One)?;
    let (m, v) = argmax((0..sys.n).map(|m| {
        let m = m as f64;
        (m, single_objective(sys, unc, m))
    }))
    .expect("n >= 1");
    Ok(BoundResult::new(Method::ExactSingle, sys, unc).with(v, Some(m)))
}

/// Relaxed closed-form bound
/// `(alpha-1)/alpha^(alpha/(alpha-1)) * (gamma_s+gamma_a)^(alpha/(alpha-1))
///  / (1/lambda - 1/mu)^(1/(alpha-1)) + 1/lambda`, independent of `n`.
pub fn bound_robust1_single(sys: &SystemParams, unc: &UncertaintyParams) -> Result<BoundResult> {
    require(sys, Sources::One)?;
    sys.require_stable()?;
    let a = unc.alpha;
    let q = a / (a - 1.0);
    let slack = 1.0 / sys.lambda - 1.0 / sys.mu;
    // grouped as (a-1) * (gamma / (a slack^(1/a)))^q so that alpha near 1
    // overflows only when the bound itself does
    let base = (unc.gamma_s + unc.gamma_a) / (a * slack.powf_(1.0 / a));
    let value = (a - 1.0) * base.powf_(q) + 1.0 / sys.lambda;
    Ok(BoundResult::new(Method::Robust1, sys, unc).with(value, None))
}

/// `l = (alpha * slack / gamma)^(alpha / (1 - alpha))`.
fn stationary_point(alpha: f64, slack: f64, gamma: f64) -> f64 {
    (alpha * slack / gamma).powf_(alpha / (1.0 - alpha))
}

/// Closed-form single-source bound: the maximum of `f` over the
/// candidates `{floor(l) - 1, floor(l), floor(l) + 1}` clipped to
/// `[0, n - 1]`, or `f(n - 1)` when `f` is still increasing at the end of
/// the domain.
pub fn bound_robust2_single(sys: &SystemParams, unc: &UncertaintyParams) -> Result<BoundResult> {
    require(sys, Sources::One)?;
    sys.require_stable()?;
    let base = BoundResult::new(Method::Robust2, sys, unc);
    let gamma = unc.gamma_a + unc.gamma_s;
    if unc.gamma_s < 0.0 || gamma <= 0.0 {
        let exact = worst_case_exact_single(sys, unc)?;
        return Ok(BoundResult {
            fallback: true,
            ..base.with(exact.value, exact.maximizer)
        });
    }

    let last = (sys.n - 1) as f64;
    let l = stationary_point(unc.alpha, 1.0 / sys.lambda - 1.0 / sys.mu, gamma);
    let fl = l.floor_();
    let (m, v) = if !l.is_finite() || last <= fl - 1.0 {
        (last, single_objective(sys, unc, last))
    } else {
        argmax(
            [fl - 1.0, fl, fl + 1.0]
                .into_iter()
                .filter(|&m| (0.0..=last).contains(&m))
                .map(|m| (m, single_objective(sys, unc, m))),
        )
        .expect("floor(l) - 1 <= n - 1 leaves a candidate in the domain")
    };
    Ok(base.with(v, Some(m)))
}

/// Two-source per-window bound enumerated over `j = n - k`:
/// `(j+1)/mu + gamma_s (j+1)^(1/alpha) - (j-1)/(2 lambda) + gamma_a ((j-1)/2)^(1/alpha)`,
/// with `j = 0` read as `1/mu + gamma_s`.
pub fn worst_case_exact_two(sys: &SystemParams, unc: &UncertaintyParams) -> Result<BoundResult> {
    require(sys, Sources::Two)?;
    let p = 1.0 / unc.alpha;
    let (m, v) = argmax((0..sys.n).map(|j| {
        let m = (j as f64 - 1.0) / 2.0;
        let v = if j == 0 {
            1.0 / sys.mu + unc.gamma_s
        } else {
            let j = j as f64;
            (j + 1.0) / sys.mu + unc.gamma_s * (j + 1.0).powf_(p) - (j - 1.0) / (2.0 * sys.lambda)
                + unc.gamma_a * ((j - 1.0) / 2.0).powf_(p)
        };
        (m, v)
    }))
    .expect("n >= 1");
    Ok(BoundResult::new(Method::ExactTwo, sys, unc).with(v, Some(m)))
}

fn enumerate_two(sys: &SystemParams, unc: &UncertaintyParams) -> (f64, f64) {
    let top = sys.n as i64 - 2;
    argmax((-1..=top).map(|h| (h as f64 / 2.0, two_objective(sys, unc, h)))).expect("h = -1")
}

/// Closed-form two-source bound over the half-integer grid, taking the
/// larger of `f(-1/2)` and the best candidate in
/// `{floor(l) - 1, floor(l) - 1/2, floor(l), floor(l) + 1/2, floor(l) + 1}`.
pub fn bound_robust3_two(sys: &SystemParams, unc: &UncertaintyParams) -> Result<BoundResult> {
    require(sys, Sources::Two)?;
    sys.require_stable()?;
    let base = BoundResult::new(Method::Robust3, sys, unc);
    let gamma = unc.gamma_a + 2.0 * unc.gamma_s;
    if unc.gamma_s < 0.0 || gamma <= 0.0 {
        let (m, v) = enumerate_two(sys, unc);
        return Ok(BoundResult {
            fallback: true,
            ..base.with(v, Some(m))
        });
    }

    let edge = (-0.5, two_objective(sys, unc, -1));
    if sys.n == 1 {
        return Ok(base.with(edge.1, Some(edge.0)));
    }
    // work in h = 2m so the grid stays integral
    let top = sys.n as i64 - 2;
    let l = stationary_point(unc.alpha, 1.0 / sys.lambda - 2.0 / sys.mu, gamma);
    let fl = l.floor_();
    let inner = if !l.is_finite() || top as f64 <= 2.0 * (fl - 1.0) {
        (top as f64 / 2.0, two_objective(sys, unc, top))
    } else {
        let fl = fl as i64;
        argmax(
            (2 * fl - 2..=2 * fl + 2)
                .filter(|h| (0..=top).contains(h))
                .map(|h| (h as f64 / 2.0, two_objective(sys, unc, h))),
        )
        .expect("candidate set meets [0, n/2 - 1]")
    };
    let (m, v) = argmax([edge, inner].into_iter()).expect("two entries");
    Ok(base.with(v, Some(m)))
}

/// Kingman's bound `lambda/2 * (var_a + var_s)/(1 - rho) + 1/mu`.
/// Pass `f64::INFINITY` for an unavailable variance.
pub fn kingman_bound(lambda: f64, mu: f64, var_a: f64, var_s: f64) -> Result<BoundResult> {
    let sys = SystemParams::new(lambda, mu, 1, Sources::One)?;
    sys.require_stable()?;
    for v in [var_a, var_s] {
        if v.is_infinite() {
            return Err(Error::VarianceUnavailable);
        }
        if v.is_nan() || v < 0.0 {
            return Err(Error::param("variance", v, "must be >= 0"));
        }
    }
    let rho = lambda / mu;
    let value = lambda / 2.0 * (var_a + var_s) / (1.0 - rho) + 1.0 / mu;
    Ok(BoundResult {
        value,
        method: Method::Kingman,
        maximizer: None,
        fallback: false,
        lambda,
        mu,
        n: None,
        uncertainty: None,
    })
}

/// Kingman's bound from the analytic moments of two laws.
pub fn kingman_for(arrival: &DistributionSpec, service: &DistributionSpec) -> Result<BoundResult> {
    let (a, s) = (arrival.moments(), service.moments());
    let var_a = a.variance.ok_or(Error::VarianceUnavailable)?;
    let var_s = s.variance.ok_or(Error::VarianceUnavailable)?;
    kingman_bound(1.0 / a.mean, 1.0 / s.mean, var_a, var_s)
}

/// Dispatches on `method`. Kingman needs variances rather than
/// uncertainty sets and is not reachable from here.
pub fn evaluate(
    method: Method,
    sys: &SystemParams,
    unc: &UncertaintyParams,
) -> Result<BoundResult> {
    match method {
        Method::ExactSingle => worst_case_exact_single(sys, unc),
        Method::Robust1 => bound_robust1_single(sys, unc),
        Method::Robust2 => bound_robust2_single(sys, unc),
        Method::ExactTwo => worst_case_exact_two(sys, unc),
        Method::Robust3 => bound_robust3_two(sys, unc),
        Method::Kingman => Err(Error::InvalidInput(
            "kingman is evaluated from variances, not uncertainty sets".into(),
        )),
    }
}

/// Expected peak age approximation `bound + 1/lambda`.
pub fn paoi_from_system_bound(bound: &BoundResult, lambda: f64) -> f64 {
    debug_assert!(lambda > 0.0);
    bound.value + 1.0 / lambda
}

/// Whether `services` lies in `U_s` (every suffix sum checked).
pub fn in_service_set(services: &[f64], mu: f64, alpha: f64, gamma_s: f64) -> bool {
    let p = 1.0 / alpha;
    let mut sum = 0.0;
    services.iter().rev().enumerate().all(|(i, &x)| {
        sum += x;
        let len = (i + 1) as f64;
        (sum - len / mu) / len.powf_(p) <= gamma_s
    })
}

/// Whether `interarrivals = (T_1, ..., T_n)` lies in `U_a`, i.e. every
/// non-empty suffix sum is at least `len/lambda - gamma_a len^(1/alpha)`.
pub fn in_arrival_set(interarrivals: &[f64], lambda: f64, alpha: f64, gamma_a: f64) -> bool {
    let p = 1.0 / alpha;
    let mut sum = 0.0;
    interarrivals.iter().rev().enumerate().all(|(i, &t)| {
        sum += t;
        let len = (i + 1) as f64;
        (sum - len / lambda) / len.powf_(p) >= -gamma_a
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(lambda: f64, mu: f64, n: usize) -> SystemParams {
        SystemParams::new(lambda, mu, n, Sources::One).unwrap()
    }

    fn two(lambda: f64, mu: f64, n: usize) -> SystemParams {
        SystemParams::new(lambda, mu, n, Sources::Two).unwrap()
    }

    fn unc(alpha: f64, ga: f64, gs: f64) -> UncertaintyParams {
        UncertaintyParams::new(alpha, ga, gs).unwrap()
    }

    #[test]
    fn uncertainty_validation() {
        assert!(UncertaintyParams::new(1.0, 1.0, 1.0).is_err());
        assert!(UncertaintyParams::new(2.1, 1.0, 1.0).is_err());
        assert!(UncertaintyParams::new(2.0, -1.0, 1.0).is_err());
        assert!(UncertaintyParams::new(2.0, 1.0, -1.5).is_err());
        assert!(UncertaintyParams::new(2.0, 1.0, -0.5).is_ok());
    }

    #[test]
    fn exact_single_deterministic_cases() {
        let b = worst_case_exact_single(&one(0.5, 1.0, 40), &unc(2.0, 0.0, 0.0)).unwrap();
        assert_eq!((b.value, b.maximizer), (1.0, Some(0.0)));

        let b = worst_case_exact_single(&one(2.0, 1.0, 5), &unc(2.0, 0.0, 0.0)).unwrap();
        assert_eq!((b.value, b.maximizer), (3.0, Some(4.0)));
    }

    #[test]
    fn exact_single_wrong_scenario() {
        assert!(worst_case_exact_single(&two(0.2, 1.0, 5), &unc(2.0, 1.0, 1.0)).is_err());
        assert!(worst_case_exact_two(&one(0.2, 1.0, 5), &unc(2.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn robust1_hand_values() {
        let b = bound_robust1_single(&one(0.5, 1.0, 10), &unc(2.0, 1.0, 1.0)).unwrap();
        assert!((b.value - 3.0).abs() < 1e-12);
        let b = bound_robust1_single(&one(0.5, 1.0, 10), &unc(1.5, 0.0, 0.0)).unwrap();
        assert!((b.value - 2.0).abs() < 1e-15);
        assert!(matches!(
            bound_robust1_single(&one(1.0, 1.0, 10), &unc(2.0, 1.0, 1.0)),
            Err(Error::Unstable { .. })
        ));
    }

    #[test]
    fn robust1_alpha_near_one_stays_above_exact() {
        let sys = one(0.2, 1.0, 217);
        let u = unc(1.0 + 1e-3, 2.0, 3.0);
        let relaxed = bound_robust1_single(&sys, &u).unwrap().value;
        assert!(!relaxed.is_nan());
        assert!(relaxed >= worst_case_exact_single(&sys, &u).unwrap().value);
    }

    #[test]
    fn robust2_candidates_match_enumeration() {
        // l = 1, candidates {0, 1, 2}: f = (2, 1 + sqrt 2, sqrt 3 + sqrt 2 - 1)
        let sys = one(0.5, 1.0, 100);
        let u = unc(2.0, 1.0, 1.0);
        let f = |m: f64| single_objective(&sys, &u, m);
        assert!((f(0.0) - 2.0).abs() < 1e-15);
        assert!((f(1.0) - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!((f(2.0) - (3f64.sqrt() + 2f64.sqrt() - 1.0)).abs() < 1e-12);
        let exact = worst_case_exact_single(&sys, &u).unwrap();
        let closed = bound_robust2_single(&sys, &u).unwrap();
        assert_eq!(closed.value, exact.value);
        assert_eq!(closed.maximizer, Some(1.0));
        assert_eq!(exact.maximizer, Some(1.0));
        assert!(!closed.fallback);
    }

    #[test]
    fn robust2_single_update() {
        let b = bound_robust2_single(&one(0.3, 1.0, 1), &unc(1.7, 2.0, 0.8)).unwrap();
        assert!((b.value - 1.8).abs() < 1e-15);
    }

    #[test]
    fn robust2_falls_back_without_variability() {
        let b = bound_robust2_single(&one(0.5, 1.0, 20), &unc(2.0, 0.0, 0.0)).unwrap();
        assert!(b.fallback);
        assert_eq!(b.value, 1.0);
    }

    #[test]
    fn robust2_negative_gamma_s_uses_enumeration() {
        let sys = one(0.05, 1.0, 500);
        let u = unc(2.0, 20.0, -17.97);
        let b = bound_robust2_single(&sys, &u).unwrap();
        assert!(b.fallback);
        assert_eq!(b.value, worst_case_exact_single(&sys, &u).unwrap().value);
    }

    #[test]
    fn exact_two_deterministic_case() {
        let b = worst_case_exact_two(&two(0.2, 1.0, 10), &unc(2.0, 0.0, 0.0)).unwrap();
        assert_eq!(b.value, 2.0);
        assert_eq!(b.maximizer, Some(0.0));
        let b = worst_case_exact_two(&two(0.2, 1.0, 1), &unc(1.5, 3.0, 0.7)).unwrap();
        assert!((b.value - 1.7).abs() < 1e-15);
    }

    #[test]
    fn robust3_small_domains() {
        let b = bound_robust3_two(&two(0.2, 1.0, 10), &unc(2.0, 0.0, 0.0)).unwrap();
        assert_eq!(b.value, 2.0);
        let b = bound_robust3_two(&two(0.2, 1.0, 2), &unc(1.6, 1.3, 0.4)).unwrap();
        assert!((b.value - 2.8).abs() < 1e-15);
        assert_eq!(b.maximizer, Some(0.0));
        let b = bound_robust3_two(&two(0.2, 1.0, 1), &unc(1.6, 1.3, 0.4)).unwrap();
        assert!((b.value - 1.4).abs() < 1e-15);
        assert!(bound_robust3_two(&two(0.5, 1.0, 10), &unc(2.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn robust3_dominates_per_window_enumeration() {
        for &(lambda, ga, gs) in &[(0.1, 1.0, 1.0), (0.3, 4.0, 0.5), (0.45, 0.2, 3.0)] {
            for n in [1, 2, 3, 10, 97] {
                let sys = two(lambda, 1.0, n);
                let u = unc(1.8, ga, gs);
                let r3 = bound_robust3_two(&sys, &u).unwrap().value;
                let ex = worst_case_exact_two(&sys, &u).unwrap().value;
                assert!(ex <= r3 + 1e-12, "{lambda} {n}: {ex} > {r3}");
            }
        }
        // equal when gamma_s = 0
        let sys = two(0.3, 1.0, 50);
        let u = unc(1.5, 2.0, 0.0);
        let r3 = bound_robust3_two(&sys, &u).unwrap().value;
        let ex = worst_case_exact_two(&sys, &u).unwrap().value;
        assert!((r3 - ex).abs() <= 1e-12 * r3);
    }

    #[test]
    fn kingman_values() {
        let b = kingman_bound(0.5, 1.0, 4.0, 1.0).unwrap();
        assert!((b.value - 3.5).abs() < 1e-15);
        assert_eq!(kingman_bound(0.5, 2.0, 0.0, 0.0).unwrap().value, 0.5);
        assert!(matches!(
            kingman_bound(1.0, 1.0, 1.0, 1.0),
            Err(Error::Unstable { .. })
        ));
        assert_eq!(
            kingman_bound(0.5, 1.0, f64::INFINITY, 1.0),
            Err(Error::VarianceUnavailable)
        );
        let heavy = DistributionSpec::pareto(1.5, 1.0).unwrap();
        let svc = DistributionSpec::exponential(1.0).unwrap();
        assert_eq!(kingman_for(&heavy, &svc), Err(Error::VarianceUnavailable));
    }

    #[test]
    fn paoi_shift() {
        let mut b = kingman_bound(0.5, 1.0, 4.0, 1.0).unwrap();
        assert_eq!(paoi_from_system_bound(&b, 0.5), 5.5);
        b.value = 0.0;
        assert_eq!(paoi_from_system_bound(&b, 1.0), 1.0);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("robust9".parse::<Method>().is_err());
    }

    #[test]
    fn membership_checks() {
        assert!(in_service_set(&[1.0, 1.0, 1.0], 1.0, 2.0, 0.0));
        assert!(!in_service_set(&[1.0, 1.0, 1.5], 1.0, 2.0, 0.4));
        assert!(in_service_set(&[1.0, 1.0, 1.5], 1.0, 2.0, 0.5));
        assert!(in_arrival_set(&[2.0, 2.0], 0.5, 2.0, 0.0));
        assert!(!in_arrival_set(&[2.0, 1.0], 0.5, 2.0, 0.9));
        assert!(in_arrival_set(&[2.0, 1.0], 0.5, 2.0, 1.0));
    }

    #[test]
    fn alpha_boundary_is_finite() {
        for alpha in [1.01, 1.1, 1.5, 1.999_999, 2.0] {
            let sys = one(0.9, 1.0, 300);
            let u = unc(alpha, 10.0, 10.0);
            for f in [
                bound_robust1_single,
                bound_robust2_single,
                worst_case_exact_single,
            ] {
                assert!(f(&sys, &u).unwrap().value.is_finite());
            }
        }
    }
}
