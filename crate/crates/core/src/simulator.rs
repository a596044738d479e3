//! FCFS sample-path simulation for single-source and symmetric two-source
//! update systems.
//!
//! Waiting times follow the Lindley recursion
//! `W_i = max(0, W_{i-1} + X_{i-1} - T_i)`, which unrolls to the max-form
//! `S_n = max_k (sum_{i=k..n} X_i - sum_{i=k+1..n} T_i)`. The first
//! interarrival draw is the delay from time zero, so `a_1 = T_1`.

use alloc::format;
use alloc::vec::Vec;

use crate::math::FloatExt;
use crate::stochastic::{derive_seed, sample_stream, DistributionSpec, SampleStream};
use crate::{Error, Result};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum Sources {
    One,
    Two,
}

impl Sources {
    pub fn count(self) -> usize {
        match self {
            Sources::One => 1,
            Sources::Two => 2,
        }
    }
}

/// One queueing scenario. `lambda` is the per-source arrival rate and `n`
/// the number of updates seen by the server.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub lambda: f64,
    pub mu: f64,
    pub n: usize,
    pub sources: Sources,
}

impl SystemParams {
    /// Checks `lambda, mu > 0` and `n >= 1`. Stability is checked by the
    /// operations that need it.
    pub fn new(lambda: f64, mu: f64, n: usize, sources: Sources) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::param("lambda", lambda, "must be finite and > 0"));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::param("mu", mu, "must be finite and > 0"));
        }
        if n == 0 {
            return Err(Error::param("n", 0.0, "must be >= 1"));
        }
        Ok(Self {
            lambda,
            mu,
            n,
            sources,
        })
    }

    /// Total offered load `sources * lambda / mu`.
    pub fn load(&self) -> f64 {
        self.sources.count() as f64 * self.lambda / self.mu
    }

    pub fn is_stable(&self) -> bool {
        self.load() < 1.0
    }

    pub fn require_stable(&self) -> Result<()> {
        if self.is_stable() {
            Ok(())
        } else {
            Err(Error::Unstable { load: self.load() })
        }
    }
}

/// Timeline of a single update through the server.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateRecord {
    pub arrival: f64,
    pub service: f64,
    pub waiting: f64,
    pub finish: f64,
    /// 1 or 2; always 1 in a single-source run.
    pub source: u8,
}

impl UpdateRecord {
    pub fn system_time(&self) -> f64 {
        self.waiting + self.service
    }

    pub fn start(&self) -> f64 {
        self.arrival + self.waiting
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueueResult {
    pub sources: Sources,
    /// Updates in server (arrival) order.
    pub updates: Vec<UpdateRecord>,
}

impl QueueResult {
    pub fn len(&self) -> usize {
        self.updates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.updates.is_empty()
    }

    pub fn system_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.updates.iter().map(UpdateRecord::system_time)
    }
}

/// One peak-age sample `P = T + S`, taken just before the update at
/// `update` (an index into [`QueueResult::updates`]) is delivered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakSample {
    pub update: usize,
    pub interarrival: f64,
    pub system_time: f64,
    pub peak: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PAoITrace {
    pub samples: Vec<PeakSample>,
}

impl PAoITrace {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> Option<f64> {
        if self.samples.is_empty() {
            None
        } else {
            Some(self.samples.iter().map(|s| s.peak).sum::<f64>() / self.samples.len() as f64)
        }
    }
}

/// Lindley recursion over `gaps[i] = a_i - a_{i-1}` (`gaps[0]` is the first
/// arrival time).
fn run_queue(gaps: &[f64], services: &[f64], source_of: impl Fn(usize) -> u8) -> Vec<UpdateRecord> {
    let mut updates = Vec::with_capacity(services.len());
    let mut arrival = 0.0;
    let mut waiting = 0.0;
    let mut prev_service = 0.0;
    for (i, (&gap, &service)) in gaps.iter().zip(services).enumerate() {
        arrival += gap;
        if i > 0 {
            waiting = (waiting + prev_service - gap).max(0.0);
        }
        updates.push(UpdateRecord {
            arrival,
            service,
            waiting,
            finish: arrival + waiting + service,
            source: source_of(i),
        });
        prev_service = service;
    }
    updates
}

/// Single-source FCFS queue driven by interarrival and service streams of
/// equal length.
pub fn simulate_fcfs(interarrivals: &SampleStream, services: &SampleStream) -> Result<QueueResult> {
    if interarrivals.len() != services.len() {
        return Err(Error::InvalidInput(format!(
            "{} interarrival times but {} service times",
            interarrivals.len(),
            services.len()
        )));
    }
    if services.is_empty() {
        return Err(Error::InvalidInput("empty sample path".into()));
    }
    Ok(QueueResult {
        sources: Sources::One,
        updates: run_queue(interarrivals.values(), services.values(), |_| 1),
    })
}

/// Peak ages `P_i = T_i + S_i` for `i = 2..n`. A one-update path has no peak.
pub fn paoi_trace_single(result: &QueueResult, interarrivals: &SampleStream) -> Result<PAoITrace> {
    if result.sources != Sources::One {
        return Err(Error::WrongScenario {
            expected: "single-source",
        });
    }
    if result.len() != interarrivals.len() {
        return Err(Error::InvalidInput(format!(
            "trace has {} updates but {} interarrival times",
            result.len(),
            interarrivals.len()
        )));
    }
    let samples = result
        .updates
        .iter()
        .zip(interarrivals.values())
        .enumerate()
        .skip(1)
        .map(|(i, (u, &t))| {
            let s = u.system_time();
            PeakSample {
                update: i,
                interarrival: t,
                system_time: s,
                peak: t + s,
            }
        })
        .collect();
    Ok(PAoITrace { samples })
}

fn cumulative(stream: &SampleStream) -> Vec<f64> {
    let mut t = 0.0;
    stream
        .values()
        .iter()
        .map(|&x| {
            t += x;
            t
        })
        .collect()
}

/// Merges two sources' absolute arrival times into server order, source 1
/// first on ties. Returns `(arrival, source)` pairs.
fn merge_arrivals(a1: &[f64], a2: &[f64]) -> Vec<(f64, u8)> {
    let mut merged = Vec::with_capacity(a1.len() + a2.len());
    let (mut i, mut j) = (0, 0);
    while i < a1.len() || j < a2.len() {
        let take_first = j == a2.len() || (i < a1.len() && a1[i] <= a2[j]);
        if take_first {
            merged.push((a1[i], 1));
            i += 1;
        } else {
            merged.push((a2[j], 2));
            j += 1;
        }
    }
    merged
}

/// Two-source FCFS queue on explicit absolute arrival times. Each input
/// list must be non-decreasing; `services` is consumed in merged order.
pub fn simulate_two_source_at(
    arrivals_1: &[f64],
    arrivals_2: &[f64],
    services: &[f64],
) -> Result<QueueResult> {
    let total = arrivals_1.len() + arrivals_2.len();
    if total == 0 {
        return Err(Error::InvalidInput("both sources are empty".into()));
    }
    if services.len() != total {
        return Err(Error::InvalidInput(format!(
            "{total} arrivals but {} service times",
            services.len()
        )));
    }
    for (s, a) in [(1, arrivals_1), (2, arrivals_2)] {
        if a.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || a.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidInput(format!(
                "arrival times of source {s} must be finite, >= 0 and non-decreasing"
            )));
        }
    }
    if services.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::InvalidInput(
            "service times must be finite and > 0".into(),
        ));
    }
    let merged = merge_arrivals(arrivals_1, arrivals_2);
    let mut gaps = Vec::with_capacity(total);
    let mut prev = 0.0;
    for &(a, _) in &merged {
        gaps.push(a - prev);
        prev = a;
    }
    let mut updates = run_queue(&gaps, services, |i| merged[i].1);
    // keep the exact merged timestamps rather than re-accumulated gaps
    for (u, &(a, _)) in updates.iter_mut().zip(&merged) {
        u.arrival = a;
        u.finish = a + u.waiting + u.service;
    }
    Ok(QueueResult {
        sources: Sources::Two,
        updates,
    })
}

/// Two symmetric sources sharing one FCFS server. Arrivals are merged by
/// time and each merged update takes the next draw from `service_spec`
/// (seeded with `seed`).
pub fn simulate_two_source(
    interarrivals_1: &SampleStream,
    interarrivals_2: &SampleStream,
    service_spec: &DistributionSpec,
    seed: u64,
) -> Result<QueueResult> {
    let total = interarrivals_1.len() + interarrivals_2.len();
    if total == 0 {
        return Err(Error::InvalidInput("both sources are empty".into()));
    }
    let services = sample_stream(service_spec, total, seed)?;
    simulate_two_source_at(
        &cumulative(interarrivals_1),
        &cumulative(interarrivals_2),
        services.values(),
    )
}

/// Per-source peak ages `P^{(s)} = f^{(s)}_j - a^{(s)}_{j-1}`.
pub fn paoi_trace_two_source(result: &QueueResult) -> Result<(PAoITrace, PAoITrace)> {
    if result.sources != Sources::Two {
        return Err(Error::WrongScenario {
            expected: "two-source",
        });
    }
    let mut traces = [PAoITrace::default(), PAoITrace::default()];
    let mut last_arrival: [Option<f64>; 2] = [None, None];
    for (i, u) in result.updates.iter().enumerate() {
        let s = match u.source {
            1 => 0,
            2 => 1,
            other => {
                return Err(Error::InvalidInput(format!(
                    "update {i} has source id {other}"
                )))
            }
        };
        if let Some(prev) = last_arrival[s] {
            let system_time = u.system_time();
            let interarrival = u.arrival - prev;
            traces[s].samples.push(PeakSample {
                update: i,
                interarrival,
                system_time,
                peak: interarrival + system_time,
            });
        }
        last_arrival[s] = Some(u.arrival);
    }
    let [t1, t2] = traces;
    Ok((t1, t2))
}

/// Everything `replicate` needs: scenario, laws, path length, replication
/// count, warmup fraction and master seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationConfig {
    pub sources: Sources,
    /// Per-source interarrival law.
    pub arrival: DistributionSpec,
    pub service: DistributionSpec,
    /// Updates seen by the server per replication.
    pub n: usize,
    pub replications: usize,
    /// Fraction of leading updates discarded before averaging.
    pub warmup: f64,
    pub master_seed: u64,
}

impl ReplicationConfig {
    pub fn system(&self) -> SystemParams {
        SystemParams {
            lambda: self.arrival.rate(),
            mu: self.service.rate(),
            n: self.n,
            sources: self.sources,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::param("replications", 0.0, "must be >= 1"));
        }
        if !(0.0..=0.5).contains(&self.warmup) {
            return Err(Error::param("warmup", self.warmup, "must lie in [0, 0.5]"));
        }
        if self.n < 2 {
            return Err(Error::param("n", self.n as f64, "must be >= 2"));
        }
        Ok(())
    }

    fn warmup_cut(&self) -> usize {
        (self.warmup * self.n as f64).floor_() as usize
    }
}

/// Post-warmup averages of one replication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationOutcome {
    pub mean_paoi: f64,
    pub mean_system_time: f64,
    /// Per-source mean peak age; source 2 is NaN for single-source runs.
    pub mean_paoi_by_source: [f64; 2],
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    (count > 0).then(|| sum / count as f64)
}

fn no_samples() -> Error {
    Error::InvalidInput("no peak-age samples remain after warmup".into())
}

/// Runs replication `index` of `cfg`. Seeds come from
/// [`derive_seed`]`(master_seed, index, lane)`.
pub fn run_replication(cfg: &ReplicationConfig, index: usize) -> Result<ReplicationOutcome> {
    cfg.validate()?;
    let seed = |lane| derive_seed(cfg.master_seed, index as u64, lane);
    let cut = cfg.warmup_cut();
    match cfg.sources {
        Sources::One => {
            let arrivals = sample_stream(&cfg.arrival, cfg.n, seed(1))?;
            let services = sample_stream(&cfg.service, cfg.n, seed(0))?;
            let result = simulate_fcfs(&arrivals, &services)?;
            let trace = paoi_trace_single(&result, &arrivals)?;
            let mean_paoi = mean(
                trace
                    .samples
                    .iter()
                    .filter(|s| s.update >= cut)
                    .map(|s| s.peak),
            )
            .ok_or_else(no_samples)?;
            let mean_system_time = mean(result.system_times().skip(cut)).ok_or_else(no_samples)?;
            Ok(ReplicationOutcome {
                mean_paoi,
                mean_system_time,
                mean_paoi_by_source: [mean_paoi, f64::NAN],
            })
        }
        Sources::Two => {
            let a1 = cumulative(&sample_stream(&cfg.arrival, cfg.n, seed(1))?);
            let a2 = cumulative(&sample_stream(&cfg.arrival, cfg.n, seed(2))?);
            // keep the first n merged arrivals so both sources stay active
            let merged = merge_arrivals(&a1, &a2);
            let from_1 = merged[..cfg.n].iter().filter(|(_, s)| *s == 1).count();
            let from_2 = cfg.n - from_1;
            let services = sample_stream(&cfg.service, cfg.n, seed(0))?;
            let result = simulate_two_source_at(&a1[..from_1], &a2[..from_2], services.values())?;
            let (t1, t2) = paoi_trace_two_source(&result)?;
            let kept = |t: &PAoITrace| {
                t.samples
                    .iter()
                    .filter(|s| s.update >= cut)
                    .map(|s| s.peak)
                    .collect::<Vec<_>>()
            };
            let (p1, p2) = (kept(&t1), kept(&t2));
            let mean_paoi = mean(p1.iter().chain(&p2).copied()).ok_or_else(no_samples)?;
            let mean_system_time = mean(result.system_times().skip(cut)).ok_or_else(no_samples)?;
            Ok(ReplicationOutcome {
                mean_paoi,
                mean_system_time,
                mean_paoi_by_source: [
                    mean(p1.into_iter()).unwrap_or(f64::NAN),
                    mean(p2.into_iter()).unwrap_or(f64::NAN),
                ],
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationSummary {
    pub replications: usize,
    pub warmup: f64,
    pub mean_paoi: f64,
    pub mean_system_time: f64,
    /// `1.96 * s / sqrt(R)` over replication means; NaN when `R = 1`.
    pub ci95_paoi: f64,
    pub ci95_system_time: f64,
    /// Present for two-source runs.
    pub mean_paoi_by_source: Option<[f64; 2]>,
    /// Offered load was >= 1; means may not have converged.
    pub unstable: bool,
}

fn mean_and_half_width(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (m, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, Z95 * (var / n).sqrt_())
}

/// Aggregates replication outcomes, in index order, into a summary.
pub fn summarize(cfg: &ReplicationConfig, outcomes: &[ReplicationOutcome]) -> ReplicationSummary {
    let paoi: Vec<f64> = outcomes.iter().map(|o| o.mean_paoi).collect();
    let sys: Vec<f64> = outcomes.iter().map(|o| o.mean_system_time).collect();
    let (mean_paoi, ci95_paoi) = mean_and_half_width(&paoi);
    let (mean_system_time, ci95_system_time) = mean_and_half_width(&sys);
    let mean_paoi_by_source = (cfg.sources == Sources::Two).then(|| {
        let per = |s: usize| {
            outcomes
                .iter()
                .map(|o| o.mean_paoi_by_source[s])
                .sum::<f64>()
                / outcomes.len() as f64
        };
        [per(0), per(1)]
    });
    ReplicationSummary {
        replications: outcomes.len(),
        warmup: cfg.warmup,
        mean_paoi,
        mean_system_time,
        ci95_paoi,
        ci95_system_time,
        mean_paoi_by_source,
        unstable: !cfg.system().is_stable(),
    }
}

/// Runs all replications sequentially and summarizes them.
pub fn replicate(cfg: &ReplicationConfig) -> Result<ReplicationSummary> {
    cfg.validate()?;
    let outcomes = (0..cfg.replications)
        .map(|r| run_replication(cfg, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(cfg, &outcomes))
}
