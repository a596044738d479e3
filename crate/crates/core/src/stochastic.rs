//! Interarrival and service-time laws with closed-form moments, and seeded
//! sample streams drawn from them.
//!
//! Streams are generated with ChaCha8 (`rand_chacha`) seeded through
//! `SeedableRng::seed_from_u64`, and the variate transforms come from
//! `rand_distr` built without `std`, so all transcendental functions go
//! through `libm`. The same `(spec, seed, count)` therefore yields the same
//! bits on every platform.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, Pareto};

use crate::math::{normal_cdf, FloatExt};
use crate::{Error, Result};

const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

/// Parametric family of a positive random time, as stored in config files.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "kind", rename_all = "snake_case")
)]
pub enum DistributionKind {
    Exponential {
        rate: f64,
    },
    /// `|N(location, scale^2)|`.
    FoldedNormal {
        location: f64,
        scale: f64,
    },
    /// Uniform on `[0, 2 * mean]`.
    UniformMean {
        mean: f64,
    },
    Pareto {
        shape: f64,
        scale: f64,
    },
}

/// A validated [`DistributionKind`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "DistributionKind", into = "DistributionKind")
)]
pub struct DistributionSpec {
    kind: DistributionKind,
}

/// Mean and variance of a sampled law. `variance` is `None` when it is
/// infinite (Pareto with shape <= 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: Option<f64>,
}

impl Moments {
    pub fn std_dev(&self) -> Option<f64> {
        self.variance.map(FloatExt::sqrt_)
    }
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::param(name, value, "must be finite and > 0"))
    }
}

impl DistributionSpec {
    pub fn exponential(rate: f64) -> Result<Self> {
        positive("rate", rate)?;
        Ok(Self {
            kind: DistributionKind::Exponential { rate },
        })
    }

    pub fn folded_normal(location: f64, scale: f64) -> Result<Self> {
        if !location.is_finite() {
            return Err(Error::param("location", location, "must be finite"));
        }
        positive("scale", scale)?;
        Ok(Self {
            kind: DistributionKind::FoldedNormal { location, scale },
        })
    }

    pub fn uniform_mean(mean: f64) -> Result<Self> {
        positive("mean", mean)?;
        Ok(Self {
            kind: DistributionKind::UniformMean { mean },
        })
    }

    pub fn pareto(shape: f64, scale: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 1.0) {
            return Err(Error::param(
                "shape",
                shape,
                "must be > 1 for a finite mean",
            ));
        }
        positive("scale", scale)?;
        Ok(Self {
            kind: DistributionKind::Pareto { shape, scale },
        })
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    /// Short lowercase name of the family, used in CSV provenance columns.
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            DistributionKind::Exponential { .. } => "exponential",
            DistributionKind::FoldedNormal { .. } => "folded_normal",
            DistributionKind::UniformMean { .. } => "uniform_mean",
            DistributionKind::Pareto { .. } => "pareto",
        }
    }

    /// Exact moments of the law actually sampled (after folding).
    pub fn moments(&self) -> Moments {
        match self.kind {
            DistributionKind::Exponential { rate } => Moments {
                mean: 1.0 / rate,
                variance: Some(1.0 / (rate * rate)),
            },
            DistributionKind::FoldedNormal { location, scale } => {
                let z = location / scale;
                let mean = scale * SQRT_2_OVER_PI * (-0.5 * z * z).exp_()
                    + location * (1.0 - 2.0 * normal_cdf(-z));
                let variance = location * location + scale * scale - mean * mean;
                Moments {
                    mean,
                    variance: Some(variance.max(0.0)),
                }
            }
            DistributionKind::UniformMean { mean } => Moments {
                mean,
                variance: Some(mean * mean / 3.0),
            },
            DistributionKind::Pareto { shape, scale } => {
                let mean = shape * scale / (shape - 1.0);
                let variance = (shape > 2.0).then(|| {
                    scale * scale * shape / ((shape - 1.0) * (shape - 1.0) * (shape - 2.0))
                });
                Moments { mean, variance }
            }
        }
    }

    pub fn is_heavy_tailed(&self) -> bool {
        self.moments().variance.is_none()
    }

    pub fn mean(&self) -> f64 {
        self.moments().mean
    }

    /// Rate `1 / mean`.
    pub fn rate(&self) -> f64 {
        1.0 / self.mean()
    }
}

impl TryFrom<DistributionKind> for DistributionSpec {
    type Error = Error;

    fn try_from(kind: DistributionKind) -> Result<Self> {
        match kind {
            DistributionKind::Exponential { rate } => Self::exponential(rate),
            DistributionKind::FoldedNormal { location, scale } => {
                Self::folded_normal(location, scale)
            }
            DistributionKind::UniformMean { mean } => Self::uniform_mean(mean),
            DistributionKind::Pareto { shape, scale } => Self::pareto(shape, scale),
        }
    }
}

impl From<DistributionSpec> for DistributionKind {
    fn from(spec: DistributionSpec) -> Self {
        spec.kind
    }
}

/// A distribution family indexed by its mean. Sweeps use this to build the
/// concrete law for each arrival rate on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "kind", rename_all = "snake_case")
)]
pub enum DistributionFamily {
    Exponential,
    UniformMean,
    /// Folded normal whose pre-fold scale is `cv` times its location.
    FoldedNormal {
        cv: f64,
    },
    Pareto {
        shape: f64,
    },
}

impl DistributionFamily {
    /// Member of the family whose (post-transform) mean equals `mean`.
    pub fn at_mean(&self, mean: f64) -> Result<DistributionSpec> {
        positive("mean", mean)?;
        match *self {
            DistributionFamily::Exponential => DistributionSpec::exponential(1.0 / mean),
            DistributionFamily::UniformMean => DistributionSpec::uniform_mean(mean),
            DistributionFamily::FoldedNormal { cv } => {
                positive("cv", cv)?;
                // mean of |N(1, cv^2)|; the family is scale-invariant
                let unit = cv * SQRT_2_OVER_PI * (-0.5 / (cv * cv)).exp_()
                    + (1.0 - 2.0 * normal_cdf(-1.0 / cv));
                let location = mean / unit;
                DistributionSpec::folded_normal(location, cv * location)
            }
            DistributionFamily::Pareto { shape } => {
                if !(shape.is_finite() && shape > 1.0) {
                    return Err(Error::param(
                        "shape",
                        shape,
                        "must be > 1 for a finite mean",
                    ));
                }
                DistributionSpec::pareto(shape, mean * (shape - 1.0) / shape)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DistributionFamily::Exponential => "exponential",
            DistributionFamily::UniformMean => "uniform_mean",
            DistributionFamily::FoldedNormal { .. } => "folded_normal",
            DistributionFamily::Pareto { .. } => "pareto",
        }
    }
}

/// An ordered sequence of positive times, optionally tagged with the law
/// and seed that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStream {
    values: Vec<f64>,
    seed: Option<u64>,
    spec: Option<DistributionSpec>,
}

impl SampleStream {
    /// Wraps externally supplied values. Every value must be finite and
    /// strictly positive; an empty stream is allowed.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::InvalidInput(format!(
                "sample {i} is {v}; times must be finite and > 0"
            )));
        }
        Ok(Self {
            values,
            seed: None,
            spec: None,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn spec(&self) -> Option<&DistributionSpec> {
        self.spec.as_ref()
    }
}

enum Sampler {
    Exp(Exp<f64>),
    Folded(Normal<f64>),
    Uniform(f64),
    Pareto(Pareto<f64>),
}

impl Sampler {
    fn new(spec: &DistributionSpec) -> Self {
        // parameters were validated at construction, so these cannot fail
        match spec.kind {
            DistributionKind::Exponential { rate } => Sampler::Exp(Exp::new(rate).unwrap()),
            DistributionKind::FoldedNormal { location, scale } => {
                Sampler::Folded(Normal::new(location, scale).unwrap())
            }
            DistributionKind::UniformMean { mean } => Sampler::Uniform(2.0 * mean),
            DistributionKind::Pareto { shape, scale } => {
                Sampler::Pareto(Pareto::new(scale, shape).unwrap())
            }
        }
    }

    #[inline]
    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Exp(d) => d.sample(rng),
            Sampler::Folded(d) => d.sample(rng).abs_(),
            // 1 - U with U in [0, 1) keeps the draw in (0, width]
            Sampler::Uniform(width) => width * (1.0 - rng.random::<f64>()),
            Sampler::Pareto(d) => d.sample(rng),
        }
    }
}

/// Draws `count` independent values from `spec` with a ChaCha8 generator
/// seeded from `seed`.
pub fn sample_stream(spec: &DistributionSpec, count: usize, seed: u64) -> Result<SampleStream> {
    if count == 0 {
        return Err(Error::param("count", 0.0, "must be >= 1"));
    }
    let sampler = Sampler::new(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(count);
    while values.len() < count {
        let v = sampler.draw(&mut rng);
        // a folded normal can in principle land on exactly 0
        if v > 0.0 {
            values.push(v);
        }
    }
    Ok(SampleStream {
        values,
        seed: Some(seed),
        spec: Some(*spec),
    })
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one random lane of one replication.
///
/// `mix64(mix64(master + (replication + 1) * G) + (lane + 1) * G)` with
/// `G = 0x9e3779b97f4a7c15`. Lanes: 0 = service times, 1 = arrivals of
/// source 1, 2 = arrivals of source 2.
pub fn derive_seed(master: u64, replication: u64, lane: u64) -> u64 {
    const G: u64 = 0x9e37_79b9_7f4a_7c15;
    let rep = mix64(master.wrapping_add(replication.wrapping_add(1).wrapping_mul(G)));
    mix64(rep.wrapping_add(lane.wrapping_add(1).wrapping_mul(G)))
}
