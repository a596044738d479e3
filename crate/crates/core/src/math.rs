//! libm shims so the numeric code reads like ordinary `f64` method calls.

pub(crate) trait FloatExt {
    fn powf_(self, e: f64) -> f64;
    fn sqrt_(self) -> f64;
    fn floor_(self) -> f64;
    fn exp_(self) -> f64;
    fn abs_(self) -> f64;
}

impl FloatExt for f64 {
    #[inline]
    fn powf_(self, e: f64) -> f64 {
        libm::pow(self, e)
    }
    #[inline]
    fn sqrt_(self) -> f64 {
        libm::sqrt(self)
    }
    #[inline]
    fn floor_(self) -> f64 {
        libm::floor(self)
    }
    #[inline]
    fn exp_(self) -> f64 {
        libm::exp(self)
    }
    #[inline]
    fn abs_(self) -> f64 {
        libm::fabs(self)
    }
}

/// Standard normal CDF.
pub(crate) fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}
