//! Float helpers for the `no_std` build.
//!
//! `core` does not provide the transcendental methods of `f64`, so every
//! module routes through [`FloatExt`], which delegates to `libm`. Using the
//! same pure-Rust implementations everywhere also makes results
//! bit-identical across platforms, which the determinism contracts rely on.

/// Extension methods mirroring the `std` float API, backed by `libm`.
pub trait FloatExt {
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn ln_1p(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn floor(self) -> Self;
    fn ceil(self) -> Self;
    fn round(self) -> Self;
    fn erf(self) -> Self;
    fn erfc(self) -> Self;
}

impl FloatExt for f64 {
    #[inline]
    fn abs(self) -> f64 {
        libm::fabs(self)
    }
    #[inline]
    fn sqrt(self) -> f64 {
        libm::sqrt(self)
    }
    #[inline]
    fn exp(self) -> f64 {
        libm::exp(self)
    }
    #[inline]
    fn ln(self) -> f64 {
        libm::log(self)
    }
    #[inline]
    fn ln_1p(self) -> f64 {
        libm::log1p(self)
    }
    #[inline]
    fn powi(self, n: i32) -> f64 {
        libm::pow(self, n as f64)
    }
    #[inline]
    fn floor(self) -> f64 {
        libm::floor(self)
    }
    #[inline]
    fn ceil(self) -> f64 {
        libm::ceil(self)
    }
    #[inline]
    fn round(self) -> f64 {
        libm::round(self)
    }
    #[inline]
    fn erf(self) -> f64 {
        libm::erf(self)
    }
    #[inline]
    fn erfc(self) -> f64 {
        libm::erfc(self)
    }
}

/// Standard normal CDF, Φ(z) = erfc(-z / √2) / 2.
///
/// `libm`'s erfc is a rational minimax approximation accurate to a few ulp,
/// well inside the 1e-12 budget the p-value computations assume.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * FloatExt::erfc(-z / core::f64::consts::SQRT_2)
}

/// Upper-tail probability of the chi-square distribution with 1 degree of
/// freedom. For df = 1 the regularized upper incomplete gamma function
/// Q(1/2, x/2) reduces exactly to erfc(√(x/2)).
pub fn chi_square_sf_1df(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        FloatExt::erfc(FloatExt::sqrt(x / 2.0))
    }
}
