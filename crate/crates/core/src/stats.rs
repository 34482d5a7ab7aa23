//! Sampling, sample statistics, the Gaussian Q-function and moments of the
//! sample-variance quadratic form.

use num_complex::Complex;
use rand::Rng;

use crate::error::{ensure_param, Result};
use crate::Scalar;

/// Draws `n` samples from N(`mean`, `variance`).
pub fn draw_real_gaussian<T: Scalar, R: Rng + ?Sized>(
    mean: T,
    variance: T,
    n: usize,
    rng: &mut R,
) -> Result<Vec<T>> {
    ensure_param!(
        variance >= T::zero() && variance.is_finite(),
        "variance must be finite and non-negative, got {variance}"
    );
    ensure_param!(n >= 1, "sample count must be at least 1");
    let sd = variance.sqrt();
    Ok((0..n).map(|_| mean + sd * T::standard_normal(rng)).collect())
}

/// One draw from CN(0, `variance`): independent N(0, `variance`/2) parts.
#[inline]
pub fn complex_gaussian<T: Scalar, R: Rng + ?Sized>(variance: T, rng: &mut R) -> Complex<T> {
    let sd = (variance * T::lit(0.5)).sqrt();
    Complex::new(sd * T::standard_normal(rng), sd * T::standard_normal(rng))
}

/// Adds i.i.d. CN(0, `variance`) noise to every sample of `frame`.
pub fn add_complex_noise<T: Scalar, R: Rng + ?Sized>(
    frame: &mut [Complex<T>],
    variance: T,
    rng: &mut R,
) {
    if variance == T::zero() {
        return;
    }
    for y in frame.iter_mut() {
        *y = *y + complex_gaussian(variance, rng);
    }
}

/// Arithmetic mean of a complex frame.
pub fn sample_mean<T: Scalar>(frame: &[Complex<T>]) -> Result<Complex<T>> {
    ensure_param!(!frame.is_empty(), "sample mean of an empty frame");
    Ok(mean_of(frame))
}

/// Unbiased sample variance `Σ|y − ȳ|² / (N − 1)` of a complex frame.
pub fn sample_variance<T: Scalar>(frame: &[Complex<T>]) -> Result<T> {
    ensure_param!(
        frame.len() >= 2,
        "sample variance needs at least 2 samples, got {}",
        frame.len()
    );
    Ok(variance_of(frame))
}

/// `Σ|y − center|² / (N − 1)`: the sample variance with the sample mean
/// replaced by a known center. This is the Gaussian quadratic form whose
/// moments [`quadform_moments`] gives.
pub fn centered_power<T: Scalar>(frame: &[Complex<T>], center: Complex<T>) -> Result<T> {
    ensure_param!(
        frame.len() >= 2,
        "centered power needs at least 2 samples, got {}",
        frame.len()
    );
    let sum: T = frame.iter().map(|y| (y - center).norm_sqr()).sum();
    Ok(sum / T::count(frame.len() - 1))
}

// Callers guarantee a non-empty frame.
pub(crate) fn mean_of<T: Scalar>(frame: &[Complex<T>]) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for y in frame {
        acc = acc + *y;
    }
    acc / T::count(frame.len())
}

// Callers guarantee at least two samples. Deviations are taken from the
// first sample so that a constant frame gives exactly zero.
pub(crate) fn variance_of<T: Scalar>(frame: &[Complex<T>]) -> T {
    let origin = frame[0];
    let mut shift = Complex::new(T::zero(), T::zero());
    for y in frame {
        shift = shift + (y - origin);
    }
    let shift = shift / T::count(frame.len());
    let sum: T = frame.iter().map(|y| (y - origin - shift).norm_sqr()).sum();
    sum / T::count(frame.len() - 1)
}

/// Gaussian tail probability `Q(x) = P(Z > x)`, `Z ~ N(0, 1)`.
///
/// Evaluated as `erfc(x/√2)/2` for `|x| ≤ 40` and by the asymptotic series
/// beyond, where `f64` has already underflowed to zero.
pub fn q_function<T: Scalar>(x: T) -> T {
    let limit = T::lit(40.0);
    if x > limit {
        q_tail(x)
    } else if x < -limit {
        T::one() - q_tail(-x)
    } else {
        T::lit(0.5) * (x / T::SQRT_2()).erfc()
    }
}

fn q_tail<T: Scalar>(x: T) -> T {
    let pdf = (-(x * x) * T::lit(0.5)).exp() / (T::TAU()).sqrt();
    let inv2 = (x * x).recip();
    // 1 - 1/x² + 3/x⁴ - 15/x⁶ + 105/x⁸
    let series = T::one()
        - inv2 * (T::one() - inv2 * (T::lit(3.0) - inv2 * (T::lit(15.0) - inv2 * T::lit(105.0))));
    pdf / x * series
}

/// Per-sample covariance of the real and imaginary parts of a received
/// sample: `(σ_R², σ_I², c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderStats<T> {
    pub var_re: T,
    pub var_im: T,
    pub cov: T,
}

impl<T: Scalar> SecondOrderStats<T> {
    /// Checked constructor: variances non-negative and `c² ≤ σ_R² σ_I²`.
    pub fn new(var_re: T, var_im: T, cov: T) -> Result<Self> {
        ensure_param!(
            var_re >= T::zero() && var_im >= T::zero(),
            "variances must be non-negative, got ({var_re}, {var_im})"
        );
        ensure_param!(
            var_re.is_finite() && var_im.is_finite() && cov.is_finite(),
            "second-order statistics must be finite"
        );
        // Relative slack for covariances assembled from rounded products.
        let bound = var_re * var_im * (T::one() + T::lit(1e-9));
        ensure_param!(
            cov * cov <= bound,
            "covariance {cov} exceeds the Cauchy-Schwarz bound for ({var_re}, {var_im})"
        );
        Ok(Self {
            var_re,
            var_im,
            cov,
        })
    }

    /// Draws one zero-mean complex sample with these second-order statistics.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex<T> {
        let z1 = T::standard_normal(rng);
        let z2 = T::standard_normal(rng);
        let a = self.var_re.sqrt();
        if a == T::zero() {
            return Complex::new(T::zero(), self.var_im.sqrt() * z2);
        }
        let b = self.cov / a;
        let d = (self.var_im - b * b).max(T::zero()).sqrt();
        Complex::new(a * z1, b * z1 + d * z2)
    }
}

/// Mean and variance of the sample-variance statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadFormMoments<T> {
    pub mean: T,
    pub var: T,
}

impl<T: Scalar> QuadFormMoments<T> {
    pub fn std_dev(&self) -> T {
        self.var.sqrt()
    }
}

/// Mean and variance of `Σ|y_n|²/(N−1)` for `N` i.i.d. zero-mean samples with
/// per-sample statistics `stats`:
///
/// `μ = N(σ_R² + σ_I²)/(N−1)`, `σ² = 2N(σ_R⁴ + σ_I⁴ + 2c²)/(N−1)²`.
pub fn quadform_moments<T: Scalar>(stats: SecondOrderStats<T>, n: usize) -> Result<QuadFormMoments<T>> {
    ensure_param!(n >= 2, "quadratic-form moments need N >= 2, got {n}");
    Ok(moments_unchecked(stats, n))
}

pub(crate) fn moments_unchecked<T: Scalar>(stats: SecondOrderStats<T>, n: usize) -> QuadFormMoments<T> {
    let nn = T::count(n);
    let dof = T::count(n - 1);
    let SecondOrderStats {
        var_re,
        var_im,
        cov,
    } = stats;
    QuadFormMoments {
        mean: nn * (var_re + var_im) / dof,
        var: T::lit(2.0) * nn * (var_re * var_re + var_im * var_im + T::lit(2.0) * cov * cov)
            / (dof * dof),
    }
}

/// Gaussian (CLT) model of a variance detector: the statistic is
/// `N(μ₀, σ₀²)` under bit 0 and `N(μ₁, σ₁²)` under bit 1, with `μ₁ ≥ μ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryVarianceTest<T> {
    pub bit0: QuadFormMoments<T>,
    pub bit1: QuadFormMoments<T>,
}

impl<T: Scalar> BinaryVarianceTest<T> {
    pub fn new(bit0: QuadFormMoments<T>, bit1: QuadFormMoments<T>) -> Self {
        Self { bit0, bit1 }
    }

    /// Threshold at which both conditional error probabilities are equal:
    /// `γ = (σ₀μ₁ + σ₁μ₀)/(σ₀ + σ₁)`.
    pub fn equal_error_threshold(&self) -> T {
        let (s0, s1) = (self.bit0.std_dev(), self.bit1.std_dev());
        let denom = s0 + s1;
        if denom == T::zero() {
            return (self.bit0.mean + self.bit1.mean) * T::lit(0.5);
        }
        (s0 * self.bit1.mean + s1 * self.bit0.mean) / denom
    }

    /// Conditional error probabilities at threshold `gamma`:
    /// `(P(s > γ | 0), P(s < γ | 1))`.
    pub fn error_terms(&self, gamma: T) -> (T, T) {
        (
            tail_above(gamma, self.bit0),
            tail_above(-gamma, QuadFormMoments {
                mean: -self.bit1.mean,
                var: self.bit1.var,
            }),
        )
    }

    /// Error probability with equiprobable bits at an arbitrary threshold.
    pub fn bep_at(&self, gamma: T) -> T {
        let (e0, e1) = self.error_terms(gamma);
        T::lit(0.5) * (e0 + e1)
    }

    /// Error probability at the equal-error threshold:
    /// `Q((μ₁ − μ₀)/(σ₀ + σ₁))`.
    pub fn bep(&self) -> T {
        let gap = self.bit1.mean - self.bit0.mean;
        let spread = self.bit0.std_dev() + self.bit1.std_dev();
        if spread == T::zero() {
            return if gap > T::zero() { T::zero() } else { T::lit(0.5) };
        }
        q_function(gap / spread)
    }
}

// P(X > x) for X ~ N(m.mean, m.var), with the degenerate case handled.
fn tail_above<T: Scalar>(x: T, m: QuadFormMoments<T>) -> T {
    let sd = m.std_dev();
    if sd == T::zero() {
        return if m.mean > x { T::one() } else { T::zero() };
    }
    q_function((x - m.mean) / sd)
}
