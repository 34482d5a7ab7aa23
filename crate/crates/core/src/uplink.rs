//! Uplink ND-NOMA: two users superimposed at one receiver.
//!
//! User 1 keys its bit on the mean of its Gaussian samples
//! (`N(±m_l, σ₁²)`), user 2 on the variance (`N(0, σ_{2,l}²)` or
//! `N(0, σ_{2,h}²)`). The receiver observes `y = h₁s₁ + h₂s₂ + w` over `N`
//! samples, detects user 1 from the sample mean and user 2 from the sample
//! variance.

use num_complex::Complex;
use rand::Rng;

use crate::ber::ErrorCount;
use crate::channel::{ChannelRealization, FadingModel};
use crate::detect::{chi, mean_decision_sign, variance_decision, Bit, ThresholdRule};
use crate::error::{ensure_param, Error, Result};
use crate::stats::{
    add_complex_noise, mean_of, moments_unchecked, q_function, variance_of, BinaryVarianceTest,
    SecondOrderStats,
};
use crate::Scalar;

/// Constants of one uplink operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UplinkParams<T> {
    p_total: T,
    beta: T,
    alpha: T,
    delta: T,
    n: usize,
    m1_low: T,
    sigma1_sq: T,
    sigma2_low_sq: T,
    sigma2_high_sq: T,
    sigma_w_sq: T,
    threshold: ThresholdRule,
}

impl<T: Scalar> UplinkParams<T> {
    /// Derives all powers from the per-user budget `p_total`, the user-1
    /// variance fraction `beta`, the variance ratio `alpha`, the
    /// useful-to-noise variance ratio `delta` and the frame length `n`.
    ///
    /// `alpha = 1` is accepted as the degenerate case in which user 2
    /// carries no information.
    pub fn derive(p_total: T, beta: T, alpha: T, delta: T, n: usize) -> Result<Self> {
        ensure_param!(
            p_total > T::zero() && p_total.is_finite(),
            "power must be positive, got {p_total}"
        );
        ensure_param!(
            beta > T::zero() && beta < T::one(),
            "beta must lie in (0, 1), got {beta}"
        );
        ensure_param!(
            alpha >= T::one() && alpha.is_finite(),
            "alpha must be at least 1, got {alpha}"
        );
        ensure_param!(
            delta > T::zero() && delta.is_finite(),
            "delta must be positive, got {delta}"
        );
        ensure_param!(n >= 2, "frame length must be at least 2, got {n}");
        let sigma2_low_sq = T::lit(2.0) * p_total / (T::one() + alpha);
        Ok(Self {
            p_total,
            beta,
            alpha,
            delta,
            n,
            m1_low: ((T::one() - beta) * p_total).sqrt(),
            sigma1_sq: beta * p_total,
            sigma2_low_sq,
            sigma2_high_sq: alpha * sigma2_low_sq,
            sigma_w_sq: sigma2_low_sq / delta,
            threshold: ThresholdRule::EqualError,
        })
    }

    /// Same as [`derive`](Self::derive) with the receiver noise power given
    /// directly instead of through `delta`.
    pub fn from_noise_power(p_total: T, beta: T, alpha: T, sigma_w_sq: T, n: usize) -> Result<Self> {
        ensure_param!(
            sigma_w_sq > T::zero() && sigma_w_sq.is_finite(),
            "noise power must be positive, got {sigma_w_sq}"
        );
        ensure_param!(alpha >= T::one(), "alpha must be at least 1, got {alpha}");
        let sigma2_low_sq = T::lit(2.0) * p_total / (T::one() + alpha);
        let mut p = Self::derive(p_total, beta, alpha, sigma2_low_sq / sigma_w_sq, n)?;
        p.sigma_w_sq = sigma_w_sq;
        Ok(p)
    }

    pub fn with_threshold(mut self, rule: ThresholdRule) -> Self {
        self.threshold = rule;
        self
    }

    pub fn p_total(&self) -> T {
        self.p_total
    }
    pub fn beta(&self) -> T {
        self.beta
    }
    pub fn alpha(&self) -> T {
        self.alpha
    }
    pub fn delta(&self) -> T {
        self.delta
    }
    pub fn n_samples(&self) -> usize {
        self.n
    }
    pub fn m1_low(&self) -> T {
        self.m1_low
    }
    pub fn m1_high(&self) -> T {
        -self.m1_low
    }
    pub fn m2(&self) -> T {
        T::zero()
    }
    pub fn sigma1_sq(&self) -> T {
        self.sigma1_sq
    }
    pub fn sigma2_low_sq(&self) -> T {
        self.sigma2_low_sq
    }
    pub fn sigma2_high_sq(&self) -> T {
        self.sigma2_high_sq
    }
    pub fn sigma_w_sq(&self) -> T {
        self.sigma_w_sq
    }
    pub fn threshold(&self) -> ThresholdRule {
        self.threshold
    }

    /// User-1 variance relative to the receiver noise, `σ₁²/σ_w²`.
    pub fn eta(&self) -> T {
        self.sigma1_sq / self.sigma_w_sq
    }

    pub fn m1(&self, bit: Bit) -> T {
        match bit {
            Bit::Zero => self.m1_low,
            Bit::One => -self.m1_low,
        }
    }

    pub fn sigma2_sq(&self, bit: Bit) -> T {
        match bit {
            Bit::Zero => self.sigma2_low_sq,
            Bit::One => self.sigma2_high_sq,
        }
    }
}

/// Received frame together with the channels it went through.
#[derive(Debug, Clone, PartialEq)]
pub struct UplinkObservation<T> {
    pub frame: Vec<Complex<T>>,
    pub h1: ChannelRealization<T>,
    pub h2: ChannelRealization<T>,
}

fn gaussian_frame<T: Scalar, R: Rng + ?Sized>(mean: T, variance: T, n: usize, rng: &mut R) -> Vec<T> {
    let sd = variance.sqrt();
    (0..n).map(|_| mean + sd * T::standard_normal(rng)).collect()
}

/// User-1 frame: `N` draws from `N(m_{1,bit}, σ₁²)`.
pub fn tx_u1<T: Scalar, R: Rng + ?Sized>(bit: Bit, params: &UplinkParams<T>, rng: &mut R) -> Vec<T> {
    gaussian_frame(params.m1(bit), params.sigma1_sq, params.n, rng)
}

/// User-2 frame: `N` draws from `N(0, σ_{2,bit}²)`.
pub fn tx_u2<T: Scalar, R: Rng + ?Sized>(bit: Bit, params: &UplinkParams<T>, rng: &mut R) -> Vec<T> {
    gaussian_frame(T::zero(), params.sigma2_sq(bit), params.n, rng)
}

/// Superimposes both users through their channels and adds CN(0, σ_w²)
/// receiver noise.
pub fn combine_uplink<T: Scalar, R: Rng + ?Sized>(
    s1: &[T],
    s2: &[T],
    h1: ChannelRealization<T>,
    h2: ChannelRealization<T>,
    sigma_w_sq: T,
    rng: &mut R,
) -> Result<UplinkObservation<T>> {
    ensure_param!(
        s1.len() == s2.len(),
        "frame lengths differ: {} vs {}",
        s1.len(),
        s2.len()
    );
    ensure_param!(s1.len() >= 2, "frames need at least 2 samples");
    ensure_param!(
        sigma_w_sq >= T::zero() && sigma_w_sq.is_finite(),
        "noise power must be finite and non-negative, got {sigma_w_sq}"
    );
    let mut frame: Vec<Complex<T>> = s1
        .iter()
        .zip(s2)
        .map(|(&a, &b)| h1.h * a + h2.h * b)
        .collect();
    add_complex_noise(&mut frame, sigma_w_sq, rng);
    Ok(UplinkObservation { frame, h1, h2 })
}

/// Minimum-distance detection of user 1 from the sample mean.
pub fn detect_u1_uplink<T: Scalar>(obs: &UplinkObservation<T>, params: &UplinkParams<T>) -> Bit {
    mean_decision_sign(mean_of(&obs.frame), obs.h1.h, params.m1_low)
}

/// Variance-threshold detection of user 2.
pub fn detect_u2_uplink<T: Scalar>(obs: &UplinkObservation<T>, params: &UplinkParams<T>) -> Bit {
    let gamma = u2_threshold(obs.h1, obs.h2, params);
    variance_decision(variance_of(&obs.frame), gamma)
}

/// Gaussian model of the user-2 sample variance under both hypotheses.
pub fn u2_variance_test<T: Scalar>(
    h1: ChannelRealization<T>,
    h2: ChannelRealization<T>,
    params: &UplinkParams<T>,
) -> BinaryVarianceTest<T> {
    let half_w = params.sigma_w_sq * T::lit(0.5);
    let stats = |s2: T| SecondOrderStats {
        var_re: h1.re() * h1.re() * params.sigma1_sq + h2.re() * h2.re() * s2 + half_w,
        var_im: h1.im() * h1.im() * params.sigma1_sq + h2.im() * h2.im() * s2 + half_w,
        cov: h1.re() * h1.im() * params.sigma1_sq + h2.re() * h2.im() * s2,
    };
    BinaryVarianceTest::new(
        moments_unchecked(stats(params.sigma2_low_sq), params.n),
        moments_unchecked(stats(params.sigma2_high_sq), params.n),
    )
}

/// Threshold applied to the user-2 sample variance for channels `(h1, h2)`.
pub fn u2_threshold<T: Scalar>(
    h1: ChannelRealization<T>,
    h2: ChannelRealization<T>,
    params: &UplinkParams<T>,
) -> T {
    match params.threshold {
        ThresholdRule::EqualError => u2_variance_test(h1, h2, params).equal_error_threshold(),
        ThresholdRule::Scaled => chi(params.alpha, params.delta) * params.sigma_w_sq,
    }
}

/// Conditional bit-error probability of user 1 given both channels,
/// averaged over user 2's two variance states.
pub fn cond_bep_u1_uplink<T: Scalar>(
    h1: ChannelRealization<T>,
    h2: ChannelRealization<T>,
    params: &UplinkParams<T>,
) -> Result<T> {
    let m_sq = params.m1_low * params.m1_low;
    let m_d = h1.gain() * m_sq;
    if m_d == T::zero() {
        return Ok(T::lit(0.5));
    }
    let nn = T::count(params.n);
    let half_w = params.sigma_w_sq * T::lit(0.5);
    let (h1r, h1i, h2r, h2i) = (h1.re(), h1.im(), h2.re(), h2.im());
    let mut total = T::zero();
    for s2 in [params.sigma2_low_sq, params.sigma2_high_sq] {
        let var_r = (h1r * h1r * params.sigma1_sq + h2r * h2r * s2 + half_w) / nn;
        let var_i = (h1i * h1i * params.sigma1_sq + h2i * h2i * s2 + half_w) / nn;
        let cov = (h1r * h1i * params.sigma1_sq + h2r * h2i * s2) / nn;
        let var_d =
            m_sq * (h1r * h1r * var_r + h1i * h1i * var_i + T::lit(2.0) * h1r * h1i * cov);
        if !(var_d > T::zero()) {
            return Err(Error::Internal(format!(
                "user-1 decision variance {var_d} is not positive"
            )));
        }
        total += q_function(m_d / var_d.sqrt());
    }
    Ok(total * T::lit(0.5))
}

/// Conditional bit-error probability of user 2 under the Gaussian model of
/// the sample variance.
pub fn cond_bep_u2_uplink<T: Scalar>(
    h1: ChannelRealization<T>,
    h2: ChannelRealization<T>,
    params: &UplinkParams<T>,
) -> T {
    let test = u2_variance_test(h1, h2, params);
    match params.threshold {
        ThresholdRule::EqualError => test.bep(),
        ThresholdRule::Scaled => test.bep_at(chi(params.alpha, params.delta) * params.sigma_w_sq),
    }
}

/// Simulates `frames` bit frames with independent channels per frame and
/// returns the error counts of users 1 and 2.
pub fn simulate<T: Scalar, R: Rng + ?Sized>(
    params: &UplinkParams<T>,
    fading: &FadingModel<T>,
    frames: u64,
    rng: &mut R,
) -> Result<[ErrorCount; 2]> {
    let mut counts = [ErrorCount::default(); 2];
    for _ in 0..frames {
        let b1 = Bit::random(rng);
        let b2 = Bit::random(rng);
        let h1 = fading.draw(rng);
        let h2 = fading.draw(rng);
        let s1 = tx_u1(b1, params, rng);
        let s2 = tx_u2(b2, params, rng);
        let obs = combine_uplink(&s1, &s2, h1, h2, params.sigma_w_sq, rng)?;
        counts[0].record(detect_u1_uplink(&obs, params) != b1);
        counts[1].record(detect_u2_uplink(&obs, params) != b2);
    }
    Ok(counts)
}
