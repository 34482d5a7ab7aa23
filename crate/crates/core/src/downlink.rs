//! Downlink ND-NOMA: the base station sends one composite noise waveform.
//!
//! Each sample is drawn from `N(m_{1,i}, σ_{2,k}²)`: user 1's bit picks the
//! mean, user 2's bit the variance. Every user receives the waveform through
//! its own channel and decodes only its own bit.

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

/// Constants of one downlink operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DownlinkParams<T> {
    p_total: T,
    psi: T,
    alpha: T,
    delta: T,
    n: usize,
    m1_low: T,
    sigma2_low_sq: T,
    sigma2_high_sq: T,
    sigma_w_sq: T,
    threshold: ThresholdRule,
}

impl<T: Scalar> DownlinkParams<T> {
    /// `psi` is the share of the power budget carried by the mean (user 1);
    /// the remaining `(1 − psi)P` is the average keyed variance (user 2).
    pub fn derive(p_total: T, psi: T, alpha: T, delta: T, n: usize) -> Result<Self> {
        ensure_param!(
            p_total > T::zero() && p_total.is_finite(),
            "power must be positive, got {p_total}"
        );
        ensure_param!(psi > T::zero() && psi < T::one(), "psi must lie in (0, 1), got {psi}");
        ensure_param!(
            alpha >= T::one() && alpha.is_finite(),
            "alpha must be at least 1, got {alpha}"
        );
        ensure_param!(
            delta > T::zero() && delta.is_finite(),
            "delta must be positive, got {delta}"
        );
        ensure_param!(n >= 2, "frame length must be at least 2, got {n}");
        let sigma2_low_sq = T::lit(2.0) * (T::one() - psi) * p_total / (T::one() + alpha);
        Ok(Self {
            p_total,
            psi,
            alpha,
            delta,
            n,
            m1_low: (psi * p_total).sqrt(),
            sigma2_low_sq,
            sigma2_high_sq: alpha * sigma2_low_sq,
            sigma_w_sq: sigma2_low_sq / delta,
            threshold: ThresholdRule::EqualError,
        })
    }

    /// Same as [`derive`](Self::derive) with the receiver noise power given
    /// directly instead of through `delta`.
    pub fn from_noise_power(p_total: T, psi: T, alpha: T, sigma_w_sq: T, n: usize) -> Result<Self> {
        ensure_param!(
            sigma_w_sq > T::zero() && sigma_w_sq.is_finite(),
            "noise power must be positive, got {sigma_w_sq}"
        );
        ensure_param!(psi > T::zero() && psi < T::one(), "psi must lie in (0, 1), got {psi}");
        ensure_param!(alpha >= T::one(), "alpha must be at least 1, got {alpha}");
        let sigma2_low_sq = T::lit(2.0) * (T::one() - psi) * p_total / (T::one() + alpha);
        let mut p = Self::derive(p_total, psi, alpha, sigma2_low_sq / sigma_w_sq, n)?;
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
    pub fn psi(&self) -> T {
        self.psi
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

/// Composite base-station frame for the bit pair `(bit1, bit2)`.
pub fn tx_bs<T: Scalar, R: Rng + ?Sized>(
    bit1: Bit,
    bit2: Bit,
    params: &DownlinkParams<T>,
    rng: &mut R,
) -> Vec<T> {
    let mean = params.m1(bit1);
    let sd = params.sigma2_sq(bit2).sqrt();
    (0..params.n).map(|_| mean + sd * T::standard_normal(rng)).collect()
}

/// Frame seen by one user: `y = h·s + w`, `w ~ CN(0, σ_w²)`.
pub fn rx_user<T: Scalar, R: Rng + ?Sized>(
    s_bs: &[T],
    h: ChannelRealization<T>,
    sigma_w_sq: T,
    rng: &mut R,
) -> Vec<Complex<T>> {
    let mut frame: Vec<Complex<T>> = s_bs.iter().map(|&s| h.h * s).collect();
    add_complex_noise(&mut frame, sigma_w_sq, rng);
    frame
}

/// User 1: minimum-distance detection of the mean.
pub fn detect_u1_downlink<T: Scalar>(
    frame: &[Complex<T>],
    h1: ChannelRealization<T>,
    params: &DownlinkParams<T>,
) -> Result<Bit> {
    ensure_param!(!frame.is_empty(), "empty downlink frame");
    Ok(mean_decision_sign(mean_of(frame), h1.h, params.m1_low))
}

/// User 2: variance-threshold detection.
pub fn detect_u2_downlink<T: Scalar>(
    frame: &[Complex<T>],
    h2: ChannelRealization<T>,
    params: &DownlinkParams<T>,
) -> Result<Bit> {
    ensure_param!(frame.len() >= 2, "downlink frame needs at least 2 samples");
    Ok(variance_decision(variance_of(frame), u2_threshold(h2, params)))
}

/// Gaussian model of the user-2 sample variance under both hypotheses.
pub fn u2_variance_test<T: Scalar>(h2: ChannelRealization<T>, params: &DownlinkParams<T>) -> BinaryVarianceTest<T> {
    let half_w = params.sigma_w_sq * T::lit(0.5);
    let stats = |s2: T| SecondOrderStats {
        var_re: h2.re() * h2.re() * s2 + half_w,
        var_im: h2.im() * h2.im() * s2 + half_w,
        cov: h2.re() * h2.im() * s2,
    };
    BinaryVarianceTest::new(
        moments_unchecked(stats(params.sigma2_low_sq), params.n),
        moments_unchecked(stats(params.sigma2_high_sq), params.n),
    )
}

/// Threshold user 2 applies to its sample variance.
pub fn u2_threshold<T: Scalar>(h2: ChannelRealization<T>, params: &DownlinkParams<T>) -> T {
    match params.threshold {
        ThresholdRule::EqualError => u2_variance_test(h2, params).equal_error_threshold(),
        ThresholdRule::Scaled => chi(params.alpha, params.delta) * params.sigma_w_sq,
    }
}

/// Conditional bit-error probability of user 1, averaged over the two
/// variance states of the composite waveform. There is no interference
/// term: user 2's keying only changes the per-sample variance.
pub fn cond_bep_u1_downlink<T: Scalar>(
    h1: ChannelRealization<T>,
    params: &DownlinkParams<T>,
) -> Result<T> {
    let m_sq = params.m1_low * params.m1_low;
    let m_d = h1.gain() * m_sq;
    if m_d == T::zero() {
        return Ok(T::lit(0.5));
    }
    let nn = T::count(params.n);
    let half_w = params.sigma_w_sq * T::lit(0.5);
    let (hr, hi) = (h1.re(), h1.im());
    let mut total = T::zero();
    for s2 in [params.sigma2_low_sq, params.sigma2_high_sq] {
        let var_r = (hr * hr * s2 + half_w) / nn;
        let var_i = (hi * hi * s2 + half_w) / nn;
        let cov = hr * hi * s2 / nn;
        let var_d = m_sq * (hr * hr * var_r + hi * hi * var_i + T::lit(2.0) * hr * hi * cov);
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
pub fn cond_bep_u2_downlink<T: Scalar>(h2: ChannelRealization<T>, params: &DownlinkParams<T>) -> T {
    let test = u2_variance_test(h2, params);
    match params.threshold {
        ThresholdRule::EqualError => test.bep(),
        ThresholdRule::Scaled => test.bep_at(chi(params.alpha, params.delta) * params.sigma_w_sq),
    }
}

/// Simulates `frames` downlink frames (two bits each) with independent
/// channels per user and frame; returns the error counts of users 1 and 2.
pub fn simulate<T: Scalar, R: Rng + ?Sized>(
    params: &DownlinkParams<T>,
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
        let s = tx_bs(b1, b2, params, rng);
        let y1 = rx_user(&s, h1, params.sigma_w_sq, rng);
        let y2 = rx_user(&s, h2, params.sigma_w_sq, rng);
        counts[0].record(detect_u1_downlink(&y1, h1, params)? != b1);
        counts[1].record(detect_u2_downlink(&y2, h2, params)? != b2);
    }
    Ok(counts)
}
