//! Reference schemes: OMA-NoiseMod and downlink power-domain NOMA with
//! successive interference cancellation.

use num_complex::Complex;
use rand::Rng;

use crate::ber::ErrorCount;
use crate::channel::{ChannelRealization, FadingModel};
use crate::detect::{variance_decision, Bit};
use crate::downlink::{self, DownlinkParams};
use crate::error::{ensure_param, Result};
use crate::stats::{
    add_complex_noise, moments_unchecked, q_function, variance_of, BinaryVarianceTest,
    SecondOrderStats,
};
use crate::Scalar;

/// OMA-NoiseMod: each user owns half of the `N` samples and keys its bit on
/// the variance alone, with the same budget and ratio as uplink user 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmaParams<T> {
    p_total: T,
    alpha: T,
    delta: T,
    n: usize,
    sigma_low_sq: T,
    sigma_high_sq: T,
    sigma_w_sq: T,
}

impl<T: Scalar> OmaParams<T> {
    pub fn derive(p_total: T, alpha: T, delta: T, n: usize) -> Result<Self> {
        ensure_param!(
            p_total > T::zero() && p_total.is_finite(),
            "power must be positive, got {p_total}"
        );
        ensure_param!(
            alpha >= T::one() && alpha.is_finite(),
            "alpha must be at least 1, got {alpha}"
        );
        ensure_param!(
            delta > T::zero() && delta.is_finite(),
            "delta must be positive, got {delta}"
        );
        ensure_param!(n >= 4 && n % 2 == 0, "frame length must be even and at least 4, got {n}");
        let sigma_low_sq = T::lit(2.0) * p_total / (T::one() + alpha);
        Ok(Self {
            p_total,
            alpha,
            delta,
            n,
            sigma_low_sq,
            sigma_high_sq: alpha * sigma_low_sq,
            sigma_w_sq: sigma_low_sq / delta,
        })
    }

    pub fn p_total(&self) -> T {
        self.p_total
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
    /// Samples available to each user.
    pub fn slot_len(&self) -> usize {
        self.n / 2
    }
    pub fn sigma_w_sq(&self) -> T {
        self.sigma_w_sq
    }

    pub fn sigma_sq(&self, bit: Bit) -> T {
        match bit {
            Bit::Zero => self.sigma_low_sq,
            Bit::One => self.sigma_high_sq,
        }
    }
}

fn oma_test<T: Scalar>(h: ChannelRealization<T>, params: &OmaParams<T>) -> BinaryVarianceTest<T> {
    let half_w = params.sigma_w_sq * T::lit(0.5);
    let stats = |s: T| SecondOrderStats {
        var_re: h.re() * h.re() * s + half_w,
        var_im: h.im() * h.im() * s + half_w,
        cov: h.re() * h.im() * s,
    };
    BinaryVarianceTest::new(
        moments_unchecked(stats(params.sigma_low_sq), params.slot_len()),
        moments_unchecked(stats(params.sigma_high_sq), params.slot_len()),
    )
}

/// Conditional bit-error probability of either OMA user.
pub fn cond_bep_oma<T: Scalar>(h: ChannelRealization<T>, params: &OmaParams<T>) -> T {
    oma_test(h, params).bep()
}

/// Transmits and detects one OMA bit in a user's slot.
fn oma_slot<T: Scalar, R: Rng + ?Sized>(
    bit: Bit,
    h: ChannelRealization<T>,
    params: &OmaParams<T>,
    rng: &mut R,
) -> Bit {
    let sd = params.sigma_sq(bit).sqrt();
    let mut frame: Vec<Complex<T>> = (0..params.slot_len())
        .map(|_| h.h * (sd * T::standard_normal(rng)))
        .collect();
    add_complex_noise(&mut frame, params.sigma_w_sq, rng);
    let gamma = oma_test(h, params).equal_error_threshold();
    variance_decision(variance_of(&frame), gamma)
}

/// Simulates `trials` frames; each frame carries one bit per user over
/// independent channels. Returns the counts of users 1 and 2.
pub fn oma_noisemod_ber<T: Scalar, R: Rng + ?Sized>(
    params: &OmaParams<T>,
    fading: &FadingModel<T>,
    trials: u64,
    rng: &mut R,
) -> [ErrorCount; 2] {
    let mut counts = [ErrorCount::default(); 2];
    for _ in 0..trials {
        for c in counts.iter_mut() {
            let bit = Bit::random(rng);
            let h = fading.draw(rng);
            c.record(oma_slot(bit, h, params, rng) != bit);
        }
    }
    counts
}

/// Downlink PD-NOMA with two antipodal users: the far user gets the power
/// fraction `rho_far`, the near user the rest; total power is 1 and the
/// noise power is `1/γ̄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdNomaParams<T> {
    gamma_bar: T,
    rho_far: T,
}

impl<T: Scalar> PdNomaParams<T> {
    pub fn new(gamma_bar: T, rho_far: T) -> Result<Self> {
        ensure_param!(
            gamma_bar > T::zero() && gamma_bar.is_finite(),
            "average SNR must be positive, got {gamma_bar}"
        );
        ensure_param!(
            rho_far >= T::lit(0.5) && rho_far < T::one(),
            "far-user power fraction must lie in [0.5, 1), got {rho_far}"
        );
        Ok(Self { gamma_bar, rho_far })
    }

    pub fn gamma_bar(&self) -> T {
        self.gamma_bar
    }
    pub fn rho_far(&self) -> T {
        self.rho_far
    }
    pub fn p_total(&self) -> T {
        T::one()
    }
    pub fn sigma_w_sq(&self) -> T {
        self.gamma_bar.recip()
    }
    fn amplitude_far(&self) -> T {
        self.rho_far.sqrt()
    }
    fn amplitude_near(&self) -> T {
        (T::one() - self.rho_far).sqrt()
    }
}

/// Per-user PD-NOMA error counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PdNomaBer {
    pub near: ErrorCount,
    pub far: ErrorCount,
}

impl PdNomaBer {
    pub fn average(&self) -> ErrorCount {
        self.near.merged(self.far)
    }

    pub fn merge(&mut self, other: &PdNomaBer) {
        self.near.merge(other.near);
        self.far.merge(other.far);
    }
}

/// Coherent, channel-equalized real decision statistic `Re{y h*}/|h|²`.
fn equalize<T: Scalar>(y: Complex<T>, h: ChannelRealization<T>) -> T {
    (y * h.h.conj()).re / h.gain()
}

/// Far-user decision: treats the near user's signal as noise.
pub fn pd_detect_far<T: Scalar>(y: Complex<T>, h: ChannelRealization<T>) -> Bit {
    if h.gain() == T::zero() {
        return Bit::Zero;
    }
    Bit::from_bool(equalize(y, h) < T::zero())
}

/// Near-user decision: decode the far symbol, subtract it, decode own bit.
pub fn pd_detect_near<T: Scalar>(
    y: Complex<T>,
    h: ChannelRealization<T>,
    params: &PdNomaParams<T>,
) -> Bit {
    if h.gain() == T::zero() {
        return Bit::Zero;
    }
    let z = equalize(y, h);
    let far: T = Bit::from_bool(z < T::zero()).antipodal();
    Bit::from_bool(z - params.amplitude_far() * far < T::zero())
}

/// Simulates `trials` PD-NOMA symbols with independent Rayleigh (or
/// `fading`) channels per user and symbol.
pub fn pd_noma_downlink_ber<T: Scalar, R: Rng + ?Sized>(
    params: &PdNomaParams<T>,
    fading: &FadingModel<T>,
    trials: u64,
    rng: &mut R,
) -> PdNomaBer {
    let (a_f, a_n) = (params.amplitude_far(), params.amplitude_near());
    let sigma_w_sq = params.sigma_w_sq();
    let mut out = PdNomaBer::default();
    for _ in 0..trials {
        let b_far = Bit::random(rng);
        let b_near = Bit::random(rng);
        let x = a_f * b_far.antipodal::<T>() + a_n * b_near.antipodal::<T>();
        let h_far = fading.draw(rng);
        let h_near = fading.draw(rng);
        let mut y = [h_far.h * x, h_near.h * x];
        add_complex_noise(&mut y, sigma_w_sq, rng);
        out.far.record(pd_detect_far(y[0], h_far) != b_far);
        out.near.record(pd_detect_near(y[1], h_near, params) != b_near);
    }
    out
}

// Standard deviation of the equalized noise: σ_w²/(2|h|²) per real part.
fn equalized_sd<T: Scalar>(h: ChannelRealization<T>, params: &PdNomaParams<T>) -> T {
    (params.sigma_w_sq() / (T::lit(2.0) * h.gain())).sqrt()
}

/// Exact conditional BEP of the far user.
pub fn cond_bep_pd_far<T: Scalar>(h: ChannelRealization<T>, params: &PdNomaParams<T>) -> T {
    if h.gain() == T::zero() {
        return T::lit(0.5);
    }
    let s = equalized_sd(h, params);
    let (a_f, a_n) = (params.amplitude_far(), params.amplitude_near());
    T::lit(0.5) * (q_function((a_f + a_n) / s) + q_function((a_f - a_n) / s))
}

/// Exact conditional BEP of the near user including SIC error propagation.
pub fn cond_bep_pd_near<T: Scalar>(h: ChannelRealization<T>, params: &PdNomaParams<T>) -> T {
    if h.gain() == T::zero() {
        return T::lit(0.5);
    }
    let s = equalized_sd(h, params);
    let (a_f, a_n) = (params.amplitude_far(), params.amplitude_near());
    // Own bit zero is decided iff z ∈ (−a_f, 0) ∪ (a_f, ∞); error mass for a
    // transmitted level x (the bit-one case is symmetric).
    let p_err = |x: T| q_function((x + a_f) / s) + q_function((x - a_f) / s) - q_function(x / s);
    T::lit(0.5) * (p_err(a_f + a_n) + p_err(a_n - a_f))
}

/// Paired simulation of downlink ND-NOMA and PD-NOMA at one average SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonPoint {
    pub nd: [ErrorCount; 2],
    pub pd: PdNomaBer,
}

impl ComparisonPoint {
    pub fn nd_average(&self) -> ErrorCount {
        self.nd[0].merged(self.nd[1])
    }
}

/// Downlink ND-NOMA parameters at average SNR `gamma_bar`: total power 1 and
/// `σ_w² = 1/γ̄`, the same normalization as [`PdNomaParams`].
pub fn nd_noma_params_at<T: Scalar>(
    gamma_bar: T,
    psi: T,
    alpha: T,
    n: usize,
) -> Result<DownlinkParams<T>> {
    ensure_param!(gamma_bar > T::zero(), "average SNR must be positive, got {gamma_bar}");
    DownlinkParams::from_noise_power(T::one(), psi, alpha, gamma_bar.recip(), n)
}

/// Runs both schemes for `trials` bits per user at one average SNR.
pub fn nd_noma_vs_pd_noma_point<T: Scalar, R: Rng + ?Sized>(
    nd: &DownlinkParams<T>,
    pd: &PdNomaParams<T>,
    fading: &FadingModel<T>,
    trials: u64,
    rng: &mut R,
) -> Result<ComparisonPoint> {
    let nd_counts = downlink::simulate(nd, fading, trials, rng)?;
    let pd_counts = pd_noma_downlink_ber(pd, fading, trials, rng);
    Ok(ComparisonPoint {
        nd: nd_counts,
        pd: pd_counts,
    })
}
