//! Estimator validity suite: checks the analytic building blocks against
//! direct simulation and exact identities.

use num_complex::Complex;
use rayon::prelude::*;

use crate::channel::FadingModel;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, StreamId};
use crate::stats::{centered_power, q_function, quadform_moments, SecondOrderStats};
use crate::theory::{accumulate_weights, ChannelArity, WeightAccumulator};
use crate::uplink::{self, UplinkParams};

/// Outcome of one validity check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

const QUADFORM_FRAMES: u64 = 1_000_000;
const QUADFORM_CHUNK: u64 = 10_000;
const GAIN_DRAWS: u64 = 1_000_000;

// Purposes keep the suite's streams apart from each other.
const P_QUADFORM: u64 = 0;
const P_THRESHOLD: u64 = 1;
const P_GAIN: u64 = 2;
const P_SCALING: u64 = 3;

/// Runs every check on `workers` threads.
pub fn run_validation(seed: u64, workers: usize) -> Result<Vec<Check>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Internal(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        let mut out = quadform_checks(seed)?;
        out.push(threshold_check(seed)?);
        out.extend(unit_gain_checks(seed)?);
        out.push(constant_integrand_check()?);
        out.push(std_error_scaling_check(seed)?);
        Ok(out)
    })
}

/// Mean and variance of the frame statistic over 10⁶ simulated frames,
/// against the closed-form moments (1% and 3 standard errors).
fn quadform_checks(seed: u64) -> Result<Vec<Check>> {
    let n = 50;
    let cases = [
        SecondOrderStats::new(0.5, 0.5, 0.0)?,
        SecondOrderStats::new(0.3, 0.7, 0.2)?,
    ];
    let mut checks = Vec::new();
    for (case, stats) in cases.into_iter().enumerate() {
        let chunks = QUADFORM_FRAMES / QUADFORM_CHUNK;
        let parts: Vec<(f64, f64)> = (0..chunks)
            .into_par_iter()
            .map(|chunk| {
                let mut rng = stream_rng(seed, StreamId::new(case as u64, P_QUADFORM, chunk));
                let zero = Complex::new(0.0, 0.0);
                let mut frame = vec![zero; n];
                let (mut s1, mut s2) = (0.0, 0.0);
                for _ in 0..QUADFORM_CHUNK {
                    for y in frame.iter_mut() {
                        *y = stats.sample(&mut rng);
                    }
                    let s = centered_power(&frame, zero).expect("frame is non-empty");
                    s1 += s;
                    s2 += s * s;
                }
                (s1, s2)
            })
            .collect();
        let (s1, s2) = parts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let m = QUADFORM_FRAMES as f64;
        let mean = s1 / m;
        let var = (s2 / m - mean * mean) * m / (m - 1.0);
        let exact = quadform_moments(stats, n)?;
        // Standard errors of the sample mean and (approximately Gaussian)
        // sample variance.
        let se_mean = (exact.var / m).sqrt();
        let se_var = exact.var * (2.0 / (m - 1.0)).sqrt();
        let ok_mean = (mean / exact.mean - 1.0).abs() < 0.01 && (mean - exact.mean).abs() < 3.0 * se_mean;
        let ok_var = (var / exact.var - 1.0).abs() < 0.01 && (var - exact.var).abs() < 3.0 * se_var;
        checks.push(Check {
            name: "quadform mean",
            passed: ok_mean,
            detail: format!("case {case}: empirical {mean:.6e}, closed form {:.6e}, se {se_mean:.2e}", exact.mean),
        });
        checks.push(Check {
            name: "quadform variance",
            passed: ok_var,
            detail: format!("case {case}: empirical {var:.6e}, closed form {:.6e}, se {se_var:.2e}", exact.var),
        });
    }
    Ok(checks)
}

/// The channel-aware threshold equalizes both conditional error terms to
/// 1e-12 relative, over random channels and several operating points.
fn threshold_check(seed: u64) -> Result<Check> {
    let fading = FadingModel::from_k_db(5.0)?;
    let mut rng = stream_rng(seed, StreamId::new(0, P_THRESHOLD, 0));
    let (mut worst, mut evaluated) = (0.0f64, 0usize);
    for delta_db in [-20.0, -10.0, -5.0, 0.0, 5.0] {
        for n in [50, 100] {
            let p = UplinkParams::derive(1.0, 0.01, 10.0, 10f64.powf(delta_db / 10.0), n)?;
            for _ in 0..1000 {
                let (h1, h2) = (fading.draw(&mut rng), fading.draw(&mut rng));
                let test = uplink::u2_variance_test(h1, h2, &p);
                let (e0, e1) = test.error_terms(test.equal_error_threshold());
                // Below this both tails are too deep to compare meaningfully.
                if e0.max(e1) < 1e-100 {
                    continue;
                }
                worst = worst.max((e0 - e1).abs() / e0.max(e1));
                evaluated += 1;
            }
        }
    }
    Ok(Check {
        name: "threshold equalization",
        passed: evaluated > 0 && worst <= 1e-12,
        detail: format!("max relative mismatch {worst:.2e} over {evaluated} channel pairs"),
    })
}

/// E|h|² = 1 within three standard errors of the sample mean.
fn unit_gain_checks(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (i, k_db) in [f64::NEG_INFINITY, 5.0, 10.0].into_iter().enumerate() {
        let fading = FadingModel::from_k_db(k_db)?;
        let mut rng = stream_rng(seed, StreamId::new(i as u64, P_GAIN, 0));
        let sum: f64 = (0..GAIN_DRAWS).map(|_| fading.draw(&mut rng).gain()).sum();
        let mean = sum / GAIN_DRAWS as f64;
        let (mu, v) = (fading.component_mean(), fading.component_variance());
        let var_gain = 2.0 * (2.0 * v * v + 4.0 * mu * mu * v);
        let se = (var_gain / GAIN_DRAWS as f64).sqrt();
        out.push(Check {
            name: "channel unit gain",
            passed: (mean - 1.0).abs() <= 3.0 * se,
            detail: format!("K_dB {k_db}: mean gain {mean:.6}, se {se:.2e}"),
        });
    }
    Ok(out)
}

/// A constant integrand yields its value exactly and zero standard error,
/// also after merging chunks.
fn constant_integrand_check() -> Result<Check> {
    let c = 0.123_456_789;
    let fading = FadingModel::from_k_db(10.0)?;
    let mut acc = WeightAccumulator::default();
    for chunk in 0..7 {
        let mut rng = stream_rng(0, StreamId::new(0, P_SCALING, 1000 + chunk));
        let part = accumulate_weights(|_| Ok(c), &fading, ChannelArity::Two, 1500, &mut rng)?;
        acc.merge(&part);
    }
    let e = acc.estimate();
    Ok(Check {
        name: "constant integrand",
        passed: e.value == c && e.std_error == 0.0,
        detail: format!("value {:e} (expected {c:e}), std error {:e}", e.value, e.std_error),
    })
}

/// Quadrupling the number of integration points halves the reported
/// standard error, within 20%.
fn std_error_scaling_check(seed: u64) -> Result<Check> {
    let fading = FadingModel::rayleigh();
    let integrand = |h: &[crate::channel::ChannelRealization<f64>]| Ok(q_function(h[0].gain().sqrt()));
    let se = |j: u64, block: u64| -> Result<f64> {
        let mut rng = stream_rng(seed, StreamId::new(0, P_SCALING, block));
        Ok(accumulate_weights(integrand, &fading, ChannelArity::One, j, &mut rng)?
            .estimate()
            .std_error)
    };
    let (a, b) = (se(100_000, 0)?, se(400_000, 1)?);
    let ratio = a / b;
    Ok(Check {
        name: "std error scaling",
        passed: (ratio / 2.0 - 1.0).abs() <= 0.2,
        detail: format!("se(J=1e5) {a:.3e}, se(J=4e5) {b:.3e}, ratio {ratio:.3} (expected 2)"),
    })
}
