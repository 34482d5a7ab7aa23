//! Unconditional bit-error probability by Monte Carlo integration over the
//! channel distribution.
//!
//! Channel tuples are drawn from the fading density itself, so the
//! importance weight `g/z` reduces to the conditional BEP at the draw and the
//! estimate is the mean of conditional BEPs.

use rand::Rng;

use crate::channel::{ChannelRealization, FadingModel};
use crate::error::{ensure_param, Error, Result};
use crate::Scalar;

/// Minimum number of integration points accepted by [`unconditional_bep`].
pub const MIN_POINTS: u64 = 1000;

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BepEstimate<T> {
    pub value: T,
    pub std_error: T,
    pub n_points: u64,
}

/// Running mean and sum of squared deviations (Welford), mergeable in a
/// fixed order (Chan et al.) so parallel chunks reduce deterministically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightAccumulator<T> {
    n: u64,
    mean: T,
    m2: T,
}

impl<T: Scalar> Default for WeightAccumulator<T> {
    fn default() -> Self {
        Self {
            n: 0,
            mean: T::zero(),
            m2: T::zero(),
        }
    }
}

impl<T: Scalar> WeightAccumulator<T> {
    pub fn push(&mut self, w: T) {
        self.n += 1;
        let delta = w - self.mean;
        self.mean += delta / T::lit(self.n as f64);
        self.m2 += delta * (w - self.mean);
    }

    pub fn merge(&mut self, other: &Self) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let (na, nb, nt) = (
            T::lit(self.n as f64),
            T::lit(other.n as f64),
            T::lit(n as f64),
        );
        let delta = other.mean - self.mean;
        self.mean += delta * nb / nt;
        self.m2 += other.m2 + delta * delta * na * nb / nt;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn estimate(&self) -> BepEstimate<T> {
        let std_error = if self.n > 1 {
            let var = (self.m2 / T::lit((self.n - 1) as f64)).max(T::zero());
            (var / T::lit(self.n as f64)).sqrt()
        } else {
            T::zero()
        };
        BepEstimate {
            value: self.mean,
            std_error,
            n_points: self.n,
        }
    }
}

/// Number of independent channel coefficients a conditional BEP depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelArity {
    /// One coefficient (downlink user, OMA user).
    One,
    /// Two coefficients (uplink: both users' channels).
    Two,
}

impl ChannelArity {
    pub fn len(self) -> usize {
        match self {
            ChannelArity::One => 1,
            ChannelArity::Two => 2,
        }
    }
}

/// Evaluates `cond_bep` at `count` channel draws and accumulates the
/// weights. Building block for chunked parallel integration.
pub fn accumulate_weights<T, F, R>(
    cond_bep: F,
    model: &FadingModel<T>,
    arity: ChannelArity,
    count: u64,
    rng: &mut R,
) -> Result<WeightAccumulator<T>>
where
    T: Scalar,
    F: Fn(&[ChannelRealization<T>]) -> Result<T>,
    R: Rng + ?Sized,
{
    let mut acc = WeightAccumulator::default();
    let mut hs = [ChannelRealization::new(T::zero(), T::zero()); 2];
    let hs = &mut hs[..arity.len()];
    for _ in 0..count {
        for h in hs.iter_mut() {
            *h = model.draw(rng);
        }
        let w = cond_bep(hs)?;
        if !w.is_finite() {
            return Err(Error::Internal(format!(
                "non-finite weight {w} at channels {hs:?}"
            )));
        }
        acc.push(w);
    }
    Ok(acc)
}

/// Averages `cond_bep` over `j_points` channel draws from `model`.
pub fn unconditional_bep<T, F, R>(
    cond_bep: F,
    model: &FadingModel<T>,
    arity: ChannelArity,
    j_points: u64,
    rng: &mut R,
) -> Result<BepEstimate<T>>
where
    T: Scalar,
    F: Fn(&[ChannelRealization<T>]) -> Result<T>,
    R: Rng + ?Sized,
{
    ensure_param!(
        j_points >= MIN_POINTS,
        "at least {MIN_POINTS} integration points required, got {j_points}"
    );
    Ok(accumulate_weights(cond_bep, model, arity, j_points, rng)?.estimate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, SimRng, StreamId};
    use proptest::prelude::*;

    fn rng(block: u64) -> SimRng {
        stream_rng(0x7e0, StreamId::new(0, 0, block))
    }

    #[test]
    fn constant_integrand_is_exact() {
        let m = FadingModel::from_k_db(5.0).unwrap();
        let e = unconditional_bep(|_| Ok(0.123), &m, ChannelArity::Two, 5000, &mut rng(0)).unwrap();
        assert_eq!(e.value, 0.123);
        assert_eq!(e.std_error, 0.0);
        assert_eq!(e.n_points, 5000);
    }

    #[test]
    fn unit_gain_moment() {
        let m = FadingModel::<f64>::rayleigh();
        let e = unconditional_bep(
            |h| Ok(h[0].gain()),
            &m,
            ChannelArity::One,
            1_000_000,
            &mut rng(1),
        )
        .unwrap();
        assert!((e.value - 1.0).abs() < 3.0 * e.std_error, "{e:?}");
    }

    #[test]
    fn too_few_points_rejected() {
        let m = FadingModel::<f64>::rayleigh();
        assert!(unconditional_bep(|_| Ok(0.1), &m, ChannelArity::One, 999, &mut rng(2)).is_err());
    }

    #[test]
    fn non_finite_weight_aborts() {
        let m = FadingModel::<f64>::rayleigh();
        let r = unconditional_bep(|_| Ok(f64::NAN), &m, ChannelArity::One, 1000, &mut rng(3));
        assert!(matches!(r, Err(Error::Internal(_))));
    }

    #[test]
    fn standard_error_scales_with_inverse_root_j() {
        let m = FadingModel::<f64>::rayleigh();
        let f = |h: &[ChannelRealization<f64>]| Ok((-h[0].gain()).exp());
        let a = unconditional_bep(f, &m, ChannelArity::One, 100_000, &mut rng(4)).unwrap();
        let b = unconditional_bep(f, &m, ChannelArity::One, 400_000, &mut rng(5)).unwrap();
        let ratio = a.std_error / b.std_error;
        assert!((ratio / 2.0 - 1.0).abs() < 0.2, "{ratio}");
    }

    #[test]
    fn estimator_unbiased_over_repetitions() {
        // E[exp(-|h|²)] = 1/2 for unit-mean exponential |h|².
        let m = FadingModel::<f64>::rayleigh();
        let f = |h: &[ChannelRealization<f64>]| Ok((-h[0].gain()).exp());
        let estimates: Vec<f64> = (0..100)
            .map(|i| unconditional_bep(f, &m, ChannelArity::One, 2000, &mut rng(100 + i)).unwrap().value)
            .collect();
        let mean = estimates.iter().sum::<f64>() / 100.0;
        let sd = (estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / 99.0).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * sd / 10.0, "{mean} sd {sd}");
    }

    #[test]
    fn chunked_merge_matches_single_pass() {
        let m = FadingModel::<f64>::from_k_db(10.0).unwrap();
        let f = |h: &[ChannelRealization<f64>]| Ok(h[0].re().abs() * h[1].im().abs());
        let single = accumulate_weights(f, &m, ChannelArity::Two, 3000, &mut rng(6)).unwrap();
        let mut r = rng(6);
        let mut merged = WeightAccumulator::default();
        for _ in 0..3 {
            merged.merge(&accumulate_weights(f, &m, ChannelArity::Two, 1000, &mut r).unwrap());
        }
        let (a, b) = (single.estimate(), merged.estimate());
        assert_eq!(a.n_points, b.n_points);
        assert!((a.value - b.value).abs() < 1e-14);
        assert!((a.std_error - b.std_error).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn merge_of_constant_chunks_is_exact(c in 0.0f64..0.5, sizes in proptest::collection::vec(1u64..50, 1..8)) {
            let mut acc = WeightAccumulator::default();
            for s in sizes {
                let mut part = WeightAccumulator::default();
                for _ in 0..s {
                    part.push(c);
                }
                acc.merge(&part);
            }
            let e = acc.estimate();
            prop_assert_eq!(e.value, c);
            prop_assert_eq!(e.std_error, 0.0);
        }
    }
}
