//! Rician and Rayleigh block-fading coefficients.
//!
//! With Rician factor `K`, the real and imaginary parts of `h` are
//! independent `N(√(K/(2(1+K))), 1/(2(1+K)))`, so `E|h|² = 1` for every `K`.
//! `K = 0` is Rayleigh fading.

use num_complex::Complex;
use rand::Rng;

use crate::error::{ensure_param, Result};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingModel<T> {
    k_linear: T,
}

impl<T: Scalar> FadingModel<T> {
    /// Model with linear Rician factor `k_linear`.
    pub fn new(k_linear: T) -> Result<Self> {
        ensure_param!(
            k_linear >= T::zero() && k_linear.is_finite(),
            "Rician factor must be finite and non-negative, got {k_linear}"
        );
        Ok(Self { k_linear })
    }

    pub fn rayleigh() -> Self {
        Self {
            k_linear: T::zero(),
        }
    }

    /// Model from a Rician factor in dB; `-inf` dB is Rayleigh.
    pub fn from_k_db(k_db: T) -> Result<Self> {
        ensure_param!(!k_db.is_nan(), "Rician factor in dB is NaN");
        if k_db == T::neg_infinity() {
            return Ok(Self::rayleigh());
        }
        Self::new(T::lit(10.0).powf(k_db / T::lit(10.0)))
    }

    pub fn k_linear(&self) -> T {
        self.k_linear
    }

    /// Mean of each real component.
    pub fn component_mean(&self) -> T {
        let k = self.k_linear;
        (k / (T::lit(2.0) * (T::one() + k))).sqrt()
    }

    /// Variance of each real component.
    pub fn component_variance(&self) -> T {
        (T::lit(2.0) * (T::one() + self.k_linear)).recip()
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelRealization<T> {
        let m = self.component_mean();
        let sd = self.component_variance().sqrt();
        ChannelRealization {
            h: Complex::new(
                m + sd * T::standard_normal(rng),
                m + sd * T::standard_normal(rng),
            ),
        }
    }
}

/// One complex channel coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRealization<T> {
    pub h: Complex<T>,
}

impl<T: Scalar> ChannelRealization<T> {
    pub fn new(re: T, im: T) -> Self {
        Self {
            h: Complex::new(re, im),
        }
    }

    pub fn re(&self) -> T {
        self.h.re
    }

    pub fn im(&self) -> T {
        self.h.im
    }

    pub fn gain(&self) -> T {
        self.h.norm_sqr()
    }
}

impl<T> From<Complex<T>> for ChannelRealization<T> {
    fn from(h: Complex<T>) -> Self {
        Self { h }
    }
}

/// Draws one coefficient from `model`.
pub fn draw_channel<T: Scalar, R: Rng + ?Sized>(
    model: &FadingModel<T>,
    rng: &mut R,
) -> ChannelRealization<T> {
    model.draw(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, StreamId};

    fn rng(block: u64) -> crate::rng::SimRng {
        stream_rng(0xc4a, StreamId::new(0, 0, block))
    }

    #[test]
    fn rejects_invalid_factor() {
        assert!(FadingModel::new(-1.0).is_err());
        assert!(FadingModel::new(f64::INFINITY).is_err());
        assert!(FadingModel::from_k_db(f64::NAN).is_err());
    }

    #[test]
    fn db_conversion() {
        assert_eq!(FadingModel::from_k_db(f64::NEG_INFINITY).unwrap().k_linear(), 0.0);
        assert!((FadingModel::from_k_db(10.0f64).unwrap().k_linear() - 10.0).abs() < 1e-12);
        assert!((FadingModel::from_k_db(0.0f64).unwrap().k_linear() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rayleigh_unit_gain() {
        let m = FadingModel::<f64>::rayleigh();
        assert_eq!(m.component_mean(), 0.0);
        assert_eq!(m.component_variance(), 0.5);
        let mut r = rng(0);
        let n = 1_000_000;
        let g = (0..n).map(|_| m.draw(&mut r).gain()).sum::<f64>() / n as f64;
        assert!((g - 1.0).abs() < 0.005, "gain {g}");
    }

    #[test]
    fn strong_line_of_sight() {
        let m = FadingModel::new(1e6).unwrap();
        let mut r = rng(1);
        let h = m.draw(&mut r);
        assert!((h.re() - 0.5f64.sqrt()).abs() < 0.01);
        assert!((h.im() - 0.5f64.sqrt()).abs() < 0.01);
        assert!((h.gain() - 1.0).abs() < 0.02);
    }

    #[test]
    fn rician_component_moments() {
        let m = FadingModel::new(10.0).unwrap();
        assert!((m.component_mean() - (10.0f64 / 22.0).sqrt()).abs() < 1e-15);
        assert!((m.component_variance() - 1.0 / 22.0).abs() < 1e-15);
        let mut r = rng(2);
        let n = 1_000_000;
        let xs: Vec<f64> = (0..n).map(|_| m.draw(&mut r).re()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se_mean = (1.0 / 22.0 / n as f64).sqrt();
        let se_var = (1.0 / 22.0) * (2.0 / (n - 1) as f64).sqrt();
        assert!((mean - 0.674_199_862_463_242).abs() < 3.0 * se_mean, "mean {mean}");
        assert!((var - 1.0 / 22.0).abs() < 3.0 * se_var, "var {var}");
    }

    #[test]
    fn components_uncorrelated() {
        let m = FadingModel::new(3.0).unwrap();
        let mut r = rng(3);
        let n = 100_000;
        let hs: Vec<_> = (0..n).map(|_| m.draw(&mut r)).collect();
        let mr = hs.iter().map(|h| h.re()).sum::<f64>() / n as f64;
        let mi = hs.iter().map(|h| h.im()).sum::<f64>() / n as f64;
        let cov = hs.iter().map(|h| (h.re() - mr) * (h.im() - mi)).sum::<f64>() / n as f64;
        let corr = cov / m.component_variance();
        assert!(corr.abs() < 0.01, "corr {corr}");
    }
}
