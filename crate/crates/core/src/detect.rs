//! Decision rules shared by the uplink, downlink and benchmark receivers.

use num_complex::Complex;
use rand::Rng;

use crate::Scalar;

/// A transmitted or decided bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub fn from_bool(one: bool) -> Self {
        if one {
            Bit::One
        } else {
            Bit::Zero
        }
    }

    pub fn is_one(self) -> bool {
        self == Bit::One
    }

    /// Antipodal symbol: `+1` for zero, `-1` for one.
    pub fn antipodal<T: Scalar>(self) -> T {
        match self {
            Bit::Zero => T::one(),
            Bit::One => -T::one(),
        }
    }

    /// Equiprobable random bit.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Bit::from_bool(rng.random::<bool>())
    }
}

/// How a variance detector chooses its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdRule {
    /// Channel-aware threshold equalizing both conditional error
    /// probabilities under the Gaussian model of the statistic.
    #[default]
    EqualError,
    /// Static threshold `γ = χ σ_w²` with
    /// `χ = 2(1+δ)(1+αδ)/(2+δ(1+α))`.
    Scaled,
}

impl ThresholdRule {
    pub fn name(self) -> &'static str {
        match self {
            ThresholdRule::EqualError => "optimal",
            ThresholdRule::Scaled => "chi",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "optimal" => Some(ThresholdRule::EqualError),
            "chi" => Some(ThresholdRule::Scaled),
            _ => None,
        }
    }
}

/// Scale factor of the static variance threshold.
pub fn chi<T: Scalar>(alpha: T, delta: T) -> T {
    let two = T::lit(2.0);
    two * (T::one() + delta) * (T::one() + alpha * delta) / (two + delta * (T::one() + alpha))
}

/// Minimum-distance decision between `h·m_low` and `h·m_high` for the
/// sample mean `ybar`. Ties go to bit zero.
pub fn mean_decision_distance<T: Scalar>(
    ybar: Complex<T>,
    h: Complex<T>,
    m_low: T,
    m_high: T,
) -> Bit {
    let d0 = (ybar - h * m_low).norm_sqr();
    let d1 = (ybar - h * m_high).norm_sqr();
    Bit::from_bool(d1 < d0)
}

/// Sign form of the minimum-distance rule for antipodal means
/// (`m_high = −m_low`): bit one iff `Re{ȳ h* m_low} < 0`.
pub fn mean_decision_sign<T: Scalar>(ybar: Complex<T>, h: Complex<T>, m_low: T) -> Bit {
    let d = (ybar * h.conj()).re * m_low;
    Bit::from_bool(d < T::zero())
}

/// Variance decision: bit one iff the statistic exceeds `gamma`.
pub fn variance_decision<T: Scalar>(statistic: T, gamma: T) -> Bit {
    Bit::from_bool(statistic > gamma)
}
