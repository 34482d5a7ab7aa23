//! Link-level simulator and bit-error-probability engine for noise-domain
//! NOMA (ND-NOMA), where two users share one channel by keying the mean and
//! the variance of Gaussian noise waveforms.
//!
//! * [`stats`], [`channel`], [`detect`]: sampling, Q-function, quadratic-form
//!   moments, fading and decision rules.
//! * [`uplink`], [`downlink`]: transmitters, receivers and conditional BEPs.
//! * [`theory`]: Monte Carlo integration of conditional BEPs over fading.
//! * [`benchmarks`]: OMA-NoiseMod and PD-NOMA reference schemes.
//! * [`harness`]: sweep configuration, parallel execution and CSV output.
//!
//! The numerical code is generic over [`Scalar`] (`f32` or `f64`); the `F64`
//! aliases below name the instantiations the harness uses.

mod error;
mod scalar;

pub mod benchmarks;
pub mod ber;
pub mod channel;
pub mod detect;
pub mod downlink;
pub mod harness;
pub mod rng;
pub mod stats;
pub mod theory;
pub mod uplink;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use ber::ErrorCount;
pub use channel::{ChannelRealization, FadingModel};
pub use detect::{Bit, ThresholdRule};
pub use theory::{BepEstimate, ChannelArity};

pub type UplinkParamsF64 = uplink::UplinkParams<f64>;
pub type DownlinkParamsF64 = downlink::DownlinkParams<f64>;
pub type OmaParamsF64 = benchmarks::OmaParams<f64>;
pub type PdNomaParamsF64 = benchmarks::PdNomaParams<f64>;
pub type FadingModelF64 = FadingModel<f64>;
pub type ChannelRealizationF64 = ChannelRealization<f64>;
pub type BepEstimateF64 = BepEstimate<f64>;
