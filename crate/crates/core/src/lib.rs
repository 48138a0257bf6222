//! Event-triggered control under a dynamic triggering condition.
//!
//! The crate computes the analytic guarantees of the condition (minimum inter-event time,
//! admissible Lyapunov scaling, `L_p` budget, inter-event enlargement) and simulates the
//! sampled closed loop with event localization. Everything numeric is generic over
//! [`Scalar`] (`f32` or `f64`); `f64` aliases are provided at the crate root.

pub mod bounds;
pub mod certificate;
pub mod config;
pub mod error;
pub mod experiment;
pub mod plants;
pub mod scalar;
pub mod sim;
pub mod trigger;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Bound64 = bounds::Bound<f64>;
pub type BoundsReport64 = bounds::BoundsReport<f64>;
pub type CertificateConstants64 = certificate::CertificateConstants<f64>;
pub type LurePlant64 = plants::LurePlant<f64>;
pub type TriggerConfig64 = trigger::TriggerConfig<f64>;
pub type IntegratorConfig64 = sim::IntegratorConfig<f64>;
pub type RunOutput64 = sim::RunOutput<f64>;
pub type Disturbance64 = plants::Disturbance<f64>;
