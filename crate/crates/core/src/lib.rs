//! Uplink pinching-antenna system (PASS) performance models.
//!
//! A single waveguide runs along one ceiling edge of a `D x D` room at height
//! `h`; pinching antennas (PAs) placed on it receive line-of-sight signals from
//! users uniformly distributed on the floor. The crate provides
//!
//! - [`system`]: constants, unit conversions, parameters and seeded user drops,
//! - [`channel`]: LoS amplitude, exact phase-coherent multi-PA sums and SNRs,
//! - [`placement`]: phase-aligned PA offsets, spacing diagnostics and the
//!   two-user shared-PA optimum,
//! - [`rates`]: closed-form, series and quadrature ergodic rates,
//! - [`montecarlo`]: seeded estimators that validate every closed form,
//! - [`experiment`]: figure presets, TOML configs and CSV output for the CLI.
//!
//! Powers are handled in watts internally; dBm only appears at the CLI edge.

// `!(a > b)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod experiment;
pub mod montecarlo;
pub mod numerics;
pub mod placement;
pub mod rates;
pub mod system;

pub use error::{PassError, Result};
