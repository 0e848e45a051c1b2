//! Closed-form, series and quadrature ergodic rates for users uniformly
//! distributed on the floor, each served in a `1/I` time slot.
//!
//! All dedicated-PA scenarios share one kernel: for a PA above the user the
//! squared distance is `y^2 + h^2` with `y ~ U[0, D]`, and an array gain `g`
//! multiplies `gamma P`. Using
//! `int_0^D ln(y^2 + a) dy = D ln(D^2 + a) + 2 sqrt(a) atan(D / sqrt(a)) - 2D`
//! the expectation of `(1/I) log2(1 + g gamma P / (y^2 + h^2))` is
//!
//! ```text
//! (1/I) log2(1 + g gamma P / (D^2 + h^2))
//!   + 2 / (I D ln 2) * (sqrt(h^2 + g gamma P) atan(D / sqrt(h^2 + g gamma P)) - h atan(D / h))
//! ```

use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{PassError, Result};
use crate::numerics::Simpson;
use crate::system::{RoomGeometry, SystemParams};

/// How a rate value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Exact closed form.
    Theorem,
    /// High-SNR closed form.
    HighSnr,
    /// Truncated arctangent series (needs `h > D`).
    Maclaurin,
    /// Numerical double integral.
    Quadrature,
    /// Closed-form approximation of the shared-PA rate.
    Approx,
    /// Monte Carlo estimate.
    Montecarlo,
}

impl Method {
    pub const ALL: [Method; 6] =
        [Method::Theorem, Method::HighSnr, Method::Maclaurin, Method::Quadrature, Method::Approx, Method::Montecarlo];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Theorem => "theorem",
            Method::HighSnr => "high_snr",
            Method::Maclaurin => "maclaurin",
            Method::Quadrature => "quadrature",
            Method::Approx => "approx",
            Method::Montecarlo => "montecarlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = PassError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| PassError::Config(format!("unknown method '{s}'")))
    }
}

/// Ergodic rate in bits/s/Hz tagged with its method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateValue {
    pub value: f64,
    pub method: Method,
}

/// Array gain factor of a `2N+1`-PA deployment: `2N`, or 1 for a single PA.
pub fn mpsu_gain(n_side: usize) -> f64 {
    if n_side == 0 {
        1.0
    } else {
        2.0 * n_side as f64
    }
}

/// Far-zone magnitude of the coherent channel sum, `(2/lambda) asinh(N lambda / d0)`,
/// from approximating `sum_n 1/sqrt(d0^2 + n^2 lambda^2)` by an integral.
pub fn far_zone_array_amplitude(d0: f64, wavelength: f64, n_side: usize) -> f64 {
    2.0 / wavelength * (n_side as f64 * wavelength / d0).asinh()
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

/// Exact ergodic rate of a dedicated PA (or phase-aligned array) with gain
/// factor `gain >= 1`. `gain = 1` is the single-PA-per-user rate.
pub fn rate_closed_form(params: &SystemParams, room: &RoomGeometry, gain: f64) -> RateValue {
    let (d, h) = (room.extent(), room.height());
    let users = params.num_users() as f64;
    let gp = gain * params.gamma_p();
    let a = (h * h + gp).sqrt();
    let tail = a * (d / a).atan() - h * (d / h).atan();
    RateValue {
        value: log2_1p(gp / (d * d + h * h)) / users + 2.0 / (users * d * LN_2) * tail,
        method: Method::Theorem,
    }
}

/// Multi-PA rate with `2N+1` aligned PAs (gain `2N`).
pub fn rate_mpsu(params: &SystemParams, room: &RoomGeometry, n_side: usize) -> RateValue {
    rate_closed_form(params, room, mpsu_gain(n_side))
}

/// Single-PA-per-user rate.
pub fn rate_spsu(params: &SystemParams, room: &RoomGeometry) -> RateValue {
    rate_closed_form(params, room, 1.0)
}

/// High-SNR form: `sqrt(a) atan(D / sqrt(a))` replaced by `D`. The error is at
/// most `2 D^2 / (3 I ln2 (h^2 + g gamma P))`.
pub fn rate_high_snr(params: &SystemParams, room: &RoomGeometry, gain: f64) -> RateValue {
    let (d, h) = (room.extent(), room.height());
    let users = params.num_users() as f64;
    let gp = gain * params.gamma_p();
    RateValue {
        value: log2_1p(gp / (d * d + h * h)) / users + 2.0 / (users * LN_2)
            - 2.0 * h / (users * d * LN_2) * (d / h).atan(),
        method: Method::HighSnr,
    }
}

/// Bound on `|rate_high_snr - rate_closed_form|` from the alternating arctangent series.
pub fn high_snr_error_bound(params: &SystemParams, room: &RoomGeometry, gain: f64) -> f64 {
    let (d, h) = (room.extent(), room.height());
    2.0 * d * d / (3.0 * params.num_users() as f64 * LN_2 * (h * h + gain * params.gamma_p()))
}

/// Default truncation tolerance of [`rate_spsu_series`].
pub const SERIES_TOL: f64 = 1e-12;
/// Term cap of [`rate_spsu_series`].
pub const SERIES_MAX_TERMS: usize = 500;

/// Single-PA-per-user rate with both arctangents expanded in their Maclaurin
/// series. Only converges for `h > D`.
///
/// Summation stops once `(D^2/h^2)^k / (2k + 1)`, which bounds the magnitude of
/// term `k`, falls below `tol`.
pub fn rate_spsu_series(params: &SystemParams, room: &RoomGeometry, tol: f64) -> Result<RateValue> {
    let (d, h) = (room.extent(), room.height());
    if !(h > d) {
        return Err(PassError::Precondition(format!(
            "arctangent series needs h > D (h = {h}, D = {d}); the series diverges otherwise"
        )));
    }
    let users = params.num_users() as f64;
    let gp = params.gamma_p();
    let r_signal = d * d / (h * h + gp);
    let r_ceiling = d * d / (h * h);

    let mut sum = 0.0;
    let (mut p_signal, mut p_ceiling) = (1.0_f64, 1.0_f64);
    let mut converged = false;
    for k in 0..SERIES_MAX_TERMS {
        if k > 0 {
            p_signal *= r_signal;
            p_ceiling *= r_ceiling;
        }
        let denom = (2 * k + 1) as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (p_signal - p_ceiling) / denom;
        if k > 0 && p_ceiling / denom < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(PassError::NonConvergence(format!(
            "arctangent series not below {tol} after {SERIES_MAX_TERMS} terms (D/h = {})",
            d / h
        )));
    }
    Ok(RateValue {
        value: log2_1p(gp / (d * d + h * h)) / users + 2.0 / (users * LN_2) * sum,
        method: Method::Maclaurin,
    })
}

/// Shared centre PA: `(1/(I D^2)) int_0^D int_0^D log2(1 + gamma P / ((D/2 - x)^2 + y^2 + h^2)) dy dx`
/// by nested adaptive Simpson (relative tolerance 1e-8).
pub fn rate_spmu_quadrature(params: &SystemParams, room: &RoomGeometry) -> Result<RateValue> {
    let (d, h) = (room.extent(), room.height());
    let users = params.num_users() as f64;
    let gp = params.gamma_p();
    if gp == 0.0 {
        return Ok(RateValue { value: 0.0, method: Method::Quadrature });
    }
    let half = d / 2.0;
    // integrand is even in x about D/2
    let integral = Simpson::default().integrate_2d(
        |x, y| {
            let dx = half - x;
            log2_1p(gp / (dx * dx + y * y + h * h))
        },
        0.0,
        half,
        0.0,
        d,
    )?;
    Ok(RateValue { value: 2.0 * integral / (users * d * d), method: Method::Quadrature })
}

/// High-SNR, tall-ceiling approximation of the shared centre-PA rate:
///
/// `(1/I) [log2((2D^2 + h^2 + gamma P) / (2D^2 + h^2)) - sqrt(4D^2 + h^2) / (D ln2) atan(D / sqrt(4D^2 + h^2))]`,
///
/// clamped at zero. Intended for `h > D`; outside that regime a warning is logged.
pub fn rate_spmu_approx(params: &SystemParams, room: &RoomGeometry) -> RateValue {
    let (d, h) = (room.extent(), room.height());
    if !(h > d) {
        log::warn!("shared-PA approximation assumes h > D (h = {h}, D = {d}); result may be inaccurate");
    }
    let users = params.num_users() as f64;
    let base = 2.0 * d * d + h * h;
    let r = (4.0 * d * d + h * h).sqrt();
    let raw = (log2_1p(params.gamma_p() / base) - r / (d * LN_2) * (d / r).atan()) / users;
    if raw < 0.0 {
        log::warn!("shared-PA approximation is negative ({raw}) at this power; clamped to 0");
    }
    RateValue { value: raw.max(0.0), method: Method::Approx }
}

/// High-SNR slope of every scenario: `1 / I`.
pub fn high_snr_slope(num_users: usize) -> Result<f64> {
    if num_users == 0 {
        return Err(PassError::Domain("at least one user is required".into()));
    }
    Ok(1.0 / num_users as f64)
}

/// Sum-rate gain of `2N+1` aligned PAs over one PA per user:
/// `log2(1 + 2N gamma P / (D^2 + h^2)) - log2(1 + gamma P / (D^2 + h^2))`.
pub fn scenario_gap_mpsu_spsu(params: &SystemParams, room: &RoomGeometry, n_side: usize) -> Result<f64> {
    if n_side == 0 {
        return Err(PassError::Domain("the multi-PA gap needs N >= 1".into()));
    }
    let (d, h) = (room.extent(), room.height());
    let x = params.gamma_p() / (d * d + h * h);
    Ok(log2_1p(mpsu_gain(n_side) * x) - log2_1p(x))
}
