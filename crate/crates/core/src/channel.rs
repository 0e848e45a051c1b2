//! Line-of-sight channel: free-space amplitude, PA-user distance, the exact
//! phase-coherent multi-PA sum and the per-scenario SNR functions.
//!
//! The waveguide lies along the x-axis at height `h` (y = 0). A signal received
//! by a PA at waveguide coordinate `x_l` from a user at distance `d` reaches the
//! access point (at x = 0) with phase `-2 pi (d + x_l) / lambda`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PassError, Result};
use crate::system::{RoomGeometry, SystemParams, UserPosition};

/// Complex channel sum without the `gamma` factor; magnitude carries 1/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexGain(pub Complex64);

impl ComplexGain {
    pub fn magnitude(&self) -> f64 {
        self.0.norm()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }

    /// Phase in `(-pi, pi]`.
    pub fn phase(&self) -> f64 {
        self.0.arg()
    }
}

/// `2N + 1` PAs at `anchor + offset_n`, `n = -N..=N`, with `offset_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PinchingArray {
    anchor: f64,
    offsets: Vec<f64>,
}

impl PinchingArray {
    /// Validates odd length, strictly increasing offsets and a zero centre.
    pub fn new(anchor: f64, offsets: Vec<f64>) -> Result<Self> {
        if offsets.len().is_multiple_of(2) {
            return Err(PassError::Contract(format!("a pinching array needs 2N+1 offsets, got {}", offsets.len())));
        }
        if !anchor.is_finite() || offsets.iter().any(|o| !o.is_finite()) {
            return Err(PassError::Contract("array coordinates must be finite".into()));
        }
        if offsets.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PassError::Contract("array offsets must be strictly increasing".into()));
        }
        let centre = offsets[offsets.len() / 2];
        if centre != 0.0 {
            return Err(PassError::Contract(format!("centre offset must be 0, got {centre}")));
        }
        Ok(Self { anchor, offsets })
    }

    /// A single PA at `anchor`.
    pub fn single(anchor: f64) -> Self {
        Self { anchor, offsets: vec![0.0] }
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// `N`, the number of PAs on each side of the anchor.
    pub fn half_width(&self) -> usize {
        self.offsets.len() / 2
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Absolute waveguide coordinates.
    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        self.offsets.iter().map(move |o| self.anchor + o)
    }

    /// Indices `n` of PAs that fall outside the waveguide span `[0, D]`.
    /// Offsets are never clamped; clamping would break phase alignment.
    pub fn out_of_room(&self, room: &RoomGeometry) -> Vec<i64> {
        let n = self.half_width() as i64;
        self.positions().zip(-n..=n).filter(|(x, _)| *x < 0.0 || *x > room.extent()).map(|(_, i)| i).collect()
    }
}

/// Free-space LoS amplitude `c / (4 pi f_c d) = lambda / (4 pi d)`.
pub fn los_amplitude(distance: f64, params: &SystemParams) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(PassError::Domain(format!("distance must be positive, got {distance}")));
    }
    Ok(params.wavelength() / (4.0 * PI * distance))
}

/// Distance from a floor user to a PA at waveguide coordinate `pa_x`.
pub fn pa_user_distance(user: &UserPosition, pa_x: f64, room: &RoomGeometry) -> f64 {
    let dx = pa_x - user.x;
    let h = room.height();
    (dx * dx + user.y * user.y + h * h).sqrt()
}

/// Exact channel sum `sum_n (1/d_n) exp(-j 2 pi (d_n + x_n) / lambda)` over all
/// PAs of `array`, without the `gamma` factor.
pub fn effective_gain_exact(
    array: &PinchingArray,
    user: &UserPosition,
    room: &RoomGeometry,
    params: &SystemParams,
) -> ComplexGain {
    let lambda = params.wavelength();
    let sum = array
        .positions()
        .map(|x| {
            let d = pa_user_distance(user, x, room);
            let cycles = (d + x) / lambda;
            let angle = -2.0 * PI * (cycles - cycles.floor());
            Complex64::from_polar(1.0 / d, angle)
        })
        .sum();
    ComplexGain(sum)
}

/// How the multi-PA noise is accounted for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseModel {
    /// Each of the `2N+1` PAs contributes `sigma^2`.
    #[default]
    PerPa,
    /// A single `sigma^2` at the access point.
    Single,
}

/// Offsets used for a multi-PA array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArrayLayout {
    /// Exactly phase-aligned offsets.
    #[default]
    Coherent,
    /// Uniform `n lambda` grid.
    FarZone,
}

/// Where the single shared PA sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SharedPa {
    #[default]
    Center,
    /// Two-user sum-rate optimum, recomputed for every drop.
    Optimized,
}

/// Deployment scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// `2N+1` PAs per user, one time slot each.
    Mpsu {
        n_pas: usize,
        #[serde(default)]
        layout: ArrayLayout,
        #[serde(default)]
        noise_model: NoiseModel,
    },
    /// One PA directly above each user.
    Spsu,
    /// One PA shared by all users.
    Spmu {
        #[serde(default)]
        pa: SharedPa,
    },
    /// Conventional single antenna at the ceiling corner `(0, 0, h)`.
    Siso,
}

impl ScenarioKind {
    pub fn tag(&self) -> &'static str {
        match self {
            ScenarioKind::Mpsu { .. } => "mpsu",
            ScenarioKind::Spsu => "spsu",
            ScenarioKind::Spmu { pa: SharedPa::Center } => "spmu-center",
            ScenarioKind::Spmu { pa: SharedPa::Optimized } => "spmu-optimized",
            ScenarioKind::Siso => "siso",
        }
    }
}

/// Concrete antenna placement for one SNR evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum Placement {
    Array(PinchingArray),
    /// A PA at the user's own x coordinate.
    AboveUser,
    /// A shared PA at the given waveguide coordinate.
    SharedAt(f64),
    CornerAp,
}

/// SNR for a squared distance: `gamma P / d^2`.
pub fn snr_at_distance_sq(distance_sq: f64, params: &SystemParams) -> f64 {
    params.gamma_p() / distance_sq
}

/// Multi-PA SNR from the exact coherent sum.
pub fn snr_mpsu_exact(
    array: &PinchingArray,
    user: &UserPosition,
    room: &RoomGeometry,
    params: &SystemParams,
    noise: NoiseModel,
) -> f64 {
    let gain = effective_gain_exact(array, user, room, params).norm_sqr();
    let noise_terms = match noise {
        NoiseModel::PerPa => array.len() as f64,
        NoiseModel::Single => 1.0,
    };
    params.gamma_p() * gain / noise_terms
}

/// Dedicated PA above the user: `gamma P / (y^2 + h^2)`.
pub fn snr_spsu(user: &UserPosition, room: &RoomGeometry, params: &SystemParams) -> f64 {
    let h = room.height();
    snr_at_distance_sq(user.y * user.y + h * h, params)
}

/// Shared PA at `pa_x`.
pub fn snr_spmu(user: &UserPosition, pa_x: f64, room: &RoomGeometry, params: &SystemParams) -> f64 {
    let d = pa_user_distance(user, pa_x, room);
    snr_at_distance_sq(d * d, params)
}

/// Corner access point: `gamma P / (x^2 + y^2 + h^2)`.
pub fn snr_siso(user: &UserPosition, room: &RoomGeometry, params: &SystemParams) -> f64 {
    snr_spmu(user, 0.0, room, params)
}

/// SNR of `user` under `scenario` with the given placement.
pub fn snr_for_scenario(
    scenario: &ScenarioKind,
    user: &UserPosition,
    placement: &Placement,
    room: &RoomGeometry,
    params: &SystemParams,
) -> Result<f64> {
    match (scenario, placement) {
        (ScenarioKind::Mpsu { n_pas, noise_model, .. }, Placement::Array(array)) => {
            if array.len() != 2 * n_pas + 1 {
                return Err(PassError::Contract(format!(
                    "MPSU with N = {n_pas} needs {} PAs, placement has {}",
                    2 * n_pas + 1,
                    array.len()
                )));
            }
            Ok(snr_mpsu_exact(array, user, room, params, *noise_model))
        }
        (ScenarioKind::Spsu, Placement::AboveUser) => Ok(snr_spsu(user, room, params)),
        (ScenarioKind::Spmu { .. }, Placement::SharedAt(x)) => Ok(snr_spmu(user, *x, room, params)),
        (ScenarioKind::Siso, Placement::CornerAp) => Ok(snr_siso(user, room, params)),
        (s, p) => Err(PassError::Contract(format!("placement {p:?} does not fit scenario {}", s.tag()))),
    }
}
