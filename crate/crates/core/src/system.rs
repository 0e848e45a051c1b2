//! Physical constants, unit conversions, system parameters, room geometry and
//! the deterministic random source used for user drops.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PassError, Result};

/// Speed of light in vacuum, m/s (exact SI value).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Thermal noise power spectral density at room temperature, dBm/Hz.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

/// Converts a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> Result<f64> {
    if !dbm.is_finite() {
        return Err(PassError::Domain(format!("power {dbm} dBm is not finite")));
    }
    Ok(10f64.powf((dbm - 30.0) / 10.0))
}

/// Converts a power in watts to dBm. Zero or negative power has no dBm value.
pub fn watts_to_dbm(watts: f64) -> Result<f64> {
    if !(watts.is_finite() && watts > 0.0) {
        return Err(PassError::Domain(format!("power {watts} W must be finite and positive to express in dBm")));
    }
    Ok(10.0 * watts.log10() + 30.0)
}

/// Link-level parameters shared by every scenario.
///
/// `gamma` folds the free-space constant and the noise power together:
/// `gamma = (c / (4 pi f_c))^2 / sigma^2`, so that a single PA at distance `d`
/// yields `SNR = gamma * P / d^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    carrier_frequency: f64,
    wavelength: f64,
    bandwidth: f64,
    noise_power: f64,
    gamma: f64,
    num_users: usize,
    tx_power: f64,
}

impl SystemParams {
    /// Builds parameters from a carrier frequency (Hz), bandwidth (Hz), per-user
    /// transmit power (W) and user count. Noise is thermal: `-174 + 10 log10(BW)` dBm.
    pub fn new(carrier_frequency: f64, bandwidth: f64, tx_power: f64, num_users: usize) -> Result<Self> {
        if !(carrier_frequency.is_finite() && carrier_frequency > 0.0) {
            return Err(PassError::Domain(format!("carrier frequency must be positive, got {carrier_frequency}")));
        }
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(PassError::Domain(format!("bandwidth must be positive, got {bandwidth}")));
        }
        if !(tx_power.is_finite() && tx_power >= 0.0) {
            return Err(PassError::Domain(format!("transmit power must be >= 0 W, got {tx_power}")));
        }
        if num_users == 0 {
            return Err(PassError::Domain("at least one user is required".into()));
        }
        let wavelength = SPEED_OF_LIGHT / carrier_frequency;
        let noise_power = dbm_to_watts(THERMAL_NOISE_DBM_PER_HZ + 10.0 * bandwidth.log10())?;
        let free_space = SPEED_OF_LIGHT / (4.0 * PI * carrier_frequency);
        Ok(Self {
            carrier_frequency,
            wavelength,
            bandwidth,
            noise_power,
            gamma: free_space * free_space / noise_power,
            num_users,
            tx_power,
        })
    }

    pub fn carrier_frequency(&self) -> f64 {
        self.carrier_frequency
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Noise power `sigma^2` in watts.
    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    /// `gamma` in m^2/W.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    /// Per-user transmit power in watts.
    pub fn tx_power(&self) -> f64 {
        self.tx_power
    }

    /// `gamma * P`, in m^2: the distance-squared at which SNR equals one.
    pub fn gamma_p(&self) -> f64 {
        self.gamma * self.tx_power
    }

    pub fn with_tx_power(mut self, watts: f64) -> Result<Self> {
        if !(watts.is_finite() && watts >= 0.0) {
            return Err(PassError::Domain(format!("transmit power must be >= 0 W, got {watts}")));
        }
        self.tx_power = watts;
        Ok(self)
    }

    pub fn with_tx_power_dbm(self, dbm: f64) -> Result<Self> {
        self.with_tx_power(dbm_to_watts(dbm)?)
    }

    pub fn with_num_users(mut self, num_users: usize) -> Result<Self> {
        if num_users == 0 {
            return Err(PassError::Domain("at least one user is required".into()));
        }
        self.num_users = num_users;
        Ok(self)
    }
}

/// Builds [`SystemParams`] with the transmit power given in dBm.
pub fn make_params(
    carrier_frequency: f64,
    bandwidth: f64,
    tx_power_dbm: f64,
    num_users: usize,
) -> Result<SystemParams> {
    SystemParams::new(carrier_frequency, bandwidth, dbm_to_watts(tx_power_dbm)?, num_users)
}

/// Square room `[0, D] x [0, D]` with the waveguide at ceiling height `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoomGeometry {
    extent: f64,
    height: f64,
}

impl RoomGeometry {
    pub fn new(extent: f64, height: f64) -> Result<Self> {
        if !(extent.is_finite() && extent > 0.0) {
            return Err(PassError::Domain(format!("room extent must be positive, got {extent}")));
        }
        if !(height.is_finite() && height > 0.0) {
            return Err(PassError::Domain(format!("waveguide height must be positive, got {height}")));
        }
        Ok(Self { extent, height })
    }

    /// Side length `D` in metres.
    pub fn extent(&self) -> f64 {
        self.extent
    }

    /// Waveguide height `h` in metres.
    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn contains(&self, user: &UserPosition) -> bool {
        (0.0..=self.extent).contains(&user.x) && (0.0..=self.extent).contains(&user.y)
    }
}

/// Floor coordinates of a user (z = 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserPosition {
    pub x: f64,
    pub y: f64,
}

impl UserPosition {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Number of 32-bit ChaCha words reserved for one Monte Carlo block.
const WORDS_PER_BLOCK: u128 = 1 << 36;

/// Deterministic random source: a `(seed, stream)` pair.
///
/// Generators are ChaCha8 with the key expanded from `seed` by
/// `SeedableRng::seed_from_u64`, the ChaCha stream id set to `stream`, and the
/// block counter positioned at `block * 2^36` words for [`RandomSource::block_rng`].
/// The output sequence therefore depends only on `(seed, stream, block)`, never
/// on the platform or the number of threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomSource {
    pub seed: u64,
    pub stream: u64,
}

impl RandomSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Same seed, different stream.
    pub fn with_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    /// Generator for the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        self.block_rng(0)
    }

    /// Generator positioned at the start of work block `block`. Blocks are
    /// disjoint for fewer than 2^36 words drawn per block.
    pub fn block_rng(&self, block: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(u128::from(block) * WORDS_PER_BLOCK);
        rng
    }
}

/// Draws a user uniformly on the floor: `x` and `y` independent `U[0, D)`.
pub fn sample_user<R: Rng + ?Sized>(rng: &mut R, room: &RoomGeometry) -> UserPosition {
    let d = room.extent();
    let x = rng.random::<f64>() * d;
    let y = rng.random::<f64>() * d;
    UserPosition { x, y }
}
