//! Seeded Monte Carlo estimation of ergodic rates.
//!
//! Samples are split into fixed blocks of [`BLOCK_SIZE`] drops. Block `b` draws
//! from `RandomSource::block_rng(b)`, accumulates Welford moments, and blocks
//! are merged in index order. The estimate is therefore bit-identical across
//! runs, thread counts and the serial/parallel execution paths.

use std::f64::consts::LN_2;

use rand_chacha::ChaCha8Rng;

use crate::channel::{
    snr_mpsu_exact, snr_siso, snr_spmu, snr_spsu, ArrayLayout, NoiseModel, PinchingArray, ScenarioKind, SharedPa,
};
use crate::error::{PassError, Result};
use crate::placement::{center_position, coherent_offsets, far_zone_offsets, optimal_shared_position};
use crate::system::{sample_user, RandomSource, RoomGeometry, SystemParams};

/// Drops per work block.
pub const BLOCK_SIZE: u64 = 4096;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.96;

/// A scenario together with the room and link parameters it runs in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub room: RoomGeometry,
    pub params: SystemParams,
}

/// Monte Carlo estimate with a 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub mean: f64,
    pub ci_half_width: f64,
    pub n_samples: u64,
    pub seed: u64,
    /// Users whose `d0 <= N lambda` forced the far-zone grid instead of the
    /// phase-aligned offsets.
    pub nz_violations: u64,
}

/// Whether blocks are evaluated on the rayon pool or on the calling thread.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    /// Falls back to serial when the `parallel` feature is off.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Serial
        }
    }
}

/// One Monte Carlo drop.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Draw {
    pub value: f64,
    pub violations: u32,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
    violations: u64,
}

impl Moments {
    fn push(&mut self, draw: Draw) {
        self.count += 1;
        let delta = draw.value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (draw.value - self.mean);
        self.violations += u64::from(draw.violations);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + delta * delta * self.count as f64 * other.count as f64 / count as f64;
        Moments { count, mean, m2, violations: self.violations + other.violations }
    }
}

/// Mean of `draw` over `n_samples` drops, with the blocked reduction described
/// in the module docs. This is the engine behind every scenario estimator.
pub fn sample_mean<F>(n_samples: u64, source: &RandomSource, exec: Execution, draw: F) -> Result<RateEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Draw> + Sync,
{
    if n_samples == 0 {
        return Err(PassError::Domain("Monte Carlo needs at least one sample".into()));
    }
    let n_blocks = n_samples.div_ceil(BLOCK_SIZE);
    let run_block = |b: u64| -> Result<Moments> {
        let mut rng = source.block_rng(b);
        let len = BLOCK_SIZE.min(n_samples - b * BLOCK_SIZE);
        let mut m = Moments::default();
        for _ in 0..len {
            m.push(draw(&mut rng)?);
        }
        Ok(m)
    };
    let blocks: Vec<Moments> = match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n_blocks).into_par_iter().map(run_block).collect::<Result<_>>()?
        }
        _ => (0..n_blocks).map(run_block).collect::<Result<_>>()?,
    };
    let total = blocks.into_iter().fold(Moments::default(), Moments::merge);
    let variance = if total.count > 1 { total.m2 / (total.count - 1) as f64 } else { 0.0 };
    Ok(RateEstimate {
        mean: total.mean,
        ci_half_width: Z95 * (variance / total.count as f64).sqrt(),
        n_samples: total.count,
        seed: source.seed,
        nz_violations: total.violations,
    })
}

fn slot_rate(snr: f64, users: f64) -> f64 {
    snr.ln_1p() / LN_2 / users
}

fn mpsu_user(
    cfg: &ScenarioConfig,
    n_side: usize,
    layout: ArrayLayout,
    noise: NoiseModel,
    rng: &mut ChaCha8Rng,
) -> Result<Draw> {
    let user = sample_user(rng, &cfg.room);
    let h = cfg.room.height();
    let lambda = cfg.params.wavelength();
    let d0 = user.y.hypot(h);
    let mut violations = 0;
    let offsets = match layout {
        ArrayLayout::FarZone => far_zone_offsets(lambda, n_side),
        ArrayLayout::Coherent if d0 > n_side as f64 * lambda => coherent_offsets(d0, lambda, n_side)?,
        ArrayLayout::Coherent => {
            violations = 1;
            far_zone_offsets(lambda, n_side)
        }
    };
    let array = PinchingArray::new(user.x, offsets)?;
    let snr = snr_mpsu_exact(&array, &user, &cfg.room, &cfg.params, noise);
    Ok(Draw { value: slot_rate(snr, cfg.params.num_users() as f64), violations })
}

fn drop_value(cfg: &ScenarioConfig, users_per_drop: usize, rng: &mut ChaCha8Rng) -> Result<Draw> {
    let room = &cfg.room;
    let params = &cfg.params;
    let users = params.num_users() as f64;
    let mut total = Draw::default();
    match cfg.kind {
        ScenarioKind::Spmu { pa: SharedPa::Optimized } => {
            if params.num_users() != 2 {
                return Err(PassError::Precondition(format!(
                    "optimized shared-PA placement is defined for two users, got {}",
                    params.num_users()
                )));
            }
            let u1 = sample_user(rng, room);
            let u2 = sample_user(rng, room);
            let x = optimal_shared_position(&u1, &u2, room)?;
            let sum =
                slot_rate(snr_spmu(&u1, x, room, params), users) + slot_rate(snr_spmu(&u2, x, room, params), users);
            total.value = if users_per_drop == 1 { sum / 2.0 } else { sum };
        }
        kind => {
            for _ in 0..users_per_drop {
                let d = match kind {
                    ScenarioKind::Mpsu { n_pas, layout, noise_model } => {
                        mpsu_user(cfg, n_pas, layout, noise_model, rng)?
                    }
                    ScenarioKind::Spsu => {
                        let u = sample_user(rng, room);
                        Draw { value: slot_rate(snr_spsu(&u, room, params), users), violations: 0 }
                    }
                    ScenarioKind::Spmu { .. } => {
                        let u = sample_user(rng, room);
                        let x = center_position(room);
                        Draw { value: slot_rate(snr_spmu(&u, x, room, params), users), violations: 0 }
                    }
                    ScenarioKind::Siso => {
                        let u = sample_user(rng, room);
                        Draw { value: slot_rate(snr_siso(&u, room, params), users), violations: 0 }
                    }
                };
                total.value += d.value;
                total.violations += d.violations;
            }
        }
    }
    Ok(total)
}

/// Per-user ergodic rate `E[(1/I) log2(1 + SNR)]` over uniform user drops.
///
/// Multi-PA drops anchor the centre PA above the user and recompute the
/// offsets from the drawn `d0`. The optimized shared-PA scenario draws two
/// users per sample, places the PA at their optimum and averages both rates.
pub fn estimate_rate(cfg: &ScenarioConfig, n_samples: u64, rng: &RandomSource) -> Result<RateEstimate> {
    estimate_rate_with(cfg, n_samples, rng, Execution::default())
}

pub fn estimate_rate_with(
    cfg: &ScenarioConfig,
    n_samples: u64,
    rng: &RandomSource,
    exec: Execution,
) -> Result<RateEstimate> {
    sample_mean(n_samples, rng, exec, |r| drop_value(cfg, 1, r))
}

/// Ergodic sum rate: all `I` users are drawn in every drop and their slot
/// rates added.
pub fn estimate_sum_rate(cfg: &ScenarioConfig, n_samples: u64, rng: &RandomSource) -> Result<RateEstimate> {
    estimate_sum_rate_with(cfg, n_samples, rng, Execution::default())
}

pub fn estimate_sum_rate_with(
    cfg: &ScenarioConfig,
    n_samples: u64,
    rng: &RandomSource,
    exec: Execution,
) -> Result<RateEstimate> {
    let users = cfg.params.num_users();
    sample_mean(n_samples, rng, exec, |r| drop_value(cfg, users, r))
}

/// Sum-rate gap of one PA per user over a shared centre PA,
/// `I * (R_spsu - R_spmu)`, estimated on common user drops so that both rates
/// see the same positions.
pub fn estimate_spsu_spmu_gap(
    room: &RoomGeometry,
    params: &SystemParams,
    n_samples: u64,
    rng: &RandomSource,
    exec: Execution,
) -> Result<RateEstimate> {
    let x = center_position(room);
    sample_mean(n_samples, rng, exec, |r| {
        let u = sample_user(r, room);
        let value = slot_rate(snr_spsu(&u, room, params), 1.0) - slot_rate(snr_spmu(&u, x, room, params), 1.0);
        Ok(Draw { value, violations: 0 })
    })
}

/// One row of a [`convergence_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n_samples: u64,
    pub mean: f64,
    pub ci_half_width: f64,
    /// CI half-width relative to the previous row.
    pub ci_ratio: Option<f64>,
}

/// Per-user estimates for an increasing schedule of sample counts. Later rows
/// reuse the blocks of earlier ones, so the table is reproducible per seed.
pub fn convergence_report(cfg: &ScenarioConfig, schedule: &[u64], rng: &RandomSource) -> Result<Vec<ConvergenceRow>> {
    if schedule.is_empty() || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PassError::Domain("schedule must be non-empty and strictly increasing".into()));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(schedule.len());
    for &n in schedule {
        let est = estimate_rate(cfg, n, rng)?;
        let ci_ratio = rows.last().map(|prev| est.ci_half_width / prev.ci_half_width);
        rows.push(ConvergenceRow { n_samples: n, mean: est.mean, ci_half_width: est.ci_half_width, ci_ratio });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::{rate_closed_form, rate_spsu};
    use crate::system::make_params;

    fn cfg(kind: ScenarioKind, dbm: f64) -> ScenarioConfig {
        ScenarioConfig {
            kind,
            room: RoomGeometry::new(10.0, 20.0).unwrap(),
            params: make_params(2.4e9, 1e6, dbm, 2).unwrap(),
        }
    }

    #[test]
    fn welford_merge_matches_direct() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1013) as f64 * 0.01).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(Draw { value: x, violations: 0 }));
        let (mut a, mut b) = (Moments::default(), Moments::default());
        xs[..333].iter().for_each(|&x| a.push(Draw { value: x, violations: 0 }));
        xs[333..].iter().for_each(|&x| b.push(Draw { value: x, violations: 0 }));
        let merged = a.merge(b);
        let mean = xs.iter().sum::<f64>() / 1000.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 999.0;
        assert!((merged.mean - mean).abs() < 1e-12);
        assert!((merged.m2 / 999.0 - var).abs() < 1e-10);
        assert!((whole.m2 - merged.m2).abs() < 1e-9);
    }

    #[test]
    fn zero_power_is_exactly_zero() {
        let mut c = cfg(ScenarioKind::Spsu, 0.0);
        c.params = c.params.with_tx_power(0.0).unwrap();
        let e = estimate_rate(&c, 10_000, &RandomSource::new(1, 0)).unwrap();
        assert_eq!((e.mean, e.ci_half_width, e.n_samples), (0.0, 0.0, 10_000));
    }

    #[test]
    fn spsu_agrees_with_closed_form() {
        let c = cfg(ScenarioKind::Spsu, 30.0);
        let e = estimate_rate(&c, 200_000, &RandomSource::new(9, 0)).unwrap();
        let exact = rate_spsu(&c.params, &c.room).value;
        assert!((e.mean - exact).abs() < 3.0 * e.ci_half_width, "{} vs {exact} ± {}", e.mean, e.ci_half_width);
    }

    #[test]
    fn far_zone_kernel_matches_closed_form() {
        // (1/I) log2(1 + 2N gamma P / d0^2) for draws with d0 >= 10 N lambda
        let c = cfg(ScenarioKind::Spsu, 20.0);
        let n = 10usize;
        let cutoff = 10.0 * n as f64 * c.params.wavelength();
        assert!(c.room.height() >= cutoff);
        let users = c.params.num_users() as f64;
        let gain = 2.0 * n as f64 * c.params.gamma_p();
        let e = sample_mean(300_000, &RandomSource::new(4, 2), Execution::default(), |r| {
            let u = sample_user(r, &c.room);
            let d0_sq = u.y * u.y + c.room.height().powi(2);
            Ok(Draw { value: slot_rate(gain / d0_sq, users), violations: 0 })
        })
        .unwrap();
        let exact = rate_closed_form(&c.params, &c.room, 2.0 * n as f64).value;
        assert!((e.mean - exact).abs() < 3.0 * e.ci_half_width);
    }

    #[test]
    fn exact_phase_mpsu_exceeds_closed_form_slightly() {
        let kind = ScenarioKind::Mpsu { n_pas: 10, layout: ArrayLayout::Coherent, noise_model: NoiseModel::PerPa };
        let c = cfg(kind, 10.0);
        let e = estimate_rate(&c, 50_000, &RandomSource::new(2, 0)).unwrap();
        let gap = e.mean - crate::rates::rate_mpsu(&c.params, &c.room, 10).value;
        assert!((0.0..0.25).contains(&gap), "gap {gap}");
        assert_eq!(e.nz_violations, 0);
    }

    #[test]
    fn near_zone_draws_are_counted() {
        let kind = ScenarioKind::Mpsu { n_pas: 10, layout: ArrayLayout::Coherent, noise_model: NoiseModel::PerPa };
        let mut c = cfg(kind, 0.0);
        c.room = RoomGeometry::new(2.0, 1.0).unwrap();
        let e = estimate_rate(&c, 20_000, &RandomSource::new(3, 0)).unwrap();
        // d0 = sqrt(y^2 + 1) <= 10 lambda iff y <= 0.7498..., y ~ U[0, 2]
        let lam10 = 10.0 * c.params.wavelength();
        let p = (lam10 * lam10 - 1.0).sqrt() / 2.0;
        let expected = p * 20_000.0;
        let sd = (20_000.0 * p * (1.0 - p)).sqrt();
        assert!((e.nz_violations as f64 - expected).abs() < 4.0 * sd, "{}", e.nz_violations);
    }

    #[test]
    fn single_user_sum_rate_is_rate() {
        let mut c = cfg(ScenarioKind::Siso, 10.0);
        c.params = c.params.with_num_users(1).unwrap();
        let src = RandomSource::new(5, 1);
        let a = estimate_rate(&c, 10_000, &src).unwrap();
        let b = estimate_sum_rate(&c, 10_000, &src).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn optimized_spmu_requires_two_users() {
        let mut c = cfg(ScenarioKind::Spmu { pa: SharedPa::Optimized }, 10.0);
        c.params = c.params.with_num_users(3).unwrap();
        assert!(matches!(estimate_rate(&c, 100, &RandomSource::new(1, 1)), Err(PassError::Precondition(_))));
    }

    #[test]
    fn serial_and_parallel_agree_bitwise() {
        let kind = ScenarioKind::Mpsu { n_pas: 4, layout: ArrayLayout::Coherent, noise_model: NoiseModel::PerPa };
        let c = cfg(kind, 5.0);
        let src = RandomSource::new(77, 3);
        let s = estimate_rate_with(&c, 20_001, &src, Execution::Serial).unwrap();
        let p = estimate_rate_with(&c, 20_001, &src, Execution::Parallel).unwrap();
        assert_eq!(s, p);
        assert_eq!(s, estimate_rate(&c, 20_001, &src).unwrap());
    }

    #[test]
    fn rejects_empty_runs() {
        let c = cfg(ScenarioKind::Spsu, 0.0);
        assert!(estimate_rate(&c, 0, &RandomSource::new(1, 0)).is_err());
        assert!(convergence_report(&c, &[10, 10], &RandomSource::new(1, 0)).is_err());
        assert!(convergence_report(&c, &[], &RandomSource::new(1, 0)).is_err());
    }

    #[test]
    fn convergence_halves_per_fourfold() {
        let c = cfg(ScenarioKind::Spsu, 30.0);
        let src = RandomSource::new(12, 0);
        let rows = convergence_report(&c, &[10_000, 40_000, 160_000], &src).unwrap();
        for r in &rows[1..] {
            let ratio = r.ci_ratio.unwrap();
            assert!((ratio - 0.5).abs() < 0.1, "ratio {ratio}");
        }
        assert_eq!(rows, convergence_report(&c, &[10_000, 40_000, 160_000], &src).unwrap());
    }
}
