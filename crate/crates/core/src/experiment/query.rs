//! Single rate evaluations shared by figure sweeps and `pass-sim rate`, and
//! the offset table behind `pass-sim place`.

use crate::channel::{ScenarioKind, SharedPa};
use crate::error::{PassError, Result};
use crate::montecarlo::{estimate_rate, estimate_sum_rate, ScenarioConfig};
use crate::placement::{coherent_offsets, far_zone_offsets};
use crate::rates::{
    mpsu_gain, rate_closed_form, rate_high_snr, rate_spmu_approx, rate_spmu_quadrature, rate_spsu_series, Method,
    SERIES_TOL,
};
use crate::system::{RandomSource, RoomGeometry, SystemParams};

use super::config::Quantity;

/// One evaluated point. Deterministic methods have `ci_half_width = 0` and
/// `n_samples = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub ci_half_width: f64,
    pub n_samples: u64,
}

impl Evaluation {
    fn exact(value: f64) -> Self {
        Self { value, ci_half_width: 0.0, n_samples: 0 }
    }
}

/// Rejects method/scenario pairs with no implementation.
pub fn check_method(kind: &ScenarioKind, method: Method) -> Result<()> {
    let ok = match method {
        Method::Theorem | Method::HighSnr => matches!(kind, ScenarioKind::Mpsu { .. } | ScenarioKind::Spsu),
        Method::Maclaurin => matches!(kind, ScenarioKind::Spsu),
        Method::Quadrature | Method::Approx => matches!(kind, ScenarioKind::Spmu { pa: SharedPa::Center }),
        Method::Montecarlo => true,
    };
    if ok {
        Ok(())
    } else {
        Err(PassError::Config(format!("method '{method}' is not available for scenario '{}'", kind.tag())))
    }
}

fn array_gain(kind: &ScenarioKind) -> f64 {
    match kind {
        ScenarioKind::Mpsu { n_pas, .. } => mpsu_gain(*n_pas),
        _ => 1.0,
    }
}

/// Evaluates one rate. `Quantity::Sum` multiplies deterministic per-user
/// values by `I` and draws every user in Monte Carlo drops.
pub fn evaluate(
    kind: &ScenarioKind,
    method: Method,
    params: &SystemParams,
    room: &RoomGeometry,
    quantity: Quantity,
    samples: u64,
    source: &RandomSource,
) -> Result<Evaluation> {
    check_method(kind, method)?;
    let scale = match quantity {
        Quantity::PerUser => 1.0,
        Quantity::Sum => params.num_users() as f64,
    };
    let per_user = match method {
        Method::Theorem => rate_closed_form(params, room, array_gain(kind)).value,
        Method::HighSnr => rate_high_snr(params, room, array_gain(kind)).value,
        Method::Maclaurin => rate_spsu_series(params, room, SERIES_TOL)?.value,
        Method::Quadrature => rate_spmu_quadrature(params, room)?.value,
        Method::Approx => rate_spmu_approx(params, room).value,
        Method::Montecarlo => {
            let cfg = ScenarioConfig { kind: *kind, room: *room, params: *params };
            let est = match quantity {
                Quantity::PerUser => estimate_rate(&cfg, samples, source)?,
                Quantity::Sum => estimate_sum_rate(&cfg, samples, source)?,
            };
            if est.nz_violations > 0 {
                log::warn!(
                    "{} of {} drops had d0 <= N lambda and used the far-zone grid",
                    est.nz_violations,
                    est.n_samples
                );
            }
            return Ok(Evaluation { value: est.mean, ci_half_width: est.ci_half_width, n_samples: est.n_samples });
        }
    };
    Ok(Evaluation::exact(scale * per_user))
}

/// Inputs of `pass-sim rate`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateQuery {
    pub scenario: ScenarioKind,
    pub method: Method,
    pub height: f64,
    pub extent: f64,
    pub power_dbm: f64,
    pub num_users: usize,
    pub carrier_frequency_hz: f64,
    pub bandwidth_hz: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Per-user rate in bits/s/Hz for a single parameter point.
pub fn rate_query(q: &RateQuery) -> Result<Evaluation> {
    check_method(&q.scenario, q.method)?;
    let params = crate::system::make_params(q.carrier_frequency_hz, q.bandwidth_hz, q.power_dbm, q.num_users)?;
    let room = RoomGeometry::new(q.extent, q.height)?;
    evaluate(&q.scenario, q.method, &params, &room, Quantity::PerUser, q.samples, &RandomSource::new(q.seed, 0))
}

/// `(n, x_n)` rows for `n = -N..=N`: phase-aligned offsets, or the far-zone
/// grid with `far_zone`.
pub fn placement_offsets(d0: f64, n_side: usize, wavelength: f64, far_zone: bool) -> Result<Vec<(i64, f64)>> {
    let offsets = if far_zone {
        if !(wavelength > 0.0) {
            return Err(PassError::Domain(format!("wavelength must be positive, got {wavelength}")));
        }
        far_zone_offsets(wavelength, n_side)
    } else {
        coherent_offsets(d0, wavelength, n_side)?
    };
    let n = n_side as i64;
    Ok((-n..=n).zip(offsets).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ArrayLayout, NoiseModel};

    fn query(scenario: ScenarioKind, method: Method) -> RateQuery {
        RateQuery {
            scenario,
            method,
            height: 20.0,
            extent: 10.0,
            power_dbm: 30.0,
            num_users: 2,
            carrier_frequency_hz: 2.4e9,
            bandwidth_hz: 1e6,
            samples: 20_000,
            seed: 1,
        }
    }

    fn mpsu(n_pas: usize) -> ScenarioKind {
        ScenarioKind::Mpsu { n_pas, layout: ArrayLayout::Coherent, noise_model: NoiseModel::PerPa }
    }

    #[test]
    fn spsu_theorem_value() {
        let v = rate_query(&query(ScenarioKind::Spsu, Method::Theorem)).unwrap();
        assert!((v.value - 12.88738644097681).abs() < 1e-9);
        assert_eq!(v.n_samples, 0);
    }

    #[test]
    fn zero_pas_equals_single_pa() {
        let a = rate_query(&query(mpsu(0), Method::Theorem)).unwrap();
        let b = rate_query(&query(ScenarioKind::Spsu, Method::Theorem)).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn mismatched_method_is_config_error() {
        let err = rate_query(&query(ScenarioKind::Spsu, Method::Quadrature)).unwrap_err();
        assert!(matches!(err, PassError::Config(_)));
        let err = rate_query(&query(mpsu(4), Method::Maclaurin)).unwrap_err();
        assert!(matches!(err, PassError::Config(_)));
        let err = rate_query(&query(ScenarioKind::Spmu { pa: SharedPa::Optimized }, Method::Approx)).unwrap_err();
        assert!(matches!(err, PassError::Config(_)));
    }

    #[test]
    fn approx_below_ceiling_still_returns() {
        let mut q = query(ScenarioKind::Spmu { pa: SharedPa::Center }, Method::Approx);
        q.height = 5.0;
        assert!(rate_query(&q).unwrap().value >= 0.0);
    }

    #[test]
    fn sum_scales_by_users() {
        let params = crate::system::make_params(2.4e9, 1e6, 20.0, 2).unwrap();
        let room = RoomGeometry::new(10.0, 20.0).unwrap();
        let src = RandomSource::new(1, 0);
        let per = evaluate(&ScenarioKind::Spsu, Method::Theorem, &params, &room, Quantity::PerUser, 1, &src).unwrap();
        let sum = evaluate(&ScenarioKind::Spsu, Method::Theorem, &params, &room, Quantity::Sum, 1, &src).unwrap();
        assert_eq!(sum.value, 2.0 * per.value);
    }

    #[test]
    fn placement_rows() {
        let rows = placement_offsets(1.0, 10, 0.125, false).unwrap_err();
        assert!(matches!(rows, PassError::Precondition(_)));
        let rows = placement_offsets(5.0, 2, 0.125, false).unwrap();
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[2], (0, 0.0));
        assert!((rows[3].1 - 0.12347560975609756).abs() < 1e-15);
        let fz = placement_offsets(5.0, 2, 0.125, true).unwrap();
        assert_eq!(fz[0], (-2, -0.25));
    }
}
