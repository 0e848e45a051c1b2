//! PA placement: phase-aligned multi-PA offsets, their far-zone grid, spacing
//! diagnostics, and the single shared PA position for one or two users.

use crate::error::{PassError, Result};
use crate::numerics::bisect;
use crate::system::{RoomGeometry, SystemParams, UserPosition};

/// Offsets `x_n`, `n = -N..=N`, that make every PA's path length
/// `d_n + x_n = d0 + n lambda`, so all received signals add in phase:
///
/// `x_n = n lambda (2 d0 + n lambda) / (2 (d0 + n lambda))`.
///
/// `d0` is the distance from the user to the PA directly above it. Requires
/// `d0 > N lambda`, otherwise the near-side PAs have no solution.
pub fn coherent_offsets(d0: f64, wavelength: f64, n_side: usize) -> Result<Vec<f64>> {
    if !(wavelength > 0.0 && d0.is_finite()) {
        return Err(PassError::Domain(format!("need lambda > 0 and finite d0 (lambda = {wavelength}, d0 = {d0})")));
    }
    let reach = n_side as f64 * wavelength;
    if !(d0 > reach) {
        return Err(PassError::Precondition(format!(
            "phase-aligned placement needs d0 > N * lambda, got d0 = {d0} m and N * lambda = {reach} m"
        )));
    }
    let n = n_side as i64;
    Ok((-n..=n)
        .map(|i| {
            let step = i as f64 * wavelength;
            step * (2.0 * d0 + step) / (2.0 * (d0 + step))
        })
        .collect())
}

/// Far-zone grid `x_n = n lambda`.
pub fn far_zone_offsets(wavelength: f64, n_side: usize) -> Vec<f64> {
    let n = n_side as i64;
    (-n..=n).map(|i| i as f64 * wavelength).collect()
}

/// Largest `|sqrt(x_n^2 + d0^2) + x_n - d0 - n lambda|` over the array.
///
/// For `x_n < 0` the path sum is evaluated as `d0^2 / (sqrt(x_n^2 + d0^2) - x_n)`,
/// which avoids cancellation for far near-side PAs.
pub fn coherence_residual(offsets: &[f64], d0: f64, wavelength: f64) -> f64 {
    let n = (offsets.len() / 2) as i64;
    offsets
        .iter()
        .zip(-n..=n)
        .map(|(&x, i)| {
            let r = x.hypot(d0);
            let path = if x < 0.0 { d0 * d0 / (r - x) } else { r + x };
            (path - d0 - i as f64 * wavelength).abs()
        })
        .fold(0.0, f64::max)
}

/// Spacings `dx_n = x_{n+1} - x_n` for `n = -N..N-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacingProfile {
    entries: Vec<(i64, f64)>,
}

impl SpacingProfile {
    /// `(n, dx_n)` pairs in index order.
    pub fn entries(&self) -> &[(i64, f64)] {
        &self.entries
    }

    pub fn spacings(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.entries.windows(2).all(|w| w[1].1 < w[0].1)
    }
}

/// Spacing profile of a `2N+1` offset list.
pub fn spacing_profile(offsets: &[f64]) -> Result<SpacingProfile> {
    if offsets.len().is_multiple_of(2) {
        return Err(PassError::Contract(format!("expected 2N+1 offsets, got {}", offsets.len())));
    }
    if offsets.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(PassError::Contract("offsets must be strictly increasing".into()));
    }
    let n = (offsets.len() / 2) as i64;
    let entries = offsets.windows(2).zip(-n..n).map(|(w, i)| (i, w[1] - w[0])).collect();
    Ok(SpacingProfile { entries })
}

/// Fixed shared PA at the middle of the waveguide, `D / 2`.
pub fn center_position(room: &RoomGeometry) -> f64 {
    room.extent() / 2.0
}

fn sq_dist(x: f64, u: &UserPosition, h: f64) -> f64 {
    let dx = x - u.x;
    dx * dx + u.y * u.y + h * h
}

/// First-order condition of the two-user high-SNR sum rate,
/// `(x - x1) / s1(x) - (x2 - x) / s2(x)`, where `s_i` is the squared PA-user
/// distance. Negative at `x1`, positive at `x2` when `x1 < x2`.
pub fn shared_position_residual(x: f64, u1: &UserPosition, u2: &UserPosition, room: &RoomGeometry) -> f64 {
    let h = room.height();
    (x - u1.x) / sq_dist(x, u1, h) - (u2.x - x) / sq_dist(x, u2, h)
}

/// Two-user sum rate with each user in its own half slot, in the high-SNR
/// limit: `log2(gamma P) - (log2 s1 + log2 s2) / 2`.
pub fn pair_sum_rate_high_snr(
    x: f64,
    u1: &UserPosition,
    u2: &UserPosition,
    room: &RoomGeometry,
    params: &SystemParams,
) -> f64 {
    let h = room.height();
    params.gamma_p().log2() - 0.5 * (sq_dist(x, u1, h).log2() + sq_dist(x, u2, h).log2())
}

fn pair_path_objective(x: f64, u1: &UserPosition, u2: &UserPosition, h: f64) -> f64 {
    -(sq_dist(x, u1, h) * sq_dist(x, u2, h)).ln()
}

/// Scan resolution for bracketing stationary points.
const SCAN_PANELS: usize = 64;

/// Shared PA position maximizing the two-user high-SNR sum rate over
/// `[min(x1, x2), max(x1, x2)]`.
///
/// Stationary points are bracketed on a uniform scan and refined by bisection;
/// the best of those and the interval ends is returned. When both users are
/// closer horizontally than their vertical offset `sqrt(y^2 + h^2)` (always the
/// case for `h > D`) the objective is concave on the interval and the result is
/// its unique stationary point.
pub fn optimal_shared_position(u1: &UserPosition, u2: &UserPosition, room: &RoomGeometry) -> Result<f64> {
    let (a, b) = if u1.x <= u2.x { (u1, u2) } else { (u2, u1) };
    if a.x == b.x {
        return Ok(a.x);
    }
    let h = room.height();
    let f = |x: f64| shared_position_residual(x, a, b, room);

    let step = (b.x - a.x) / SCAN_PANELS as f64;
    let nodes: Vec<f64> =
        (0..=SCAN_PANELS).map(|i| if i == SCAN_PANELS { b.x } else { a.x + i as f64 * step }).collect();
    let values: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();

    let mut candidates = Vec::new();
    for i in 0..SCAN_PANELS {
        let (fl, fr) = (values[i], values[i + 1]);
        if fl == 0.0 {
            candidates.push(nodes[i]);
        } else if fr != 0.0 && fl.signum() != fr.signum() {
            candidates.push(bisect(f, nodes[i], nodes[i + 1], 0.0, 200)?);
        }
    }
    if candidates.is_empty() {
        return Err(PassError::NonConvergence(format!("no stationary point bracketed between {} and {}", a.x, b.x)));
    }
    let objective = |x: f64| pair_path_objective(x, a, b, h);
    let mut best = candidates[0];
    for &x in candidates.iter().skip(1) {
        if objective(x) > objective(best) {
            best = x;
        }
    }
    for end in [a.x, b.x] {
        if objective(end) > objective(best) {
            best = end;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LAMBDA: f64 = 0.125;

    #[test]
    fn coherent_offset_values() {
        let x = coherent_offsets(5.0, LAMBDA, 1).unwrap();
        assert_eq!(x[1], 0.0);
        assert!((x[2] - 0.123_475_609_756_097_56).abs() < 1e-12);
        assert!((x[0] + 0.126_602_564_102_564_1).abs() < 1e-12);
        for (xi, target) in [(x[0], 5.0 - LAMBDA), (x[2], 5.0 + LAMBDA)] {
            assert!(((xi * xi + 25.0).sqrt() + xi - target).abs() < 1e-12);
        }
    }

    #[test]
    fn coherent_offsets_boundary() {
        let err = coherent_offsets(5.0, LAMBDA, 40).unwrap_err();
        assert!(matches!(err, PassError::Precondition(ref m) if m.contains("d0 > N * lambda")));
        assert!(coherent_offsets(5.0, LAMBDA, 39).is_ok());
        assert_eq!(coherent_offsets(0.5, LAMBDA, 0).unwrap(), vec![0.0]);
    }

    #[test]
    fn coherence_holds() {
        for (d0, n) in [(5.0, 10), (1.3, 10), (20.0, 40), (5.01, 40)] {
            let x = coherent_offsets(d0, LAMBDA, n).unwrap();
            assert!(coherence_residual(&x, d0, LAMBDA) < 1e-9 * LAMBDA, "d0 {d0} n {n}");
        }
    }

    #[test]
    fn far_zone_grid() {
        let x = far_zone_offsets(LAMBDA, 4);
        assert_eq!(x[8], 0.5);
        assert!(x.iter().zip(x.iter().rev()).all(|(a, b)| *a == -*b));
        let p = spacing_profile(&x).unwrap();
        assert!(p.spacings().all(|s| (s - LAMBDA).abs() < 1e-15));
    }

    #[test]
    fn far_zone_approaches_coherent() {
        let (d0, n) = (100.0, 10);
        let exact = coherent_offsets(d0, LAMBDA, n).unwrap();
        let fz = far_zone_offsets(LAMBDA, n);
        let worst = exact.iter().zip(&fz).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        // |x_n - n lambda| = (n lambda)^2 / (2 (d0 + n lambda)), largest at n = -N
        let bound = (n as f64 * LAMBDA).powi(2) / (2.0 * (d0 - n as f64 * LAMBDA));
        assert!(worst <= bound * (1.0 + 1e-9));
        assert!(worst <= LAMBDA * (n as f64 * LAMBDA / d0) * n as f64 / 2.0 * 1.02);
    }

    #[test]
    fn spacing_is_asymmetric_and_non_uniform() {
        let d0 = 5.0;
        let x = coherent_offsets(d0, LAMBDA, 10).unwrap();
        let p = spacing_profile(&x).unwrap();
        assert_eq!(p.len(), 20);
        assert!(p.is_strictly_decreasing());
        assert!(p.spacings().all(|s| s > LAMBDA / 2.0));
        for n in 1..=10usize {
            let a = n as f64 * LAMBDA;
            let sum = x[10 + n] + x[10 - n];
            let expected = -a * a * d0 / (d0 * d0 - a * a);
            assert!(((sum - expected) / expected).abs() < 1e-9);
            assert!(sum < 0.0);
        }
    }

    #[test]
    fn spacing_rejects_unsorted() {
        assert!(matches!(spacing_profile(&[0.0, -1.0, 1.0]), Err(PassError::Contract(_))));
        assert!(spacing_profile(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn centre() {
        for (d, c) in [(10.0, 5.0), (2.0, 1.0), (0.5, 0.25)] {
            assert_eq!(center_position(&RoomGeometry::new(d, 3.0).unwrap()), c);
        }
    }

    #[test]
    fn equal_depth_users_meet_halfway() {
        for h in [0.5, 3.0, 20.0] {
            let room = RoomGeometry::new(10.0, h).unwrap();
            let x = optimal_shared_position(&UserPosition::new(2.0, 3.0), &UserPosition::new(8.0, 3.0), &room).unwrap();
            assert!((x - 5.0).abs() < 1e-9, "h {h}: {x}");
        }
        let room = RoomGeometry::new(10.0, 3.0).unwrap();
        let x = optimal_shared_position(&UserPosition::new(4.0, 1.0), &UserPosition::new(4.0, 7.0), &room).unwrap();
        assert_eq!(x, 4.0);
    }

    #[test]
    fn asymmetric_pair_leans_to_nearer_user() {
        let room = RoomGeometry::new(10.0, 3.0).unwrap();
        let (u1, u2) = (UserPosition::new(0.0, 1.0), UserPosition::new(8.0, 6.0));
        let x = optimal_shared_position(&u1, &u2, &room).unwrap();
        assert!(shared_position_residual(x, &u1, &u2, &room).abs() < 1e-9);
        // independent root from a bracketing solver at 1e-15
        assert!((x - 0.789_791_603_337_521_1).abs() < 1e-9);
        assert!(x < 4.0);
        let swapped = optimal_shared_position(&u2, &u1, &room).unwrap();
        assert_eq!(x, swapped);
    }

    #[test]
    fn optimum_beats_grid_scan() {
        let room = RoomGeometry::new(10.0, 3.0).unwrap();
        let params = crate::system::make_params(2.4e9, 1e6, 30.0, 2).unwrap();
        let (u1, u2) = (UserPosition::new(0.0, 1.0), UserPosition::new(8.0, 6.0));
        let x = optimal_shared_position(&u1, &u2, &room).unwrap();
        let at = |x| pair_sum_rate_high_snr(x, &u1, &u2, &room, &params);
        let grid_best = (0..=80_000).map(|i| at(i as f64 * 1e-4)).fold(f64::NEG_INFINITY, f64::max);
        assert!(at(x) >= grid_best - 1e-12);
        assert!(at(x) >= at(0.0) && at(x) >= at(8.0));
    }

    #[test]
    fn low_ceiling_prefers_an_end() {
        // h and y small relative to the spread: the midpoint is a local minimum
        let room = RoomGeometry::new(10.0, 0.5).unwrap();
        let (u1, u2) = (UserPosition::new(0.0, 0.5), UserPosition::new(10.0, 0.5));
        let x = optimal_shared_position(&u1, &u2, &room).unwrap();
        let obj = |x| pair_path_objective(x, &u1, &u2, 0.5);
        assert!(obj(x) > obj(5.0));
        let grid_best = (0..=10_000).map(|i| obj(i as f64 * 1e-3)).fold(f64::NEG_INFINITY, f64::max);
        assert!(obj(x) >= grid_best - 1e-9);
    }
}
