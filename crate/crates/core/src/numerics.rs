//! Deterministic scalar numerics: adaptive Simpson quadrature (1-D and nested
//! 2-D) and bracketed bisection.

use std::cell::Cell;

use crate::error::{PassError, Result};

/// Adaptive Simpson integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simpson {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for Simpson {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-12, max_depth: 40 }
    }
}

impl Simpson {
    /// Integrates `f` over `[a, b]`. Fails if any subinterval reaches
    /// `max_depth` without meeting the local tolerance.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        let exhausted = Cell::new(false);
        let value = self.integrate_flagged(&f, a, b, &exhausted);
        if exhausted.get() {
            return Err(PassError::NonConvergence(format!(
                "adaptive Simpson hit depth {} on [{a}, {b}]",
                self.max_depth
            )));
        }
        Ok(value)
    }

    /// Integrates `f(x, y)` over `[x0, x1] x [y0, y1]`, inner integral over `y`.
    pub fn integrate_2d<F: Fn(f64, f64) -> f64>(&self, f: F, x0: f64, x1: f64, y0: f64, y1: f64) -> Result<f64> {
        let exhausted = Cell::new(false);
        let inner = |x: f64| self.integrate_flagged(&|y| f(x, y), y0, y1, &exhausted);
        let value = self.integrate_flagged(&inner, x0, x1, &exhausted);
        if exhausted.get() {
            return Err(PassError::NonConvergence(format!(
                "nested adaptive Simpson hit depth {} on [{x0}, {x1}] x [{y0}, {y1}]",
                self.max_depth
            )));
        }
        Ok(value)
    }

    fn integrate_flagged<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, exhausted: &Cell<bool>) -> f64 {
        if a == b {
            return 0.0;
        }
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        // Seed the tolerance from a 4-panel estimate so that a lucky 3-point
        // rule cannot set a meaningless scale.
        let (fl, fr) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
        let refined = (b - a) / 12.0 * (fa + 4.0 * fl + 2.0 * fm + 4.0 * fr + fb);
        let eps = self.abs_tol.max(self.rel_tol * refined.abs());
        self.recurse(f, Panel { a, m, b, fa, fm, fb }, whole, eps, self.max_depth, exhausted)
    }

    fn recurse<F: Fn(f64) -> f64>(
        &self,
        f: &F,
        p: Panel,
        whole: f64,
        eps: f64,
        depth: u32,
        exhausted: &Cell<bool>,
    ) -> f64 {
        let lm = 0.5 * (p.a + p.m);
        let rm = 0.5 * (p.m + p.b);
        let (flm, frm) = (f(lm), f(rm));
        let left = (p.m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
        let right = (p.b - p.m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * eps {
            return left + right + delta / 15.0;
        }
        if depth == 0 {
            exhausted.set(true);
            return left + right + delta / 15.0;
        }
        let lp = Panel { a: p.a, m: lm, b: p.m, fa: p.fa, fm: flm, fb: p.fm };
        let rp = Panel { a: p.m, m: rm, b: p.b, fa: p.fm, fm: frm, fb: p.fb };
        self.recurse(f, lp, left, 0.5 * eps, depth - 1, exhausted)
            + self.recurse(f, rp, right, 0.5 * eps, depth - 1, exhausted)
    }
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
}

/// Bisection on `[lo, hi]`; `f(lo)` and `f(hi)` must not share a sign.
///
/// Stops when the bracket is narrower than `x_tol`, when `f` hits zero exactly,
/// or when the midpoint can no longer be represented between the ends.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, x_tol: f64, max_iter: u32) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(PassError::Precondition(format!(
            "bisection needs a sign change on [{lo}, {hi}] (f = {flo}, {fhi})"
        )));
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= x_tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    if hi - lo <= x_tol {
        Ok(0.5 * (lo + hi))
    } else {
        Err(PassError::NonConvergence(format!(
            "bisection bracket [{lo}, {hi}] wider than {x_tol} after {max_iter} iterations"
        )))
    }
}
