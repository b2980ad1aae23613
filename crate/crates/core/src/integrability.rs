//! Membership of nonnegative radial functions in `L^1(B_r0, dγ_mu)` where
//! `dγ_mu = |x|^{tau_+(mu)} dx`.
//!
//! Near the origin a term `c r^tau (-ln r)^k` contributes
//! `∫_0 r^{tau + tau_+ + N - 1} (-ln r)^k dr`, finite exactly when the gap
//! `sigma = tau + tau_+(mu) + N` is positive. The log factor never rescues
//! `sigma <= 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{sign_tol, tau_pair};
use crate::radial::RadialFunction;
use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityVerdict {
    pub integrable: bool,
    /// Smallest `tau + tau_+(mu) + N` over the terms (`+inf` for zero `f`).
    pub critical_exponent_gap: f64,
}

/// Gap `sigma` of a single exponent and whether it counts as positive.
/// Values inside the boundary band count as zero, i.e. divergent.
pub fn gamma_gap(tau: f64, tau_plus: f64, n: u32) -> (f64, bool) {
    let nf = n as f64;
    let sigma = tau + tau_plus + nf;
    let scale = tau.abs() + tau_plus.abs() + nf;
    (sigma, sign_tol(sigma, scale) == Ordering::Greater)
}

/// Decides whether `f >= 0` lies in `L^1(B_r0, dγ_mu)`.
///
/// Integrability near the origin does not depend on `r0`; it is validated
/// only.
pub fn is_gamma_integrable(
    n: u32,
    mu: f64,
    f: &RadialFunction,
    r0: f64,
) -> Result<IntegrabilityVerdict> {
    let pair = tau_pair(n, mu)?;
    if !(r0 > 0.0 && r0 <= 1.0) {
        return Err(Error::invalid(format!("r0 = {r0} must lie in (0, 1]")));
    }
    if let Some(t) = f.terms().iter().find(|t| t.coeff <= 0.0) {
        return Err(Error::invalid(format!(
            "integrability test needs a nonnegative sum, found coefficient {}",
            t.coeff
        )));
    }
    let mut gap = f64::INFINITY;
    let mut integrable = true;
    for t in f.terms() {
        let (sigma, positive) = gamma_gap(t.tau, pair.tau_plus, n);
        gap = gap.min(sigma);
        integrable &= positive;
    }
    Ok(IntegrabilityVerdict {
        integrable,
        critical_exponent_gap: gap,
    })
}

/// Cutoffs `s = -ln(eps)` used by the quadrature cross-check by default.
/// `eps = e^{-s}` reaches far below the smallest positive double, which is
/// what it takes to separate a gap of 1e-3 from a logarithmic divergence.
pub const DEFAULT_LOG_CUTOFFS: [f64; 6] = [10.0, 100.0, 1e3, 1e4, 1e5, 1e6];

/// Partial masses `∫_{eps_k}^{r0} f r^{tau_+} r^{N-1} dr` for a sequence of
/// shrinking inner radii, with the convergence/divergence reading of the
/// sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureCheck {
    pub log_cutoffs: Vec<f64>,
    pub partials: Vec<f64>,
    /// Last two partial masses agree to 1e-6 relative.
    pub converged: bool,
    /// Not converged and the last partial mass exceeds ten times the first
    /// (or overflowed).
    pub diverged: bool,
}

/// Adaptive quadrature of the `dγ_mu` mass of `f` on `[e^{-s}, r0]` for
/// every `s` in `log_cutoffs` (increasing, each above `-ln r0`).
///
/// The integral is taken in the variable `s = -ln r`, where each term turns
/// into `c s^k exp(-(tau + tau_+ + N) s)`, evaluated in log space so that
/// radii below the double range stay representable.
pub fn quadrature_cross_check(
    n: u32,
    mu: f64,
    f: &RadialFunction,
    r0: f64,
    log_cutoffs: &[f64],
) -> Result<QuadratureCheck> {
    let pair = tau_pair(n, mu)?;
    if !(r0 > 0.0 && r0 <= 1.0) {
        return Err(Error::invalid(format!("r0 = {r0} must lie in (0, 1]")));
    }
    let s0 = -r0.ln();
    if log_cutoffs.len() < 2 || log_cutoffs.windows(2).any(|w| w[1] <= w[0]) || log_cutoffs[0] <= s0
    {
        return Err(Error::invalid(
            "cutoffs must increase and start inside the ball",
        ));
    }
    let weight = pair.tau_plus + n as f64;
    let integrand = |s: f64| -> f64 {
        f.terms()
            .iter()
            .map(|t| {
                let log_mag = t.coeff.abs().ln() - (t.tau + weight) * s
                    + if t.log_power == 1 { s.ln() } else { 0.0 };
                t.coeff.signum() * log_mag.exp()
            })
            .sum()
    };

    let mut partials = Vec::with_capacity(log_cutoffs.len());
    let mut acc: f64 = 0.0;
    let mut lo = s0;
    for &hi in log_cutoffs {
        if acc.is_finite() {
            acc += adaptive_simpson(&integrand, lo, hi, 1e-13);
        }
        partials.push(if acc.is_finite() { acc } else { f64::INFINITY });
        lo = hi;
    }
    let first = partials[0];
    let last = *partials.last().unwrap();
    let prev = partials[partials.len() - 2];
    let converged =
        last.is_finite() && (last - prev).abs() <= 1e-6 * last.abs().max(f64::MIN_POSITIVE);
    let diverged = !last.is_finite() || (!converged && last > 10.0 * first);
    Ok(QuadratureCheck {
        log_cutoffs: log_cutoffs.to_vec(),
        partials,
        converged,
        diverged,
    })
}

fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson with a mixed absolute/relative tolerance. Non-finite
/// samples propagate as `+inf`.
fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    // split wide ranges first so the recursion sees the decay scale
    let pieces = 64;
    let width = (b - a) / pieces as f64;
    let mut total = 0.0;
    for i in 0..pieces {
        let x0 = a + width * i as f64;
        let x1 = if i + 1 == pieces { b } else { x0 + width };
        let (fa, fb) = (f(x0), f(x1));
        let m = 0.5 * (x0 + x1);
        let fm = f(m);
        if !(fa.is_finite() && fb.is_finite() && fm.is_finite()) {
            return f64::INFINITY;
        }
        let whole = simpson(fa, fm, fb, x0, x1);
        total += recurse(f, x0, x1, fa, fm, fb, whole, tol, 48);
        if !total.is_finite() {
            return f64::INFINITY;
        }
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    if !(flm.is_finite() && frm.is_finite()) {
        return f64::INFINITY;
    }
    let left = simpson(fa, flm, fm, a, m);
    let right = simpson(fm, frm, fb, m, b);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol * (left + right).abs().max(tol) {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, tol, depth - 1)
}
