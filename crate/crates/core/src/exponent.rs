//! Hardy threshold, homogeneous exponents and the scalar boundary
//! expressions that carve up the (p, q) plane.
//!
//! For `L_mu = -Δ + mu |x|^-2` in dimension `N >= 3` the radial power
//! `r^tau` is annihilated exactly when `mu - tau (tau + N - 2) = 0`. The two
//! roots are `tau_±(mu) = -(N-2)/2 ± sqrt(mu - mu0)` with the Hardy threshold
//! `mu0 = -(N-2)^2 / 4`.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Relative width of the band around `mu0` that is snapped onto `mu0`.
pub const MU0_SNAP: f64 = 1e-13;

/// Relative tolerance used when deciding the sign of a boundary expression.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Sign of `value` with a zero band of `BOUNDARY_TOL * max(1, scale)`.
pub fn sign_tol(value: f64, scale: f64) -> Ordering {
    let band = BOUNDARY_TOL * scale.abs().max(1.0);
    if value > band {
        Ordering::Greater
    } else if value < -band {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// `mu0(N) = -(N-2)^2 / 4`.
pub fn mu_zero(n: u32) -> Result<f64> {
    if n < 3 {
        return Err(Error::Dimension(n));
    }
    let h = (n as f64 - 2.0) / 2.0;
    Ok(-h * h)
}

/// Validates `mu >= mu0(N)` and snaps values within the round-off band onto
/// `mu0` exactly, so that the double-root branch is deterministic.
pub fn admissible_mu(n: u32, mu: f64) -> Result<f64> {
    let mu0 = mu_zero(n)?;
    if !mu.is_finite() {
        return Err(Error::invalid(format!("mu must be finite, got {mu}")));
    }
    let band = MU0_SNAP * 4.0 * mu0.abs();
    if mu < mu0 - band {
        return Err(Error::BelowThreshold { mu, mu0 });
    }
    if mu <= mu0 + band {
        return Ok(mu0);
    }
    Ok(mu)
}

/// The two roots of `mu - tau (tau + N - 2) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub tau_plus: f64,
    pub tau_minus: f64,
}

/// Roots `tau_±(mu)`. At `mu = mu0` both equal `-(N-2)/2`.
pub fn tau_pair(n: u32, mu: f64) -> Result<ExponentPair> {
    let mu = admissible_mu(n, mu)?;
    let h = (n as f64 - 2.0) / 2.0;
    let disc = (mu + h * h).max(0.0);
    let s = disc.sqrt();
    let tau_minus = -h - s;
    // tau_+ through the product of roots; the direct sum cancels near mu = 0
    let tau_plus = -mu / tau_minus;
    Ok(ExponentPair {
        tau_plus,
        tau_minus,
    })
}

/// `p*_mu = 1 + 2 / (-tau_+(mu))`, defined for `mu0 <= mu < 0`.
pub fn p_star(n: u32, mu: f64) -> Result<f64> {
    let pair = tau_pair(n, mu)?;
    if mu >= 0.0 || pair.tau_plus >= 0.0 {
        return Err(Error::NonNegativeMu(mu));
    }
    Ok(1.0 + 2.0 / (-pair.tau_plus))
}

/// Dimension and the two Hardy coefficients, validated and snapped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyParams {
    pub n: u32,
    pub mu1: f64,
    pub mu2: f64,
    pub mu0: f64,
    pub tau1: ExponentPair,
    pub tau2: ExponentPair,
}

impl HardyParams {
    pub fn new(n: u32, mu1: f64, mu2: f64) -> Result<Self> {
        let mu0 = mu_zero(n)?;
        let mu1 = admissible_mu(n, mu1)?;
        let mu2 = admissible_mu(n, mu2)?;
        Ok(HardyParams {
            n,
            mu1,
            mu2,
            mu0,
            tau1: tau_pair(n, mu1)?,
            tau2: tau_pair(n, mu2)?,
        })
    }

    /// The system with the two equations exchanged.
    pub fn swapped(&self) -> Self {
        HardyParams {
            mu1: self.mu2,
            mu2: self.mu1,
            tau1: self.tau2,
            tau2: self.tau1,
            ..*self
        }
    }

    pub fn dim(&self) -> f64 {
        self.n as f64
    }

    pub fn mu1_at_threshold(&self) -> bool {
        self.mu1 == self.mu0
    }

    pub fn mu2_at_threshold(&self) -> bool {
        self.mu2 == self.mu0
    }
}

/// Positive exponents of the nonlinearities `v^p`, `u^q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPairPQ {
    pub p: f64,
    pub q: f64,
}

impl ExponentPairPQ {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p.is_finite() && q.is_finite() && p > 0.0 && q > 0.0) {
            return Err(Error::Exponents { p, q });
        }
        Ok(ExponentPairPQ { p, q })
    }

    pub fn swapped(&self) -> Self {
        ExponentPairPQ {
            p: self.q,
            q: self.p,
        }
    }
}

/// Values of every boundary expression used to split the (p, q) plane.
///
/// Ratios are `None` when the denominator `-tau_+` is not positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryExpressions {
    /// `tau_+(mu1)(pq-1) + 2p + 2`
    pub e1: f64,
    /// `tau_+(mu2)(pq-1) + 2q + 2`
    pub e2: f64,
    /// `tau_+(mu1)(pq+1) + 2p + N`
    pub e3: f64,
    /// `(N + tau_+(mu2)) / (-tau_+(mu1))`
    pub q_integrability: Option<f64>,
    /// `(N + tau_+(mu1)) / (-tau_+(mu2))`
    pub p_integrability: Option<f64>,
    /// `(2 - tau_+(mu2)) / (-tau_+(mu1))`
    pub q_corner: Option<f64>,
    /// `(2 - tau_+(mu1)) / (-tau_+(mu2))`
    pub p_corner: Option<f64>,
    /// `2 / (-tau_+(mu1))`, the lower edge of the one-sided strip.
    pub q_strip: Option<f64>,
}

pub fn boundary_expressions(params: &HardyParams, pq: &ExponentPairPQ) -> BoundaryExpressions {
    let a = params.tau1.tau_plus;
    let b = params.tau2.tau_plus;
    let n = params.dim();
    let (p, q) = (pq.p, pq.q);
    let ratio = |num: f64, tau: f64| (tau < 0.0).then(|| num / (-tau));
    BoundaryExpressions {
        e1: a * (p * q - 1.0) + 2.0 * p + 2.0,
        e2: b * (p * q - 1.0) + 2.0 * q + 2.0,
        e3: a * (p * q + 1.0) + 2.0 * p + n,
        q_integrability: ratio(n + b, a),
        p_integrability: ratio(n + a, b),
        q_corner: ratio(2.0 - b, a),
        p_corner: ratio(2.0 - a, b),
        q_strip: ratio(2.0, a),
    }
}
