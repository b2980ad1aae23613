//! Radial functions built from `r^tau` and `r^tau (-ln r)` and the exact
//! action of the Hardy operator on them.
//!
//! For a radial `f`, `L_mu f = -(f'' + (N-1)/r f') + mu/r^2 f`. On the two
//! building blocks this gives
//!
//! ```text
//! L_mu r^tau          = (mu - tau(tau+N-2)) r^(tau-2)
//! L_mu r^tau (-ln r)  = (mu - tau(tau+N-2)) r^(tau-2) (-ln r) + (2 tau + N - 2) r^(tau-2)
//! ```
//!
//! so the span is closed under `L_mu` and the whole calculus stays symbolic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::admissible_mu;

/// Terms whose coefficient falls below this fraction of the largest
/// coefficient are dropped after merging.
const DROP_REL: f64 = 1e-14;
/// Operator symbols within this relative band of zero are exact zeros.
const SYMBOL_SNAP: f64 = 1e-13;
/// Exponents this close (relative) share a merge key.
const TAU_MERGE: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialTerm {
    pub coeff: f64,
    pub tau: f64,
    /// Power of the `(-ln r)` factor, 0 or 1.
    pub log_power: u8,
}

impl RadialTerm {
    pub fn new(coeff: f64, tau: f64, log_power: u8) -> Result<Self> {
        if log_power > 1 {
            return Err(Error::invalid(format!(
                "log power {log_power} outside {{0, 1}}"
            )));
        }
        if !coeff.is_finite() || !tau.is_finite() {
            return Err(Error::invalid("radial term must be finite"));
        }
        Ok(RadialTerm {
            coeff,
            tau,
            log_power,
        })
    }

    pub fn power(coeff: f64, tau: f64) -> Self {
        RadialTerm {
            coeff,
            tau,
            log_power: 0,
        }
    }

    pub fn log(coeff: f64, tau: f64) -> Self {
        RadialTerm {
            coeff,
            tau,
            log_power: 1,
        }
    }

    fn eval(&self, r: f64) -> f64 {
        let base = self.coeff * r.powf(self.tau);
        if self.log_power == 1 {
            base * (-r.ln())
        } else {
            base
        }
    }
}

/// A finite sum of [`RadialTerm`]s, kept sorted by `(tau, log_power)` with
/// one term per key. The empty sum is the zero function.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RadialFunction {
    terms: Vec<RadialTerm>,
}

fn same_tau(a: f64, b: f64) -> bool {
    (a - b).abs() <= TAU_MERGE * a.abs().max(b.abs()).max(1.0)
}

impl RadialFunction {
    pub fn zero() -> Self {
        RadialFunction { terms: Vec::new() }
    }

    /// Builds a normalized function: sorts, merges equal keys and drops
    /// coefficients that vanish relative to the largest one.
    pub fn from_terms(terms: impl IntoIterator<Item = RadialTerm>) -> Result<Self> {
        let mut raw: Vec<RadialTerm> = Vec::new();
        for t in terms {
            raw.push(RadialTerm::new(t.coeff, t.tau, t.log_power)?);
        }
        Ok(Self::normalize(raw))
    }

    /// `r^tau`
    pub fn monomial(tau: f64) -> Self {
        RadialFunction {
            terms: vec![RadialTerm::power(1.0, tau)],
        }
    }

    /// `r^tau (-ln r)`
    pub fn log_monomial(tau: f64) -> Self {
        RadialFunction {
            terms: vec![RadialTerm::log(1.0, tau)],
        }
    }

    /// `r^lead - r^correction`
    pub fn difference(lead: f64, correction: f64) -> Self {
        Self::normalize(vec![
            RadialTerm::power(1.0, lead),
            RadialTerm::power(-1.0, correction),
        ])
    }

    fn normalize(mut raw: Vec<RadialTerm>) -> Self {
        raw.retain(|t| t.coeff != 0.0);
        raw.sort_by(|a, b| a.tau.total_cmp(&b.tau).then(a.log_power.cmp(&b.log_power)));
        let mut merged: Vec<RadialTerm> = Vec::with_capacity(raw.len());
        for t in raw {
            // equal log power with a nearby tau merges into the previous
            // term carrying that log power
            if let Some(prev) = merged
                .iter_mut()
                .rev()
                .take_while(|m| same_tau(m.tau, t.tau))
                .find(|m| m.log_power == t.log_power)
            {
                prev.coeff += t.coeff;
            } else {
                merged.push(t);
            }
        }
        let max = merged.iter().map(|t| t.coeff.abs()).fold(0.0, f64::max);
        merged.retain(|t| t.coeff != 0.0 && t.coeff.abs() >= DROP_REL * max);
        RadialFunction { terms: merged }
    }

    pub fn terms(&self) -> &[RadialTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Radius(r));
        }
        Ok(self.terms.iter().map(|t| t.eval(r)).sum())
    }

    pub fn scale(&self, t: f64) -> Self {
        Self::normalize(
            self.terms
                .iter()
                .map(|term| RadialTerm {
                    coeff: term.coeff * t,
                    ..*term
                })
                .collect(),
        )
    }

    pub fn add(&self, other: &RadialFunction) -> Self {
        Self::normalize(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .copied()
                .collect(),
        )
    }

    /// `eval(f, r)^s`; a negative base with a non-integer power is an error.
    pub fn pow_eval(&self, s: f64, r: f64) -> Result<f64> {
        let base = self.eval(r)?;
        pow_checked(base, s)
    }
}

pub(crate) fn pow_checked(base: f64, s: f64) -> Result<f64> {
    if base < 0.0 && s.fract() != 0.0 {
        return Err(Error::NegativeBase { base, exponent: s });
    }
    Ok(base.powf(s))
}

/// `mu - tau (tau + N - 2)`, snapped to zero inside its round-off band.
pub fn hardy_symbol(n: u32, mu: f64, tau: f64) -> f64 {
    let n = n as f64;
    let quad = tau * (tau + n - 2.0);
    let value = mu - quad;
    let scale = mu.abs().max(quad.abs()).max(1.0);
    if value.abs() <= SYMBOL_SNAP * scale {
        0.0
    } else {
        value
    }
}

/// `2 tau + N - 2`, the coefficient produced by differentiating the log
/// factor; snapped to zero inside its round-off band.
fn log_symbol(n: u32, tau: f64) -> f64 {
    let n = n as f64;
    let value = 2.0 * tau + n - 2.0;
    let scale = (2.0 * tau).abs().max(n).max(1.0);
    if value.abs() <= SYMBOL_SNAP * scale {
        0.0
    } else {
        value
    }
}

/// Exact `L_mu f` on the closed power/log family.
pub fn apply_hardy(n: u32, mu: f64, f: &RadialFunction) -> Result<RadialFunction> {
    let mu = admissible_mu(n, mu)?;
    let mut out = Vec::with_capacity(2 * f.terms.len());
    for t in &f.terms {
        let sym = hardy_symbol(n, mu, t.tau);
        match t.log_power {
            0 => out.push(RadialTerm::power(t.coeff * sym, t.tau - 2.0)),
            1 => {
                out.push(RadialTerm::log(t.coeff * sym, t.tau - 2.0));
                out.push(RadialTerm::power(
                    t.coeff * log_symbol(n, t.tau),
                    t.tau - 2.0,
                ));
            }
            k => return Err(Error::invalid(format!("log power {k} outside {{0, 1}}"))),
        }
    }
    Ok(RadialFunction::normalize(out))
}

/// Finite-difference stencil used by [`hardy_fd_oracle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    /// 3-point central differences, O(h^2).
    Three,
    /// 5-point central differences, O(h^4).
    Five,
}

/// `L_mu f` at `r` from central differences of [`RadialFunction::eval`],
/// using the 5-point stencil.
pub fn hardy_fd_oracle(n: u32, mu: f64, f: &RadialFunction, r: f64, h: f64) -> Result<f64> {
    hardy_fd_with(n, mu, f, r, h, Stencil::Five)
}

pub fn hardy_fd_with(
    n: u32,
    mu: f64,
    f: &RadialFunction,
    r: f64,
    h: f64,
    stencil: Stencil,
) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Radius(r));
    }
    if !(h > 0.0 && h < r / 4.0) {
        return Err(Error::invalid(format!(
            "step h = {h} must satisfy 0 < h < r/4 at r = {r}"
        )));
    }
    let mu = admissible_mu(n, mu)?;
    let f0 = f.eval(r)?;
    let f1p = f.eval(r + h)?;
    let f1m = f.eval(r - h)?;
    let (d1, d2) = match stencil {
        Stencil::Three => ((f1p - f1m) / (2.0 * h), (f1p - 2.0 * f0 + f1m) / (h * h)),
        Stencil::Five => {
            let f2p = f.eval(r + 2.0 * h)?;
            let f2m = f.eval(r - 2.0 * h)?;
            (
                (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h),
                (-f2p + 16.0 * f1p - 30.0 * f0 + 16.0 * f1m - f2m) / (12.0 * h * h),
            )
        }
    };
    let nf = n as f64;
    Ok(-(d2 + (nf - 1.0) / r * d1) + mu / (r * r) * f0)
}

/// Scale of the individual contributions to `L_mu f` at `r`. Deviations
/// between the symbolic and finite-difference routes are measured against
/// `1 + magnitude`, since the operator output can be far smaller than its
/// cancelling parts (kernel terms).
pub fn operator_magnitude(n: u32, mu: f64, f: &RadialFunction, r: f64) -> f64 {
    let nf = n as f64;
    f.terms
        .iter()
        .map(|t| {
            let weight = mu.abs() + t.tau.abs() * (t.tau.abs() + nf) + 1.0;
            let log = if t.log_power == 1 {
                1.0 + r.ln().abs()
            } else {
                1.0
            };
            t.coeff.abs() * r.powf(t.tau - 2.0) * weight * log
        })
        .sum()
}

/// Logarithmically spaced radii on `[r_min, r_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub count: usize,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, count: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(Error::invalid(format!(
                "radial grid needs 0 < r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if count < 2 {
            return Err(Error::invalid("radial grid needs at least 2 points"));
        }
        Ok(RadialGrid {
            r_min,
            r_max,
            count,
        })
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            return self.r_max;
        }
        let step = (self.r_max / self.r_min).ln() / (self.count - 1) as f64;
        self.r_min * (step * i as f64).exp()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::tau_pair;

    #[test]
    fn eval_examples() {
        let one = RadialFunction::monomial(0.0);
        assert_eq!(one.eval(0.5).unwrap(), 1.0);
        let phi = RadialFunction::log_monomial(-1.5);
        let e = (-1.0f64).exp();
        assert!((phi.eval(e).unwrap() - 1.5f64.exp()).abs() < 1e-12);
        let f = RadialFunction::difference(-1.0, 0.0);
        assert!((f.eval(0.25).unwrap() - 3.0).abs() < 1e-15);
        assert_eq!(f.eval(0.0), Err(Error::Radius(0.0)));
        assert!(f.eval(-1.0).is_err());
    }

    #[test]
    fn eval_beyond_unit_radius_keeps_sign_of_log() {
        let f = RadialFunction::log_monomial(0.0);
        assert!(f.eval(2.0).unwrap() < 0.0);
    }

    #[test]
    fn normalization_merges_and_sorts() {
        let f = RadialFunction::from_terms([
            RadialTerm::power(1.0, 2.0),
            RadialTerm::log(3.0, -1.0),
            RadialTerm::power(2.0, -1.0),
            RadialTerm::power(-1.0, 2.0),
            RadialTerm::power(0.5, -1.0),
        ])
        .unwrap();
        let keys: Vec<_> = f
            .terms()
            .iter()
            .map(|t| (t.tau, t.log_power, t.coeff))
            .collect();
        assert_eq!(keys, vec![(-1.0, 0, 2.5), (-1.0, 1, 3.0)]);
        assert!(RadialFunction::from_terms([RadialTerm {
            coeff: 1.0,
            tau: 0.0,
            log_power: 2
        }])
        .is_err());
    }

    #[test]
    fn hardy_on_examples() {
        let kernel = apply_hardy(5, -2.0, &RadialFunction::monomial(-1.0)).unwrap();
        assert!(kernel.is_zero());

        let sq = apply_hardy(5, -2.0, &RadialFunction::monomial(2.0)).unwrap();
        assert_eq!(sq.terms(), &[RadialTerm::power(-12.0, 0.0)]);

        let lg = apply_hardy(5, -2.0, &RadialFunction::log_monomial(-1.0)).unwrap();
        assert_eq!(lg.terms(), &[RadialTerm::power(1.0, -3.0)]);
        let fd = hardy_fd_oracle(5, -2.0, &RadialFunction::log_monomial(-1.0), 0.4, 1e-4).unwrap();
        assert!((fd - 0.4f64.powi(-3)).abs() < 1e-5);
    }

    #[test]
    fn threshold_log_kernel() {
        for n in 3..=9 {
            let mu0 = crate::exponent::mu_zero(n).unwrap();
            let t = tau_pair(n, mu0).unwrap();
            let phi = RadialFunction::log_monomial(t.tau_minus);
            assert!(apply_hardy(n, mu0, &phi).unwrap().is_zero(), "N = {n}");
        }
    }

    #[test]
    fn fd_oracle_examples() {
        let inv = RadialFunction::monomial(-1.0);
        assert!(hardy_fd_oracle(5, -2.0, &inv, 0.3, 1e-4).unwrap().abs() < 1e-6);
        let sq = RadialFunction::monomial(2.0);
        assert!((hardy_fd_oracle(5, -2.0, &sq, 0.5, 1e-4).unwrap() + 12.0).abs() < 1e-5);
        assert!(hardy_fd_oracle(3, 0.0, &inv, 0.2, 1e-4).unwrap().abs() < 1e-5);
        // at h = 1e-5 the 5-point second difference sits on its round-off
        // floor, about 3 ulp(f) / h^2 ~ 1.4e-5 here
        assert!(hardy_fd_oracle(3, 0.0, &inv, 0.2, 1e-5).unwrap().abs() < 1e-4);
        assert!(hardy_fd_oracle(3, 0.0, &inv, 0.2, 0.06).is_err());
        assert!(hardy_fd_oracle(3, 0.0, &inv, 0.2, 0.0).is_err());
    }

    #[test]
    fn scale_and_pow() {
        let f = RadialFunction::difference(-1.0, 0.0);
        assert_eq!(
            f.scale(2.0).terms(),
            &[RadialTerm::power(2.0, -1.0), RadialTerm::power(-2.0, 0.0)]
        );
        assert!((RadialFunction::monomial(-1.0).pow_eval(3.0, 0.5).unwrap() - 8.0).abs() < 1e-12);
        assert!(matches!(
            f.pow_eval(2.5, 2.0),
            Err(Error::NegativeBase { .. })
        ));
        assert!(f.scale(0.0).is_zero());
    }

    #[test]
    fn grid_is_increasing_and_hits_endpoints() {
        let g = RadialGrid::new(1e-6, 0.999, 512).unwrap();
        let pts: Vec<f64> = g.points().collect();
        assert_eq!(pts[0], 1e-6);
        assert_eq!(*pts.last().unwrap(), 0.999);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert!(RadialGrid::new(0.0, 1.0, 10).is_err());
        assert!(RadialGrid::new(0.1, 1.0, 1).is_err());
    }
}
