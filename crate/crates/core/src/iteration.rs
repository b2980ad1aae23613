//! Singularity-exponent bootstrap.
//!
//! Starting from the lower bounds `u >= c r^{tau_+(mu1)}`, `v >= c r^{tau_+(mu2)}`,
//! each half step feeds one bound through the other equation:
//!
//! ```text
//! tau2^(j) = tau1^(j-1) q + 2
//! tau1^(j) = tau2^(j)   p + 2
//! ```
//!
//! A value at or below `tau_-` of its equation is a contradiction (the
//! source term is not in the weighted `L^1` space), which certifies
//! nonexistence. Whether the parameters satisfy the hypotheses under which
//! the crossing is guaranteed is the classifier's business, not ours.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{ExponentPairPQ, HardyParams};

pub const DEFAULT_CAP: usize = 10_000;
/// Absolute tolerance for declaring `tau1^(j) = tau1^(j-1)`.
pub const STALL_TOL: f64 = 1e-13;
const CLAIM1_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Plain,
    Clamped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    CrossedTau1,
    CrossedTau2,
    Stalled,
    CapReached,
}

/// Why the iteration stopped. For the crossing kinds `value <= threshold`,
/// with `threshold` the `tau_-` of the crossed equation. For `Stalled` the
/// threshold is the previous `tau1`; for `CapReached` it is `tau_-(mu1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub step: usize,
    pub value: f64,
    pub threshold: f64,
}

impl Certificate {
    pub fn is_crossing(&self) -> bool {
        matches!(
            self.kind,
            CertificateKind::CrossedTau1 | CertificateKind::CrossedTau2
        )
    }
}

/// One recorded step. `tau1` is absent only when the cycle stopped after
/// its `tau2` half.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationStep {
    pub j: usize,
    pub tau1: Option<f64>,
    pub tau2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub variant: Variant,
    pub steps: Vec<IterationStep>,
    pub outcome: Certificate,
}

impl IterationTrace {
    /// `s_j = tau1^(j) - tau1^(j-1)` for every `j >= 1` with both values.
    pub fn tau1_increments(&self) -> Vec<(usize, f64)> {
        self.steps
            .windows(2)
            .filter_map(|w| Some((w[1].j, w[1].tau1? - w[0].tau1?)))
            .collect()
    }
}

pub fn iterate_plain(
    params: &HardyParams,
    pq: &ExponentPairPQ,
    cap: usize,
) -> Result<IterationTrace> {
    iterate(params, pq, cap, Variant::Plain)
}

/// Like [`iterate_plain`] but the first cycle clamps each new exponent by its
/// seed: `tau2^(1) = min(tau1^(0) q + 2, tau2^(0))`,
/// `tau1^(1) = min(tau2^(1) p + 2, tau1^(0))`.
pub fn iterate_clamped(
    params: &HardyParams,
    pq: &ExponentPairPQ,
    cap: usize,
) -> Result<IterationTrace> {
    iterate(params, pq, cap, Variant::Clamped)
}

pub fn iterate(
    params: &HardyParams,
    pq: &ExponentPairPQ,
    cap: usize,
    variant: Variant,
) -> Result<IterationTrace> {
    if cap == 0 {
        return Err(Error::invalid("iteration cap must be at least 1"));
    }
    let (p, q) = (pq.p, pq.q);
    let lower1 = params.tau1.tau_minus;
    let lower2 = params.tau2.tau_minus;
    let seed1 = params.tau1.tau_plus;
    let seed2 = params.tau2.tau_plus;

    let mut steps = vec![IterationStep {
        j: 0,
        tau1: Some(seed1),
        tau2: seed2,
    }];
    let mut prev1 = seed1;
    for j in 1..=cap {
        let clamp = variant == Variant::Clamped && j == 1;
        let mut tau2 = prev1 * q + 2.0;
        if clamp {
            tau2 = tau2.min(seed2);
        }
        if tau2 <= lower2 {
            steps.push(IterationStep {
                j,
                tau1: None,
                tau2,
            });
            return Ok(finish(
                variant,
                steps,
                CertificateKind::CrossedTau2,
                j,
                tau2,
                lower2,
            ));
        }
        let mut tau1 = tau2 * p + 2.0;
        if clamp {
            tau1 = tau1.min(seed1);
        }
        steps.push(IterationStep {
            j,
            tau1: Some(tau1),
            tau2,
        });
        if tau1 <= lower1 {
            return Ok(finish(
                variant,
                steps,
                CertificateKind::CrossedTau1,
                j,
                tau1,
                lower1,
            ));
        }
        if (tau1 - prev1).abs() <= STALL_TOL {
            return Ok(finish(
                variant,
                steps,
                CertificateKind::Stalled,
                j,
                tau1,
                prev1,
            ));
        }
        if j == cap {
            return Ok(finish(
                variant,
                steps,
                CertificateKind::CapReached,
                j,
                tau1,
                lower1,
            ));
        }
        prev1 = tau1;
    }
    unreachable!("loop returns by the cap at the latest")
}

fn finish(
    variant: Variant,
    steps: Vec<IterationStep>,
    kind: CertificateKind,
    step: usize,
    value: f64,
    threshold: f64,
) -> IterationTrace {
    IterationTrace {
        variant,
        steps,
        outcome: Certificate {
            kind,
            step,
            value,
            threshold,
        },
    }
}

/// Checks the geometric law `s_{j+1} = pq s_j` on the unclamped part of the
/// trace, and the same law for the `tau2` increments from `j = 2` on.
/// Growing traces overflow eventually; increments past the first non-finite
/// one are ignored.
pub fn claim1_check(trace: &IterationTrace, pq: &ExponentPairPQ) -> Result<bool> {
    // increments are usable once no clamp contributes to either endpoint
    let first_free = match trace.variant {
        Variant::Plain => 1,
        Variant::Clamped => 2,
    };
    let s: Vec<f64> = trace
        .tau1_increments()
        .into_iter()
        .filter(|(j, _)| *j >= first_free)
        .map(|(_, d)| d)
        .take_while(|d| d.is_finite())
        .collect();
    if s.len() < 2 {
        return Err(Error::invalid(format!(
            "claim check needs 3 usable steps, trace has {}",
            s.len() + 1
        )));
    }
    let rate = pq.p * pq.q;
    let law = |w: &[f64]| (w[1] - rate * w[0]).abs() <= CLAIM1_TOL * w[0].abs().max(1.0);
    if !s.windows(2).all(law) {
        return Ok(false);
    }
    let t: Vec<f64> = trace
        .steps
        .windows(2)
        .filter(|w| w[1].j >= 2)
        .map(|w| w[1].tau2 - w[0].tau2)
        .take_while(|d| d.is_finite())
        .collect();
    Ok(t.windows(2).all(law))
}

/// Affine fixed point `(2p + 2) / (1 - pq)` of `tau -> pq tau + 2p + 2`.
pub fn affine_fixed_point(pq: &ExponentPairPQ) -> f64 {
    (2.0 * pq.p + 2.0) / (1.0 - pq.p * pq.q)
}

/// Upper bound on the step at which the plain iteration crosses `tau_-(mu1)`
/// when `pq >= 1` and the first increment is negative. `None` when no
/// crossing is implied.
pub fn crossing_step_bound(params: &HardyParams, pq: &ExponentPairPQ) -> Option<usize> {
    let rate = pq.p * pq.q;
    let seed = params.tau1.tau_plus;
    let lower = params.tau1.tau_minus;
    let first = seed * (rate - 1.0) + 2.0 * pq.p + 2.0;
    if !(first < 0.0) || rate < 1.0 {
        return None;
    }
    let steps = if rate - 1.0 <= 1e-12 {
        ((lower - seed) / first).ceil()
    } else {
        // tau1^(j) - fix = rate^j (seed - fix), both gaps negative
        let fix = affine_fixed_point(pq);
        ((lower - fix) / (seed - fix)).ln() / rate.ln()
    };
    Some(steps.ceil().max(0.0) as usize + 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u32, mu1: f64, mu2: f64) -> HardyParams {
        HardyParams::new(n, mu1, mu2).unwrap()
    }

    fn pq(p: f64, q: f64) -> ExponentPairPQ {
        ExponentPairPQ::new(p, q).unwrap()
    }

    #[test]
    fn plain_crosses_tau1_at_first_step() {
        let t = iterate_plain(&params(5, -2.0, 0.0), &pq(2.0, 4.0), 100).unwrap();
        assert_eq!(
            t.outcome,
            Certificate {
                kind: CertificateKind::CrossedTau1,
                step: 1,
                value: -2.0,
                threshold: -2.0
            }
        );
        assert_eq!(t.steps[1].tau2, -2.0);
    }

    #[test]
    fn plain_stalls_on_critical_curve() {
        let t = iterate_plain(&params(5, -2.0, 0.0), &pq(3.0, 3.0), 100).unwrap();
        assert_eq!(t.outcome.kind, CertificateKind::Stalled);
        assert_eq!(t.outcome.step, 1);
    }

    #[test]
    fn contracting_map_never_crosses() {
        let t = iterate_plain(&params(5, -2.0, 0.0), &pq(0.5, 1.0), 100).unwrap();
        assert!(matches!(
            t.outcome.kind,
            CertificateKind::Stalled | CertificateKind::CapReached
        ));
        let tau1: Vec<f64> = t.steps.iter().filter_map(|s| s.tau1).collect();
        assert!(tau1.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn clamped_crosses_tau2_at_second_step() {
        let t = iterate_clamped(&params(5, -2.0, -2.0), &pq(2.5, 3.5), 100).unwrap();
        assert_eq!(t.steps[1].tau2, -1.5);
        assert_eq!(t.steps[1].tau1, Some(-1.75));
        assert_eq!(t.outcome.kind, CertificateKind::CrossedTau2);
        assert_eq!(t.outcome.step, 2);
        assert!((t.outcome.value + 4.125).abs() < 1e-12);
        assert_eq!(t.outcome.threshold, -2.0);
    }

    #[test]
    fn clamped_stalls_on_boundary() {
        // N=5, mu1=mu2=-2: E1 = 0 at p = 3/(2-q); q = 3.5 gives p = -2, so
        // take q = 3.2 -> p = 3/(q-2) = 2.5 with q above the clamp line q = 3
        let q = 3.2;
        let p = 3.0 / (q - 2.0);
        let t = iterate_clamped(&params(5, -2.0, -2.0), &pq(p, q), 100).unwrap();
        assert_eq!(t.outcome.kind, CertificateKind::Stalled);
    }

    #[test]
    fn clamp_activates_below_corner_line() {
        // q < (2 - tau_+(mu2)) / (-tau_+(mu1)) = 3 keeps tau2^(1) at its seed
        let t = iterate_clamped(&params(5, -2.0, -2.0), &pq(1.5, 2.0), 100).unwrap();
        assert_eq!(t.steps[1].tau2, -1.0);
        assert_eq!(t.steps[1].tau1, Some(-1.0));
    }

    #[test]
    fn cap_of_one() {
        let t = iterate_plain(&params(5, -2.0, 0.0), &pq(1.6, 4.0), 1).unwrap();
        assert_eq!(t.outcome.kind, CertificateKind::CapReached);
        assert_eq!(t.outcome.step, 1);
        assert!(iterate_plain(&params(5, -2.0, 0.0), &pq(2.0, 3.0), 0).is_err());
    }

    #[test]
    fn claim1_on_traces() {
        let pq0 = pq(1.5005, 4.0);
        let t = iterate_plain(&params(5, -2.0, 0.0), &pq0, 1000).unwrap();
        assert!(t.outcome.is_crossing());
        assert!(claim1_check(&t, &pq0).unwrap());

        let mut bad = t.clone();
        let k = bad.steps.len() / 2;
        bad.steps[k].tau1 = bad.steps[k].tau1.map(|v| v + 1e-3);
        assert!(!claim1_check(&bad, &pq0).unwrap());

        let short = iterate_plain(&params(5, -2.0, 0.0), &pq(2.0, 4.0), 100).unwrap();
        assert!(claim1_check(&short, &pq(2.0, 4.0)).is_err());
    }

    #[test]
    fn claim1_on_flat_trace() {
        let flat = IterationTrace {
            variant: Variant::Plain,
            steps: (0..4)
                .map(|j| IterationStep {
                    j,
                    tau1: Some(-1.0),
                    tau2: -1.0,
                })
                .collect(),
            outcome: Certificate {
                kind: CertificateKind::Stalled,
                step: 3,
                value: -1.0,
                threshold: -1.0,
            },
        };
        assert!(claim1_check(&flat, &pq(3.0, 3.0)).unwrap());
    }

    #[test]
    fn bound_covers_observed_crossing() {
        let pq0 = pq(1.5005, 4.0);
        let p = params(5, -2.0, 0.0);
        let t = iterate_plain(&p, &pq0, 1000).unwrap();
        assert!(t.outcome.step <= crossing_step_bound(&p, &pq0).unwrap());
        assert_eq!(crossing_step_bound(&p, &pq(0.5, 1.0)), None);
    }
}
