//! Explicit radial supersolutions `t (u, v)` and their grid verification.
//!
//! With `a = tau_+(mu1)`, `b = tau_+(mu2)` the recipes are
//!
//! ```text
//! C1, C4  u = r^a - r^{(aq+2)p+2}      v = r^{aq+2}
//! C2, C5  u = r^a - r^{bp+2}           v = r^b - r^{aq+2}
//! C3      u = r^a - r^{bp+1}           v = r^b (-ln r)
//! C6      u = r^a - r^{bp+2-e}         v = r^b (-ln r)
//! C7      u = r^a (-ln r)              v = r^b - r^{aq+2-e}
//! C8      u = r^{bp+2}                 v = r^b - r^{(bp+2)q+2}
//! ```
//!
//! The leading power is a kernel element of its operator, so the slack
//! comes from the correction term alone. In C6 and C7 the correction sits
//! `e` below the naive exponent: the log factor of the other function has
//! to be dominated as `r -> 0`.
//!
//! For the mirrored one-sided regime (`mu2 < 0 <= mu1`) C1 to C3 are built
//! on the exchanged system and `u`, `v` swapped back.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classify::classify;
use crate::error::{Error, Result};
use crate::exponent::{ExponentPairPQ, HardyParams};
use crate::radial::{
    apply_hardy, hardy_fd_oracle, operator_magnitude, pow_checked, RadialFunction, RadialGrid,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
}

impl CaseId {
    pub const ALL: [CaseId; 8] = [
        CaseId::C1,
        CaseId::C2,
        CaseId::C3,
        CaseId::C4,
        CaseId::C5,
        CaseId::C6,
        CaseId::C7,
        CaseId::C8,
    ];

    pub fn uses_log(&self) -> bool {
        matches!(self, CaseId::C3 | CaseId::C6 | CaseId::C7)
    }

    fn one_sided(&self) -> bool {
        matches!(self, CaseId::C1 | CaseId::C2 | CaseId::C3)
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for CaseId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CaseId::ALL
            .into_iter()
            .find(|c| c.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown case {s:?}, expected C1..C8")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupersolutionCandidate {
    pub case_id: CaseId,
    pub u: RadialFunction,
    pub v: RadialFunction,
    /// Scaling, unset until [`find_scale`] succeeds.
    pub t: Option<f64>,
    /// The pair is checked on `(0, r_domain]`.
    pub r_domain: f64,
    /// Offset `e` of the C6/C7 correction exponent.
    pub eps0: Option<f64>,
    pub swapped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Both minimum slacks are nonnegative.
    pub ok: bool,
    /// Minimum over the grid of `L_mu1(t u) - (t v)^p`; `-inf` when
    /// positivity or finiteness fails.
    pub min_slack_u: f64,
    pub min_slack_v: f64,
    pub grid: RadialGrid,
    /// Largest symbolic/finite-difference deviation relative to
    /// `1 + |operator parts|`.
    pub oracle_max_dev: f64,
    /// `oracle_max_dev` exceeded [`ORACLE_TOL`].
    pub oracle_flagged: bool,
    pub diagnostic: Option<String>,
}

pub const ORACLE_TOL: f64 = 1e-4;
/// Finite-difference step on the unit domain; scaled with the radius.
pub const ORACLE_STEP: f64 = 1e-4;
pub const ORACLE_SAMPLES: usize = 16;
pub const GRID_POINTS: usize = 512;
pub const GRID_R_MIN: f64 = 1e-6;
/// Scales tried by [`find_scale`] are `2^0, 2^-1, ..., 2^-SCALE_STEPS`.
pub const SCALE_STEPS: i32 = 60;

/// Default verification grid: log-spaced on `[1e-6, r_dom (1 - 1e-3)]`.
pub fn default_grid(r_dom: f64, points: usize, r_min: f64) -> Result<RadialGrid> {
    RadialGrid::new(r_min, r_dom * (1.0 - 1e-3), points)
}

/// Builds the pair of `case` after checking that the classifier assigns
/// this case to the point.
pub fn build_candidate(
    case: CaseId,
    params: &HardyParams,
    pq: &ExponentPairPQ,
) -> Result<SupersolutionCandidate> {
    let class = classify(params, pq);
    if class.case != Some(case) {
        return Err(Error::Hypothesis(format!(
            "{case} does not apply: point classified {} / {}",
            class.verdict, class.citation
        )));
    }
    let cand = recipe(case, params, pq)?;
    if matches!(case, CaseId::C1 | CaseId::C4) {
        // the v exponent must sit strictly between the roots of mu2
        let (fp, fpq) = frame(case, params, pq);
        let tau2 = fp.tau1.tau_plus * fpq.q + 2.0;
        if !(fp.tau2.tau_minus < tau2 && tau2 < fp.tau2.tau_plus) {
            return Err(Error::Hypothesis(format!(
                "{case}: exponent {tau2} outside ({}, {})",
                fp.tau2.tau_minus, fp.tau2.tau_plus
            )));
        }
    }
    Ok(cand)
}

fn frame(case: CaseId, params: &HardyParams, pq: &ExponentPairPQ) -> (HardyParams, ExponentPairPQ) {
    if case.one_sided() && params.mu2 < 0.0 && params.mu1 >= 0.0 {
        (params.swapped(), pq.swapped())
    } else {
        (*params, *pq)
    }
}

/// The pair of `case` at any point, without the hypothesis check. Used to
/// show that the recipe breaks outside its region.
pub fn recipe(
    case: CaseId,
    params: &HardyParams,
    pq: &ExponentPairPQ,
) -> Result<SupersolutionCandidate> {
    let (fp, fpq) = frame(case, params, pq);
    let swapped = fp != *params;
    let a = fp.tau1.tau_plus;
    let b = fp.tau2.tau_plus;
    let (p, q) = (fpq.p, fpq.q);
    let mut eps0 = None;
    let (u, v) = match case {
        CaseId::C1 | CaseId::C4 => {
            let tau2 = a * q + 2.0;
            (
                RadialFunction::difference(a, tau2 * p + 2.0),
                RadialFunction::monomial(tau2),
            )
        }
        CaseId::C2 | CaseId::C5 => (
            RadialFunction::difference(a, b * p + 2.0),
            RadialFunction::difference(b, a * q + 2.0),
        ),
        CaseId::C3 => (
            RadialFunction::difference(a, b * p + 1.0),
            RadialFunction::log_monomial(b),
        ),
        CaseId::C6 => {
            let e = (0.5 * (b * p + 2.0 - a)).min(1.0);
            eps0 = Some(e);
            (
                RadialFunction::difference(a, b * p + 2.0 - e),
                RadialFunction::log_monomial(b),
            )
        }
        CaseId::C7 => {
            let e = (0.5 * (a * q + 2.0 - b)).min(1.0);
            eps0 = Some(e);
            (
                RadialFunction::log_monomial(a),
                RadialFunction::difference(b, a * q + 2.0 - e),
            )
        }
        CaseId::C8 => {
            let tau10 = b * p + 2.0;
            (
                RadialFunction::monomial(tau10),
                RadialFunction::difference(b, tau10 * q + 2.0),
            )
        }
    };
    let (u, v) = if swapped { (v, u) } else { (u, v) };
    Ok(SupersolutionCandidate {
        case_id: case,
        u,
        v,
        t: None,
        r_domain: 1.0,
        eps0,
        swapped,
    })
}

/// Checks both inequalities of `t (u, v)` on `grid` and cross-checks the
/// symbolic operator against finite differences.
pub fn verify_on_grid(
    cand: &SupersolutionCandidate,
    params: &HardyParams,
    pq: &ExponentPairPQ,
    grid: &RadialGrid,
) -> Result<VerificationReport> {
    let t = cand
        .t
        .ok_or_else(|| Error::invalid("candidate has no scale t"))?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("scale t = {t} must be positive")));
    }
    if grid.r_max > cand.r_domain {
        return Err(Error::invalid(format!(
            "grid reaches r = {} beyond the domain radius {}",
            grid.r_max, cand.r_domain
        )));
    }
    let n = params.n;
    let lu = apply_hardy(n, params.mu1, &cand.u.scale(t))?;
    let lv = apply_hardy(n, params.mu2, &cand.v.scale(t))?;

    let mut min_u = f64::INFINITY;
    let mut min_v = f64::INFINITY;
    let mut diagnostic = None;
    for r in grid.points() {
        let (u, v) = (cand.u.eval(r)?, cand.v.eval(r)?);
        if !(u > 0.0 && v > 0.0) {
            diagnostic = Some(format!(
                "positivity fails at r = {r:e}: u = {u:e}, v = {v:e}"
            ));
            if !(u > 0.0) {
                min_u = f64::NEG_INFINITY;
            }
            if !(v > 0.0) {
                min_v = f64::NEG_INFINITY;
            }
            break;
        }
        let su = lu.eval(r)? - pow_checked(t * v, pq.p)?;
        let sv = lv.eval(r)? - pow_checked(t * u, pq.q)?;
        min_u = min_u.min(if su.is_nan() { f64::NEG_INFINITY } else { su });
        min_v = min_v.min(if sv.is_nan() { f64::NEG_INFINITY } else { sv });
    }
    if diagnostic.is_none() && (min_u < 0.0 || min_v < 0.0) {
        diagnostic = Some(format!("negative slack (u: {min_u:e}, v: {min_v:e})"));
    }

    let oracle_max_dev = oracle_deviation(cand, params)?;
    let oracle_flagged = !(oracle_max_dev <= ORACLE_TOL);
    Ok(VerificationReport {
        ok: min_u >= 0.0 && min_v >= 0.0,
        min_slack_u: min_u,
        min_slack_v: min_v,
        grid: *grid,
        oracle_max_dev,
        oracle_flagged,
        diagnostic,
    })
}

fn oracle_deviation(cand: &SupersolutionCandidate, params: &HardyParams) -> Result<f64> {
    let n = params.n;
    let samples = RadialGrid::new(0.05 * cand.r_domain, 0.8 * cand.r_domain, ORACLE_SAMPLES)?;
    let mut worst: f64 = 0.0;
    for (mu, f) in [(params.mu1, &cand.u), (params.mu2, &cand.v)] {
        let sym = apply_hardy(n, mu, f)?;
        for r in samples.points() {
            let fd = hardy_fd_oracle(n, mu, f, r, ORACLE_STEP * cand.r_domain)?;
            let dev = (sym.eval(r)? - fd).abs() / (1.0 + operator_magnitude(n, mu, f, r));
            worst = worst.max(if dev.is_nan() { f64::INFINITY } else { dev });
        }
    }
    Ok(worst)
}

/// Largest `t` in `{2^0, 2^-1, ..., 2^-60}` accepted by [`verify_on_grid`].
pub fn find_scale(
    cand: &SupersolutionCandidate,
    params: &HardyParams,
    pq: &ExponentPairPQ,
    grid: &RadialGrid,
) -> Result<f64> {
    let mut trial = cand.clone();
    let mut last = None;
    for k in 0..=SCALE_STEPS {
        let t = 2f64.powi(-k);
        trial.t = Some(t);
        let report = verify_on_grid(&trial, params, pq, grid)?;
        if report.ok {
            return Ok(t);
        }
        if report.min_slack_u == f64::NEG_INFINITY && report.min_slack_v == f64::NEG_INFINITY {
            last = report.diagnostic;
            break;
        }
        last = report.diagnostic;
    }
    Err(Error::Hypothesis(format!(
        "{}: no scale in [2^-{SCALE_STEPS}, 1] verifies ({})",
        cand.case_id,
        last.unwrap_or_default()
    )))
}

/// Largest radius `r1` for which some scale verifies on a 512-point log grid
/// over `[r1 1e-6, r1]`. Cases without a log factor hold on the unit ball
/// and return 1.
pub fn find_domain(
    cand: &SupersolutionCandidate,
    params: &HardyParams,
    pq: &ExponentPairPQ,
) -> Result<f64> {
    if !cand.case_id.uses_log() {
        return Ok(1.0);
    }
    let holds = |r1: f64| -> Result<bool> {
        let grid = RadialGrid::new(r1 * 1e-6, r1, GRID_POINTS)?;
        let mut trial = cand.clone();
        trial.r_domain = r1;
        Ok(find_scale(&trial, params, pq, &grid).is_ok())
    };
    let mut lo = 1e-8;
    if !holds(lo)? {
        return Err(Error::Hypothesis(format!(
            "{}: inequalities fail already below r = {lo:e}",
            cand.case_id
        )));
    }
    let mut hi = 1.0;
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if holds(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Full pipeline: build, find the domain, find the scale, verify on the
/// default grid.
pub fn construct(
    case: CaseId,
    params: &HardyParams,
    pq: &ExponentPairPQ,
    points: usize,
    r_min: f64,
) -> Result<(SupersolutionCandidate, VerificationReport)> {
    let mut cand = build_candidate(case, params, pq)?;
    cand.r_domain = find_domain(&cand, params, pq)?;
    let grid = default_grid(cand.r_domain, points, r_min)?;
    cand.t = Some(find_scale(&cand, params, pq, &grid)?);
    let report = verify_on_grid(&cand, params, pq, &grid)?;
    Ok((cand, report))
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

    fn exps(f: &RadialFunction) -> Vec<(f64, f64, u8)> {
        f.terms()
            .iter()
            .map(|t| (t.coeff, t.tau, t.log_power))
            .collect()
    }

    #[test]
    fn recipe_examples() {
        let c = build_candidate(CaseId::C1, &params(5, -2.0, 0.0), &pq(2.0, 3.0)).unwrap();
        assert_eq!(exps(&c.u), vec![(1.0, -1.0, 0), (-1.0, 0.0, 0)]);
        assert_eq!(exps(&c.v), vec![(1.0, -1.0, 0)]);

        let c = build_candidate(CaseId::C2, &params(5, -2.0, 0.0), &pq(2.0, 1.5)).unwrap();
        assert_eq!(exps(&c.u), vec![(1.0, -1.0, 0), (-1.0, 2.0, 0)]);
        assert_eq!(exps(&c.v), vec![(1.0, 0.0, 0), (-1.0, 0.5, 0)]);

        // a = b = -1, pB = 3
        let c = build_candidate(CaseId::C7, &params(5, -2.0, -2.0), &pq(3.0, 2.0)).unwrap();
        assert_eq!(exps(&c.u), vec![(1.0, -1.0, 1)]);
        let e = c.eps0.unwrap();
        assert_eq!(e, 0.5);
        assert_eq!(exps(&c.v), vec![(1.0, -1.0, 0), (-1.0, -2.0 + 2.0 - e, 0)]);
    }

    #[test]
    fn rejects_wrong_case() {
        let err = build_candidate(CaseId::C2, &params(5, -2.0, 0.0), &pq(2.0, 3.0)).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)));
        assert!(build_candidate(CaseId::C1, &params(5, -2.0, 0.0), &pq(2.0, 4.0)).is_err());
    }

    #[test]
    fn hand_checked_c1() {
        let (pr, x) = (params(5, -2.0, 0.0), pq(2.0, 3.0));
        let mut c = build_candidate(CaseId::C1, &pr, &x).unwrap();
        let grid = default_grid(1.0, GRID_POINTS, GRID_R_MIN).unwrap();
        let t = find_scale(&c, &pr, &x, &grid).unwrap();
        assert_eq!(t, 1.0);
        c.t = Some(t);
        let rep = verify_on_grid(&c, &pr, &x, &grid).unwrap();
        assert!(rep.ok && rep.min_slack_u >= 0.0 && !rep.oracle_flagged);
        c.t = Some(10.0);
        let rep = verify_on_grid(&c, &pr, &x, &grid).unwrap();
        assert!(!rep.ok && rep.min_slack_u < 0.0);
        // u slack is (2t - t^2) r^-2
        c.t = Some(2.0);
        assert!(
            verify_on_grid(&c, &pr, &x, &grid)
                .unwrap()
                .min_slack_u
                .abs()
                < 1e-3
        );
    }

    #[test]
    fn zero_candidate_fails() {
        let (pr, x) = (params(5, -2.0, 0.0), pq(2.0, 3.0));
        let mut c = build_candidate(CaseId::C1, &pr, &x).unwrap();
        c.u = RadialFunction::zero();
        let grid = default_grid(1.0, 64, GRID_R_MIN).unwrap();
        assert!(find_scale(&c, &pr, &x, &grid).is_err());
    }

    #[test]
    fn nonexistence_side_fails() {
        let (pr, x) = (params(5, -2.0, 0.0), pq(2.0, 4.0));
        let c = recipe(CaseId::C1, &pr, &x).unwrap();
        let grid = default_grid(1.0, GRID_POINTS, GRID_R_MIN).unwrap();
        assert!(find_scale(&c, &pr, &x, &grid).is_err());
    }

    #[test]
    fn log_case_domain() {
        let (pr, x) = (params(5, -2.0, 0.0), pq(1.2, 2.0));
        let c = build_candidate(CaseId::C3, &pr, &x).unwrap();
        let r1 = find_domain(&c, &pr, &x).unwrap();
        assert!(r1 > 0.0 && r1 < 1.0);
        let c1 = build_candidate(CaseId::C1, &pr, &pq(2.0, 3.0)).unwrap();
        assert_eq!(find_domain(&c1, &pr, &pq(2.0, 3.0)).unwrap(), 1.0);
    }

    #[test]
    fn every_case_constructs_somewhere() {
        let a_side = params(5, -2.0, 0.0);
        let b_side = params(5, -2.0, -2.0);
        let points = [
            (CaseId::C1, a_side, pq(2.0, 3.0)),
            (CaseId::C2, a_side, pq(2.0, 1.5)),
            (CaseId::C3, a_side, pq(1.2, 2.0)),
            (CaseId::C4, b_side, pq(1.5, 3.5)),
            (CaseId::C5, b_side, pq(2.0, 2.0)),
            (CaseId::C6, b_side, pq(2.0, 3.0)),
            (CaseId::C7, b_side, pq(3.0, 2.0)),
            (CaseId::C8, b_side, pq(3.5, 1.5)),
        ];
        for (case, pr, x) in points {
            let (cand, rep) = construct(case, &pr, &x, GRID_POINTS, GRID_R_MIN)
                .unwrap_or_else(|e| panic!("{case}: {e}"));
            assert!(rep.ok, "{case}: {rep:?}");
            assert!(!rep.oracle_flagged, "{case}: {}", rep.oracle_max_dev);
            assert!(cand.t.unwrap() > 0.0);
        }
    }

    #[test]
    fn mirrored_case_swaps_pair() {
        let direct = build_candidate(CaseId::C1, &params(5, -2.0, 0.0), &pq(2.0, 3.0)).unwrap();
        let mirror = build_candidate(CaseId::C1, &params(5, 0.0, -2.0), &pq(3.0, 2.0)).unwrap();
        assert!(mirror.swapped);
        assert_eq!((mirror.u, mirror.v), (direct.v, direct.u));
    }

    #[test]
    fn case_ids_parse() {
        assert_eq!("c7".parse::<CaseId>().unwrap(), CaseId::C7);
        assert!("C9".parse::<CaseId>().is_err());
    }
}
