//! Region classification of `(N, mu1, mu2, p, q)`.
//!
//! Three regimes by the signs of the Hardy coefficients:
//!
//! * A: one coefficient in `[mu0, 0)`, the other nonnegative. Stored with
//!   `mu1 < 0 <= mu2`; the mirrored case is swapped first.
//! * B: both in `[mu0, 0)`.
//! * C: both nonnegative, out of scope.
//!
//! Every comparison goes through [`sign_tol`], written as a linear expression
//! in `p` or `q` (`a q + b + N` for `q` against its integrability threshold
//! and so on, with `a = tau_+(mu1)`, `b = tau_+(mu2)`), so no division by a
//! small `tau_+` enters a decision.

use std::cmp::Ordering::{self, Equal, Greater, Less};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::CaseId;
use crate::error::{Error, Result};
use crate::exponent::{boundary_expressions, sign_tol, ExponentPairPQ, HardyParams};
use crate::integrability::{gamma_gap, is_gamma_integrable, IntegrabilityVerdict};
use crate::iteration::{iterate_clamped, iterate_plain, IterationTrace, DEFAULT_CAP};
use crate::radial::RadialFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Nonexistence,
    ExistsSupersolution,
    OpenCritical,
    OutOfScope,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Nonexistence => "Nonexistence",
            Verdict::ExistsSupersolution => "ExistsSupersolution",
            Verdict::OpenCritical => "OpenCritical",
            Verdict::OutOfScope => "OutOfScope",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Verdict {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [
            Verdict::Nonexistence,
            Verdict::ExistsSupersolution,
            Verdict::OpenCritical,
            Verdict::OutOfScope,
        ]
        .into_iter()
        .find(|v| v.as_str() == s)
        .ok_or_else(|| Error::invalid(format!("unknown verdict {s:?}")))
    }
}

/// Theorem clause behind a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Citation {
    T1i,
    T1ii,
    T2i,
    T2ii,
    T2iii,
    T3iCase1,
    T3iCase2,
    T3iCase3,
    T3iiA1,
    T3iiA2,
    T3iiB1,
    T3iiB2,
    CriticalAQ,
    CriticalAB,
    CriticalBC,
    DottedBoundary,
    NoClause,
}

impl Citation {
    pub const ALL: [Citation; 17] = [
        Citation::T1i,
        Citation::T1ii,
        Citation::T2i,
        Citation::T2ii,
        Citation::T2iii,
        Citation::T3iCase1,
        Citation::T3iCase2,
        Citation::T3iCase3,
        Citation::T3iiA1,
        Citation::T3iiA2,
        Citation::T3iiB1,
        Citation::T3iiB2,
        Citation::CriticalAQ,
        Citation::CriticalAB,
        Citation::CriticalBC,
        Citation::DottedBoundary,
        Citation::NoClause,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Citation::T1i => "T1.i",
            Citation::T1ii => "T1.ii",
            Citation::T2i => "T2.i",
            Citation::T2ii => "T2.ii",
            Citation::T2iii => "T2.iii",
            Citation::T3iCase1 => "T3.i.case1",
            Citation::T3iCase2 => "T3.i.case2",
            Citation::T3iCase3 => "T3.i.case3",
            Citation::T3iiA1 => "T3.ii.a1",
            Citation::T3iiA2 => "T3.ii.a2",
            Citation::T3iiB1 => "T3.ii.b1",
            Citation::T3iiB2 => "T3.ii.b2",
            Citation::CriticalAQ => "CriticalCurve.AQ",
            Citation::CriticalAB => "CriticalCurve.AB",
            Citation::CriticalBC => "CriticalCurve.BC",
            Citation::DottedBoundary => "CriticalCurve.DottedBoundary",
            Citation::NoClause => "none",
        }
    }

    /// The verdict kind this citation may carry.
    pub fn verdict(&self) -> Verdict {
        use Citation::*;
        match self {
            T1i | T1ii | T2i | T2ii | T2iii => Verdict::Nonexistence,
            T3iCase1 | T3iCase2 | T3iCase3 | T3iiA1 | T3iiA2 | T3iiB1 | T3iiB2 => {
                Verdict::ExistsSupersolution
            }
            CriticalAQ | CriticalAB | CriticalBC | DottedBoundary => Verdict::OpenCritical,
            NoClause => Verdict::OutOfScope,
        }
    }
}

impl fmt::Display for Citation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Citation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Citation::ALL
            .into_iter()
            .find(|c| c.tag() == s)
            .ok_or_else(|| Error::invalid(format!("unknown citation {s:?}")))
    }
}

impl From<Citation> for String {
    fn from(c: Citation) -> String {
        c.tag().to_string()
    }
}

impl TryFrom<String> for Citation {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionClass {
    pub verdict: Verdict,
    pub citation: Citation,
    /// Signed value of the binding expression.
    pub margin: f64,
    /// Regime A with `mu2 < 0 <= mu1`: the analysis ran on the exchanged
    /// system.
    pub swapped: bool,
    /// Construction backing an existence verdict.
    pub case: Option<CaseId>,
    /// Existence is asserted on the unit ball only.
    pub unit_ball_only: bool,
}

impl RegionClass {
    fn new(citation: Citation, margin: f64) -> Self {
        RegionClass {
            verdict: citation.verdict(),
            citation,
            margin,
            swapped: false,
            case: None,
            unit_ball_only: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Regime {
    A { swapped: bool },
    B,
    C,
}

fn regime(params: &HardyParams) -> Regime {
    match (params.mu1 < 0.0, params.mu2 < 0.0) {
        (true, false) => Regime::A { swapped: false },
        (false, true) => Regime::A { swapped: true },
        (true, true) => Regime::B,
        (false, false) => Regime::C,
    }
}

/// Scalar pieces every decision is made from, evaluated once per point.
struct Frame {
    a: f64,
    b: f64,
    p: f64,
    q: f64,
    /// `a q + b + N` and whether it counts as positive.
    sigma_q: (f64, bool),
    /// `b p + a + N` and whether it counts as positive.
    sigma_p: (f64, bool),
    /// `a q + 2 - b`
    dq: f64,
    /// `b p + 2 - a`
    dp: f64,
    e1: f64,
    e2: f64,
    mu1_at_mu0: bool,
    mu2_at_mu0: bool,
    n: u32,
}

impl Frame {
    fn new(params: &HardyParams, pq: &ExponentPairPQ) -> Self {
        let a = params.tau1.tau_plus;
        let b = params.tau2.tau_plus;
        let (p, q) = (pq.p, pq.q);
        let e = boundary_expressions(params, pq);
        Frame {
            a,
            b,
            p,
            q,
            sigma_q: gamma_gap(a * q, b, params.n),
            sigma_p: gamma_gap(b * p, a, params.n),
            dq: a * q + 2.0 - b,
            dp: b * p + 2.0 - a,
            e1: e.e1,
            e2: e.e2,
            mu1_at_mu0: params.mu1_at_threshold(),
            mu2_at_mu0: params.mu2_at_threshold(),
            n: params.n,
        }
    }

    fn sign_dq(&self) -> Ordering {
        sign_tol(self.dq, (self.a * self.q).abs() + 2.0 + self.b.abs())
    }

    fn sign_dp(&self) -> Ordering {
        sign_tol(self.dp, (self.b * self.p).abs() + 2.0 + self.a.abs())
    }

    /// `a q + 2`, the lower edge of the one-sided strip.
    fn sign_strip(&self) -> Ordering {
        let v = self.a * self.q + 2.0;
        sign_tol(v, (self.a * self.q).abs() + 2.0)
    }

    fn sign_e1(&self) -> Ordering {
        let scale = self.a.abs() * (self.p * self.q + 1.0) + 2.0 * self.p + 2.0;
        sign_tol(self.e1, scale)
    }

    fn sign_e2(&self) -> Ordering {
        let scale = self.b.abs() * (self.p * self.q + 1.0) + 2.0 * self.q + 2.0;
        sign_tol(self.e2, scale)
    }

    /// Gap of the once-bootstrapped exponent `(a q + 2) p` under `dγ_mu1`,
    /// which equals `E3` and, at `mu1 = mu0`, `E1`.
    fn bootstrap_gap(&self) -> (f64, bool) {
        gamma_gap((self.a * self.q + 2.0) * self.p, self.a, self.n)
    }

    fn supercritical(&self) -> bool {
        self.p > 1.0 && self.q > 1.0
    }
}

/// Maps a parameter point to its verdict and citation.
pub fn classify(params: &HardyParams, pq: &ExponentPairPQ) -> RegionClass {
    match regime(params) {
        Regime::C => RegionClass::new(Citation::NoClause, 0.0),
        Regime::A { swapped: false } => regime_a(&Frame::new(params, pq)),
        Regime::A { swapped: true } => {
            let mut class = regime_a(&Frame::new(&params.swapped(), &pq.swapped()));
            class.swapped = true;
            class
        }
        Regime::B => regime_b(&Frame::new(params, pq)),
    }
}

/// Validating wrapper around [`classify`].
pub fn classify_point(n: u32, mu1: f64, mu2: f64, p: f64, q: f64) -> Result<RegionClass> {
    let params = HardyParams::new(n, mu1, mu2)?;
    let pq = ExponentPairPQ::new(p, q)?;
    Ok(classify(&params, &pq))
}

fn existence(
    f: &Frame,
    citation: Citation,
    case: CaseId,
    margin: f64,
    unit_ball: bool,
) -> RegionClass {
    if !f.supercritical() {
        return RegionClass::new(Citation::DottedBoundary, f.p.min(f.q) - 1.0);
    }
    RegionClass {
        case: Some(case),
        unit_ball_only: unit_ball,
        ..RegionClass::new(citation, margin)
    }
}

fn regime_a(f: &Frame) -> RegionClass {
    let (sigma, positive) = f.sigma_q;
    if !positive {
        return RegionClass::new(Citation::T1i, sigma);
    }
    if f.sign_strip() == Less {
        if f.mu1_at_mu0 {
            let (e3, positive) = f.bootstrap_gap();
            if !positive {
                return RegionClass::new(Citation::T1ii, e3);
            }
            return existence(f, Citation::T3iCase1, CaseId::C1, e3, true);
        }
        return match f.sign_e1() {
            Less => RegionClass::new(Citation::T1ii, f.e1),
            Equal => RegionClass::new(Citation::CriticalAQ, f.e1),
            Greater => existence(f, Citation::T3iCase1, CaseId::C1, f.e1, true),
        };
    }
    // at or below the strip E1 > 0 holds automatically; which construction
    // applies depends on q against (2 - b)/(-a)
    match f.sign_dq() {
        Less => existence(f, Citation::T3iCase1, CaseId::C1, f.dq, true),
        Equal => existence(f, Citation::T3iCase3, CaseId::C3, f.dq, true),
        Greater => existence(f, Citation::T3iCase2, CaseId::C2, f.dq, true),
    }
}

fn regime_b(f: &Frame) -> RegionClass {
    let (sq, pos_q) = f.sigma_q;
    let (sp, pos_p) = f.sigma_p;
    if !pos_q || !pos_p {
        let margin = match (pos_q, pos_p) {
            (false, false) => sq.min(sp),
            (false, true) => sq,
            _ => sp,
        };
        return RegionClass::new(Citation::T2i, margin);
    }
    let (dq, dp) = (f.sign_dq(), f.sign_dp());
    let (e1, e2) = (f.sign_e1(), f.sign_e2());
    let ii = dq == Less && e1 == Less;
    let iii = dp == Less && e2 == Less;
    match (ii, iii) {
        (true, true) if f.e2 < f.e1 => return RegionClass::new(Citation::T2iii, f.e2),
        (true, _) => return RegionClass::new(Citation::T2ii, f.e1),
        (false, true) => return RegionClass::new(Citation::T2iii, f.e2),
        _ => {}
    }
    if dq == Less {
        return match e1 {
            Greater => existence(f, Citation::T3iiA1, CaseId::C4, f.e1, false),
            _ => RegionClass::new(Citation::CriticalAB, f.e1),
        };
    }
    if dp == Less {
        return match e2 {
            Greater => existence(f, Citation::T3iiB1, CaseId::C8, f.e2, false),
            _ => RegionClass::new(Citation::CriticalBC, f.e2),
        };
    }
    match (dq, dp) {
        (Greater, Greater) => existence(f, Citation::T3iiA2, CaseId::C5, f.dq.min(f.dp), false),
        (Equal, Greater) if !f.mu2_at_mu0 => {
            existence(f, Citation::T3iiA2, CaseId::C6, f.dq, false)
        }
        (Greater, Equal) if !f.mu1_at_mu0 => {
            existence(f, Citation::T3iiB2, CaseId::C7, f.dp, false)
        }
        _ => RegionClass::new(Citation::DottedBoundary, f.dq),
    }
}

/// Nonexistence clauses satisfied at the point, read off the theorem
/// statements independently of [`classify`].
pub fn nonexistence_clauses(params: &HardyParams, pq: &ExponentPairPQ) -> Vec<Citation> {
    let mut out = Vec::new();
    match regime(params) {
        Regime::C => {}
        Regime::A { swapped } => {
            let (params, pq) = frame_of(params, pq, swapped);
            let f = Frame::new(&params, &pq);
            let below_qn = f.sigma_q.1;
            if !below_qn {
                out.push(Citation::T1i);
            }
            let e1 = f.sign_e1();
            let crit = if f.mu1_at_mu0 {
                e1 != Greater
            } else {
                e1 == Less
            };
            if f.sign_strip() == Less && below_qn && crit {
                out.push(Citation::T1ii);
            }
        }
        Regime::B => {
            let f = Frame::new(params, pq);
            if !f.sigma_q.1 || !f.sigma_p.1 {
                out.push(Citation::T2i);
            }
            if f.sign_dq() == Less && f.sigma_q.1 && f.sign_e1() == Less {
                out.push(Citation::T2ii);
            }
            if f.sign_dp() == Less && f.sigma_p.1 && f.sign_e2() == Less {
                out.push(Citation::T2iii);
            }
        }
    }
    out
}

/// Existence clauses satisfied at the point, restricted to `p, q > 1` and,
/// for the `a.2` and `b.2` items, to the sub-regions a construction covers:
/// `q <= (2-b)/(-a)` together with `p < (2-a)/(-b)`, and symmetrically.
pub fn existence_clauses(params: &HardyParams, pq: &ExponentPairPQ) -> Vec<Citation> {
    let mut out = Vec::new();
    if !(pq.p > 1.0 && pq.q > 1.0) {
        return out;
    }
    match regime(params) {
        Regime::C => {}
        Regime::A { swapped } => {
            let (params, pq) = frame_of(params, pq, swapped);
            let f = Frame::new(&params, &pq);
            if f.sigma_q.1 && f.sign_e1() == Greater {
                out.push(Citation::T3iCase1);
            }
        }
        Regime::B => {
            let f = Frame::new(params, pq);
            let (dq, dp) = (f.sign_dq(), f.sign_dp());
            if dq == Less && f.sigma_q.1 && f.sign_e1() == Greater {
                out.push(Citation::T3iiA1);
            }
            if dp == Less && f.sigma_p.1 && f.sign_e2() == Greater {
                out.push(Citation::T3iiB1);
            }
            if dq != Less && dp == Greater {
                out.push(Citation::T3iiA2);
            }
            if dp != Less && dq == Greater {
                out.push(Citation::T3iiB2);
            }
        }
    }
    out
}

/// The `a.2` item exactly as stated (`q <= (2-b)/(-a)`, `p < (N+a)/(-b)`),
/// kept for comparison with the restricted form.
pub fn literal_a2_clause(params: &HardyParams, pq: &ExponentPairPQ) -> bool {
    if regime(params) != Regime::B || !(pq.p > 1.0 && pq.q > 1.0) {
        return false;
    }
    let f = Frame::new(params, pq);
    f.sign_dq() != Less && f.sigma_p.1
}

fn frame_of(
    params: &HardyParams,
    pq: &ExponentPairPQ,
    swapped: bool,
) -> (HardyParams, ExponentPairPQ) {
    if swapped {
        (params.swapped(), pq.swapped())
    } else {
        (*params, *pq)
    }
}

/// Evidence for a nonexistence verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mechanism", rename_all = "snake_case")]
pub enum Witness {
    /// `r^tau` is not in `L^1(dγ_mu)` near the origin.
    Integrability {
        tau: f64,
        mu: f64,
        verdict: IntegrabilityVerdict,
    },
    /// The exponent bootstrap crosses `tau_-`.
    Iteration { trace: IterationTrace },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonexistenceWitness {
    pub citation: Citation,
    pub swapped: bool,
    pub witness: Witness,
}

fn integrability_witness(
    params: &HardyParams,
    tau: f64,
    mu: f64,
    citation: Citation,
) -> Result<Witness> {
    let verdict = is_gamma_integrable(params.n, mu, &RadialFunction::monomial(tau), 1.0)?;
    if verdict.integrable {
        return Err(Error::Inconsistent(format!(
            "{citation}: r^{tau} is integrable under mu = {mu} (gap {})",
            verdict.critical_exponent_gap
        )));
    }
    Ok(Witness::Integrability { tau, mu, verdict })
}

fn iteration_witness(trace: IterationTrace, citation: Citation) -> Result<Witness> {
    if !trace.outcome.is_crossing() {
        return Err(Error::Inconsistent(format!(
            "{citation}: iteration ended with {:?} at step {}",
            trace.outcome.kind, trace.outcome.step
        )));
    }
    Ok(Witness::Iteration { trace })
}

/// Produces the certificate behind a nonexistence verdict. A cited mechanism
/// that fails to deliver is reported as [`Error::Inconsistent`].
pub fn nonexistence_witness(
    params: &HardyParams,
    pq: &ExponentPairPQ,
) -> Result<NonexistenceWitness> {
    let class = classify(params, pq);
    if class.verdict != Verdict::Nonexistence {
        return Err(Error::invalid(format!(
            "no nonexistence verdict at this point ({} / {})",
            class.verdict, class.citation
        )));
    }
    let (fp, fpq) = frame_of(params, pq, class.swapped);
    let a = fp.tau1.tau_plus;
    let b = fp.tau2.tau_plus;
    let witness = match class.citation {
        Citation::T1i => integrability_witness(&fp, a * fpq.q, fp.mu2, class.citation)?,
        Citation::T2i => {
            if !gamma_gap(a * fpq.q, b, fp.n).1 {
                integrability_witness(&fp, a * fpq.q, fp.mu2, class.citation)?
            } else {
                integrability_witness(&fp, b * fpq.p, fp.mu1, class.citation)?
            }
        }
        Citation::T1ii if fp.mu1_at_threshold() => {
            integrability_witness(&fp, (a * fpq.q + 2.0) * fpq.p, fp.mu1, class.citation)?
        }
        Citation::T1ii => {
            iteration_witness(iterate_plain(&fp, &fpq, DEFAULT_CAP)?, class.citation)?
        }
        Citation::T2ii => {
            iteration_witness(iterate_clamped(&fp, &fpq, DEFAULT_CAP)?, class.citation)?
        }
        Citation::T2iii => iteration_witness(
            iterate_clamped(&fp.swapped(), &fpq.swapped(), DEFAULT_CAP)?,
            class.citation,
        )?,
        other => {
            return Err(Error::Inconsistent(format!(
                "citation {other} carries no nonexistence mechanism"
            )))
        }
    };
    Ok(NonexistenceWitness {
        citation: class.citation,
        swapped: class.swapped,
        witness,
    })
}

/// Axis interval `[lo, hi]` with `0 < lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
            return Err(Error::invalid(format!(
                "interval [{lo}, {hi}] must satisfy 0 < lo < hi"
            )));
        }
        Ok(Interval { lo, hi })
    }

    /// Center of cell `i` out of `res`.
    pub fn center(&self, i: usize, res: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * (self.hi - self.lo) / res as f64
    }
}

impl FromStr for Interval {
    type Err = Error;
    /// Parses `lo..hi`.
    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once("..")
            .ok_or_else(|| Error::invalid(format!("range {s:?} is not of the form a..b")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad range bound {t:?}")))
        };
        Interval::new(parse(lo)?, parse(hi)?)
    }
}

pub const MAX_RESOLUTION: usize = 4096;

/// Cell-centered samples, row-major with rows indexed by `q` (row 0 at the
/// lowest `q`) and columns by `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionGrid {
    pub params: HardyParams,
    pub p_range: Interval,
    pub q_range: Interval,
    pub resolution: usize,
    pub cells: Vec<RegionClass>,
}

impl RegionGrid {
    pub fn p_at(&self, col: usize) -> f64 {
        self.p_range.center(col, self.resolution)
    }

    pub fn q_at(&self, row: usize) -> f64 {
        self.q_range.center(row, self.resolution)
    }

    pub fn cell(&self, row: usize, col: usize) -> &RegionClass {
        &self.cells[row * self.resolution + col]
    }

    /// `(p, q, class)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, &RegionClass)> + '_ {
        self.cells.iter().enumerate().map(move |(k, c)| {
            let (row, col) = (k / self.resolution, k % self.resolution);
            (self.p_at(col), self.q_at(row), c)
        })
    }
}

/// Worker count from `LEH_THREADS`, if set to a positive integer.
pub fn thread_limit() -> Option<usize> {
    std::env::var("LEH_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Classifies a `resolution x resolution` grid of cell centers in parallel.
pub fn classify_grid(
    params: &HardyParams,
    p_range: Interval,
    q_range: Interval,
    resolution: usize,
) -> Result<RegionGrid> {
    let p_range = Interval::new(p_range.lo, p_range.hi)?;
    let q_range = Interval::new(q_range.lo, q_range.hi)?;
    if !(1..=MAX_RESOLUTION).contains(&resolution) {
        return Err(Error::invalid(format!(
            "resolution {resolution} outside [1, {MAX_RESOLUTION}]"
        )));
    }
    let work = || -> Vec<RegionClass> {
        (0..resolution * resolution)
            .into_par_iter()
            .map(|k| {
                let (row, col) = (k / resolution, k % resolution);
                let pq = ExponentPairPQ {
                    p: p_range.center(col, resolution),
                    q: q_range.center(row, resolution),
                };
                classify(params, &pq)
            })
            .collect()
    };
    let cells = match thread_limit() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    Ok(RegionGrid {
        params: *params,
        p_range,
        q_range,
        resolution,
        cells,
    })
}
