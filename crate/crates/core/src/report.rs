//! Serialized outputs: JSON records, CSV tables and SVG region plots.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::classify::{Citation, Interval, NonexistenceWitness, RegionClass, RegionGrid, Verdict};
use crate::construction::{CaseId, SupersolutionCandidate, VerificationReport};
use crate::error::{Error, Result};
use crate::exponent::HardyParams;
use crate::iteration::{IterationTrace, Variant};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamsRecord {
    pub n: u32,
    pub mu1: f64,
    pub mu2: f64,
    pub mu0: f64,
    pub tau_plus_1: f64,
    pub tau_minus_1: f64,
    pub tau_plus_2: f64,
    pub tau_minus_2: f64,
}

impl From<&HardyParams> for ParamsRecord {
    fn from(p: &HardyParams) -> Self {
        ParamsRecord {
            n: p.n,
            mu1: p.mu1,
            mu2: p.mu2,
            mu0: p.mu0,
            tau_plus_1: p.tau1.tau_plus,
            tau_minus_1: p.tau1.tau_minus,
            tau_plus_2: p.tau2.tau_plus,
            tau_minus_2: p.tau2.tau_minus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyRecord {
    pub schema_version: String,
    pub kind: String,
    pub params: ParamsRecord,
    pub p: f64,
    pub q: f64,
    pub verdict: Verdict,
    pub citation: Citation,
    pub margin: f64,
    pub swapped: bool,
    pub case: Option<CaseId>,
    pub unit_ball_only: bool,
    pub witness: Option<NonexistenceWitness>,
}

impl ClassifyRecord {
    pub fn new(
        params: &HardyParams,
        p: f64,
        q: f64,
        class: &RegionClass,
        witness: Option<NonexistenceWitness>,
    ) -> Self {
        ClassifyRecord {
            schema_version: SCHEMA_VERSION.into(),
            kind: "classify".into(),
            params: params.into(),
            p,
            q,
            verdict: class.verdict,
            citation: class.citation,
            margin: class.margin,
            swapped: class.swapped,
            case: class.case,
            unit_ball_only: class.unit_ball_only,
            witness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateRecord {
    pub schema_version: String,
    pub kind: String,
    pub params: ParamsRecord,
    pub p: f64,
    pub q: f64,
    pub variant: Variant,
    pub cap: usize,
    pub trace: IterationTrace,
    /// Geometric increment law on the trace; absent for short traces.
    pub claim1_holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRecord {
    pub schema_version: String,
    pub kind: String,
    pub params: ParamsRecord,
    pub p: f64,
    pub q: f64,
    pub case: CaseId,
    pub candidate: SupersolutionCandidate,
    pub report: VerificationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotRecord {
    pub schema_version: String,
    pub kind: String,
    pub params: ParamsRecord,
    pub p_range: Interval,
    pub q_range: Interval,
    pub resolution: usize,
    /// Cell count per citation tag.
    pub counts: BTreeMap<String, usize>,
}

impl PlotRecord {
    pub fn new(grid: &RegionGrid) -> Self {
        let mut counts = BTreeMap::new();
        for c in &grid.cells {
            *counts.entry(c.citation.tag().to_string()).or_insert(0) += 1;
        }
        PlotRecord {
            schema_version: SCHEMA_VERSION.into(),
            kind: "plot".into(),
            params: (&grid.params).into(),
            p_range: grid.p_range,
            q_range: grid.q_range,
            resolution: grid.resolution,
            counts,
        }
    }
}

/// `x` rounded to 12 significant digits, printed in shortest form.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() || x == 0.0 {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if rounded.abs() < 1e-4 || rounded.abs() >= 1e15 {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

pub const GRID_CSV_HEADER: &str = "p,q,verdict,citation,margin";

pub fn grid_csv(grid: &RegionGrid) -> String {
    let mut out = String::with_capacity(grid.cells.len() * 48);
    out.push_str(GRID_CSV_HEADER);
    out.push('\n');
    for (p, q, c) in grid.iter() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            sig12(p),
            sig12(q),
            c.verdict,
            c.citation,
            sig12(c.margin)
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub p: f64,
    pub q: f64,
    pub verdict: Verdict,
    pub citation: Citation,
    pub margin: f64,
}

pub fn parse_grid_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(GRID_CSV_HEADER) {
        return Err(Error::invalid("missing grid CSV header"));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(Error::invalid(format!(
                    "CSV line {}: expected 5 fields",
                    i + 2
                )));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::invalid(format!("CSV line {}: bad number {s:?}", i + 2)))
            };
            Ok(CsvRow {
                p: num(f[0])?,
                q: num(f[1])?,
                verdict: f[2].parse()?,
                citation: f[3].parse()?,
                margin: num(f[4])?,
            })
        })
        .collect()
}

/// `j, tau1, tau2, s_j` with `s_j` the `tau1` increment.
pub fn trace_csv(trace: &IterationTrace) -> String {
    let mut out = String::from("j,tau1,tau2,s_j\n");
    let mut prev: Option<f64> = None;
    for st in &trace.steps {
        let s = match (prev, st.tau1) {
            (Some(a), Some(b)) => sig12(b - a),
            _ => String::new(),
        };
        let tau1 = st.tau1.map(sig12).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{}", st.j, tau1, sig12(st.tau2), s);
        prev = st.tau1;
    }
    out
}

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 640.0;
const PAD: f64 = 60.0;
const LEGEND_W: f64 = 260.0;
const CURVE_SAMPLES: usize = 256;

fn fill(c: Citation) -> &'static str {
    use Citation::*;
    match c {
        T1i => "#b2182b",
        T1ii => "#d6604d",
        T2i => "#a50026",
        T2ii => "#e34a33",
        T2iii => "#fc8d59",
        T3iCase1 => "#1a9850",
        T3iCase2 => "#66bd63",
        T3iCase3 => "#006837",
        T3iiA1 => "#2166ac",
        T3iiA2 => "#4393c3",
        T3iiB1 => "#92c5de",
        T3iiB2 => "#053061",
        CriticalAQ | CriticalAB | CriticalBC => "#fee08b",
        DottedBoundary => "#bdbdbd",
        NoClause => "#f0f0f0",
    }
}

fn css_class(c: Citation) -> String {
    c.tag().replace('.', "-").to_lowercase()
}

/// A named point of the region picture, in `(p, q)` coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marker {
    pub name: String,
    pub p: f64,
    pub q: f64,
}

/// Corner and end points of the region boundaries for the configuration.
/// Points on an axis have the other coordinate 0.
pub fn markers(params: &HardyParams) -> Vec<Marker> {
    let swapped = params.mu1 >= 0.0 && params.mu2 < 0.0;
    let fp = if swapped { params.swapped() } else { *params };
    let a = fp.tau1.tau_plus;
    let b = fp.tau2.tau_plus;
    let n = fp.n as f64;
    let mut out = Vec::new();
    let mut push = |name: &str, p: f64, q: f64| {
        if p.is_finite() && q.is_finite() {
            let (p, q) = if swapped { (q, p) } else { (p, q) };
            out.push(Marker {
                name: name.into(),
                p,
                q,
            });
        }
    };
    // p on E1 = 0 for given q
    let on_e1 = |q: f64| (a - 2.0) / (a * q + 2.0);
    let on_e2 = |p: f64| (b - 2.0) / (b * p + 2.0);
    if a < 0.0 && b >= 0.0 {
        let qn = (n + b) / (-a);
        push("E", 0.0, qn);
        push("A", on_e1(qn), qn);
        push("M", 0.0, 2.0 / (-a));
    } else if a < 0.0 && b < 0.0 {
        let (qn, pn) = ((n + b) / (-a), (n + a) / (-b));
        let (qb, pb) = ((2.0 - b) / (-a), (2.0 - a) / (-b));
        push("E", 0.0, qn);
        push("D", pn, 0.0);
        push("B", pb, qb);
        push("F", 0.0, qb);
        push("G", pb, 0.0);
        push("A", on_e1(qn), qn);
        push("C", pn, on_e2(pn));
    }
    out
}

struct Frame {
    p: Interval,
    q: Interval,
}

impl Frame {
    fn x(&self, p: f64) -> f64 {
        PAD + (p - self.p.lo) / (self.p.hi - self.p.lo) * PLOT_W
    }
    fn y(&self, q: f64) -> f64 {
        PAD + (self.q.hi - q) / (self.q.hi - self.q.lo) * PLOT_H
    }
    fn inside(&self, p: f64, q: f64) -> bool {
        p >= self.p.lo && p <= self.p.hi && q >= self.q.lo && q <= self.q.hi
    }
}

/// SVG position of the point `(p, q)` in the plot of `grid`.
pub fn svg_position(grid: &RegionGrid, p: f64, q: f64) -> (f64, f64) {
    let frame = Frame {
        p: grid.p_range,
        q: grid.q_range,
    };
    (frame.x(p), frame.y(q))
}

/// Polyline pieces of `{(p, q(p))}` sampled over the p range, split where
/// the curve leaves the frame.
fn curve_path(frame: &Frame, points: impl Iterator<Item = (f64, f64)>) -> String {
    let mut d = String::new();
    let mut pen_down = false;
    for (p, q) in points {
        if q.is_finite() && p.is_finite() && frame.inside(p, q) {
            let cmd = if pen_down { 'L' } else { 'M' };
            let _ = write!(d, "{cmd}{:.6},{:.6} ", frame.x(p), frame.y(q));
            pen_down = true;
        } else {
            pen_down = false;
        }
    }
    d.trim_end().to_string()
}

/// Deterministic SVG rendering of a classified grid.
pub fn grid_svg(grid: &RegionGrid) -> Result<String> {
    if grid.cells.is_empty() {
        return Err(Error::invalid("cannot plot an empty grid"));
    }
    let frame = Frame {
        p: grid.p_range,
        q: grid.q_range,
    };
    let res = grid.resolution;
    let cw = PLOT_W / res as f64;
    let ch = PLOT_H / res as f64;
    let width = PAD * 2.0 + PLOT_W + LEGEND_W;
    let height = PAD * 2.0 + PLOT_H;

    let present: Vec<Citation> = Citation::ALL
        .into_iter()
        .filter(|c| grid.cells.iter().any(|x| x.citation == *c))
        .collect();

    let mut s = String::with_capacity(res * res * 80 + 8192);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.6}" height="{height:.6}" viewBox="0 0 {width:.6} {height:.6}">"#
    );
    s.push_str("<style>\n");
    for c in &present {
        let _ = writeln!(s, ".{} {{ fill: {}; }}", css_class(*c), fill(*c));
    }
    s.push_str(".e1 { fill: none; stroke: #000000; stroke-width: 1.5; }\n");
    s.push_str(".e2 { fill: none; stroke: #000000; stroke-width: 1.5; stroke-dasharray: 6 3; }\n");
    s.push_str(".marker { fill: #000000; }\n");
    s.push_str("text { font-family: sans-serif; font-size: 12px; }\n");
    s.push_str("</style>\n");

    s.push_str("<g id=\"cells\" shape-rendering=\"crispEdges\">\n");
    for row in 0..res {
        for col in 0..res {
            let c = grid.cell(row, col);
            let x = PAD + col as f64 * cw;
            let y = PAD + (res - 1 - row) as f64 * ch;
            let _ = writeln!(
                s,
                r#"<rect x="{x:.6}" y="{y:.6}" width="{cw:.6}" height="{ch:.6}" class="{}"/>"#,
                css_class(c.citation)
            );
        }
    }
    s.push_str("</g>\n");

    let params = &grid.params;
    let a = params.tau1.tau_plus;
    let b = params.tau2.tau_plus;
    let step =
        |i: usize, r: &Interval| r.lo + (r.hi - r.lo) * i as f64 / (CURVE_SAMPLES - 1) as f64;
    if a != 0.0 {
        // E1 = 0 solved for q
        let pts = (0..CURVE_SAMPLES).map(|i| {
            let p = step(i, &grid.p_range);
            (p, (a - 2.0 * p - 2.0) / (a * p))
        });
        let d = curve_path(&frame, pts);
        if !d.is_empty() {
            let _ = writeln!(s, r#"<path id="curve-e1" class="e1" d="{d}"/>"#);
        }
    }
    if b != 0.0 {
        // E2 = 0 solved for p
        let pts = (0..CURVE_SAMPLES).map(|i| {
            let q = step(i, &grid.q_range);
            ((b - 2.0 * q - 2.0) / (b * q), q)
        });
        let d = curve_path(&frame, pts);
        if !d.is_empty() {
            let _ = writeln!(s, r#"<path id="curve-e2" class="e2" d="{d}"/>"#);
        }
    }

    s.push_str("<g id=\"markers\">\n");
    for m in markers(params) {
        // axis points are pinned to the frame edge
        let (pp, qq) = (m.p.max(grid.p_range.lo), m.q.max(grid.q_range.lo));
        if !frame.inside(pp, qq) {
            continue;
        }
        let (x, y) = (frame.x(pp), frame.y(qq));
        let _ = writeln!(
            s,
            r#"<g class="marker" data-name="{}" data-p="{}" data-q="{}"><circle cx="{x:.6}" cy="{y:.6}" r="4"/><text x="{:.6}" y="{:.6}">{}</text></g>"#,
            m.name,
            sig12(m.p),
            sig12(m.q),
            x + 6.0,
            y - 6.0,
            m.name
        );
    }
    s.push_str("</g>\n");

    // axes
    let _ = writeln!(
        s,
        r##"<rect x="{PAD:.6}" y="{PAD:.6}" width="{PLOT_W:.6}" height="{PLOT_H:.6}" fill="none" stroke="#000000"/>"##
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.6}" y="{:.6}">p</text><text x="{:.6}" y="{:.6}">q</text>"#,
        PAD + PLOT_W / 2.0,
        PAD + PLOT_H + 40.0,
        PAD - 40.0,
        PAD + PLOT_H / 2.0
    );
    for (i, v) in [grid.p_range.lo, grid.p_range.hi].into_iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{:.6}" y="{:.6}">{}</text>"#,
            PAD + PLOT_W * i as f64 - 10.0,
            PAD + PLOT_H + 18.0,
            sig12(v)
        );
    }
    for (i, v) in [grid.q_range.lo, grid.q_range.hi].into_iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{:.6}" y="{:.6}">{}</text>"#,
            PAD - 45.0,
            PAD + PLOT_H * (1.0 - i as f64) + 4.0,
            sig12(v)
        );
    }

    s.push_str("<g id=\"legend\">\n");
    let lx = PAD * 1.5 + PLOT_W;
    for (i, c) in present.iter().enumerate() {
        let y = PAD + 22.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{lx:.6}" y="{y:.6}" width="14.000000" height="14.000000" class="{}"/><text x="{:.6}" y="{:.6}">{} ({})</text>"#,
            css_class(*c),
            lx + 20.0,
            y + 12.0,
            c.verdict(),
            c.tag()
        );
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify_grid;

    fn grid(res: usize) -> RegionGrid {
        let p = HardyParams::new(5, -2.0, 0.0).unwrap();
        classify_grid(
            &p,
            Interval::new(0.1, 8.0).unwrap(),
            Interval::new(0.1, 8.0).unwrap(),
            res,
        )
        .unwrap()
    }

    #[test]
    fn sig12_rounds() {
        assert_eq!(sig12(0.1), "0.1");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(-2.0), "-2");
        assert_eq!(sig12(1.23456789012345e-20), "1.23456789012e-20");
    }

    #[test]
    fn csv_round_trip() {
        let g = grid(16);
        let rows = parse_grid_csv(&grid_csv(&g)).unwrap();
        assert_eq!(rows.len(), 256);
        for (row, (_, _, c)) in rows.iter().zip(g.iter()) {
            assert_eq!((row.verdict, row.citation), (c.verdict, c.citation));
        }
    }

    #[test]
    fn two_by_two_svg() {
        let svg = grid_svg(&grid(2)).unwrap();
        let cells = svg
            .split("<g id=\"cells\"")
            .nth(1)
            .unwrap()
            .split("</g>")
            .next()
            .unwrap();
        assert_eq!(cells.matches("<rect").count(), 4);
        assert!(svg.contains("<g id=\"legend\">"));
        assert_eq!(svg, grid_svg(&grid(2)).unwrap());
    }

    #[test]
    fn regime_b_markers() {
        let p = HardyParams::new(5, -2.0, -2.0).unwrap();
        let m = markers(&p);
        let find = |n: &str| m.iter().find(|x| x.name == n).unwrap().clone();
        assert_eq!((find("E").p, find("E").q), (0.0, 4.0));
        assert_eq!((find("D").p, find("D").q), (4.0, 0.0));
        assert_eq!((find("B").p, find("B").q), (3.0, 3.0));
    }
}
