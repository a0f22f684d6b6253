//! CSV and SVG writers.

use std::fmt::Write as _;

use solcurve::{detect_folds, CurvePoint, Family, SolutionCurve};

use crate::solve::{Profile, Status, Sweep};

/// Lossless text form of a double.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV columns for a family: (header, per-point cells).
fn columns(family: Family) -> (&'static str, fn(&CurvePoint) -> [String; 3]) {
    match family {
        Family::ClampedBeam => ("alpha,lambda,beta", |p| {
            [num(p.alpha), num(p.lambda), num(p.beta.unwrap_or(f64::NAN))]
        }),
        Family::HarmonicForced => ("xi,mu,uprime0", |p| {
            [num(p.alpha), num(p.lambda), num(p.uprime0.unwrap_or(f64::NAN))]
        }),
        _ => ("alpha,lambda,terminal", |p| {
            [num(p.alpha), num(p.lambda), p.terminal.name().to_string()]
        }),
    }
}

/// Curve CSV: a header row, `# branch` before every branch after the
/// first, and `#` footer lines with the status, notes and folds.
pub fn curve_csv(sweep: &Sweep) -> String {
    let curve = &sweep.curve;
    let (header, cells) = columns(curve.problem.family);
    let mut out = String::new();
    writeln!(out, "{header}").unwrap();
    for (i, branch) in curve.branch_slices().enumerate() {
        if i > 0 {
            writeln!(out, "# branch").unwrap();
        }
        for p in branch {
            writeln!(out, "{}", cells(p).join(",")).unwrap();
        }
    }
    let problem = &curve.problem;
    writeln!(
        out,
        "# problem: {} f = {}",
        problem.family.name(),
        problem.nonlinearity.label()
    )
    .unwrap();
    for fold in detect_folds(curve) {
        writeln!(out, "# fold alpha={} lambda={}", num(fold.alpha), num(fold.lambda)).unwrap();
    }
    for note in &curve.meta.notes {
        writeln!(out, "# note: {note}").unwrap();
    }
    let accepted = curve.points.len();
    let rejected = curve.meta.rejected.len();
    match &sweep.status {
        Status::Complete => writeln!(
            out,
            "# status: complete, {accepted} accepted, {rejected} rejected, {} branch(es)",
            curve.branches.len()
        ),
        Status::FirstPointFailed(why) => {
            writeln!(
                out,
                "# status: first-point-failure, {accepted} accepted, {rejected} rejected: {why}"
            )
        }
    }
    .unwrap();
    out
}

pub fn profile_csv(profile: &Profile) -> String {
    let mut out = String::new();
    for (name, value) in &profile.parameters {
        writeln!(out, "# {name}={}", num(*value)).unwrap();
    }
    writeln!(out, "{},u", profile.variable).unwrap();
    for (x, u) in &profile.samples {
        writeln!(out, "{},{}", num(*x), num(*u)).unwrap();
    }
    out
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 24.0;
const BOTTOM: f64 = 56.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Tick positions covering `[lo, hi]` at a 1-2-5 spacing.
pub fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) || !span.is_finite() {
        return vec![lo];
    }
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= target as f64)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e5).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.6}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".to_string()
        } else {
            s.to_string()
        }
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.04 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = 0.5 * lo.abs().max(1.0);
        (lo - pad, hi + pad)
    }
}

/// Plot coordinates of a curve point: `(λ, α)` for α-curves and `(ξ, μ)`
/// for harmonic curves.
fn plot_xy(family: Family, p: &CurvePoint) -> (f64, f64) {
    match family {
        Family::HarmonicForced => (p.alpha, p.lambda),
        _ => (p.lambda, p.alpha),
    }
}

/// Self-contained SVG of the curve, one polyline per branch. Each polyline
/// carries its data coordinates in `data-points` next to the pixel
/// `points`.
pub fn curve_svg(curve: &SolutionCurve) -> String {
    let family = curve.problem.family;
    let (xname, yname) = match family {
        Family::HarmonicForced => ("xi", "mu"),
        _ => ("lambda", "alpha"),
    };
    let pts: Vec<(f64, f64)> = curve.branch_slices().flatten().map(|p| plot_xy(family, p)).collect();
    let bounds = |sel: fn(&(f64, f64)) -> f64| {
        pts.iter()
            .map(sel)
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (mut x0, mut x1) = bounds(|p| p.0);
    let (mut y0, mut y1) = bounds(|p| p.1);
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
        (y0, y1) = (0.0, 1.0);
    }
    let (x0, x1) = padded(x0, x1);
    let (y0, y1) = padded(y0, y1);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| TOP + (y1 - y) / (y1 - y0) * plot_h;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" data-x-range="{} {}" data-y-range="{} {}">"#,
        num(x0),
        num(x1),
        num(y0),
        num(y1)
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(s, r#"<g font-family="sans-serif" font-size="11" fill="black">"#).unwrap();
    let (bx, by) = (px(x0), py(y0));
    writeln!(
        s,
        r#"<path d="M{LEFT:.2} {TOP:.2} V{by:.2} H{:.2}" fill="none" stroke="black"/>"#,
        WIDTH - RIGHT
    )
    .unwrap();
    for t in ticks(x0, x1, 8) {
        let x = px(t);
        writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{by:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            by + 5.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            by + 18.0,
            tick_label(t)
        )
        .unwrap();
    }
    for t in ticks(y0, y1, 8) {
        let y = py(t);
        writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{bx:.2}" y2="{y:.2}" stroke="black"/>"#,
            bx - 5.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            bx - 8.0,
            y + 4.0,
            tick_label(t)
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{xname}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{yname}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    )
    .unwrap();
    writeln!(s, "</g>").unwrap();
    for (i, branch) in curve.branch_slices().enumerate() {
        let data: Vec<(f64, f64)> = branch.iter().map(|p| plot_xy(family, p)).collect();
        let pixels: Vec<String> = data
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let raw: Vec<String> = data.iter().map(|&(x, y)| format!("{},{}", num(x), num(y))).collect();
        writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}" data-points="{}"/>"#,
            COLORS[i % COLORS.len()],
            pixels.join(" "),
            raw.join(" ")
        )
        .unwrap();
    }
    writeln!(s, "</svg>").unwrap();
    s
}
