use std::ops::Range;

use super::ProblemSpec;
use crate::ode::Tolerances;

/// Why the computation of a curve point ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Terminal {
    /// First root of `u` reached (shoot-and-scale Dirichlet problems).
    DirichletRoot,
    /// First critical point of `u` reached (Neumann problems).
    NeumannCritical,
    /// Newton iteration converged (continuation families).
    Converged,
    /// No event before the integration cap; possibly a ground state.
    NoEventByTend,
    /// `u` became negative in supercritical mode.
    WentNegative,
    NewtonFailed,
    /// `f(α) = 0` or a comparable degenerate start; no shot attempted.
    Degenerate,
    /// The integrator failed (blow-up or step underflow).
    IntegrationFailed,
}

impl Terminal {
    pub fn name(self) -> &'static str {
        match self {
            Terminal::DirichletRoot => "dirichlet-root",
            Terminal::NeumannCritical => "neumann-critical",
            Terminal::Converged => "converged",
            Terminal::NoEventByTend => "no-event",
            Terminal::WentNegative => "went-negative",
            Terminal::NewtonFailed => "newton-failed",
            Terminal::Degenerate => "degenerate",
            Terminal::IntegrationFailed => "integration-failed",
        }
    }

    pub fn is_accepted(self) -> bool {
        matches!(
            self,
            Terminal::DirichletRoot | Terminal::NeumannCritical | Terminal::Converged
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonIterate {
    /// Parameter value after the iterate (λ, or μ for harmonics).
    pub lambda: f64,
    /// Second unknown (β for the beam).
    pub beta: Option<f64>,
    /// Residual norm at this iterate.
    pub residual: f64,
    /// Size of the update that produced this iterate (0 for the start).
    pub step: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NewtonReport {
    pub iterates: Vec<NewtonIterate>,
    pub converged: bool,
    pub steps: usize,
}

impl NewtonReport {
    pub fn final_residual(&self) -> f64 {
        self.iterates.last().map_or(f64::INFINITY, |it| it.residual)
    }

    /// Ratios `|F_{k+1}| / |F_k|²` over consecutive iterates whose residual
    /// is above `floor`; bounded ratios witness quadratic convergence.
    pub fn quadratic_ratios(&self, floor: f64) -> Vec<f64> {
        self.iterates
            .windows(2)
            .filter(|w| w[0].residual > floor && w[1].residual > floor)
            .map(|w| w[1].residual / (w[0].residual * w[0].residual))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    /// Global parameter: `u(0)`, or the harmonic `ξ`.
    pub alpha: f64,
    /// λ, or `μ` for harmonics.
    pub lambda: f64,
    /// `u''(0)` for the beam.
    pub beta: Option<f64>,
    /// `u'(0)` for harmonics.
    pub uprime0: Option<f64>,
    pub terminal: Terminal,
    pub newton: Option<NewtonReport>,
}

impl CurvePoint {
    pub fn new(alpha: f64, lambda: f64, terminal: Terminal) -> CurvePoint {
        CurvePoint {
            alpha,
            lambda,
            beta: None,
            uprime0: None,
            terminal,
            newton: None,
        }
    }
}

/// Uniform grid `start + i·step` for `i = 1..=count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, step: f64, count: usize) -> Grid {
        Grid { start, step, count }
    }

    pub fn value(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn values(&self) -> Vec<f64> {
        (1..=self.count).map(|i| self.value(i)).collect()
    }
}

/// Threshold on `|Δλ|` that starts a new branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JumpRule {
    Fixed(f64),
    /// `max(floor, factor·(max λ − min λ))` over the trailing `window` points
    /// of the current branch. No jump splits happen until the branch holds
    /// `window` points.
    Adaptive {
        factor: f64,
        window: usize,
        floor: f64,
    },
}

impl Default for JumpRule {
    fn default() -> Self {
        JumpRule::Adaptive {
            factor: 0.5,
            window: 10,
            floor: 1e-3,
        }
    }
}

impl JumpRule {
    fn threshold(&self, branch: &[CurvePoint]) -> f64 {
        match *self {
            JumpRule::Fixed(j) => j,
            JumpRule::Adaptive { factor, window, floor } => {
                if branch.len() < window.max(1) {
                    return f64::INFINITY;
                }
                let tail = &branch[branch.len() - window.max(1)..];
                let (lo, hi) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    (lo.min(p.lambda), hi.max(p.lambda))
                });
                (factor * (hi - lo)).max(floor)
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CurveMeta {
    pub grid: Option<Grid>,
    pub tolerances: Tolerances,
    /// Points that were computed but not kept on the curve.
    pub rejected: Vec<CurvePoint>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SolutionCurve {
    pub points: Vec<CurvePoint>,
    pub branches: Vec<Range<usize>>,
    pub problem: ProblemSpec,
    pub meta: CurveMeta,
}

impl SolutionCurve {
    pub fn branch(&self, i: usize) -> &[CurvePoint] {
        &self.points[self.branches[i].clone()]
    }

    pub fn branch_slices(&self) -> impl Iterator<Item = &[CurvePoint]> {
        self.branches.iter().map(|r| &self.points[r.clone()])
    }
}

/// Splits ordered points into branches by jump rule and terminal class.
pub fn split_branches(points: &[CurvePoint], rule: JumpRule) -> Vec<Range<usize>> {
    split_branches_with(points, rule, |_, _| false)
}

/// As [`split_branches`], with an extra predicate that forces a break
/// between two consecutive points.
pub fn split_branches_with<P>(points: &[CurvePoint], rule: JumpRule, extra: P) -> Vec<Range<usize>>
where
    P: Fn(&CurvePoint, &CurvePoint) -> bool,
{
    let mut branches = Vec::new();
    if points.is_empty() {
        return branches;
    }
    let mut start = 0;
    for i in 1..points.len() {
        let prev = &points[i - 1];
        let cur = &points[i];
        let jump = (cur.lambda - prev.lambda).abs();
        let broken = cur.terminal != prev.terminal || !(jump <= rule.threshold(&points[start..i])) || extra(prev, cur);
        if broken {
            branches.push(start..i);
            start = i;
        }
    }
    branches.push(start..points.len());
    branches
}

/// A turning point of λ along a branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fold {
    /// Index of the sampled extremum in `curve.points`.
    pub index: usize,
    /// Refined location from a parabola through the neighbouring points.
    pub alpha: f64,
    pub lambda: f64,
}

/// Finds sign changes of `Δλ` within each branch.
///
/// Steps with `|Δλ| <= 1e-8·max(1, |λ|)` are treated as flat and skipped so
/// that round-off on constant curves does not produce folds.
pub fn detect_folds(curve: &SolutionCurve) -> Vec<Fold> {
    let mut folds = Vec::new();
    for range in &curve.branches {
        let pts = &curve.points[range.clone()];
        if pts.len() < 3 {
            continue;
        }
        let mut last_sign = 0.0f64;
        for j in 0..pts.len() - 1 {
            let d = pts[j + 1].lambda - pts[j].lambda;
            if d.abs() <= 1e-8 * pts[j].lambda.abs().max(1.0) {
                continue;
            }
            let s = d.signum();
            if last_sign != 0.0 && s != last_sign {
                folds.push(refine_fold(pts, j, range.start));
            }
            last_sign = s;
        }
    }
    folds
}

fn refine_fold(pts: &[CurvePoint], j: usize, offset: usize) -> Fold {
    let fallback = Fold {
        index: offset + j,
        alpha: pts[j].alpha,
        lambda: pts[j].lambda,
    };
    if j == 0 || j + 1 >= pts.len() {
        return fallback;
    }
    let (x0, y0) = (pts[j - 1].alpha, pts[j - 1].lambda);
    let (x1, y1) = (pts[j].alpha, pts[j].lambda);
    let (x2, y2) = (pts[j + 1].alpha, pts[j + 1].lambda);
    // Newton divided differences of the interpolating parabola.
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let c = (d12 - d01) / (x2 - x0);
    if !(c.abs() > 0.0) || !c.is_finite() {
        return fallback;
    }
    let b = d01 - c * (x0 + x1);
    let xs = (-b / (2.0 * c)).clamp(x0.min(x2), x0.max(x2));
    let ys = y0 + d01 * (xs - x0) + c * (xs - x0) * (xs - x1);
    Fold {
        index: offset + j,
        alpha: xs,
        lambda: ys,
    }
}
