//! Shoot-and-scale for radial p-Laplace Dirichlet problems
//! `φ(u')' + ((n−1)/r) φ(u') + λ f(u) = 0`, `φ(v) = v|v|^{p−2}`.
//!
//! Two shooting routes are provided:
//!
//! * **naive**: the equation in `r`, `u'' + (n−1)/((p−1) r) u' + f(u)/((p−1)|u'|^{p−2}) = 0`,
//!   started from `u ≈ α + a₁ r^{p/(p−1)}`; the first root `ξ` gives `λ = ξ^p`.
//! * **regularized** (`p ≥ 2`): with `z = r^β̄`, `β̄ = p/(2(p−1))`, the solution
//!   is twice differentiable at `z = 0` and satisfies
//!   `a u'' + (A/z) u' + z^{p−2} f(u)/((p−1)|u'|^{p−2}) = 0`, started from
//!   `u ≈ α + a₁ z² + a₂ z⁴`; the first root `z₀` gives `λ = z₀^{2(p−1)}`.

use thiserror::Error;

use crate::model::{CurveMeta, CurvePoint, Family, Grid, ProblemSpec, SolutionCurve, Terminal};
use crate::ode::{integrate, DenseTrajectory, Direction, EventSpec, IvpSystem, Outcome, Tolerances};
use crate::shootscale::{check_grid, ShootKind, ShootResult};
use crate::sweep::{assemble, map_ordered, SweepOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizedConstants {
    pub beta_bar: f64,
    pub a: f64,
    pub big_a: f64,
    /// Coefficient of `z²` (equivalently of `r^{p/(p−1)}`) in the series.
    pub a1: f64,
    /// Coefficient of `z⁴`, when finite.
    pub a2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Regularized,
    Naive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PLaplaceOptions {
    pub mode: Mode,
    /// Start abscissa; defaults to 1e-3 in `z` or 1e-5 in `r`.
    pub h: Option<f64>,
    pub tend: f64,
    pub tolerances: Tolerances,
}

impl Default for PLaplaceOptions {
    fn default() -> Self {
        PLaplaceOptions {
            mode: Mode::Regularized,
            h: None,
            tend: 1000.0,
            tolerances: Tolerances::default(),
        }
    }
}

impl PLaplaceOptions {
    pub fn start(&self) -> f64 {
        self.h.unwrap_or(match self.mode {
            Mode::Regularized => 1e-3,
            Mode::Naive => 1e-5,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PLaplaceError {
    #[error("p must exceed 1, got {0}")]
    Exponent(f64),
    #[error("the regularized route needs p >= 2, got {0}")]
    RegularizedNeedsP2(f64),
    #[error("f(alpha) must be positive, got {0}")]
    NonPositiveSource(f64),
    #[error("alpha must be positive and finite, got {0}")]
    Alpha(f64),
    #[error("start abscissa must be positive and below tend")]
    Start,
    #[error("p-Laplace shooting needs a PLaplaceDirichlet problem with autonomous f")]
    Problem,
    #[error("invalid grid: {0}")]
    Grid(&'static str),
    #[error("integrator rejected input")]
    Integrator,
}

/// Transformation constants and series coefficients at `u(0) = α`.
pub fn regularize_constants(
    p: f64,
    n: u32,
    alpha: f64,
    f: &crate::model::Nonlinearity,
) -> Result<RegularizedConstants, PLaplaceError> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(PLaplaceError::Exponent(p));
    }
    let fa = f.value(0.0, alpha);
    if !(fa > 0.0) {
        return Err(PLaplaceError::NonPositiveSource(fa));
    }
    let nf = n as f64;
    let beta_bar = p / (2.0 * (p - 1.0));
    let a = beta_bar.powf(p);
    let big_a = beta_bar.powf(p - 1.0) * (beta_bar - 1.0) + (nf - 1.0) / (p - 1.0) * beta_bar.powf(p - 1.0);
    let a1 = -((p - 1.0) / p) * (fa / nf).powf(1.0 / (p - 1.0));
    // z² order of the regularized equation with |u'|^{p−2} expanded to first order.
    let k = 1.0 / ((p - 1.0) * (2.0 * a1).abs().powf(p - 2.0));
    let denom = 4.0 * ((p + 1.0) * a + (p - 1.0) * big_a);
    let a2 = -k * f.du(0.0, alpha) * a1 / denom;
    Ok(RegularizedConstants {
        beta_bar,
        a,
        big_a,
        a1,
        a2: a2.is_finite().then_some(a2),
    })
}

fn check_problem(problem: &ProblemSpec, alpha: f64, opts: &PLaplaceOptions) -> Result<(), PLaplaceError> {
    if problem.family != Family::PLaplaceDirichlet || !problem.nonlinearity.is_autonomous() {
        return Err(PLaplaceError::Problem);
    }
    if !(problem.p > 1.0) || !problem.p.is_finite() {
        return Err(PLaplaceError::Exponent(problem.p));
    }
    if opts.mode == Mode::Regularized && problem.p < 2.0 {
        return Err(PLaplaceError::RegularizedNeedsP2(problem.p));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(PLaplaceError::Alpha(alpha));
    }
    let h = opts.start();
    if !(h > 0.0 && h < opts.tend) {
        return Err(PLaplaceError::Start);
    }
    Ok(())
}

/// Integrates the shooting IVP (in `z` or `r` according to the mode) from
/// the series start, stopping at the first root of `u`.
pub fn plaplace_trajectory(
    problem: &ProblemSpec,
    alpha: f64,
    opts: &PLaplaceOptions,
) -> Result<DenseTrajectory, PLaplaceError> {
    check_problem(problem, alpha, opts)?;
    let p = problem.p;
    let n = problem.n as f64;
    let f = &problem.nonlinearity;
    let c = regularize_constants(p, problem.n, alpha, f)?;
    let mut h = opts.start();

    let sys = match opts.mode {
        Mode::Regularized => {
            let y0 = match c.a2 {
                Some(a2) => vec![
                    alpha + c.a1 * h * h + a2 * h.powi(4),
                    2.0 * c.a1 * h + 4.0 * a2 * h.powi(3),
                ],
                None => {
                    h /= 10.0;
                    vec![alpha + c.a1 * h * h, 2.0 * c.a1 * h]
                }
            };
            let (a, big_a) = (c.a, c.big_a);
            IvpSystem::new(
                move |z, y, dy| {
                    dy[0] = y[1];
                    let ratio = (z / y[1].abs()).powf(p - 2.0);
                    dy[1] = -(big_a / z * y[1] + f.value(0.0, y[0]) / (p - 1.0) * ratio) / a;
                },
                h,
                y0,
                opts.tend,
            )
        }
        Mode::Naive => {
            let e = p / (p - 1.0);
            let y0 = vec![alpha + c.a1 * h.powf(e), c.a1 * e * h.powf(e - 1.0)];
            IvpSystem::new(
                move |r, y, dy| {
                    dy[0] = y[1];
                    dy[1] =
                        -(n - 1.0) / ((p - 1.0) * r) * y[1] - f.value(0.0, y[0]) / (p - 1.0) * y[1].abs().powf(2.0 - p);
                },
                h,
                y0,
                opts.tend,
            )
        }
    };
    let sys = sys.with_event(EventSpec::new(|_, y| y[0], Direction::Decreasing, h));
    integrate(&sys, &opts.tolerances).map_err(|_| PLaplaceError::Integrator)
}

/// One p-Laplace shot: λ from the first root of `u`.
pub fn plaplace_shoot(problem: &ProblemSpec, alpha: f64, opts: &PLaplaceOptions) -> Result<ShootResult, PLaplaceError> {
    let traj = plaplace_trajectory(problem, alpha, opts)?;
    let p = problem.p;
    let (kind, root) = match (&traj.outcome, &traj.first_event) {
        (Outcome::Event, Some(hit)) => (ShootKind::VRoot, Some(hit)),
        (Outcome::ReachedEnd, _) => (ShootKind::NoEvent, None),
        _ => (ShootKind::IntegrationFailed, None),
    };
    let lambda = root.map(|hit| match opts.mode {
        Mode::Regularized => hit.t.powf(2.0 * (p - 1.0)),
        Mode::Naive => hit.t.powf(p),
    });
    Ok(ShootResult {
        alpha,
        r_star: root.map(|h| h.t),
        kind,
        lambda,
        v_star: root.map(|h| h.y[0]),
    })
}

/// p-Laplace solution curve over `grid`, keeping first-root points.
pub fn plaplace_curve(
    problem: &ProblemSpec,
    grid: &Grid,
    opts: &PLaplaceOptions,
    sweep_opts: &SweepOptions,
) -> Result<SolutionCurve, PLaplaceError> {
    check_grid(grid).map_err(|_| PLaplaceError::Grid("need count >= 1 and a positive step"))?;
    let values = grid.values();
    check_problem(problem, values[0], opts)?;
    let points = map_ordered(&values, sweep_opts.jobs, |alpha| {
        match plaplace_shoot(problem, alpha, opts) {
            Ok(res) => res.to_point(),
            Err(PLaplaceError::NonPositiveSource(_)) => CurvePoint::new(alpha, f64::NAN, Terminal::Degenerate),
            Err(_) => CurvePoint::new(alpha, f64::NAN, Terminal::IntegrationFailed),
        }
    });
    let mut meta = CurveMeta {
        grid: Some(*grid),
        tolerances: opts.tolerances,
        ..CurveMeta::default()
    };
    meta.notes.push(format!(
        "mode: {}",
        match opts.mode {
            Mode::Regularized => "regularized",
            Mode::Naive => "naive",
        }
    ));
    if problem.p < 2.0 {
        meta.notes
            .push("p < 2: naive route with a non-Lipschitz term at u' = 0".to_string());
    }
    Ok(assemble(
        points,
        problem.clone(),
        meta,
        sweep_opts.jump,
        |_, _| false,
        |t| t == Terminal::DirichletRoot,
    ))
}
