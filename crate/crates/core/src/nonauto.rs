//! Newton continuation in `α = u(0)` for radial problems
//! `u'' + ((n−1)/r) u' + λ f(r, u) = 0`, `u'(0) = 0`, `u(1) = 0`.
//!
//! For fixed α, `F(λ) = u(1; λ, α)` is solved by Newton's method with the
//! exact derivative `F'(λ) = u_λ(1)` from the variational equation
//! `u_λ'' + ((n−1)/r) u_λ' + λ f_u u_λ + f = 0`. The previous grid point
//! supplies the starting λ.

use thiserror::Error;

use crate::model::{
    CurveMeta, CurvePoint, Family, Grid, NewtonIterate, NewtonReport, Nonlinearity, ProblemSpec, SolutionCurve,
    Terminal,
};
use crate::ode::{integrate, DenseTrajectory, Direction, EventSpec, IvpSystem, Outcome, Tolerances};
use crate::quadrature::{self, DEFAULT_PANELS};
use crate::shootscale::{check_grid, series_start};
use crate::sweep::assemble;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Convergence when `|F| <= tol_factor · max(1, α)`.
    pub tol_factor: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
    /// Start radius of the series-initialized integrations.
    pub epsilon: f64,
    pub tolerances: Tolerances,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol_factor: 1e-10,
            max_iter: 25,
            max_halvings: 8,
            epsilon: 1e-8,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NonautoError {
    #[error("needs a radial second-order problem (dirichlet, neumann or nonauto)")]
    Problem,
    #[error("alpha must be positive and finite, got {0}")]
    Alpha(f64),
    #[error("lambda must be finite, got {0}")]
    Lambda(f64),
    #[error("integration failed at r = {0}")]
    Integration(f64),
    #[error("Newton did not converge after {} step(s)", .0.steps)]
    NewtonFailed(NewtonReport),
    #[error("F'(lambda) vanishes at lambda = {lambda}")]
    SingularDerivative { lambda: f64, report: NewtonReport },
    #[error("first grid point failed: {0}")]
    FirstPoint(Box<NonautoError>),
    #[error("no starting lambda: {0}")]
    Bootstrap(&'static str),
    #[error("invalid grid: {0}")]
    Grid(&'static str),
}

fn check(problem: &ProblemSpec, lambda: f64, alpha: f64) -> Result<(), NonautoError> {
    let ok = matches!(
        problem.family,
        Family::NonAutonomousRadial | Family::RadialDirichlet | Family::RadialNeumann
    ) && problem.n >= 1;
    if !ok {
        return Err(NonautoError::Problem);
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(NonautoError::Alpha(alpha));
    }
    if !lambda.is_finite() {
        return Err(NonautoError::Lambda(lambda));
    }
    Ok(())
}

fn failure_time(traj: &DenseTrajectory) -> Option<f64> {
    traj.outcome.is_failure().then(|| traj.t_final())
}

/// Solution of the IVP with `u(0) = α`, `u'(0) = 0` on `[ε, 1]`.
pub fn ivp_at(
    problem: &ProblemSpec,
    lambda: f64,
    alpha: f64,
    opts: &NewtonOptions,
) -> Result<DenseTrajectory, NonautoError> {
    check(problem, lambda, alpha)?;
    let f = &problem.nonlinearity;
    let k = (problem.n - 1) as f64;
    let eps = opts.epsilon;
    let start = series_start(problem.n, alpha, lambda * f.value(0.0, alpha), eps);
    let sys = IvpSystem::new(
        move |r, y, dy| {
            dy[0] = y[1];
            dy[1] = -k / r * y[1] - lambda * f.value(r, y[0]);
        },
        eps,
        start.to_vec(),
        1.0,
    );
    let traj = integrate(&sys, &opts.tolerances).map_err(|_| NonautoError::Integration(eps))?;
    match failure_time(&traj) {
        Some(t) => Err(NonautoError::Integration(t)),
        None => Ok(traj),
    }
}

/// Solution `u_λ` of the variational equation along `u` on `[ε, 1]`.
pub fn variational_at(
    problem: &ProblemSpec,
    lambda: f64,
    alpha: f64,
    u: &DenseTrajectory,
    opts: &NewtonOptions,
) -> Result<DenseTrajectory, NonautoError> {
    check(problem, lambda, alpha)?;
    let f = &problem.nonlinearity;
    let k = (problem.n - 1) as f64;
    let eps = opts.epsilon;
    // λ-derivative of the series start.
    let start = series_start(problem.n, 0.0, f.value(0.0, alpha), eps);
    let sys = IvpSystem::new(
        move |r, y, dy| {
            let mut ur = [0.0; 2];
            u.evaluate_into(r, &mut ur);
            dy[0] = y[1];
            dy[1] = -k / r * y[1] - lambda * f.du(r, ur[0]) * y[0] - f.value(r, ur[0]);
        },
        eps,
        start.to_vec(),
        1.0,
    );
    let traj = integrate(&sys, &opts.tolerances).map_err(|_| NonautoError::Integration(eps))?;
    match failure_time(&traj) {
        Some(t) => Err(NonautoError::Integration(t)),
        None => Ok(traj),
    }
}

/// `(F, F')` from one joint integration of the IVP and its variation.
fn residual_and_derivative(
    problem: &ProblemSpec,
    lambda: f64,
    alpha: f64,
    opts: &NewtonOptions,
) -> Result<(f64, f64), NonautoError> {
    let f = &problem.nonlinearity;
    let k = (problem.n - 1) as f64;
    let eps = opts.epsilon;
    let fa = f.value(0.0, alpha);
    let u0 = series_start(problem.n, alpha, lambda * fa, eps);
    let w0 = series_start(problem.n, 0.0, fa, eps);
    let sys = IvpSystem::new(
        move |r, y, dy| {
            let fv = f.value(r, y[0]);
            dy[0] = y[1];
            dy[1] = -k / r * y[1] - lambda * fv;
            dy[2] = y[3];
            dy[3] = -k / r * y[3] - lambda * f.du(r, y[0]) * y[2] - fv;
        },
        eps,
        vec![u0[0], u0[1], w0[0], w0[1]],
        1.0,
    );
    let traj = integrate(&sys, &opts.tolerances).map_err(|_| NonautoError::Integration(eps))?;
    if let Some(t) = failure_time(&traj) {
        return Err(NonautoError::Integration(t));
    }
    let y = traj.final_state();
    Ok((y[0], y[2]))
}

fn kernel(n: u32, s: f64) -> f64 {
    if n == 2 {
        s * s.ln()
    } else {
        (s.powi(n as i32 - 2) - 1.0) * s / (n as f64 - 2.0)
    }
}

/// `∫₀¹ K_n(s) h(s) ds` after the substitution `s = t²`, which smooths the
/// logarithmic kernel at the origin.
fn kernel_quadrature<H: Fn(f64) -> f64>(n: u32, h: H) -> f64 {
    quadrature::integrate(
        |t| {
            let s = t * t;
            2.0 * t * kernel(n, s) * h(s)
        },
        0.0,
        1.0,
        DEFAULT_PANELS,
    )
}

/// `F(λ) = u(1)` through the integral representation
/// `u(1) = α + λ ∫₀¹ K_n(s) f(s, u(s)) ds` with `K_n(s) = s (s^{n−2} − 1)/(n−2)`,
/// and `K_2(s) = s ln s`, evaluated by Gauss–Legendre quadrature on `u`.
pub fn residual_integral(problem: &ProblemSpec, lambda: f64, alpha: f64, u: &DenseTrajectory) -> f64 {
    let f = &problem.nonlinearity;
    alpha + lambda * kernel_quadrature(problem.n, |s| f.value(s, u.evaluate(s)[0]))
}

/// `F'(λ) = u_λ(1)` through the same representation applied to the
/// variational equation.
pub fn derivative_integral(problem: &ProblemSpec, lambda: f64, u: &DenseTrajectory, w: &DenseTrajectory) -> f64 {
    let f = &problem.nonlinearity;
    kernel_quadrature(problem.n, |s| {
        let us = u.evaluate(s)[0];
        f.value(s, us) + lambda * f.du(s, us) * w.evaluate(s)[0]
    })
}

/// Newton's method on `F(λ) = u(1)` at fixed α, with step halving when
/// `|F|` fails to decrease.
pub fn newton_lambda(
    problem: &ProblemSpec,
    alpha: f64,
    lambda0: f64,
    opts: &NewtonOptions,
) -> Result<(f64, NewtonReport), NonautoError> {
    check(problem, lambda0, alpha)?;
    let tol = opts.tol_factor * alpha.max(1.0);
    let mut report = NewtonReport::default();
    let mut lambda = lambda0;
    let (mut fval, mut dval) = residual_and_derivative(problem, lambda, alpha, opts)?;
    report.iterates.push(NewtonIterate {
        lambda,
        beta: None,
        residual: fval.abs(),
        step: 0.0,
    });
    loop {
        if fval.abs() <= tol {
            report.converged = true;
            return Ok((lambda, report));
        }
        if report.steps >= opts.max_iter {
            return Err(NonautoError::NewtonFailed(report));
        }
        if !(dval.abs() >= 1e-14) {
            return Err(NonautoError::SingularDerivative { lambda, report });
        }
        let full = -fval / dval;
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial = lambda + t * full;
            if let Ok((ft, dt)) = residual_and_derivative(problem, trial, alpha, opts) {
                if ft.abs() < fval.abs() {
                    accepted = Some((trial, ft, dt));
                    break;
                }
            }
            t *= 0.5;
        }
        report.steps += 1;
        match accepted {
            Some((l, ft, dt)) => {
                report.iterates.push(NewtonIterate {
                    lambda: l,
                    beta: None,
                    residual: ft.abs(),
                    step: (l - lambda).abs(),
                });
                lambda = l;
                fval = ft;
                dval = dt;
            }
            None => return Err(NonautoError::NewtonFailed(report)),
        }
    }
}

/// λ from an autonomous shoot-and-scale pass on `f(0, ·)`; used to seed
/// the first grid point when no λ is given.
pub fn bootstrap_lambda(problem: &ProblemSpec, alpha: f64, opts: &NewtonOptions) -> Result<f64, NonautoError> {
    let f = &problem.nonlinearity;
    let fa = f.value(0.0, alpha);
    if !(fa > 0.0) {
        return Err(NonautoError::Bootstrap("f(0, alpha) must be positive"));
    }
    let k = (problem.n - 1) as f64;
    let eps = opts.epsilon;
    let sys = IvpSystem::new(
        move |r, y, dy| {
            dy[0] = y[1];
            dy[1] = -k / r * y[1] - f.value(0.0, y[0]);
        },
        eps,
        series_start(problem.n, alpha, fa, eps).to_vec(),
        1000.0,
    )
    .with_event(EventSpec::new(|_, y| y[0], Direction::Decreasing, eps));
    let traj = integrate(&sys, &opts.tolerances).map_err(|_| NonautoError::Bootstrap("integration failed"))?;
    match (traj.outcome, traj.first_event) {
        (Outcome::Event, Some(hit)) => Ok(hit.t * hit.t),
        _ => Err(NonautoError::Bootstrap("autonomous shot found no root")),
    }
}

/// Checks `f_r(r, u) <= 0` on `r ∈ [0, 1]` and `u` in `[u_lo, u_hi]`.
pub fn radially_decreasing(f: &Nonlinearity, u_lo: f64, u_hi: f64) -> bool {
    (0..=20).all(|i| {
        let r = i as f64 / 20.0;
        (0..=20).all(|j| {
            let u = u_lo + (u_hi - u_lo) * j as f64 / 20.0;
            f.ds(r, u) <= 1e-12 * f.value(r, u).abs().max(1.0)
        })
    })
}

/// Sequential warm-started sweep over `grid`.
///
/// A failed point is recorded and skipped; the next point starts from the
/// last converged λ. Only a failure at the first point aborts.
pub fn continue_in_alpha(
    problem: &ProblemSpec,
    grid: &Grid,
    lambda_init: Option<f64>,
    opts: &NewtonOptions,
    jump: crate::model::JumpRule,
) -> Result<SolutionCurve, NonautoError> {
    check_grid(grid).map_err(|_| NonautoError::Grid("need count >= 1 and a positive step"))?;
    let values = grid.values();
    let first = values[0];
    let mut lambda = match lambda_init {
        Some(l) => l,
        None => bootstrap_lambda(problem, first, opts)?,
    };
    let mut points = Vec::with_capacity(values.len());
    for (i, &alpha) in values.iter().enumerate() {
        match newton_lambda(problem, alpha, lambda, opts) {
            Ok((l, report)) => {
                lambda = l;
                let mut pt = CurvePoint::new(alpha, l, Terminal::Converged);
                pt.newton = Some(report);
                points.push(pt);
            }
            Err(err) if i == 0 => return Err(NonautoError::FirstPoint(Box::new(err))),
            Err(err) => {
                let mut pt = CurvePoint::new(alpha, f64::NAN, Terminal::NewtonFailed);
                pt.newton = match err {
                    NonautoError::NewtonFailed(r) | NonautoError::SingularDerivative { report: r, .. } => Some(r),
                    _ => None,
                };
                points.push(pt);
            }
        }
    }

    let mut meta = CurveMeta {
        grid: Some(*grid),
        tolerances: opts.tolerances,
        ..CurveMeta::default()
    };
    let f = &problem.nonlinearity;
    if !f.is_autonomous() && !radially_decreasing(f, 0.0, values[values.len() - 1]) {
        meta.notes
            .push("warning: f_r(r, u) > 0 somewhere; radial monotonicity of solutions is not guaranteed".into());
    }
    if problem.n > 1 && !f.is_autonomous() {
        meta.notes
            .push("u(0) is not known to be a global parameter for n > 1; solutions off this curve may exist".into());
    }
    Ok(assemble(
        points,
        problem.clone(),
        meta,
        jump,
        |_, _| false,
        |t| t == Terminal::Converged,
    ))
}
