//! Newton continuation for the clamped beam
//! `u'''' = λ f(x, u)` on `(−1, 1)`, `u(±1) = u'(±1) = 0`.
//!
//! Even solutions are computed on `[0, 1]` from `u(0) = α`, `u'(0) = 0`,
//! `u''(0) = β`, `u'''(0) = 0`. For each α, the pair `(λ, β)` solves
//! `F = u(1) = 0`, `G = u'(1) = 0` by Newton's method with the exact
//! Jacobian from the variational equations in λ and β.

use thiserror::Error;

use crate::model::{
    CurveMeta, CurvePoint, Family, Grid, JumpRule, NewtonIterate, NewtonReport, Nonlinearity, ProblemSpec,
    SolutionCurve, Terminal,
};
use crate::ode::{integrate, DenseTrajectory, IvpSystem, Tolerances};
use crate::quadrature::{self, DEFAULT_PANELS};
use crate::shootscale::check_grid;
use crate::sweep::assemble;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamOptions {
    /// Convergence when `max(|F|, |G|) <= tol_factor · max(1, α)`.
    pub tol_factor: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
    pub tolerances: Tolerances,
}

impl Default for BeamOptions {
    fn default() -> Self {
        BeamOptions {
            tol_factor: 1e-10,
            max_iter: 25,
            max_halvings: 8,
            tolerances: Tolerances::default(),
        }
    }
}

/// Row-major 2×2 matrix `((F_λ, F_β), (G_λ, G_β))`.
pub type Jacobian = [[f64; 2]; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct BeamState {
    pub alpha: f64,
    pub lambda: f64,
    pub beta: f64,
    pub jacobian: Jacobian,
    pub report: NewtonReport,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeamError {
    #[error("alpha must be positive and finite, got {0}")]
    Alpha(f64),
    #[error("start (lambda, beta) must be finite")]
    Start,
    #[error("integration failed at x = {0}")]
    Integration(f64),
    #[error("singular Jacobian (det = {det:e})")]
    SingularJacobian { det: f64, report: NewtonReport },
    #[error("Newton did not converge after {} step(s)", .0.steps)]
    NewtonFailed(NewtonReport),
    #[error("first grid point failed: {0}")]
    FirstPoint(Box<BeamError>),
    #[error("invalid grid: {0}")]
    Grid(&'static str),
    #[error("beam continuation needs a ClampedBeam problem")]
    Problem,
}

fn run(sys: &IvpSystem<'_>, tol: &Tolerances) -> Result<DenseTrajectory, BeamError> {
    let traj = integrate(sys, tol).map_err(|_| BeamError::Integration(0.0))?;
    if traj.outcome.is_failure() {
        return Err(BeamError::Integration(traj.t_final()));
    }
    Ok(traj)
}

/// Solution of the beam IVP on `[0, 1]` as a first-order 4-system.
pub fn beam_ivp(
    lambda: f64,
    beta: f64,
    alpha: f64,
    f: &Nonlinearity,
    tol: &Tolerances,
) -> Result<DenseTrajectory, BeamError> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(BeamError::Alpha(alpha));
    }
    let sys = IvpSystem::new(
        move |x, y, dy| {
            dy[0] = y[1];
            dy[1] = y[2];
            dy[2] = y[3];
            dy[3] = lambda * f.value(x, y[0]);
        },
        0.0,
        vec![alpha, 0.0, beta, 0.0],
        1.0,
    );
    run(&sys, tol)
}

/// `(F, G) = (u(1), u'(1))`.
pub fn beam_residual(
    lambda: f64,
    beta: f64,
    alpha: f64,
    f: &Nonlinearity,
    tol: &Tolerances,
) -> Result<(f64, f64), BeamError> {
    let y = beam_ivp(lambda, beta, alpha, f, tol)?.final_state();
    Ok((y[0], y[1]))
}

/// `(F, G)` from the representation
/// `u(x) = α + βx²/2 + λ ∫₀ˣ (x−t)³/6 f(t, u(t)) dt` evaluated by quadrature.
pub fn beam_residual_integral(lambda: f64, beta: f64, alpha: f64, f: &Nonlinearity, u: &DenseTrajectory) -> (f64, f64) {
    let (nodes, weights) = quadrature::gauss_legendre_rule(0.0, 1.0, DEFAULT_PANELS);
    let mut i3 = 0.0;
    let mut i2 = 0.0;
    for (&t, &w) in nodes.iter().zip(&weights) {
        let ft = f.value(t, u.evaluate(t)[0]);
        let s = 1.0 - t;
        i3 += w * s * s * s / 6.0 * ft;
        i2 += w * s * s / 2.0 * ft;
    }
    (alpha + 0.5 * beta + lambda * i3, beta + lambda * i2)
}

/// Jacobian of `(F, G)` in `(λ, β)` from the variational IVPs along `u`.
pub fn beam_jacobian(
    lambda: f64,
    _beta: f64,
    _alpha: f64,
    f: &Nonlinearity,
    u: &DenseTrajectory,
    tol: &Tolerances,
) -> Result<Jacobian, BeamError> {
    let sys = IvpSystem::new(
        move |x, y, dy| {
            let mut uy = [0.0; 4];
            u.evaluate_into(x, &mut uy);
            let fu = f.du(x, uy[0]);
            dy[0] = y[1];
            dy[1] = y[2];
            dy[2] = y[3];
            dy[3] = f.value(x, uy[0]) + lambda * fu * y[0];
            dy[4] = y[5];
            dy[5] = y[6];
            dy[6] = y[7];
            dy[7] = lambda * fu * y[4];
        },
        0.0,
        vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        1.0,
    );
    let y = run(&sys, tol)?.final_state();
    Ok([[y[0], y[4]], [y[1], y[5]]])
}

/// `(F, G)` and the Jacobian from one joint 12-dimensional integration.
fn joint(
    lambda: f64,
    beta: f64,
    alpha: f64,
    f: &Nonlinearity,
    tol: &Tolerances,
) -> Result<((f64, f64), Jacobian), BeamError> {
    let sys = IvpSystem::new(
        move |x, y, dy| {
            let fv = f.value(x, y[0]);
            let fu = f.du(x, y[0]);
            dy[0..3].copy_from_slice(&y[1..4]);
            dy[4..7].copy_from_slice(&y[5..8]);
            dy[8..11].copy_from_slice(&y[9..12]);
            dy[3] = lambda * fv;
            dy[7] = fv + lambda * fu * y[4];
            dy[11] = lambda * fu * y[8];
        },
        0.0,
        vec![alpha, 0.0, beta, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        1.0,
    );
    let y = run(&sys, tol)?.final_state();
    Ok(((y[0], y[1]), [[y[4], y[8]], [y[5], y[9]]]))
}

fn det(j: &Jacobian) -> f64 {
    j[0][0] * j[1][1] - j[0][1] * j[1][0]
}

/// Full Newton on `(F, G)` with step halving, starting from `(λ₀, β₀)`.
pub fn beam_newton(
    alpha: f64,
    start: (f64, f64),
    f: &Nonlinearity,
    opts: &BeamOptions,
) -> Result<BeamState, BeamError> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(BeamError::Alpha(alpha));
    }
    if !start.0.is_finite() || !start.1.is_finite() {
        return Err(BeamError::Start);
    }
    let tol = opts.tol_factor * alpha.max(1.0);
    let norm = |r: (f64, f64)| r.0.abs().max(r.1.abs());
    let (mut lambda, mut beta) = start;
    let (mut res, mut jac) = joint(lambda, beta, alpha, f, &opts.tolerances)?;
    let mut report = NewtonReport::default();
    report.iterates.push(NewtonIterate {
        lambda,
        beta: Some(beta),
        residual: norm(res),
        step: 0.0,
    });
    loop {
        if norm(res) <= tol {
            report.converged = true;
            return Ok(BeamState {
                alpha,
                lambda,
                beta,
                jacobian: jac,
                report,
            });
        }
        if report.steps >= opts.max_iter {
            return Err(BeamError::NewtonFailed(report));
        }
        let d = det(&jac);
        if !(d.abs() > 1e-14) {
            return Err(BeamError::SingularJacobian { det: d, report });
        }
        // Solve J·δ = −(F, G) by Cramer's rule.
        let dl = (-res.0 * jac[1][1] + res.1 * jac[0][1]) / d;
        let db = (-res.1 * jac[0][0] + res.0 * jac[1][0]) / d;
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let (l, b) = (lambda + t * dl, beta + t * db);
            if let Ok((r, j)) = joint(l, b, alpha, f, &opts.tolerances) {
                if norm(r) < norm(res) {
                    accepted = Some((l, b, r, j));
                    break;
                }
            }
            t *= 0.5;
        }
        report.steps += 1;
        match accepted {
            Some((l, b, r, j)) => {
                report.iterates.push(NewtonIterate {
                    lambda: l,
                    beta: Some(b),
                    residual: norm(r),
                    step: (l - lambda).hypot(b - beta),
                });
                lambda = l;
                beta = b;
                res = r;
                jac = j;
            }
            None => return Err(BeamError::NewtonFailed(report)),
        }
    }
}

/// Small-α seed `(24α/f(0), −4α)`, exact for constant `f`.
pub fn bootstrap_start(alpha: f64, f: &Nonlinearity) -> (f64, f64) {
    (24.0 * alpha / f.value(0.0, 0.0), -4.0 * alpha)
}

/// Sequential warm-started sweep over `grid` storing `(α, λ, β)`.
pub fn beam_curve(
    problem: &ProblemSpec,
    grid: &Grid,
    start: Option<(f64, f64)>,
    opts: &BeamOptions,
    jump: JumpRule,
) -> Result<SolutionCurve, BeamError> {
    if problem.family != Family::ClampedBeam {
        return Err(BeamError::Problem);
    }
    check_grid(grid).map_err(|_| BeamError::Grid("need count >= 1 and a positive step"))?;
    let f = &problem.nonlinearity;
    let values = grid.values();
    let mut guess = start.unwrap_or_else(|| bootstrap_start(values[0], f));
    let mut points = Vec::with_capacity(values.len());
    let mut positive_beta = 0usize;
    for (i, &alpha) in values.iter().enumerate() {
        match beam_newton(alpha, guess, f, opts) {
            Ok(state) => {
                guess = (state.lambda, state.beta);
                if state.beta > 0.0 {
                    positive_beta += 1;
                }
                let mut pt = CurvePoint::new(alpha, state.lambda, Terminal::Converged);
                pt.beta = Some(state.beta);
                pt.newton = Some(state.report);
                points.push(pt);
            }
            Err(err) if i == 0 => return Err(BeamError::FirstPoint(Box::new(err))),
            Err(err) => {
                let mut pt = CurvePoint::new(alpha, f64::NAN, Terminal::NewtonFailed);
                pt.newton = match err {
                    BeamError::NewtonFailed(r) | BeamError::SingularJacobian { report: r, .. } => Some(r),
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
    if positive_beta > 0 {
        meta.notes
            .push(format!("warning: u''(0) > 0 at {positive_beta} point(s)"));
    }
    if !f.is_autonomous() {
        meta.notes
            .push("f depends on x: u(0) is not known to be a global parameter here".into());
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
