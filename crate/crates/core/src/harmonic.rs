//! Continuation in a Fourier harmonic for
//! `u'' + f(u) = μ sin(kx) + e(x)` on `(0, π)`, `u(0) = u(π) = 0`.
//!
//! Solutions are parameterized by `ξ = ∫₀^π u sin(kx) dx`, with the forcing
//! amplitude μ as the unknown. Each Newton step solves the linear problem
//! `u'' + a(x) u = μ sin(kx) + g(x)` under the same harmonic constraint,
//! with `a = f'(uₙ)` and `g = −f(uₙ) + f'(uₙ) uₙ + e`.

use std::sync::Arc;

use thiserror::Error;

use crate::model::{
    CurveMeta, CurvePoint, Family, Grid, JumpRule, NewtonIterate, NewtonReport, ProblemSpec, SolutionCurve, Terminal,
};
use crate::ode::{integrate, DenseTrajectory, IvpSystem, Tolerances};
use crate::quadrature::{gauss_legendre_rule, DEFAULT_PANELS};
use crate::roots::illinois;
use crate::sweep::assemble;

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicOptions {
    /// Newton steps taken before the residual check.
    pub newton_steps: usize,
    /// Hard cap on Newton steps when the residual check fails.
    pub max_steps: usize,
    /// Sampled BVP residual accepted at a point.
    pub residual_tol: f64,
    /// Number of residual samples on `[0, π]`.
    pub samples: usize,
    /// Gauss–Legendre panels for the harmonic integrals.
    pub panels: usize,
    /// Target `|μ|` when refining roots of `μ(ξ)`.
    pub mu_tol: f64,
    pub tolerances: Tolerances,
}

impl Default for HarmonicOptions {
    fn default() -> Self {
        HarmonicOptions {
            newton_steps: 3,
            max_steps: 10,
            residual_tol: 1e-7,
            samples: 201,
            panels: DEFAULT_PANELS,
            mu_tol: 1e-9,
            tolerances: Tolerances::default(),
        }
    }
}

/// How each grid point's Newton iteration is started.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WarmStart {
    /// Previous accepted solution; `ξ sin(kx)` at the first point.
    Previous,
    /// `amplitude · sin(kx)` at every point.
    FixedSine { amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarmonicError {
    #[error("singular linear system (det = {det:e}); the linearized operator is resonant")]
    SingularSystem { det: f64 },
    #[error("integration failed at x = {0}")]
    Integration(f64),
    #[error("Newton did not reach the residual tolerance after {} step(s)", .0.steps)]
    NewtonFailed(NewtonReport),
    #[error("harmonic continuation needs a HarmonicForced problem with k in {{1, 2}}")]
    Problem,
    #[error("invalid grid: {0}")]
    Grid(&'static str),
}

/// A solution `u = μY₁ + Y₂ + c₁u₁` of the linear (or converged nonlinear)
/// problem, with `Y₁`, `Y₂`, `u₁` stored in one dense trajectory.
#[derive(Debug, Clone)]
pub struct HarmonicSolution {
    pub xi: f64,
    pub mu: f64,
    pub c1: f64,
    pub k: u32,
    pub uprime0: f64,
    basis: Arc<DenseTrajectory>,
}

impl HarmonicSolution {
    pub fn u(&self, x: f64) -> f64 {
        let mut y = [0.0; 6];
        self.basis.evaluate_into(x, &mut y);
        self.mu * y[0] + y[2] + self.c1 * y[4]
    }

    pub fn du(&self, x: f64) -> f64 {
        let mut y = [0.0; 6];
        self.basis.evaluate_into(x, &mut y);
        self.mu * y[1] + y[3] + self.c1 * y[5]
    }

    /// Trajectory of `(Y₁, Y₁', Y₂, Y₂', u₁, u₁')` on `[0, π]`.
    pub fn trajectory(&self) -> &DenseTrajectory {
        &self.basis
    }

    /// `∫₀^π u sin(kx) dx` with the given number of panels.
    pub fn harmonic(&self, panels: usize) -> f64 {
        let (nodes, weights) = gauss_legendre_rule(0.0, PI, panels);
        let k = self.k as f64;
        nodes
            .iter()
            .zip(&weights)
            .map(|(&x, &w)| w * self.u(x) * (k * x).sin())
            .sum()
    }

    /// Sampled `‖u'' + f(u) − μ sin(kx) − e‖_∞`, with `u''` from the
    /// linear equation that produced this solution around `prev`.
    fn linearization_residual(&self, problem: &ProblemSpec, prev: &Guess, samples: usize) -> f64 {
        let f = &problem.nonlinearity;
        (0..samples)
            .map(|j| {
                let x = PI * j as f64 / (samples - 1) as f64;
                let u = self.u(x);
                let un = prev.eval(x);
                (f.value(0.0, u) - f.value(0.0, un) - f.du(0.0, un) * (u - un)).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn check_k(k: u32) -> Result<f64, HarmonicError> {
    match k {
        1 | 2 => Ok(k as f64),
        _ => Err(HarmonicError::Problem),
    }
}

/// Solves `u'' + a(x) u = μ sin(kx) + g(x)`, `u(0) = u(π) = 0`,
/// `∫₀^π u sin(kx) dx = ξ` for `(u, μ)`.
pub fn linear_solve<A, G>(
    a: A,
    g: G,
    xi: f64,
    k: u32,
    opts: &HarmonicOptions,
) -> Result<HarmonicSolution, HarmonicError>
where
    A: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let kf = check_k(k)?;
    let sys = IvpSystem::new(
        |x, y, dy| {
            let ax = a(x);
            dy[0] = y[1];
            dy[1] = (kf * x).sin() - ax * y[0];
            dy[2] = y[3];
            dy[3] = g(x) - ax * y[2];
            dy[4] = y[5];
            dy[5] = -ax * y[4];
        },
        0.0,
        vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0],
        PI,
    );
    let traj = integrate(&sys, &opts.tolerances).map_err(|_| HarmonicError::Integration(0.0))?;
    if traj.outcome.is_failure() {
        return Err(HarmonicError::Integration(traj.t_final()));
    }
    let end = traj.final_state();
    let (nodes, weights) = gauss_legendre_rule(0.0, PI, opts.panels);
    let mut ints = [0.0; 3];
    let mut sup = [0.0f64; 2];
    let mut y = [0.0; 6];
    for (&x, &w) in nodes.iter().zip(&weights) {
        traj.evaluate_into(x, &mut y);
        sup[0] = sup[0].max(y[0].abs());
        sup[1] = sup[1].max(y[4].abs());
        let s = w * (kf * x).sin();
        ints[0] += s * y[0];
        ints[1] += s * y[2];
        ints[2] += s * y[4];
    }
    // μ Y₁(π) + c₁ u₁(π) = −Y₂(π);  μ I₁ + c₁ I₃ = ξ − I₂.
    let det = end[0] * ints[2] - end[4] * ints[0];
    // Columns scaled by the size of Y₁ and u₁ on the interval, so that a
    // resonant pair with Y₁(π) ≈ u₁(π) ≈ 0 still counts as singular.
    let scale = (sup[0] + sup[1]) * (ints[0].abs() + ints[2].abs());
    if !(det.abs() > 1e-9 * scale.max(f64::MIN_POSITIVE)) {
        return Err(HarmonicError::SingularSystem { det });
    }
    let r1 = -end[2];
    let r2 = xi - ints[1];
    let mu = (r1 * ints[2] - end[4] * r2) / det;
    let c1 = (end[0] * r2 - ints[0] * r1) / det;
    Ok(HarmonicSolution {
        xi,
        mu,
        c1,
        k,
        uprime0: mu + 1.0 + c1,
        basis: Arc::new(traj),
    })
}

/// Current Newton iterate: an explicit sine seed or a previous solution.
#[derive(Debug, Clone)]
enum Guess {
    Sine { amplitude: f64, k: f64 },
    Solution(HarmonicSolution),
}

impl Guess {
    fn eval(&self, x: f64) -> f64 {
        match self {
            Guess::Sine { amplitude, k } => amplitude * (k * x).sin(),
            Guess::Solution(s) => s.u(x),
        }
    }
}

fn forcing(problem: &ProblemSpec) -> impl Fn(f64) -> f64 + '_ {
    move |x| problem.forcing.as_ref().map_or(0.0, |e| e.value(x, 0.0))
}

fn check_problem(problem: &ProblemSpec) -> Result<(), HarmonicError> {
    if problem.family != Family::HarmonicForced || !problem.nonlinearity.is_autonomous() {
        return Err(HarmonicError::Problem);
    }
    check_k(problem.harmonic_index).map(|_| ())
}

/// Newton iteration at fixed ξ from `seed`.
fn newton_at(
    problem: &ProblemSpec,
    xi: f64,
    seed: Guess,
    opts: &HarmonicOptions,
) -> Result<(HarmonicSolution, NewtonReport), HarmonicError> {
    let f = &problem.nonlinearity;
    let e = forcing(problem);
    let k = problem.harmonic_index;
    let mut guess = seed;
    let mut report = NewtonReport::default();
    let mut last_mu: Option<f64> = None;
    let max_steps = opts.max_steps.max(opts.newton_steps).max(1);
    for step in 1..=max_steps {
        let un = &guess;
        let sol = linear_solve(
            |x| f.du(0.0, un.eval(x)),
            |x| {
                let u = un.eval(x);
                -f.value(0.0, u) + f.du(0.0, u) * u + e(x)
            },
            xi,
            k,
            opts,
        )?;
        let residual = sol.linearization_residual(problem, un, opts.samples);
        report.steps = step;
        report.iterates.push(NewtonIterate {
            lambda: sol.mu,
            beta: None,
            residual,
            step: last_mu.map_or(0.0, |m| (sol.mu - m).abs()),
        });
        last_mu = Some(sol.mu);
        if step >= opts.newton_steps && residual <= opts.residual_tol {
            report.converged = true;
            return Ok((sol, report));
        }
        guess = Guess::Solution(sol);
    }
    Err(HarmonicError::NewtonFailed(report))
}

/// Solves at one ξ, warm-started from `seed` (or `ξ sin(kx)` when absent).
pub fn solve_at(
    problem: &ProblemSpec,
    xi: f64,
    seed: Option<&HarmonicSolution>,
    opts: &HarmonicOptions,
) -> Result<(HarmonicSolution, NewtonReport), HarmonicError> {
    check_problem(problem)?;
    let guess = match seed {
        Some(s) => Guess::Solution(s.clone()),
        None => Guess::Sine {
            amplitude: xi,
            k: problem.harmonic_index as f64,
        },
    };
    newton_at(problem, xi, guess, opts)
}

/// A harmonic curve: the `(ξ, μ)` points and the solution at each point.
#[derive(Debug, Clone)]
pub struct HarmonicCurve {
    pub curve: SolutionCurve,
    /// Solutions aligned with `curve.points`.
    pub solutions: Vec<HarmonicSolution>,
}

/// Sweeps `ξ = start + i·step`, `i = 1..=count` (negative steps allowed).
pub fn continue_in_xi(
    problem: &ProblemSpec,
    grid: &Grid,
    strategy: WarmStart,
    opts: &HarmonicOptions,
    jump: JumpRule,
) -> Result<HarmonicCurve, HarmonicError> {
    check_problem(problem)?;
    if grid.count < 1 || grid.step == 0.0 || !grid.step.is_finite() || !grid.start.is_finite() {
        return Err(HarmonicError::Grid("need count >= 1 and a nonzero step"));
    }
    let k = problem.harmonic_index as f64;
    let mut points = Vec::with_capacity(grid.count);
    let mut all_solutions = Vec::with_capacity(grid.count);
    let mut previous: Option<HarmonicSolution> = None;
    for xi in grid.values() {
        let seed = match (strategy, &previous) {
            (WarmStart::Previous, Some(prev)) => Guess::Solution(prev.clone()),
            (WarmStart::Previous, None) => Guess::Sine { amplitude: xi, k },
            (WarmStart::FixedSine { amplitude }, _) => Guess::Sine { amplitude, k },
        };
        match newton_at(problem, xi, seed, opts) {
            Ok((sol, report)) => {
                let mut pt = CurvePoint::new(xi, sol.mu, Terminal::Converged);
                pt.uprime0 = Some(sol.uprime0);
                pt.newton = Some(report);
                points.push(pt);
                previous = Some(sol.clone());
                all_solutions.push(Some(sol));
            }
            Err(err) => {
                let mut pt = CurvePoint::new(xi, f64::NAN, Terminal::NewtonFailed);
                if let HarmonicError::NewtonFailed(report) = err {
                    pt.newton = Some(report);
                }
                points.push(pt);
                all_solutions.push(None);
            }
        }
    }
    let meta = CurveMeta {
        grid: Some(*grid),
        tolerances: opts.tolerances,
        ..CurveMeta::default()
    };
    let curve = assemble(
        points,
        problem.clone(),
        meta,
        jump,
        |_, _| false,
        |t| t == Terminal::Converged,
    );
    let solutions = all_solutions.into_iter().flatten().collect();
    Ok(HarmonicCurve { curve, solutions })
}

/// A solution of the unforced-amplitude problem (`μ = 0`).
#[derive(Debug, Clone)]
pub struct HarmonicRoot {
    pub xi: f64,
    pub solution: HarmonicSolution,
    pub uprime0: f64,
}

/// Locates zeros of `μ(ξ)` within each branch of `curve`.
///
/// Grid points with `|μ| <= mu_tol` count as roots directly; sign changes
/// between neighbours are refined by regula falsi, each evaluation being a
/// Newton solve warm-started from the nearer bracketing solution.
pub fn find_mu_roots(hc: &HarmonicCurve, opts: &HarmonicOptions) -> Vec<HarmonicRoot> {
    let curve = &hc.curve;
    let problem = &curve.problem;
    let mut roots = Vec::new();
    for range in &curve.branches {
        let idx: Vec<usize> = range.clone().collect();
        for (j, &i) in idx.iter().enumerate() {
            let p = &curve.points[i];
            let sol = &hc.solutions[i];
            if p.lambda.abs() <= opts.mu_tol {
                roots.push(HarmonicRoot {
                    xi: p.alpha,
                    uprime0: sol.uprime0,
                    solution: sol.clone(),
                });
                continue;
            }
            let Some(&i2) = idx.get(j + 1) else { continue };
            let q = &curve.points[i2];
            if q.lambda.abs() <= opts.mu_tol || p.lambda.signum() == q.lambda.signum() {
                continue;
            }
            if let Some(root) = refine_root(
                problem,
                (p.alpha, p.lambda, sol),
                (q.alpha, q.lambda, &hc.solutions[i2]),
                opts,
            ) {
                roots.push(root);
            }
        }
    }
    roots
}

fn refine_root(
    problem: &ProblemSpec,
    a: (f64, f64, &HarmonicSolution),
    b: (f64, f64, &HarmonicSolution),
    opts: &HarmonicOptions,
) -> Option<HarmonicRoot> {
    use std::cell::RefCell;
    let best: RefCell<Option<HarmonicSolution>> = RefCell::new(None);
    let nearest = |xi: f64| -> HarmonicSolution {
        let cand = best.borrow().clone();
        let mut seed = if (xi - a.0).abs() <= (xi - b.0).abs() {
            a.2.clone()
        } else {
            b.2.clone()
        };
        if let Some(c) = cand {
            if (c.xi - xi).abs() < (seed.xi - xi).abs() {
                seed = c;
            }
        }
        seed
    };
    let mu_at = |xi: f64| -> f64 {
        let seed = nearest(xi);
        match newton_at(problem, xi, Guess::Solution(seed), opts) {
            Ok((sol, _)) => {
                let mu = sol.mu;
                *best.borrow_mut() = Some(sol);
                mu
            }
            Err(_) => f64::NAN,
        }
    };
    let xtol = 1e-12 * a.0.abs().max(b.0.abs()).max(1.0);
    let (xi, mu) = illinois(mu_at, a.0, a.1, b.0, b.1, xtol, opts.mu_tol);
    if !(mu.abs() <= opts.mu_tol) {
        return None;
    }
    // Re-solve exactly at the returned abscissa so the solution matches ξ.
    let seed = nearest(xi);
    let (solution, _) = newton_at(problem, xi, Guess::Solution(seed), opts).ok()?;
    Some(HarmonicRoot {
        xi,
        uprime0: solution.uprime0,
        solution,
    })
}
