//! Runs the configured sweep and computes single-solution profiles.

use std::f64::consts::PI;

use anyhow::{anyhow, Result};
use solcurve::beam::{beam_curve, beam_ivp, beam_newton, bootstrap_start, BeamError};
use solcurve::harmonic::{continue_in_xi, solve_at, HarmonicError, HarmonicSolution};
use solcurve::nonauto::{continue_in_alpha, ivp_at, newton_lambda, NewtonOptions, NonautoError};
use solcurve::plaplace::{plaplace_curve, plaplace_shoot, plaplace_trajectory, regularize_constants, Mode};
use solcurve::shootscale::{dirichlet_curve, neumann_curve, shoot};
use solcurve::{CurveMeta, CurvePoint, SolutionCurve, SweepOptions, Terminal};

use crate::config::{Method, RunConfig};

/// Number of abscissae in a profile.
pub const PROFILE_POINTS: usize = 401;

/// How a sweep ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Complete,
    /// The first grid point could not be solved; nothing after it was tried
    /// (Newton families) or nothing was accepted (shooting families).
    FirstPointFailed(String),
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub curve: SolutionCurve,
    pub status: Status,
}

fn empty(config: &RunConfig) -> SolutionCurve {
    SolutionCurve {
        points: Vec::new(),
        branches: Vec::new(),
        problem: config.problem.clone(),
        meta: CurveMeta {
            grid: Some(config.grid),
            ..CurveMeta::default()
        },
    }
}

fn failed(config: &RunConfig, why: String) -> Sweep {
    Sweep {
        curve: empty(config),
        status: Status::FirstPointFailed(why),
    }
}

fn shooting(curve: SolutionCurve) -> Sweep {
    let status = if curve.points.is_empty() {
        Status::FirstPointFailed("no grid point produced an accepted solution".into())
    } else {
        Status::Complete
    };
    Sweep { curve, status }
}

/// Runs the sweep. Errors are configuration problems that validation did
/// not catch; solver failures are reported through [`Status`].
pub fn run_sweep(config: &RunConfig) -> Result<Sweep> {
    let sweep = SweepOptions {
        jobs: config.jobs,
        jump: config.jump,
    };
    let problem = &config.problem;
    let grid = &config.grid;
    match &config.method {
        Method::Dirichlet(opts) => Ok(shooting(dirichlet_curve(problem, grid, opts, &sweep)?)),
        Method::Neumann(opts) => Ok(shooting(neumann_curve(problem, grid, opts, &sweep)?)),
        Method::PLaplace(opts) => Ok(shooting(plaplace_curve(problem, grid, opts, &sweep)?)),
        Method::Nonauto { lambda0, opts } => match continue_in_alpha(problem, grid, *lambda0, opts, config.jump) {
            Ok(curve) => Ok(Sweep {
                curve,
                status: Status::Complete,
            }),
            Err(e @ (NonautoError::FirstPoint(_) | NonautoError::Bootstrap(_))) => Ok(failed(config, e.to_string())),
            Err(e) => Err(anyhow!(e)),
        },
        Method::Beam { start, opts } => match beam_curve(problem, grid, *start, opts, config.jump) {
            Ok(curve) => Ok(Sweep {
                curve,
                status: Status::Complete,
            }),
            Err(e @ BeamError::FirstPoint(_)) => Ok(failed(config, e.to_string())),
            Err(e) => Err(anyhow!(e)),
        },
        Method::Harmonic { strategy, opts } => {
            let hc = continue_in_xi(problem, grid, *strategy, opts, config.jump)?;
            let first = grid.value(1);
            let status = match hc.curve.meta.rejected.iter().find(|p| p.alpha == first) {
                Some(p) => Status::FirstPointFailed(format!("first grid point xi = {first}: {}", p.terminal.name())),
                None => Status::Complete,
            };
            Ok(Sweep {
                curve: hc.curve,
                status,
            })
        }
    }
}

/// A solution profile on a uniform grid.
#[derive(Debug, Clone)]
pub struct Profile {
    /// Abscissa column name: `r` or `x`.
    pub variable: &'static str,
    /// Header comments such as `alpha = ...`.
    pub parameters: Vec<(&'static str, f64)>,
    pub samples: Vec<(f64, f64)>,
}

/// Profile failures that map to distinct exit codes.
#[derive(Debug)]
pub enum ProfileError {
    /// The solver did not produce a solution at the requested value.
    Solve(String),
    Other(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for ProfileError {
    fn from(e: E) -> Self {
        ProfileError::Other(e.into())
    }
}

fn uniform(a: f64, b: f64) -> impl Iterator<Item = f64> {
    (0..PROFILE_POINTS).map(move |i| a + (b - a) * i as f64 / (PROFILE_POINTS - 1) as f64)
}

/// Nearest accepted point to `value`, used as a warm start.
fn nearest(curve: &SolutionCurve, value: f64) -> Option<&CurvePoint> {
    curve
        .branch_slices()
        .flatten()
        .min_by(|a, b| (a.alpha - value).abs().total_cmp(&(b.alpha - value).abs()))
}

fn radial_profile(config: &RunConfig, alpha: f64, lambda: f64, opts: &NewtonOptions) -> Result<Profile, ProfileError> {
    let u = ivp_at(&config.problem, lambda, alpha, opts).map_err(|e| ProfileError::Solve(e.to_string()))?;
    let eps = u.t_start();
    let samples = uniform(0.0, 1.0)
        .map(|r| (r, if r < eps { alpha } else { u.evaluate(r)[0] }))
        .collect();
    Ok(Profile {
        variable: "r",
        parameters: vec![("alpha", alpha), ("lambda", lambda)],
        samples,
    })
}

/// Solves at `value` (α, or ξ for harmonic problems) and samples the solution.
pub fn profile(config: &RunConfig, value: f64) -> Result<Profile, ProfileError> {
    let problem = &config.problem;
    match &config.method {
        Method::Dirichlet(opts) | Method::Neumann(opts) => {
            let res = shoot(problem, value, opts)?;
            let lambda = match res.lambda {
                Some(l) if res.kind.terminal().is_accepted() || res.kind.terminal() == Terminal::WentNegative => l,
                _ => {
                    return Err(ProfileError::Solve(format!(
                        "shot from alpha = {value} ended with {}",
                        res.kind.terminal().name()
                    )))
                }
            };
            let newton = NewtonOptions {
                epsilon: opts.epsilon,
                tolerances: opts.tolerances,
                ..NewtonOptions::default()
            };
            radial_profile(config, value, lambda, &newton)
        }
        Method::PLaplace(opts) => {
            let res = plaplace_shoot(problem, value, opts)?;
            let (Some(lambda), Some(root)) = (res.lambda, res.r_star) else {
                return Err(ProfileError::Solve(format!("shot from alpha = {value} found no root")));
            };
            let traj = plaplace_trajectory(problem, value, opts)?;
            let p = problem.p;
            let beta_bar = p / (2.0 * (p - 1.0));
            let a1 = regularize_constants(p, problem.n, value, &problem.nonlinearity)?.a1;
            // Root in the r variable of the unit-λ problem.
            let xi = match opts.mode {
                Mode::Regularized => root.powf(1.0 / beta_bar),
                Mode::Naive => root,
            };
            let start = traj.t_start();
            let samples = uniform(0.0, 1.0)
                .map(|r| {
                    let s = r * xi;
                    let t = match opts.mode {
                        Mode::Regularized => s.powf(beta_bar),
                        Mode::Naive => s,
                    };
                    let u = if t < start {
                        value + a1 * s.powf(p / (p - 1.0))
                    } else {
                        traj.evaluate(t.min(root))[0]
                    };
                    (r, u)
                })
                .collect();
            Ok(Profile {
                variable: "r",
                parameters: vec![("alpha", value), ("lambda", lambda)],
                samples,
            })
        }
        Method::Nonauto { lambda0, opts } => {
            let seed = match lambda0 {
                Some(l) => *l,
                None => {
                    let sweep = run_sweep(config)?;
                    nearest(&sweep.curve, value).map(|p| p.lambda).ok_or_else(|| {
                        ProfileError::Solve("the configured sweep has no converged point to start from".into())
                    })?
                }
            };
            let (lambda, _) =
                newton_lambda(problem, value, seed, opts).map_err(|e| ProfileError::Solve(e.to_string()))?;
            radial_profile(config, value, lambda, opts)
        }
        Method::Beam { start, opts } => {
            let seed = match start {
                Some(s) => *s,
                None => {
                    let sweep = run_sweep(config)?;
                    match nearest(&sweep.curve, value) {
                        Some(p) => (p.lambda, p.beta.unwrap_or(-4.0 * value)),
                        None => bootstrap_start(value, &problem.nonlinearity),
                    }
                }
            };
            let f = &problem.nonlinearity;
            let state = beam_newton(value, seed, f, opts).map_err(|e| ProfileError::Solve(e.to_string()))?;
            let u = beam_ivp(state.lambda, state.beta, value, f, &opts.tolerances)
                .map_err(|e| ProfileError::Solve(e.to_string()))?;
            let samples = uniform(-1.0, 1.0).map(|x| (x, u.evaluate(x.abs())[0])).collect();
            Ok(Profile {
                variable: "x",
                parameters: vec![("alpha", value), ("lambda", state.lambda), ("beta", state.beta)],
                samples,
            })
        }
        Method::Harmonic { strategy, opts } => {
            let seed: Option<HarmonicSolution> = {
                let hc = continue_in_xi(problem, &config.grid, *strategy, opts, config.jump)?;
                let idx = hc
                    .curve
                    .branch_slices()
                    .flatten()
                    .enumerate()
                    .min_by(|a, b| (a.1.alpha - value).abs().total_cmp(&(b.1.alpha - value).abs()))
                    .map(|(i, _)| i);
                idx.map(|i| hc.solutions[i].clone())
            };
            let (sol, _) = solve_at(problem, value, seed.as_ref(), opts)
                .map_err(|e: HarmonicError| ProfileError::Solve(e.to_string()))?;
            let samples = uniform(0.0, PI).map(|x| (x, sol.u(x))).collect();
            Ok(Profile {
                variable: "x",
                parameters: vec![("xi", value), ("mu", sol.mu), ("uprime0", sol.uprime0)],
                samples,
            })
        }
    }
}
