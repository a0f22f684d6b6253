//! Shoot-and-scale for autonomous radial Dirichlet and Neumann problems.
//!
//! For `Δu + λ f(u) = 0` on the unit ball, the rescaled profile
//! `v(r) = u(r/√λ)` solves `v'' + ((n−1)/r) v' + f(v) = 0`, `v(0) = α`.
//! Shooting once per α and locating the first root `r*` of `v` (or of `v'`
//! for Neumann problems) gives the unique `λ = r*²` with `u(0) = α`.

use thiserror::Error;

use crate::model::{CurveMeta, CurvePoint, Family, Grid, ProblemSpec, SolutionCurve, Terminal};
use crate::ode::{integrate, Direction, EventSpec, IvpSystem, Outcome, Tolerances};
use crate::sweep::{assemble, map_ordered, SweepOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootOptions {
    /// Start radius of the series-initialized integration.
    pub epsilon: f64,
    /// Integration cap in the rescaled variable.
    pub tend: f64,
    /// Stop only once `v` drops below `negative_floor`; λ still comes from the
    /// first root of `v`.
    pub supercritical: bool,
    pub negative_floor: f64,
    /// Minimum `|f|` (equivalently `|v''|` at a critical point) for a Neumann
    /// event to count.
    pub neumann_guard: f64,
    pub tolerances: Tolerances,
}

impl Default for ShootOptions {
    fn default() -> Self {
        ShootOptions {
            epsilon: 1e-8,
            tend: 1000.0,
            supercritical: false,
            negative_floor: -1e-8,
            neumann_guard: 1e-10,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShootKind {
    VRoot,
    VPrimeRoot,
    NoEvent,
    WentNegative,
    /// `f(α) = 0` (constant solution) or a critical point with `v'' ≈ 0`.
    Degenerate,
    IntegrationFailed,
}

impl ShootKind {
    pub fn terminal(self) -> Terminal {
        match self {
            ShootKind::VRoot => Terminal::DirichletRoot,
            ShootKind::VPrimeRoot => Terminal::NeumannCritical,
            ShootKind::NoEvent => Terminal::NoEventByTend,
            ShootKind::WentNegative => Terminal::WentNegative,
            ShootKind::Degenerate => Terminal::Degenerate,
            ShootKind::IntegrationFailed => Terminal::IntegrationFailed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootResult {
    pub alpha: f64,
    /// Event location in the rescaled variable.
    pub r_star: Option<f64>,
    pub kind: ShootKind,
    pub lambda: Option<f64>,
    /// `v(r*)` at the reported event.
    pub v_star: Option<f64>,
}

impl ShootResult {
    fn without_event(alpha: f64, kind: ShootKind) -> ShootResult {
        ShootResult {
            alpha,
            r_star: None,
            kind,
            lambda: None,
            v_star: None,
        }
    }

    pub fn to_point(&self) -> CurvePoint {
        CurvePoint::new(self.alpha, self.lambda.unwrap_or(f64::NAN), self.kind.terminal())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShootError {
    #[error("alpha must be positive and finite, got {0}")]
    Alpha(f64),
    #[error("shoot-and-scale needs a radial Dirichlet or Neumann problem")]
    Family,
    #[error("shoot-and-scale needs an autonomous nonlinearity")]
    NonAutonomous,
    #[error("invalid options: {0}")]
    Options(&'static str),
    #[error("invalid grid: {0}")]
    Grid(&'static str),
}

/// Second-order series start at `r = ε` for `v'' + ((n−1)/r)v' + c = 0`
/// with `c = f(α)` frozen: `v = α − c ε²/(2n)`, `v' = −c ε/n`.
pub(crate) fn series_start(n: u32, alpha: f64, f_alpha: f64, eps: f64) -> [f64; 2] {
    let n = n as f64;
    [alpha - f_alpha * eps * eps / (2.0 * n), -f_alpha * eps / n]
}

fn check_options(opts: &ShootOptions) -> Result<(), ShootError> {
    if !(opts.epsilon > 0.0 && opts.epsilon < opts.tend) {
        return Err(ShootError::Options("need 0 < epsilon < tend"));
    }
    if opts.supercritical && !(opts.negative_floor < 0.0) {
        return Err(ShootError::Options("negative floor must be below zero"));
    }
    Ok(())
}

pub(crate) fn check_grid(grid: &Grid) -> Result<(), ShootError> {
    if grid.count < 1 {
        return Err(ShootError::Grid("nsteps must be at least 1"));
    }
    if !(grid.step > 0.0) || !grid.start.is_finite() {
        return Err(ShootError::Grid("step must be positive"));
    }
    Ok(())
}

/// Shoots the rescaled IVP from `v(0) = α` and classifies the first event.
pub fn shoot(problem: &ProblemSpec, alpha: f64, opts: &ShootOptions) -> Result<ShootResult, ShootError> {
    if !matches!(problem.family, Family::RadialDirichlet | Family::RadialNeumann) {
        return Err(ShootError::Family);
    }
    if !problem.nonlinearity.is_autonomous() {
        return Err(ShootError::NonAutonomous);
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(ShootError::Alpha(alpha));
    }
    check_options(opts)?;

    let f = &problem.nonlinearity;
    let f_alpha = f.value(0.0, alpha);
    if !f_alpha.is_finite() {
        return Ok(ShootResult::without_event(alpha, ShootKind::IntegrationFailed));
    }
    if f_alpha.abs() <= opts.neumann_guard {
        return Ok(ShootResult::without_event(alpha, ShootKind::Degenerate));
    }

    let eps = opts.epsilon;
    let k = (problem.n - 1) as f64;
    let mut sys = IvpSystem::new(
        move |r, y, dy| {
            dy[0] = y[1];
            dy[1] = -k / r * y[1] - f.value(0.0, y[0]);
        },
        eps,
        series_start(problem.n, alpha, f_alpha, eps).to_vec(),
        opts.tend,
    );
    if opts.supercritical {
        let floor = opts.negative_floor;
        sys = sys.with_event(EventSpec::new(move |_, y| y[0] - floor, Direction::Decreasing, eps));
    } else {
        sys = sys
            .with_event(EventSpec::new(|_, y| y[0], Direction::Decreasing, eps))
            .with_event(EventSpec::new(|_, y| y[1], Direction::Any, eps));
    }

    let traj = integrate(&sys, &opts.tolerances).map_err(|_| ShootError::Options("integrator rejected input"))?;
    let result = match (&traj.outcome, &traj.first_event) {
        (Outcome::Event, Some(hit)) if opts.supercritical => {
            let xtol = opts.tolerances.event * hit.t.max(1.0);
            match traj.first_root(0, 0.0, eps, xtol) {
                Some(r0) => ShootResult {
                    alpha,
                    r_star: Some(r0),
                    kind: ShootKind::WentNegative,
                    lambda: Some(r0 * r0),
                    v_star: Some(traj.evaluate(r0)[0]),
                },
                None => ShootResult::without_event(alpha, ShootKind::IntegrationFailed),
            }
        }
        (Outcome::Event, Some(hit)) => {
            let r = hit.t;
            let mut kind = if hit.index == 0 {
                ShootKind::VRoot
            } else {
                ShootKind::VPrimeRoot
            };
            if kind == ShootKind::VPrimeRoot {
                // v'' = −f(v) where v' = 0.
                let vpp = f.value(0.0, hit.y[0]);
                if vpp.abs() <= opts.neumann_guard {
                    kind = ShootKind::Degenerate;
                }
            }
            ShootResult {
                alpha,
                r_star: Some(r),
                kind,
                lambda: (kind != ShootKind::Degenerate).then_some(r * r),
                v_star: Some(hit.y[0]),
            }
        }
        (Outcome::ReachedEnd, _) => ShootResult::without_event(alpha, ShootKind::NoEvent),
        _ => ShootResult::without_event(alpha, ShootKind::IntegrationFailed),
    };
    Ok(result)
}

fn sweep<'a>(problem: &'a ProblemSpec, opts: &ShootOptions) -> impl Fn(f64) -> CurvePoint + Sync + 'a {
    let opts = *opts;
    move |alpha| match shoot(problem, alpha, &opts) {
        Ok(res) => res.to_point(),
        Err(_) => CurvePoint::new(alpha, f64::NAN, Terminal::IntegrationFailed),
    }
}

fn meta_for(grid: &Grid, opts: &ShootOptions) -> CurveMeta {
    CurveMeta {
        grid: Some(*grid),
        tolerances: opts.tolerances,
        ..CurveMeta::default()
    }
}

/// Dirichlet solution curve over `grid`: one shot per grid point, keeping
/// first-root points (or, in supercritical mode, went-negative points).
pub fn dirichlet_curve(
    problem: &ProblemSpec,
    grid: &Grid,
    opts: &ShootOptions,
    sweep_opts: &SweepOptions,
) -> Result<SolutionCurve, ShootError> {
    if problem.family != Family::RadialDirichlet {
        return Err(ShootError::Family);
    }
    check_grid(grid)?;
    check_options(opts)?;
    if !problem.nonlinearity.is_autonomous() {
        return Err(ShootError::NonAutonomous);
    }
    let values = grid.values();
    if values[0] <= 0.0 {
        return Err(ShootError::Grid("alpha values must be positive"));
    }
    let points = map_ordered(&values, sweep_opts.jobs, sweep(problem, opts));
    let mut meta = meta_for(grid, opts);
    if opts.supercritical {
        meta.notes.push(format!(
            "supercritical termination: integration stops once u < {:e}",
            opts.negative_floor
        ));
    }
    let wanted = if opts.supercritical {
        Terminal::WentNegative
    } else {
        Terminal::DirichletRoot
    };
    Ok(assemble(
        points,
        problem.clone(),
        meta,
        sweep_opts.jump,
        |_, _| false,
        |t| t == wanted,
    ))
}

/// Neumann solution curve over `grid`, keeping first-critical-point shots.
///
/// Branches also break where `f(α)` changes sign: the two sides of an
/// equilibrium are distinct half-branches.
pub fn neumann_curve(
    problem: &ProblemSpec,
    grid: &Grid,
    opts: &ShootOptions,
    sweep_opts: &SweepOptions,
) -> Result<SolutionCurve, ShootError> {
    if problem.family != Family::RadialNeumann {
        return Err(ShootError::Family);
    }
    check_grid(grid)?;
    check_options(opts)?;
    if opts.supercritical {
        return Err(ShootError::Options(
            "supercritical mode applies to Dirichlet curves only",
        ));
    }
    if !problem.nonlinearity.is_autonomous() {
        return Err(ShootError::NonAutonomous);
    }
    let values = grid.values();
    if values[0] <= 0.0 {
        return Err(ShootError::Grid("alpha values must be positive"));
    }
    let points = map_ordered(&values, sweep_opts.jobs, sweep(problem, opts));
    let f = &problem.nonlinearity;
    let degenerate = points.iter().filter(|p| p.terminal == Terminal::Degenerate).count();
    let mut meta = meta_for(grid, opts);
    if degenerate > 0 {
        meta.notes
            .push(format!("{degenerate} grid point(s) at equilibria of f skipped"));
    }
    let sign_flip = |a: &CurvePoint, b: &CurvePoint| f.value(0.0, a.alpha).signum() != f.value(0.0, b.alpha).signum();
    Ok(assemble(
        points,
        problem.clone(),
        meta,
        sweep_opts.jump,
        sign_flip,
        |t| t == Terminal::NeumannCritical,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{detect_folds, Nonlinearity};
    use std::f64::consts::PI;

    fn dirichlet(n: u32, f: &str) -> ProblemSpec {
        ProblemSpec::dirichlet(n, Nonlinearity::catalog(f).unwrap())
    }

    #[test]
    fn constant_nonlinearity_quadratic() {
        let res = shoot(&dirichlet(1, "constant"), 2.0, &ShootOptions::default()).unwrap();
        assert_eq!(res.kind, ShootKind::VRoot);
        assert!((res.r_star.unwrap() - 2.0).abs() < 1e-10);
        assert!((res.lambda.unwrap() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn linear_nonlinearity_gives_pi_squared() {
        let res = shoot(&dirichlet(3, "linear"), 5.0, &ShootOptions::default()).unwrap();
        assert_eq!(res.kind, ShootKind::VRoot);
        assert!((res.r_star.unwrap() - PI).abs() < 1e-7);
    }

    #[test]
    fn neumann_cubic_below_equilibrium() {
        let p = ProblemSpec::neumann(1, Nonlinearity::catalog("cubic").unwrap());
        let res = shoot(&p, 0.9, &ShootOptions::default()).unwrap();
        assert_eq!(res.kind, ShootKind::VPrimeRoot);
        assert!(res.v_star.unwrap() > 0.0);
        let near = shoot(&p, 0.999, &ShootOptions::default()).unwrap();
        assert!((near.lambda.unwrap() - PI * PI / 6.0).abs() < 1e-2);
    }

    #[test]
    fn equilibrium_is_degenerate() {
        let p = ProblemSpec::neumann(1, Nonlinearity::catalog("cubic").unwrap());
        let res = shoot(&p, 1.0, &ShootOptions::default()).unwrap();
        assert_eq!(res.kind, ShootKind::Degenerate);
        assert!(res.lambda.is_none());
    }

    #[test]
    fn preconditions() {
        let opts = ShootOptions::default();
        assert_eq!(
            shoot(&dirichlet(3, "exp"), 0.0, &opts).unwrap_err(),
            ShootError::Alpha(0.0)
        );
        let p = ProblemSpec::plaplace(3, 3.0, Nonlinearity::catalog("exp").unwrap());
        assert_eq!(shoot(&p, 1.0, &opts).unwrap_err(), ShootError::Family);
        let p = ProblemSpec::dirichlet(3, Nonlinearity::catalog("gelfand-potential").unwrap());
        assert_eq!(shoot(&p, 1.0, &opts).unwrap_err(), ShootError::NonAutonomous);
        let bad = ShootOptions { epsilon: 0.0, ..opts };
        assert!(shoot(&dirichlet(3, "exp"), 1.0, &bad).is_err());
        let g = Grid::new(0.0, -1.0, 3);
        assert!(dirichlet_curve(&dirichlet(3, "exp"), &g, &opts, &SweepOptions::default()).is_err());
    }

    #[test]
    fn tend_cap_gives_no_event() {
        let opts = ShootOptions {
            tend: 2.0,
            ..ShootOptions::default()
        };
        let res = shoot(&dirichlet(3, "linear"), 1.0, &opts).unwrap();
        assert_eq!(res.kind, ShootKind::NoEvent);
        assert_eq!(res.to_point().terminal, Terminal::NoEventByTend);
    }

    #[test]
    fn linear_curve_is_flat() {
        let p = dirichlet(3, "linear");
        let curve = dirichlet_curve(
            &p,
            &Grid::new(0.0, 1.0, 10),
            &ShootOptions::default(),
            &SweepOptions::default(),
        )
        .unwrap();
        assert_eq!(curve.points.len(), 10);
        assert_eq!(curve.branches, vec![0..10]);
        for pt in &curve.points {
            assert!((pt.lambda - PI * PI).abs() < 1e-6);
        }
        assert!(detect_folds(&curve).is_empty());
    }

    #[test]
    fn parallel_sweep_is_bit_identical() {
        let p = dirichlet(3, "exp");
        let g = Grid::new(0.0, 0.5, 16);
        let opts = ShootOptions::default();
        let a = dirichlet_curve(&p, &g, &opts, &SweepOptions::default()).unwrap();
        let b = dirichlet_curve(
            &p,
            &g,
            &opts,
            &SweepOptions {
                jobs: Some(4),
                ..SweepOptions::default()
            },
        )
        .unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.branches, b.branches);
    }

    #[test]
    fn gelfand_dirichlet_has_a_fold() {
        // Autonomous e^u in n=3 turns at λ ≈ 3.32.
        let p = dirichlet(3, "exp");
        let curve = dirichlet_curve(
            &p,
            &Grid::new(0.0, 0.1, 40),
            &ShootOptions::default(),
            &SweepOptions::default(),
        )
        .unwrap();
        let folds = detect_folds(&curve);
        assert_eq!(folds.len(), 1);
        assert!((folds[0].lambda - 3.32).abs() < 0.01, "{:?}", folds[0]);
    }
}
