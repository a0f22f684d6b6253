use std::f64::consts::PI;

use solcurve::beam::{beam_curve, beam_ivp, beam_jacobian, beam_residual, beam_residual_integral, BeamOptions};
use solcurve::harmonic::{continue_in_xi, find_mu_roots, solve_at, HarmonicOptions, WarmStart};
use solcurve::{integrate, Grid, IvpSystem, JumpRule, Nonlinearity, ProblemSpec, Tolerances};

fn cat(name: &str) -> Nonlinearity {
    Nonlinearity::catalog(name).unwrap()
}

#[test]
fn beam_points_are_positive_clamped_and_consistent() {
    let problem = ProblemSpec::beam(cat("perturbed-gelfand"));
    let f = &problem.nonlinearity;
    let tol = Tolerances::default();
    let curve = beam_curve(
        &problem,
        &Grid::new(0.0, 0.2, 100),
        None,
        &BeamOptions::default(),
        JumpRule::default(),
    )
    .unwrap();
    let pts: Vec<_> = curve.branch_slices().flatten().collect();
    assert_eq!(pts.len(), 100);
    for (i, p) in pts.iter().enumerate() {
        let beta = p.beta.unwrap();
        assert!(beta <= 0.0, "alpha {}: beta {beta}", p.alpha);
        let u = beam_ivp(p.lambda, beta, p.alpha, f, &tol).unwrap();
        // Even extension: u(±1) = u'(±1) = 0 follows from the right half.
        let end = u.final_state();
        assert!(end[0].abs() <= 1e-8 * p.alpha.max(1.0) && end[1].abs() <= 1e-8 * p.alpha.max(1.0));
        for j in 0..100 {
            assert!(u.evaluate(j as f64 / 100.0)[0] > 0.0);
        }
        let (fi, gi) = beam_residual_integral(p.lambda, beta, p.alpha, f, &u);
        assert!(
            fi.abs() < 1e-8 * p.alpha.max(1.0) && gi.abs() < 1e-8 * p.alpha.max(1.0),
            "{fi} {gi}"
        );
        if i % 10 == 0 {
            let jac = beam_jacobian(p.lambda, beta, p.alpha, f, &u, &tol).unwrap();
            let h = [1e-5 * p.lambda.abs().max(1.0), 1e-5 * beta.abs().max(1.0)];
            for (col, hc) in h.iter().enumerate() {
                let shift = |s: f64| {
                    let (l, b) = if col == 0 {
                        (p.lambda + s, beta)
                    } else {
                        (p.lambda, beta + s)
                    };
                    beam_residual(l, b, p.alpha, f, &tol).unwrap()
                };
                let (fp, gp) = shift(*hc);
                let (fm, gm) = shift(-hc);
                let fd = [(fp - fm) / (2.0 * hc), (gp - gm) / (2.0 * hc)];
                for row in 0..2 {
                    let exact = jac[row][col];
                    assert!(
                        (exact - fd[row]).abs() <= 1e-5 * exact.abs().max(1e-8),
                        "J[{row}][{col}] {exact} vs {}",
                        fd[row]
                    );
                }
            }
        }
    }
}

#[test]
fn non_autonomous_beam_is_flagged() {
    let f = solcurve::parse_nonlinearity("(1 + x^2)*exp(u)", &[solcurve::Var::U, solcurve::Var::X]).unwrap();
    let problem = ProblemSpec::beam(f);
    let curve = beam_curve(
        &problem,
        &Grid::new(0.0, 0.1, 5),
        None,
        &BeamOptions::default(),
        JumpRule::default(),
    )
    .unwrap();
    assert_eq!(curve.branch_slices().flatten().count(), 5);
    assert!(!curve.meta.notes.is_empty());
}

fn castro_curve(k: u32, step: f64, count: usize) -> solcurve::harmonic::HarmonicCurve {
    let problem = ProblemSpec::harmonic(cat("castro"), None, k);
    continue_in_xi(
        &problem,
        &Grid::new(0.0, step, count),
        WarmStart::Previous,
        &HarmonicOptions::default(),
        JumpRule::default(),
    )
    .unwrap()
}

#[test]
fn harmonic_constraint_and_boundary_values() {
    let hc = castro_curve(1, 0.1, 40);
    assert_eq!(hc.solutions.len(), hc.curve.branch_slices().flatten().count());
    for s in &hc.solutions {
        assert!((s.harmonic(64) - s.xi).abs() <= 1e-9);
        assert!(s.u(0.0).abs() <= 1e-12 && s.u(PI).abs() <= 1e-8);
        // Doubling the panels leaves the ξ-integral in place.
        assert!((s.harmonic(128) - s.harmonic(64)).abs() <= 1e-10);
    }
}

#[test]
fn reflected_roots_solve_the_problem() {
    let opts = HarmonicOptions::default();
    let f = cat("castro");
    for step in [0.05, -0.05] {
        let hc = castro_curve(1, step, 100);
        for root in find_mu_roots(&hc, &opts) {
            let s = &root.solution;
            // v(x) = u(π − x) solved as an IVP from v(0) = 0, v'(0) = −u'(π).
            let fr = f.clone();
            let sys = IvpSystem::new(
                move |_, y, dy| {
                    dy[0] = y[1];
                    dy[1] = -fr.value(0.0, y[0]);
                },
                0.0,
                vec![0.0, -s.du(PI)],
                PI,
            );
            let v = integrate(&sys, &Tolerances::default()).unwrap();
            assert!(
                v.final_state()[0].abs() <= 1e-7,
                "xi {}: v(pi) = {:e}",
                root.xi,
                v.final_state()[0]
            );
            for j in 0..=100 {
                let x = PI * j as f64 / 100.0;
                assert!((v.evaluate(x)[0] - s.u(PI - x)).abs() <= 1e-7);
            }
        }
    }
}

#[test]
fn linear_regime_gives_a_straight_line() {
    // f = 2u: μ(ξ) = 2(c − 1)ξ/π with c = 2, one root at ξ = 0.
    let problem = ProblemSpec::harmonic(Nonlinearity::linear(2.0), None, 1);
    let opts = HarmonicOptions::default();
    let hc = continue_in_xi(
        &problem,
        &Grid::new(-2.1, 0.1, 40),
        WarmStart::Previous,
        &opts,
        JumpRule::default(),
    )
    .unwrap();
    let pts: Vec<_> = hc.curve.branch_slices().flatten().collect();
    assert_eq!(pts.len(), 40);
    assert!(pts.windows(2).all(|w| w[1].alpha > w[0].alpha));
    for p in &pts {
        assert!((p.lambda - 2.0 * p.alpha / PI).abs() < 1e-8);
    }
    let roots = find_mu_roots(&hc, &opts);
    assert_eq!(roots.len(), 1);
    assert!(roots[0].xi.abs() < 1e-9);
}

#[test]
fn second_harmonic_roots_lie_off_the_first_curve() {
    // The k = 2 root at ξ₂ ≈ −0.85 has some first harmonic ξ₁; the k = 1
    // solution with that ξ₁ needs nonzero forcing, so the root is not on the
    // k = 1 curve.
    let opts = HarmonicOptions::default();
    let k2 = castro_curve(2, -0.05, 30);
    let roots = find_mu_roots(&k2, &opts);
    let r = roots.iter().find(|r| (r.xi + 0.85).abs() < 0.02).unwrap();
    let n = 4096;
    let xi1: f64 = (0..n)
        .map(|j| {
            let x = PI * (j as f64 + 0.5) / n as f64;
            r.solution.u(x) * x.sin() * PI / n as f64
        })
        .sum();
    let problem = ProblemSpec::harmonic(cat("castro"), None, 1);
    let (on_curve, _) = solve_at(&problem, xi1, None, &opts).unwrap();
    assert!(on_curve.mu.abs() > 1e-3, "xi1 {xi1}: mu {}", on_curve.mu);
    let gap = (0..=100)
        .map(|j| {
            let x = PI * j as f64 / 100.0;
            (on_curve.u(x) - r.solution.u(x)).abs()
        })
        .fold(0.0, f64::max);
    assert!(gap > 0.1);
}
