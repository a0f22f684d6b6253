//! Run configuration: a TOML file with one problem section plus optional
//! `[solver]` and `[output]` sections.
//!
//! ```toml
//! [dirichlet]
//! f = "u + 0.5*u*sin(u)"
//! n = 3
//! step = 0.05
//! count = 560
//!
//! [output]
//! csv = "curve.csv"
//! svg = "curve.svg"
//! ```

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use solcurve::beam::BeamOptions;
use solcurve::harmonic::{HarmonicOptions, WarmStart};
use solcurve::nonauto::NewtonOptions;
use solcurve::plaplace::{Mode, PLaplaceOptions};
use solcurve::shootscale::ShootOptions;
use solcurve::{parse_nonlinearity, Grid, JumpRule, Nonlinearity, ProblemSpec, Tolerances, Var};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    dirichlet: Option<DirichletSection>,
    neumann: Option<NeumannSection>,
    plaplace: Option<PLaplaceSection>,
    nonauto: Option<NonautoSection>,
    beam: Option<BeamSection>,
    harmonic: Option<HarmonicSection>,
    #[serde(default)]
    solver: SolverSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DirichletSection {
    f: Option<String>,
    catalog: Option<String>,
    n: u32,
    #[serde(default)]
    start: f64,
    step: f64,
    count: usize,
    #[serde(default)]
    supercritical: bool,
    epsilon: Option<f64>,
    tend: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NeumannSection {
    f: Option<String>,
    catalog: Option<String>,
    n: u32,
    #[serde(default)]
    start: f64,
    step: f64,
    count: usize,
    epsilon: Option<f64>,
    tend: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PLaplaceSection {
    f: Option<String>,
    catalog: Option<String>,
    n: u32,
    p: f64,
    #[serde(default)]
    start: f64,
    step: f64,
    count: usize,
    mode: Option<String>,
    h: Option<f64>,
    tend: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NonautoSection {
    f: Option<String>,
    catalog: Option<String>,
    n: u32,
    #[serde(default)]
    start: f64,
    step: f64,
    count: usize,
    lambda0: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BeamSection {
    f: Option<String>,
    catalog: Option<String>,
    #[serde(default)]
    start: f64,
    step: f64,
    count: usize,
    lambda0: Option<f64>,
    beta0: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HarmonicSection {
    f: Option<String>,
    catalog: Option<String>,
    forcing: Option<String>,
    #[serde(default = "default_k")]
    k: u32,
    #[serde(default)]
    start: f64,
    step: f64,
    count: usize,
    warm_start: Option<String>,
    amplitude: Option<f64>,
}

fn default_k() -> u32 {
    1
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    tol_rel: Option<f64>,
    tol_abs: Option<f64>,
    tol_event: Option<f64>,
    jobs: Option<usize>,
    /// Fixed branch-jump threshold; adaptive when absent.
    jump: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    csv: Option<PathBuf>,
    svg: Option<PathBuf>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub jobs: Option<usize>,
    pub tol_rel: Option<f64>,
    pub tol_abs: Option<f64>,
    pub seed_lambda: Option<f64>,
    pub mode: Option<String>,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

/// Family-specific solver settings.
#[derive(Debug, Clone)]
pub enum Method {
    Dirichlet(ShootOptions),
    Neumann(ShootOptions),
    PLaplace(PLaplaceOptions),
    Nonauto {
        lambda0: Option<f64>,
        opts: NewtonOptions,
    },
    Beam {
        start: Option<(f64, f64)>,
        opts: BeamOptions,
    },
    Harmonic {
        strategy: WarmStart,
        opts: HarmonicOptions,
    },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub grid: Grid,
    pub method: Method,
    pub jobs: Option<usize>,
    pub jump: JumpRule,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text, overrides)
    }

    pub fn parse(text: &str, overrides: &Overrides) -> Result<RunConfig> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| anyhow!("{}", e.message().trim()).context(location(text, &e)))?;
        build(raw, overrides)
    }
}

fn location(text: &str, err: &toml::de::Error) -> String {
    match err.span() {
        Some(span) => {
            let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
            format!("config error at line {line}")
        }
        None => "config error".to_string(),
    }
}

fn nonlinearity(f: &Option<String>, catalog: &Option<String>, vars: &[Var]) -> Result<Nonlinearity> {
    match (f, catalog) {
        (Some(text), None) => parse_nonlinearity(text, vars)
            .map_err(|e| anyhow!("cannot parse f = {text:?}: {:?} at position {}", e.kind, e.position)),
        (None, Some(name)) => Nonlinearity::catalog(name).map_err(|e| anyhow!("{e}")),
        (Some(_), Some(_)) => bail!("give either f or catalog, not both"),
        (None, None) => bail!("missing f (an expression) or catalog (a built-in name)"),
    }
}

fn positive(name: &str, v: Option<f64>) -> Result<Option<f64>> {
    match v {
        Some(x) if !(x > 0.0) || !x.is_finite() => bail!("{name} must be positive, got {x}"),
        _ => Ok(v),
    }
}

fn grid(start: f64, step: f64, count: usize, allow_negative: bool) -> Result<Grid> {
    if count < 1 {
        bail!("count must be at least 1");
    }
    if !start.is_finite() || !step.is_finite() || step == 0.0 {
        bail!("start and step must be finite and step nonzero");
    }
    if step < 0.0 && !allow_negative {
        bail!("step must be positive");
    }
    Ok(Grid::new(start, step, count))
}

fn build(raw: RawConfig, ov: &Overrides) -> Result<RunConfig> {
    let present = [
        raw.dirichlet.is_some(),
        raw.neumann.is_some(),
        raw.plaplace.is_some(),
        raw.nonauto.is_some(),
        raw.beam.is_some(),
        raw.harmonic.is_some(),
    ]
    .iter()
    .filter(|&&b| b)
    .count();
    if present != 1 {
        bail!("expected exactly one problem section ([dirichlet], [neumann], [plaplace], [nonauto], [beam] or [harmonic]), found {present}");
    }

    let s = &raw.solver;
    let mut tol = Tolerances::default();
    tol.rel = positive("tol_rel", ov.tol_rel.or(s.tol_rel))?.unwrap_or(tol.rel);
    tol.abs = positive("tol_abs", ov.tol_abs.or(s.tol_abs))?.unwrap_or(tol.abs);
    tol.event = positive("tol_event", s.tol_event)?.unwrap_or(tol.event);
    let jobs = ov.jobs.or(s.jobs);
    if jobs == Some(0) {
        bail!("jobs must be at least 1");
    }
    let jump = match positive("jump", s.jump)? {
        Some(j) => JumpRule::Fixed(j),
        None => JumpRule::default(),
    };

    let is_plaplace = raw.plaplace.is_some();
    if ov.mode.is_some() && !is_plaplace {
        bail!("--mode applies to [plaplace] problems only");
    }
    if ov.seed_lambda.is_some() && raw.nonauto.is_none() && raw.beam.is_none() {
        bail!("--seed-lambda applies to [nonauto] and [beam] problems only");
    }

    let (problem, grid, method) = if let Some(d) = raw.dirichlet {
        let f = nonlinearity(&d.f, &d.catalog, &[Var::U])?;
        let opts = ShootOptions {
            epsilon: positive("epsilon", d.epsilon)?.unwrap_or(1e-8),
            tend: positive("tend", d.tend)?.unwrap_or(1000.0),
            supercritical: d.supercritical,
            tolerances: tol,
            ..ShootOptions::default()
        };
        (
            ProblemSpec::dirichlet(d.n, f),
            grid(d.start, d.step, d.count, false)?,
            Method::Dirichlet(opts),
        )
    } else if let Some(d) = raw.neumann {
        let f = nonlinearity(&d.f, &d.catalog, &[Var::U])?;
        let opts = ShootOptions {
            epsilon: positive("epsilon", d.epsilon)?.unwrap_or(1e-8),
            tend: positive("tend", d.tend)?.unwrap_or(1000.0),
            tolerances: tol,
            ..ShootOptions::default()
        };
        (
            ProblemSpec::neumann(d.n, f),
            grid(d.start, d.step, d.count, false)?,
            Method::Neumann(opts),
        )
    } else if let Some(d) = raw.plaplace {
        let f = nonlinearity(&d.f, &d.catalog, &[Var::U])?;
        let mode = match ov.mode.as_deref().or(d.mode.as_deref()).unwrap_or("regularized") {
            "regularized" => Mode::Regularized,
            "naive" => Mode::Naive,
            other => bail!("mode must be naive or regularized, got {other:?}"),
        };
        let opts = PLaplaceOptions {
            mode,
            h: positive("h", d.h)?,
            tend: positive("tend", d.tend)?.unwrap_or(1000.0),
            tolerances: tol,
        };
        (
            ProblemSpec::plaplace(d.n, d.p, f),
            grid(d.start, d.step, d.count, false)?,
            Method::PLaplace(opts),
        )
    } else if let Some(d) = raw.nonauto {
        let f = nonlinearity(&d.f, &d.catalog, &[Var::U, Var::R])?;
        let opts = NewtonOptions {
            tolerances: tol,
            ..NewtonOptions::default()
        };
        let lambda0 = ov.seed_lambda.or(d.lambda0);
        (
            ProblemSpec::nonautonomous(d.n, f),
            grid(d.start, d.step, d.count, false)?,
            Method::Nonauto { lambda0, opts },
        )
    } else if let Some(d) = raw.beam {
        let f = nonlinearity(&d.f, &d.catalog, &[Var::U, Var::X])?;
        let opts = BeamOptions {
            tolerances: tol,
            ..BeamOptions::default()
        };
        let start = match (ov.seed_lambda.or(d.lambda0), d.beta0) {
            (Some(l), Some(b)) => Some((l, b)),
            (None, None) => None,
            _ => bail!("give both lambda0 and beta0 to seed the beam, or neither"),
        };
        (
            ProblemSpec::beam(f),
            grid(d.start, d.step, d.count, false)?,
            Method::Beam { start, opts },
        )
    } else if let Some(d) = raw.harmonic {
        let f = nonlinearity(&d.f, &d.catalog, &[Var::U])?;
        let forcing = match &d.forcing {
            Some(text) => Some(parse_nonlinearity(text, &[Var::X]).map_err(|e| {
                anyhow!(
                    "cannot parse forcing = {text:?}: {:?} at position {}",
                    e.kind,
                    e.position
                )
            })?),
            None => None,
        };
        let strategy = match (d.warm_start.as_deref().unwrap_or("previous"), d.amplitude) {
            ("previous", None) => WarmStart::Previous,
            ("previous", Some(_)) => bail!("amplitude applies to warm_start = \"sine\" only"),
            ("sine", a) => WarmStart::FixedSine {
                amplitude: a.unwrap_or(1.0),
            },
            (other, _) => bail!("warm_start must be previous or sine, got {other:?}"),
        };
        let opts = HarmonicOptions {
            tolerances: tol,
            ..HarmonicOptions::default()
        };
        (
            ProblemSpec::harmonic(f, forcing, d.k),
            grid(d.start, d.step, d.count, true)?,
            Method::Harmonic { strategy, opts },
        )
    } else {
        unreachable!("exactly one section is present")
    };
    problem.validate().map_err(|e| anyhow!("{e}"))?;
    if matches!(
        method,
        Method::Dirichlet(_) | Method::Neumann(_) | Method::PLaplace(_) | Method::Nonauto { .. } | Method::Beam { .. }
    ) && !(grid.value(1) > 0.0)
    {
        bail!("the first alpha value, start + step, must be positive");
    }
    if let Method::PLaplace(o) = &method {
        if o.mode == Mode::Regularized && problem.p < 2.0 {
            bail!("regularized mode needs p >= 2; use mode = \"naive\"");
        }
    }

    Ok(RunConfig {
        problem,
        grid,
        method,
        jobs,
        jump,
        csv: ov.csv.clone().or(raw.output.csv),
        svg: ov.svg.clone().or(raw.output.svg),
    })
}
