use std::fmt;
use std::sync::Arc;

use super::expr::{Expr, ParseError, Var};
use super::ModelError;

/// Evaluator bundle for a nonlinearity `f(s, u)` and its partial derivatives.
///
/// `s` is the spatial variable (`r` for radial problems, `x` for the beam
/// and the harmonic forcing). Autonomous nonlinearities ignore it. Cloning is
/// cheap; the underlying data is shared and immutable.
#[derive(Clone)]
pub struct Nonlinearity(Arc<Source>);

enum Source {
    Parsed { text: String, f: Expr, du: Expr, ds: Expr },
    Catalog { entry: Catalog, param: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Catalog {
    Constant,
    Linear,
    OscSine,
    Cubic,
    Exp,
    GelfandPotential,
    PerturbedGelfand,
    Sine,
    Castro,
    LinNi,
}

struct CatalogInfo {
    name: &'static str,
    entry: Catalog,
    default: Option<f64>,
    formula: &'static str,
}

const CATALOG: &[CatalogInfo] = &[
    CatalogInfo {
        name: "constant",
        entry: Catalog::Constant,
        default: Some(1.0),
        formula: "c",
    },
    CatalogInfo {
        name: "linear",
        entry: Catalog::Linear,
        default: Some(1.0),
        formula: "c*u",
    },
    CatalogInfo {
        name: "osc-sine",
        entry: Catalog::OscSine,
        default: None,
        formula: "u + 0.5*u*sin(u)",
    },
    CatalogInfo {
        name: "cubic",
        entry: Catalog::Cubic,
        default: None,
        formula: "u*(u - 1)*(7 - u)",
    },
    CatalogInfo {
        name: "exp",
        entry: Catalog::Exp,
        default: None,
        formula: "exp(u)",
    },
    CatalogInfo {
        name: "gelfand-potential",
        entry: Catalog::GelfandPotential,
        default: Some(1.1),
        formula: "(1 - c*r^2)*exp(u)",
    },
    CatalogInfo {
        name: "perturbed-gelfand",
        entry: Catalog::PerturbedGelfand,
        default: Some(5.0),
        formula: "exp(c*u/(c + u))",
    },
    CatalogInfo {
        name: "sine",
        entry: Catalog::Sine,
        default: None,
        formula: "sin(u)",
    },
    CatalogInfo {
        name: "castro",
        entry: Catalog::Castro,
        default: None,
        formula: "6*u/(1 + u + 2*u^2)",
    },
    CatalogInfo {
        name: "lin-ni",
        entry: Catalog::LinNi,
        default: Some(4.0),
        formula: "u^c + u^(2c - 1)",
    },
];

/// Stable catalog identifiers with their formulas (`c` is the optional
/// parameter given as `name:value`).
pub fn catalog_names() -> Vec<(&'static str, &'static str)> {
    CATALOG.iter().map(|c| (c.name, c.formula)).collect()
}

/// Parses `text` into a nonlinearity over the variables in `vars`.
///
/// The derivative of `abs` at 0 is taken to be 0.
pub fn parse_nonlinearity(text: &str, vars: &[Var]) -> Result<Nonlinearity, ParseError> {
    let f = Expr::parse(text, vars)?;
    let du = f.derivative(false);
    let ds = f.derivative(true);
    Ok(Nonlinearity(Arc::new(Source::Parsed {
        text: text.trim().to_string(),
        f,
        du,
        ds,
    })))
}

/// Odd power `sign(u)|u|^e`, equal to `u^e` for odd integer `e`.
fn odd_pow(u: f64, e: f64) -> f64 {
    if e.fract() == 0.0 && e.abs() < 64.0 {
        u.powi(e as i32)
    } else {
        u.signum() * u.abs().powf(e)
    }
}

fn odd_pow_d(u: f64, e: f64) -> f64 {
    if e.fract() == 0.0 && e.abs() < 64.0 {
        e * u.powi(e as i32 - 1)
    } else {
        e * u.abs().powf(e - 1.0)
    }
}

impl Nonlinearity {
    /// Looks up `name` or `name:param` in the built-in catalog.
    pub fn catalog(spec: &str) -> Result<Nonlinearity, ModelError> {
        let (name, param) = match spec.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (spec.trim(), None),
        };
        let info = CATALOG
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| ModelError::UnknownCatalog(name.to_string()))?;
        let param = match (param, info.default) {
            (None, d) => d.unwrap_or(0.0),
            (Some(_), None) => {
                return Err(ModelError::Invalid(format!(
                    "catalog entry '{name}' takes no parameter"
                )))
            }
            (Some(text), Some(_)) => text
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| ModelError::Invalid(format!("bad parameter '{text}' for '{name}'")))?,
        };
        if info.entry == Catalog::LinNi && param <= 1.0 {
            return Err(ModelError::Invalid("lin-ni exponent must exceed 1".into()));
        }
        Ok(Nonlinearity(Arc::new(Source::Catalog {
            entry: info.entry,
            param,
        })))
    }

    /// Constant nonlinearity `f = c`.
    pub fn constant(c: f64) -> Nonlinearity {
        Nonlinearity(Arc::new(Source::Catalog {
            entry: Catalog::Constant,
            param: c,
        }))
    }

    /// Linear nonlinearity `f = c u`.
    pub fn linear(c: f64) -> Nonlinearity {
        Nonlinearity(Arc::new(Source::Catalog {
            entry: Catalog::Linear,
            param: c,
        }))
    }

    pub fn value(&self, s: f64, u: f64) -> f64 {
        match &*self.0 {
            Source::Parsed { f, .. } => f.eval(s, u),
            Source::Catalog { entry, param: c } => {
                let c = *c;
                match entry {
                    Catalog::Constant => c,
                    Catalog::Linear => c * u,
                    Catalog::OscSine => u + 0.5 * u * u.sin(),
                    Catalog::Cubic => u * (u - 1.0) * (7.0 - u),
                    Catalog::Exp => u.exp(),
                    Catalog::GelfandPotential => (1.0 - c * s * s) * u.exp(),
                    Catalog::PerturbedGelfand => (c * u / (c + u)).exp(),
                    Catalog::Sine => u.sin(),
                    Catalog::Castro => 6.0 * u / (1.0 + u + 2.0 * u * u),
                    Catalog::LinNi => odd_pow(u, c) + odd_pow(u, 2.0 * c - 1.0),
                }
            }
        }
    }

    /// Partial derivative with respect to `u`.
    pub fn du(&self, s: f64, u: f64) -> f64 {
        match &*self.0 {
            Source::Parsed { du, .. } => du.eval(s, u),
            Source::Catalog { entry, param: c } => {
                let c = *c;
                match entry {
                    Catalog::Constant => 0.0,
                    Catalog::Linear => c,
                    Catalog::OscSine => 1.0 + 0.5 * u.sin() + 0.5 * u * u.cos(),
                    Catalog::Cubic => -3.0 * u * u + 16.0 * u - 7.0,
                    Catalog::Exp => u.exp(),
                    Catalog::GelfandPotential => (1.0 - c * s * s) * u.exp(),
                    Catalog::PerturbedGelfand => {
                        let d = c + u;
                        (c * u / d).exp() * c * c / (d * d)
                    }
                    Catalog::Sine => u.cos(),
                    Catalog::Castro => {
                        let d = 1.0 + u + 2.0 * u * u;
                        6.0 * (1.0 - 2.0 * u * u) / (d * d)
                    }
                    Catalog::LinNi => odd_pow_d(u, c) + odd_pow_d(u, 2.0 * c - 1.0),
                }
            }
        }
    }

    /// Partial derivative with respect to the spatial variable.
    pub fn ds(&self, s: f64, u: f64) -> f64 {
        match &*self.0 {
            Source::Parsed { ds, .. } => ds.eval(s, u),
            Source::Catalog {
                entry: Catalog::GelfandPotential,
                param,
            } => -2.0 * param * s * u.exp(),
            Source::Catalog { .. } => 0.0,
        }
    }

    /// True when `f` does not depend on the spatial variable.
    pub fn is_autonomous(&self) -> bool {
        match &*self.0 {
            Source::Parsed { f, .. } => !f.uses_spatial(),
            Source::Catalog { entry, .. } => *entry != Catalog::GelfandPotential,
        }
    }

    /// Parsed expression tree, if this nonlinearity came from text.
    pub fn expr(&self) -> Option<&Expr> {
        match &*self.0 {
            Source::Parsed { f, .. } => Some(f),
            Source::Catalog { .. } => None,
        }
    }

    /// Human-readable description, e.g. `exp(u)` or `catalog:lin-ni:4`.
    pub fn label(&self) -> String {
        match &*self.0 {
            Source::Parsed { text, .. } => text.clone(),
            Source::Catalog { entry, param } => {
                let info = CATALOG.iter().find(|c| c.entry == *entry).expect("catalog entry");
                match info.default {
                    Some(_) => format!("catalog:{}:{}", info.name, param),
                    None => format!("catalog:{}", info.name),
                }
            }
        }
    }
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Nonlinearity({})", self.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fd_check(nl: &Nonlinearity, s: f64, u: f64) -> f64 {
        let h = 1e-6 * u.abs().max(1.0);
        let fd = (nl.value(s, u + h) - nl.value(s, u - h)) / (2.0 * h);
        let exact = nl.du(s, u);
        (exact - fd).abs() / exact.abs().max(1.0)
    }

    #[test]
    fn identity_expression() {
        let nl = parse_nonlinearity("u", &[Var::U]).unwrap();
        assert_eq!(nl.value(0.0, 2.0), 2.0);
        assert_eq!(nl.du(0.0, 2.0), 1.0);
        assert!(nl.is_autonomous());
    }

    #[test]
    fn gelfand_potential_values() {
        for nl in [
            parse_nonlinearity("(1 - 1.1*r^2)*exp(u)", &[Var::R, Var::U]).unwrap(),
            Nonlinearity::catalog("gelfand-potential").unwrap(),
        ] {
            assert_eq!(nl.value(0.0, 0.0), 1.0);
            assert!((nl.value(1.0, 0.0) + 0.1).abs() < 1e-15);
            assert!(!nl.is_autonomous());
            assert!((nl.ds(0.5, 0.0) + 1.1).abs() < 1e-14);
        }
    }

    #[test]
    fn catalog_matches_its_formula() {
        for (name, formula) in catalog_names() {
            let cat = Nonlinearity::catalog(name).unwrap();
            let param = match name {
                "constant" | "linear" => "1",
                "gelfand-potential" => "1.1",
                "perturbed-gelfand" => "5",
                "lin-ni" => "4",
                _ => "",
            };
            let text = formula.replace("2c", &format!("2*{param}")).replace('c', param);
            let parsed = parse_nonlinearity(&text, &[Var::R, Var::U]).unwrap();
            for &(s, u) in &[(0.0, 0.3), (0.4, 1.7), (0.9, 2.5), (0.2, 0.05)] {
                let a = cat.value(s, u);
                let b = parsed.value(s, u);
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{name}: {a} vs {b}");
                let a = cat.du(s, u);
                let b = parsed.du(s, u);
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{name} du: {a} vs {b}");
            }
        }
    }

    #[test]
    fn catalog_errors() {
        assert!(matches!(
            Nonlinearity::catalog("nope"),
            Err(ModelError::UnknownCatalog(_))
        ));
        assert!(Nonlinearity::catalog("exp:2").is_err());
        assert!(Nonlinearity::catalog("lin-ni:abc").is_err());
        assert!(Nonlinearity::catalog("lin-ni:0.5").is_err());
        let nl = Nonlinearity::catalog("lin-ni:3").unwrap();
        assert_eq!(nl.value(0.0, 2.0), 8.0 + 32.0);
        assert_eq!(nl.label(), "catalog:lin-ni:3");
    }

    #[test]
    fn lin_ni_is_odd_below_zero() {
        let nl = Nonlinearity::catalog("lin-ni:4").unwrap();
        assert_eq!(nl.value(0.0, -1e-3), 1e-12 - 1e-21);
        let frac = Nonlinearity::catalog("lin-ni:2.5").unwrap();
        assert!(frac.value(0.0, -0.5).is_finite());
        assert!(frac.value(0.0, -0.5) < 0.0);
    }

    proptest! {
        #[test]
        fn catalog_derivatives_match_finite_differences(u in -3.0f64..3.0, s in 0.0f64..1.0) {
            for (name, _) in catalog_names() {
                let nl = Nonlinearity::catalog(name).unwrap();
                // Keep away from the pole of the perturbed Gelfand term.
                let u = if name == "perturbed-gelfand" { u.abs() } else { u };
                prop_assert!(fd_check(&nl, s, u) <= 1e-6, "{} at u={}", name, u);
            }
        }

        #[test]
        fn parsed_derivative_matches_finite_differences(u in -2.0f64..2.0, c in 0.1f64..3.0) {
            let text = format!("u^3*cos(u) + {c}*exp(-u^2)/(1 + u^2) - log(2 + sin(u))");
            let nl = parse_nonlinearity(&text, &[Var::U]).unwrap();
            prop_assert!(fd_check(&nl, 0.0, u) <= 1e-6);
        }

        #[test]
        fn evaluation_is_pure(u in -5.0f64..5.0) {
            let nl = parse_nonlinearity("u + 0.5*u*sin(u)", &[Var::U]).unwrap();
            prop_assert_eq!(nl.value(0.0, u).to_bits(), nl.value(0.0, u).to_bits());
        }
    }
}
