use super::{ModelError, Nonlinearity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    RadialDirichlet,
    RadialNeumann,
    PLaplaceDirichlet,
    NonAutonomousRadial,
    ClampedBeam,
    HarmonicForced,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::RadialDirichlet => "dirichlet",
            Family::RadialNeumann => "neumann",
            Family::PLaplaceDirichlet => "plaplace",
            Family::NonAutonomousRadial => "nonauto",
            Family::ClampedBeam => "beam",
            Family::HarmonicForced => "harmonic",
        }
    }

    pub fn is_radial(self) -> bool {
        matches!(
            self,
            Family::RadialDirichlet | Family::RadialNeumann | Family::PLaplaceDirichlet | Family::NonAutonomousRadial
        )
    }
}

/// A boundary-value problem: family, parameters and nonlinearity.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub family: Family,
    /// Space dimension for the radial families.
    pub n: u32,
    /// p-Laplace exponent; 2 for every other family.
    pub p: f64,
    /// Supercritical exponent, carried for reporting only.
    pub q: Option<f64>,
    pub nonlinearity: Nonlinearity,
    /// Forcing `e(x)` of the harmonic family.
    pub forcing: Option<Nonlinearity>,
    /// Harmonic index `k` of the harmonic family.
    pub harmonic_index: u32,
}

impl ProblemSpec {
    fn base(family: Family, n: u32, f: Nonlinearity) -> ProblemSpec {
        ProblemSpec {
            family,
            n,
            p: 2.0,
            q: None,
            nonlinearity: f,
            forcing: None,
            harmonic_index: 1,
        }
    }

    pub fn dirichlet(n: u32, f: Nonlinearity) -> ProblemSpec {
        Self::base(Family::RadialDirichlet, n, f)
    }

    pub fn neumann(n: u32, f: Nonlinearity) -> ProblemSpec {
        Self::base(Family::RadialNeumann, n, f)
    }

    pub fn plaplace(n: u32, p: f64, f: Nonlinearity) -> ProblemSpec {
        ProblemSpec {
            p,
            ..Self::base(Family::PLaplaceDirichlet, n, f)
        }
    }

    pub fn nonautonomous(n: u32, f: Nonlinearity) -> ProblemSpec {
        Self::base(Family::NonAutonomousRadial, n, f)
    }

    pub fn beam(f: Nonlinearity) -> ProblemSpec {
        Self::base(Family::ClampedBeam, 1, f)
    }

    pub fn harmonic(f: Nonlinearity, forcing: Option<Nonlinearity>, k: u32) -> ProblemSpec {
        ProblemSpec {
            forcing,
            harmonic_index: k,
            ..Self::base(Family::HarmonicForced, 1, f)
        }
    }

    pub fn with_q(mut self, q: f64) -> ProblemSpec {
        self.q = Some(q);
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n < 1 {
            return Err(ModelError::Invalid("space dimension n must be at least 1".into()));
        }
        if !(self.p > 1.0) || !self.p.is_finite() {
            return Err(ModelError::Invalid("p must exceed 1".into()));
        }
        match self.family {
            Family::RadialDirichlet | Family::RadialNeumann | Family::PLaplaceDirichlet => {
                if !self.nonlinearity.is_autonomous() {
                    return Err(ModelError::Invalid(format!(
                        "{} problems need an autonomous nonlinearity f(u)",
                        self.family.name()
                    )));
                }
            }
            Family::HarmonicForced => {
                if !self.nonlinearity.is_autonomous() {
                    return Err(ModelError::Invalid("harmonic problems need f(u) without x".into()));
                }
                if !(1..=2).contains(&self.harmonic_index) {
                    return Err(ModelError::Invalid("harmonic index k must be 1 or 2".into()));
                }
            }
            Family::NonAutonomousRadial | Family::ClampedBeam => {}
        }
        if self.family != Family::HarmonicForced && self.forcing.is_some() {
            return Err(ModelError::Invalid("forcing only applies to harmonic problems".into()));
        }
        Ok(())
    }
}
