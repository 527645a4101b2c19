//! TOML configuration: `[potential]`, `[nonlinearity]`, `[incidence]` and
//! `[numerics]`.
//!
//! ```toml
//! [potential]
//! periods = 1                 # L = 2π·periods/K; or `length = ...`
//! lattice_k = 1.0
//! zhat = 1e-2                 # z = zhat·k²; or a fixed `strength = ...`
//! coefficients = [[-2, 0.5, 0.0], [4, 0.35, 0.0], [-6, -0.15, 0.0]]
//!
//! [nonlinearity]
//! kind = "kerr"               # "kerr", "power" (with `exponent`) or "linear"
//! ghat = 1e-3                 # γ = ghat·k²; or a fixed `gamma = ...`
//!
//! [incidence]
//! n_minus = [1.0, 0.0]
//! n_plus = [1.0, 0.0]
//!
//! [numerics]
//! grid_size = 4096            # intervals per period
//! tol = 1e-10
//! classify_tol = 1e-6
//! ```

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::direct::{SolverSettings, MIN_GRID};
use crate::error::{Error, Result};
use crate::model::{NonlinearitySpec, PotentialSpec};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    potential: RawPotential,
    #[serde(default)]
    nonlinearity: RawNonlinearity,
    #[serde(default)]
    incidence: RawIncidence,
    #[serde(default)]
    numerics: RawNumerics,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPotential {
    length: Option<f64>,
    periods: Option<u32>,
    lattice_k: Option<f64>,
    strength: Option<f64>,
    zhat: Option<f64>,
    coefficients: Option<Vec<(i32, f64, f64)>>,
    samples: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawNonlinearity {
    kind: Option<String>,
    gamma: Option<f64>,
    ghat: Option<f64>,
    exponent: Option<f64>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawIncidence {
    n_minus: Option<(f64, f64)>,
    n_plus: Option<(f64, f64)>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawNumerics {
    grid_size: Option<usize>,
    tol: Option<f64>,
    classify_tol: Option<f64>,
}

/// A coupling given either outright or in units of `k²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Fixed(f64),
    PerK2(f64),
}

impl Coupling {
    pub fn at(&self, k: f64) -> f64 {
        match *self {
            Coupling::Fixed(v) => v,
            Coupling::PerK2(h) => h * k * k,
        }
    }

    fn pick(fixed: Option<f64>, hat: Option<f64>, what: &str) -> Result<Self> {
        let c = match (fixed, hat) {
            (Some(_), Some(_)) => return Err(Error::Config(format!("give either the fixed or the hat form of the {what}, not both"))),
            (Some(v), None) => Coupling::Fixed(v),
            (None, Some(h)) => Coupling::PerK2(h),
            (None, None) => Coupling::Fixed(0.0),
        };
        let v = match c {
            Coupling::Fixed(v) | Coupling::PerK2(v) => v,
        };
        if !v.is_finite() {
            return Err(Error::Config(format!("{what} is not finite")));
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NonlinearityKind {
    Kerr,
    /// `F(|ψ|) = |ψ|^p`
    Power(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Potential with unit strength; the coupling is applied per `k`.
    pub shape: PotentialSpec,
    /// Number of periods when the length was given that way.
    pub periods: Option<u32>,
    pub strength: Coupling,
    pub nonlinearity: NonlinearityKind,
    pub gamma: Coupling,
    pub n_minus: Complex64,
    pub n_plus: Complex64,
    /// Grid intervals per period `2π/K`.
    pub grid_per_period: usize,
    pub tol: f64,
    pub classify_tol: f64,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let p = raw.potential;
        let lattice_k = p.lattice_k.unwrap_or(1.0);
        if !(lattice_k.is_finite() && lattice_k > 0.0) {
            return Err(Error::Config(format!("lattice_k must be positive, got {lattice_k}")));
        }
        let length = match (p.length, p.periods) {
            (Some(_), Some(_)) => return Err(Error::Config("give either length or periods, not both".into())),
            (Some(l), None) => l,
            (None, Some(m)) if m >= 1 => 2.0 * PI * m as f64 / lattice_k,
            (None, Some(_)) => return Err(Error::Config("periods must be at least 1".into())),
            (None, None) => return Err(Error::Config("potential needs length or periods".into())),
        };
        let shape = match (p.coefficients, p.samples) {
            (Some(_), Some(_)) => return Err(Error::Config("give either coefficients or samples, not both".into())),
            (Some(cs), None) => PotentialSpec::fourier(
                length,
                lattice_k,
                1.0,
                cs.into_iter().map(|(n, re, im)| (n, Complex64::new(re, im))),
            ),
            (None, Some(samples)) => {
                if p.lattice_k.is_some() {
                    return Err(Error::Config("lattice_k does not apply to sampled profiles".into()));
                }
                PotentialSpec::sampled(length, 1.0, samples.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
            }
            (None, None) => PotentialSpec::zero(length, lattice_k),
        }
        .map_err(|e| Error::Config(e.to_string()))?;
        let strength = Coupling::pick(p.strength, p.zhat, "potential strength")?;

        let nl = raw.nonlinearity;
        let gamma = Coupling::pick(nl.gamma, nl.ghat, "nonlinear coupling")?;
        let nonlinearity = match nl.kind.as_deref().unwrap_or("kerr") {
            "kerr" => {
                if nl.exponent.is_some() {
                    return Err(Error::Config("exponent only applies to kind = \"power\"".into()));
                }
                NonlinearityKind::Kerr
            }
            "power" => {
                let p = nl.exponent.ok_or_else(|| Error::Config("kind = \"power\" needs an exponent".into()))?;
                if !(p.is_finite() && p >= 0.0) {
                    return Err(Error::Config(format!("exponent must be non-negative, got {p}")));
                }
                NonlinearityKind::Power(p)
            }
            "linear" => {
                if gamma != Coupling::Fixed(0.0) {
                    return Err(Error::Config("kind = \"linear\" takes no coupling".into()));
                }
                NonlinearityKind::Kerr
            }
            other => return Err(Error::Config(format!("unknown nonlinearity kind {other:?}"))),
        };

        let amp = |v: Option<(f64, f64)>, name: &str| -> Result<Complex64> {
            let (re, im) = v.unwrap_or((1.0, 0.0));
            let c = Complex64::new(re, im);
            if !(c.re.is_finite() && c.im.is_finite()) || c.norm() == 0.0 {
                return Err(Error::Config(format!("{name} must be finite and nonzero")));
            }
            Ok(c)
        };
        let n_minus = amp(raw.incidence.n_minus, "n_minus")?;
        let n_plus = amp(raw.incidence.n_plus, "n_plus")?;

        let num = raw.numerics;
        let grid_per_period = num.grid_size.unwrap_or(4096);
        let tol = num.tol.unwrap_or(1e-10);
        let classify_tol = num.classify_tol.unwrap_or(1e-6);
        if grid_per_period < MIN_GRID {
            return Err(Error::Config(format!("grid_size must be at least {MIN_GRID}")));
        }
        if !(tol > 0.0 && tol.is_finite()) || !(classify_tol > 0.0 && classify_tol.is_finite()) {
            return Err(Error::Config("tolerances must be positive".into()));
        }

        Ok(Config {
            shape,
            periods: p.periods,
            strength,
            nonlinearity,
            gamma,
            n_minus,
            n_plus,
            grid_per_period,
            tol,
            classify_tol,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// The same configuration over `m` periods.
    pub fn with_periods(&self, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::Config("periods must be at least 1".into()));
        }
        let coefficients = self
            .shape
            .coefficients()
            .ok_or_else(|| Error::Config("changing the number of periods needs a Fourier-form potential".into()))?;
        let kk = self.shape.lattice_k();
        let shape = PotentialSpec::fourier(2.0 * PI * m as f64 / kk, kk, 1.0, coefficients.iter().map(|(&n, &c)| (n, c)))?;
        Ok(Config { shape, periods: Some(m), ..self.clone() })
    }

    pub fn potential(&self, k: f64) -> PotentialSpec {
        self.shape.with_strength(self.strength.at(k))
    }

    pub fn nonlinearity(&self, k: f64) -> NonlinearitySpec {
        let gamma = self.gamma.at(k);
        match self.nonlinearity {
            NonlinearityKind::Kerr => NonlinearitySpec::kerr(gamma),
            NonlinearityKind::Power(p) => NonlinearitySpec::custom(gamma, move |r| Complex64::new(r.powf(p), 0.0)),
        }
    }

    pub fn is_kerr(&self) -> bool {
        self.nonlinearity == NonlinearityKind::Kerr
    }

    /// Total grid intervals for the slab.
    pub fn grid_size(&self) -> usize {
        let periods = self.shape.length() / self.shape.period();
        ((self.grid_per_period as f64 * periods).ceil() as usize).max(MIN_GRID)
    }

    pub fn solver_settings(&self) -> SolverSettings {
        SolverSettings { grid_size: self.grid_size(), tol: self.tol }
    }
}
