//! Perturbative amplitudes in powers of `ẑ = z/k²` and `γ̂ = γ/k²`.
//!
//! First order is available for any profile ([`born1_general`]) and as closed
//! sums over Fourier coefficients ([`born1_fourier`]). Second order is
//! computed numerically at any `k` ([`born2_general`]) or in closed form at
//! the resonant wavenumbers `k = sK/2` ([`born2_resonance`]). Both second-order
//! paths produce a [`SecondOrderExpansion`], so their coefficients can be
//! compared term by term.

mod first;
mod resonance;
mod second;

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{resonance_index, Amplitudes, Method, NonlinearitySpec, PotentialSpec, Rt};

pub use first::{born1_fourier, born1_general, first_order_fields, profile_transform};
pub use resonance::{born2_resonance, resonance_expansion};
pub use second::{born2_general, second_order_expansion};

/// Offsets `|θ| < LIMIT_TOL·K` from a removable singularity use the analytic limit.
pub const LIMIT_TOL: f64 = 1e-8;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `∫₀^L e^{iθx} dx`, switching to `L + iθL²/2` when `θ` is within
/// `LIMIT_TOL·scale` of zero.
pub(crate) fn phase_integral(theta: f64, length: f64, scale: f64) -> Complex64 {
    if theta.abs() < LIMIT_TOL * scale {
        Complex64::new(length, 0.5 * theta * length * length)
    } else {
        crate::quadrature::exp_integral(theta, length)
    }
}

/// Everything the closed-form expressions need.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbativeInputs {
    pub zhat: f64,
    pub ghat: f64,
    pub k: f64,
    pub lattice_k: f64,
    pub length: f64,
    /// Number of periods, when `L` is a multiple of `2π/K`.
    pub m: Option<u32>,
    /// Resonance index, when `2k = sK`.
    pub s: Option<u32>,
    pub coefficients: BTreeMap<i32, Complex64>,
    /// `|N₋|²`
    pub n_minus_sq: f64,
    /// `|N₊|²`
    pub n_plus_sq: f64,
}

impl PerturbativeInputs {
    /// Inputs for a Fourier-form potential and a Kerr nonlinearity.
    pub fn new(pot: &PotentialSpec, nl: &NonlinearitySpec, k: f64, n_minus: Complex64, n_plus: Complex64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
        }
        let coefficients = pot
            .coefficients()
            .ok_or_else(|| Error::Precondition("closed forms need a Fourier-form potential".into()))?
            .clone();
        if !nl.is_kerr() {
            return Err(Error::Precondition("closed forms assume a Kerr nonlinearity".into()));
        }
        let k2 = k * k;
        Ok(PerturbativeInputs {
            zhat: pot.strength() / k2,
            ghat: nl.gamma / k2,
            k,
            lattice_k: pot.lattice_k(),
            length: pot.length(),
            m: pot.period_count().ok(),
            s: resonance_index(k, pot.lattice_k()),
            coefficients,
            n_minus_sq: n_minus.norm_sqr(),
            n_plus_sq: n_plus.norm_sqr(),
        })
    }

    pub fn c(&self, n: i32) -> Complex64 {
        self.coefficients.get(&n).copied().unwrap_or_default()
    }

    /// `(s, m)` or a precondition error.
    pub fn resonance(&self) -> Result<(u32, u32)> {
        match (self.s, self.m) {
            (Some(s), Some(m)) => Ok((s, m)),
            (None, _) => Err(Error::Precondition(format!(
                "k = {} is not a resonant wavenumber sK/2 for K = {}",
                self.k, self.lattice_k
            ))),
            (_, None) => Err(Error::Precondition(format!(
                "L = {} is not an integer number of periods",
                self.length
            ))),
        }
    }
}

/// Which second-order terms enter the amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TermSet {
    /// `ẑ`, `γ̂`, `γ̂ẑ` and `ẑ²`, without the `γ̂²` self-coupling of the
    /// nonlinearity.
    #[default]
    NoSelfCoupling,
    /// All second-order terms including `γ̂²`.
    Full,
}

/// Coefficients of the expansion of one side's amplitudes,
/// `R = ẑ r_z + γ̂ r_g + γ̂ẑ r_gz + ẑ² r_zz + γ̂² r_gg` and
/// `T = 1 + ẑ t_z + γ̂ t_g + γ̂ẑ t_gz + ẑ² t_zz + γ̂² t_gg`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SideCoefficients {
    pub r_z: Complex64,
    pub r_g: Complex64,
    pub r_gz: Complex64,
    pub r_zz: Complex64,
    pub r_gg: Complex64,
    pub t_z: Complex64,
    pub t_g: Complex64,
    pub t_gz: Complex64,
    pub t_zz: Complex64,
    pub t_gg: Complex64,
}

impl SideCoefficients {
    /// `(R, T)` at couplings `(ẑ, γ̂)`.
    pub fn evaluate(&self, zhat: f64, ghat: f64, terms: TermSet) -> (Complex64, Complex64) {
        let gg = match terms {
            TermSet::NoSelfCoupling => 0.0,
            TermSet::Full => ghat * ghat,
        };
        let r = zhat * self.r_z + ghat * self.r_g + ghat * zhat * self.r_gz + zhat * zhat * self.r_zz + gg * self.r_gg;
        let t = 1.0 + zhat * self.t_z + ghat * self.t_g + ghat * zhat * self.t_gz + zhat * zhat * self.t_zz + gg * self.t_gg;
        (r, t)
    }

    pub fn components(&self) -> [Complex64; 10] {
        [
            self.r_z, self.r_g, self.r_gz, self.r_zz, self.r_gg, self.t_z, self.t_g, self.t_gz, self.t_zz, self.t_gg,
        ]
    }

    pub fn max_diff(&self, other: &SideCoefficients) -> f64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Second-order expansion of both sides at fixed `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderExpansion {
    pub zhat: f64,
    pub ghat: f64,
    /// Right incidence: `R^r`, `T^r`.
    pub right: SideCoefficients,
    /// Left incidence: `R^l`, `T^l`.
    pub left: SideCoefficients,
}

impl SecondOrderExpansion {
    pub fn rt(&self, terms: TermSet) -> Rt {
        let (rr, tr) = self.right.evaluate(self.zhat, self.ghat, terms);
        let (rl, tl) = self.left.evaluate(self.zhat, self.ghat, terms);
        Rt { rr, rl, tr, tl }
    }

    pub fn amplitudes(&self, terms: TermSet, method: Method) -> Result<Amplitudes> {
        Amplitudes::new(self.rt(terms), method)
    }

    /// First-order truncation of the same expansion.
    pub fn first_order(&self) -> Rt {
        let side = |c: &SideCoefficients| {
            (self.zhat * c.r_z + self.ghat * c.r_g, 1.0 + self.zhat * c.t_z + self.ghat * c.t_g)
        };
        let (rr, tr) = side(&self.right);
        let (rl, tl) = side(&self.left);
        Rt { rr, rl, tr, tl }
    }

    pub fn max_diff(&self, other: &SecondOrderExpansion) -> f64 {
        self.right.max_diff(&other.right).max(self.left.max_diff(&other.left))
    }
}
