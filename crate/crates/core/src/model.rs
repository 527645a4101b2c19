//! Potentials, nonlinearities, incidence data and amplitude records.
//!
//! A slab occupies `[0, L]`. Inside it the wave equation is
//!
//! ```text
//! -ψ'' + z f(x) ψ + γ F(|ψ|) ψ = k² ψ
//! ```
//!
//! and both the potential `z f(x)` and the nonlinear term vanish outside.
//! `f` is either a finite Fourier sum `Σ c_n e^{inKx}` or a tabulated profile.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Relative tolerance for deciding that `L` is an integer number of periods.
pub const INTEGER_TOL: f64 = 1e-9;

/// Profiles whose modulus exceeds this bound trigger a warning.
pub const PROFILE_WARN_BOUND: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// Sparse Fourier coefficients `n -> c_n` of `f(x) = Σ c_n e^{inKx}`.
    Fourier(BTreeMap<i32, Complex64>),
    /// Values on uniform nodes `x_j = j L / (N - 1)`, linearly interpolated.
    Sampled(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    length: f64,
    lattice_k: f64,
    strength: f64,
    profile: Profile,
}

impl PotentialSpec {
    pub fn fourier<I>(length: f64, lattice_k: f64, strength: f64, coefficients: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i32, Complex64)>,
    {
        let mut map = BTreeMap::new();
        for (n, c) in coefficients {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Domain(format!("coefficient c_{n} is not finite")));
            }
            if map.insert(n, c).is_some() {
                return Err(Error::Domain(format!("coefficient c_{n} given twice")));
            }
        }
        Self::build(length, lattice_k, strength, Profile::Fourier(map))
    }

    /// Tabulated profile on `[0, length]`; the lattice wavenumber is set to `2π / length`.
    pub fn sampled(length: f64, strength: f64, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Domain(format!(
                "a sampled profile needs at least 2 nodes, got {}",
                samples.len()
            )));
        }
        if samples.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Domain("sampled profile contains non-finite values".into()));
        }
        Self::build(length, 2.0 * PI / length, strength, Profile::Sampled(samples))
    }

    /// The empty slab: `f ≡ 0`.
    pub fn zero(length: f64, lattice_k: f64) -> Result<Self> {
        Self::build(length, lattice_k, 0.0, Profile::Fourier(BTreeMap::new()))
    }

    fn build(length: f64, lattice_k: f64, strength: f64, profile: Profile) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Domain(format!("slab length must be positive, got {length}")));
        }
        if !(lattice_k.is_finite() && lattice_k > 0.0) {
            return Err(Error::Domain(format!("lattice wavenumber must be positive, got {lattice_k}")));
        }
        if !strength.is_finite() {
            return Err(Error::Domain("coupling strength is not finite".into()));
        }
        let spec = PotentialSpec { length, lattice_k, strength, profile };
        let bound = spec.max_abs_profile();
        if bound > PROFILE_WARN_BOUND {
            log::warn!("max |f(x)| ≈ {bound:.3} exceeds {PROFILE_WARN_BOUND}; perturbative results may be unreliable");
        }
        Ok(spec)
    }

    /// Same profile with a different coupling `z`.
    pub fn with_strength(&self, strength: f64) -> Self {
        PotentialSpec { strength, ..self.clone() }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn lattice_k(&self) -> f64 {
        self.lattice_k
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn coefficients(&self) -> Option<&BTreeMap<i32, Complex64>> {
        match &self.profile {
            Profile::Fourier(map) => Some(map),
            Profile::Sampled(_) => None,
        }
    }

    /// `c_n`, zero when absent (or for sampled profiles).
    pub fn coefficient(&self, n: i32) -> Complex64 {
        self.coefficients()
            .and_then(|map| map.get(&n).copied())
            .unwrap_or_default()
    }

    /// Lattice period `ℓ = 2π / K`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.lattice_k
    }

    /// The integer `m` with `L = m ℓ`.
    pub fn period_count(&self) -> Result<u32> {
        let ratio = self.length / self.period();
        let m = ratio.round();
        if m < 1.0 || (ratio - m).abs() > INTEGER_TOL * ratio {
            return Err(Error::Precondition(format!(
                "slab length is {ratio} lattice periods, not an integer"
            )));
        }
        Ok(m as u32)
    }

    /// `f(x)`, zero outside `[0, L]`.
    pub fn eval_f(&self, x: f64) -> Result<Complex64> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("cannot evaluate the profile at x = {x}")));
        }
        Ok(self.profile_at(x))
    }

    /// Unchecked version of [`eval_f`](Self::eval_f) for hot loops.
    pub fn profile_at(&self, x: f64) -> Complex64 {
        if !(0.0..=self.length).contains(&x) {
            return Complex64::new(0.0, 0.0);
        }
        match &self.profile {
            Profile::Fourier(map) => map
                .iter()
                .map(|(&n, &c)| c * Complex64::cis(n as f64 * self.lattice_k * x))
                .sum(),
            Profile::Sampled(values) => {
                let last = values.len() - 1;
                let t = x / self.length * last as f64;
                let j = (t.floor() as usize).min(last - 1);
                let w = t - j as f64;
                values[j] * (1.0 - w) + values[j + 1] * w
            }
        }
    }

    /// `v(x) = z f(x) χ(x)`.
    pub fn potential(&self, x: f64) -> Complex64 {
        self.strength * self.profile_at(x)
    }

    /// Upper estimate of `max |f|` on the slab.
    pub fn max_abs_profile(&self) -> f64 {
        match &self.profile {
            Profile::Fourier(map) => map.values().map(|c| c.norm()).sum(),
            Profile::Sampled(values) => values.iter().map(|c| c.norm()).fold(0.0, f64::max),
        }
    }
}

/// Optical potential `v(x) = k² [1 - ε(x)]` of a permittivity tabulated on
/// uniform nodes of `[0, length]`. The coupling is absorbed into the profile.
pub fn potential_from_permittivity(
    permittivity: &[Complex64],
    length: f64,
    k: f64,
) -> Result<PotentialSpec> {
    if permittivity.is_empty() {
        return Err(Error::Domain("empty permittivity table".into()));
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
    }
    let k2 = k * k;
    let mut samples: Vec<Complex64> = permittivity.iter().map(|&eps| k2 * (1.0 - eps)).collect();
    if samples.len() == 1 {
        // a single node describes a homogeneous slab
        samples.push(samples[0]);
    }
    PotentialSpec::sampled(length, 1.0, samples)
}

/// Response function `F(|ψ|)` of an incoherent nonlinearity.
#[derive(Clone)]
pub enum NonlinearityKind {
    /// `F(|ψ|) = |ψ|²`.
    Kerr,
    Custom(Arc<dyn Fn(f64) -> Complex64 + Send + Sync>),
}

impl fmt::Debug for NonlinearityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonlinearityKind::Kerr => write!(f, "Kerr"),
            NonlinearityKind::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NonlinearitySpec {
    pub gamma: f64,
    pub kind: NonlinearityKind,
}

impl NonlinearitySpec {
    pub fn kerr(gamma: f64) -> Self {
        NonlinearitySpec { gamma, kind: NonlinearityKind::Kerr }
    }

    pub fn custom<F>(gamma: f64, response: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        NonlinearitySpec { gamma, kind: NonlinearityKind::Custom(Arc::new(response)) }
    }

    pub fn linear() -> Self {
        Self::kerr(0.0)
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        NonlinearitySpec { gamma, kind: self.kind.clone() }
    }

    pub fn is_kerr(&self) -> bool {
        matches!(self.kind, NonlinearityKind::Kerr)
    }

    /// `F(|ψ|)` without the coupling.
    pub fn response(&self, modulus: f64) -> Complex64 {
        match &self.kind {
            NonlinearityKind::Kerr => Complex64::new(modulus * modulus, 0.0),
            NonlinearityKind::Custom(f) => f(modulus),
        }
    }

    /// `γ F(|ψ|)`.
    pub fn term(&self, modulus: f64) -> Complex64 {
        if self.gamma == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.gamma * self.response(modulus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// Incident from the left; the field is fixed to `N₊ e^{ik(x-L)}` beyond the slab.
    Left,
    /// Incident from the right; the field is fixed to `N₋ e^{-ikx}` before the slab.
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Incidence {
    k: f64,
    direction: Direction,
    amplitude: Complex64,
}

impl Incidence {
    pub fn new(k: f64, direction: Direction, amplitude: Complex64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
        }
        if amplitude.norm() == 0.0 || !amplitude.norm().is_finite() {
            return Err(Error::Domain("incident amplitude must be finite and nonzero".into()));
        }
        Ok(Incidence { k, direction, amplitude })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn amplitude(&self) -> Complex64 {
        self.amplitude
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Direct,
    Born1,
    Born2,
    ResonanceClosedForm,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Method::Direct => "direct",
            Method::Born1 => "born1",
            Method::Born2 => "born2",
            Method::ResonanceClosedForm => "born2-resonance",
        };
        f.write_str(name)
    }
}

/// Fourier transforms of the source terms that fix the amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transforms {
    /// `X̃(0)`
    pub x0: Complex64,
    /// `X̃(2k)`
    pub x2k: Complex64,
    /// `Ỹ(0)`
    pub y0: Complex64,
    /// `Ỹ(-2k)`
    pub ym2k: Complex64,
}

impl Transforms {
    pub fn zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Transforms { x0: z, x2k: z, y0: z, ym2k: z }
    }
}

/// Bare reflection/transmission quadruple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rt {
    pub rr: Complex64,
    pub rl: Complex64,
    pub tr: Complex64,
    pub tl: Complex64,
}

impl Rt {
    pub fn identity() -> Self {
        Rt {
            rr: Complex64::new(0.0, 0.0),
            rl: Complex64::new(0.0, 0.0),
            tr: Complex64::new(1.0, 0.0),
            tl: Complex64::new(1.0, 0.0),
        }
    }

    pub fn components(&self) -> [Complex64; 4] {
        [self.rr, self.rl, self.tr, self.tl]
    }

    /// Largest componentwise distance.
    pub fn max_diff(&self, other: &Rt) -> f64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Amplitudes {
    pub rr: Complex64,
    pub rl: Complex64,
    pub tr: Complex64,
    pub tl: Complex64,
    pub method: Method,
    pub aux: Option<Transforms>,
}

impl Amplitudes {
    /// Perturbative or closed-form amplitudes.
    pub fn new(rt: Rt, method: Method) -> Result<Self> {
        if method == Method::Direct {
            return Err(Error::Precondition("direct amplitudes must carry their transforms".into()));
        }
        Self::checked(rt, method, None)
    }

    pub fn direct(rt: Rt, transforms: Transforms) -> Result<Self> {
        Self::checked(rt, Method::Direct, Some(transforms))
    }

    fn checked(rt: Rt, method: Method, aux: Option<Transforms>) -> Result<Self> {
        if !rt.is_finite() {
            return Err(Error::Domain(format!("{method} amplitudes are not finite")));
        }
        Ok(Amplitudes { rr: rt.rr, rl: rt.rl, tr: rt.tr, tl: rt.tl, method, aux })
    }

    pub fn rt(&self) -> Rt {
        Rt { rr: self.rr, rl: self.rl, tr: self.tr, tl: self.tl }
    }

    pub fn max_diff(&self, other: &Amplitudes) -> f64 {
        self.rt().max_diff(&other.rt())
    }
}

/// A wavenumber `k = sK/2` at which the first-order amplitudes collapse onto single coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resonance {
    pub s: u32,
    pub m: u32,
    pub k: f64,
}

/// `k = sK/2 = m s π / L` for `s = 1..=s_max`.
pub fn resonant_wavenumbers(spec: &PotentialSpec, s_max: u32) -> Result<Vec<Resonance>> {
    if s_max < 1 {
        return Err(Error::Precondition("s_max must be at least 1".into()));
    }
    let m = spec.period_count()?;
    Ok((1..=s_max)
        .map(|s| Resonance { s, m, k: s as f64 * spec.lattice_k() / 2.0 })
        .collect())
}

/// The `s` with `2k = sK`, if `k` is resonant to relative tolerance [`INTEGER_TOL`].
pub fn resonance_index(k: f64, lattice_k: f64) -> Option<u32> {
    let ratio = 2.0 * k / lattice_k;
    let s = ratio.round();
    (s >= 1.0 && (ratio - s).abs() <= INTEGER_TOL * ratio).then_some(s as u32)
}
