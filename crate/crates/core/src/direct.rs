//! Nonperturbative amplitudes from direct integration of the nonlinear
//! boundary-value data inside the slab.
//!
//! The right-incident solution `ξ` starts at `x = 0` with `ξ(0) = N₋`,
//! `ξ'(0) = -ikN₋` and is integrated forward; the left-incident `ζ` starts at
//! `x = L` with `ζ(L) = N₊`, `ζ'(L) = ikN₊` and is integrated backward. Since
//! the nonlinearity only sees `|ψ|`, both are plain initial-value problems.
//!
//! Amplitudes are computed twice: from the Jost functions at the far edge and
//! from Fourier transforms of the source terms `X`, `Y`. The two routes are
//! algebraically identical, so their difference measures numerical error.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result, Side};
use crate::format_float;
use crate::model::{Amplitudes, Direction, Incidence, NonlinearitySpec, PotentialSpec, Rt, Transforms};
use crate::ode;
use crate::quadrature::{cumulative, cumulative_from_end, fourier_transform, Grid};

/// Smallest grid accepted by [`solve_field`].
pub const MIN_GRID: usize = 64;

/// Poles are flagged when a denominator drops below this fraction of `2k`.
pub const SINGULARITY_TOL: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Right-incident field, fixed at `x = 0`.
    Xi,
    /// Left-incident field, fixed at `x = L`.
    Zeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// The field `ψ` itself.
    Physical,
    /// `N₋⁻¹ e^{ikx} ξ` or `N₊⁻¹ e^{ik(L-x)} ζ`, which is 1 for an empty slab.
    Reduced,
}

#[derive(Debug, Clone)]
pub struct FieldSolution {
    pub grid: Grid,
    pub psi: Vec<Complex64>,
    pub dpsi: Vec<Complex64>,
    pub which: Branch,
    pub kind: FieldKind,
    pub incidence: Incidence,
}

impl FieldSolution {
    pub fn k(&self) -> f64 {
        self.incidence.k()
    }

    /// Reduced field at the nodes (a copy when already reduced).
    pub fn reduced(&self) -> Vec<Complex64> {
        if self.kind == FieldKind::Reduced {
            return self.psi.clone();
        }
        let k = self.k();
        let n = self.incidence.amplitude();
        let l = self.grid.length();
        self.grid
            .nodes()
            .zip(&self.psi)
            .map(|(x, &p)| match self.which {
                Branch::Xi => Complex64::cis(k * x) * p / n,
                Branch::Zeta => Complex64::cis(k * (l - x)) * p / n,
            })
            .collect()
    }

    /// CSV with columns `x, Re ψ, Im ψ, Re ψ', Im ψ'`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,Re_psi,Im_psi,Re_dpsi,Im_dpsi")?;
        for ((x, p), d) in self.grid.nodes().zip(&self.psi).zip(&self.dpsi) {
            writeln!(
                out,
                "{},{},{},{},{}",
                format_float(x),
                format_float(p.re),
                format_float(p.im),
                format_float(d.re),
                format_float(d.im)
            )?;
        }
        Ok(())
    }
}

/// Integrates the field of one incidence across `[0, L]` and samples it on a
/// grid of `grid_size` intervals.
pub fn solve_field(
    pot: &PotentialSpec,
    nl: &NonlinearitySpec,
    inc: &Incidence,
    grid_size: usize,
    tol: f64,
) -> Result<FieldSolution> {
    if grid_size < MIN_GRID {
        return Err(Error::Precondition(format!("grid_size must be at least {MIN_GRID}, got {grid_size}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!("tolerance must be positive, got {tol}")));
    }
    let grid = Grid::new(pot.length(), grid_size)?;
    let k = inc.k();
    let k2 = k * k;
    let l = pot.length();
    let n = inc.amplitude();

    // ψ'' = (v(x) + γF(|ψ|) - k²) ψ on (Re ψ, Im ψ, Re ψ', Im ψ')
    let rhs = |x: f64, y: &ode::State| -> ode::State {
        let psi = Complex64::new(y[0], y[1]);
        let coef = pot.potential(x) + nl.term(psi.norm()) - k2;
        let acc = coef * psi;
        [y[2], y[3], acc.re, acc.im]
    };

    let (which, x0, x1, psi0, dpsi0) = match inc.direction() {
        Direction::Right => (Branch::Xi, 0.0, l, n, -I * k * n),
        Direction::Left => (Branch::Zeta, l, 0.0, n, I * k * n),
    };
    let mut report: Vec<f64> = grid.nodes().collect();
    if which == Branch::Zeta {
        report.reverse();
    }
    let (states, _) = ode::integrate(rhs, x0, [psi0.re, psi0.im, dpsi0.re, dpsi0.im], x1, &report, tol)?;
    let mut psi: Vec<Complex64> = states.iter().map(|s| Complex64::new(s[0], s[1])).collect();
    let mut dpsi: Vec<Complex64> = states.iter().map(|s| Complex64::new(s[2], s[3])).collect();
    if which == Branch::Zeta {
        psi.reverse();
        dpsi.reverse();
    }
    Ok(FieldSolution { grid, psi, dpsi, which, kind: FieldKind::Physical, incidence: *inc })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jost {
    pub plus: Complex64,
    pub minus: Complex64,
    pub which: Branch,
}

/// `F± = ξ'(L) ± ikξ(L)` or `G± = ζ'(0) ± ikζ(0)`.
pub fn jost_functions(sol: &FieldSolution) -> Result<Jost> {
    if sol.kind != FieldKind::Physical {
        return Err(Error::Precondition("Jost functions need the physical field".into()));
    }
    let k = sol.k();
    let j = match sol.which {
        Branch::Xi => sol.psi.len() - 1,
        Branch::Zeta => 0,
    };
    let (p, d) = (sol.psi[j], sol.dpsi[j]);
    let jost = Jost { plus: d + I * k * p, minus: d - I * k * p, which: sol.which };
    if !(jost.plus.norm().is_finite() && jost.minus.norm().is_finite()) {
        return Err(Error::Domain("Jost functions are not finite".into()));
    }
    Ok(jost)
}

fn check_pair(xi: &FieldSolution, zeta: &FieldSolution) -> Result<f64> {
    if xi.which != Branch::Xi || zeta.which != Branch::Zeta {
        return Err(Error::Precondition("expected a (Xi, Zeta) pair of solutions".into()));
    }
    let k = xi.k();
    if (zeta.k() - k).abs() > 1e-12 * k || xi.grid != zeta.grid {
        return Err(Error::Precondition("solutions were computed at different k or on different grids".into()));
    }
    Ok(k)
}

/// Amplitudes from the Jost functions of both incidences.
pub fn amplitudes_jost(xi: &FieldSolution, zeta: &FieldSolution) -> Result<Rt> {
    let k = check_pair(xi, zeta)?;
    let l = xi.grid.length();
    let f = jost_functions(xi)?;
    let g = jost_functions(zeta)?;
    let scale = SINGULARITY_TOL * 2.0 * k;
    if f.minus.norm() < scale {
        return Err(Error::SpectralSingularity { side: Side::Right, magnitude: f.minus.norm() });
    }
    if g.plus.norm() < scale {
        return Err(Error::SpectralSingularity { side: Side::Left, magnitude: g.plus.norm() });
    }
    let two_ik = 2.0 * I * k;
    let phase = Complex64::cis(-k * l);
    Ok(Rt {
        rr: -Complex64::cis(-2.0 * k * l) * f.plus / f.minus,
        tr: -two_ik * phase * xi.incidence.amplitude() / f.minus,
        rl: -g.minus / g.plus,
        tl: two_ik * phase * zeta.incidence.amplitude() / g.plus,
    })
}

/// A source term `X` or `Y` sampled on the grid, with its transforms at the
/// wavenumbers that enter the amplitudes.
#[derive(Debug, Clone)]
pub struct SourceTerm {
    pub grid: Grid,
    pub values: Vec<Complex64>,
    pub transform_at: Vec<(f64, Complex64)>,
}

impl SourceTerm {
    pub fn new(grid: Grid, values: Vec<Complex64>, qs: &[f64]) -> Self {
        let transform_at = qs.iter().map(|&q| (q, fourier_transform(&grid, &values, q))).collect();
        SourceTerm { grid, values, transform_at }
    }

    /// `∫₀^L e^{-iqx} X(x) dx`, reusing a stored value when available.
    pub fn transform(&self, q: f64) -> Complex64 {
        self.transform_at
            .iter()
            .find(|(p, _)| *p == q)
            .map(|(_, v)| *v)
            .unwrap_or_else(|| fourier_transform(&self.grid, &self.values, q))
    }
}

/// `X = [γF(|N₋ξ̂|) + z f] ξ̂` and `Y = [γF(|N₊ζ̂|) + z f] ζ̂` from the two fields.
pub fn source_terms(
    xi: &FieldSolution,
    zeta: &FieldSolution,
    pot: &PotentialSpec,
    nl: &NonlinearitySpec,
) -> Result<(SourceTerm, SourceTerm)> {
    let k = check_pair(xi, zeta)?;
    let build = |sol: &FieldSolution| -> Vec<Complex64> {
        let n_mod = sol.incidence.amplitude().norm();
        sol.grid
            .nodes()
            .zip(sol.reduced())
            .map(|(x, r)| (nl.term(n_mod * r.norm()) + pot.potential(x)) * r)
            .collect()
    };
    let x_src = SourceTerm::new(xi.grid, build(xi), &[0.0, 2.0 * k]);
    let y_src = SourceTerm::new(zeta.grid, build(zeta), &[0.0, -2.0 * k]);
    Ok((x_src, y_src))
}

pub fn transforms_of(src_x: &SourceTerm, src_y: &SourceTerm, k: f64) -> Transforms {
    Transforms {
        x0: src_x.transform(0.0),
        x2k: src_x.transform(2.0 * k),
        y0: src_y.transform(0.0),
        ym2k: src_y.transform(-2.0 * k),
    }
}

/// Amplitudes from the source transforms:
/// `R^r = X̃(2k)/(2ik - X̃(0))`, `T^r = 2ik/(2ik - X̃(0))` and likewise with `Ỹ`.
pub fn amplitudes_fourier(src_x: &SourceTerm, src_y: &SourceTerm, k: f64) -> Result<Rt> {
    rt_from_transforms(&transforms_of(src_x, src_y, k), k)
}

pub fn rt_from_transforms(t: &Transforms, k: f64) -> Result<Rt> {
    let two_ik = 2.0 * I * k;
    let den_r = two_ik - t.x0;
    let den_l = two_ik - t.y0;
    if den_r.norm() < SINGULARITY_TOL {
        return Err(Error::SpectralSingularity { side: Side::Right, magnitude: den_r.norm() });
    }
    if den_l.norm() < SINGULARITY_TOL {
        return Err(Error::SpectralSingularity { side: Side::Left, magnitude: den_l.norm() });
    }
    Ok(Rt { rr: t.x2k / den_r, tr: two_ik / den_r, rl: t.ym2k / den_l, tl: two_ik / den_l })
}

/// Max-norm residual of the integral equation satisfied by a physical field,
/// `ψ(x) - ψ₀(x) - ∫ sin[k(x - x')]/k · [γF(|ψ|) + z f] ψ dx'`, with the
/// integral running from the fixed edge.
pub fn integral_equation_residual(sol: &FieldSolution, pot: &PotentialSpec, nl: &NonlinearitySpec) -> Result<f64> {
    if sol.kind != FieldKind::Physical {
        return Err(Error::Precondition("residual is defined for the physical field".into()));
    }
    let k = sol.k();
    let h = sol.grid.step();
    let l = sol.grid.length();
    let n = sol.incidence.amplitude();
    let g: Vec<Complex64> = sol
        .grid
        .nodes()
        .zip(&sol.psi)
        .map(|(x, &p)| (nl.term(p.norm()) + pot.potential(x)) * p)
        .collect();
    let with_phase = |sign: f64| -> Vec<Complex64> {
        sol.grid.nodes().zip(&g).map(|(x, &v)| Complex64::cis(sign * k * x) * v).collect()
    };
    let (a, b, free): (Vec<Complex64>, Vec<Complex64>, Box<dyn Fn(f64) -> Complex64>) = match sol.which {
        Branch::Xi => (
            cumulative(&with_phase(-1.0), h),
            cumulative(&with_phase(1.0), h),
            Box::new(move |x| n * Complex64::cis(-k * x)),
        ),
        Branch::Zeta => (
            cumulative_from_end(&with_phase(-1.0), h).into_iter().map(|v| -v).collect(),
            cumulative_from_end(&with_phase(1.0), h).into_iter().map(|v| -v).collect(),
            Box::new(move |x| n * Complex64::cis(k * (x - l))),
        ),
    };
    let two_ik = 2.0 * I * k;
    Ok(sol
        .grid
        .nodes()
        .enumerate()
        .map(|(j, x)| {
            let integral = (Complex64::cis(k * x) * a[j] - Complex64::cis(-k * x) * b[j]) / two_ik;
            (sol.psi[j] - free(x) - integral).norm()
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub grid_size: usize,
    pub tol: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings { grid_size: 4096, tol: 1e-10 }
    }
}

/// Both fields, both source terms and the amplitudes from both routes.
#[derive(Debug, Clone)]
pub struct DirectSolution {
    pub xi: FieldSolution,
    pub zeta: FieldSolution,
    pub source_x: SourceTerm,
    pub source_y: SourceTerm,
    pub jost_route: Rt,
    pub fourier_route: Rt,
    /// Jost-route amplitudes carrying the source transforms.
    pub amplitudes: Amplitudes,
}

impl DirectSolution {
    /// Largest componentwise gap between the Jost and Fourier routes.
    pub fn route_discrepancy(&self) -> f64 {
        self.jost_route.max_diff(&self.fourier_route)
    }
}

pub fn solve_direct(
    pot: &PotentialSpec,
    nl: &NonlinearitySpec,
    k: f64,
    n_minus: Complex64,
    n_plus: Complex64,
    settings: SolverSettings,
) -> Result<DirectSolution> {
    let right = Incidence::new(k, Direction::Right, n_minus)?;
    let left = Incidence::new(k, Direction::Left, n_plus)?;
    let xi = solve_field(pot, nl, &right, settings.grid_size, settings.tol)?;
    let zeta = solve_field(pot, nl, &left, settings.grid_size, settings.tol)?;
    let jost_route = amplitudes_jost(&xi, &zeta)?;
    let (source_x, source_y) = source_terms(&xi, &zeta, pot, nl)?;
    let transforms = transforms_of(&source_x, &source_y, k);
    let fourier_route = rt_from_transforms(&transforms, k)?;
    let amplitudes = Amplitudes::direct(jost_route, transforms)?;
    Ok(DirectSolution { xi, zeta, source_x, source_y, jost_route, fourier_route, amplitudes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn empty() -> PotentialSpec {
        PotentialSpec::zero(2.0 * PI, 1.0).unwrap()
    }

    #[test]
    fn free_right_incident_field() {
        let k = 1.7;
        let inc = Incidence::new(k, Direction::Right, c(1.0)).unwrap();
        let sol = solve_field(&empty(), &NonlinearitySpec::linear(), &inc, 256, 1e-10).unwrap();
        for (x, p) in sol.grid.nodes().zip(&sol.psi) {
            assert!((p - Complex64::cis(-k * x)).norm() < 1e-8, "x = {x}");
        }
        let jost = jost_functions(&sol).unwrap();
        let l = sol.grid.length();
        assert!(jost.plus.norm() < 1e-8);
        assert!((jost.minus - (-2.0 * I * k * Complex64::cis(-k * l))).norm() < 1e-8);
        assert!(sol.reduced().iter().all(|r| (r - 1.0).norm() < 1e-8));
    }

    #[test]
    fn free_left_incident_field() {
        let k = 0.9;
        let inc = Incidence::new(k, Direction::Left, c(1.0)).unwrap();
        let sol = solve_field(&empty(), &NonlinearitySpec::linear(), &inc, 128, 1e-10).unwrap();
        let l = sol.grid.length();
        for (x, p) in sol.grid.nodes().zip(&sol.psi) {
            assert!((p - Complex64::cis(k * (x - l))).norm() < 1e-8, "x = {x}");
        }
        assert_eq!(sol.psi[sol.psi.len() - 1], c(1.0));
        let jost = jost_functions(&sol).unwrap();
        assert!(jost.minus.norm() < 1e-8);
        assert!((jost.plus - 2.0 * I * k * Complex64::cis(-k * l)).norm() < 1e-8);
    }

    #[test]
    fn free_fields_give_unit_transmission() {
        let sol = solve_direct(&empty(), &NonlinearitySpec::linear(), 2.3, c(1.0), c(1.0), SolverSettings::default()).unwrap();
        assert!(sol.jost_route.max_diff(&Rt::identity()) < 1e-9);
        assert!(sol.fourier_route.max_diff(&Rt::identity()) < 1e-12);
        let aux = sol.amplitudes.aux.unwrap();
        assert_eq!(aux, Transforms::zero());
    }

    #[test]
    fn all_zero_transforms() {
        let rt = rt_from_transforms(&Transforms::zero(), 1.3).unwrap();
        assert_eq!(rt, Rt::identity());
    }

    #[test]
    fn pole_in_fourier_route_is_reported() {
        let k = 0.5;
        let mut t = Transforms::zero();
        t.x0 = Complex64::new(0.0, 2.0 * k);
        assert!(matches!(rt_from_transforms(&t, k), Err(Error::SpectralSingularity { side: Side::Right, .. })));
    }

    #[test]
    fn small_grid_is_rejected() {
        let inc = Incidence::new(1.0, Direction::Right, c(1.0)).unwrap();
        assert!(matches!(
            solve_field(&empty(), &NonlinearitySpec::linear(), &inc, 32, 1e-8),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn constant_source_transform() {
        // Kerr only with a reduced field near 1: X ≈ γ|N₋|², X̃(0) ≈ γ|N₋|²L
        let gamma = 1e-6;
        let n = Complex64::new(0.6, 0.8) * 2.0;
        let nl = NonlinearitySpec::kerr(gamma);
        let sol = solve_direct(&empty(), &nl, 2.0, n, n, SolverSettings { grid_size: 512, tol: 1e-11 }).unwrap();
        let expected = gamma * n.norm_sqr() * 2.0 * PI;
        let x0 = sol.source_x.transform(0.0);
        assert!((x0 - expected).norm() < 1e-3 * expected, "{x0} vs {expected}");
    }

    #[test]
    fn exponential_profile_transform_matches_analytic_integral() {
        // X = z f with the reduced field replaced by 1
        let (l, kk, z) = (PI, 1.0, 0.3);
        let pot = PotentialSpec::fourier(l, kk, z, [(1, c(1.0))]).unwrap();
        let grid = Grid::new(l, 1024).unwrap();
        let values: Vec<Complex64> = grid.nodes().map(|x| pot.potential(x)).collect();
        let src = SourceTerm::new(grid, values, &[0.0]);
        let exact = z * (Complex64::cis(kk * l) - 1.0) / (I * kk);
        assert!((src.transform(0.0) - exact).norm() < 1e-12);
    }

    #[test]
    fn mismatched_pair_is_rejected() {
        let nl = NonlinearitySpec::linear();
        let a = solve_field(&empty(), &nl, &Incidence::new(1.0, Direction::Right, c(1.0)).unwrap(), 64, 1e-8).unwrap();
        let b = solve_field(&empty(), &nl, &Incidence::new(1.1, Direction::Left, c(1.0)).unwrap(), 64, 1e-8).unwrap();
        assert!(amplitudes_jost(&a, &b).is_err());
        assert!(amplitudes_jost(&b, &a).is_err());
    }

    #[test]
    fn csv_dump_has_header_and_rows() {
        let inc = Incidence::new(1.0, Direction::Right, c(1.0)).unwrap();
        let sol = solve_field(&empty(), &NonlinearitySpec::linear(), &inc, 64, 1e-8).unwrap();
        let mut buf = Vec::new();
        sol.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,Re_psi,Im_psi,Re_dpsi,Im_dpsi");
        assert_eq!(lines.len(), 66);
        assert_eq!(lines[1].split(',').count(), 5);
    }
}
