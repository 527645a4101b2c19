use num_complex::Complex64;

use super::{phase_integral, PerturbativeInputs, I};
use crate::direct::{Branch, FieldKind, FieldSolution, MIN_GRID};
use crate::error::{Error, Result};
use crate::model::{Amplitudes, Direction, Incidence, Method, NonlinearitySpec, Profile, PotentialSpec, Rt};
use crate::quadrature::{cumulative, cumulative_from_end, fourier_transform, Grid};

/// `∫₀^L e^{-iqx} f(x) dx`, summed analytically for Fourier profiles and by
/// Simpson's rule on `grid_size` intervals for sampled ones.
pub fn profile_transform(pot: &PotentialSpec, q: f64, grid_size: usize) -> Result<Complex64> {
    match pot.profile() {
        Profile::Fourier(map) => {
            let kk = pot.lattice_k();
            Ok(map
                .iter()
                .map(|(&n, &c)| c * phase_integral(n as f64 * kk - q, pot.length(), kk))
                .sum())
        }
        Profile::Sampled(_) => {
            let grid = Grid::new(pot.length(), grid_size)?;
            let values: Vec<Complex64> = grid.nodes().map(|x| pot.profile_at(x)).collect();
            Ok(fourier_transform(&grid, &values, q))
        }
    }
}

/// First-order correction per unit source, and its derivative, for the
/// reduced field of one incidence.
///
/// With `sin θ e^{±iθ} = ±(e^{±2iθ} - 1)/(2i)` the Green-function integral
/// splits into two running integrals:
/// `ξ̂ - 1 = [e^{2ikx} A - B]/(2ik)` with `A = ∫₀^x e^{-2ikx'} S`, `B = ∫₀^x S`, and
/// `ζ̂ - 1 = -[B̄ - e^{-2ikx} Ā]/(2ik)` with `Ā = ∫_x^L e^{2ikx'} S`, `B̄ = ∫_x^L S`.
pub(crate) fn unit_field(grid: &Grid, k: f64, source: &[Complex64], branch: Branch) -> (Vec<Complex64>, Vec<Complex64>) {
    let h = grid.step();
    let two_ik = 2.0 * I * k;
    let sign = match branch {
        Branch::Xi => -1.0,
        Branch::Zeta => 1.0,
    };
    let weighted: Vec<Complex64> = grid
        .nodes()
        .zip(source)
        .map(|(x, &s)| Complex64::cis(sign * 2.0 * k * x) * s)
        .collect();
    let (a, b) = match branch {
        Branch::Xi => (cumulative(&weighted, h), cumulative(source, h)),
        Branch::Zeta => (cumulative_from_end(&weighted, h), cumulative_from_end(source, h)),
    };
    let mut field = Vec::with_capacity(grid.len());
    let mut deriv = Vec::with_capacity(grid.len());
    for (j, x) in grid.nodes().enumerate() {
        let e = Complex64::cis(-sign * 2.0 * k * x) * a[j];
        match branch {
            Branch::Xi => {
                field.push((e - b[j]) / two_ik);
                deriv.push(e);
            }
            Branch::Zeta => {
                field.push(-(b[j] - e) / two_ik);
                deriv.push(-e);
            }
        }
    }
    (field, deriv)
}

/// `ξ̂^{(1)}` (right incidence) or `ζ̂^{(1)}` (left incidence): the reduced
/// field after one iteration of the integral equation, with the nonlinear
/// term frozen at `γF(|N|)`.
pub fn first_order_fields(
    pot: &PotentialSpec,
    nl: &NonlinearitySpec,
    inc: &Incidence,
    grid_size: usize,
) -> Result<FieldSolution> {
    if grid_size < MIN_GRID {
        return Err(Error::Precondition(format!("grid_size must be at least {MIN_GRID}, got {grid_size}")));
    }
    let grid = Grid::new(pot.length(), grid_size)?;
    let frozen = nl.term(inc.amplitude().norm());
    let source: Vec<Complex64> = grid.nodes().map(|x| frozen + pot.potential(x)).collect();
    let which = match inc.direction() {
        Direction::Right => Branch::Xi,
        Direction::Left => Branch::Zeta,
    };
    let (field, dpsi) = unit_field(&grid, inc.k(), &source, which);
    Ok(FieldSolution {
        grid,
        psi: field.into_iter().map(|v| 1.0 + v).collect(),
        dpsi,
        which,
        kind: FieldKind::Reduced,
        incidence: *inc,
    })
}

/// First Born approximation for any profile and any nonlinearity, with the
/// nonlinear term frozen at `γF(|N±|)`.
///
/// `grid_size` only matters for sampled profiles.
pub fn born1_general(
    pot: &PotentialSpec,
    nl: &NonlinearitySpec,
    k: f64,
    n_minus: Complex64,
    n_plus: Complex64,
    grid_size: usize,
) -> Result<Amplitudes> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
    }
    let z = pot.strength();
    let l = pot.length();
    let two_ik = 2.0 * I * k;
    let f_right = profile_transform(pot, 2.0 * k, grid_size)?;
    let f_left = profile_transform(pot, -2.0 * k, grid_size)?;
    let f_zero = profile_transform(pot, 0.0, grid_size)?;
    let g_right = nl.term(n_minus.norm());
    let g_left = nl.term(n_plus.norm());
    let transmission = |g: Complex64| 1.0 + (g * l + z * f_zero) / two_ik;
    let rt = Rt {
        rr: (g_right * phase_integral(-2.0 * k, l, k) + z * f_right) / two_ik,
        rl: (g_left * phase_integral(2.0 * k, l, k) + z * f_left) / two_ik,
        tr: transmission(g_right),
        tl: transmission(g_left),
    };
    Amplitudes::new(rt, Method::Born1)
}

/// First Born approximation as closed sums over the Fourier coefficients.
pub fn born1_fourier(inputs: &PerturbativeInputs) -> Result<Amplitudes> {
    let k = inputs.k;
    let kk = inputs.lattice_k;
    let l = inputs.length;
    let k2 = k * k;
    let z = inputs.zhat * k2;
    let g = inputs.ghat * k2;
    let sum = |q: f64| -> Complex64 {
        inputs
            .coefficients
            .iter()
            .map(|(&n, &c)| c * phase_integral(n as f64 * kk + q, l, kk))
            .sum()
    };
    let pre = -I * z / (2.0 * k);
    let transmission = |nsq: f64| 1.0 - I * g * nsq * l / (2.0 * k) + pre * sum(0.0);
    let rt = Rt {
        rr: g * inputs.n_minus_sq * (Complex64::cis(-2.0 * k * l) - 1.0) / (4.0 * k2) + pre * sum(-2.0 * k),
        rl: -g * inputs.n_plus_sq * (Complex64::cis(2.0 * k * l) - 1.0) / (4.0 * k2) + pre * sum(2.0 * k),
        tr: transmission(inputs.n_minus_sq),
        tl: transmission(inputs.n_plus_sq),
    };
    Amplitudes::new(rt, Method::Born1)
}
