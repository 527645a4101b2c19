use num_complex::Complex64;

use super::first::{profile_transform, unit_field};
use super::{phase_integral, SecondOrderExpansion, SideCoefficients, TermSet, I};
use crate::direct::{Branch, MIN_GRID};
use crate::error::{Error, Result};
use crate::model::{Amplitudes, Method, NonlinearitySpec, PotentialSpec};
use crate::quadrature::{fourier_transform, Grid};

/// Second-order coefficients at any `k`, by quadrature.
///
/// Writing the first-order reduced field as `1 + γ|N|² a + z b`, where `a`
/// and `b` answer a unit constant source and the source `f`, the second-order
/// source splits into
/// `γz |N|² [2 Re b + b + f a]`, `z² f b` and `γ² |N|⁴ [2 Re a + a]`.
/// The amplitudes follow from `R = X̃(2k)/(2ik) - X̃(2k) X̃(0)/(4k²)` and
/// `T = 1 + X̃(0)/(2ik) - X̃(0)²/(4k²)` truncated at second order.
pub fn second_order_expansion(
    pot: &PotentialSpec,
    nl: &NonlinearitySpec,
    k: f64,
    n_minus: Complex64,
    n_plus: Complex64,
    grid_size: usize,
) -> Result<SecondOrderExpansion> {
    if !nl.is_kerr() {
        return Err(Error::Precondition("second-order amplitudes assume a Kerr nonlinearity".into()));
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
    }
    if grid_size < MIN_GRID {
        return Err(Error::Precondition(format!("grid_size must be at least {MIN_GRID}, got {grid_size}")));
    }
    let grid = Grid::new(pot.length(), grid_size)?;
    let l = pot.length();
    let k2 = k * k;
    let k4 = k2 * k2;
    let two_ik = 2.0 * I * k;
    let f: Vec<Complex64> = grid.nodes().map(|x| pot.profile_at(x)).collect();
    let ones = vec![Complex64::new(1.0, 0.0); grid.len()];
    let f0 = profile_transform(pot, 0.0, grid_size)?;

    let side = |branch: Branch, q: f64, nsq: f64| -> Result<SideCoefficients> {
        let (a, _) = unit_field(&grid, k, &ones, branch);
        let (b, _) = unit_field(&grid, k, &f, branch);
        let gz: Vec<Complex64> = (0..grid.len()).map(|j| 2.0 * b[j].re + b[j] + f[j] * a[j]).collect();
        let zz: Vec<Complex64> = (0..grid.len()).map(|j| f[j] * b[j]).collect();
        let gg: Vec<Complex64> = a.iter().map(|v| 2.0 * v.re + v).collect();
        let fq = profile_transform(pot, q, grid_size)?;
        let one_q = phase_integral(-q, l, k);
        let nsq2 = nsq * nsq;
        let tr = |g: &[Complex64], p: f64| fourier_transform(&grid, g, p);
        Ok(SideCoefficients {
            r_z: k2 * fq / two_ik,
            r_g: k2 * nsq * one_q / two_ik,
            r_gz: k4 * nsq * (tr(&gz, q) / two_ik - (one_q * f0 + fq * l) / (4.0 * k2)),
            r_zz: k4 * (tr(&zz, q) / two_ik - fq * f0 / (4.0 * k2)),
            r_gg: k4 * nsq2 * (tr(&gg, q) / two_ik - one_q * l / (4.0 * k2)),
            t_z: k2 * f0 / two_ik,
            t_g: k2 * nsq * l / two_ik,
            t_gz: k4 * nsq * (tr(&gz, 0.0) / two_ik - 2.0 * l * f0 / (4.0 * k2)),
            t_zz: k4 * (tr(&zz, 0.0) / two_ik - f0 * f0 / (4.0 * k2)),
            t_gg: k4 * nsq2 * (tr(&gg, 0.0) / two_ik - l * l / (4.0 * k2)),
        })
    };

    Ok(SecondOrderExpansion {
        zhat: pot.strength() / k2,
        ghat: nl.gamma / k2,
        right: side(Branch::Xi, 2.0 * k, n_minus.norm_sqr())?,
        left: side(Branch::Zeta, -2.0 * k, n_plus.norm_sqr())?,
    })
}

/// Second Born approximation at any `k`.
pub fn born2_general(
    pot: &PotentialSpec,
    nl: &NonlinearitySpec,
    k: f64,
    n_minus: Complex64,
    n_plus: Complex64,
    grid_size: usize,
    terms: TermSet,
) -> Result<Amplitudes> {
    second_order_expansion(pot, nl, k, n_minus, n_plus, grid_size)?.amplitudes(terms, Method::Born2)
}
