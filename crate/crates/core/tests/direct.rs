use std::f64::consts::PI;

use nlscatter::born::{born1_fourier, born2_resonance, PerturbativeInputs, TermSet};
use nlscatter::direct::{
    amplitudes_fourier, amplitudes_jost, integral_equation_residual, jost_functions, solve_direct, solve_field,
    source_terms, SolverSettings,
};
use nlscatter::model::{Direction, Incidence, NonlinearitySpec, PotentialSpec, Rt};
use nlscatter::Error;
use num_complex::Complex64;
use proptest::prelude::*;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn ex1(zhat: f64, k: f64) -> PotentialSpec {
    PotentialSpec::fourier(2.0 * PI, 1.0, zhat * k * k, [(-2, c(0.5)), (4, c(0.35)), (-6, c(-0.15))]).unwrap()
}

/// Amplitudes of a constant complex barrier `v = z` on `[0, L]` from the
/// analytic transfer of `ξ` and `ζ` through the slab.
fn barrier(z: Complex64, k: f64, l: f64) -> Rt {
    let q = (k * k - z).sqrt();
    let (cq, sq) = ((q * l).cos(), (q * l).sin());
    let ik = I * k;
    let xi = cq - ik * sq / q;
    let dxi = -q * sq - ik * cq;
    let zeta = cq - ik * sq / q;
    let dzeta = q * sq + ik * cq;
    let (fp, fm) = (dxi + ik * xi, dxi - ik * xi);
    let (gp, gm) = (dzeta + ik * zeta, dzeta - ik * zeta);
    let e = Complex64::cis(-k * l);
    Rt { rr: -e * e * fp / fm, tr: -2.0 * ik * e / fm, rl: -gm / gp, tl: 2.0 * ik * e / gp }
}

#[test]
fn constant_barrier_matches_transfer_solution() {
    let l = 2.5;
    for (z, k) in [(c(0.3), 1.1), (Complex64::new(0.2, -0.15), 0.7), (Complex64::new(-1.0, 0.4), 2.3)] {
        let pot = PotentialSpec::fourier(l, 1.0, 1.0, [(0, z)]).unwrap();
        let sol = solve_direct(&pot, &NonlinearitySpec::linear(), k, c(1.0), c(1.0), SolverSettings::default()).unwrap();
        let exact = barrier(z, k, l);
        assert!(sol.jost_route.max_diff(&exact) < 1e-8, "z = {z}, k = {k}: {}", sol.jost_route.max_diff(&exact));
        assert!(sol.route_discrepancy() < 1e-6);
    }
}

#[test]
fn tightening_tolerance_converges_at_integrator_order() {
    // a fifth-order pair takes steps h ∝ tol^{1/5}; tol/32 halves the step.
    // A deep well on a coarse report grid keeps the step under error control.
    let (l, k, z) = (10.0, 1.3, Complex64::new(-20.0, 3.0));
    let pot = PotentialSpec::fourier(l, 1.0, 1.0, [(0, z)]).unwrap();
    let exact = barrier(z, k, l);
    let err = |tol: f64| {
        let settings = SolverSettings { grid_size: 64, tol };
        solve_direct(&pot, &NonlinearitySpec::linear(), k, c(1.0), c(1.0), settings).unwrap().jost_route.max_diff(&exact)
    };
    for tol in [1e-4, 1e-6] {
        let (coarse, fine) = (err(tol), err(tol / 32.0));
        assert!(coarse / fine >= 8.0, "{coarse} -> {fine}");
    }
}

#[test]
fn fields_satisfy_the_integral_equation() {
    let k = 1.4;
    let pot = ex1(1e-2, k);
    let nl = NonlinearitySpec::kerr(1e-3 * k * k);
    for (dir, n) in [(Direction::Right, Complex64::new(0.8, -0.6)), (Direction::Left, c(1.2))] {
        let inc = Incidence::new(k, dir, n).unwrap();
        let sol = solve_field(&pot, &nl, &inc, 4096, 1e-10).unwrap();
        let res = integral_equation_residual(&sol, &pot, &nl).unwrap();
        assert!(res < 1e-8, "{dir:?}: {res}");
    }
}

#[test]
fn routes_agree_on_strong_configurations() {
    for (zhat, ghat, k) in [(1e-2, 1e-3, 4.0), (0.2, 0.05, 1.0), (0.5, -0.1, 2.7)] {
        let pot = ex1(zhat, k);
        let nl = NonlinearitySpec::kerr(ghat * k * k);
        let sol = solve_direct(&pot, &nl, k, Complex64::new(0.9, 0.2), c(1.1), SolverSettings { grid_size: 2048, tol: 1e-10 })
            .unwrap();
        assert!(sol.route_discrepancy() < 1e-6, "{}", sol.route_discrepancy());
        assert_eq!(amplitudes_jost(&sol.xi, &sol.zeta).unwrap(), sol.jost_route);
        assert_eq!(amplitudes_fourier(&sol.source_x, &sol.source_y, k).unwrap(), sol.fourier_route);
    }
}

#[test]
fn second_harmonic_of_ex1() {
    // The exact ratio |R^l/R^r| at k = 4K follows the complete second order
    // (about 5.9). Dropping the γ̂² terms moves R^r by ~16% and gives 4.79.
    let k = 4.0;
    let pot = ex1(1e-2, k);
    let nl = NonlinearitySpec::kerr(1e-3 * k * k);
    let a = solve_direct(&pot, &nl, k, c(1.0), c(1.0), SolverSettings::default()).unwrap().amplitudes;
    let inputs = PerturbativeInputs::new(&pot, &nl, k, c(1.0), c(1.0)).unwrap();
    let full = born2_resonance(&inputs, TermSet::Full).unwrap();
    let truncated = born2_resonance(&inputs, TermSet::NoSelfCoupling).unwrap();
    let ratio = a.rl.norm() / a.rr.norm();
    assert!((ratio - full.rl.norm() / full.rr.norm()).abs() < 0.05, "{ratio}");
    assert!((truncated.rl.norm() / truncated.rr.norm() - 4.79).abs() < 0.05);
    assert!((a.rl - a.rr).norm() > 3e-4);
}

#[test]
fn exponential_potential_is_left_reflectionless_at_half_lattice() {
    let k = 0.5;
    let pot = PotentialSpec::fourier(2.0 * PI, 1.0, 1e-4 * k * k, [(1, c(1.0))]).unwrap();
    let sol = solve_direct(&pot, &NonlinearitySpec::linear(), k, c(1.0), c(1.0), SolverSettings::default()).unwrap();
    let a = sol.amplitudes;
    assert!(a.rl.norm() < 1e-6);
    let rr = born1_fourier(&PerturbativeInputs::new(&pot, &NonlinearitySpec::linear(), k, c(1.0), c(1.0)).unwrap()).unwrap().rr;
    assert!((a.rr - rr).norm() < 1e-3 * rr.norm());
}

#[test]
fn source_transform_of_exponential_profile_with_unit_field() {
    // free field with f = e^{iKx}: the source transform at 0 is z(e^{iKL} - 1)/(iK) to first order in z
    let (l, kk, z, k) = (3.0, 1.7, 1e-7, 0.9);
    let pot = PotentialSpec::fourier(l, kk, z, [(1, c(1.0))]).unwrap();
    let nl = NonlinearitySpec::linear();
    let xi = solve_field(&pot, &nl, &Incidence::new(k, Direction::Right, c(1.0)).unwrap(), 4096, 1e-12).unwrap();
    let zeta = solve_field(&pot, &nl, &Incidence::new(k, Direction::Left, c(1.0)).unwrap(), 4096, 1e-12).unwrap();
    let (sx, _) = source_terms(&xi, &zeta, &pot, &nl).unwrap();
    let exact = z * (Complex64::cis(kk * l) - 1.0) / (I * kk);
    assert!((sx.transform(0.0) - exact).norm() < 1e-6 * exact.norm());
}

#[test]
fn nonlinear_amplitudes_depend_on_intensity() {
    let k = 1.6;
    let pot = ex1(1e-2, k);
    let run = |nl: &NonlinearitySpec, n: Complex64| {
        solve_direct(&pot, nl, k, n, c(1.0), SolverSettings::default()).unwrap().amplitudes
    };
    let kerr = NonlinearitySpec::kerr(1e-2 * k * k);
    assert!((run(&kerr, c(1.0)).rr - run(&kerr, c(2.0)).rr).norm() > 1e-6);
    let lin = NonlinearitySpec::linear();
    assert!(run(&lin, c(1.0)).max_diff(&run(&lin, c(2.0))) < 1e-8);
}

#[test]
fn jost_functions_of_a_free_left_field() {
    let (k, l) = (1.3, 4.0);
    let pot = PotentialSpec::zero(l, 1.0).unwrap();
    let sol = solve_field(&pot, &NonlinearitySpec::linear(), &Incidence::new(k, Direction::Left, c(1.0)).unwrap(), 512, 1e-11)
        .unwrap();
    let j = jost_functions(&sol).unwrap();
    assert!(j.minus.norm() < 1e-8);
    assert!((j.plus - 2.0 * I * k * Complex64::cis(-k * l)).norm() < 1e-8);
}

#[test]
fn strong_focusing_nonlinearity_blows_up() {
    let pot = PotentialSpec::zero(1.0, 1.0).unwrap();
    let r = solve_direct(&pot, &NonlinearitySpec::kerr(1e4), 1.0, c(1.0), c(1.0), SolverSettings::default());
    assert!(matches!(r, Err(Error::IntegrationFailure { .. })), "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn linear_transmission_is_reciprocal(
        k in 0.4f64..3.0,
        coeffs in proptest::collection::btree_map(-3i32..=3, (-1.0f64..1.0, -1.0f64..1.0), 1..4),
        z in 0.01f64..0.3,
    ) {
        let pot = PotentialSpec::fourier(2.0 * PI, 1.0, z, coeffs.into_iter().map(|(n, (a, b))| (n, Complex64::new(a, b)))).unwrap();
        let a = solve_direct(&pot, &NonlinearitySpec::linear(), k, c(1.0), c(1.0), SolverSettings { grid_size: 1024, tol: 1e-11 }).unwrap();
        prop_assert!((a.jost_route.tr - a.jost_route.tl).norm() < 1e-8);
        prop_assert!(a.route_discrepancy() < 1e-6);
    }
}

