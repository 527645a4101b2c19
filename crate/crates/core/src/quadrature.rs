//! Uniform-grid quadrature: composite Simpson for definite integrals and a
//! fourth-order running integral.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform nodes `x_j = j L / n`, `j = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    length: f64,
    intervals: usize,
}

impl Grid {
    pub fn new(length: f64, intervals: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Domain(format!("grid length must be positive, got {length}")));
        }
        if intervals < 4 {
            return Err(Error::Domain(format!("grid needs at least 4 intervals, got {intervals}")));
        }
        Ok(Grid { length, intervals })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.length / self.intervals as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        if j == self.intervals {
            self.length
        } else {
            j as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|j| self.node(j))
    }
}

/// Composite Simpson rule on uniform samples. An odd number of intervals is
/// closed with the 3/8 rule on the last three.
pub fn simpson(values: &[Complex64], h: f64) -> Complex64 {
    let n = values.len() - 1;
    assert!(n >= 3, "simpson needs at least 4 samples");
    let simpson_end = if n.is_multiple_of(2) { n } else { n - 3 };
    let mut acc = Complex64::new(0.0, 0.0);
    if simpson_end > 0 {
        let mut odd = Complex64::new(0.0, 0.0);
        let mut even = Complex64::new(0.0, 0.0);
        for j in 1..simpson_end {
            if j % 2 == 1 {
                odd += values[j];
            } else {
                even += values[j];
            }
        }
        acc = (values[0] + 4.0 * odd + 2.0 * even + values[simpson_end]) * (h / 3.0);
    }
    if simpson_end < n {
        let v = &values[simpson_end..];
        acc += (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3]) * (3.0 * h / 8.0);
    }
    acc
}

/// `∫₀^{x_j} g` at every node, exact for cubics.
///
/// Each interval integrates the cubic through the four nearest nodes;
/// the end intervals use one-sided stencils.
pub fn cumulative(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = values.len() - 1;
    assert!(n >= 3, "cumulative integration needs at least 4 samples");
    let w = h / 24.0;
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = Complex64::new(0.0, 0.0);
    out.push(acc);
    for i in 0..n {
        let piece = if i == 0 {
            9.0 * values[0] + 19.0 * values[1] - 5.0 * values[2] + values[3]
        } else if i == n - 1 {
            values[n - 3] - 5.0 * values[n - 2] + 19.0 * values[n - 1] + 9.0 * values[n]
        } else {
            -values[i - 1] + 13.0 * values[i] + 13.0 * values[i + 1] - values[i + 2]
        };
        acc += piece * w;
        out.push(acc);
    }
    out
}

/// `∫_{x_j}^{L} g` at every node.
pub fn cumulative_from_end(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let forward = cumulative(values, h);
    let total = *forward.last().unwrap();
    forward.into_iter().map(|v| total - v).collect()
}

/// `∫₀^L e^{-iqx} g(x) dx` by composite Simpson on the grid.
pub fn fourier_transform(grid: &Grid, values: &[Complex64], q: f64) -> Complex64 {
    debug_assert_eq!(values.len(), grid.len());
    let weighted: Vec<Complex64> = grid
        .nodes()
        .zip(values)
        .map(|(x, &v)| Complex64::cis(-q * x) * v)
        .collect();
    simpson(&weighted, grid.step())
}

/// `∫₀^L e^{iθx} dx = (e^{iθL} - 1)/(iθ)`, evaluated as `L e^{iθL/2} sinc(θL/2)`
/// so it stays accurate through `θ = 0`.
pub fn exp_integral(theta: f64, length: f64) -> Complex64 {
    let half = 0.5 * theta * length;
    length * sinc(half) * Complex64::cis(half)
}

/// `sin(u)/u` with its limit at zero.
pub fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        let u2 = u * u;
        1.0 - u2 / 6.0 + u2 * u2 / 120.0
    } else {
        u.sin() / u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn sample(grid: &Grid, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        grid.nodes().map(f).collect()
    }

    #[test]
    fn simpson_exact_for_cubics_even_and_odd() {
        for n in [6, 7, 64, 65] {
            let grid = Grid::new(2.0, n).unwrap();
            let v = sample(&grid, |x| Complex64::new(x * x * x - x, 2.0 * x * x));
            let exact = Complex64::new(4.0 - 2.0, 16.0 / 3.0);
            assert!((simpson(&v, grid.step()) - exact).norm() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn cumulative_exact_for_cubics() {
        let grid = Grid::new(1.5, 9).unwrap();
        let v = sample(&grid, |x| Complex64::new(1.0 + x * x * x, -x));
        let cum = cumulative(&v, grid.step());
        for (j, x) in grid.nodes().enumerate() {
            let exact = Complex64::new(x + x.powi(4) / 4.0, -x * x / 2.0);
            assert!((cum[j] - exact).norm() < 1e-14, "x = {x}");
        }
        let back = cumulative_from_end(&v, grid.step());
        assert!((back[0] - cum[9]).norm() < 1e-14);
        assert_eq!(back[9], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn cumulative_fourth_order() {
        let err = |n: usize| {
            let grid = Grid::new(3.0, n).unwrap();
            let v = sample(&grid, |x| Complex64::cis(4.0 * x));
            let cum = cumulative(&v, grid.step());
            grid.nodes()
                .zip(cum)
                .map(|(x, c)| (c - (Complex64::cis(4.0 * x) - 1.0) / Complex64::new(0.0, 4.0)).norm())
                .fold(0.0, f64::max)
        };
        let ratio = err(100) / err(200);
        assert!(ratio > 14.0, "ratio {ratio}");
    }

    #[test]
    fn transform_of_exponential_profile() {
        // ∫₀^L e^{iKx} dx with KL = 2π·(1/2): analytic value (e^{iKL} - 1)/(iK)
        let (l, kk) = (PI, 1.0);
        let grid = Grid::new(l, 2048).unwrap();
        let v = sample(&grid, |x| Complex64::cis(kk * x));
        let exact = (Complex64::cis(kk * l) - 1.0) / Complex64::new(0.0, kk);
        assert!((fourier_transform(&grid, &v, 0.0) - exact).norm() < 1e-12);
    }

    #[test]
    fn exp_integral_limit() {
        assert_eq!(exp_integral(0.0, 2.5), Complex64::new(2.5, 0.0));
        let th = 0.7;
        let direct = (Complex64::cis(th * 2.5) - 1.0) / Complex64::new(0.0, th);
        assert!((exp_integral(th, 2.5) - direct).norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn exp_integral_matches_quotient_away_from_zero(theta in 1e-3f64..50.0, len in 0.1f64..20.0, sign in prop::bool::ANY) {
            let theta = if sign { theta } else { -theta };
            let direct = (Complex64::cis(theta * len) - 1.0) / Complex64::new(0.0, theta);
            prop_assert!((exp_integral(theta, len) - direct).norm() < 1e-10 * len);
        }

        #[test]
        fn exp_integral_continuous_at_zero(theta in -1e-6f64..1e-6, len in 0.1f64..20.0) {
            prop_assert!((exp_integral(theta, len) - Complex64::new(len, 0.0)).norm() <= len * len * theta.abs() + 1e-15);
        }
    }
}
