//! Adaptive Dormand–Prince 5(4) integrator for small real systems. Steps are
//! clipped so that every caller-supplied report point is hit exactly.

use crate::error::{Error, Result};

pub type State = [f64; 4];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// fifth- minus fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MAX_STEPS: usize = 5_000_000;

fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (a, k) in terms {
        for i in 0..4 {
            out[i] += h * a * k[i];
        }
    }
    out
}

fn is_finite(y: &State) -> bool {
    y.iter().all(|v| v.is_finite())
}

/// Counters from one integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrates `y' = rhs(x, y)` from `(x0, y0)` to `x_end` (either direction)
/// keeping the scaled local error of every step below `tol`.
///
/// `report` must be ordered along the direction of integration and lie in
/// the closed span; the state at each report point is returned in order.
pub fn integrate<F>(rhs: F, x0: f64, y0: State, x_end: f64, report: &[f64], tol: f64) -> Result<(Vec<State>, Stats)>
where
    F: Fn(f64, &State) -> State,
{
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Domain(format!("solver tolerance must be positive, got {tol}")));
    }
    let span = x_end - x0;
    let dir = if span >= 0.0 { 1.0 } else { -1.0 };
    let mut out = Vec::with_capacity(report.len());
    let mut next_report = 0;
    // report points sitting on the starting point
    while next_report < report.len() && (report[next_report] - x0) * dir <= 0.0 {
        out.push(y0);
        next_report += 1;
    }
    let mut stats = Stats::default();
    if span == 0.0 {
        out.resize(report.len(), y0);
        return Ok((out, stats));
    }

    let mut x = x0;
    let mut y = y0;
    let mut k1 = rhs(x, &y);
    let mut h = dir * (span.abs() * 1e-3).min(tol.powf(0.2));
    let min_step = 1e-13 * span.abs().max(1.0);

    while (x_end - x) * dir > 0.0 {
        if stats.accepted + stats.rejected >= MAX_STEPS {
            return Err(Error::IntegrationFailure { x, reason: "step budget exhausted".into() });
        }
        let target = report.get(next_report).copied().unwrap_or(x_end);
        let free_h = h;
        let clipped = (x + h - target) * dir >= 0.0;
        if clipped {
            h = target - x;
        }
        if h == 0.0 {
            out.push(y);
            next_report += 1;
            h = free_h;
            continue;
        }

        let k2 = rhs(x + C2 * h, &axpy(&y, &[(A21, &k1)], h));
        let k3 = rhs(x + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = rhs(x + C4 * h, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
        let k5 = rhs(x + C5 * h, &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
        let k6 = rhs(
            x + h,
            &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h),
        );
        let y_new = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
        let x_new = if clipped { target } else { x + h };
        let k7 = rhs(x_new, &y_new);

        let mut err = 0.0;
        for i in 0..4 {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = tol * (1.0 + y[i].abs().max(y_new[i].abs()));
            err += (e / scale).powi(2);
        }
        let err = (err / 4.0).sqrt();

        if !err.is_finite() || !is_finite(&y_new) {
            stats.rejected += 1;
            h *= 0.2;
            if h.abs() < min_step {
                return Err(Error::IntegrationFailure { x, reason: "solution blew up".into() });
            }
            continue;
        }

        if err <= 1.0 {
            stats.accepted += 1;
            while next_report < report.len() && (report[next_report] - x_new) * dir <= 0.0 {
                out.push(y_new);
                next_report += 1;
            }
            x = x_new;
            y = y_new;
            k1 = k7;
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            // a step shortened to reach a report point says nothing about the free step size
            h = if clipped { free_h.abs().max(h.abs() * factor) * dir } else { h * factor };
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
        if h.abs() < min_step && (x_end - x) * dir > min_step {
            return Err(Error::IntegrationFailure { x, reason: "step size underflow".into() });
        }
    }
    while out.len() < report.len() {
        out.push(y);
    }
    Ok((out, stats))
}
