use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::{PerturbativeInputs, SecondOrderExpansion, SideCoefficients, TermSet, I};
use crate::error::Result;
use crate::model::{Amplitudes, Method};

/// Indices `n ∉ {0, ±s}` at which a sum built from `c_n`, `c_{-n}` and
/// `c_{n±s}` can be nonzero.
fn sum_support(inputs: &PerturbativeInputs, s: i32) -> Vec<i32> {
    let mut set = BTreeSet::new();
    for &n in inputs.coefficients.keys() {
        for m in [n, -n, n - s, n + s, -n - s, -n + s] {
            set.insert(m);
        }
    }
    set.into_iter().filter(|&n| n != 0 && n != s && n != -s).collect()
}

/// Closed-form expansion coefficients at `k = sK/2` with `L = mℓ`.
pub fn resonance_expansion(inputs: &PerturbativeInputs) -> Result<SecondOrderExpansion> {
    let (s_u, m) = inputs.resonance()?;
    let s = s_u as i32;
    let sf = s as f64;
    let p = PI * m as f64 * sf;
    let ip = I * p;
    let c = |n: i32| inputs.c(n);
    let (cs, cms, c0) = (c(s), c(-s), c(0));
    let support = sum_support(inputs, s);
    let sum = |term: &dyn Fn(i32, f64) -> Complex64| -> Complex64 { support.iter().map(|&n| term(n, n as f64)).sum() };
    let pre = ip / 16.0;

    let sym_c0 = 2.0 * ((-3.0 + ip) * c0 + (-1.0 + ip) * c0.conj());
    let sum_re = sum(&|n, nf| (c(n) + c(n).conj()) / nf);
    let t_zz = pre
        * (cms * cms + 2.0 * cms * c0 + (-1.0 + 2.0 * ip) * cms * cs + 2.0 * (-1.0 + ip) * c0 * c0 + 2.0 * c0 * cs + cs * cs
            + 2.0 * sf * sum(&|n, nf| c(n) * c(-n) / (nf - sf) - cms * c(n) / (nf - sf) + cs * c(n) / (nf + sf)));

    let right = {
        let nsq = inputs.n_minus_sq;
        SideCoefficients {
            r_z: -ip * cs / 2.0,
            r_g: Complex64::default(),
            r_gz: pre
                * nsq
                * (3.0 * cms + cms.conj() + 2.0 * (6.0 * c0 - c0.conj()) + 6.0 * (-1.0 + ip) * cs + cs.conj()
                    - 2.0 * sf * sum(&|n, nf| 3.0 * c(n) / (nf - sf))),
            r_zz: pre
                * (2.0 * cms * c0 - 4.0 * cms * cs + cms * c(2 * s) + 4.0 * c0 * c0 + 4.0 * (-1.0 + ip) * c0 * cs + 4.0 * cs * cs
                    + 2.0
                        * sf
                        * sum(&|n, nf| {
                            -2.0 * c0 * c(n) / (nf - sf) + 2.0 * cs * c(n) / nf + sf * c(-n) * c(n + s) / (nf * (nf + sf))
                        })),
            r_gg: pre * 6.0 * nsq * nsq,
            t_z: -ip * c0 / 2.0,
            t_g: -ip * nsq / 2.0,
            t_gz: pre * nsq * (-2.0 * cms.conj() + sym_c0 + 2.0 * (3.0 * cs + 2.0 * cs.conj()) + 2.0 * sf * sum_re),
            t_zz,
            t_gg: pre * (-6.0 + 2.0 * ip) * nsq * nsq,
        }
    };
    let left = {
        let nsq = inputs.n_plus_sq;
        SideCoefficients {
            r_z: -ip * cms / 2.0,
            r_g: Complex64::default(),
            r_gz: pre
                * nsq
                * (6.0 * (-1.0 + ip) * cms + cms.conj() + 2.0 * (6.0 * c0 - c0.conj()) + 3.0 * cs + cs.conj()
                    + 2.0 * sf * sum(&|n, nf| 3.0 * c(n) / (nf + sf))),
            r_zz: pre
                * (c(-2 * s) * cs + 4.0 * cms * cms + 4.0 * (-1.0 + ip) * cms * c0 - 4.0 * cms * cs + 4.0 * c0 * c0 + 2.0 * c0 * cs
                    + 2.0
                        * sf
                        * sum(&|n, nf| {
                            -2.0 * cms * c(n) / nf + 2.0 * c0 * c(n) / (nf + sf) + sf * c(-n) * c(n - s) / (nf * (nf - sf))
                        })),
            r_gg: pre * 6.0 * nsq * nsq,
            t_z: -ip * c0 / 2.0,
            t_g: -ip * nsq / 2.0,
            t_gz: pre * nsq * (2.0 * (3.0 * cms + 2.0 * cms.conj()) + sym_c0 - 2.0 * cs.conj() - 2.0 * sf * sum_re),
            t_zz,
            t_gg: pre * (-6.0 + 2.0 * ip) * nsq * nsq,
        }
    };
    Ok(SecondOrderExpansion { zhat: inputs.zhat, ghat: inputs.ghat, right, left })
}

/// Second Born approximation at a resonant wavenumber, in closed form.
pub fn born2_resonance(inputs: &PerturbativeInputs, terms: TermSet) -> Result<Amplitudes> {
    resonance_expansion(inputs)?.amplitudes(terms, Method::ResonanceClosedForm)
}
