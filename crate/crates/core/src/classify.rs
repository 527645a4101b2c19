//! Thresholded tests for reflectionlessness, transparency and invisibility.
//!
//! From the right: reflectionless iff `X̃(2k) = 0`, transparent iff `X̃(0) = 0`.
//! From the left the same with `Ỹ(-2k)` and `Ỹ(0)`. Invisible means both.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Amplitudes, Transforms};

pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Unidirectional {
    None,
    LeftInvisible,
    RightInvisible,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub reflectionless_right: bool,
    pub reflectionless_left: bool,
    pub transparent_right: bool,
    pub transparent_left: bool,
    pub invisible_right: bool,
    pub invisible_left: bool,
    pub unidirectional: Unidirectional,
    pub residual_reflection_right: f64,
    pub residual_reflection_left: f64,
    pub residual_transparency_right: f64,
    pub residual_transparency_left: f64,
    pub tol: f64,
}

impl Classification {
    /// Builds the flags from the four residuals `(R^r, R^l, T^r, T^l)`.
    pub fn from_residuals(residuals: [f64; 4], tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Precondition(format!("tolerance must be positive, got {tol}")));
        }
        if residuals.iter().any(|r| !(*r >= 0.0)) {
            return Err(Error::Domain(format!("residuals must be non-negative numbers, got {residuals:?}")));
        }
        let [rr, rl, tr, tl] = residuals;
        let reflectionless_right = rr < tol;
        let reflectionless_left = rl < tol;
        let transparent_right = tr < tol;
        let transparent_left = tl < tol;
        let invisible_right = reflectionless_right && transparent_right;
        let invisible_left = reflectionless_left && transparent_left;
        let unidirectional = match (invisible_left, invisible_right) {
            (true, false) => Unidirectional::LeftInvisible,
            (false, true) => Unidirectional::RightInvisible,
            _ => Unidirectional::None,
        };
        Ok(Classification {
            reflectionless_right,
            reflectionless_left,
            transparent_right,
            transparent_left,
            invisible_right,
            invisible_left,
            unidirectional,
            residual_reflection_right: rr,
            residual_reflection_left: rl,
            residual_transparency_right: tr,
            residual_transparency_left: tl,
            tol,
        })
    }

    pub fn flags(&self) -> [bool; 6] {
        [
            self.reflectionless_right,
            self.reflectionless_left,
            self.transparent_right,
            self.transparent_left,
            self.invisible_right,
            self.invisible_left,
        ]
    }
}

/// Classifies from the source transforms, each magnitude divided by `2k`.
pub fn classify_transforms(t: &Transforms, k: f64, tol: f64) -> Result<Classification> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
    }
    let scale = 2.0 * k;
    Classification::from_residuals(
        [t.x2k.norm() / scale, t.ym2k.norm() / scale, t.x0.norm() / scale, t.y0.norm() / scale],
        tol,
    )
}

/// Classifies from `|R|` and `|T - 1|`.
pub fn classify_amplitudes(a: &Amplitudes, tol: f64) -> Result<Classification> {
    Classification::from_residuals([a.rr.norm(), a.rl.norm(), (a.tr - 1.0).norm(), (a.tl - 1.0).norm()], tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Method, Rt};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_transforms_are_invisible_both_ways() {
        let cl = classify_transforms(&Transforms::zero(), 1.0, DEFAULT_TOL).unwrap();
        assert!(cl.flags().iter().all(|f| *f));
        assert_eq!(cl.unidirectional, Unidirectional::None);
    }

    #[test]
    fn left_invisible_from_transforms() {
        let t = Transforms { x2k: c(0.3), ..Transforms::zero() };
        let cl = classify_transforms(&t, 2.0, DEFAULT_TOL).unwrap();
        assert!(cl.invisible_left && !cl.invisible_right);
        assert_eq!(cl.unidirectional, Unidirectional::LeftInvisible);
        assert_eq!(cl.residual_reflection_right, 0.075);
    }

    #[test]
    fn amplitudes_definition_unwinding() {
        let a = Amplitudes::new(Rt { rr: c(0.01), ..Rt::identity() }, Method::Born1).unwrap();
        let cl = classify_amplitudes(&a, 1e-3).unwrap();
        assert!(cl.invisible_left);
        assert!(!cl.invisible_right);
        assert_eq!(cl.unidirectional, Unidirectional::LeftInvisible);
        let id = Amplitudes::new(Rt::identity(), Method::Born1).unwrap();
        assert!(classify_amplitudes(&id, 1e-12).unwrap().flags().iter().all(|f| *f));
    }

    #[test]
    fn bad_tolerance() {
        assert!(classify_transforms(&Transforms::zero(), 1.0, 0.0).is_err());
        assert!(classify_transforms(&Transforms::zero(), 1.0, f64::NAN).is_err());
    }

    #[test]
    fn serializes_flat() {
        let cl = classify_transforms(&Transforms::zero(), 1.0, 1e-6).unwrap();
        let v = serde_json::to_value(cl).unwrap();
        assert_eq!(v["unidirectional"], "None");
        assert_eq!(v["tol"], 1e-6);
        assert!(v.as_object().unwrap().values().all(|x| !x.is_object()));
    }

    fn arb_c() -> impl Strategy<Value = Complex64> {
        (-1e-3f64..1e-3, -1e-3f64..1e-3).prop_map(|(a, b)| Complex64::new(a, b))
    }

    proptest! {
        #[test]
        fn derived_fields_are_consistent(x0 in arb_c(), x2k in arb_c(), y0 in arb_c(), ym2k in arb_c(), k in 0.1f64..5.0, tol in 1e-6f64..1e-3) {
            let cl = classify_transforms(&Transforms { x0, x2k, y0, ym2k }, k, tol).unwrap();
            prop_assert_eq!(cl.invisible_right, cl.reflectionless_right && cl.transparent_right);
            prop_assert_eq!(cl.invisible_left, cl.reflectionless_left && cl.transparent_left);
            prop_assert_eq!(cl.unidirectional == Unidirectional::LeftInvisible, cl.invisible_left && !cl.invisible_right);
            prop_assert_eq!(cl.unidirectional == Unidirectional::RightInvisible, cl.invisible_right && !cl.invisible_left);
        }

        #[test]
        fn tightening_never_sets_a_flag(x0 in arb_c(), x2k in arb_c(), y0 in arb_c(), ym2k in arb_c(), k in 0.1f64..5.0, tol in 1e-6f64..1e-3, shrink in 0.01f64..1.0) {
            let t = Transforms { x0, x2k, y0, ym2k };
            let loose = classify_transforms(&t, k, tol).unwrap();
            let tight = classify_transforms(&t, k, tol * shrink).unwrap();
            for (l, s) in loose.flags().iter().zip(tight.flags()) {
                prop_assert!(*l || !s);
            }
        }
    }
}
