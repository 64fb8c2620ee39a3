//! Teleportation fidelity: the Wigner overlap and the Fock and squeezed
//! closed forms.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{binomial, legendre, trapezoid_2d};
use crate::phase_space::WignerGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FidelityMethod {
    OverlapGrid,
    FockClosedForm,
    SqueezedClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityReport {
    pub value: f64,
    pub method: FidelityMethod,
}

/// Distance from `n_τ = 1` inside which the Fock fidelity uses its
/// cancellation-free sum.
const FOCK_REGULAR_BAND: f64 = 1e-6;

/// `π ∫ W_o W_r d²α`. The original must be a pure state.
pub fn overlap_fidelity(w_o: &WignerGrid, w_r: &WignerGrid) -> Result<FidelityReport> {
    if !w_o.same_geometry(w_r) {
        return Err(Error::GeometryMismatch(format!(
            "{:?} vs {:?}",
            w_o.spec(),
            w_r.spec()
        )));
    }
    if w_o.sigma() != 0.0 || w_r.sigma() != 0.0 {
        return Err(Error::Config("fidelity needs Wigner grids (sigma = 0)".into()));
    }
    if !w_o.is_pure() {
        return Err(Error::Config("the original state must be pure".into()));
    }
    let product = w_o.values() * w_r.values();
    Ok(FidelityReport {
        value: PI * trapezoid_2d(&product, w_o.spec().spacing()),
        method: FidelityMethod::OverlapGrid,
    })
}

fn check_noise(n_tau: f64) -> Result<()> {
    if !(n_tau.is_finite() && n_tau >= 0.0) {
        return Err(Error::Domain(format!("noise factor must be >= 0, got {n_tau}")));
    }
    Ok(())
}

/// Fidelity of a teleported Fock state `|m⟩`:
/// `(1-n)^m / (1+n)^{m+1} · P_m((1+n²)/(1-n²))`.
pub fn fock_fidelity(m: u32, n_tau: f64) -> Result<FidelityReport> {
    check_noise(n_tau)?;
    let value = if (n_tau - 1.0).abs() < FOCK_REGULAR_BAND {
        fock_fidelity_sum(m, n_tau)
    } else {
        fock_fidelity_legendre(m, n_tau)
    };
    Ok(FidelityReport {
        value,
        method: FidelityMethod::FockClosedForm,
    })
}

pub(crate) fn fock_fidelity_legendre(m: u32, n: f64) -> f64 {
    let z = (1.0 + n * n) / (1.0 - n * n);
    (1.0 - n).powi(m as i32) / (1.0 + n).powi(m as i32 + 1) * legendre(m, z)
}

/// `Σ_k C(m,k)² n^{2(m-k)} / (1+n)^{2m+1}`, the same polynomial with the
/// `(1-n)` factors cancelled.
pub(crate) fn fock_fidelity_sum(m: u32, n: f64) -> f64 {
    let sum: f64 = (0..=m)
        .map(|k| binomial(m, k).powi(2) * n.powi(2 * (m - k) as i32))
        .sum();
    sum / (1.0 + n).powi(2 * m as i32 + 1)
}

/// Fidelity of a teleported squeezed vacuum,
/// `(n² + 2n cosh 2s + 1)^{-1/2}`.
pub fn squeezed_fidelity(s_o: f64, n_tau: f64) -> Result<FidelityReport> {
    check_noise(n_tau)?;
    if !s_o.is_finite() {
        return Err(Error::Config("squeezing must be finite".into()));
    }
    Ok(FidelityReport {
        value: (n_tau * n_tau + 2.0 * n_tau * (2.0 * s_o).cosh() + 1.0).powf(-0.5),
        method: FidelityMethod::SqueezedClosedForm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::GridSpec;
    use crate::states::{fock_wigner, vacuum_wigner};
    use crate::teleport::teleported_fock_wigner;
    use approx::assert_relative_eq;

    #[test]
    fn overlap_examples() {
        let spec = GridSpec::default();
        let v = vacuum_wigner(spec);
        assert!((overlap_fidelity(&v, &v).unwrap().value - 1.0).abs() < 1e-6);
        let f1 = fock_wigner(1, spec).unwrap();
        assert!(overlap_fidelity(&v, &f1).unwrap().value.abs() < 1e-6);
        let r = teleported_fock_wigner(1, 0.5, spec).unwrap();
        let grid = overlap_fidelity(&f1, &r).unwrap().value;
        assert!((grid - fock_fidelity(1, 0.5).unwrap().value).abs() < 1e-5);
    }

    #[test]
    fn overlap_guards() {
        let v = vacuum_wigner(GridSpec::default());
        let w = vacuum_wigner(GridSpec::new(5.0, 256).unwrap());
        assert!(matches!(overlap_fidelity(&v, &w), Err(Error::GeometryMismatch(_))));
        let mixed = v.clone().with_purity(false);
        assert!(matches!(overlap_fidelity(&mixed, &v), Err(Error::Config(_))));
    }

    #[test]
    fn fock_examples() {
        for m in 0..6 {
            assert_eq!(fock_fidelity(m, 0.0).unwrap().value, 1.0);
        }
        assert_relative_eq!(fock_fidelity(0, 1.0).unwrap().value, 0.5, epsilon = 1e-15);
        assert_relative_eq!(fock_fidelity(1, 1.0).unwrap().value, 0.25, epsilon = 1e-15);
        // C(2m,m) / 2^{2m+1}
        assert_relative_eq!(fock_fidelity(2, 1.0).unwrap().value, 3.0 / 16.0, epsilon = 1e-15);
        assert_relative_eq!(fock_fidelity(3, 1.0).unwrap().value, 5.0 / 32.0, epsilon = 1e-15);
        assert_relative_eq!(fock_fidelity(0, 0.5).unwrap().value, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn fock_forms_agree() {
        for m in 0..8 {
            for k in 1..=20 {
                let n = if k <= 9 { k as f64 / 10.0 } else { 1.0 + (k - 9) as f64 / 10.0 };
                let a = fock_fidelity_legendre(m, n);
                let b = fock_fidelity_sum(m, n);
                assert!((a - b).abs() < 1e-10, "m={m} n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn fock_near_singular_point_is_continuous() {
        for m in 0..6 {
            let at = fock_fidelity(m, 1.0).unwrap().value;
            let off = fock_fidelity(m, 1.0 + 1e-5).unwrap().value;
            assert!((at - off).abs() < 1e-4);
        }
    }

    #[test]
    fn squeezed_examples() {
        assert!((squeezed_fidelity(1.0, 1.0).unwrap().value - 0.3240271368).abs() < 1e-9);
        for n in [0.0, 0.3, 2.0] {
            assert_relative_eq!(squeezed_fidelity(0.0, n).unwrap().value, 1.0 / (1.0 + n), epsilon = 1e-15);
        }
    }

    #[test]
    fn monotone_and_vanishing() {
        for m in 0..4 {
            let mut last = f64::INFINITY;
            for k in 1..=50 {
                let v = fock_fidelity(m, 3.0 * k as f64 / 50.0).unwrap().value;
                assert!(v < last);
                last = v;
            }
            assert!(fock_fidelity(m, 1e3).unwrap().value < 2e-3);
        }
        let mut last = f64::INFINITY;
        for k in 1..=50 {
            let v = squeezed_fidelity(0.7, 3.0 * k as f64 / 50.0).unwrap().value;
            assert!(v < last);
            last = v;
        }
        assert!(squeezed_fidelity(0.7, 1e3).unwrap().value < 2e-3);
    }
}
