use cvtele_core::states::{fock_wigner, squeezed_vacuum_wigner};
use cvtele_core::{fock_fidelity, overlap_fidelity, squeezed_fidelity, teleport_state, FidelityMethod, GridSpec};
use proptest::prelude::*;

/// Closed forms against `π ∫ W_o (P_τ ⋆ W_o)`, computed on grids.
#[test]
fn closed_forms_match_double_convolution() {
    let spec = GridSpec::new(8.0, 256).unwrap();
    let cases: [(u32, f64); 4] = [(0, 0.5), (1, 0.3), (2, 0.8), (3, 1.0)];
    for (m, n) in cases {
        let w = fock_wigner(m, spec).unwrap();
        let grid = overlap_fidelity(&w, &teleport_state(&w, n).unwrap()).unwrap();
        assert_eq!(grid.method, FidelityMethod::OverlapGrid);
        assert!((grid.value - fock_fidelity(m, n).unwrap().value).abs() < 1e-5, "m={m} n={n}");
    }
    for (s, n) in [(0.7, 0.3), (1.0, 1.0)] {
        let w = squeezed_vacuum_wigner(s, spec).unwrap();
        let grid = overlap_fidelity(&w, &teleport_state(&w, n).unwrap()).unwrap();
        assert!((grid.value - squeezed_fidelity(s, n).unwrap().value).abs() < 1e-5, "s={s} n={n}");
    }
}

/// The fidelity at the classical boundary is `C(2m, m) / 2^{2m+1}`.
#[test]
fn fock_fidelity_at_unit_noise() {
    let spec = GridSpec::new(8.0, 256).unwrap();
    for m in 0..=5u32 {
        let central: f64 = (1..=m).map(|k| (m + k) as f64 / k as f64).product();
        let want = central / 2f64.powi(2 * m as i32 + 1);
        assert!((fock_fidelity(m, 1.0).unwrap().value - want).abs() < 1e-14);
        let w = fock_wigner(m, spec).unwrap();
        let grid = overlap_fidelity(&w, &teleport_state(&w, 1.0).unwrap()).unwrap();
        assert!((grid.value - want).abs() < 1e-6, "m={m}");
    }
}

proptest! {
    #[test]
    fn fidelities_lie_in_unit_interval(m in 0u32..10, n in 0.0..10.0f64, s in -2.0..2.0f64) {
        let f = fock_fidelity(m, n).unwrap().value;
        prop_assert!((0.0..=1.0 + 1e-9).contains(&f));
        let f = squeezed_fidelity(s, n).unwrap().value;
        prop_assert!((0.0..=1.0 + 1e-9).contains(&f));
    }

    #[test]
    fn fidelities_decrease_with_noise(m in 0u32..6, s in 0.0..2.0f64, n in 0.01..3.0f64) {
        let dn = 1e-3;
        prop_assert!(fock_fidelity(m, n + dn).unwrap().value < fock_fidelity(m, n).unwrap().value);
        prop_assert!(squeezed_fidelity(s, n + dn).unwrap().value < squeezed_fidelity(s, n).unwrap().value);
    }
}

#[test]
fn large_noise_erases_information() {
    for m in 0..=5 {
        assert!(fock_fidelity(m, 1e3).unwrap().value < 2e-3);
    }
    for s in [0.0, 0.7, 1.5] {
        assert!(squeezed_fidelity(s, 1e3).unwrap().value < 2e-3);
    }
}
