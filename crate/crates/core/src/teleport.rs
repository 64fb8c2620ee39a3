//! The teleportation map.
//!
//! Two routes are provided: the closed-form convolution of the input Wigner
//! function with a Gaussian noise kernel, and a brute-force evaluation of the
//! protocol itself (beam splitter, homodyne measurement, displacement) by
//! four-dimensional Gauss–Hermite quadrature. The second exists to check the
//! first.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use nalgebra::SVector;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{binomial, factorial, gauss_hermite, gaussian_factored_integral, laguerre, QuadratureRule};
use crate::phase_space::{GridSpec, WignerGrid};
use crate::states::{check_squeezed_extent, GaussianTwoMode, InputState, MAX_FOCK};

/// Gauss–Hermite order per real dimension used by the protocol oracle.
pub const ORACLE_ORDER: usize = 40;

/// Half-width below which the teleported Fock formula switches to its
/// term-wise form.
const FOCK_REGULAR_BAND: f64 = 1e-6;

/// `P_τ(δ) = exp(-|δ|²/n_τ) / (π n_τ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeleportKernel {
    n_tau: f64,
}

impl TeleportKernel {
    pub fn new(n_tau: f64) -> Result<Self> {
        if !(n_tau.is_finite() && n_tau > 0.0) {
            return Err(Error::Domain(format!("noise factor must be > 0, got {n_tau}")));
        }
        Ok(Self { n_tau })
    }

    pub fn n_tau(&self) -> f64 {
        self.n_tau
    }

    pub fn value(&self, delta: Complex64) -> f64 {
        (-delta.norm_sqr() / self.n_tau).exp() / (PI * self.n_tau)
    }

    /// Variance of the kernel along either real axis.
    pub fn variance_per_axis(&self) -> f64 {
        self.n_tau / 2.0
    }
}

pub fn kernel_value(k: &TeleportKernel, delta: Complex64) -> f64 {
    k.value(delta)
}

fn check_noise(n_tau: f64) -> Result<()> {
    if !(n_tau.is_finite() && n_tau >= 0.0) {
        return Err(Error::Domain(format!("noise factor must be >= 0, got {n_tau}")));
    }
    Ok(())
}

/// Teleports a Wigner grid: `W_r = P_τ ⋆ W_o`.
///
/// `n_tau = 0` is the ideal channel and returns the input unchanged.
pub fn teleport_state(w_o: &WignerGrid, n_tau: f64) -> Result<WignerGrid> {
    if w_o.sigma() != 0.0 {
        return Err(Error::Config(format!(
            "teleportation acts on Wigner grids (sigma = 0), got sigma = {}",
            w_o.sigma()
        )));
    }
    check_noise(n_tau)?;
    if n_tau == 0.0 {
        return Ok(w_o.clone());
    }
    let var = n_tau / 2.0;
    if 3.0 * var.sqrt() > w_o.spec().extent() {
        return Err(Error::Accuracy(format!(
            "kernel width for n_tau = {n_tau} exceeds the grid extent {}",
            w_o.spec().extent()
        )));
    }
    Ok(w_o.gaussian_smooth(var).with_purity(false))
}

/// Closed-form teleported Fock state at one phase-space point.
pub fn teleported_fock_wigner_at(m: u32, n_tau: f64, alpha: Complex64) -> f64 {
    let r2 = alpha.norm_sqr();
    let p = 2.0 * n_tau + 1.0;
    let q = 2.0 * n_tau - 1.0;
    let envelope = 2.0 / PI * (-2.0 * r2 / p).exp();
    if q.abs() < FOCK_REGULAR_BAND {
        let x = 4.0 * r2;
        let sum: f64 = (0..=m)
            .map(|k| {
                binomial(m, k) * x.powi(k as i32) * q.powi((m - k) as i32)
                    / (factorial(k) * p.powi((m + k + 1) as i32))
            })
            .sum();
        envelope * sum
    } else {
        envelope * q.powi(m as i32) / p.powi(m as i32 + 1) * laguerre(m, -4.0 * r2 / (p * q))
    }
}

pub fn teleported_fock_wigner(m: u32, n_tau: f64, spec: GridSpec) -> Result<WignerGrid> {
    if m > MAX_FOCK {
        return Err(Error::Config(format!("Fock number {m} exceeds {MAX_FOCK}")));
    }
    check_noise(n_tau)?;
    Ok(WignerGrid::from_fn(0.0, spec, n_tau == 0.0, |a| {
        teleported_fock_wigner_at(m, n_tau, a)
    }))
}

/// `A(s) = 2n_τ + e^{-2s}`.
pub fn squeeze_width(s_o: f64, n_tau: f64) -> f64 {
    2.0 * n_tau + (-2.0 * s_o).exp()
}

pub fn teleported_squeezed_wigner_at(s_o: f64, n_tau: f64, alpha: Complex64) -> f64 {
    let a_plus = squeeze_width(s_o, n_tau);
    let a_minus = squeeze_width(-s_o, n_tau);
    2.0 / (PI * (a_plus * a_minus).sqrt())
        * (-2.0 * alpha.re * alpha.re / a_plus - 2.0 * alpha.im * alpha.im / a_minus).exp()
}

pub fn teleported_squeezed_wigner(s_o: f64, n_tau: f64, spec: GridSpec) -> Result<WignerGrid> {
    check_noise(n_tau)?;
    check_squeezed_extent(s_o, n_tau / 2.0, &spec)?;
    Ok(WignerGrid::from_fn(0.0, spec, n_tau == 0.0, |a| {
        teleported_squeezed_wigner_at(s_o, n_tau, a)
    }))
}

/// Quasiprobability `R_σ` of the teleported state for `σ ≤ 2 n_τ`.
///
/// Part of the teleportation noise pays for the conversion, so even
/// `σ > 0` is reached by smoothing the input rather than deconvolving.
pub fn teleported_quasiprobability(w_o: &WignerGrid, n_tau: f64, sigma: f64) -> Result<WignerGrid> {
    if w_o.sigma() != 0.0 {
        return Err(Error::Config("input must be a Wigner grid".into()));
    }
    check_noise(n_tau)?;
    if !(-1.0..=1.0).contains(&sigma) {
        return Err(Error::Config(format!("sigma must lie in [-1, 1], got {sigma}")));
    }
    if sigma > 2.0 * n_tau {
        return Err(Error::UnsupportedDeconvolution { from: 2.0 * n_tau, to: sigma });
    }
    let var = n_tau / 2.0 - sigma / 4.0;
    if 3.0 * var.sqrt() > w_o.spec().extent() {
        return Err(Error::Accuracy("smoothing kernel wider than the grid".into()));
    }
    Ok(w_o.gaussian_smooth(var).with_sigma(sigma).with_purity(false))
}

/// Outcome of looking for negative values of the teleported state's
/// quasiprobability at the highest `σ` reachable without deconvolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PNegativityProbe {
    pub sigma: f64,
    pub min_value: f64,
}

impl PNegativityProbe {
    pub fn is_negative(&self, tol: f64) -> bool {
        self.min_value < -tol
    }
}

pub fn p_negativity_probe(w_o: &WignerGrid, n_tau: f64) -> Result<PNegativityProbe> {
    let sigma = (2.0 * n_tau).min(1.0);
    let g = teleported_quasiprobability(w_o, n_tau, sigma)?;
    Ok(PNegativityProbe {
        sigma,
        min_value: g.min(),
    })
}

// Beam splitter: α_d = (α_b + α_a)/√2, α_e = (α_b - α_a)/√2, hence
// α_a = (α_d - α_e)/√2 and α_b = (α_d + α_e)/√2.
fn input_mode(d: Complex64, e: Complex64) -> Complex64 {
    (d - e) * FRAC_1_SQRT_2
}

fn sender_mode(d: Complex64, e: Complex64) -> Complex64 {
    (d + e) * FRAC_1_SQRT_2
}

/// Receiver displacement for homodyne outcomes `(α_d^i, α_e^r)`.
pub fn displacement(d_im: f64, e_re: f64) -> Complex64 {
    -SQRT_2 * Complex64::new(e_re, -d_im)
}

fn check_order(input: &InputState, rule: &QuadratureRule) -> Result<()> {
    let exact = 2 * rule.order() as u32 - 1;
    if input.polynomial_degree() > exact {
        return Err(Error::Accuracy(format!(
            "Gauss-Hermite order {} integrates polynomials up to degree {exact}; {input} needs {}",
            rule.order(),
            input.polynomial_degree()
        )));
    }
    Ok(())
}

fn oracle_point(input: &InputState, ch: &GaussianTwoMode, out: Complex64, rule: &QuadratureRule) -> Result<f64> {
    // x = (d_r, d_i, e_r, e_i); the receiver mode before displacement is
    // α_c = out - Δ(d_i, e_r).
    let modes = |x: &SVector<f64, 4>| {
        let d = Complex64::new(x[0], x[1]);
        let e = Complex64::new(x[2], x[3]);
        (input_mode(d, e), sender_mode(d, e), out - displacement(x[1], x[2]))
    };
    let envelope = |x: &SVector<f64, 4>| {
        let (a, b, c) = modes(x);
        input.log_envelope(a) + ch.log_gaussian(b, c)
    };
    let integrand = |x: &SVector<f64, 4>| {
        let (a, b, c) = modes(x);
        input.wigner_at(a) * ch.wigner(b, c)
    };
    gaussian_factored_integral(envelope, integrand, rule)
}

/// Teleported Wigner function at the given points, from the protocol.
pub fn protocol_oracle_points(
    input: &InputState,
    ch: &GaussianTwoMode,
    points: &[Complex64],
    order: usize,
) -> Result<Vec<f64>> {
    let rule = gauss_hermite(order)?;
    check_order(input, &rule)?;
    points
        .par_iter()
        .map(|&p| oracle_point(input, ch, p, &rule))
        .collect()
}

/// Teleported Wigner function on a full grid, from the protocol. Each
/// point is a separate 4D quadrature, so keep the resolution small.
pub fn protocol_oracle(input: &InputState, ch: &GaussianTwoMode, spec: GridSpec, order: usize) -> Result<WignerGrid> {
    let n = spec.resolution();
    let points: Vec<Complex64> = (0..n * n).map(|k| spec.alpha(k / n, k % n)).collect();
    let values = protocol_oracle_points(input, ch, &points, order)?;
    let values = ndarray::Array2::from_shape_vec((n, n), values).expect("shape matches");
    WignerGrid::from_values(0.0, spec, values, false)
}

/// Joint density of the homodyne outcomes `α_d^i = x`, `α_e^r = y`.
pub fn measurement_density(input: &InputState, ch: &GaussianTwoMode, x: f64, y: f64, order: usize) -> Result<f64> {
    let rule = gauss_hermite(order)?;
    check_order(input, &rule)?;
    measurement_density_with(input, ch, x, y, &rule)
}

pub(crate) fn measurement_density_with(
    input: &InputState,
    ch: &GaussianTwoMode,
    x: f64,
    y: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    // z = (d_r, e_i, c_r, c_i)
    let modes = |z: &SVector<f64, 4>| {
        let d = Complex64::new(z[0], x);
        let e = Complex64::new(y, z[1]);
        (input_mode(d, e), sender_mode(d, e), Complex64::new(z[2], z[3]))
    };
    let envelope = |z: &SVector<f64, 4>| {
        let (a, b, c) = modes(z);
        input.log_envelope(a) + ch.log_gaussian(b, c)
    };
    let integrand = |z: &SVector<f64, 4>| {
        let (a, b, c) = modes(z);
        input.wigner_at(a) * ch.wigner(b, c)
    };
    gaussian_factored_integral(envelope, integrand, rule)
}

/// Samples [`measurement_density`] on a grid of outcomes.
pub fn measurement_density_grid(input: &InputState, ch: &GaussianTwoMode, spec: GridSpec, order: usize) -> Result<WignerGrid> {
    let rule = gauss_hermite(order)?;
    check_order(input, &rule)?;
    let n = spec.resolution();
    let values: Result<Vec<f64>> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let p = spec.alpha(k / n, k % n);
            measurement_density_with(input, ch, p.re, p.im, &rule)
        })
        .collect();
    let values = ndarray::Array2::from_shape_vec((n, n), values?).expect("shape matches");
    WignerGrid::from_values(0.0, spec, values, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{evolve_channel, ChannelParams};
    use crate::states::{fock_wigner, two_mode_squeezed_vacuum, vacuum_wigner};
    use approx::assert_relative_eq;

    #[test]
    fn kernel_examples() {
        let k = TeleportKernel::new(0.5).unwrap();
        assert_relative_eq!(k.value(Complex64::new(0.0, 0.0)), 2.0 / PI, epsilon = 1e-15);
        let k = TeleportKernel::new(1.0).unwrap();
        assert_relative_eq!(kernel_value(&k, Complex64::new(0.6, 0.8)), (-1f64).exp() / PI, epsilon = 1e-15);
        assert!(matches!(TeleportKernel::new(0.0), Err(Error::Domain(_))));
        assert!(matches!(TeleportKernel::new(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn kernel_normalized() {
        for n in [0.1, 0.5, 2.0] {
            let k = TeleportKernel::new(n).unwrap();
            let spec = GridSpec::new(9.0, 241).unwrap();
            let g = WignerGrid::from_fn(0.0, spec, false, |a| k.value(a));
            assert_relative_eq!(g.integrate(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn vacuum_teleport_peak() {
        let spec = GridSpec::default();
        let w = teleport_state(&vacuum_wigner(spec), 0.5).unwrap();
        let mid = spec.resolution() / 2;
        let origin = teleported_fock_wigner_at(0, 0.5, Complex64::new(0.0, 0.0));
        assert_relative_eq!(origin, 1.0 / PI, epsilon = 1e-15);
        // grid centre is half a cell off the origin for even resolution
        let exact = teleported_fock_wigner_at(0, 0.5, spec.alpha(mid, mid));
        assert!((w.at(mid, mid) - exact).abs() < 1e-9);
        assert!(!w.is_pure());
    }

    #[test]
    fn teleport_rejects_bad_input() {
        let spec = GridSpec::default();
        let w = vacuum_wigner(spec);
        assert!(matches!(teleport_state(&w, -0.1), Err(Error::Domain(_))));
        assert!(matches!(teleport_state(&w, 100.0), Err(Error::Accuracy(_))));
        let q = crate::phase_space::convert_sigma(&w, -1.0).unwrap();
        assert!(teleport_state(&q, 0.5).is_err());
    }

    #[test]
    fn delta_limit() {
        let spec = GridSpec::default();
        let w = fock_wigner(2, spec).unwrap();
        let r = teleport_state(&w, 1e-6).unwrap();
        assert!(r.sup_distance(&w).unwrap() < 1e-4);
        assert_eq!(teleport_state(&w, 0.0).unwrap(), w);
    }

    #[test]
    fn fock_closed_form_branches_meet() {
        for m in 0..6 {
            for &r in &[0.0, 0.3, 1.0, 2.2] {
                let a = Complex64::new(r, 0.4);
                let regular = teleported_fock_wigner_at(m, 0.5, a);
                let near = teleported_fock_wigner_at(m, 0.5 + 2e-6, a);
                assert!((regular - near).abs() < 1e-5, "m={m} r={r}");
            }
        }
        assert_eq!(teleported_fock_wigner_at(1, 0.5, Complex64::new(0.0, 0.0)), 0.0);
    }

    #[test]
    fn fock_zero_peak() {
        for n in [0.1, 0.5, 3.0] {
            let v = teleported_fock_wigner_at(0, n, Complex64::new(0.0, 0.0));
            assert_relative_eq!(v, 2.0 / (PI * (2.0 * n + 1.0)), epsilon = 1e-15);
        }
    }

    #[test]
    fn squeezed_closed_form_limits() {
        let spec = GridSpec::default();
        let a = teleported_squeezed_wigner(0.0, 0.4, spec).unwrap();
        let b = teleport_state(&vacuum_wigner(spec), 0.4).unwrap();
        assert!(a.sup_distance(&b).unwrap() < 1e-8);
        let c = teleported_squeezed_wigner(0.6, 0.0, spec).unwrap();
        let d = crate::states::squeezed_vacuum_wigner(0.6, spec).unwrap();
        assert!(c.sup_distance(&d).unwrap() < 1e-15);
        assert!(teleported_squeezed_wigner(1.5, 0.3, spec).is_err());
    }

    #[test]
    fn quasiprobability_limits() {
        let spec = GridSpec::default();
        let w = fock_wigner(1, spec).unwrap();
        let p = teleported_quasiprobability(&w, 0.99, 1.0).unwrap();
        assert!(p.min() < 0.0);
        let probe = p_negativity_probe(&w, 0.99).unwrap();
        assert_eq!(probe.sigma, 1.0);
        assert!(probe.is_negative(1e-6));
        let probe = p_negativity_probe(&w, 1.2).unwrap();
        assert!(!probe.is_negative(1e-9));
        assert!(matches!(
            teleported_quasiprobability(&w, 0.3, 1.0),
            Err(Error::UnsupportedDeconvolution { .. })
        ));
    }

    #[test]
    fn displacement_convention() {
        assert_eq!(displacement(1.0, 0.0), Complex64::new(0.0, SQRT_2));
        assert_eq!(displacement(0.0, 1.0), Complex64::new(-SQRT_2, 0.0));
    }

    #[test]
    fn oracle_vacuum_pure_channel() {
        let ch = two_mode_squeezed_vacuum(0.5).unwrap();
        let n = (-1f64).exp();
        let pts = [Complex64::new(0.0, 0.0), Complex64::new(0.7, -0.3), Complex64::new(-1.2, 1.5)];
        let vals = protocol_oracle_points(&InputState::Vacuum, &ch, &pts, 20).unwrap();
        for (p, v) in pts.iter().zip(vals) {
            assert!((v - teleported_fock_wigner_at(0, n, *p)).abs() < 1e-10);
        }
    }

    #[test]
    fn oracle_fock_mixed_channel() {
        let ch = evolve_channel(&ChannelParams::new(1.0, 0.5, 0.5).unwrap());
        let n = ch.noise_factor();
        assert!((n - 1.06767).abs() < 1e-5);
        let pts = [Complex64::new(0.0, 0.0), Complex64::new(0.4, 0.9)];
        let vals = protocol_oracle_points(&InputState::Fock(1), &ch, &pts, 20).unwrap();
        for (p, v) in pts.iter().zip(vals) {
            assert!((v - teleported_fock_wigner_at(1, n, *p)).abs() < 1e-10);
        }
    }

    #[test]
    fn oracle_order_guard() {
        let ch = two_mode_squeezed_vacuum(0.5).unwrap();
        let r = protocol_oracle_points(&InputState::Fock(12), &ch, &[Complex64::new(0.0, 0.0)], 4);
        assert!(matches!(r, Err(Error::Accuracy(_))));
    }

    #[test]
    fn measurement_density_coherent_shift() {
        let ch = two_mode_squeezed_vacuum(0.0).unwrap();
        let input = InputState::Coherent(Complex64::new(1.0, 0.0));
        // the density is Gaussian; its mean along y is the ratio of moments
        let spec = GridSpec::new(4.0, 33).unwrap();
        let g = measurement_density_grid(&input, &ch, spec, 8).unwrap();
        let h = spec.spacing();
        let mut total = 0.0;
        let mut first = 0.0;
        for ir in 0..33 {
            for ii in 0..33 {
                let v = g.at(ir, ii) * h * h;
                total += v;
                first += v * spec.coord(ii);
            }
        }
        assert!((total - 1.0).abs() < 1e-6);
        assert!((first / total + FRAC_1_SQRT_2).abs() < 1e-6);
        assert!(g.min() >= -1e-12);
    }
}
