//! P-function form of two-mode Gaussian states and its explicit separable
//! decomposition.
//!
//! The channel state correlates `α_b` with `α_c` (phase sensitive). Writing
//! mode `c` through `α̃_c = α_c*` turns that into a Hermitian form, so the
//! P function reads `(det N/π²) exp(-Σ α_i N_ij α_j*)` over `(α_b, α̃_c)`.

use std::f64::consts::PI;

use nalgebra::SVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{gauss_hermite, gaussian_factored_integral, QuadratureRule};
use crate::states::GaussianTwoMode;

/// Gauss–Hermite order per real dimension for the `β` integral.
pub const RECONSTRUCT_ORDER: usize = 30;

/// Half-width of the `n_τ = 1` band treated as the boundary.
pub const BOUNDARY_BAND: f64 = 1e-9;

/// Hermitian exponent matrix `[[n_bb, n_bc], [n_bc*, n_cc]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PExponentMatrix {
    pub n_bb: f64,
    pub n_cc: f64,
    pub n_bc: Complex64,
}

impl PExponentMatrix {
    pub fn new(n_bb: f64, n_cc: f64, n_bc: Complex64) -> Self {
        Self { n_bb, n_cc, n_bc }
    }

    pub fn det(&self) -> f64 {
        self.n_bb * self.n_cc - self.n_bc.norm_sqr()
    }

    /// `Σ_ij α_i N_ij α_j*`.
    pub fn quadratic_form(&self, a_b: Complex64, a_c: Complex64) -> f64 {
        self.n_bb * a_b.norm_sqr()
            + self.n_cc * a_c.norm_sqr()
            + 2.0 * (a_b * self.n_bc * a_c.conj()).re
    }

    /// The same state with the two modes exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            n_bb: self.n_cc,
            n_cc: self.n_bb,
            n_bc: self.n_bc.conj(),
        }
    }
}

/// Widths of the three Gaussians `P_b(α_b; β)`, `P_c(α_c; β)` and `℘(β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparableDecomposition {
    pub m_b: f64,
    pub m_c: f64,
    pub m_s: f64,
}

impl SeparableDecomposition {
    pub fn p_b(&self, n: &PExponentMatrix, a_b: Complex64, beta: Complex64) -> f64 {
        (self.log_p_b(n, a_b, beta)).exp() * self.m_b / PI
    }

    pub fn p_c(&self, a_c: Complex64, beta: Complex64) -> f64 {
        (self.log_p_c(a_c, beta)).exp() * self.m_c / PI
    }

    pub fn mixing(&self, beta: Complex64) -> f64 {
        self.m_s / PI * (-self.m_s * beta.norm_sqr()).exp()
    }

    fn log_p_b(&self, n: &PExponentMatrix, a_b: Complex64, beta: Complex64) -> f64 {
        -self.m_b * a_b.norm_sqr() + 2.0 * (a_b * n.n_bc * beta.conj()).re
            - n.n_bc.norm_sqr() / self.m_b * beta.norm_sqr()
    }

    fn log_p_c(&self, a_c: Complex64, beta: Complex64) -> f64 {
        -self.m_c * a_c.norm_sqr() - 2.0 * (a_c * beta.conj()).re - beta.norm_sqr() / self.m_c
    }
}

/// P-function exponent of the channel state, or `None` when its P function
/// is not a normalizable Gaussian (`Γ - 1 <= |Λ|`, i.e. `n_τ <= 1`).
pub fn p_exponent_from_channel(g: &GaussianTwoMode) -> Option<PExponentMatrix> {
    // P covariance is the Wigner covariance minus one vacuum unit per mode:
    // ⟨|α_b|²⟩ = ⟨|α̃_c|²⟩ = (Γ-1)/2 and ⟨α_b α̃_c*⟩ = Λ/2.
    let a = g.gamma() - 1.0;
    let l = g.lam();
    if a <= l.abs() {
        return None;
    }
    let d = a * a - l * l;
    Some(PExponentMatrix {
        n_bb: 2.0 * a / d,
        n_cc: 2.0 * a / d,
        n_bc: Complex64::new(-2.0 * l / d, 0.0),
    })
}

/// Strict positivity test `N_ii > 0` and `det N > 0`.
pub fn check_criterion(n: &PExponentMatrix) -> bool {
    n.n_bb > 0.0 && n.n_cc > 0.0 && n.det() > 0.0
}

pub fn decompose(n: &PExponentMatrix) -> Result<SeparableDecomposition> {
    if !check_criterion(n) {
        return Err(Error::NotSeparable(format!(
            "N_bb = {}, N_cc = {}, det = {}",
            n.n_bb,
            n.n_cc,
            n.det()
        )));
    }
    let m_b = n.n_bb + n.n_bc.norm_sqr();
    let m_c = n.n_cc + 1.0;
    Ok(SeparableDecomposition {
        m_b,
        m_c,
        m_s: n.det() / (m_b * m_c),
    })
}

/// `(det N/π²) exp(-Σ α_i N_ij α_j*)`.
pub fn direct_p(n: &PExponentMatrix, a_b: Complex64, a_c: Complex64) -> f64 {
    n.det() / (PI * PI) * (-n.quadratic_form(a_b, a_c)).exp()
}

/// P function of the channel state at `(α_b, α_c)`, when it exists.
pub fn channel_p_function(g: &GaussianTwoMode, a_b: Complex64, a_c: Complex64) -> Option<f64> {
    p_exponent_from_channel(g).map(|n| direct_p(&n, a_b, a_c.conj()))
}

fn mixture_integral(d: &SeparableDecomposition, n: &PExponentMatrix, a_b: Complex64, a_c: Complex64, rule: &QuadratureRule) -> Result<f64> {
    let beta = |x: &SVector<f64, 2>| Complex64::new(x[0], x[1]);
    let envelope = |x: &SVector<f64, 2>| {
        let b = beta(x);
        -d.m_s * b.norm_sqr() + d.log_p_b(n, a_b, b) + d.log_p_c(a_c, b)
    };
    let integrand = |x: &SVector<f64, 2>| {
        let b = beta(x);
        d.mixing(b) * d.p_b(n, a_b, b) * d.p_c(a_c, b)
    };
    gaussian_factored_integral(envelope, integrand, rule)
}

/// Evaluates `∫ d²β ℘(β) P_b(α_b; β) P_c(α_c; β)` by quadrature.
pub fn reconstruct_p(d: &SeparableDecomposition, n: &PExponentMatrix, a_b: Complex64, a_c: Complex64) -> Result<f64> {
    let value = mixture_integral(d, n, a_b, a_c, &gauss_hermite(RECONSTRUCT_ORDER)?)?;
    let check = mixture_integral(d, n, a_b, a_c, &gauss_hermite(RECONSTRUCT_ORDER - 1)?)?;
    let scale = value.abs().max(f64::MIN_POSITIVE);
    if (value - check).abs() > 1e-10 * scale {
        return Err(Error::Accuracy(format!(
            "beta quadrature not converged: {value} vs {check}"
        )));
    }
    Ok(value)
}

/// Separability verdict of the decomposition route, with a flag for the
/// `n_τ = 1` boundary where the strict criterion and the `n_τ >= 1` rule
/// part ways.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AppendixVerdict {
    pub separable: bool,
    pub boundary: bool,
}

pub fn channel_is_separable_via_appendix(g: &GaussianTwoMode) -> AppendixVerdict {
    let separable = p_exponent_from_channel(g)
        .map(|n| check_criterion(&n))
        .unwrap_or(false);
    AppendixVerdict {
        separable,
        boundary: (g.noise_factor() - 1.0).abs() < BOUNDARY_BAND,
    }
}
