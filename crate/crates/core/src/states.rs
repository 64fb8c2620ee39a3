//! Concrete states: Fock, squeezed and coherent inputs, and the two-mode
//! Gaussian channel state.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::laguerre;
use crate::phase_space::{GaussianOneMode, GridSpec, WignerGrid};

/// Largest Fock number whose Wigner function is evaluated in plain double
/// precision.
pub const MAX_FOCK: u32 = 50;

/// Minimum grid half-width, in units of `e^{|s|}`, for a squeezed input.
/// This keeps the long axis (std `e^{|s|}/2`) inside the window by 5.5
/// standard deviations.
pub const SQUEEZED_EXTENT_FACTOR: f64 = 2.75;

/// Symmetric two-mode Gaussian channel state
/// `W(α_b, α_c) = N exp[-2Γ/(Γ²-Λ²)(|α_b|²+|α_c|²) + 2Λ/(Γ²-Λ²)(α_b α_c + c.c.)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTwoMode {
    gamma: f64,
    lam: f64,
    norm: f64,
}

impl GaussianTwoMode {
    pub fn new(gamma: f64, lam: f64) -> Result<Self> {
        if !(gamma.is_finite() && lam.is_finite()) {
            return Err(Error::Domain("Gamma and Lambda must be finite".into()));
        }
        if gamma < 1.0 - 1e-12 || gamma <= lam.abs() {
            return Err(Error::Domain(format!(
                "need Gamma >= 1 and Gamma > |Lambda|, got ({gamma}, {lam})"
            )));
        }
        let det = gamma * gamma - lam * lam;
        if det < 1.0 - 1e-9 * gamma * gamma {
            return Err(Error::Domain(format!(
                "Gamma^2 - Lambda^2 = {det} < 1 is unphysical"
            )));
        }
        Ok(Self {
            gamma,
            lam,
            norm: 4.0 / (PI * PI * det),
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn lam(&self) -> f64 {
        self.lam
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// `Γ - Λ`, the variance of the Gaussian noise the channel adds when used
    /// for teleportation.
    pub fn noise_factor(&self) -> f64 {
        self.gamma - self.lam
    }

    /// Total mean photon number of both modes, `Γ - 1`.
    pub fn mean_photon_number(&self) -> f64 {
        self.gamma - 1.0
    }

    /// Exponent of the Wigner function (without the normalization).
    pub fn log_gaussian(&self, b: Complex64, c: Complex64) -> f64 {
        let det = self.gamma * self.gamma - self.lam * self.lam;
        let cross = 2.0 * (b * c).re;
        -2.0 * self.gamma / det * (b.norm_sqr() + c.norm_sqr()) + 2.0 * self.lam / det * cross
    }

    pub fn wigner(&self, b: Complex64, c: Complex64) -> f64 {
        self.norm * self.log_gaussian(b, c).exp()
    }

    /// Real covariance matrix of `(b_r, b_i, c_r, c_i)` under the Wigner
    /// function.
    pub fn covariance(&self) -> [[f64; 4]; 4] {
        let g = self.gamma / 4.0;
        let l = self.lam / 4.0;
        [
            [g, 0.0, l, 0.0],
            [0.0, g, 0.0, -l],
            [l, 0.0, g, 0.0],
            [0.0, -l, 0.0, g],
        ]
    }
}

/// Pure two-mode squeezed vacuum with squeezing `s_qc`.
pub fn two_mode_squeezed_vacuum(s_qc: f64) -> Result<GaussianTwoMode> {
    if !(s_qc.is_finite() && s_qc >= 0.0) {
        return Err(Error::Domain(format!("squeezing must be >= 0, got {s_qc}")));
    }
    GaussianTwoMode::new((2.0 * s_qc).cosh(), (2.0 * s_qc).sinh())
}

/// Fock-state Wigner function `(2/π)(-1)^m e^{-2|α|²} L_m(4|α|²)`.
pub fn fock_wigner_at(m: u32, alpha: Complex64) -> f64 {
    let r2 = alpha.norm_sqr();
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    2.0 / PI * sign * (-2.0 * r2).exp() * laguerre(m, 4.0 * r2)
}

pub fn fock_wigner(m: u32, spec: GridSpec) -> Result<WignerGrid> {
    if m > MAX_FOCK {
        return Err(Error::Config(format!(
            "Fock number {m} exceeds the supported maximum {MAX_FOCK}"
        )));
    }
    Ok(WignerGrid::from_fn(0.0, spec, true, |a| fock_wigner_at(m, a)))
}

pub fn vacuum_wigner(spec: GridSpec) -> WignerGrid {
    WignerGrid::from_fn(0.0, spec, true, |a| fock_wigner_at(0, a))
}

/// Squeezed-vacuum Wigner function `(2/π) exp[-2e^{2s}α_r² - 2e^{-2s}α_i²]`.
pub fn squeezed_wigner_at(s_o: f64, alpha: Complex64) -> f64 {
    2.0 / PI
        * (-2.0 * (2.0 * s_o).exp() * alpha.re * alpha.re
            - 2.0 * (-2.0 * s_o).exp() * alpha.im * alpha.im)
            .exp()
}

pub(crate) fn check_squeezed_extent(s_o: f64, extra_var: f64, spec: &GridSpec) -> Result<()> {
    if !s_o.is_finite() {
        return Err(Error::Config("squeezing must be finite".into()));
    }
    // long-axis standard deviation, including any added noise
    let std = ((0.25 * (2.0 * s_o.abs()).exp()) + extra_var).sqrt();
    let needed = SQUEEZED_EXTENT_FACTOR * 2.0 * std;
    if spec.extent() < needed * (1.0 - 1e-12) {
        return Err(Error::Config(format!(
            "grid extent {} too small for squeezing {s_o}; need at least {needed:.3}",
            spec.extent()
        )));
    }
    Ok(())
}

pub fn squeezed_vacuum_wigner(s_o: f64, spec: GridSpec) -> Result<WignerGrid> {
    check_squeezed_extent(s_o, 0.0, &spec)?;
    Ok(WignerGrid::from_fn(0.0, spec, true, |a| squeezed_wigner_at(s_o, a)))
}

/// Coherent-state (displaced vacuum) Wigner function.
pub fn coherent_wigner_at(mu: Complex64, alpha: Complex64) -> f64 {
    2.0 / PI * (-2.0 * (alpha - mu).norm_sqr()).exp()
}

pub fn coherent_wigner(mu: Complex64, spec: GridSpec) -> Result<WignerGrid> {
    if !(mu.re.is_finite() && mu.im.is_finite()) || mu.norm() + 3.0 > spec.extent() {
        return Err(Error::Config(format!(
            "displacement {mu} lies too close to the grid edge (extent {})",
            spec.extent()
        )));
    }
    Ok(WignerGrid::from_fn(0.0, spec, true, |a| coherent_wigner_at(mu, a)))
}

/// Analytically known single-mode input state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputState {
    Vacuum,
    Fock(u32),
    Squeezed(f64),
    Coherent(Complex64),
}

impl InputState {
    pub fn wigner_at(&self, alpha: Complex64) -> f64 {
        match *self {
            InputState::Vacuum => fock_wigner_at(0, alpha),
            InputState::Fock(m) => fock_wigner_at(m, alpha),
            InputState::Squeezed(s) => squeezed_wigner_at(s, alpha),
            InputState::Coherent(mu) => coherent_wigner_at(mu, alpha),
        }
    }

    pub fn grid(&self, spec: GridSpec) -> Result<WignerGrid> {
        match *self {
            InputState::Vacuum => Ok(vacuum_wigner(spec)),
            InputState::Fock(m) => fock_wigner(m, spec),
            InputState::Squeezed(s) => squeezed_vacuum_wigner(s, spec),
            InputState::Coherent(mu) => coherent_wigner(mu, spec),
        }
    }

    /// Gaussian factor of the Wigner function, as the exponent
    /// `-(α-α0)ᵀE(α-α0)`; the remaining factor is a polynomial.
    pub fn log_envelope(&self, alpha: Complex64) -> f64 {
        match *self {
            InputState::Vacuum | InputState::Fock(_) => -2.0 * alpha.norm_sqr(),
            InputState::Squeezed(s) => {
                -2.0 * (2.0 * s).exp() * alpha.re * alpha.re
                    - 2.0 * (-2.0 * s).exp() * alpha.im * alpha.im
            }
            InputState::Coherent(mu) => -2.0 * (alpha - mu).norm_sqr(),
        }
    }

    /// Smallest grid half-width [`Self::grid`] accepts for this state.
    pub fn min_extent(&self) -> f64 {
        match *self {
            InputState::Squeezed(s) => SQUEEZED_EXTENT_FACTOR * (2.0 * s.abs()).exp().sqrt(),
            _ => 0.0,
        }
    }

    /// Degree of the polynomial left after removing [`Self::log_envelope`].
    pub fn polynomial_degree(&self) -> u32 {
        match *self {
            InputState::Fock(m) => 2 * m,
            _ => 0,
        }
    }

    /// Closed-form Gaussian description, when the state is Gaussian.
    pub fn as_gaussian(&self) -> Option<GaussianOneMode> {
        match *self {
            InputState::Vacuum | InputState::Fock(0) => Some(GaussianOneMode::vacuum()),
            InputState::Squeezed(s) => Some(GaussianOneMode::squeezed(Complex64::new(0.0, 0.0), s, 0.0)),
            InputState::Coherent(mu) => Some(GaussianOneMode::squeezed(mu, 0.0, 0.0)),
            InputState::Fock(_) => None,
        }
    }
}

impl fmt::Display for InputState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputState::Vacuum => write!(f, "vacuum"),
            InputState::Fock(m) => write!(f, "fock:{m}"),
            InputState::Squeezed(s) => write!(f, "squeezed:{s}"),
            InputState::Coherent(mu) => write!(f, "coherent:{},{}", mu.re, mu.im),
        }
    }
}

impl FromStr for InputState {
    type Err = Error;

    /// Parses `vacuum`, `fock:m`, `squeezed:s_o` or `coherent:re,im`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unrecognized state selector '{s}'"));
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        match (kind, arg) {
            ("vacuum", None) => Ok(InputState::Vacuum),
            ("fock", Some(a)) => {
                let m: u32 = a.parse().map_err(|_| bad())?;
                if m > MAX_FOCK {
                    return Err(Error::Config(format!(
                        "Fock number {m} exceeds the supported maximum {MAX_FOCK}"
                    )));
                }
                Ok(InputState::Fock(m))
            }
            ("squeezed", Some(a)) => {
                let v: f64 = a.parse().map_err(|_| bad())?;
                if !v.is_finite() {
                    return Err(bad());
                }
                Ok(InputState::Squeezed(v))
            }
            ("coherent", Some(a)) => {
                let (re, im) = a.split_once(',').ok_or_else(bad)?;
                let re: f64 = re.trim().parse().map_err(|_| bad())?;
                let im: f64 = im.trim().parse().map_err(|_| bad())?;
                Ok(InputState::Coherent(Complex64::new(re, im)))
            }
            _ => Err(bad()),
        }
    }
}
