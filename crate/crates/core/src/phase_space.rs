//! Sigma-parameterized quasiprobability functions on sampled grids.
//!
//! `sigma = 1` is the P function, `0` the Wigner function and `-1` the Q
//! function. Lowering sigma is a Gaussian convolution with per-axis variance
//! `(sigma - sigma') / 4`; raising it is a deconvolution and is refused on
//! sampled data.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, gauss_legendre, trapezoid_weight};

pub const DEFAULT_EXTENT: f64 = 6.0;
pub const DEFAULT_RESOLUTION: usize = 256;

/// Square sampling window `[-extent, extent]²` with `resolution` points per
/// axis, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    extent: f64,
    resolution: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            extent: DEFAULT_EXTENT,
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

impl GridSpec {
    pub fn new(extent: f64, resolution: usize) -> Result<Self> {
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::Config(format!("grid extent must be positive, got {extent}")));
        }
        if !(3..=4096).contains(&resolution) {
            return Err(Error::Config(format!(
                "grid resolution must be in 3..=4096, got {resolution}"
            )));
        }
        Ok(Self { extent, resolution })
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / (self.resolution - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.extent + i as f64 * self.spacing()
    }

    pub fn axis(&self) -> Vec<f64> {
        (0..self.resolution).map(|i| self.coord(i)).collect()
    }

    pub fn alpha(&self, ir: usize, ii: usize) -> Complex64 {
        Complex64::new(self.coord(ir), self.coord(ii))
    }

    /// Largest `|xi|` for which grid characteristic functions are trusted.
    pub fn band_limit(&self) -> f64 {
        PI * self.resolution as f64 / (2.0 * self.extent)
    }

    /// Nearest grid index to a coordinate, if inside the window.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        if x.abs() > self.extent {
            return None;
        }
        Some(((x + self.extent) / self.spacing()).round() as usize)
    }
}

/// A single-mode quasiprobability sampled on a [`GridSpec`].
///
/// `values[[ir, ii]]` holds `R_sigma(α)` at `α = coord(ir) + i coord(ii)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    sigma: f64,
    spec: GridSpec,
    values: Array2<f64>,
    pure: bool,
}

impl WignerGrid {
    pub fn from_values(sigma: f64, spec: GridSpec, values: Array2<f64>, pure: bool) -> Result<Self> {
        let n = spec.resolution();
        if values.dim() != (n, n) {
            return Err(Error::GeometryMismatch(format!(
                "values have shape {:?}, grid needs {n}x{n}",
                values.dim()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("grid values must be finite".into()));
        }
        Ok(Self {
            sigma,
            spec,
            values,
            pure,
        })
    }

    /// Samples `f(α)` on every grid point.
    pub fn from_fn(sigma: f64, spec: GridSpec, pure: bool, f: impl Fn(Complex64) -> f64) -> Self {
        let n = spec.resolution();
        let axis = spec.axis();
        let values = Array2::from_shape_fn((n, n), |(ir, ii)| f(Complex64::new(axis[ir], axis[ii])));
        Self {
            sigma,
            spec,
            values,
            pure,
        }
    }

    pub fn zeros(sigma: f64, spec: GridSpec) -> Self {
        let n = spec.resolution();
        Self {
            sigma,
            spec,
            values: Array2::zeros((n, n)),
            pure: false,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// True when the grid was produced from a pure-state constructor.
    pub fn is_pure(&self) -> bool {
        self.pure
    }

    pub(crate) fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_purity(mut self, pure: bool) -> Self {
        self.pure = pure;
        self
    }

    pub fn at(&self, ir: usize, ii: usize) -> f64 {
        self.values[[ir, ii]]
    }

    pub fn integrate(&self) -> f64 {
        numerics::grid_integrate(self)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index and value of the largest sample.
    pub fn argmax(&self) -> ((usize, usize), f64) {
        let mut best = ((0, 0), f64::NEG_INFINITY);
        for (idx, &v) in self.values.indexed_iter() {
            if v > best.1 {
                best = (idx, v);
            }
        }
        best
    }

    pub fn same_geometry(&self, other: &WignerGrid) -> bool {
        self.spec == other.spec
    }

    /// Largest absolute pointwise difference.
    pub fn sup_distance(&self, other: &WignerGrid) -> Result<f64> {
        if !self.same_geometry(other) {
            return Err(Error::GeometryMismatch(format!(
                "{:?} vs {:?}",
                self.spec, other.spec
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Largest absolute value on the outer ring of the grid.
    pub fn edge_magnitude(&self) -> f64 {
        let n = self.spec.resolution();
        let mut m: f64 = 0.0;
        for k in 0..n {
            for &(ir, ii) in &[(0, k), (n - 1, k), (k, 0), (k, n - 1)] {
                m = m.max(self.values[[ir, ii]].abs());
            }
        }
        m
    }

    /// Convolves every axis with a centred Gaussian of the given per-axis
    /// variance. The sampled function is treated as band limited, so the
    /// result stays exact as the kernel width drops below the grid spacing.
    pub(crate) fn gaussian_smooth(&self, var_per_axis: f64) -> WignerGrid {
        if var_per_axis == 0.0 {
            return self.clone();
        }
        let k = smoothing_matrix(self.spec.resolution(), self.spec.spacing(), var_per_axis);
        let values = k.dot(&self.values).dot(&k.t());
        WignerGrid {
            sigma: self.sigma,
            spec: self.spec,
            values,
            pure: self.pure,
        }
    }

    /// Grid characteristic function `C_sigma(ξ) = ∫ d²α exp(ξα* - ξ*α) R_sigma(α)`.
    pub fn characteristic(&self, xi: Complex64) -> Result<Complex64> {
        if xi.norm() > self.spec.band_limit() {
            return Err(Error::Accuracy(format!(
                "|xi| = {} exceeds the grid band limit {}",
                xi.norm(),
                self.spec.band_limit()
            )));
        }
        let n = self.spec.resolution();
        let axis = self.spec.axis();
        // ξα* - ξ*α = 2i (ξ_i α_r - ξ_r α_i)
        let phase_r: Vec<Complex64> = axis
            .iter()
            .enumerate()
            .map(|(i, &x)| Complex64::from_polar(trapezoid_weight(i, n), 2.0 * xi.im * x))
            .collect();
        let phase_i: Vec<Complex64> = axis
            .iter()
            .enumerate()
            .map(|(i, &y)| Complex64::from_polar(trapezoid_weight(i, n), -2.0 * xi.re * y))
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        for ir in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for ii in 0..n {
                row += phase_i[ii] * self.values[[ir, ii]];
            }
            total += phase_r[ir] * row;
        }
        let h = self.spec.spacing();
        Ok(total * h * h)
    }
}

/// `(g ⋆ sinc_h)(m h)` for the Gaussian of variance `var`, for every offset
/// `m` on the grid, as a symmetric Toeplitz matrix.
fn smoothing_matrix(n: usize, h: f64, var: f64) -> Array2<f64> {
    // k(m) = ∫_0^1 exp(-a u²) cos(m π u) du,  a = var π² / (2h²)
    let a = var * PI * PI / (2.0 * h * h);
    let rule = gauss_legendre(12).expect("fixed order");
    let panels = n.max(16);
    let width = 1.0 / panels as f64;
    let mut us = Vec::with_capacity(panels * rule.order());
    let mut ws = Vec::with_capacity(panels * rule.order());
    for p in 0..panels {
        let lo = p as f64 * width;
        for (x, w) in rule.iter() {
            let u = lo + 0.5 * width * (x + 1.0);
            let damp = (-a * u * u).exp();
            if damp > 0.0 {
                us.push(u);
                ws.push(0.5 * width * w * damp);
            }
        }
    }
    let taps: Vec<f64> = (0..n)
        .map(|m| {
            let f = m as f64 * PI;
            us.iter().zip(&ws).map(|(u, w)| w * (f * u).cos()).sum()
        })
        .collect();
    Array2::from_shape_fn((n, n), |(i, j)| taps[i.abs_diff(j)])
}

/// Converts a grid to a lower (or equal) sigma by Gaussian convolution.
pub fn convert_sigma(g: &WignerGrid, sigma_to: f64) -> Result<WignerGrid> {
    if !sigma_to.is_finite() {
        return Err(Error::Config("target sigma must be finite".into()));
    }
    if sigma_to > g.sigma() {
        return Err(Error::UnsupportedDeconvolution {
            from: g.sigma(),
            to: sigma_to,
        });
    }
    if sigma_to == g.sigma() {
        return Ok(g.clone());
    }
    let mut out = g.gaussian_smooth((g.sigma() - sigma_to) / 4.0);
    out.sigma = sigma_to;
    Ok(out)
}

/// Characteristic function of a grid or a closed-form Gaussian.
pub trait Characteristic {
    fn characteristic(&self, xi: Complex64) -> Result<Complex64>;
}

impl Characteristic for WignerGrid {
    fn characteristic(&self, xi: Complex64) -> Result<Complex64> {
        WignerGrid::characteristic(self, xi)
    }
}

/// A single-mode Gaussian Wigner function.
///
/// `var_r` and `var_i` are the variances along the principal axes of the
/// Wigner Gaussian, the first of which is rotated by `orientation` from the
/// real axis. Vacuum has `var_r = var_i = 1/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianOneMode {
    mean: Complex64,
    var_r: f64,
    var_i: f64,
    orientation: f64,
}

impl GaussianOneMode {
    pub fn new(mean: Complex64, var_r: f64, var_i: f64, orientation: f64) -> Result<Self> {
        if !(var_r > 0.0 && var_i > 0.0) {
            return Err(Error::Domain(format!(
                "Gaussian variances must be positive, got ({var_r}, {var_i})"
            )));
        }
        if var_r * var_i < 1.0 / 16.0 * (1.0 - 1e-12) {
            return Err(Error::Domain(format!(
                "variances ({var_r}, {var_i}) violate the uncertainty bound var_r*var_i >= 1/16"
            )));
        }
        Ok(Self {
            mean,
            var_r,
            var_i,
            orientation,
        })
    }

    pub fn vacuum() -> Self {
        Self {
            mean: Complex64::new(0.0, 0.0),
            var_r: 0.25,
            var_i: 0.25,
            orientation: 0.0,
        }
    }

    /// Displaced squeezed vacuum: the principal axis at `orientation` is
    /// squeezed by `e^{-2 s}`.
    pub fn squeezed(mean: Complex64, s: f64, orientation: f64) -> Self {
        Self {
            mean,
            var_r: 0.25 * (-2.0 * s).exp(),
            var_i: 0.25 * (2.0 * s).exp(),
            orientation,
        }
    }

    pub fn mean(&self) -> Complex64 {
        self.mean
    }

    pub fn principal_variances(&self) -> (f64, f64) {
        (self.var_r, self.var_i)
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    /// Covariance of `(α_r, α_i)`.
    pub fn covariance(&self) -> [[f64; 2]; 2] {
        let (c, s) = (self.orientation.cos(), self.orientation.sin());
        let xx = self.var_r * c * c + self.var_i * s * s;
        let yy = self.var_r * s * s + self.var_i * c * c;
        let xy = (self.var_r - self.var_i) * c * s;
        [[xx, xy], [xy, yy]]
    }

    pub fn wigner_at(&self, alpha: Complex64) -> f64 {
        let [[a, b], [_, d]] = self.covariance();
        let det = a * d - b * b;
        let dx = alpha.re - self.mean.re;
        let dy = alpha.im - self.mean.im;
        let q = (d * dx * dx - 2.0 * b * dx * dy + a * dy * dy) / det;
        (-0.5 * q).exp() / (2.0 * PI * det.sqrt())
    }

    pub fn sample(&self, spec: GridSpec, pure: bool) -> WignerGrid {
        WignerGrid::from_fn(0.0, spec, pure, |a| self.wigner_at(a))
    }

    /// Closed-form `C_sigma(ξ)` of the sigma-quasiprobability of this state.
    pub fn characteristic_at_sigma(&self, xi: Complex64, sigma: f64) -> Complex64 {
        let [[a, b], [_, d]] = self.covariance();
        let kx = 2.0 * xi.im;
        let ky = -2.0 * xi.re;
        let quad = a * kx * kx + 2.0 * b * kx * ky + d * ky * ky;
        let phase = kx * self.mean.re + ky * self.mean.im;
        Complex64::from_polar((-0.5 * quad + 0.5 * sigma * xi.norm_sqr()).exp(), phase)
    }

    /// The same Gaussian after adding isotropic noise of the given per-axis
    /// variance.
    pub fn broadened(&self, extra_var: f64) -> Self {
        let [[a, b], [_, d]] = self.covariance();
        let (a, d) = (a + extra_var, d + extra_var);
        // eigen-decomposition of the symmetric 2x2
        let tr = a + d;
        let disc = ((a - d).powi(2) + 4.0 * b * b).sqrt();
        let l1 = 0.5 * (tr + disc);
        let l2 = 0.5 * (tr - disc);
        let theta = 0.5 * (2.0 * b).atan2(a - d);
        Self {
            mean: self.mean,
            var_r: l1,
            var_i: l2,
            orientation: theta,
        }
    }
}

impl Characteristic for GaussianOneMode {
    fn characteristic(&self, xi: Complex64) -> Result<Complex64> {
        Ok(self.characteristic_at_sigma(xi, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn vacuum() -> WignerGrid {
        GaussianOneMode::vacuum().sample(GridSpec::default(), true)
    }

    #[test]
    fn vacuum_normalized() {
        assert!((vacuum().integrate() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zeros_integrate_to_zero() {
        assert_eq!(WignerGrid::zeros(0.0, GridSpec::default()).integrate(), 0.0);
    }

    #[test]
    fn wigner_to_q_for_vacuum() {
        let spec = GridSpec::new(6.0, 255).unwrap(); // odd: origin on grid
        let w = GaussianOneMode::vacuum().sample(spec, true);
        let q = convert_sigma(&w, -1.0).unwrap();
        let c = spec.index_of(0.0).unwrap();
        assert_relative_eq!(q.at(c, c), 1.0 / PI, epsilon = 1e-10);
        assert_eq!(q.sigma(), -1.0);
        let want = WignerGrid::from_fn(-1.0, spec, true, |a| (-a.norm_sqr()).exp() / PI);
        assert!(q.sup_distance(&want).unwrap() < 1e-10);
    }

    #[test]
    fn identity_conversion() {
        let w = vacuum();
        assert_eq!(convert_sigma(&w, 0.0).unwrap(), w);
    }

    #[test]
    fn deconvolution_refused() {
        let w = vacuum();
        assert!(matches!(
            convert_sigma(&w, 0.5),
            Err(Error::UnsupportedDeconvolution { .. })
        ));
    }

    #[test]
    fn vacuum_characteristic() {
        let w = vacuum();
        let c = w.characteristic(Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(c.re, (-0.5f64).exp(), epsilon = 1e-10);
        assert!(c.im.abs() < 1e-12);
        let c0 = w.characteristic(Complex64::new(0.0, 0.0)).unwrap();
        assert_relative_eq!(c0.re, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn band_limit_guard() {
        let w = vacuum();
        let too_far = Complex64::new(w.spec().band_limit() * 1.01, 0.0);
        assert!(matches!(w.characteristic(too_far), Err(Error::Accuracy(_))));
    }

    #[test]
    fn gaussian_characteristic_matches_grid() {
        let g = GaussianOneMode::new(Complex64::new(0.7, -0.4), 0.1, 0.9, 0.6).unwrap();
        let grid = g.sample(GridSpec::default(), true);
        for xi in [Complex64::new(0.3, 0.2), Complex64::new(-1.1, 0.5)] {
            let a = grid.characteristic(xi).unwrap();
            let b = g.characteristic(xi).unwrap();
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn heisenberg_bound_enforced() {
        assert!(GaussianOneMode::new(Complex64::new(0.0, 0.0), 0.1, 0.1, 0.0).is_err());
        assert!(GaussianOneMode::new(Complex64::new(0.0, 0.0), 0.0625, 1.0, 0.0).is_ok());
    }

    #[test]
    fn broadened_adds_variance() {
        let g = GaussianOneMode::squeezed(Complex64::new(0.0, 0.0), 0.5, 0.3);
        let b = g.broadened(0.2);
        let c0 = g.covariance();
        let c1 = b.covariance();
        assert_relative_eq!(c1[0][0], c0[0][0] + 0.2, epsilon = 1e-12);
        assert_relative_eq!(c1[1][1], c0[1][1] + 0.2, epsilon = 1e-12);
        assert_relative_eq!(c1[0][1], c0[0][1], epsilon = 1e-12);
    }

    #[test]
    fn tiny_kernel_is_identity() {
        let w = vacuum();
        let s = w.gaussian_smooth(1e-12);
        assert!(w.sup_distance(&s).unwrap() < 1e-9);
    }
}
