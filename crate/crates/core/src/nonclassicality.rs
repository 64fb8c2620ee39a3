//! Moments of sampled states and the conditions under which sub-Poissonian
//! statistics, quadrature squeezing and P-negativity survive teleportation.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{binomial, factorial, trapezoid_weight};
use crate::phase_space::WignerGrid;
use crate::teleport::teleport_state;

/// Largest total order `m + n` supported by [`moments`].
pub const MAX_MOMENT_ORDER: u32 = 4;

/// Edge mass (times `extent^{m+n}`) above which grid moments are refused.
const EDGE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhotonStats {
    pub mean: f64,
    pub variance: f64,
}

impl PhotonStats {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !(mean >= 0.0 && variance >= 0.0) {
            return Err(Error::Domain(format!(
                "photon statistics need mean >= 0 and variance >= 0, got ({mean}, {variance})"
            )));
        }
        Ok(Self { mean, variance })
    }

    pub fn fock(m: u32) -> Self {
        Self {
            mean: m as f64,
            variance: 0.0,
        }
    }

    /// Mandel-type excess `ΔN² - N̄`; negative means sub-Poissonian.
    pub fn excess(&self) -> f64 {
        self.variance - self.mean
    }

    pub fn is_sub_poissonian(&self) -> bool {
        self.excess() < 0.0
    }
}

/// Statistics of `X(φ) = e^{-iφ}a + e^{iφ}a†` (vacuum variance 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureStats {
    pub phi: f64,
    pub mean: f64,
    pub variance: f64,
}

/// Normally ordered moment `⟨(a†)^m a^n⟩` of a Wigner grid.
///
/// Symmetric moments `∫ (α*)^j α^k W d²α` are integrated directly on the grid
/// and reordered with `⟨a†^m a^n⟩ = Σ_l C(m,l) C(n,l) l! (-1/2)^l S_{m-l,n-l}`.
pub fn moments(w: &WignerGrid, m: u32, n: u32) -> Result<Complex64> {
    if m + n > MAX_MOMENT_ORDER {
        return Err(Error::Config(format!(
            "moment order m+n = {} exceeds {MAX_MOMENT_ORDER}",
            m + n
        )));
    }
    if w.sigma() != 0.0 {
        return Err(Error::Config("moments are taken from Wigner grids (sigma = 0)".into()));
    }
    let extent = w.spec().extent();
    if w.edge_magnitude() * extent.powi((m + n) as i32).max(1.0) > EDGE_TOLERANCE {
        return Err(Error::Accuracy(format!(
            "state reaches the grid edge (|W| = {:.2e}); moments would be truncated",
            w.edge_magnitude()
        )));
    }
    let sym = symmetric_moments(w, m, n);
    let mut total = Complex64::new(0.0, 0.0);
    for l in 0..=m.min(n) {
        let c = binomial(m, l) * binomial(n, l) * factorial(l) * (-0.5f64).powi(l as i32);
        total += c * sym[(m - l) as usize][(n - l) as usize];
    }
    Ok(total)
}

/// `S[j][k] = ∫ (α*)^j α^k W` for all `j ≤ m`, `k ≤ n`.
fn symmetric_moments(w: &WignerGrid, m: u32, n: u32) -> Vec<Vec<Complex64>> {
    let (m, n) = (m as usize, n as usize);
    let spec = w.spec();
    let res = spec.resolution();
    let axis = spec.axis();
    let h = spec.spacing();
    let mut sym = vec![vec![Complex64::new(0.0, 0.0); n + 1]; m + 1];
    let values = w.values();
    for ir in 0..res {
        let wr = trapezoid_weight(ir, res);
        for ii in 0..res {
            let v = values[[ir, ii]] * wr * trapezoid_weight(ii, res);
            if v == 0.0 {
                continue;
            }
            let a = Complex64::new(axis[ir], axis[ii]);
            let mut conj_pow = Complex64::new(v, 0.0);
            for row in sym.iter_mut() {
                let mut p = conj_pow;
                for s in row.iter_mut() {
                    *s += p;
                    p *= a;
                }
                conj_pow *= a.conj();
            }
        }
    }
    for row in sym.iter_mut() {
        for s in row.iter_mut() {
            *s *= h * h;
        }
    }
    sym
}

pub fn photon_stats(w: &WignerGrid) -> Result<PhotonStats> {
    let n1 = moments(w, 1, 1)?.re;
    let n2 = moments(w, 2, 2)?.re;
    let mean = n1;
    let variance = n2 + n1 - n1 * n1;
    // grid roundoff can leave a Fock state's variance a hair below zero
    Ok(PhotonStats {
        mean: mean.max(0.0),
        variance: variance.max(0.0),
    })
}

pub fn quadrature_stats(w: &WignerGrid, phi: f64) -> Result<QuadratureStats> {
    let a = moments(w, 0, 1)?;
    let a2 = moments(w, 0, 2)?;
    let n = moments(w, 1, 1)?.re;
    let rot = Complex64::from_polar(1.0, -phi);
    let mean = 2.0 * (rot * a).re;
    let second = 2.0 * (rot * rot * a2).re + 2.0 * n + 1.0;
    Ok(QuadratureStats {
        phi,
        mean,
        variance: second - mean * mean,
    })
}

/// Smallest quadrature variance over all phases.
pub fn min_quadrature_variance(w: &WignerGrid) -> Result<f64> {
    let a = moments(w, 0, 1)?;
    let a2 = moments(w, 0, 2)?;
    let n = moments(w, 1, 1)?.re;
    Ok(2.0 * (n - a.norm_sqr()) + 1.0 - 2.0 * (a2 - a * a).norm())
}

/// Input whose photon statistics are to be teleported.
#[derive(Debug, Clone, Copy)]
pub enum PhotonSource<'a> {
    Fock(u32),
    Grid(&'a WignerGrid),
}

/// Photon statistics after teleportation with noise factor `n_tau`.
///
/// Fock inputs use `N̄_r = m + n_τ`, `ΔN_r² = (2m+1)n_τ + n_τ²`; grids are
/// teleported and measured.
pub fn teleported_photon_stats(source: PhotonSource<'_>, n_tau: f64) -> Result<PhotonStats> {
    if !(n_tau >= 0.0) {
        return Err(Error::Domain(format!("noise factor must be >= 0, got {n_tau}")));
    }
    match source {
        PhotonSource::Fock(m) => Ok(teleported_photon_stats_closed(PhotonStats::fock(m), n_tau)),
        PhotonSource::Grid(w) => photon_stats(&teleport_state(w, n_tau)?),
    }
}

/// Photon statistics after adding Gaussian noise of variance `n_τ`
/// (`N̄ + n_τ`, `ΔN² + (2N̄+1)n_τ + n_τ²`).
pub fn teleported_photon_stats_closed(s: PhotonStats, n_tau: f64) -> PhotonStats {
    PhotonStats {
        mean: s.mean + n_tau,
        variance: s.variance + (2.0 * s.mean + 1.0) * n_tau + n_tau * n_tau,
    }
}

/// Largest noise factor for which the teleported state stays
/// sub-Poissonian, or `None` when it never is.
pub fn sub_poisson_threshold(s: &PhotonStats) -> Option<f64> {
    let radicand = s.mean * s.mean + s.mean - s.variance;
    if radicand < 0.0 {
        return None;
    }
    let t = radicand.sqrt() - s.mean;
    (t > 0.0).then_some(t)
}

/// Quadrature statistics after teleportation: mean kept, variance `+ 2n_τ`.
pub fn quadrature_transfer(q: &QuadratureStats, n_tau: f64) -> Result<QuadratureStats> {
    if !(n_tau >= 0.0) {
        return Err(Error::Domain(format!("noise factor must be >= 0, got {n_tau}")));
    }
    Ok(QuadratureStats {
        phi: q.phi,
        mean: q.mean,
        variance: q.variance + 2.0 * n_tau,
    })
}

/// Largest noise factor that leaves the teleported state squeezed,
/// `(1 - var_min)/2`, or `None` for unsqueezed inputs.
pub fn squeezing_threshold(var_min: f64) -> Option<f64> {
    let t = (1.0 - var_min) / 2.0;
    (t > 0.0).then_some(t)
}

/// Whether the teleported P function is guaranteed nonnegative for every
/// input state.
pub fn p_positive_after_teleport(n_tau: f64) -> bool {
    n_tau >= 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::GridSpec;
    use crate::states::{coherent_wigner, fock_wigner, squeezed_vacuum_wigner, vacuum_wigner};
    use crate::teleport::teleported_fock_wigner;
    use approx::assert_relative_eq;

    #[test]
    fn vacuum_and_fock_moments() {
        let spec = GridSpec::default();
        assert!(moments(&vacuum_wigner(spec), 1, 1).unwrap().norm() < 1e-12);
        for m in 0..4 {
            let w = fock_wigner(m, spec).unwrap();
            let s = photon_stats(&w).unwrap();
            assert!((s.mean - m as f64).abs() < 1e-9);
            assert!(s.variance < 1e-8);
        }
    }

    #[test]
    fn coherent_moments() {
        let spec = GridSpec::default();
        let mu = Complex64::new(1.0, 0.0);
        let w = coherent_wigner(mu, spec).unwrap();
        assert!((moments(&w, 1, 1).unwrap().re - 1.0).abs() < 1e-9);
        let mu = Complex64::new(0.6, -0.8);
        let w = coherent_wigner(mu, spec).unwrap();
        assert!((moments(&w, 0, 1).unwrap() - mu).norm() < 1e-9);
        assert!((moments(&w, 2, 1).unwrap() - mu.conj() * mu.conj() * mu).norm() < 1e-9);
        let s = photon_stats(&w).unwrap();
        assert!((s.variance - s.mean).abs() < 1e-9);
    }

    #[test]
    fn moment_order_and_edge_guards() {
        let spec = GridSpec::default();
        let w = vacuum_wigner(spec);
        assert!(matches!(moments(&w, 3, 2), Err(Error::Config(_))));
        let small = GridSpec::new(2.0, 64).unwrap();
        assert!(matches!(moments(&vacuum_wigner(small), 1, 1), Err(Error::Accuracy(_))));
    }

    #[test]
    fn fock_teleported_stats() {
        let s = teleported_photon_stats(PhotonSource::Fock(1), 0.3).unwrap();
        assert_relative_eq!(s.mean, 1.3, epsilon = 1e-15);
        assert_relative_eq!(s.variance, 0.99, epsilon = 1e-15);
        let s = teleported_photon_stats(PhotonSource::Fock(0), 0.0).unwrap();
        assert_eq!((s.mean, s.variance), (0.0, 0.0));

        let spec = GridSpec::new(8.0, 256).unwrap();
        let g = teleported_fock_wigner(2, 0.5, spec).unwrap();
        let grid = photon_stats(&g).unwrap();
        let closed = teleported_photon_stats(PhotonSource::Fock(2), 0.5).unwrap();
        assert!((grid.mean - closed.mean).abs() < 1e-5);
        assert!((grid.variance - closed.variance).abs() < 1e-5);
    }

    #[test]
    fn sub_poisson_examples() {
        let t = sub_poisson_threshold(&PhotonStats::fock(1)).unwrap();
        assert_relative_eq!(t, 2f64.sqrt() - 1.0, epsilon = 1e-15);
        assert_eq!(sub_poisson_threshold(&PhotonStats::new(2.0, 2.0).unwrap()), None);
        assert_eq!(sub_poisson_threshold(&PhotonStats::new(2.0, 3.0).unwrap()), None);
        let mut last = 0.0;
        for m in [1, 10, 100, 10_000, 1_000_000] {
            let t = sub_poisson_threshold(&PhotonStats::fock(m)).unwrap();
            assert!(t < 0.5 && t > last);
            last = t;
        }
        assert!(0.5 - last < 1e-6);
    }

    #[test]
    fn threshold_is_crossover() {
        for m in 1..4 {
            let t = sub_poisson_threshold(&PhotonStats::fock(m)).unwrap();
            let below = teleported_photon_stats_closed(PhotonStats::fock(m), t - 1e-9);
            let above = teleported_photon_stats_closed(PhotonStats::fock(m), t + 1e-9);
            assert!(below.is_sub_poissonian());
            assert!(!above.is_sub_poissonian());
        }
    }

    #[test]
    fn quadrature_examples() {
        let q = QuadratureStats {
            phi: 0.0,
            mean: 2.0,
            variance: 1.0,
        };
        let r = quadrature_transfer(&q, 0.4).unwrap();
        assert_eq!(r.mean, 2.0);
        assert_relative_eq!(r.variance, 1.8, epsilon = 1e-15);
        assert_eq!(quadrature_transfer(&q, 0.0).unwrap(), q);

        let spec = GridSpec::default();
        let v = quadrature_stats(&vacuum_wigner(spec), 0.3).unwrap();
        assert!((v.variance - 1.0).abs() < 1e-10);
        let w = squeezed_vacuum_wigner(0.5, spec).unwrap();
        let q = quadrature_stats(&w, 0.0).unwrap();
        assert!((q.variance - (-1f64).exp()).abs() < 1e-10);
        assert!((min_quadrature_variance(&w).unwrap() - (-1f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn squeezing_threshold_examples() {
        assert_eq!(squeezing_threshold(0.0), Some(0.5));
        assert!((squeezing_threshold((-2f64).exp()).unwrap() - 0.43233).abs() < 5e-6);
        assert_eq!(squeezing_threshold(1.0), None);
    }

    #[test]
    fn p_positivity() {
        assert!(p_positive_after_teleport(1.0));
        assert!(!p_positive_after_teleport(0.99));
        assert!(p_positive_after_teleport(2.0));
    }
}
