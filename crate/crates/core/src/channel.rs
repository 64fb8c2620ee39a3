//! Thermal decoherence of the two-mode squeezed channel, the resulting noise
//! factors and the teleportation-versus-direct-transmission comparison.
//!
//! Time is measured in renormalized units `T = 1 - e^{-γt}` throughout.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::states::{two_mode_squeezed_vacuum, GaussianTwoMode};

/// Environment and channel knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    s_qc: f64,
    n_bar: f64,
    time: f64,
}

impl ChannelParams {
    pub fn new(s_qc: f64, n_bar: f64, time: f64) -> Result<Self> {
        if !(s_qc.is_finite() && s_qc >= 0.0) {
            return Err(Error::Config(format!("squeezing must be >= 0, got {s_qc}")));
        }
        if !(n_bar.is_finite() && n_bar >= 0.0) {
            return Err(Error::Config(format!(
                "thermal occupation must be >= 0, got {n_bar}"
            )));
        }
        if !(0.0..=1.0).contains(&time) {
            return Err(Error::Config(format!(
                "renormalized time must lie in [0, 1], got {time}"
            )));
        }
        Ok(Self { s_qc, n_bar, time })
    }

    /// Builds the parameters from an elapsed `γt` instead of `T`.
    pub fn from_gamma_t(s_qc: f64, n_bar: f64, gamma_t: f64) -> Result<Self> {
        if !(gamma_t >= 0.0) {
            return Err(Error::Config(format!("gamma*t must be >= 0, got {gamma_t}")));
        }
        Self::new(s_qc, n_bar, renormalized_time(gamma_t))
    }

    pub fn s_qc(&self) -> f64 {
        self.s_qc
    }

    pub fn n_bar(&self) -> f64 {
        self.n_bar
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// `γt` matching this renormalized time (infinite at `T = 1`).
    pub fn gamma_t(&self) -> f64 {
        -(-self.time).ln_1p()
    }

    pub fn with_time(&self, time: f64) -> Result<Self> {
        Self::new(self.s_qc, self.n_bar, time)
    }
}

/// `T = 1 - e^{-γt}`.
pub fn renormalized_time(gamma_t: f64) -> f64 {
    -(-gamma_t).exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Teleport,
    Direct,
}

/// Variance of the additive Gaussian noise of a transmission scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseFactor {
    pub value: f64,
    pub kind: NoiseKind,
}

impl fmt::Display for NoiseFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({:?})", self.value, self.kind)
    }
}

/// Channel state after thermal evolution:
/// `Γ = T(1+2n̄) + (1-T) cosh 2s`, `Λ = (1-T) sinh 2s`.
pub fn evolve_channel(p: &ChannelParams) -> GaussianTwoMode {
    let t = p.time;
    let gamma = t * (1.0 + 2.0 * p.n_bar) + (1.0 - t) * (2.0 * p.s_qc).cosh();
    let lam = (1.0 - t) * (2.0 * p.s_qc).sinh();
    if t == 0.0 {
        return two_mode_squeezed_vacuum(p.s_qc).expect("validated params");
    }
    GaussianTwoMode::new(gamma, lam).expect("thermal evolution preserves physicality")
}

/// `n_τ = Γ - Λ = (2n̄+1)T + (1-T)e^{-2s}`.
pub fn noise_factor(p: &ChannelParams) -> NoiseFactor {
    let t = p.time;
    NoiseFactor {
        value: (2.0 * p.n_bar + 1.0) * t + (1.0 - t) * (-2.0 * p.s_qc).exp(),
        kind: NoiseKind::Teleport,
    }
}

/// The channel is separable iff `n_τ >= 1`.
pub fn is_separable(p: &ChannelParams) -> bool {
    noise_factor(p).value >= 1.0
}

/// Noise of sending the field itself through the thermal environment,
/// `n_d = n̄T`.
pub fn direct_noise(n_bar: f64, time: f64) -> Result<NoiseFactor> {
    ChannelParams::new(0.0, n_bar, time)?;
    Ok(NoiseFactor {
        value: n_bar * time,
        kind: NoiseKind::Direct,
    }
)
}

/// Excess noise of teleportation over direct transmission across the full
/// distance, when the channel source sits at the midpoint so each half of
/// the squeezed pair only decoheres for half the time:
/// `n̄(1-√(1-T))² + 1 - √(1-T)(1-e^{-2s})`.
pub fn teleport_vs_direct_gap(p: &ChannelParams) -> f64 {
    let r = (1.0 - p.time).sqrt();
    p.n_bar * (1.0 - r).powi(2) + 1.0 - r * (1.0 - (-2.0 * p.s_qc).exp())
}

/// Renormalized time elapsed over half of the full-distance time `T`.
pub fn half_distance_time(time: f64) -> f64 {
    1.0 - (1.0 - time).sqrt()
}

/// Reference integration of the Gaussian moment flow of the thermal
/// Fokker–Planck equation.
///
/// The channel's 4×4 real covariance (ordering `b_r, b_i, c_r, c_i`) obeys
/// `dV/dτ = -V + (1+2n̄)/4 · I` with `τ = γt`, starting from the pure
/// two-mode squeezed vacuum. Integrated with classical RK4 at step `dt`.
/// Returns `(Γ, Λ)` read back as `Γ = 4 V_{b_r b_r}`, `Λ = 4 V_{b_r c_r}`.
pub fn moment_flow(p: &ChannelParams, dt: f64) -> (f64, f64) {
    let g0 = (2.0 * p.s_qc).cosh() / 4.0;
    let l0 = (2.0 * p.s_qc).sinh() / 4.0;
    let mut v = [
        [g0, 0.0, l0, 0.0],
        [0.0, g0, 0.0, -l0],
        [l0, 0.0, g0, 0.0],
        [0.0, -l0, 0.0, g0],
    ];
    let diffusion = (1.0 + 2.0 * p.n_bar) / 4.0;
    let rate = |v: &[[f64; 4]; 4]| {
        let mut d = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                // drift -1/2 on every quadrature, applied from both sides
                d[i][j] = -v[i][j] + if i == j { diffusion } else { 0.0 };
            }
        }
        d
    };
    let axpy = |v: &[[f64; 4]; 4], k: &[[f64; 4]; 4], h: f64| {
        let mut o = *v;
        for i in 0..4 {
            for j in 0..4 {
                o[i][j] += h * k[i][j];
            }
        }
        o
    };

    // T = 1 is reached only asymptotically; 40 e-foldings is enough.
    let tau_end = if p.time >= 1.0 { 40.0 } else { p.gamma_t() };
    let steps = (tau_end / dt).ceil() as usize;
    let h = if steps == 0 { 0.0 } else { tau_end / steps as f64 };
    for _ in 0..steps {
        let k1 = rate(&v);
        let k2 = rate(&axpy(&v, &k1, h / 2.0));
        let k3 = rate(&axpy(&v, &k2, h / 2.0));
        let k4 = rate(&axpy(&v, &k3, h));
        for i in 0..4 {
            for j in 0..4 {
                v[i][j] += h / 6.0 * (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]);
            }
        }
    }
    (4.0 * v[0][0], 4.0 * v[0][2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn params(s: f64, n: f64, t: f64) -> ChannelParams {
        ChannelParams::new(s, n, t).unwrap()
    }

    #[test]
    fn validation() {
        assert!(ChannelParams::new(-0.1, 0.0, 0.0).is_err());
        assert!(ChannelParams::new(0.0, -1.0, 0.0).is_err());
        assert!(ChannelParams::new(0.0, 0.0, 1.1).is_err());
        assert!(ChannelParams::new(0.0, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn gamma_t_conversion() {
        let p = ChannelParams::from_gamma_t(1.0, 0.5, 2f64.ln()).unwrap();
        assert_relative_eq!(p.time(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(p.gamma_t(), 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn evolve_limits() {
        let g = evolve_channel(&params(0.7, 2.0, 0.0));
        let pure = two_mode_squeezed_vacuum(0.7).unwrap();
        assert_eq!(g, pure);

        let g = evolve_channel(&params(0.7, 2.0, 1.0));
        assert_relative_eq!(g.gamma(), 5.0);
        assert_eq!(g.lam(), 0.0);
    }

    #[test]
    fn evolve_mixed_example() {
        let g = evolve_channel(&params(1.0, 0.5, 0.5));
        assert!((g.gamma() - 2.88110).abs() < 5e-6);
        assert!((g.lam() - 1.81343).abs() < 5e-6);
        let (gamma, lam) = moment_flow(&params(1.0, 0.5, 0.5), 1e-4);
        assert!((g.gamma() - gamma).abs() < 1e-9);
        assert!((g.lam() - lam).abs() < 1e-9);
    }

    #[test]
    fn noise_factor_examples() {
        for t in [0.0, 0.3, 1.0] {
            assert_relative_eq!(noise_factor(&params(0.0, 0.0, t)).value, 1.0, epsilon = 1e-15);
        }
        assert!((noise_factor(&params(1.0, 3.0, 0.0)).value - 0.13534).abs() < 5e-6);
        assert!((noise_factor(&params(1.0, 1.0, 0.5)).value - 1.56767).abs() < 5e-6);
    }

    #[test]
    fn separability_examples() {
        assert!(!is_separable(&params(0.5, 0.0, 0.0)));
        for s in [0.0, 0.5, 2.0] {
            assert!(is_separable(&params(s, 0.0, 1.0)));
            assert!(is_separable(&params(s, 3.0, 1.0)));
        }
        for t in [0.0, 0.2, 0.9, 0.999] {
            assert!(!is_separable(&params(0.8, 0.0, t)));
        }
    }

    #[test]
    fn direct_noise_examples() {
        assert_eq!(direct_noise(0.0, 0.7).unwrap().value, 0.0);
        assert_eq!(direct_noise(1.3, 1.0).unwrap().value, 1.3);
        assert_relative_eq!(direct_noise(2.0, 0.3).unwrap().value, 0.6, epsilon = 1e-15);
        assert_eq!(direct_noise(1.0, 0.5).unwrap().kind, NoiseKind::Direct);
    }

    #[test]
    fn gap_examples() {
        assert_relative_eq!(teleport_vs_direct_gap(&params(1.0, 2.0, 0.0)), (-2f64).exp(), epsilon = 1e-15);
        let t: f64 = 0.4;
        let g = teleport_vs_direct_gap(&params(30.0, 0.0, t));
        assert_relative_eq!(g, 1.0 - (1.0 - t).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn gap_identity_and_sign() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..500 {
            let p = params(rng.random_range(0.0..3.0), rng.random_range(0.0..5.0), rng.random_range(0.0..=1.0));
            let gap = teleport_vs_direct_gap(&p);
            let half = p.with_time(half_distance_time(p.time())).unwrap();
            let diff = noise_factor(&half).value - direct_noise(p.n_bar(), p.time()).unwrap().value;
            assert!((gap - diff).abs() < 1e-12);
            assert!(gap >= 0.0);
        }
    }

    #[test]
    fn noise_monotone_in_time_and_squeezing() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..20 {
            let s = rng.random_range(0.0..3.0);
            let n = rng.random_range(0.0..5.0);
            let mut last = f64::NEG_INFINITY;
            for k in 0..50 {
                let v = noise_factor(&params(s, n, k as f64 / 49.0)).value;
                assert!(v >= last - 1e-15);
                last = v;
            }
            let t = rng.random_range(0.0..1.0);
            let h = 1e-6;
            let d = (noise_factor(&params(s + h, n, t)).value - noise_factor(&params(s, n, t)).value) / h;
            assert!(d <= 1e-9);
        }
    }

    #[test]
    fn noise_bounds_and_physicality() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let p = params(rng.random_range(0.0..3.0), rng.random_range(0.0..5.0), rng.random_range(0.0..=1.0));
            let n = noise_factor(&p).value;
            assert!(n >= (-2.0 * p.s_qc()).exp() - 1e-12);
            assert!(n <= 2.0 * p.n_bar() + 1.0 + 1e-12);
            let g = evolve_channel(&p);
            assert!((g.noise_factor() - n).abs() < 1e-12 * g.gamma());
            assert!(g.gamma() >= 1.0 && g.gamma() > g.lam().abs());
            assert!(g.gamma().powi(2) - g.lam().powi(2) >= 1.0 - 1e-9);
        }
    }
}
