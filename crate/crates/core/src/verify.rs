//! Acceptance checks shared by the test suite and the `verify` command.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{rngs::StdRng, Rng, SeedableRng};
use serde::Serialize;

use crate::channel::{
    direct_noise, evolve_channel, half_distance_time, is_separable, moment_flow, noise_factor, teleport_vs_direct_gap,
    ChannelParams,
};
use crate::error::Result;
use crate::fidelity::{fock_fidelity, squeezed_fidelity};
use crate::nonclassicality::{
    photon_stats, quadrature_stats, quadrature_transfer, squeezing_threshold, sub_poisson_threshold,
    teleported_photon_stats_closed, PhotonStats,
};
use crate::phase_space::{GaussianOneMode, GridSpec, WignerGrid};
use crate::separability::{channel_is_separable_via_appendix, decompose, direct_p, reconstruct_p, PExponentMatrix};
use crate::states::{coherent_wigner, fock_wigner, squeezed_vacuum_wigner, InputState};
use crate::teleport::{
    measurement_density_grid, protocol_oracle_points, teleport_state, teleported_fock_wigner, teleported_squeezed_wigner,
    ORACLE_ORDER,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// Everything except the 4D protocol-oracle lattice.
    Quick,
    Full,
}

/// Knobs for the checks. `kernel_scale` multiplies the noise factor handed
/// to the grid teleportation map; anything but 1 is a deliberate mutation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub kernel_scale: f64,
    /// Oracle probe points per axis in criterion 3.
    pub oracle_probes: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            kernel_scale: 1.0,
            oracle_probes: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {} [{}] {}: {} ({:.2} s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.seconds
        )
    }
}

/// Collects failures for one criterion.
struct Check {
    worst: f64,
    failures: Vec<String>,
    count: usize,
}

impl Check {
    fn new() -> Self {
        Self {
            worst: 0.0,
            failures: Vec::new(),
            count: 0,
        }
    }

    fn close(&mut self, what: impl FnOnce() -> String, got: f64, want: f64, tol: f64) {
        self.count += 1;
        let err = (got - want).abs();
        if !(err <= tol) {
            self.failures.push(format!("{}: got {got:.12}, expected {want:.12}", what()));
        }
        if err.is_finite() {
            self.worst = self.worst.max(err);
        } else {
            self.worst = f64::INFINITY;
        }
    }

    fn holds(&mut self, what: impl FnOnce() -> String, ok: bool) {
        self.count += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn error(&mut self, what: String, e: crate::error::Error) {
        self.count += 1;
        self.failures.push(format!("{what}: {e}"));
        self.worst = f64::INFINITY;
    }

    fn finish(self, id: u8, name: &str, start: Instant) -> CriterionResult {
        let passed = self.failures.is_empty();
        let detail = if passed {
            format!("{} checks, max deviation {:.3e}", self.count, self.worst)
        } else {
            let shown: Vec<&str> = self.failures.iter().take(6).map(String::as_str).collect();
            format!(
                "{} of {} checks failed; {}",
                self.failures.len(),
                self.count,
                shown.join("; ")
            )
        };
        CriterionResult {
            id,
            name: name.to_string(),
            passed,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

fn params(s: f64, n: f64, t: f64) -> ChannelParams {
    ChannelParams::new(s, n, t).expect("fixed parameters are valid")
}

/// Quoted fidelity values: perfect transfer at `n_τ = 0`, `1/2` for vacuum
/// and `4^{-m}` for `|m⟩` at `n_τ = 1`, and the squeezed-vacuum law.
pub fn criterion1() -> CriterionResult {
    let start = Instant::now();
    let mut c = Check::new();
    let tol = 1e-9;
    for m in 0..=5 {
        match fock_fidelity(m, 0.0) {
            Ok(f) => c.close(|| format!("F_{m}(0)"), f.value, 1.0, tol),
            Err(e) => c.error(format!("F_{m}(0)"), e),
        }
    }
    for m in 0..=5u32 {
        let want = if m == 0 { 0.5 } else { 0.25f64.powi(m as i32) };
        match fock_fidelity(m, 1.0) {
            Ok(f) => c.close(|| format!("F_{m}(1)"), f.value, want, tol),
            Err(e) => c.error(format!("F_{m}(1)"), e),
        }
    }
    for s in [0.5f64, 1.0, 1.5] {
        let want = (2.0 + 2.0 * (2.0 * s).cosh()).powf(-0.5);
        match squeezed_fidelity(s, 1.0) {
            Ok(f) => c.close(|| format!("F(s={s}, 1)"), f.value, want, tol),
            Err(e) => c.error(format!("F(s={s}, 1)"), e),
        }
    }
    c.finish(1, "quoted fidelity values", start)
}

/// `n_τ = Γ - Λ` and the teleport-versus-direct gap identity and sign.
pub fn criterion2() -> CriterionResult {
    let start = Instant::now();
    let mut c = Check::new();
    let mut rng = StdRng::seed_from_u64(2);
    let draw = |rng: &mut StdRng| {
        params(rng.random_range(0.0..3.0), rng.random_range(0.0..5.0), rng.random_range(0.0..=1.0))
    };
    for _ in 0..100 {
        let p = draw(&mut rng);
        let g = evolve_channel(&p);
        c.close(|| format!("n_tau at {p:?}"), noise_factor(&p).value, g.gamma() - g.lam(), 1e-12);
    }
    for _ in 0..100 {
        let p = draw(&mut rng);
        let gap = teleport_vs_direct_gap(&p);
        let half = p.with_time(half_distance_time(p.time())).expect("half time in range");
        let direct = direct_noise(p.n_bar(), p.time()).expect("valid").value;
        c.close(|| format!("gap at {p:?}"), gap, noise_factor(&half).value - direct, 1e-12);
        c.holds(|| format!("gap {gap} < 0 at {p:?}"), gap >= 0.0);
    }
    c.finish(2, "noise-factor identities", start)
}

/// Channel settings for the oracle lattice, spanning `n_τ` from 0.14 to 3.
pub const ORACLE_CHANNELS: [(f64, f64, f64); 6] = [
    (0.98, 0.0, 0.0),
    (0.5, 0.0, 0.0),
    (0.5, 0.2, 0.3),
    (1.0, 0.5, 0.5),
    (1.0, 1.0, 0.5),
    (0.0, 1.0, 1.0),
];

pub const ORACLE_INPUTS: [InputState; 4] = [
    InputState::Vacuum,
    InputState::Fock(1),
    InputState::Fock(2),
    InputState::Squeezed(0.7),
];

/// Protocol oracle versus the convolution map on a probe lattice.
pub fn criterion3(opts: &VerifyOptions) -> CriterionResult {
    let start = Instant::now();
    let mut c = Check::new();
    let spec = GridSpec::default();
    let mid = spec.resolution() / 2 - 1;
    let k = opts.oracle_probes.max(1);
    let half = (k as isize - 1) / 2;
    let idx: Vec<usize> = (0..k as isize).map(|j| (mid as isize + 16 * (j - half)) as usize).collect();
    let probes: Vec<(usize, usize)> = idx.iter().flat_map(|&a| idx.iter().map(move |&b| (a, b))).collect();
    let points: Vec<Complex64> = probes.iter().map(|&(a, b)| spec.alpha(a, b)).collect();
    for input in ORACLE_INPUTS {
        let w_o = match input.grid(spec) {
            Ok(w) => w,
            Err(e) => {
                c.error(format!("{input}"), e);
                continue;
            }
        };
        for (s, n, t) in ORACLE_CHANNELS {
            let ch = evolve_channel(&params(s, n, t));
            let label = || format!("{input} through (s={s}, nbar={n}, T={t})");
            let grid = match teleport_state(&w_o, ch.noise_factor() * opts.kernel_scale) {
                Ok(g) => g,
                Err(e) => {
                    c.error(label(), e);
                    continue;
                }
            };
            match protocol_oracle_points(&input, &ch, &points, ORACLE_ORDER) {
                Ok(vals) => {
                    let dev = probes
                        .iter()
                        .zip(&vals)
                        .map(|(&(a, b), v)| (grid.at(a, b) - v).abs())
                        .fold(0.0, f64::max);
                    c.close(|| format!("{} sup deviation", label()), dev, 0.0, 1e-5);
                }
                Err(e) => c.error(label(), e),
            }
        }
    }
    c.finish(3, "protocol oracle equivalence", start)
}

fn sup(c: &mut Check, what: impl Fn() -> String, a: Result<WignerGrid>, b: Result<WignerGrid>, tol: f64) {
    match (a, b) {
        (Ok(a), Ok(b)) => match a.sup_distance(&b) {
            Ok(d) => c.close(&what, d, 0.0, tol),
            Err(e) => c.error(what(), e),
        },
        (Err(e), _) | (_, Err(e)) => c.error(what(), e),
    }
}

/// Closed-form teleported Fock and squeezed states against grid
/// convolution.
pub fn criterion4(opts: &VerifyOptions) -> CriterionResult {
    let start = Instant::now();
    let mut c = Check::new();
    let spec = GridSpec::default();
    let scale = opts.kernel_scale;
    for m in 0..=3 {
        let w = match fock_wigner(m, spec) {
            Ok(w) => w,
            Err(e) => {
                c.error(format!("Fock {m} input"), e);
                continue;
            }
        };
        for n in [0.2, 0.5, 1.0, 2.0] {
            let conv = teleport_state(&w, n * scale);
            sup(&mut c, || format!("Fock {m}, n_tau={n}"), teleported_fock_wigner(m, n, spec), conv, 1e-6);
        }
    }
    let wide = GridSpec::new(8.0, 256).expect("valid");
    for s in [0.5, 1.0] {
        let w = match squeezed_vacuum_wigner(s, wide) {
            Ok(w) => w,
            Err(e) => {
                c.error(format!("squeezed {s} input"), e);
                continue;
            }
        };
        for n in [0.3, 0.5] {
            let conv = teleport_state(&w, n * scale);
            sup(&mut c, || format!("squeezed {s}, n_tau={n}"), teleported_squeezed_wigner(s, n, wide), conv, 1e-6);
        }
    }
    c.finish(4, "closed-form teleported states", start)
}

/// Inputs with nonzero mean and/or squeezing for the quadrature checks.
fn quadrature_inputs(spec: GridSpec) -> Vec<(String, Result<WignerGrid>)> {
    let displaced_squeezed = |mean: Complex64, s: f64, theta: f64| {
        GaussianOneMode::squeezed(mean, s, theta).sample(spec, true)
    };
    vec![
        ("coherent 0.5".into(), coherent_wigner(Complex64::new(0.5, 0.0), spec)),
        ("coherent -0.3+0.8i".into(), coherent_wigner(Complex64::new(-0.3, 0.8), spec)),
        ("squeezed 0.5".into(), squeezed_vacuum_wigner(0.5, spec)),
        ("displaced squeezed 0.4".into(), Ok(displaced_squeezed(Complex64::new(0.7, -0.4), 0.4, 0.3))),
        ("displaced squeezed 0.6".into(), Ok(displaced_squeezed(Complex64::new(-0.5, -0.6), 0.6, 1.1))),
    ]
}

/// Photon-number and quadrature moments after teleportation.
pub fn criterion5(opts: &VerifyOptions) -> CriterionResult {
    let start = Instant::now();
    let mut c = Check::new();
    let spec = GridSpec::new(9.0, 256).expect("valid");
    for m in 0..=3 {
        let w = match fock_wigner(m, spec) {
            Ok(w) => w,
            Err(e) => {
                c.error(format!("Fock {m}"), e);
                continue;
            }
        };
        for n in [0.25, 0.6, 1.2] {
            match teleport_state(&w, n * opts.kernel_scale).and_then(|r| photon_stats(&r)) {
                Ok(s) => {
                    let mf = m as f64;
                    c.close(|| format!("mean, Fock {m}, n_tau={n}"), s.mean, mf + n, 1e-5);
                    c.close(|| format!("variance, Fock {m}, n_tau={n}"), s.variance, (2.0 * mf + 1.0) * n + n * n, 1e-5);
                }
                Err(e) => c.error(format!("Fock {m}, n_tau={n}"), e),
            }
        }
    }
    let spec = GridSpec::new(8.0, 256).expect("valid");
    for (name, w) in quadrature_inputs(spec) {
        let w = match w {
            Ok(w) => w,
            Err(e) => {
                c.error(name, e);
                continue;
            }
        };
        for n in [0.2, 0.7] {
            let r = match teleport_state(&w, n * opts.kernel_scale) {
                Ok(r) => r,
                Err(e) => {
                    c.error(format!("{name}, n_tau={n}"), e);
                    continue;
                }
            };
            for phi in [0.0, PI / 4.0, PI / 2.0, 2.0] {
                let both = quadrature_stats(&w, phi)
                    .and_then(|q| quadrature_transfer(&q, n))
                    .and_then(|want| quadrature_stats(&r, phi).map(|got| (want, got)));
                match both {
                    Ok((want, got)) => {
                        c.close(|| format!("{name} mean, phi={phi}, n_tau={n}"), got.mean, want.mean, 1e-5);
                        c.close(|| format!("{name} variance, phi={phi}, n_tau={n}"), got.variance, want.variance, 1e-5);
                    }
                    Err(e) => c.error(format!("{name}, phi={phi}"), e),
                }
            }
        }
    }
    c.finish(5, "moment transfer", start)
}

/// Root of `f` on `[lo, hi]` by bisection, assuming a sign change.
fn bisect(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> Result<f64>) -> Result<Option<f64>> {
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo.signum() == f_hi.signum() {
        return Ok(None);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Sub-Poisson and squeezing crossovers located on teleported grids.
pub fn criterion6(opts: &VerifyOptions) -> CriterionResult {
    let start = Instant::now();
    let mut c = Check::new();
    let spec = GridSpec::default();
    for m in 1..=3 {
        let Some(want) = sub_poisson_threshold(&PhotonStats::fock(m)) else {
            c.holds(|| format!("Fock {m} has no sub-Poisson threshold"), false);
            continue;
        };
        c.holds(|| format!("Fock {m} threshold {want} > 1/2"), want <= 0.5);
        let w = match fock_wigner(m, spec) {
            Ok(w) => w,
            Err(e) => {
                c.error(format!("Fock {m}"), e);
                continue;
            }
        };
        let found = bisect(0.01, 0.5, 1e-6, |n| {
            let s = photon_stats(&teleport_state(&w, n * opts.kernel_scale)?)?;
            Ok(s.excess())
        });
        match found {
            Ok(Some(n)) => c.close(|| format!("sub-Poisson crossover, Fock {m}"), n, want, 1e-4),
            Ok(None) => c.holds(|| format!("no sub-Poisson crossover for Fock {m}"), false),
            Err(e) => c.error(format!("Fock {m}"), e),
        }
        // the closed-form statistics cross at the same point
        let closed = teleported_photon_stats_closed(PhotonStats::fock(m), want);
        c.close(|| format!("closed-form excess at threshold, Fock {m}"), closed.excess(), 0.0, 1e-12);
    }
    let wide = GridSpec::new(11.0, 320).expect("valid");
    for s in [0.5f64, 1.0] {
        let Some(want) = squeezing_threshold((-2.0 * s).exp()) else {
            c.holds(|| format!("squeezed {s} has no squeezing threshold"), false);
            continue;
        };
        c.holds(|| format!("squeezing threshold {want} > 1/2"), want <= 0.5);
        let w = match squeezed_vacuum_wigner(s, wide) {
            Ok(w) => w,
            Err(e) => {
                c.error(format!("squeezed {s}"), e);
                continue;
            }
        };
        let found = bisect(0.2, 0.5, 1e-6, |n| {
            Ok(quadrature_stats(&teleport_state(&w, n * opts.kernel_scale)?, 0.0)?.variance - 1.0)
        });
        match found {
            Ok(Some(n)) => c.close(|| format!("squeezing crossover, s_o={s}"), n, want, 1e-4),
            Ok(None) => c.holds(|| format!("no squeezing crossover for s_o={s}"), false),
            Err(e) => c.error(format!("squeezed {s}"), e),
        }
    }
    c.finish(6, "threshold laws", start)
}

/// Random Hermitian exponent matrix satisfying the positivity criterion.
pub fn random_valid_exponent(rng: &mut impl Rng) -> PExponentMatrix {
    let n_bb: f64 = rng.random_range(0.2..3.0);
    let n_cc: f64 = rng.random_range(0.2..3.0);
    let r = rng.random_range(0.0..0.95) * (n_bb * n_cc).sqrt();
    let phase = rng.random_range(0.0..2.0 * PI);
    PExponentMatrix::new(n_bb, n_cc, Complex64::from_polar(r, phase))
}

/// Decomposition route against the `n_τ >= 1` rule, and the explicit mixture
/// against the direct P function.
pub fn criterion7() -> CriterionResult {
    let start = Instant::now();
    let mut c = Check::new();
    let values_s = [0.0, 0.5, 1.0, 1.5, 2.0];
    let values_n = [0.0, 0.5, 1.0, 2.0, 4.0];
    let values_t = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut boundary = 0;
    for s in values_s {
        for n in values_n {
            for t in values_t {
                let p = params(s, n, t);
                let verdict = channel_is_separable_via_appendix(&evolve_channel(&p));
                if verdict.boundary {
                    boundary += 1;
                    continue;
                }
                let rule = is_separable(&p);
                c.holds(
                    || format!("(s={s}, nbar={n}, T={t}): decomposition {} vs rule {rule}", verdict.separable),
                    verdict.separable == rule,
                );
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..5 {
        let n = random_valid_exponent(&mut rng);
        let d = match decompose(&n) {
            Ok(d) => d,
            Err(e) => {
                c.error(format!("{n:?}"), e);
                continue;
            }
        };
        for _ in 0..20 {
            let a = Complex64::from_polar(rng.random_range(0.0..2.0), rng.random_range(0.0..2.0 * PI));
            let b = Complex64::from_polar(rng.random_range(0.0..2.0), rng.random_range(0.0..2.0 * PI));
            match reconstruct_p(&d, &n, a, b) {
                Ok(v) => c.close(|| format!("P at ({a}, {b}) for {n:?}"), v, direct_p(&n, a, b), 1e-8),
                Err(e) => c.error(format!("P at ({a}, {b})"), e),
            }
        }
    }
    let mut r = c.finish(7, "separability equivalence", start);
    r.detail = format!("{}; {boundary} boundary points skipped", r.detail);
    r
}

/// RK4 integration of the Gaussian moment flow versus the closed-form
/// channel evolution.
pub fn criterion8() -> CriterionResult {
    let start = Instant::now();
    let mut c = Check::new();
    for (s, n) in [(1.0, 0.5), (0.3, 2.0)] {
        for k in 1..=10 {
            let t = k as f64 / 10.0;
            let p = params(s, n, t);
            let g = evolve_channel(&p);
            let (gamma, lam) = moment_flow(&p, 1e-4);
            c.close(|| format!("Gamma at s={s}, nbar={n}, T={t}"), gamma, g.gamma(), 1e-6);
            c.close(|| format!("Lambda at s={s}, nbar={n}, T={t}"), lam, g.lam(), 1e-6);
        }
    }
    c.finish(8, "Fokker-Planck moment flow", start)
}

/// Every constructed and teleported grid integrates to one; the homodyne
/// outcome density is normalized and nonnegative.
pub fn criterion9() -> CriterionResult {
    let start = Instant::now();
    let mut c = Check::new();
    let spec = GridSpec::new(8.0, 256).expect("valid");
    let mut grids: Vec<(String, Result<WignerGrid>)> = Vec::new();
    grids.push(("vacuum".into(), InputState::Vacuum.grid(spec)));
    for m in 0..=5 {
        grids.push((format!("Fock {m}"), fock_wigner(m, spec)));
    }
    for s in [0.5, 1.0] {
        grids.push((format!("squeezed {s}"), squeezed_vacuum_wigner(s, spec)));
    }
    grids.push(("coherent 1+0.5i".into(), coherent_wigner(Complex64::new(1.0, 0.5), spec)));
    grids.push((
        "rotated squeezed Gaussian".into(),
        Ok(GaussianOneMode::squeezed(Complex64::new(0.3, -0.2), 0.6, 0.7).sample(spec, true)),
    ));
    let mut teleported = Vec::new();
    for (name, g) in &grids {
        if let Ok(g) = g {
            for n in [0.1, 0.5, 1.0] {
                teleported.push((format!("teleported {name}, n_tau={n}"), teleport_state(g, n)));
            }
        }
    }
    grids.extend(teleported);
    for m in [0, 1, 3, 5] {
        for n in [0.2, 0.5, 1.0] {
            grids.push((format!("closed-form teleported Fock {m}, n_tau={n}"), teleported_fock_wigner(m, n, spec)));
        }
    }
    for s in [0.5, 1.0] {
        grids.push((format!("closed-form teleported squeezed {s}"), teleported_squeezed_wigner(s, 0.4, spec)));
    }
    for (name, g) in grids {
        match g {
            Ok(g) => c.close(|| format!("integral of {name}"), g.integrate(), 1.0, 1e-5),
            Err(e) => c.error(name, e),
        }
    }

    let outcomes = GridSpec::new(5.0, 41).expect("valid");
    let cases = [
        (InputState::Vacuum, params(0.0, 0.0, 0.0)),
        (InputState::Vacuum, params(0.5, 0.0, 0.0)),
        (InputState::Fock(1), params(1.0, 0.5, 0.5)),
        (InputState::Coherent(Complex64::new(1.0, 0.0)), params(0.0, 0.0, 0.0)),
    ];
    for (input, p) in cases {
        match measurement_density_grid(&input, &evolve_channel(&p), outcomes, 10) {
            Ok(d) => {
                c.close(|| format!("outcome density of {input} via {p:?}"), d.integrate(), 1.0, 1e-5);
                c.holds(|| format!("negative outcome density {} for {input}", d.min()), d.min() >= -1e-9);
            }
            Err(e) => c.error(format!("outcome density of {input}"), e),
        }
    }
    c.finish(9, "normalization", start)
}

pub fn run(level: Level, opts: &VerifyOptions) -> Vec<CriterionResult> {
    let mut out = vec![criterion1(), criterion2()];
    if level == Level::Full {
        out.push(criterion3(opts));
    }
    out.push(criterion4(opts));
    out.push(criterion5(opts));
    out.push(criterion6(opts));
    out.push(criterion7());
    out.push(criterion8());
    out.push(criterion9());
    out
}
