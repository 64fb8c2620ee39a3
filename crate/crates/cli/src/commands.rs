use std::path::PathBuf;

use cvtele_core::nonclassicality::min_quadrature_variance;
use cvtele_core::teleport::p_negativity_probe;
use cvtele_core::verify::{self, Level, VerifyOptions};
use cvtele_core::{
    direct_noise, fock_fidelity, is_separable, noise_factor, overlap_fidelity, p_positive_after_teleport,
    photon_stats, squeezed_fidelity, squeezing_threshold, sub_poisson_threshold, teleport_state,
    teleport_vs_direct_gap, ChannelParams, GridSpec, InputState, WignerGrid,
};
use serde::Serialize;

use crate::config::{Config, Range};
use crate::error::CliError;
use crate::output::{destination, emit, grid_csv, round_num, to_json, write_file, Cell, Format, Table, OUT_DIR_ENV};

/// Largest tolerated gap between closed-form and grid fidelities.
pub const FIDELITY_TOLERANCE: f64 = 1e-4;

pub struct SweepArgs {
    pub squeezing: Option<Range>,
    pub nbar: Option<Range>,
    pub time: Option<Range>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

pub fn noise_sweep(args: SweepArgs, cfg: &Config) -> Result<(), CliError> {
    let s_range: Range = cfg.require(args.squeezing, "squeezing")?;
    let n_range: Range = cfg.require(args.nbar, "nbar")?;
    let t_range: Range = cfg.require(args.time, "time")?;
    let format = cfg.pick(args.format, "format")?.unwrap_or_default();
    let out = cfg.pick(args.out, "out")?;

    let mut rows = Vec::new();
    for &s in &s_range.values() {
        for &nb in &n_range.values() {
            for &t in &t_range.values() {
                let p = ChannelParams::new(s, nb, t)?;
                let n_tau = noise_factor(&p).value;
                let n_d = direct_noise(nb, t)?.value;
                rows.push(vec![
                    Cell::Num(s),
                    Cell::Num(nb),
                    Cell::Num(t),
                    Cell::Num(n_tau),
                    Cell::Num(n_d),
                    Cell::Num(teleport_vs_direct_gap(&p)),
                    Cell::Bool(is_separable(&p)),
                ]);
            }
        }
    }
    let table = Table {
        columns: vec!["s_qc", "n_bar", "T", "n_tau", "n_d", "gap", "separable"],
        rows,
    };
    let dest = destination(out, &format!("noise_sweep.{}", format.extension()));
    emit(dest.as_deref(), &table.render(format))
}

pub struct GridArgs {
    pub grid_extent: Option<f64>,
    pub grid_res: Option<usize>,
}

impl GridArgs {
    /// Flag or config values; whatever is left unset defaults to the
    /// standard window, widened (at the standard spacing) when the state
    /// needs a half-width of at least `needed`.
    fn spec(self, cfg: &Config, needed: f64) -> Result<GridSpec, CliError> {
        let default = GridSpec::default();
        let extent = cfg.pick(self.grid_extent, "grid-extent")?;
        let res = cfg.pick(self.grid_res, "grid-res")?;
        let auto = (2.0 * needed).ceil() / 2.0;
        let (extent, res) = match (extent, res) {
            (Some(e), Some(r)) => (e, r),
            (Some(e), None) => (e, default.resolution()),
            (None, Some(r)) => (default.extent().max(auto), r),
            (None, None) if auto <= default.extent() => (default.extent(), default.resolution()),
            (None, None) => {
                let cells = (default.resolution() - 1) as f64 * auto / default.extent();
                (auto, cells.ceil() as usize + 1)
            }
        };
        Ok(GridSpec::new(extent, res)?)
    }
}

/// Half-width the grid map needs for `state` and noise up to `n_max`.
fn map_extent(state: &InputState, n_max: f64) -> f64 {
    state.min_extent().max(3.0 * (n_max.max(0.0) / 2.0).sqrt())
}

/// Half-width at which the teleported state has decayed enough for the
/// moment sums: its center offset plus 7.5 long-axis standard deviations.
fn moment_extent(state: &InputState, n_tau: f64) -> f64 {
    let (offset, var) = match *state {
        InputState::Vacuum => (0.0, 0.25),
        InputState::Fock(m) => (0.0, (2 * m + 1) as f64 / 4.0),
        InputState::Squeezed(s) => (0.0, (2.0 * s.abs()).exp() / 4.0),
        InputState::Coherent(mu) => (mu.norm(), 0.25),
    };
    offset + 7.5 * (var + n_tau.max(0.0) / 2.0).sqrt()
}

fn parse_state(flag: Option<String>, cfg: &Config) -> Result<InputState, CliError> {
    let text: String = cfg.require(flag, "state")?;
    text.parse().map_err(|e: cvtele_core::Error| CliError::Usage(e.to_string()))
}

pub struct FidelityArgs {
    pub state: Option<String>,
    pub n_tau: Option<Range>,
    pub grid: GridArgs,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

pub fn fidelity_table(args: FidelityArgs, cfg: &Config) -> Result<(), CliError> {
    let state = parse_state(args.state, cfg)?;
    let closed: Box<dyn Fn(f64) -> cvtele_core::Result<f64>> = match state {
        InputState::Vacuum => Box::new(|n| fock_fidelity(0, n).map(|r| r.value)),
        InputState::Fock(m) => Box::new(move |n| fock_fidelity(m, n).map(|r| r.value)),
        InputState::Squeezed(s) => Box::new(move |n| squeezed_fidelity(s, n).map(|r| r.value)),
        InputState::Coherent(_) => {
            return Err(CliError::Usage(
                "fidelity-table supports vacuum, fock:m and squeezed:s states".into(),
            ))
        }
    };
    let n_range: Range = cfg.require(args.n_tau, "n-tau")?;
    let n_values = n_range.values();
    let n_max = n_values.iter().cloned().fold(0.0, f64::max);
    let spec = args.grid.spec(cfg, map_extent(&state, n_max))?;
    let format = cfg.pick(args.format, "format")?.unwrap_or_default();
    let out = cfg.pick(args.out, "out")?;

    let input = state.grid(spec)?;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &n in &n_values {
        let f_closed = closed(n)?;
        let f_grid = overlap_fidelity(&input, &teleport_state(&input, n)?)?.value;
        let diff = (f_closed - f_grid).abs();
        worst = worst.max(diff);
        rows.push(vec![Cell::Num(n), Cell::Num(f_closed), Cell::Num(f_grid), Cell::Num(diff)]);
    }
    let table = Table {
        columns: vec!["n_tau", "F_closed", "F_grid", "abs_diff"],
        rows,
    };
    let dest = destination(out, &format!("fidelity_table.{}", format.extension()));
    emit(dest.as_deref(), &table.render(format))?;
    if worst > FIDELITY_TOLERANCE {
        return Err(CliError::Accuracy(format!(
            "closed-form and grid fidelities differ by {worst:.3e} > {FIDELITY_TOLERANCE:e}; widen or refine the grid"
        )));
    }
    Ok(())
}

pub struct VerifyArgs {
    pub level: Level,
    pub out: Option<PathBuf>,
    pub corrupt_kernel: f64,
    pub oracle_probes: Option<usize>,
}

#[derive(Serialize)]
struct VerifyReport {
    level: &'static str,
    passed: bool,
    criteria: Vec<CriterionEntry>,
}

#[derive(Serialize)]
struct CriterionEntry {
    id: u8,
    name: String,
    passed: bool,
    detail: String,
}

pub fn verify(args: VerifyArgs, cfg: &Config) -> Result<(), CliError> {
    let mut opts = VerifyOptions {
        kernel_scale: args.corrupt_kernel,
        ..VerifyOptions::default()
    };
    if let Some(p) = args.oracle_probes {
        if p == 0 {
            return Err(CliError::Usage("--oracle-probes must be positive".into()));
        }
        opts.oracle_probes = p;
    }
    let out = cfg.pick(args.out, "out")?;
    let results = verify::run(args.level, &opts);
    for r in &results {
        eprintln!("{}", r.line());
    }
    let report = VerifyReport {
        level: match args.level {
            Level::Quick => "quick",
            Level::Full => "full",
        },
        passed: results.iter().all(|r| r.passed),
        // timings stay on stderr so the report is reproducible
        criteria: results
            .into_iter()
            .map(|r| CriterionEntry {
                id: r.id,
                name: r.name,
                passed: r.passed,
                detail: r.detail,
            })
            .collect(),
    };
    let dest = destination(out, "verify.json");
    emit(dest.as_deref(), &to_json(&report))?;
    if !report.passed {
        let failed: Vec<String> = report
            .criteria
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.id.to_string())
            .collect();
        return Err(CliError::Accuracy(format!("failed criteria: {}", failed.join(", "))));
    }
    Ok(())
}

pub struct ExportArgs {
    pub state: Option<String>,
    pub n_tau: Option<f64>,
    pub squeezing: Option<f64>,
    pub nbar: Option<f64>,
    pub time: Option<f64>,
    pub grid: GridArgs,
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ChannelEntry {
    s_qc: f64,
    n_bar: f64,
    #[serde(rename = "T")]
    time: f64,
}

#[derive(Serialize)]
struct MomentsEntry {
    photon_mean: f64,
    photon_variance: f64,
    min_quadrature_variance: f64,
}

#[derive(Serialize)]
struct GridHeader {
    file: String,
    sigma: f64,
    extent: f64,
    resolution: usize,
    spacing: f64,
    integral: f64,
    min: f64,
    max: f64,
    moments: Option<MomentsEntry>,
}

#[derive(Serialize)]
struct ProbeEntry {
    sigma: f64,
    min_value: f64,
}

#[derive(Serialize)]
struct Thresholds {
    sub_poisson_threshold: Option<f64>,
    squeezing_threshold: Option<f64>,
    p_positive: bool,
    p_negativity_probe: Option<ProbeEntry>,
}

#[derive(Serialize)]
struct ExportSummary {
    state: String,
    n_tau: f64,
    channel: Option<ChannelEntry>,
    input: GridHeader,
    teleported: GridHeader,
    thresholds: Thresholds,
    warnings: Vec<String>,
}

fn moments_of(w: &WignerGrid) -> cvtele_core::Result<MomentsEntry> {
    let p = photon_stats(w)?;
    Ok(MomentsEntry {
        photon_mean: round_num(p.mean),
        photon_variance: round_num(p.variance),
        min_quadrature_variance: round_num(min_quadrature_variance(w)?),
    })
}

fn header(file: &str, w: &WignerGrid, warnings: &mut Vec<String>) -> GridHeader {
    let moments = match moments_of(w) {
        Ok(m) => Some(m),
        Err(e) => {
            warnings.push(format!("{file}: moments unavailable: {e}"));
            None
        }
    };
    let spec = w.spec();
    GridHeader {
        file: file.into(),
        sigma: w.sigma(),
        extent: spec.extent(),
        resolution: spec.resolution(),
        spacing: round_num(spec.spacing()),
        integral: round_num(w.integrate()),
        min: round_num(w.min()),
        max: round_num(w.max()),
        moments,
    }
}

pub fn teleport_export(args: ExportArgs, cfg: &Config) -> Result<(), CliError> {
    let state = parse_state(args.state, cfg)?;
    let n_tau_flag = cfg.pick(args.n_tau, "n-tau")?;
    let s = cfg.pick(args.squeezing, "squeezing")?;
    let nb = cfg.pick(args.nbar, "nbar")?;
    let t = cfg.pick(args.time, "time")?;
    let (n_tau, channel) = match (n_tau_flag, s, nb, t) {
        (Some(n), None, None, None) => (n, None),
        (None, Some(s), Some(nb), Some(t)) => {
            let p = ChannelParams::new(s, nb, t)?;
            (noise_factor(&p).value, Some(ChannelEntry { s_qc: s, n_bar: nb, time: t }))
        }
        _ => {
            return Err(CliError::Usage(
                "give either --n-tau or all of --squeezing, --nbar and --time".into(),
            ))
        }
    };
    let spec = args.grid.spec(cfg, map_extent(&state, n_tau).max(moment_extent(&state, n_tau)))?;
    let dir = cfg
        .pick(args.out, "out")?
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));

    let input = state.grid(spec)?;
    let teleported = teleport_state(&input, n_tau)?;

    let mut warnings = Vec::new();
    let input_header = header("input.csv", &input, &mut warnings);
    let out_header = header("teleported.csv", &teleported, &mut warnings);
    let sub_poisson = input_header
        .moments
        .as_ref()
        .and_then(|m| sub_poisson_threshold(&cvtele_core::PhotonStats::new(m.photon_mean, m.photon_variance).ok()?));
    let squeezing = input_header
        .moments
        .as_ref()
        .and_then(|m| squeezing_threshold(m.min_quadrature_variance));
    let probe = match p_negativity_probe(&input, n_tau) {
        Ok(p) => Some(ProbeEntry {
            sigma: p.sigma,
            min_value: round_num(p.min_value),
        }),
        Err(e) => {
            warnings.push(format!("quasiprobability probe unavailable: {e}"));
            None
        }
    };
    for w in &warnings {
        eprintln!("warning: {w}");
    }

    write_file(&dir.join("input.csv"), &grid_csv(&input))?;
    write_file(&dir.join("input.json"), &to_json(&input_header))?;
    write_file(&dir.join("teleported.csv"), &grid_csv(&teleported))?;
    write_file(&dir.join("teleported.json"), &to_json(&out_header))?;
    let summary = ExportSummary {
        state: state.to_string(),
        n_tau: round_num(n_tau),
        channel,
        input: input_header,
        teleported: out_header,
        thresholds: Thresholds {
            sub_poisson_threshold: sub_poisson.map(round_num),
            squeezing_threshold: squeezing.map(round_num),
            p_positive: p_positive_after_teleport(n_tau),
            p_negativity_probe: probe,
        },
        warnings,
    };
    write_file(&dir.join("summary.json"), &to_json(&summary))
}
