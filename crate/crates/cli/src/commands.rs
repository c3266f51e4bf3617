//! Subcommand implementations. Each runner assembles its inputs from the
//! resolved configuration, produces one CSV on the requested path, and
//! writes the provenance sidecar.

use std::path::Path;

use metawave_core::designer::{design_lsq, DesignProblem, TargetPhase};
use metawave_core::raytrace::{
    cone_trace, image_distance_analytic, refocus_metrics, threshold_field, trace, Ray, Trajectory,
};
use metawave_core::schrodinger::{evolve, init_gaussian, EvolutionConfig, GridSpec};
use metawave_core::semiclassical::{ComovingParams, Transverse};
use metawave_core::pulse::{PulseShape, PulseSignal, PulseTrain};

use crate::config::{RunConfig, Severity};
use crate::output::{write_sidecar, CsvTable};
use crate::sweep::parallel_map;

/// Failure classes mapped to process exit codes.
#[derive(Debug)]
pub enum RunError {
    /// Bad configuration or usage (exit 1).
    Config(String),
    /// Numerical failure (exit 2).
    Numerical(String),
    /// Filesystem trouble (exit 1).
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 1,
            RunError::Numerical(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            RunError::Config(m) | RunError::Numerical(m) | RunError::Io(m) => m,
        }
    }
}

impl From<crate::config::ConfigError> for RunError {
    fn from(e: crate::config::ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

fn numerical<E: std::fmt::Display>(e: E) -> RunError {
    RunError::Numerical(e.to_string())
}

/// Fail on fatal diagnostics, print warnings to stderr.
pub fn enforce_valid(cfg: &RunConfig) -> Result<(), RunError> {
    for d in cfg.validate() {
        match d.severity {
            Severity::Fatal => return Err(RunError::Config(d.message)),
            Severity::Warning => eprintln!("warning: {}", d.message),
        }
    }
    Ok(())
}

fn sidecar(cfg: &RunConfig, out: &Path, command: &str, notes: &[String]) -> Result<(), RunError> {
    let entries: Vec<(String, String)> = cfg
        .entries()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    write_sidecar(out, command, &entries, notes)?;
    Ok(())
}

const TRAJECTORY_COLS: [&str; 7] = ["t_s", "x_m", "y_m", "z_m", "vx_mps", "vy_mps", "vz_mps"];

fn push_trajectory(table: &mut CsvTable, prefix: &[f64], tr: &Trajectory) {
    let mut row = Vec::with_capacity(prefix.len() + 7);
    for s in &tr.samples {
        row.clear();
        row.extend_from_slice(prefix);
        row.extend_from_slice(&[s.t, s.x, s.y, s.z, s.vx, s.vy, s.vz]);
        table.row(&row);
    }
}

pub fn run_trace(cfg: &RunConfig, out: &Path) -> Result<(), RunError> {
    enforce_valid(cfg)?;
    let scene = cfg.scene()?;
    let ray = Ray {
        theta: cfg.f64("trace.theta_rad")?,
        azimuth: cfg.f64("trace.azimuth_rad")?,
        v0: cfg.f64("beam.v0_mps")?,
    };
    let tr = trace(&scene, &ray, cfg.f64("trace.dt_us")? * 1e-6).map_err(numerical)?;
    let mut table = CsvTable::new(&TRAJECTORY_COLS);
    push_trajectory(&mut table, &[], &tr);
    table.write(out)?;
    let mut notes = vec![format!(
        "pulse_trigger_time_s = {}",
        crate::output::format_sig9(tr.pulse_trigger_time)
    )];
    if !tr.emergence_complete {
        notes.push("emergence incomplete: region shorter than the pulse extent".into());
    }
    sidecar(cfg, out, "trace", &notes)
}

pub fn run_phase(cfg: &RunConfig, out: &Path) -> Result<(), RunError> {
    enforce_valid(cfg)?;
    let device = cfg.device()?;
    match cfg.str("phase.mode") {
        "time" => {
            let k = device.transverse_from_velocity(cfg.f64("phase.vx_mps")?);
            let t_end = cfg.f64("phase.t_end_ms")? * 1e-3;
            let dt = cfg.f64("phase.dt_ms")? * 1e-3;
            if !(dt > 0.0 && t_end > 0.0) {
                return Err(RunError::Config("phase grid must be positive".into()));
            }
            let n = (t_end / dt - 1e-9).ceil() as usize;
            let mut table = CsvTable::new(&["t_s", "phi_rad"]);
            for i in 0..=n {
                let t = (i as f64 * dt).min(t_end);
                let phi = device.phase_shift(t, k).map_err(numerical)?;
                table.row(&[t, phi]);
            }
            table.write(out)?;
        }
        "asymptotic" => {
            let n = cfg.usize("phase.n")?.max(2);
            let v_lo = cfg.f64("phase.vx_min_mps")?;
            let v_hi = cfg.f64("phase.vx_max_mps")?;
            let k_grid: Vec<f64> = (0..n)
                .map(|i| {
                    let v = v_lo + (v_hi - v_lo) * i as f64 / (n - 1) as f64;
                    device.transverse_from_velocity(v).wavenumber()
                })
                .collect();
            let profile = device.asymptotic_profile(&k_grid).map_err(numerical)?;
            let mut table = CsvTable::new(&["k_per_m", "phi_inf_rad"]);
            for (k, phi) in profile.k_grid.iter().zip(profile.phi.iter()) {
                table.row(&[*k, *phi]);
            }
            table.write(out)?;
        }
        other => {
            return Err(RunError::Config(format!(
                "phase.mode must be time or asymptotic, got `{other}`"
            )))
        }
    }
    sidecar(cfg, out, "phase", &[])
}

pub fn run_vg(cfg: &RunConfig, out: &Path) -> Result<(), RunError> {
    enforce_valid(cfg)?;
    let device = cfg.device()?;
    let theta = cfg.f64("vg.theta_rad")?;
    let v0 = cfg.f64("beam.v0_mps")?;
    let k = device.transverse_from_velocity(v0 * theta.sin());
    let t_end = cfg.f64("vg.t_end_ms")? * 1e-3;
    let dt = cfg.f64("vg.dt_ms")? * 1e-3;
    if !(dt > 0.0 && t_end > 0.0) {
        return Err(RunError::Config("vg grid must be positive".into()));
    }
    let n = (t_end / dt - 1e-9).ceil() as usize;
    let mut table = CsvTable::new(&["t_s", "xi_m", "vgx_mps"]);
    for i in 0..=n {
        let t = (i as f64 * dt).min(t_end);
        let xi = device.packet_center(t, k, 0.0).map_err(numerical)?;
        table.row(&[t, xi, device.group_velocity(t, k)]);
    }
    table.write(out)?;
    sidecar(cfg, out, "vg", &[])
}

pub fn run_spectrum(cfg: &RunConfig, out: &Path) -> Result<(), RunError> {
    enforce_valid(cfg)?;
    let signal = cfg.signal()?;
    let n = cfg.usize("spectrum.n")?.max(2);
    let lo = cfg.f64("spectrum.nu_min_hz")?;
    let hi = cfg.f64("spectrum.nu_max_hz")?;
    let grid: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let spectrum = signal.spectrum(&grid).map_err(numerical)?;
    let mut table = CsvTable::new(&["nu_Hz", "reH_Js", "imH_Js"]);
    for (nu, h) in spectrum.nu_grid.iter().zip(spectrum.values.iter()) {
        table.row(&[*nu, h.re, h.im]);
    }
    table.write(out)?;
    sidecar(cfg, out, "spectrum", &[])
}

pub fn run_lens_scan(cfg: &RunConfig, out: &Path, threads: usize) -> Result<(), RunError> {
    enforce_valid(cfg)?;
    let scene = cfg.scene()?;
    let lo = cfg.f64("scan.theta_min")?;
    let hi = cfg.f64("scan.theta_max")?;
    let step = cfg.f64("scan.theta_step")?;
    if !(step > 0.0 && hi >= lo && lo > 0.0) {
        return Err(RunError::Config("invalid lens-scan angle grid".into()));
    }
    let mut thetas = Vec::new();
    let mut th = lo;
    while th <= hi + 1e-12 {
        thetas.push(th);
        th += step;
    }
    let v0s = cfg.f64_list("scan.v0_list")?;
    // v0 outer, theta inner
    let pairs: Vec<(f64, f64)> = v0s
        .iter()
        .flat_map(|&v| thetas.iter().map(move |&t| (v, t)))
        .collect();
    let rows = parallel_map(&pairs, threads, |&(v0, theta)| {
        image_distance_analytic(&scene, theta, v0).map(|dz| (v0, theta, dz))
    });
    let mut table = CsvTable::new(&["v0_mps", "theta_rad", "deltaZ_m", "deltaZ_plane_m"]);
    for r in rows {
        let (v0, theta, dz) = r.map_err(numerical)?;
        table.row(&[v0, theta, dz, dz - scene.source_distance]);
    }
    table.write(out)?;
    sidecar(cfg, out, "lens-scan", &[])
}

pub fn run_threshold(cfg: &RunConfig, out: &Path, threads: usize) -> Result<(), RunError> {
    enforce_valid(cfg)?;
    let scene = cfg.scene()?;
    let b_ref = cfg.f64("field.B_gauss")? * 1e-4;
    let v0 = cfg.f64("beam.v0_mps")?;
    let lo = cfg.f64("thr.b_min_gauss")? * 1e-4;
    let hi = cfg.f64("thr.b_max_gauss")? * 1e-4;
    let thetas = cfg.f64_list("thr.theta_list")?;
    let rows = parallel_map(&thetas, threads, |&theta| {
        threshold_field(&scene, b_ref, &Ray::in_plane(theta, v0), (lo, hi))
            .map(|b| (theta, b * 1e4))
    });
    let mut table = CsvTable::new(&["theta_rad", "B_threshold_G"]);
    for r in rows {
        let (theta, bg) = r.map_err(numerical)?;
        table.row(&[theta, bg]);
    }
    table.write(out)?;
    sidecar(cfg, out, "threshold", &[])
}

pub fn run_evolve(cfg: &RunConfig, out: &Path) -> Result<(), RunError> {
    enforce_valid(cfg)?;
    // scaled units: hbar = m = 1, kappa = 1
    let shape = PulseShape::new(
        cfg.f64("scaled.eps")?,
        cfg.f64("scaled.tau")?,
        cfg.f64("scaled.tau1")?,
    )
    .map_err(|e| RunError::Config(e.to_string()))?;
    let signal = PulseSignal::from_amplitude(cfg.f64("scaled.A")?, shape, PulseTrain::single());
    let params = ComovingParams::new(core::f64::consts::TAU, signal, 1.0, 1.0)
        .map_err(|e| RunError::Config(e.to_string()))?;
    let length = cfg.f64("grid.length")?;
    let grid = GridSpec::new(-0.5 * length, 0.5 * length, cfg.usize("grid.n")?)
        .map_err(|e| RunError::Config(e.to_string()))?;
    let packet = init_gaussian(
        grid,
        cfg.f64("packet.x0")?,
        cfg.f64("packet.sigma")?,
        cfg.f64("packet.k0")?,
    )
    .map_err(|e| RunError::Config(e.to_string()))?;
    let mut run = EvolutionConfig::new(
        cfg.f64("run.dt")?,
        cfg.f64("run.t_end")?,
        cfg.usize("run.record_every")?,
    );
    run.phase_offset = cfg.f64("scaled.phase")?;
    let series = evolve(&packet, &params, &run).map_err(numerical)?;
    let mut table = CsvTable::new(&["t", "norm", "mean_x", "var_x", "mean_v", "vg_current"]);
    for r in &series.records {
        table.row(&[r.t, r.norm, r.mean_x, r.var_x, r.mean_v, r.vg_current]);
    }
    table.write(out)?;
    sidecar(cfg, out, "evolve", &[])
}

pub fn run_design(
    cfg: &RunConfig,
    target_path: &Path,
    horizon: f64,
    lambda: f64,
    out: &Path,
) -> Result<(), RunError> {
    enforce_valid(cfg)?;
    let device = cfg.device()?;
    let text = std::fs::read_to_string(target_path)
        .map_err(|e| RunError::Io(format!("{}: {e}", target_path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| RunError::Config("empty target file".into()))?;
    if header.trim() != "k_per_m,phi_rad" {
        return Err(RunError::Config(format!(
            "target header must be `k_per_m,phi_rad`, got `{header}`"
        )));
    }
    let mut k_grid = Vec::new();
    let mut phi = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (a, b) = line.split_once(',').ok_or_else(|| {
            RunError::Config(format!("target line {}: expected two columns", i + 2))
        })?;
        let k: f64 = a
            .trim()
            .parse()
            .map_err(|_| RunError::Config(format!("target line {}: bad k", i + 2)))?;
        let p: f64 = b
            .trim()
            .parse()
            .map_err(|_| RunError::Config(format!("target line {}: bad phi", i + 2)))?;
        k_grid.push(k);
        phi.push(p);
    }
    let target = TargetPhase {
        k_grid: k_grid.clone(),
        phi_target: phi,
    };
    let mut nu_max = 0.0_f64;
    for &k in &k_grid {
        nu_max = nu_max.max(
            device
                .resonance_frequency(Transverse::from_wavenumber(k))
                .abs(),
        );
    }
    if nu_max == 0.0 {
        nu_max = 1.0 / horizon;
    }
    let problem = DesignProblem::with_horizon(horizon, nu_max, lambda)
        .map_err(|e| RunError::Config(e.to_string()))?;
    let result = design_lsq(&device, &target, &problem).map_err(numerical)?;
    let mut table = CsvTable::new(&["t_s", "s_J"]);
    for (t, s) in result.t_grid.iter().zip(result.s_samples.iter()) {
        table.row(&[*t, *s]);
    }
    table.write(out)?;
    sidecar(
        cfg,
        out,
        "design",
        &[
            format!(
                "residual_max_rad = {}",
                crate::output::format_sig9(result.residual_max)
            ),
            format!(
                "residual_rms_rad = {}",
                crate::output::format_sig9(result.residual_rms)
            ),
        ],
    )
}

/// The frozen parameter bundle behind every figure recipe: applied over any
/// config file (so recipes stay reproducible) but before `--set` flags (so
/// deviations require an explicit override).
pub fn recipe_overrides(which: &str) -> Option<Vec<(&'static str, &'static str)>> {
    let bundle = [
        ("atom.mass_u", "39.948"),
        ("atom.lande_g", "1.5"),
        ("atom.M", "2"),
        ("field.B_gauss", "400"),
        ("pulse.epsilon_ms", "7.4"),
        ("pulse.tau_ms", "0.37"),
        ("pulse.tau1_ms", "1.2"),
        ("pulse.train", "1@0"),
        ("device.lambda_mm", "5"),
        ("source.distance_cm", "2"),
        ("beam.v0_mps", "20"),
        ("scene.sync", "per_ray"),
        ("scene.length_mm", "40"),
        ("scene.dim", "1"),
        ("trace.dt_us", "1"),
    ];
    let mut v: Vec<(&str, &str)> = bundle.to_vec();
    match which {
        "fig2" | "fig4a" => {}
        "fig3" => {
            v.push(("scan.theta_min", "0.005"));
            v.push(("scan.theta_max", "0.12"));
            v.push(("scan.theta_step", "0.005"));
            v.push(("scan.v0_list", "18,20,22"));
        }
        "fig4b" => v.push(("scene.dim", "2")),
        "fig5" => {
            v.push(("pulse.train", "1@0,1.5@1,1@2"));
            v.push(("scene.length_mm", "80"));
        }
        _ => return None,
    }
    Some(v)
}

/// Frozen figure recipes over the reference bundle; the parameter overlay has
/// already been applied by the caller.
pub fn run_figure(
    cfg: &RunConfig,
    which: &str,
    out: &Path,
    threads: usize,
) -> Result<(), RunError> {
    enforce_valid(cfg)?;
    match which {
        "fig2" => {
            let scene = cfg.scene()?;
            let v0 = cfg.f64("beam.v0_mps")?;
            let dt = cfg.f64("trace.dt_us")? * 1e-6;
            let thetas: Vec<f64> = (0..=6).map(|i| i as f64 * 0.02).collect();
            let trs = parallel_map(&thetas, threads, |&theta| {
                trace(&scene, &Ray::in_plane(theta, v0), dt)
            });
            let mut cols = vec!["theta_rad"];
            cols.extend_from_slice(&TRAJECTORY_COLS);
            let mut table = CsvTable::new(&cols);
            for (theta, tr) in thetas.iter().zip(trs) {
                push_trajectory(&mut table, &[*theta], &tr.map_err(numerical)?);
            }
            table.write(out)?;
            sidecar(cfg, out, "figure fig2", &[])
        }
        "fig3" => run_lens_scan(cfg, out, threads),
        "fig4a" | "fig4b" => {
            let scene = cfg.scene()?;
            let v0 = cfg.f64("beam.v0_mps")?;
            let dt = cfg.f64("trace.dt_us")? * 1e-6;
            let azimuths: Vec<f64> = (0..=8)
                .map(|i| i as f64 * core::f64::consts::PI / 8.0)
                .collect();
            let trs = cone_trace(&scene, 0.1, &azimuths, v0, dt).map_err(numerical)?;
            let mut cols = vec!["theta_rad", "azimuth_rad"];
            cols.extend_from_slice(&TRAJECTORY_COLS);
            let mut table = CsvTable::new(&cols);
            for (az, tr) in azimuths.iter().zip(trs.iter()) {
                push_trajectory(&mut table, &[0.1, *az], tr);
            }
            table.write(out)?;
            sidecar(cfg, out, &format!("figure {which}"), &[])
        }
        "fig5" => {
            let scene = cfg.scene()?;
            let v0 = cfg.f64("beam.v0_mps")?;
            let dt = cfg.f64("trace.dt_us")? * 1e-6;
            let thetas: Vec<f64> = (0..=8).map(|i| i as f64 * 2e-3).collect();
            let trs = parallel_map(&thetas, threads, |&theta| {
                trace(&scene, &Ray::in_plane(theta, v0), dt)
            });
            let mut cols = vec!["theta_rad"];
            cols.extend_from_slice(&TRAJECTORY_COLS);
            let mut table = CsvTable::new(&cols);
            for (theta, tr) in thetas.iter().zip(trs) {
                push_trajectory(&mut table, &[*theta], &tr.map_err(numerical)?);
            }
            table.write(out)?;
            let report = refocus_metrics(&scene, &thetas, v0, dt).map_err(numerical)?;
            sidecar(
                cfg,
                out,
                "figure fig5",
                &[
                    format!(
                        "z_focus_m = {}",
                        crate::output::format_sig9(report.z_focus)
                    ),
                    format!(
                        "rms_spread_m = {}",
                        crate::output::format_sig9(report.rms_spread)
                    ),
                ],
            )
        }
        other => Err(RunError::Config(format!(
            "unknown figure `{other}` (expected fig2|fig3|fig4a|fig4b|fig5)"
        ))),
    }
}
