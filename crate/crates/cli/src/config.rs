//! Plain-text run configuration: `section.key = value` lines, `#` comments.
//!
//! Every key is declared in the registry below with its default (the reference
//! parameter bundle); unknown keys are rejected with the offending line
//! number so typos cannot silently fall back to defaults. CLI `--set`
//! overrides take the same `key=value` form.

use std::collections::BTreeMap;
use std::fmt;

use metawave_core::constants::{AtomSpecies, PhysicalConstants, ZeemanState};
use metawave_core::pulse::{PulseShape, PulseSignal, PulseTrain};
use metawave_core::raytrace::{Dimensionality, Scene, SyncMode};
use metawave_core::semiclassical::ComovingParams;

/// Key registry: name, default, description (documented in FORMATS.md).
pub const KEYS: &[(&str, &str, &str)] = &[
    ("atom.mass_u", "39.948", "atomic mass in u"),
    ("atom.lande_g", "1.5", "Lande g factor"),
    ("atom.M", "2", "magnetic quantum number"),
    ("field.B_gauss", "400", "peak field magnitude in gauss"),
    ("pulse.epsilon_ms", "7.4", "shape roll-off scale in ms"),
    ("pulse.tau_ms", "0.37", "shape decay time in ms"),
    ("pulse.tau1_ms", "1.2", "shape support end in ms"),
    ("pulse.train", "1@0", "weighted delays, w@d_ms comma-separated"),
    ("source.distance_cm", "2", "source distance before the entrance plane in cm"),
    ("beam.v0_mps", "20", "beam speed in m/s"),
    ("scene.dim", "1", "device dimensionality, 1 or 2"),
    ("scene.sync", "per_ray", "pulse trigger: per_ray or global"),
    ("scene.length_mm", "40", "field region length in mm"),
    ("device.lambda_mm", "5", "spatial period in mm"),
    ("trace.theta_rad", "0.1", "ray polar angle in rad"),
    ("trace.azimuth_rad", "0", "ray azimuth in rad"),
    ("trace.dt_us", "1", "trajectory sampling step in us"),
    ("scan.theta_min", "0.005", "lens scan: smallest angle in rad"),
    ("scan.theta_max", "0.12", "lens scan: largest angle in rad"),
    ("scan.theta_step", "0.005", "lens scan: angle step in rad"),
    ("scan.v0_list", "18,20,22", "lens scan: speeds in m/s, comma-separated"),
    ("thr.theta_list", "0.02,0.04,0.06,0.08,0.1,0.12", "threshold scan angles in rad"),
    ("thr.b_min_gauss", "150", "threshold bisection lower bound in gauss"),
    ("thr.b_max_gauss", "500", "threshold bisection upper bound in gauss"),
    ("spectrum.nu_min_hz", "-2000", "spectrum grid start in Hz"),
    ("spectrum.nu_max_hz", "2000", "spectrum grid end in Hz"),
    ("spectrum.n", "201", "spectrum grid points"),
    ("phase.mode", "time", "phase output: time or asymptotic"),
    ("phase.vx_mps", "2", "transverse velocity for the time series in m/s"),
    ("phase.t_end_ms", "3.2", "phase time series end in ms"),
    ("phase.dt_ms", "0.01", "phase time series step in ms"),
    ("phase.vx_min_mps", "0.05", "asymptotic profile: smallest v_x in m/s"),
    ("phase.vx_max_mps", "3", "asymptotic profile: largest v_x in m/s"),
    ("phase.n", "60", "asymptotic profile points"),
    ("vg.theta_rad", "0.1", "group-velocity series: ray angle in rad"),
    ("vg.t_end_ms", "1.3", "group-velocity series end in ms"),
    ("vg.dt_ms", "0.001", "group-velocity series step in ms"),
    ("grid.n", "8192", "solver grid points (power of two)"),
    ("grid.length", "512", "solver domain length (scaled units)"),
    ("packet.x0", "0", "initial packet center (scaled units)"),
    ("packet.sigma", "20", "initial packet width (scaled units)"),
    ("packet.k0", "10", "initial packet wave number (scaled units)"),
    ("scaled.A", "140", "scaled signal amplitude"),
    ("scaled.eps", "7.4", "scaled shape roll-off"),
    ("scaled.tau", "0.37", "scaled shape decay"),
    ("scaled.tau1", "1.2", "scaled shape support end"),
    ("scaled.phase", "0", "spatial phase offset of the solver potential"),
    ("run.dt", "5e-4", "solver time step (scaled units)"),
    ("run.t_end", "1.3", "solver end time (scaled units)"),
    ("run.record_every", "10", "record observables every N steps"),
];

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Diagnostic severity from cross-field validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Fatal,
}

#[derive(Debug, Clone)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

/// Resolved configuration (defaults, then file, then `--set` overrides).
#[derive(Debug, Clone)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut values = BTreeMap::new();
        for (k, v, _) in KEYS {
            values.insert((*k).to_string(), (*v).to_string());
        }
        Self { values }
    }
}

impl RunConfig {
    /// Apply a config file. Every error carries its line number.
    pub fn apply_file(&mut self, text: &str, path: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError(format!("{path}:{line_no}: expected `section.key = value`"))
            })?;
            let key = key.trim();
            let value = value.trim();
            if value.is_empty() {
                return Err(ConfigError(format!("{path}:{line_no}: empty value for `{key}`")));
            }
            self.set(key, value)
                .map_err(|e| ConfigError(format!("{path}:{line_no}: {}", e.0)))?;
        }
        Ok(())
    }

    /// Set one key; rejects names absent from the registry.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if !KEYS.iter().any(|(k, _, _)| *k == key) {
            return Err(ConfigError(format!("unknown key `{key}`")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn str(&self, key: &str) -> &str {
        self.values
            .get(key)
            .unwrap_or_else(|| panic!("key `{key}` missing from registry"))
    }

    pub fn f64(&self, key: &str) -> Result<f64, ConfigError> {
        self.str(key)
            .parse::<f64>()
            .map_err(|_| ConfigError(format!("`{key}` is not a number: `{}`", self.str(key))))
    }

    pub fn usize(&self, key: &str) -> Result<usize, ConfigError> {
        self.str(key)
            .parse::<usize>()
            .map_err(|_| ConfigError(format!("`{key}` is not a count: `{}`", self.str(key))))
    }

    pub fn i32(&self, key: &str) -> Result<i32, ConfigError> {
        self.str(key)
            .parse::<i32>()
            .map_err(|_| ConfigError(format!("`{key}` is not an integer: `{}`", self.str(key))))
    }

    /// Comma-separated float list.
    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        self.str(key)
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| ConfigError(format!("`{key}`: bad number `{s}`")))
            })
            .collect()
    }

    /// Pulse train grammar: `w@d_ms` terms, comma-separated.
    pub fn train(&self) -> Result<PulseTrain, ConfigError> {
        let mut terms = Vec::new();
        for item in self.str("pulse.train").split(',') {
            let item = item.trim();
            let (w, d) = item
                .split_once('@')
                .ok_or_else(|| ConfigError(format!("pulse.train: expected `w@d_ms`, got `{item}`")))?;
            let w: f64 = w
                .trim()
                .parse()
                .map_err(|_| ConfigError(format!("pulse.train: bad weight `{w}`")))?;
            let d: f64 = d
                .trim()
                .parse()
                .map_err(|_| ConfigError(format!("pulse.train: bad delay `{d}`")))?;
            terms.push((w, d * 1e-3));
        }
        PulseTrain::new(terms).map_err(|e| ConfigError(format!("pulse.train: {e}")))
    }

    /// Iterate resolved key/value pairs in sorted order (for the sidecar).
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    // ---- assembled domain objects ----

    pub fn species(&self) -> Result<AtomSpecies, ConfigError> {
        // the config atom is parametric (no declared J); the Ar* defaults
        // reproduce the reference bundle
        Ok(AtomSpecies::custom(
            "atom",
            self.f64("atom.mass_u")? * PhysicalConstants::codata().atomic_mass_unit,
            self.f64("atom.lande_g")?,
        ))
    }

    pub fn signal(&self) -> Result<PulseSignal, ConfigError> {
        let consts = PhysicalConstants::codata();
        let state = ZeemanState::new(self.species()?, self.i32("atom.M")?)
            .map_err(|e| ConfigError(format!("atom.M: {e}")))?;
        let shape = PulseShape::new(
            self.f64("pulse.epsilon_ms")? * 1e-3,
            self.f64("pulse.tau_ms")? * 1e-3,
            self.f64("pulse.tau1_ms")? * 1e-3,
        )
        .map_err(|e| ConfigError(format!("pulse shape: {e}")))?;
        Ok(PulseSignal::zeeman(
            &consts,
            &state,
            self.f64("field.B_gauss")? * 1e-4,
            shape,
            self.train()?,
        ))
    }

    pub fn device(&self) -> Result<ComovingParams, ConfigError> {
        let consts = PhysicalConstants::codata();
        ComovingParams::new(
            self.f64("device.lambda_mm")? * 1e-3,
            self.signal()?,
            self.species()?.mass,
            consts.hbar,
        )
        .map_err(|e| ConfigError(format!("device: {e}")))
    }

    pub fn scene(&self) -> Result<Scene, ConfigError> {
        let dim = match self.str("scene.dim") {
            "1" => Dimensionality::OneD,
            "2" => Dimensionality::TwoD,
            other => return Err(ConfigError(format!("scene.dim must be 1 or 2, got `{other}`"))),
        };
        let sync = match self.str("scene.sync") {
            "per_ray" => SyncMode::PerRay,
            "global" => SyncMode::Global,
            other => {
                return Err(ConfigError(format!(
                    "scene.sync must be per_ray or global, got `{other}`"
                )))
            }
        };
        Ok(Scene {
            source_distance: self.f64("source.distance_cm")? * 1e-2,
            device: self.device()?,
            dimensionality: dim,
            sync_mode: sync,
            region_length: self.f64("scene.length_mm")? * 1e-3,
        })
    }

    /// Cross-field checks; warnings and fatals are both returned.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let warn = |out: &mut Vec<Diagnostic>, m: String| {
            out.push(Diagnostic {
                severity: Severity::Warning,
                message: m,
            })
        };
        let fatal = |out: &mut Vec<Diagnostic>, m: String| {
            out.push(Diagnostic {
                severity: Severity::Fatal,
                message: m,
            })
        };

        match (self.scene(), self.f64("beam.v0_mps"), self.f64("trace.theta_rad")) {
            (Ok(scene), Ok(v0), Ok(theta)) => {
                if v0 <= 0.0 {
                    fatal(&mut out, "beam.v0_mps must be positive".into());
                } else {
                    let vz = v0 * theta.cos();
                    let (_, support_end) = scene.device.signal.support();
                    if scene.region_length < vz * support_end {
                        warn(
                            &mut out,
                            format!(
                                "pulse outlasts region: v_z*support = {:.3} mm > scene.length = {:.3} mm",
                                vz * support_end * 1e3,
                                scene.region_length * 1e3
                            ),
                        );
                    }
                }
            }
            (Err(e), _, _) => fatal(&mut out, e.0),
            (_, Err(e), _) | (_, _, Err(e)) => fatal(&mut out, e.0),
        }

        match self.f64("trace.dt_us") {
            Ok(dt) if dt > 0.0 && dt * 1e-6 <= metawave_core::raytrace::MAX_TRACE_DT => {}
            Ok(dt) => fatal(&mut out, format!("trace.dt_us = {dt} outside (0, 10]")),
            Err(e) => fatal(&mut out, e.0),
        }

        match self.usize("grid.n") {
            Ok(n) if n.is_power_of_two() && n >= 256 => {
                if let (Ok(len), Ok(sigma)) = (self.f64("grid.length"), self.f64("packet.sigma")) {
                    let dx = len / n as f64;
                    if sigma < 4.0 * dx {
                        fatal(
                            &mut out,
                            format!("packet.sigma = {sigma} under 4 grid spacings ({})", 4.0 * dx),
                        );
                    }
                }
            }
            Ok(n) => fatal(&mut out, format!("grid.n = {n} must be a power of two >= 256")),
            Err(e) => fatal(&mut out, e.0),
        }

        match (self.f64("run.dt"), self.f64("scaled.tau"), self.f64("scaled.A")) {
            (Ok(dt), Ok(tau), Ok(a)) => {
                if dt <= 0.0 || dt > tau / 100.0 {
                    fatal(
                        &mut out,
                        format!("run.dt = {dt} must be in (0, scaled.tau/100 = {}]", tau / 100.0),
                    );
                }
                if a.abs() * dt > 0.1 {
                    fatal(
                        &mut out,
                        format!("scaled.A * run.dt = {} exceeds 0.1 action units", a.abs() * dt),
                    );
                }
            }
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => fatal(&mut out, e.0),
        }

        out
    }
}
