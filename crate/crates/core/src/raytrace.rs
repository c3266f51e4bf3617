//! Ray bundles through the comoving-field region: trajectories, image
//! distance, lens scans, threshold fields, cones, and multi-pulse
//! refocusing.
//!
//! Geometry: the point source S sits on the axis at z = −z_S; the device
//! occupies z ≥ 0. Rays fly freely to the entrance plane, the pulse clock
//! starts at the crossing (per ray, or globally at the on-axis arrival), and
//! the transverse coordinates then follow the closed-form packet center per
//! axis while v_z stays constant. The closed forms are odd in the transverse
//! wave number, which is exactly the mirror behaviour of the two
//! counter-propagating field components.

use alloc::vec::Vec;

use crate::semiclassical::{ComovingParams, SemiclassicalError, Transverse};

/// Largest allowed trajectory sampling step (s).
pub const MAX_TRACE_DT: f64 = 10e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RayError {
    /// Ray parameters out of range (v₀ ≤ 0 or θ ∉ [0, π/2)).
    BadRay,
    /// Sampling step above the 10 µs cap (or not positive).
    DtTooLarge,
    /// Scene parameters invalid.
    BadScene,
    /// Quadrature failure in the underlying closed forms.
    Numerical,
    /// θ = 0 rays have no finite image.
    NoFiniteImage,
    /// Emergent support line misses the axis (zero field).
    NoCrossing,
    /// Trajectory does not extend past the signal support.
    IncompleteTrajectory,
    /// Emergent velocity failed to restore the incidence value.
    NonParallelEmergence,
    /// Threshold search range does not bracket a sign change.
    NoBracket,
    /// Fewer than two distinct rays; spread is identically zero.
    DegenerateFocus,
    /// Spread has no interior minimum in the scanned region.
    NoMinimum,
}

impl core::fmt::Display for RayError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let msg = match self {
            RayError::BadRay => "invalid ray parameters",
            RayError::DtTooLarge => "trajectory sampling step too large",
            RayError::BadScene => "invalid scene parameters",
            RayError::Numerical => "quadrature failure",
            RayError::NoFiniteImage => "on-axis ray has no finite image",
            RayError::NoCrossing => "emergent ray support does not cross the axis",
            RayError::IncompleteTrajectory => "trajectory ends before the signal support",
            RayError::NonParallelEmergence => "emergent velocity did not restore incidence",
            RayError::NoBracket => "field range does not bracket the reversal threshold",
            RayError::DegenerateFocus => "need at least two distinct rays",
            RayError::NoMinimum => "no interior spread minimum in the region",
        };
        write!(f, "{msg}")
    }
}

impl core::error::Error for RayError {}

impl From<SemiclassicalError> for RayError {
    fn from(_: SemiclassicalError) -> Self {
        RayError::Numerical
    }
}

/// When the pulse clock starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyncMode {
    /// Each ray triggers the pulse as it crosses the entrance plane.
    PerRay,
    /// One trigger at the on-axis arrival time z_S/v₀.
    Global,
}

/// Whether the device modulates x only or x and y separably.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimensionality {
    OneD,
    TwoD,
}

/// Source + device geometry.
#[derive(Debug, Clone)]
pub struct Scene {
    /// Source distance z_S in front of the entrance plane (m).
    pub source_distance: f64,
    pub device: ComovingParams,
    pub dimensionality: Dimensionality,
    pub sync_mode: SyncMode,
    /// Length of the field region along z (m).
    pub region_length: f64,
}

/// Incidence geometry of one ray.
#[derive(Debug, Clone, Copy)]
pub struct Ray {
    /// Angle from the z axis (rad), in [0, π/2).
    pub theta: f64,
    /// Azimuth around the z axis (rad).
    pub azimuth: f64,
    /// Speed (m/s).
    pub v0: f64,
}

impl Ray {
    pub fn in_plane(theta: f64, v0: f64) -> Self {
        Self {
            theta,
            azimuth: 0.0,
            v0,
        }
    }

    fn validate(&self) -> Result<(), RayError> {
        if self.v0 > 0.0 && (0.0..core::f64::consts::FRAC_PI_2).contains(&self.theta) {
            Ok(())
        } else {
            Err(RayError::BadRay)
        }
    }
}

/// One time sample of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
}

/// Time-sampled ray path from the source through the region.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    /// Pulse trigger instant on the trajectory clock (t = 0 at the source).
    pub pulse_trigger_time: f64,
    /// Whether the region is long enough for the ray to outlast the signal.
    pub emergence_complete: bool,
}

/// Lens-scan entry: image distance for one (v₀, θ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LensEntry {
    pub v0: f64,
    pub theta: f64,
    /// Source-to-image distance SS′ (m).
    pub delta_z: f64,
    /// Entrance-plane-to-image distance (m).
    pub delta_z_plane: f64,
}

/// ΔZ entries over the Cartesian product of speeds and angles.
#[derive(Debug, Clone)]
pub struct LensScan {
    pub entries: Vec<LensEntry>,
}

/// Best-focus plane and residual transverse spread of a ray bundle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefocusReport {
    /// Plane of minimum RMS spread, measured from the entrance plane (m).
    pub z_focus: f64,
    /// RMS transverse spread about the bundle mean at that plane (m).
    pub rms_spread: f64,
}

// 7-point Gauss-Legendre nodes/weights on [-1, 1].
const GL_NODES: [f64; 7] = [
    -0.9491079123427585,
    -0.7415311855993945,
    -0.4058451513773972,
    0.0,
    0.4058451513773972,
    0.7415311855993945,
    0.9491079123427585,
];
const GL_WEIGHTS: [f64; 7] = [
    0.1294849661688697,
    0.2797053914892766,
    0.3818300505051189,
    0.4179591836734694,
    0.3818300505051189,
    0.2797053914892766,
    0.1294849661688697,
];

/// Cumulative spatial shift δξ(u) on an ascending grid of pulse-clock times,
/// by composite Gauss-Legendre panels split at the signal support edges.
fn cumulative_shift(params: &ComovingParams, k0: Transverse, u_grid: &[f64]) -> Vec<f64> {
    let nu0 = params.resonance_frequency(k0);
    let pref = core::f64::consts::TAU / (params.mass * params.lambda_period);
    let w = core::f64::consts::TAU * nu0;
    let mut out = Vec::with_capacity(u_grid.len());
    if nu0 == 0.0 {
        out.resize(u_grid.len(), 0.0);
        return out;
    }
    let (lo, hi) = params.signal.support();
    let bps = params.signal.breakpoints();
    let mut max_len = params.signal.shape.tau / 50.0;
    max_len = max_len.min(1.0 / (20.0 * libm::fabs(nu0)));

    let kernel = |u: f64| u * params.signal.eval_s(u) * libm::sin(w * u);
    let panel = |a: f64, b: f64| -> f64 {
        if b <= a {
            return 0.0;
        }
        let n = libm::ceil((b - a) / max_len) as usize;
        let n = n.max(1);
        let h = (b - a) / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let pa = a + i as f64 * h;
            let c = pa + 0.5 * h;
            let r = 0.5 * h;
            let mut sub = 0.0;
            for (x, wt) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
                sub += wt * kernel(c + r * x);
            }
            acc += sub * r;
        }
        acc
    };

    let mut acc = 0.0;
    let mut prev = 0.0_f64;
    for &u in u_grid {
        let a = prev.max(lo).min(hi);
        let b = u.max(lo).min(hi);
        if b > a {
            // split at support edges inside (a, b)
            let mut last = a;
            for &p in &bps {
                if p > a && p < b {
                    acc += panel(last, p);
                    last = p;
                }
            }
            acc += panel(last, b);
        }
        prev = prev.max(u);
        out.push(-pref * acc);
    }
    out
}

/// Trace one ray through the scene with sampling step `dt`.
pub fn trace(scene: &Scene, ray: &Ray, dt: f64) -> Result<Trajectory, RayError> {
    ray.validate()?;
    if !(dt > 0.0) || dt > MAX_TRACE_DT {
        return Err(RayError::DtTooLarge);
    }
    if !(scene.source_distance > 0.0) || !(scene.region_length > 0.0) {
        return Err(RayError::BadScene);
    }
    let params = &scene.device;
    let z_s = scene.source_distance;
    let vz = ray.v0 * libm::cos(ray.theta);
    let vt = ray.v0 * libm::sin(ray.theta);
    let vx0 = vt * libm::cos(ray.azimuth);
    let vy0 = vt * libm::sin(ray.azimuth);
    let kx = params.transverse_from_velocity(vx0);
    let ky = params.transverse_from_velocity(vy0);

    let t_entry = z_s / vz;
    let trigger = match scene.sync_mode {
        SyncMode::PerRay => t_entry,
        SyncMode::Global => z_s / ray.v0,
    };
    let t_end = (z_s + scene.region_length) / vz;
    let (_, support_hi) = params.signal.support();
    let emergence_complete = t_end >= trigger + support_hi;

    let n_steps = libm::ceil(t_end / dt) as usize;
    let mut times: Vec<f64> = (0..=n_steps).map(|i| (i as f64 * dt).min(t_end)).collect();
    times.dedup();

    // pulse-clock times; clamp the free-flight part to u = 0
    let u_grid: Vec<f64> = times.iter().map(|&t| (t - trigger).max(0.0)).collect();
    let u_entry = (t_entry - trigger).max(0.0);

    let shift_x = cumulative_shift(params, kx, &u_grid);
    let shift_x0 = cumulative_shift(params, kx, &[u_entry])[0];
    let two_d = scene.dimensionality == Dimensionality::TwoD;
    let (shift_y, shift_y0) = if two_d {
        (
            cumulative_shift(params, ky, &u_grid),
            cumulative_shift(params, ky, &[u_entry])[0],
        )
    } else {
        (Vec::new(), 0.0)
    };

    let mut samples = Vec::with_capacity(times.len());
    for (i, &t) in times.iter().enumerate() {
        let inside = t >= t_entry;
        let u = u_grid[i];
        let (x, vx) = if inside {
            (
                vx0 * t + shift_x[i] - shift_x0,
                params.group_velocity(u, kx),
            )
        } else {
            (vx0 * t, vx0)
        };
        let (y, vy) = if inside && two_d {
            (
                vy0 * t + shift_y[i] - shift_y0,
                params.group_velocity(u, ky),
            )
        } else {
            (vy0 * t, vy0)
        };
        samples.push(TrajectorySample {
            t,
            x,
            y,
            z: -z_s + vz * t,
            vx,
            vy,
            vz,
        });
    }
    Ok(Trajectory {
        samples,
        pulse_trigger_time: trigger,
        emergence_complete,
    })
}

/// Image distance SS′ from the emergent support line of a traced ray.
///
/// Returns the source-to-image distance along z; the emergent line is taken
/// from the final sample, after checking that the incidence velocity was
/// restored.
pub fn image_distance(trajectory: &Trajectory, scene: &Scene) -> Result<f64, RayError> {
    if !trajectory.emergence_complete {
        return Err(RayError::IncompleteTrajectory);
    }
    let first = trajectory.samples.first().ok_or(RayError::BadRay)?;
    let last = trajectory.samples.last().ok_or(RayError::BadRay)?;
    if first.vx == 0.0 {
        return Err(RayError::NoFiniteImage);
    }
    if libm::fabs(last.vx - first.vx) > 1e-9 * libm::fabs(first.vx) {
        return Err(RayError::NonParallelEmergence);
    }
    let z_cross = last.z - last.x * last.vz / last.vx;
    let delta_z = z_cross + scene.source_distance;
    if libm::fabs(delta_z) <= 1e-9 {
        return Err(RayError::NoCrossing);
    }
    Ok(delta_z)
}

/// Analytic image distance `ΔZ = −δξ∞ / tan θ` for an in-plane ray.
pub fn image_distance_analytic(scene: &Scene, theta: f64, v0: f64) -> Result<f64, RayError> {
    if theta == 0.0 {
        return Err(RayError::NoFiniteImage);
    }
    let vx = v0 * libm::sin(theta);
    let k = scene.device.transverse_from_velocity(vx);
    let dxi = scene.device.spatial_shift_asymptotic(k)?;
    if dxi == 0.0 {
        return Err(RayError::NoCrossing);
    }
    Ok(-dxi / libm::tan(theta))
}

/// ΔZ over the Cartesian product of `v0_list` (outer) and `theta_list`
/// (inner); deterministic ordering.
pub fn lens_scan(scene: &Scene, theta_list: &[f64], v0_list: &[f64]) -> Result<LensScan, RayError> {
    if theta_list.is_empty() || v0_list.is_empty() {
        return Err(RayError::BadRay);
    }
    let mut entries = Vec::with_capacity(theta_list.len() * v0_list.len());
    for &v0 in v0_list {
        for &theta in theta_list {
            let delta_z = image_distance_analytic(scene, theta, v0)?;
            entries.push(LensEntry {
                v0,
                theta,
                delta_z,
                delta_z_plane: delta_z - scene.source_distance,
            });
        }
    }
    Ok(LensScan { entries })
}

/// Field magnitude at which the minimum group velocity crosses zero, by
/// bisection over `b_range`; `b_reference` is the field the scene's signal
/// amplitude was built with. Tolerance 1 G.
pub fn threshold_field(
    scene: &Scene,
    b_reference: f64,
    ray: &Ray,
    b_range: (f64, f64),
) -> Result<f64, RayError> {
    ray.validate()?;
    if !(b_reference > 0.0) {
        return Err(RayError::BadScene);
    }
    let vx = ray.v0 * libm::sin(ray.theta);
    let k = scene.device.transverse_from_velocity(vx);
    let base_amp = scene.device.signal.amplitude;
    let min_vg = |b: f64| -> f64 {
        let mut params = scene.device.clone();
        params.signal.amplitude = base_amp * b / b_reference;
        params.group_velocity_minimum(k, 4096).1
    };
    let (mut lo, mut hi) = b_range;
    if !(lo > 0.0 && hi > lo) {
        return Err(RayError::NoBracket);
    }
    let f_lo = min_vg(lo);
    let f_hi = min_vg(hi);
    if f_lo < 0.0 || f_hi > 0.0 {
        return Err(RayError::NoBracket);
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if min_vg(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One trajectory per azimuth at fixed polar angle.
pub fn cone_trace(
    scene: &Scene,
    theta: f64,
    azimuth_list: &[f64],
    v0: f64,
    dt: f64,
) -> Result<Vec<Trajectory>, RayError> {
    let mut out = Vec::with_capacity(azimuth_list.len());
    for &az in azimuth_list {
        out.push(trace(
            scene,
            &Ray {
                theta,
                azimuth: az,
                v0,
            },
            dt,
        )?);
    }
    Ok(out)
}

fn x_at_plane(traj: &Trajectory, z: f64) -> f64 {
    let samples = &traj.samples;
    // binary search on strictly increasing z
    let mut lo = 0usize;
    let mut hi = samples.len() - 1;
    if z <= samples[0].z {
        return samples[0].x;
    }
    if z >= samples[hi].z {
        let s = &samples[hi];
        return s.x + (z - s.z) * s.vx / s.vz;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if samples[mid].z <= z {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (a, b) = (&samples[lo], &samples[hi]);
    let f = (z - a.z) / (b.z - a.z);
    a.x + f * (b.x - a.x)
}

fn rms_about_mean(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    libm::sqrt(var)
}

/// Scan planes across the region for the minimum RMS transverse spread of
/// the bundle. Trajectory positions are used directly, so the scan covers
/// both the in-field segments and the emergent support lines (which coincide
/// with the trajectories once the pulse is over).
pub fn refocus_metrics(
    scene: &Scene,
    theta_list: &[f64],
    v0: f64,
    dt: f64,
) -> Result<RefocusReport, RayError> {
    if theta_list.len() < 2 {
        return Err(RayError::DegenerateFocus);
    }
    let mut trajectories = Vec::with_capacity(theta_list.len());
    for &theta in theta_list {
        trajectories.push(trace(scene, &Ray::in_plane(theta, v0), dt)?);
    }
    let spread = |z: f64| -> f64 {
        let xs: Vec<f64> = trajectories.iter().map(|t| x_at_plane(t, z)).collect();
        rms_about_mean(&xs)
    };

    let n_planes = 1600usize;
    let z_max = scene.region_length;
    let mut best_i = 0usize;
    let mut best = f64::INFINITY;
    for i in 0..=n_planes {
        let z = z_max * i as f64 / n_planes as f64;
        let r = spread(z);
        if r < best {
            best = r;
            best_i = i;
        }
    }
    if best_i == 0 || best_i == n_planes {
        return Err(RayError::NoMinimum);
    }
    if best == 0.0 && spread(z_max * 0.25) == 0.0 && spread(z_max * 0.75) == 0.0 {
        return Err(RayError::DegenerateFocus);
    }
    // golden-section refinement
    let step = z_max / n_planes as f64;
    let (mut a, mut b) = (
        z_max * best_i as f64 / n_planes as f64 - step,
        z_max * best_i as f64 / n_planes as f64 + step,
    );
    let inv_phi = 0.5 * (libm::sqrt(5.0) - 1.0);
    for _ in 0..60 {
        let c = b - inv_phi * (b - a);
        let d = a + inv_phi * (b - a);
        if spread(c) < spread(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let z_focus = 0.5 * (a + b);
    Ok(RefocusReport {
        z_focus,
        rms_spread: spread(z_focus),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{AtomSpecies, PhysicalConstants, ZeemanState};
    use crate::pulse::{PulseShape, PulseSignal, PulseTrain};

    fn reference_scene(m_quantum: i32, region_length: f64, train: PulseTrain) -> Scene {
        let c = PhysicalConstants::codata();
        let state = ZeemanState::new(AtomSpecies::argon_metastable(), m_quantum).unwrap();
        let signal = PulseSignal::zeeman(&c, &state, 0.04, PulseShape::reference(), train);
        let device =
            ComovingParams::new(5e-3, signal, AtomSpecies::argon_metastable().mass, c.hbar)
                .unwrap();
        Scene {
            source_distance: 0.02,
            device,
            dimensionality: Dimensionality::OneD,
            sync_mode: SyncMode::PerRay,
            region_length,
        }
    }

    #[test]
    fn on_axis_ray_stays_on_axis() {
        let scene = reference_scene(2, 0.04, PulseTrain::single());
        let tr = trace(&scene, &Ray::in_plane(0.0, 20.0), 1e-6).unwrap();
        for s in &tr.samples {
            assert_eq!(s.x, 0.0);
            assert_eq!(s.y, 0.0);
        }
        assert!(tr.emergence_complete);
    }

    #[test]
    fn parallel_emergence_and_negative_displacement() {
        let scene = reference_scene(2, 0.04, PulseTrain::single());
        let tr = trace(&scene, &Ray::in_plane(0.1, 20.0), 1e-6).unwrap();
        let first = tr.samples.first().unwrap();
        let last = tr.samples.last().unwrap();
        assert!((last.vx - first.vx).abs() <= 1e-12 * first.vx.abs());
        // net displacement toward the axis for M = +2
        let free_x = first.vx * last.t;
        assert!(last.x < free_x);
        // z advances linearly
        for w in tr.samples.windows(2) {
            assert!(w[1].z > w[0].z);
            assert_eq!(w[0].vz, w[1].vz);
        }
    }

    #[test]
    fn ordinary_refraction_for_negative_m() {
        let scene = reference_scene(-2, 0.04, PulseTrain::single());
        let tr = trace(&scene, &Ray::in_plane(0.1, 20.0), 1e-6).unwrap();
        let first = tr.samples.first().unwrap();
        let last = tr.samples.last().unwrap();
        let free_x = first.vx * last.t;
        assert!(last.x > free_x, "M = -2 must displace away from the axis");
    }

    #[test]
    fn mirror_symmetry() {
        let scene = reference_scene(2, 0.04, PulseTrain::single());
        let up = trace(&scene, &Ray { theta: 0.08, azimuth: 0.0, v0: 20.0 }, 1e-6).unwrap();
        let down = trace(
            &scene,
            &Ray {
                theta: 0.08,
                azimuth: core::f64::consts::PI,
                v0: 20.0,
            },
            1e-6,
        )
        .unwrap();
        for (a, b) in up.samples.iter().zip(down.samples.iter()) {
            assert!((a.x + b.x).abs() <= 1e-12 * a.x.abs().max(1e-18));
            assert_eq!(a.z, b.z);
        }
    }

    #[test]
    fn two_d_reduces_to_one_d_in_plane() {
        let mut scene = reference_scene(2, 0.04, PulseTrain::single());
        let one = trace(&scene, &Ray::in_plane(0.06, 20.0), 1e-6).unwrap();
        scene.dimensionality = Dimensionality::TwoD;
        let two = trace(&scene, &Ray::in_plane(0.06, 20.0), 1e-6).unwrap();
        for (a, b) in one.samples.iter().zip(two.samples.iter()) {
            assert!((a.x - b.x).abs() <= 1e-12 * a.x.abs().max(1e-18));
            assert_eq!(b.y, 0.0);
        }
    }

    #[test]
    fn cone_separability() {
        let mut scene = reference_scene(2, 0.04, PulseTrain::single());
        scene.dimensionality = Dimensionality::TwoD;
        let trajs = cone_trace(
            &scene,
            0.1,
            &[0.0, core::f64::consts::FRAC_PI_2],
            20.0,
            1e-6,
        )
        .unwrap();
        // azimuth pi/2: x motion absent, y modulated like x at azimuth 0
        let a = &trajs[0];
        let b = &trajs[1];
        for (sa, sb) in a.samples.iter().zip(b.samples.iter()) {
            assert!(sb.x.abs() <= 1e-15);
            assert!((sa.x - sb.y).abs() <= 1e-10 * sa.x.abs().max(1e-15));
        }
        // displacement opposes the transverse velocity in both coordinates
        let last = b.samples.last().unwrap();
        let free_y = b.samples[0].vy * last.t;
        assert!(last.y < free_y);
    }

    #[test]
    fn image_distance_against_analytic() {
        let scene = reference_scene(2, 0.04, PulseTrain::single());
        for &theta in &[0.005, 0.04, 0.1] {
            let tr = trace(&scene, &Ray::in_plane(theta, 20.0), 1e-6).unwrap();
            let fitted = image_distance(&tr, &scene).unwrap();
            let analytic = image_distance_analytic(&scene, theta, 20.0).unwrap();
            assert!(
                (fitted - analytic).abs() <= 1e-9 * analytic.abs(),
                "theta {theta}: {fitted} vs {analytic}"
            );
        }
        // scipy oracle at theta = 0.005
        let dz = image_distance_analytic(&scene, 0.005, 20.0).unwrap();
        assert!((dz - 0.0281118).abs() / 0.0281118 < 1e-4);
    }

    #[test]
    fn stigmatic_limit() {
        // dZ approaches a constant as theta -> 0 (sin-kernel linearization)
        let scene = reference_scene(2, 0.04, PulseTrain::single());
        let d1 = image_distance_analytic(&scene, 1e-3, 20.0).unwrap();
        let d2 = image_distance_analytic(&scene, 5e-4, 20.0).unwrap();
        assert!((d1 / d2 - 1.0).abs() < 1e-3, "dZ(1e-3)/dZ(5e-4) = {}", d1 / d2);
    }

    #[test]
    fn image_errors() {
        let scene = reference_scene(2, 0.04, PulseTrain::single());
        assert_eq!(
            image_distance_analytic(&scene, 0.0, 20.0),
            Err(RayError::NoFiniteImage)
        );
        let mut zero = scene.clone();
        zero.device.signal.amplitude = 0.0;
        assert_eq!(
            image_distance_analytic(&zero, 0.05, 20.0),
            Err(RayError::NoCrossing)
        );
        // short region: incomplete trajectory
        let short = reference_scene(2, 0.005, PulseTrain::single());
        let tr = trace(&short, &Ray::in_plane(0.05, 20.0), 1e-6).unwrap();
        assert!(!tr.emergence_complete);
        assert_eq!(image_distance(&tr, &short), Err(RayError::IncompleteTrajectory));
    }

    #[test]
    fn scan_ordering_and_monotone_field_scaling() {
        let scene = reference_scene(2, 0.04, PulseTrain::single());
        let scan = lens_scan(&scene, &[0.01, 0.02], &[18.0, 22.0]).unwrap();
        let got: Vec<(f64, f64)> = scan.entries.iter().map(|e| (e.v0, e.theta)).collect();
        assert_eq!(got, alloc::vec![(18.0, 0.01), (18.0, 0.02), (22.0, 0.01), (22.0, 0.02)]);
        // |dxi_inf| strictly increasing in B over the reference field range
        let k = scene.device.transverse_from_velocity(20.0 * libm::sin(0.1));
        let mut prev = 0.0;
        for i in 1..=5 {
            let mut params = scene.device.clone();
            params.signal.amplitude *= i as f64 / 5.0;
            let d = params.spatial_shift_asymptotic(k).unwrap().abs();
            assert!(d > prev);
            prev = d;
        }
    }

    #[test]
    fn threshold_bracket() {
        let scene = reference_scene(2, 0.04, PulseTrain::single());
        let b = threshold_field(&scene, 0.04, &Ray::in_plane(0.06, 20.0), (0.015, 0.05)).unwrap();
        // scipy oracle: 285.2 G at theta = 0.06
        assert!((b - 0.02852).abs() < 2e-4, "threshold {b} T");
        // 400 G is above threshold, 100 G below
        let k = scene.device.transverse_from_velocity(20.0 * libm::sin(0.06));
        assert!(scene.device.group_velocity_minimum(k, 4096).1 < 0.0);
        let mut weak = scene.device.clone();
        weak.signal.amplitude *= 100.0 / 400.0;
        assert!(weak.group_velocity_minimum(k, 4096).1 > 0.0);
        // a range that does not straddle the threshold cannot bisect
        assert_eq!(
            threshold_field(&scene, 0.04, &Ray::in_plane(0.06, 20.0), (0.05, 0.06)),
            Err(RayError::NoBracket)
        );
    }

    #[test]
    fn global_sync_close_to_per_ray() {
        let mut scene = reference_scene(2, 0.04, PulseTrain::single());
        let per_ray = image_distance_analytic(&scene, 0.12, 20.0).unwrap();
        scene.sync_mode = SyncMode::Global;
        let tr = trace(&scene, &Ray::in_plane(0.12, 20.0), 1e-6).unwrap();
        let global = image_distance(&tr, &scene).unwrap();
        // difference is O(theta^2), sub-percent at the fan edge
        assert!((global - per_ray).abs() / per_ray.abs() < 0.02);
    }

    #[test]
    fn refocus_reference_train() {
        let train = PulseTrain::new(alloc::vec![(1.0, 0.0), (1.5, 1e-3), (1.0, 2e-3)]).unwrap();
        let scene = reference_scene(2, 0.08, train);
        let thetas: Vec<f64> = (0..=8).map(|i| i as f64 * 2e-3).collect();
        let rep = refocus_metrics(&scene, &thetas, 20.0, 1e-6).unwrap();
        // scipy oracle: z* = 20.44 mm, rms = 1.47 um
        assert!((rep.z_focus - 0.02044).abs() < 2e-4, "z* = {}", rep.z_focus);
        assert!(rep.rms_spread < 25e-6);
        assert!((rep.rms_spread - 1.47e-6).abs() < 0.4e-6);
    }

    #[test]
    fn refocus_degenerate_cases() {
        let train = PulseTrain::new(alloc::vec![(1.0, 0.0), (1.5, 1e-3), (1.0, 2e-3)]).unwrap();
        let scene = reference_scene(2, 0.08, train.clone());
        assert_eq!(
            refocus_metrics(&scene, &[0.008], 20.0, 1e-6),
            Err(RayError::DegenerateFocus)
        );
        // zero weights: rays never converge
        let mut zero = reference_scene(2, 0.08, train);
        zero.device.signal.amplitude = 0.0;
        let thetas: Vec<f64> = (0..=8).map(|i| i as f64 * 2e-3).collect();
        assert_eq!(
            refocus_metrics(&zero, &thetas, 20.0, 1e-6),
            Err(RayError::NoMinimum)
        );
    }

    #[test]
    fn dt_cap_enforced() {
        let scene = reference_scene(2, 0.04, PulseTrain::single());
        let err = trace(&scene, &Ray::in_plane(0.1, 20.0), 20e-6).unwrap_err();
        assert_eq!(err, RayError::DtTooLarge);
    }
}
