//! Cross-module checks of the reference device through the public API, each
//! against an independent test-side oracle (fixed-grid Simpson sums and
//! small-angle closed forms, no shared code with the adaptive quadrature).

use metawave_core::constants::{AtomSpecies, PhysicalConstants, ZeemanState};
use metawave_core::pulse::{PulseShape, PulseSignal, PulseTrain};
use metawave_core::raytrace::{
    image_distance, image_distance_analytic, refocus_metrics, trace, Dimensionality, Ray, Scene,
    SyncMode,
};
use metawave_core::semiclassical::ComovingParams;

fn device(train: PulseTrain) -> ComovingParams {
    let c = PhysicalConstants::codata();
    let state = ZeemanState::new(AtomSpecies::argon_metastable(), 2).unwrap();
    let signal = PulseSignal::zeeman(&c, &state, 0.04, PulseShape::reference(), train);
    ComovingParams::new(5e-3, signal, AtomSpecies::argon_metastable().mass, c.hbar).unwrap()
}

fn scene(region: f64, train: PulseTrain) -> Scene {
    Scene {
        source_distance: 0.02,
        device: device(train),
        dimensionality: Dimensionality::OneD,
        sync_mode: SyncMode::PerRay,
        region_length: region,
    }
}

/// Fixed-grid composite Simpson over [0, tau1]; independent of the adaptive
/// integrator.
fn simpson_oracle(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn asymptotic_phase_against_simpson_oracle() {
    let dev = device(PulseTrain::single());
    let k = dev.transverse_from_velocity(2.0);
    let nu0 = dev.resonance_frequency(k);
    let phi = dev.phase_shift_asymptotic(k).unwrap();
    let oracle = -simpson_oracle(
        |t| dev.signal.eval_s(t) * (core::f64::consts::TAU * nu0 * t).cos(),
        0.0,
        1.2e-3,
        200_000,
    ) / dev.hbar;
    assert!(
        (phi - oracle).abs() <= 1e-9 * oracle.abs(),
        "phi {phi} vs Simpson oracle {oracle}"
    );
}

#[test]
fn image_distance_three_routes() {
    let sc = scene(0.04, PulseTrain::single());
    let theta: f64 = 0.01;
    // route 1: trajectory fit
    let tr = trace(&sc, &Ray::in_plane(theta, 20.0), 1e-6).unwrap();
    let fitted = image_distance(&tr, &sc).unwrap();
    // route 2: asymptotic-shift closed form
    let analytic = image_distance_analytic(&sc, theta, 20.0).unwrap();
    // route 3: small-angle oracle (sin x ~ x under the shift integral)
    let dev = &sc.device;
    let q = simpson_oracle(|t| t * t * dev.signal.eval_s(t), 0.0, 1.2e-3, 200_000);
    let small_angle = 4.0 * core::f64::consts::PI * core::f64::consts::PI * 20.0
        / (dev.mass * dev.lambda_period * dev.lambda_period)
        * q;
    assert!((fitted - analytic).abs() <= 1e-9 * analytic.abs());
    // theta = 0.01 carries a ~0.6% kernel correction; 1.5% window
    assert!(
        (analytic - small_angle).abs() <= 0.015 * small_angle,
        "analytic {analytic} vs small-angle {small_angle}"
    );
}

#[test]
fn refocus_plane_against_crossing_oracle() {
    // at linear order in theta every ray crosses the axis where
    // z_S + v0 t = (4 pi^2 v0/(m L^2)) int_0^t u^2 s(u) du, independent of
    // theta; the best-focus plane must sit at that crossing
    let train = PulseTrain::new(vec![(1.0, 0.0), (1.5, 1e-3), (1.0, 2e-3)]).unwrap();
    let sc = scene(0.08, train.clone());
    let dev = &sc.device;
    let pref = 4.0 * core::f64::consts::PI * core::f64::consts::PI * 20.0
        / (dev.mass * dev.lambda_period * dev.lambda_period);
    let bracket = |t: f64| {
        let q = simpson_oracle(|u| u * u * dev.signal.eval_s(u), 0.0, t, 40_000);
        0.02 + 20.0 * t - pref * q
    };
    let (mut lo, mut hi) = (0.5e-3, 2.0e-3);
    assert!(bracket(lo) > 0.0 && bracket(hi) < 0.0);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if bracket(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let z_oracle = 20.0 * 0.5 * (lo + hi);

    let thetas: Vec<f64> = (0..=8).map(|i| i as f64 * 2e-3).collect();
    let report = refocus_metrics(&sc, &thetas, 20.0, 1e-6).unwrap();
    assert!(
        (report.z_focus - z_oracle).abs() < 1e-3,
        "z_focus {} vs crossing oracle {z_oracle}",
        report.z_focus
    );
    assert!(report.rms_spread < 25e-6);
}

#[test]
fn train_shift_is_superposition_of_delays() {
    // the asymptotic shift of a train equals the sum over delayed pulses of
    // shifted-kernel integrals, computed here with the Simpson oracle
    let train = PulseTrain::new(vec![(1.0, 0.0), (1.5, 1e-3)]).unwrap();
    let dev = device(train);
    let k = dev.transverse_from_velocity(1.0);
    let nu0 = dev.resonance_frequency(k);
    let got = dev.spatial_shift_asymptotic(k).unwrap();
    let single = device(PulseTrain::single());
    let kernel = |w: f64, d: f64| {
        simpson_oracle(
            |u| (u + d) * single.signal.eval_s(u) * (core::f64::consts::TAU * nu0 * (u + d)).sin(),
            0.0,
            1.2e-3,
            200_000,
        ) * w
    };
    let oracle = -(core::f64::consts::TAU / (dev.mass * dev.lambda_period))
        * (kernel(1.0, 0.0) + kernel(1.5, 1e-3));
    assert!(
        (got - oracle).abs() <= 1e-8 * oracle.abs(),
        "train shift {got} vs delay-superposition oracle {oracle}"
    );
}
