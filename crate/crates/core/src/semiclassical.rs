//! Closed-form wave-packet response to the comoving pulse: phase shift,
//! spatial shift, packet center, group velocity, and the static-index
//! analogy.
//!
//! Everything is parametrized by the resonance frequency `ν₀ = ħk/(mΛ)`,
//! the frequency of the spectral component whose crest velocity matches the
//! transverse atomic velocity. The running phase is
//! `φ(t,k) = −ħ⁻¹ ∫₀ᵗ s(t′) cos(2πν₀ t′) dt′` and its t→∞ limit is
//! `−ħ⁻¹ Re H(ν₀)`; the spatial shift is the k-gradient of the phase and the
//! group velocity its time derivative (no quadrature needed).

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::pulse::{PulseError, PulseSignal};
use crate::quad::integrate;

/// Relative tolerance of the running-phase quadrature (rad, vs. the phase
/// magnitude scale).
const PHASE_TOL_REL: f64 = 1e-9;
/// Absolute agreement required between the two asymptotic-shift routes (m).
const SHIFT_ROUTE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemiclassicalError {
    /// Quadrature failure.
    Numerical,
    /// The two routes to the asymptotic shift disagree beyond tolerance.
    InconsistentRoutes,
    /// Kinetic energy must be positive for the index analogy.
    NonPositiveEnergy,
    /// Invalid device parameters.
    BadParameters,
}

impl core::fmt::Display for SemiclassicalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SemiclassicalError::Numerical => write!(f, "quadrature did not converge"),
            SemiclassicalError::InconsistentRoutes => {
                write!(f, "asymptotic shift routes disagree beyond tolerance")
            }
            SemiclassicalError::NonPositiveEnergy => {
                write!(f, "kinetic energy must be positive")
            }
            SemiclassicalError::BadParameters => write!(f, "invalid comoving parameters"),
        }
    }
}

impl core::error::Error for SemiclassicalError {}

impl From<PulseError> for SemiclassicalError {
    fn from(_: PulseError) -> Self {
        SemiclassicalError::Numerical
    }
}

impl From<crate::quad::QuadError> for SemiclassicalError {
    fn from(_: crate::quad::QuadError) -> Self {
        SemiclassicalError::Numerical
    }
}

/// Transverse state of motion, stored as a wave number (1/m) and converted
/// from/to a velocity only through the explicit constructors below, so the
/// two unit conventions cannot be confused.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transverse(f64);

impl Transverse {
    pub fn from_wavenumber(k: f64) -> Self {
        Self(k)
    }

    /// `k = m v / ħ`.
    pub fn from_velocity(v: f64, mass: f64, hbar: f64) -> Self {
        Self(mass * v / hbar)
    }

    pub fn wavenumber(self) -> f64 {
        self.0
    }

    pub fn velocity(self, mass: f64, hbar: f64) -> f64 {
        self.0 * hbar / mass
    }
}

/// Device parameters: spatial period, pulse signal, and the atom it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct ComovingParams {
    /// Spatial period Λ (m).
    pub lambda_period: f64,
    pub signal: PulseSignal,
    /// Atomic mass (kg).
    pub mass: f64,
    /// Reduced Planck constant (J·s); 1 for scaled runs.
    pub hbar: f64,
}

/// Phase profile φ(k) on a wave-number grid, either at a fixed time or
/// asymptotic.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    pub k_grid: Vec<f64>,
    pub phi: Vec<f64>,
    /// `None` marks the asymptotic profile.
    pub time: Option<f64>,
}

/// Result of the static-index analogy `n = (1 − V/E₀)^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EffectiveIndex {
    Propagating(f64),
    /// Classically forbidden: carries |Im n|.
    Evanescent(f64),
}

impl ComovingParams {
    pub fn new(
        lambda_period: f64,
        signal: PulseSignal,
        mass: f64,
        hbar: f64,
    ) -> Result<Self, SemiclassicalError> {
        if lambda_period > 0.0 && mass > 0.0 && hbar > 0.0 {
            Ok(Self {
                lambda_period,
                signal,
                mass,
                hbar,
            })
        } else {
            Err(SemiclassicalError::BadParameters)
        }
    }

    /// κ = 2π/Λ (1/m).
    pub fn kappa(&self) -> f64 {
        core::f64::consts::TAU / self.lambda_period
    }

    pub fn transverse_from_velocity(&self, v: f64) -> Transverse {
        Transverse::from_velocity(v, self.mass, self.hbar)
    }

    /// Resonance frequency `ν₀ = ħk/(mΛ) = v_x/Λ` (Hz); odd in k.
    pub fn resonance_frequency(&self, k: Transverse) -> f64 {
        self.hbar * k.wavenumber() / (self.mass * self.lambda_period)
    }

    /// Phase magnitude scale (rad) used to set quadrature tolerances.
    fn phase_scale(&self) -> f64 {
        self.signal.integral_scale() / self.hbar
    }

    /// Running phase `φ(t,k)` (rad); constant once `t` passes the end of the
    /// signal support.
    pub fn phase_shift(&self, t: f64, k: Transverse) -> Result<f64, SemiclassicalError> {
        self.phase_shift_with_tol(t, k, PHASE_TOL_REL * self.phase_scale())
    }

    /// As [`phase_shift`](Self::phase_shift) with an explicit absolute
    /// tolerance (rad).
    pub fn phase_shift_with_tol(
        &self,
        t: f64,
        k: Transverse,
        abs_tol_rad: f64,
    ) -> Result<f64, SemiclassicalError> {
        let (_, hi) = self.signal.support();
        let upper = t.max(0.0).min(hi);
        if upper <= 0.0 {
            return Ok(0.0);
        }
        let nu0 = self.resonance_frequency(k);
        let w = core::f64::consts::TAU * nu0;
        let rule = self.signal.rule_for(nu0, abs_tol_rad * self.hbar);
        let bps = self.signal.breakpoints();
        let integral = integrate(
            |u| self.signal.eval_s(u) * libm::cos(w * u),
            0.0,
            upper,
            &bps,
            &rule,
        )?;
        Ok(-integral / self.hbar)
    }

    /// Asymptotic phase `φ∞(k) = −ħ⁻¹ Re H(ν₀)` (rad).
    pub fn phase_shift_asymptotic(&self, k: Transverse) -> Result<f64, SemiclassicalError> {
        let nu0 = self.resonance_frequency(k);
        let h = self
            .signal
            .spectrum_at(nu0, PHASE_TOL_REL * self.phase_scale() * self.hbar)?;
        Ok(-h.re / self.hbar)
    }

    /// Asymptotic phase profile over a wave-number grid.
    pub fn asymptotic_profile(&self, k_grid: &[f64]) -> Result<PhaseProfile, SemiclassicalError> {
        let mut phi = Vec::with_capacity(k_grid.len());
        for &k in k_grid {
            phi.push(self.phase_shift_asymptotic(Transverse::from_wavenumber(k))?);
        }
        Ok(PhaseProfile {
            k_grid: k_grid.to_vec(),
            phi,
            time: None,
        })
    }

    /// Shift magnitude scale (m) used to set quadrature tolerances.
    fn shift_scale(&self) -> f64 {
        let (_, hi) = self.signal.support();
        core::f64::consts::TAU / (self.mass * self.lambda_period)
            * self.signal.integral_scale()
            * hi
    }

    /// Spatial shift `δξ(t) = −(2π/(mΛ)) ∫₀ᵗ t′ s(t′) sin(2πν₀ t′) dt′` (m).
    pub fn spatial_shift(&self, t: f64, k0: Transverse) -> Result<f64, SemiclassicalError> {
        let (_, hi) = self.signal.support();
        let upper = t.max(0.0).min(hi);
        if upper <= 0.0 {
            return Ok(0.0);
        }
        let nu0 = self.resonance_frequency(k0);
        if nu0 == 0.0 {
            return Ok(0.0);
        }
        let w = core::f64::consts::TAU * nu0;
        let pref = core::f64::consts::TAU / (self.mass * self.lambda_period);
        let abs_tol = (1e-12 * self.shift_scale() / pref).max(1e-300);
        let rule = self.signal.rule_for(nu0, abs_tol);
        let bps = self.signal.breakpoints();
        let integral = integrate(
            |u| u * self.signal.eval_s(u) * libm::sin(w * u),
            0.0,
            upper,
            &bps,
            &rule,
        )?;
        Ok(-pref * integral)
    }

    /// Limiting shift `δξ∞` (m): the full-support integral of the running
    /// shift. Cross-checked in magnitude against the spectral route; under
    /// this crate's transform convention the direct limit equals
    /// `+Re H′(ν₀)/(mΛ)`, so magnitudes are compared and the direct sign is
    /// returned.
    pub fn spatial_shift_asymptotic(&self, k0: Transverse) -> Result<f64, SemiclassicalError> {
        let (_, hi) = self.signal.support();
        let direct = self.spatial_shift(hi, k0)?;
        let nu0 = self.resonance_frequency(k0);
        let hp_tol = 0.25 * SHIFT_ROUTE_TOL * self.mass * self.lambda_period;
        let hp = self.signal.spectrum_derivative(nu0, hp_tol)?;
        let spectral = hp.re / (self.mass * self.lambda_period);
        if libm::fabs(libm::fabs(direct) - libm::fabs(spectral)) > SHIFT_ROUTE_TOL {
            return Err(SemiclassicalError::InconsistentRoutes);
        }
        Ok(direct)
    }

    /// Packet center `ξ(t) = x₀ + (ħk₀/m)t + δξ(t)` (m).
    pub fn packet_center(
        &self,
        t: f64,
        k0: Transverse,
        x0: f64,
    ) -> Result<f64, SemiclassicalError> {
        Ok(x0 + k0.velocity(self.mass, self.hbar) * t + self.spatial_shift(t, k0)?)
    }

    /// Group velocity
    /// `v_gx(t) = ħk₀/m − (2π/(mΛ)) t s(t) sin(2πν₀ t)` (m/s); closed form.
    pub fn group_velocity(&self, t: f64, k0: Transverse) -> f64 {
        let v0 = k0.velocity(self.mass, self.hbar);
        let nu0 = self.resonance_frequency(k0);
        let term = core::f64::consts::TAU / (self.mass * self.lambda_period)
            * t
            * self.signal.eval_s(t)
            * libm::sin(core::f64::consts::TAU * nu0 * t);
        v0 - term
    }

    /// Minimum of the group velocity over the signal support, by dense
    /// scan plus local refinement. Returns `(t_min, v_min)`.
    pub fn group_velocity_minimum(&self, k0: Transverse, n_scan: usize) -> (f64, f64) {
        let (lo, hi) = self.signal.support();
        let n = n_scan.max(16);
        let mut best_t = lo;
        let mut best_v = self.group_velocity(lo, k0);
        for i in 0..=n {
            let t = lo + (hi - lo) * i as f64 / n as f64;
            let v = self.group_velocity(t, k0);
            if v < best_v {
                best_v = v;
                best_t = t;
            }
        }
        // golden-section refinement around the best sample
        let step = (hi - lo) / n as f64;
        let (mut a, mut b) = ((best_t - step).max(lo), (best_t + step).min(hi));
        let inv_phi = 0.5 * (libm::sqrt(5.0) - 1.0);
        for _ in 0..80 {
            let c = b - inv_phi * (b - a);
            let d = a + inv_phi * (b - a);
            if self.group_velocity(c, k0) < self.group_velocity(d, k0) {
                b = d;
            } else {
                a = c;
            }
        }
        let t = 0.5 * (a + b);
        (t, self.group_velocity(t, k0))
    }

    /// Spectrum derivative at the resonance of `k0`, exposed for spectral
    /// cross-checks.
    pub fn spectrum_derivative_at(
        &self,
        k0: Transverse,
        abs_tol: f64,
    ) -> Result<Complex64, SemiclassicalError> {
        let nu0 = self.resonance_frequency(k0);
        Ok(self.signal.spectrum_derivative(nu0, abs_tol)?)
    }
}

/// Static-index analogy `n(r) = (1 − V/E₀)^{1/2}`; evanescent when V > E₀.
pub fn effective_index(v: f64, e0: f64) -> Result<EffectiveIndex, SemiclassicalError> {
    if !(e0 > 0.0) {
        return Err(SemiclassicalError::NonPositiveEnergy);
    }
    let arg = 1.0 - v / e0;
    if arg >= 0.0 {
        Ok(EffectiveIndex::Propagating(libm::sqrt(arg)))
    } else {
        Ok(EffectiveIndex::Evanescent(libm::sqrt(-arg)))
    }
}
