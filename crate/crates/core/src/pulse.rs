//! Time-domain pulse signal `s(t)` and its frequency spectrum `H(ν)`.
//!
//! The base shape is `f(t) = ε²(t+ε)⁻² e^(−t/τ)` on `[0, τ₁]` and zero
//! elsewhere; a signal is a Zeeman amplitude times a weighted train of
//! delayed copies. The Fourier convention is fixed to
//! `H(ν) = ∫ s(t) e^(−2πiνt) dt`, so `Re H(ν) = ∫ s(t) cos(2πνt) dt` and the
//! asymptotic phase of the comoving analysis is literally the t→∞ limit of
//! the running phase integral.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::constants::{zeeman_amplitude, PhysicalConstants, ZeemanState};
use crate::quad::{integrate, QuadError, QuadRule};

/// Factor applied to `τ` for the quadrature panel cap.
const TAU_PANEL_DIV: f64 = 50.0;
/// Panels per oscillation period of the Fourier kernel.
const OSC_PANEL_DIV: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseError {
    /// Shape or train parameters violate an invariant.
    BadParameters,
    /// Quadrature failure while evaluating a spectrum integral.
    Numerical,
}

impl core::fmt::Display for PulseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PulseError::BadParameters => write!(f, "invalid pulse parameters"),
            PulseError::Numerical => write!(f, "spectrum quadrature did not converge"),
        }
    }
}

impl core::error::Error for PulseError {}

impl From<QuadError> for PulseError {
    fn from(_: QuadError) -> Self {
        PulseError::Numerical
    }
}

/// Reduced pulse shape `f(t)`; dimensionless, `f(0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseShape {
    /// Lorentz-like roll-off scale ε (s).
    pub epsilon: f64,
    /// Exponential decay time τ (s).
    pub tau: f64,
    /// Hard support end τ₁ (s).
    pub tau1: f64,
}

impl PulseShape {
    pub fn new(epsilon: f64, tau: f64, tau1: f64) -> Result<Self, PulseError> {
        if epsilon > 0.0 && tau > 0.0 && tau1 > 0.0 {
            Ok(Self { epsilon, tau, tau1 })
        } else {
            Err(PulseError::BadParameters)
        }
    }

    /// The reference-bundle shape: ε = 7.4 ms, τ = 0.37 ms, τ₁ = 1.2 ms.
    pub fn reference() -> Self {
        Self {
            epsilon: 7.4e-3,
            tau: 0.37e-3,
            tau1: 1.2e-3,
        }
    }

    /// `f(t)`, exactly zero outside `[0, τ₁]`.
    pub fn eval_f(&self, t: f64) -> f64 {
        if !(0.0..=self.tau1).contains(&t) {
            return 0.0;
        }
        let r = self.epsilon / (t + self.epsilon);
        r * r * libm::exp(-t / self.tau)
    }
}

/// Weighted delay train: `Σᵢ wᵢ f(t − dᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseTrain {
    terms: Vec<(f64, f64)>,
}

impl PulseTrain {
    /// `terms` are (weight, delay) pairs; delays must be ≥ 0 and ascending.
    pub fn new(terms: Vec<(f64, f64)>) -> Result<Self, PulseError> {
        if terms.is_empty() {
            return Err(PulseError::BadParameters);
        }
        let mut prev = -1.0;
        for &(w, d) in &terms {
            if !w.is_finite() || !d.is_finite() || d < 0.0 || d < prev {
                return Err(PulseError::BadParameters);
            }
            prev = d;
        }
        Ok(Self { terms })
    }

    /// A single unit pulse at delay 0.
    pub fn single() -> Self {
        Self {
            terms: vec![(1.0, 0.0)],
        }
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }
}

/// A full signal: Zeeman amplitude (J) times the shaped train.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSignal {
    /// Peak energy scale `s_max = g μ_B M B` (J); signed.
    pub amplitude: f64,
    pub shape: PulseShape,
    pub train: PulseTrain,
}

impl PulseSignal {
    /// Signal for a Zeeman state in a field of `b_field` tesla.
    pub fn zeeman(
        consts: &PhysicalConstants,
        state: &ZeemanState,
        b_field: f64,
        shape: PulseShape,
        train: PulseTrain,
    ) -> Self {
        Self {
            amplitude: zeeman_amplitude(consts, state, b_field),
            shape,
            train,
        }
    }

    /// Signal with an explicit amplitude (used for scaled-unit runs).
    pub fn from_amplitude(amplitude: f64, shape: PulseShape, train: PulseTrain) -> Self {
        Self {
            amplitude,
            shape,
            train,
        }
    }

    /// `s(t) = s_max Σᵢ wᵢ f(t − dᵢ)` (J).
    pub fn eval_s(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for &(w, d) in self.train.terms() {
            acc += w * self.shape.eval_f(t - d);
        }
        self.amplitude * acc
    }

    /// Support interval `[min dᵢ, max dᵢ + τ₁]`.
    pub fn support(&self) -> (f64, f64) {
        let terms = self.train.terms();
        let lo = terms[0].1;
        let hi = terms[terms.len() - 1].1 + self.shape.tau1;
        (lo, hi)
    }

    /// All support edges of the train (integration breakpoints).
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.train.terms().len());
        for &(_, d) in self.train.terms() {
            v.push(d);
            v.push(d + self.shape.tau1);
        }
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    }

    /// Quadrature rule for kernels oscillating at frequency `nu`, with the
    /// given absolute tolerance.
    pub(crate) fn rule_for(&self, nu: f64, abs_tol: f64) -> QuadRule {
        let mut panel = self.shape.tau / TAU_PANEL_DIV;
        if nu != 0.0 {
            panel = panel.min(1.0 / (OSC_PANEL_DIV * libm::fabs(nu)));
        }
        QuadRule::new(abs_tol.max(1e-300), panel)
    }

    /// Magnitude scale of `∫ s dt`, used to seed absolute tolerances.
    pub(crate) fn integral_scale(&self) -> f64 {
        let mut wsum = 0.0;
        for &(w, _) in self.train.terms() {
            wsum += libm::fabs(w);
        }
        (libm::fabs(self.amplitude) * wsum * self.shape.tau1).max(1e-300)
    }

    /// `H(ν) = ∫ s(t) e^(−2πiνt) dt` at a single frequency, to absolute
    /// tolerance `abs_tol` (per real quadrature).
    pub fn spectrum_at(&self, nu: f64, abs_tol: f64) -> Result<Complex64, PulseError> {
        let (lo, hi) = self.support();
        let bps = self.breakpoints();
        let rule = self.rule_for(nu, abs_tol);
        let w = 2.0 * core::f64::consts::PI * nu;
        let re = integrate(
            |t| self.eval_s(t) * libm::cos(w * t),
            lo,
            hi,
            &bps,
            &rule,
        )?;
        let im = -integrate(
            |t| self.eval_s(t) * libm::sin(w * t),
            lo,
            hi,
            &bps,
            &rule,
        )?;
        Ok(Complex64::new(re, im))
    }

    /// Spectrum on a frequency grid; tolerance `1e-6 · |H(0)|`.
    pub fn spectrum(&self, nu_grid: &[f64]) -> Result<Spectrum, PulseError> {
        for &nu in nu_grid {
            if !nu.is_finite() {
                return Err(PulseError::BadParameters);
            }
        }
        let seed = self.integral_scale() * 1e-10;
        let h0 = self.spectrum_at(0.0, seed)?;
        let tol = (1e-6 * h0.norm()).max(seed);
        let mut values = Vec::with_capacity(nu_grid.len());
        for &nu in nu_grid {
            values.push(self.spectrum_at(nu, tol)?);
        }
        Ok(Spectrum {
            nu_grid: nu_grid.to_vec(),
            values,
        })
    }

    /// `H′(ν) = ∫ s(t)(−2πit) e^(−2πiνt) dt` (J·s²);
    /// `Re H′ = −2π ∫ t s sin(2πνt) dt`, `Im H′ = −2π ∫ t s cos(2πνt) dt`.
    pub fn spectrum_derivative(&self, nu: f64, abs_tol: f64) -> Result<Complex64, PulseError> {
        let (lo, hi) = self.support();
        let bps = self.breakpoints();
        let tau_pi = core::f64::consts::TAU; // 2π
        let rule = self.rule_for(nu, abs_tol / tau_pi);
        let w = tau_pi * nu;
        let re = -tau_pi
            * integrate(
                |t| t * self.eval_s(t) * libm::sin(w * t),
                lo,
                hi,
                &bps,
                &rule,
            )?;
        let im = -tau_pi
            * integrate(
                |t| t * self.eval_s(t) * libm::cos(w * t),
                lo,
                hi,
                &bps,
                &rule,
            )?;
        Ok(Complex64::new(re, im))
    }
}

/// Complex spectrum samples on a frequency grid (J·s).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub nu_grid: Vec<f64>,
    pub values: Vec<Complex64>,
}
