//! Inverse pulse design: synthesize a real signal s(t) whose asymptotic
//! phase matches a target profile φ(k).
//!
//! The design matrix encodes the running-phase integral literally on a
//! trapezoid grid, `φ_i = Σ_j (−w_j/ħ) cos(2πν_i t_j) s_j`, with the pulse
//! triggered at the packet entrance; solving in the time domain avoids the
//! time-shift convention trap of a spectral inversion. Only the real part of
//! the spectrum is constrained — the imaginary part never enters the
//! asymptotic phase.

use alloc::vec;
use alloc::vec::Vec;

use crate::semiclassical::{ComovingParams, Transverse};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignError {
    /// Grids empty, non-finite, or resolution bound violated.
    BadProblem,
    /// Normal system not positive definite / rank-deficient at λ = 0;
    /// retry with λ > 0.
    IllPosed,
}

impl core::fmt::Display for DesignError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DesignError::BadProblem => write!(f, "invalid design problem"),
            DesignError::IllPosed => {
                write!(f, "rank-deficient design system; set ridge lambda > 0")
            }
        }
    }
}

impl core::error::Error for DesignError {}

/// Target phase profile on a wave-number grid (ν_i = ħk_i/(mΛ) ≥ 0).
#[derive(Debug, Clone, PartialEq)]
pub struct TargetPhase {
    pub k_grid: Vec<f64>,
    pub phi_target: Vec<f64>,
}

/// Discretization and regularization of the synthesis problem.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignProblem {
    /// Uniform time grid on [0, T] (s).
    pub t_grid: Vec<f64>,
    /// Ridge weight, relative to the mean Gram diagonal; ≥ 0.
    pub ridge_lambda: f64,
    /// Optional hard bound on |s| (J); enforced by projection.
    pub amplitude_bound: Option<f64>,
}

impl DesignProblem {
    /// Uniform grid with `Δt = 1/(20 ν_max)` over `[0, horizon]`.
    pub fn with_horizon(
        horizon: f64,
        nu_max: f64,
        ridge_lambda: f64,
    ) -> Result<Self, DesignError> {
        if !(horizon > 0.0) || !(nu_max > 0.0) || !(ridge_lambda >= 0.0) {
            return Err(DesignError::BadProblem);
        }
        let dt = 1.0 / (20.0 * nu_max);
        let n = (libm::ceil(horizon / dt) as usize).max(2);
        let t_grid = (0..=n).map(|i| horizon * i as f64 / n as f64).collect();
        Ok(Self {
            t_grid,
            ridge_lambda,
            amplitude_bound: None,
        })
    }
}

/// Synthesized signal samples and the achieved phase residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult {
    pub t_grid: Vec<f64>,
    /// Signal samples (J), real by construction.
    pub s_samples: Vec<f64>,
    pub residual_max: f64,
    pub residual_rms: f64,
}

/// Compensated (Kahan) dot product; the design rows mix 1e28-scale matrix
/// entries with 1e-25-scale samples, so naive summation costs ~7 digits.
fn kahan_dot(a: impl Iterator<Item = f64>, b: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for (x, y) in a.zip(b) {
        let term = x * y - c;
        let t = sum + term;
        c = (t - sum) - term;
        sum = t;
    }
    sum
}

/// Trapezoid weights of a (not necessarily uniform) ascending grid.
fn trapezoid_weights(t: &[f64]) -> Vec<f64> {
    let n = t.len();
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let h = t[i + 1] - t[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

/// Dense design matrix `A[i][j] = (−w_j/ħ) cos(2πν_i t_j)`, row-major.
fn design_matrix(params: &ComovingParams, target: &TargetPhase, t: &[f64]) -> Vec<f64> {
    let w = trapezoid_weights(t);
    let m = target.k_grid.len();
    let n = t.len();
    let mut a = vec![0.0; m * n];
    for (i, &k) in target.k_grid.iter().enumerate() {
        let nu = params.resonance_frequency(Transverse::from_wavenumber(k));
        let omega = core::f64::consts::TAU * nu;
        for j in 0..n {
            a[i * n + j] = -(w[j] / params.hbar) * libm::cos(omega * t[j]);
        }
    }
    a
}

/// Cholesky factorization in place; `a` is m×m row-major, lower triangle
/// used. Pivots that collapse below 1e-12 of the original diagonal mark the
/// system as rank-deficient.
fn cholesky(a: &mut [f64], m: usize, diag_scale: &[f64]) -> Result<(), DesignError> {
    for i in 0..m {
        for j in 0..=i {
            let mut sum = a[i * m + j];
            for k in 0..j {
                sum -= a[i * m + k] * a[j * m + k];
            }
            if i == j {
                if sum <= 1e-12 * diag_scale[i] {
                    return Err(DesignError::IllPosed);
                }
                a[i * m + i] = libm::sqrt(sum);
            } else {
                a[i * m + j] = sum / a[j * m + j];
            }
        }
    }
    Ok(())
}

fn cholesky_solve(l: &[f64], m: usize, b: &mut [f64]) {
    for i in 0..m {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * m + k] * b[k];
        }
        b[i] = sum / l[i * m + i];
    }
    for i in (0..m).rev() {
        let mut sum = b[i];
        for k in i + 1..m {
            sum -= l[k * m + i] * b[k];
        }
        b[i] = sum / l[i * m + i];
    }
}

fn residuals(a: &[f64], s: &[f64], phi: &[f64], m: usize, n: usize) -> (f64, f64) {
    let mut max = 0.0_f64;
    let mut sq = 0.0;
    for i in 0..m {
        let acc = kahan_dot(a[i * n..(i + 1) * n].iter().copied(), s.iter().copied());
        let r = acc - phi[i];
        max = max.max(libm::fabs(r));
        sq += r * r;
    }
    (max, libm::sqrt(sq / m as f64))
}

/// Least-squares synthesis of the signal samples.
///
/// With λ > 0 the ridge problem is solved in dual form,
/// `s = Aᵀ(AAᵀ + λ̃I)⁻¹φ` with `λ̃ = λ · mean(diag(AᵀA))`, which is exact for
/// the Tikhonov minimizer and keeps the factorized system at the size of the
/// k-grid. With λ = 0 the same system is solved unregularized (the
/// minimum-norm exact solution when rows are independent); a non-positive
/// pivot reports the system as ill-posed.
pub fn design_lsq(
    params: &ComovingParams,
    target: &TargetPhase,
    problem: &DesignProblem,
) -> Result<DesignResult, DesignError> {
    let m = target.k_grid.len();
    let n = problem.t_grid.len();
    if m == 0 || n < 2 || target.phi_target.len() != m {
        return Err(DesignError::BadProblem);
    }
    for &k in &target.k_grid {
        if !k.is_finite() || k < 0.0 {
            return Err(DesignError::BadProblem);
        }
    }
    let mut prev = f64::NEG_INFINITY;
    for &t in &problem.t_grid {
        if !t.is_finite() || t <= prev {
            return Err(DesignError::BadProblem);
        }
        prev = t;
    }
    // grid must resolve the fastest target frequency: Δt ≤ 1/(10 ν_max)
    let mut nu_max = 0.0_f64;
    for &k in &target.k_grid {
        nu_max = nu_max.max(libm::fabs(
            params.resonance_frequency(Transverse::from_wavenumber(k)),
        ));
    }
    let dt_max = problem
        .t_grid
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max);
    if nu_max > 0.0 && dt_max > 1.0 / (10.0 * nu_max) {
        return Err(DesignError::BadProblem);
    }

    let a = design_matrix(params, target, &problem.t_grid);

    // Gram matrix G = A Aᵀ (m×m) and the ridge shift
    let mut g = vec![0.0; m * m];
    let mut frob = 0.0;
    for i in 0..m {
        for j in 0..=i {
            let acc = kahan_dot(
                a[i * n..(i + 1) * n].iter().copied(),
                a[j * n..(j + 1) * n].iter().copied(),
            );
            g[i * m + j] = acc;
            g[j * m + i] = acc;
            if i == j {
                frob += acc;
            }
        }
    }
    let lambda = problem.ridge_lambda * frob / n as f64;
    for i in 0..m {
        g[i * m + i] += lambda;
    }

    let g_full = g.clone();
    let diag_scale: Vec<f64> = (0..m).map(|i| g_full[i * m + i]).collect();
    cholesky(&mut g, m, &diag_scale)?;
    let mut y: Vec<f64> = target.phi_target.clone();
    cholesky_solve(&g, m, &mut y);
    // one step of iterative refinement knocks the factorization roundoff
    // out of the dual solution
    for _ in 0..2 {
        let mut r = vec![0.0; m];
        for i in 0..m {
            let acc = kahan_dot(
                g_full[i * m..(i + 1) * m].iter().copied(),
                y.iter().copied(),
            );
            r[i] = target.phi_target[i] - acc;
        }
        cholesky_solve(&g, m, &mut r);
        for i in 0..m {
            y[i] += r[i];
        }
    }

    let mut s = vec![0.0; n];
    for j in 0..n {
        let mut acc = 0.0;
        for i in 0..m {
            acc += a[i * n + j] * y[i];
        }
        s[j] = acc;
    }

    // reality of the synthesized samples is asserted, not assumed: a
    // non-finite value here means the solve degenerated
    if s.iter().any(|v| !v.is_finite()) {
        return Err(DesignError::IllPosed);
    }

    if let Some(bound) = problem.amplitude_bound {
        if !(bound >= 0.0) {
            return Err(DesignError::BadProblem);
        }
        for v in s.iter_mut() {
            *v = v.clamp(-bound, bound);
        }
    }

    let (residual_max, residual_rms) = residuals(&a, &s, &target.phi_target, m, n);
    Ok(DesignResult {
        t_grid: problem.t_grid.clone(),
        s_samples: s,
        residual_max,
        residual_rms,
    })
}

/// Recompute the asymptotic phase of the synthesized samples by trapezoid
/// quadrature of the running-phase integral over the full grid, and return
/// the largest deviation from the target (rad).
pub fn verify_design(
    result: &DesignResult,
    target: &TargetPhase,
    params: &ComovingParams,
) -> f64 {
    let w = trapezoid_weights(&result.t_grid);
    let mut worst = 0.0_f64;
    for (i, &k) in target.k_grid.iter().enumerate() {
        let nu = params.resonance_frequency(Transverse::from_wavenumber(k));
        let omega = core::f64::consts::TAU * nu;
        let phi = kahan_dot(
            result.t_grid.iter().enumerate().map(|(j, &t)| {
                -(w[j] / params.hbar) * libm::cos(omega * t)
            }),
            result.s_samples.iter().copied(),
        );
        worst = worst.max(libm::fabs(phi - target.phi_target[i]));
    }
    worst
}
