//! Physical constants, atom species, and Zeeman energy scales.
//!
//! Constants are CODATA 2018 values. They are plain struct fields rather than
//! globals so that dimensionless-unit runs (ħ = m = 1) can substitute their
//! own scales.

use alloc::string::String;

/// CODATA 2018 reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054571817e-34;
/// CODATA 2018 Bohr magneton (J/T).
pub const BOHR_MAGNETON: f64 = 9.2740100783e-24;
/// CODATA 2018 atomic mass unit (kg).
pub const ATOMIC_MASS_UNIT: f64 = 1.66053906660e-27;

/// Fundamental constants used across the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant (J·s).
    pub hbar: f64,
    /// Bohr magneton (J/T).
    pub bohr_magneton: f64,
    /// Atomic mass unit (kg).
    pub atomic_mass_unit: f64,
}

impl PhysicalConstants {
    /// CODATA 2018 values.
    pub const fn codata() -> Self {
        Self {
            hbar: HBAR,
            bohr_magneton: BOHR_MAGNETON,
            atomic_mass_unit: ATOMIC_MASS_UNIT,
        }
    }

    /// Natural units for scaled runs: ħ = μ_B = u = 1.
    pub const fn dimensionless() -> Self {
        Self {
            hbar: 1.0,
            bohr_magneton: 1.0,
            atomic_mass_unit: 1.0,
        }
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata()
    }
}

/// An atomic species: mass, Landé factor, and a spectroscopic label.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSpecies {
    pub name: String,
    /// Mass (kg).
    pub mass: f64,
    /// Landé g-factor of the level.
    pub lande_g: f64,
    /// Spectroscopic label of the level, e.g. "3P2".
    pub level: String,
    /// Total angular momentum J of the level, when declared.
    pub j_total: Option<f64>,
}

impl AtomSpecies {
    /// Metastable argon Ar*(³P₂). The standard atomic weight 39.948 u is
    /// used for the mass; g = 3/2 is the LS-coupling value for ³P₂.
    pub fn argon_metastable() -> Self {
        Self {
            name: String::from("Ar*"),
            mass: 39.948 * ATOMIC_MASS_UNIT,
            lande_g: 1.5,
            level: String::from("3P2"),
            j_total: Some(2.0),
        }
    }

    /// Species with explicit mass (kg) and Landé factor.
    pub fn custom(name: &str, mass: f64, lande_g: f64) -> Self {
        Self {
            name: String::from(name),
            mass,
            lande_g,
            level: String::new(),
            j_total: None,
        }
    }
}

/// A Zeeman sublevel of a species: fixes the linear energy scale
/// `s_max = g μ_B M B`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeemanState {
    pub species: AtomSpecies,
    /// Magnetic quantum number M.
    pub m_quantum: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateError {
    /// |M| exceeds the declared J of the level.
    MOutOfRange,
    /// Landé factor undefined (J = 0).
    UndefinedG,
}

impl core::fmt::Display for StateError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            StateError::MOutOfRange => write!(f, "|M| exceeds the declared J of the level"),
            StateError::UndefinedG => write!(f, "Lande g undefined for J = 0"),
        }
    }
}

impl core::error::Error for StateError {}

impl ZeemanState {
    pub fn new(species: AtomSpecies, m_quantum: i32) -> Result<Self, StateError> {
        if let Some(j) = species.j_total {
            if (m_quantum.unsigned_abs() as f64) > j + 1e-9 {
                return Err(StateError::MOutOfRange);
            }
        }
        Ok(Self { species, m_quantum })
    }
}

/// Landé g-factor in LS coupling:
/// `g = 1 + [J(J+1) + S(S+1) − L(L+1)] / [2 J(J+1)]`.
pub fn lande_g(l: f64, s: f64, j: f64) -> Result<f64, StateError> {
    if j <= 0.0 {
        return Err(StateError::UndefinedG);
    }
    let jj = j * (j + 1.0);
    Ok(1.0 + (jj + s * (s + 1.0) - l * (l + 1.0)) / (2.0 * jj))
}

/// Zeeman energy amplitude `s_max = g μ_B M B` (J); signed, negative for M < 0.
pub fn zeeman_amplitude(consts: &PhysicalConstants, state: &ZeemanState, b_field: f64) -> f64 {
    state.species.lande_g * consts.bohr_magneton * state.m_quantum as f64 * b_field
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codata_values() {
        let c = PhysicalConstants::codata();
        assert!((c.hbar - 1.054572e-34).abs() / 1.054572e-34 < 1e-6);
        assert!((c.bohr_magneton - 9.274010e-24).abs() / 9.274010e-24 < 1e-6);
        assert!((c.atomic_mass_unit - 1.660539e-27).abs() / 1.660539e-27 < 1e-6);
        assert!(c.hbar > 0.0 && c.bohr_magneton > 0.0 && c.atomic_mass_unit > 0.0);
    }

    #[test]
    fn lande_g_cases() {
        // 3P2 in LS coupling is exactly 3/2
        assert_eq!(lande_g(1.0, 1.0, 2.0).unwrap(), 1.5);
        // pure spin
        assert!((lande_g(0.0, 0.5, 0.5).unwrap() - 2.0).abs() < 1e-15);
        // pure orbital
        assert!((lande_g(1.0, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(lande_g(0.0, 0.0, 0.0), Err(StateError::UndefinedG));
    }

    #[test]
    fn zeeman_scale() {
        let c = PhysicalConstants::codata();
        let state = ZeemanState::new(AtomSpecies::argon_metastable(), 2).unwrap();
        let s = zeeman_amplitude(&c, &state, 0.04);
        // 1.5 * mu_B * 2 * 0.04 T
        assert!((s - 1.1129e-24).abs() / 1.1129e-24 < 1e-4);
        assert_eq!(zeeman_amplitude(&c, &state, 0.0), 0.0);
        let minus = ZeemanState::new(AtomSpecies::argon_metastable(), -2).unwrap();
        assert_eq!(zeeman_amplitude(&c, &minus, 0.04), -s);
    }

    #[test]
    fn argon_mass() {
        let ar = AtomSpecies::argon_metastable();
        assert!((ar.mass - 6.6335e-26).abs() / 6.6335e-26 < 1e-4);
    }

    #[test]
    fn m_within_j() {
        assert!(ZeemanState::new(AtomSpecies::argon_metastable(), 3).is_err());
        assert!(ZeemanState::new(AtomSpecies::argon_metastable(), -2).is_ok());
    }

    proptest::proptest! {
        #[test]
        fn zeeman_bilinear(m in 1i32..6, b in 0.0f64..1.0) {
            let c = PhysicalConstants::codata();
            let sp = AtomSpecies::custom("x", 1e-26, 1.2);
            let s1 = ZeemanState { species: sp.clone(), m_quantum: m };
            let s2 = ZeemanState { species: sp, m_quantum: 2 * m };
            let a = zeeman_amplitude(&c, &s1, b);
            let doubled_m = zeeman_amplitude(&c, &s2, b);
            let doubled_b = zeeman_amplitude(&c, &s1, 2.0 * b);
            proptest::prop_assert!((doubled_m - 2.0 * a).abs() <= 1e-12 * a.abs().max(1e-300));
            proptest::prop_assert!((doubled_b - 2.0 * a).abs() <= 1e-12 * a.abs().max(1e-300));
        }
    }
}
