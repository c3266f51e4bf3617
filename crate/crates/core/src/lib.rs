//! Matter-wave optics in pulsed comoving magnetic potentials.
//!
//! A comoving device drives atoms with a potential `V(t,x) = s(t) cos(2πx/Λ)`
//! whose resonant traveling component rides along with the transverse atomic
//! motion. This crate provides the building blocks for simulating such
//! devices:
//!
//! * [`constants`] — physical constants, atom species, Zeeman energy scales;
//! * [`pulse`] — the time-domain signal `s(t)` (single pulses and trains) and
//!   its frequency spectrum `H(ν)`;
//! * [`semiclassical`] — closed-form phase shift, spatial shift, packet
//!   center, group velocity, and the static-index analogy;
//! * [`raytrace`] — ray bundles through the device: image distance, lens
//!   scans, threshold fields, cones, and multi-pulse refocusing;
//! * [`schrodinger`] — a direct split-step solver for the one-dimensional
//!   time-dependent Schrödinger equation used to cross-check the closed
//!   forms at desk scale;
//! * [`designer`] — inverse synthesis of a pulse whose asymptotic phase
//!   matches a prescribed profile.
//!
//! The crate is `no_std` (with `alloc`); all floating-point math goes through
//! `libm` so results are bit-identical across platforms.

#![cfg_attr(not(test), no_std)]
// validation guards are written `!(x > 0.0)` on purpose: NaN must fail them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod constants;
pub mod designer;
pub mod fft;
pub mod pulse;
pub mod quad;
pub mod raytrace;
pub mod schrodinger;
pub mod semiclassical;

pub use constants::{lande_g, zeeman_amplitude, AtomSpecies, PhysicalConstants, ZeemanState};
pub use pulse::{PulseShape, PulseSignal, PulseTrain, Spectrum};
pub use semiclassical::{ComovingParams, Transverse};
