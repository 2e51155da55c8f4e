//! Photothermal response of Lorentz-dispersive nanoparticles.
//!
//! The crate covers the quasi-static pipeline end to end:
//!
//! * [`dispersion`] — the single-pole Lorentz permittivity, its Q-factor, and
//!   the plasmonic/dielectric incidence-frequency selections that pin the
//!   resonant denominator at `Theta(delta^h)`;
//! * [`domain`] — voxelized unit-scale reference shapes and the physical
//!   particle `Omega = delta B + z`;
//! * [`operators`] — the Helmholtz Green kernel, the Newtonian and
//!   Magnetization volume operators (dense and lattice-convolution forms),
//!   the discrete Helmholtz–Hodge projectors, and the resonant eigenmode
//!   machinery;
//! * [`maxwell`] — the scaled Lippmann–Schwinger solver and the dominant
//!   closed-form energies of both resonance families;
//! * [`heat`] — the heat kernel, the erfc closed form of the time integral
//!   `J`, the dominant photothermal formulas, and the space-time quadrature
//!   oracle they are checked against;
//! * [`asymptotics`] — geometric delta-sweeps, slope fits, and remainder-order
//!   verification for every predicted exponent.
//!
//! The `examples/` directory demonstrates one capability per file; the
//! `nanoheat` binary exposes the same pipeline as subcommands
//! (`resonance | eig | solve | heat | sweep | validate`).

pub mod asymptotics;
pub mod cache;
pub mod config;
pub mod dispersion;
pub mod domain;
mod error;
pub mod field;
pub mod heat;
pub mod linalg;
pub mod maxwell;
pub mod operators;
pub mod pipeline;

pub use error::NanoheatError;
