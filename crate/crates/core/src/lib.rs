//! Vortex filaments under the binormal flow in constant-curvature space
//! forms, their Frenet and connection data, and the Hasimoto transform to
//! the cubic nonlinear Schrödinger equation.

pub mod cli_io;
pub mod dynamics;
pub mod error;
pub mod filament;
pub mod frames;
pub mod geometry;
pub mod hasimoto;
pub mod spectral;
pub mod verify;

pub use error::{Result, VfeError};
pub use filament::{ClosedFilament, FrenetField};
pub use geometry::{AmbientPoint, SpaceForm, SpaceKind, TangentVector};
