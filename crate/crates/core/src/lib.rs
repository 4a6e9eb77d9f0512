//! Real-space dynamics of dimerized (SSH) waveguide lattices.
//!
//! A single-site excitation is propagated through an open SSH chain and two
//! observables are extracted from the output intensities: the population
//! difference center, whose distance average is half the winding number, and
//! the transition signal `S_t = P_c(z)/z²`, which peaks where `J1 = J2`. The
//! [`momentum`] module provides bulk Bloch-space formulas for the same
//! quantities so every dynamical measurement can be cross-checked.

pub mod dynamics;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod momentum;
pub mod observables;

pub use error::{Error, Result};
