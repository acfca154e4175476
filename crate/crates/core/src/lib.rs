//! Reactive settling in sequencing batch reactors.
//!
//! A one-dimensional moving-boundary model: solids settle with compression
//! below a free surface whose level changes with fill and draw, while
//! particulate and soluble components react. The crate provides an explicit
//! finite-volume scheme (operator-split or unsplit in the reactions), a
//! well-mixed ODE stage for aerated periods, and modified ASM1 kinetics.

pub mod cli;
pub mod constitutive;
pub mod error;
pub mod geometry;
pub mod mixing;
pub mod reactions;
pub mod scheme;
pub mod simulator;

pub use error::{Result, SimError};
