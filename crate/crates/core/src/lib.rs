//! Simulation of two-photon interference on biphoton frequency combs.
//!
//! A comb of energy-matched signal/idler line pairs is pushed through an
//! electro-optic phase modulator driven at half the comb spacing. Sidebands of
//! neighbouring lines land on the same output bins, and the post-selected
//! coincidence rate carries the relative phases of the line pairs. The crate
//! covers the state model ([`comb`]), the sideband projection
//! ([`modulation`]), the interference and dispersion experiments with a
//! Poisson detector model ([`experiment`]), and the config-driven front end
//! used by the `qcomb` binary ([`config`], [`runner`]).

pub mod comb;
pub mod config;
pub mod error;
pub mod experiment;
pub mod modulation;
pub mod numerics;
pub mod runner;

pub use comb::{CombGrid, CombState, FiberSpec, ShaperMask};
pub use error::{Error, ErrorCategory, Result};
pub use experiment::{DetectorModel, DispersionFit, SweepRecord, VisibilityResult};
pub use modulation::{BinIndex, Modulator, OutputBin};
