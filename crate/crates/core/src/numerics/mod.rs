//! Numerical kernels shared by the simulator.

pub mod bessel;
pub mod depth;
pub mod fit;
pub mod random;
pub mod unwrap;

pub use bessel::{bessel_j, BesselTable};
pub use depth::{solve_depth_for_power, solve_depth_for_ratio};
pub use fit::{fit_harmonics, fit_line, HarmonicFit, LineFit};
pub use random::{poisson_sample, stream_rng};
pub use unwrap::{fold_phase, unfold_folded_phases, unwrap_phase, wrap_phase};
