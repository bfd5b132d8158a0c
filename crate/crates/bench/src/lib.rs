//! Fixtures shared by the benchmarks.

use qproj::constraint::{quartic_constraint, SnapPolicy};
use qproj::reparam::random_phase_points;
use qproj::{GridSpec, OperatorMatrix, PhasePoint};

pub const SEED: u64 = 1729;

/// Snapped quartic constraint on `dim` Fock levels.
pub fn quartic(dim: usize) -> OperatorMatrix {
    quartic_constraint(dim, SnapPolicy::SnapToLevel(0)).expect("valid dimension").operator
}

/// Symmetric box `[-half_width, half_width]` with spacing `h`.
pub fn box_grid(half_width: f64, h: f64) -> GridSpec {
    GridSpec::with_spacing(-half_width, half_width, h).expect("valid grid")
}

pub fn timed_points(count: usize) -> Vec<PhasePoint> {
    random_phase_points(count, SEED, false)
}

pub fn extended_points(count: usize) -> Vec<PhasePoint> {
    random_phase_points(count, SEED, true)
}
