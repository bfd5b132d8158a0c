//! Concrete constraint operators with a spectral gap about zero.
//!
//! * The quartic constraint `P^2 + Q^2 + Q^4 - c` in a truncated Fock basis.
//!   Its spectrum has no regularity, so `c` must be tuned onto an eigenvalue
//!   for zero to lie in the spectrum; [`SnapPolicy`] makes that explicit.
//! * The mixed-spectrum constraint `p^2 + V(q)` with
//!   `V(q) = -(1+q^2)^(-3/2) + q^2/(1+q^2)` on a Dirichlet grid. Its zero mode
//!   is `exp(-sqrt(1+q^2))`; the continuum starts at 1.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{
    build_grid_operator, build_operator, eigendecompose, eigenpair, index_nearest, BasisSpec, GridSpec,
    OperatorExpr, OperatorMatrix, Polynomial,
};
use crate::projector::{spectral_gap, GapReport};
use crate::quadrature::loglog_slope;

/// Smallest Fock dimension accepted for the quartic constraint.
pub const MIN_QUARTIC_DIM: usize = 16;

/// Boundary amplitude of the reference zero mode above which the box is
/// reported as too small.
pub const BOUNDARY_AMPLITUDE_LIMIT: f64 = 1e-14;

/// `V(q) = -(1+q^2)^(-3/2) + q^2/(1+q^2)`.
pub fn mixed_potential(q: f64) -> f64 {
    let r = 1.0 + q * q;
    -r.powf(-1.5) + q * q / r
}

/// Exact zero mode `exp(-sqrt(1+q^2))` of the continuum mixed constraint.
pub fn mixed_zero_mode(q: f64) -> f64 {
    (-(1.0 + q * q).sqrt()).exp()
}

/// How the constant `c` of the quartic constraint is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnapPolicy {
    /// Use `c` as given; it must already be an eigenvalue.
    ExplicitC(f64),
    /// Set `c` to the `k`-th eigenvalue (ascending) of `P^2 + Q^2 + Q^4`.
    SnapToLevel(usize),
}

impl Default for SnapPolicy {
    fn default() -> Self {
        SnapPolicy::SnapToLevel(0)
    }
}

/// Quartic constraint together with its gap structure.
#[derive(Debug, Clone)]
pub struct QuarticConstraint {
    pub operator: OperatorMatrix,
    pub gap: GapReport,
    /// The constant actually subtracted.
    pub c: f64,
}

/// `P^2 + Q^2 + Q^4 - c` on `N` Fock levels.
pub fn quartic_constraint(dim: usize, policy: SnapPolicy) -> Result<QuarticConstraint> {
    quartic_constraint_with_coupling(dim, 1.0, policy)
}

/// `P^2 + Q^2 + g Q^4 - c`; `g = 0` gives the regular oscillator case.
pub fn quartic_constraint_with_coupling(dim: usize, coupling: f64, policy: SnapPolicy) -> Result<QuarticConstraint> {
    if dim < MIN_QUARTIC_DIM {
        return Err(Error::InvalidBasis(format!(
            "quartic constraint needs at least {MIN_QUARTIC_DIM} Fock levels, got {dim}"
        )));
    }
    let basis = BasisSpec::fock(dim)?;
    let hamiltonian = build_operator(&OperatorExpr::Polynomial(Polynomial::quartic(coupling, 0.0)), &basis)?;
    let c = match policy {
        SnapPolicy::ExplicitC(c) => {
            if !c.is_finite() {
                return Err(Error::InvalidParameter(format!("c must be finite, got {c}")));
            }
            c
        }
        SnapPolicy::SnapToLevel(k) => {
            if k >= dim {
                return Err(Error::InvalidParameter(format!("snap level {k} outside the {dim}-level spectrum")));
            }
            eigendecompose(&hamiltonian)?.values[k]
        }
    };
    let operator = hamiltonian.shifted(c);
    let gap = spectral_gap(&operator, None)?;
    Ok(QuarticConstraint { operator, gap, c })
}

/// `p^2 + V(q)` on the interior nodes of `grid`.
///
/// Logs a warning when the reference zero mode is not negligible at the
/// walls.
pub fn mixed_constraint(grid: &GridSpec) -> Result<OperatorMatrix> {
    grid.validate()?;
    let amplitude = boundary_amplitude(grid);
    if amplitude > BOUNDARY_AMPLITUDE_LIMIT {
        log::warn!(
            "box [{}, {}] too small: zero mode amplitude {amplitude:e} at the wall exceeds {BOUNDARY_AMPLITUDE_LIMIT:e}",
            grid.q_min,
            grid.q_max
        );
    }
    build_grid_operator(1.0, mixed_potential, grid)
}

/// Largest value of the reference zero mode at the two walls.
pub fn boundary_amplitude(grid: &GridSpec) -> f64 {
    mixed_zero_mode(grid.q_min).max(mixed_zero_mode(grid.q_max))
}

/// The eigenpair nearest zero of a grid constraint compared to a reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroModeReport {
    /// Eigenvalue nearest zero; also the residual `||Phi v||` of its unit
    /// eigenvector.
    pub eigenvalue: f64,
    /// Position of that eigenvalue in the ascending spectrum.
    pub index: usize,
    /// `|<v|ref>|` with the reference samples normalized on the grid.
    pub overlap: f64,
    /// Distance to the next eigenvalue above.
    pub gap_above: f64,
    pub grid_spacing: f64,
}

pub fn zero_mode_report<R: Fn(f64) -> f64>(op: &OperatorMatrix, reference: R) -> Result<ZeroModeReport> {
    let grid = match op.basis() {
        BasisSpec::Grid { grid } => *grid,
        _ => return Err(Error::InvalidBasis("zero-mode reports need a Dirichlet grid operator".into())),
    };
    let nodes = grid.interior_nodes();
    let samples: Vec<f64> = nodes.iter().map(|&q| reference(q)).collect();
    let norm = samples.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::InvalidParameter("reference function vanishes on the grid".into()));
    }
    let index = index_nearest(op, 0.0)?;
    let (eigenvalue, v) = eigenpair(op, index)?;
    let overlap = v
        .components
        .iter()
        .zip(&samples)
        .map(|(c, s)| c * (s / norm))
        .sum::<crate::C64>()
        .norm()
        .min(1.0);
    let gap_above = if index + 1 < op.dim() { eigenpair_value(op, index + 1)? - eigenvalue } else { f64::INFINITY };
    Ok(ZeroModeReport { eigenvalue, index, overlap, gap_above, grid_spacing: grid.spacing() })
}

fn eigenpair_value(op: &OperatorMatrix, index: usize) -> Result<f64> {
    Ok(crate::operator::eigenvalues_in_range(op, index..index + 1)?[0])
}

/// Mixed-constraint zero mode on the symmetric box `[-half_width, half_width]`.
pub fn mixed_zero_mode_report(half_width: f64, spacing: f64) -> Result<ZeroModeReport> {
    let grid = GridSpec::with_spacing(-half_width, half_width, spacing)?;
    zero_mode_report(&mixed_constraint(&grid)?, mixed_zero_mode)
}

/// Convergence of the discrete zero eigenvalue under grid refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementStudy {
    pub spacings: Vec<f64>,
    pub reports: Vec<ZeroModeReport>,
    /// Log-log slope of `|eigenvalue|` against `h`.
    pub slope: f64,
}

pub fn refinement_study(half_width: f64, spacings: &[f64]) -> Result<RefinementStudy> {
    if spacings.len() < 2 {
        return Err(Error::InvalidParameter("a refinement study needs at least two spacings".into()));
    }
    let reports = spacings
        .par_iter()
        .map(|&h| mixed_zero_mode_report(half_width, h))
        .collect::<Result<Vec<_>>>()?;
    let mags: Vec<f64> = reports.iter().map(|r| r.eigenvalue.abs()).collect();
    Ok(RefinementStudy { spacings: spacings.to_vec(), slope: loglog_slope(spacings, &mags), reports })
}

/// Sensitivity of the gap above the zero mode to the box size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStudy {
    pub half_widths: Vec<f64>,
    pub gaps: Vec<f64>,
    /// `max |gap_i / gap_0 - 1|`.
    pub relative_spread: f64,
    /// Eigenvalues below the continuum edge 1 in the first box, zero mode
    /// included.
    pub levels_below_edge: usize,
}

pub fn box_study(half_widths: &[f64], spacing: f64) -> Result<BoxStudy> {
    if half_widths.is_empty() {
        return Err(Error::InvalidParameter("box study needs at least one box".into()));
    }
    let gaps = half_widths
        .par_iter()
        .map(|&w| mixed_zero_mode_report(w, spacing).map(|r| r.gap_above))
        .collect::<Result<Vec<_>>>()?;
    let relative_spread = gaps.iter().map(|g| (g / gaps[0] - 1.0).abs()).fold(0.0, f64::max);
    let grid = GridSpec::with_spacing(-half_widths[0], half_widths[0], spacing)?;
    let op = mixed_constraint(&grid)?;
    let levels_below_edge = op.as_tridiagonal().map(|t| t.count_below(1.0)).unwrap_or(0);
    Ok(BoxStudy { half_widths: half_widths.to_vec(), gaps, relative_spread, levels_below_edge })
}
