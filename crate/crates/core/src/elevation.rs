//! The elevated Lagrange multiplier: the `(Pi, Lambda)` sector, the tensor
//! factorization `E = E(-delta < Phi < delta) E(-delta < Pi < delta)` and the
//! collapse of the sector kernel to rank one as `delta -> 0`.
//!
//! `Pi` appears twice. Analytically, sector coherent states have amplitudes
//! `<k|pi,lambda> = pi^(-1/4) exp[-(k-pi)^2/2 - i k lambda]` and the window
//! kernel is a one-dimensional integral. As a matrix, `Pi` is the Fourier
//! momentum operator on a periodic `lambda` grid, which is what the product
//! space computations use.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{
    build_operator, coherent_state, eigendecompose, kron, spectral_norm, BasisSpec, GridSpec, OperatorExpr,
    OperatorMatrix, PhasePoint, Polynomial, Spectrum, StateVector,
};
use crate::quadrature::{gauss_legendre, loglog_slope};
use crate::reparam::{reduced_closed_form, KernelMethod, KernelValue, QuadratureSpec};
use crate::C64;

/// Largest product-space dimension handled.
pub const MAX_PRODUCT_DIM: usize = 1 << 14;

/// Largest product space assembled densely by [`factorization_residual_dense`].
pub const MAX_DENSE_PRODUCT_DIM: usize = 1024;

/// Mixing weight of `Pi` in the joint operator `Phi (x) 1 + mu 1 (x) Pi`;
/// any value keeping the sums `phi_i + mu pi_j` distinct works.
const JOINT_MIX: f64 = 0.739_085_133_215_160_6;

/// Coherent-state label of the multiplier sector.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SectorPoint {
    pub pi: f64,
    pub lambda: f64,
}

impl SectorPoint {
    pub fn new(pi: f64, lambda: f64) -> Self {
        Self { pi, lambda }
    }

    fn as_phase_point(&self) -> PhasePoint {
        PhasePoint::new(self.pi, self.lambda)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pi.is_finite() && self.lambda.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("sector point has non-finite labels: {self:?}")))
        }
    }
}

/// `<pi'',lambda''|E(-delta < Pi < delta)|pi',lambda'>
///  = pi^{-1/2} int_{-delta}^{delta} e^{-(k-pi'')^2/2 - (k-pi')^2/2 + ik(lambda''-lambda')} dk`.
pub fn pi_sector_kernel(a: &SectorPoint, b: &SectorPoint, delta: f64, quad: &QuadratureSpec) -> Result<KernelValue> {
    a.validate()?;
    b.validate()?;
    quad.validate()?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let integrand = |k: f64| {
        C64::from_polar(
            (-0.5 * (k - a.pi).powi(2) - 0.5 * (k - b.pi).powi(2)).exp(),
            k * (a.lambda - b.lambda),
        )
    };
    let full = gauss_legendre(quad.node_count).mapped(-delta, delta).sum(integrand);
    let coarse = gauss_legendre(quad.node_count / 2).mapped(-delta, delta).sum(integrand);
    let norm = PI.sqrt();
    let value = full / norm;
    let err = (full - coarse).norm() / norm;
    let converged = err <= quad.tolerance.max(quad.tolerance * value.norm());
    if !converged {
        log::warn!("sector kernel error estimate {err:e} above {:e}", quad.tolerance);
    }
    Ok(KernelValue { value, estimated_error: err, method: KernelMethod::Quadrature, converged })
}

/// Periodic `lambda` grid with `points` nodes of spacing `h`, centred on 0.
pub fn sector_grid(points: usize, spacing: f64) -> Result<GridSpec> {
    let half = 0.5 * points as f64 * spacing;
    GridSpec::new(-half, -half + (points - 1) as f64 * spacing, points)
}

/// Fourier wavenumbers `2 pi j/(M h)`, `j = -M/2+1, ..., M/2`, in the
/// order of the DFT index.
fn wavenumbers(grid: &GridSpec) -> Vec<f64> {
    let m = grid.points as i64;
    let period = grid.points as f64 * grid.spacing();
    (0..m)
        .map(|j| {
            let shifted = if j > m / 2 { j - m } else { j };
            TAU * shifted as f64 / period
        })
        .collect()
}

/// Spectral momentum operator `sum_j k_j |e_j><e_j|` on a periodic grid,
/// with plane waves `e_j(x_n) = e^{i k_j x_n}/sqrt(M)`.
pub fn periodic_momentum(grid: &GridSpec) -> Result<OperatorMatrix> {
    grid.validate()?;
    let m = grid.points;
    let ks = wavenumbers(grid);
    let xs: Vec<f64> = (0..m).map(|n| grid.node(n)).collect();
    let waves = DMatrix::from_fn(m, m, |n, j| C64::from_polar(1.0 / (m as f64).sqrt(), ks[j] * xs[n]));
    let mut scaled = waves.clone();
    for (j, k) in ks.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*k);
    }
    OperatorMatrix::hermitian(&scaled * waves.adjoint(), BasisSpec::Periodic { grid: *grid })
}

/// Sector coherent state sampled on a periodic grid.
pub fn sector_state(point: &SectorPoint, grid: &GridSpec) -> Result<StateVector> {
    coherent_state(&point.as_phase_point(), &BasisSpec::Periodic { grid: *grid })
}

/// Largest disagreement between the grid and analytic sector on the
/// overlap `<a|b>` and the matrix element `<a|Pi|b> = <a|b> (pibar + i dlambda/2)`.
pub fn sector_observable_discrepancy(points: &[SectorPoint], grid: &GridSpec) -> Result<f64> {
    let pi_op = periodic_momentum(grid)?;
    let states = points.iter().map(|p| sector_state(p, grid)).collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for (a, sa) in points.iter().zip(&states) {
        for (b, sb) in points.iter().zip(&states) {
            let overlap = reduced_closed_form(&a.as_phase_point(), &b.as_phase_point());
            let element = overlap * C64::new(0.5 * (a.pi + b.pi), 0.5 * (a.lambda - b.lambda));
            worst = worst.max((sa.inner(sb) - overlap).norm());
            worst = worst.max((sa.inner(&pi_op.apply(sb)?) - element).norm());
        }
    }
    Ok(worst)
}

fn window_indices(values: &[f64], delta: f64) -> Vec<usize> {
    (0..values.len()).filter(|&i| values[i].abs() < delta).collect()
}

/// Outcome of the product-space factorization check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub system_dim: usize,
    pub sector_dim: usize,
    /// `||E_total - E_Phi (x) E_Pi||`.
    pub residual: f64,
    pub system_rank: usize,
    pub sector_rank: usize,
    pub joint_rank: usize,
}

fn check_factors(phi: &OperatorMatrix, pi_op: &OperatorMatrix, delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let dim = phi.dim() * pi_op.dim();
    if dim > MAX_PRODUCT_DIM {
        return Err(Error::InvalidParameter(format!(
            "product space of dimension {dim} exceeds {MAX_PRODUCT_DIM}; shrink the system or sector factor"
        )));
    }
    Ok(())
}

/// Joint-window projector of the product space, in block form.
///
/// In the eigenbasis `{|m>}` of `Phi`, the joint operator
/// `Phi (x) 1 + mu 1 (x) Pi` is block diagonal with blocks `phi_m + mu Pi`.
/// Each block is diagonalized on its own and the eigenvectors whose
/// `(phi_m, pi)` pair lies in the joint window are kept.
struct JointProjector {
    phi: Spectrum,
    blocks: Vec<DMatrix<C64>>,
    rank: usize,
}

fn joint_projector(phi: &OperatorMatrix, pi_op: &OperatorMatrix, delta: f64) -> Result<JointProjector> {
    let phi_spec = eigendecompose(phi)?;
    let pi_dense = pi_op.to_dense().into_owned();
    let m = pi_op.dim();
    let blocks: Vec<(DMatrix<C64>, usize)> = phi_spec
        .values
        .par_iter()
        .map(|&phi_m| {
            let block = DMatrix::<C64>::identity(m, m) * C64::new(phi_m, 0.0) + &pi_dense * C64::new(JOINT_MIX, 0.0);
            let op = OperatorMatrix::hermitian(block, *pi_op.basis())?;
            let s = eigendecompose(&op)?;
            let keep: Vec<usize> = (0..s.len())
                .filter(|&j| phi_m.abs() < delta && ((s.values[j] - phi_m) / JOINT_MIX).abs() < delta)
                .collect();
            let rank = keep.len();
            Ok((s.projector(keep), rank))
        })
        .collect::<Result<Vec<_>>>()?;
    let rank = blocks.iter().map(|b| b.1).sum();
    Ok(JointProjector { phi: phi_spec, blocks: blocks.into_iter().map(|b| b.0).collect(), rank })
}

/// `||E_total - E_Phi (x) E_Pi||` with `E_total` the joint-window projector
/// of the product space.
///
/// Both sides are block diagonal in the `Phi` eigenbasis (the change of
/// basis is unitary), so the spectral norm is the largest block norm.
pub fn factorization_residual(phi: &OperatorMatrix, pi_op: &OperatorMatrix, delta: f64) -> Result<FactorizationReport> {
    check_factors(phi, pi_op, delta)?;
    let joint = joint_projector(phi, pi_op, delta)?;
    let pi_spec = eigendecompose(pi_op)?;
    let pi_keep = window_indices(&pi_spec.values, delta);
    let e_pi = pi_spec.projector(pi_keep.iter().copied());
    let zero = DMatrix::<C64>::zeros(pi_op.dim(), pi_op.dim());
    let residual = joint
        .phi
        .values
        .par_iter()
        .zip(&joint.blocks)
        .map(|(phi_m, block)| {
            let factor = if phi_m.abs() < delta { &e_pi } else { &zero };
            spectral_norm(&(block - factor))
        })
        .reduce(|| 0.0, f64::max);
    Ok(FactorizationReport {
        system_dim: phi.dim(),
        sector_dim: pi_op.dim(),
        residual,
        system_rank: window_indices(&joint.phi.values, delta).len(),
        sector_rank: pi_keep.len(),
        joint_rank: joint.rank,
    })
}

/// Same check with the product space assembled densely and the joint
/// operator diagonalized as a whole; each eigenvector is classified by its
/// expectation values of `Phi (x) 1` and `1 (x) Pi`.
pub fn factorization_residual_dense(
    phi: &OperatorMatrix,
    pi_op: &OperatorMatrix,
    delta: f64,
) -> Result<FactorizationReport> {
    check_factors(phi, pi_op, delta)?;
    let (n, m) = (phi.dim(), pi_op.dim());
    if n * m > MAX_DENSE_PRODUCT_DIM {
        return Err(Error::InvalidParameter(format!(
            "dense product space limited to {MAX_DENSE_PRODUCT_DIM}, got {}",
            n * m
        )));
    }
    let phi_d = phi.to_dense().into_owned();
    let pi_d = pi_op.to_dense().into_owned();
    let big_phi = kron(&phi_d, &DMatrix::identity(m, m));
    let big_pi = kron(&DMatrix::identity(n, n), &pi_d);
    let joint = OperatorMatrix::hermitian(&big_phi + &big_pi * C64::new(JOINT_MIX, 0.0), BasisSpec::Fock { dim: n * m })?;
    let s = eigendecompose(&joint)?;
    let keep: Vec<usize> = (0..s.len())
        .filter(|&j| {
            let v = s.vectors.column(j);
            let ephi = v.dotc(&(&big_phi * v)).re;
            let epi = v.dotc(&(&big_pi * v)).re;
            ephi.abs() < delta && epi.abs() < delta
        })
        .collect();
    let joint_rank = keep.len();
    let e_total = s.projector(keep);
    let phi_s = eigendecompose(phi)?;
    let pi_s = eigendecompose(pi_op)?;
    let phi_keep = window_indices(&phi_s.values, delta);
    let pi_keep = window_indices(&pi_s.values, delta);
    let product = kron(&phi_s.projector(phi_keep.iter().copied()), &pi_s.projector(pi_keep.iter().copied()));
    Ok(FactorizationReport {
        system_dim: n,
        sector_dim: m,
        residual: spectral_norm(&(e_total - product)),
        system_rank: phi_keep.len(),
        sector_rank: pi_keep.len(),
        joint_rank,
    })
}

/// Labels of one propagator matrix element on the product space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductLabels {
    pub system_left: PhasePoint,
    pub sector_left: SectorPoint,
    pub system_right: PhasePoint,
    pub sector_right: SectorPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagatorFactorization {
    pub labels: Vec<ProductLabels>,
    /// `|joint - system factor * sector factor|` per label set.
    pub discrepancies: Vec<f64>,
    pub max_discrepancy: f64,
}

/// Compares `<a, alpha|e^{-iHT} E_total|b, beta>` on the product space with
/// `<a|e^{-iHT} E_Phi|b> <alpha|E_Pi|beta>`, where `H = P^2 + Q^2` acts on
/// the Fock system factor only. Label pairs are drawn from `seed`.
pub fn propagator_factorization(
    phi: &OperatorMatrix,
    sector: &GridSpec,
    delta: f64,
    time: f64,
    samples: usize,
    seed: u64,
) -> Result<PropagatorFactorization> {
    let n = match phi.basis() {
        BasisSpec::Fock { dim } => *dim,
        _ => return Err(Error::InvalidBasis("the system factor must be a Fock-basis operator".into())),
    };
    let pi_op = periodic_momentum(sector)?;
    check_factors(phi, &pi_op, delta)?;
    let joint = joint_projector(phi, &pi_op, delta)?;

    let hamiltonian = build_operator(
        &OperatorExpr::Polynomial(Polynomial::new().term(1.0, "PP").term(1.0, "QQ")),
        &BasisSpec::Fock { dim: n },
    )?;
    let h = eigendecompose(&hamiltonian)?;
    let evolution = h.function(|e| C64::from_polar(1.0, -e * time));
    let phi_window = joint.phi.projector(window_indices(&joint.phi.values, delta));
    let pi_spec = eigendecompose(&pi_op)?;
    let e_pi = pi_spec.projector(window_indices(&pi_spec.values, delta));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<ProductLabels> = (0..samples)
        .map(|_| {
            let mut sys = || PhasePoint::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let (system_left, system_right) = (sys(), sys());
            let mut sec = || SectorPoint::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let (sector_left, sector_right) = (sec(), sec());
            ProductLabels { system_left, sector_left, system_right, sector_right }
        })
        .collect();

    let fock = BasisSpec::Fock { dim: n };
    let discrepancies = labels
        .iter()
        .map(|l| {
            let a = coherent_state(&l.system_left, &fock)?.components;
            let b = coherent_state(&l.system_right, &fock)?.components;
            let alpha = sector_state(&l.sector_left, sector)?.components;
            let beta = sector_state(&l.sector_right, sector)?.components;

            // product space: expand b in the Phi eigenbasis, apply each block
            let left = (&evolution * &joint.phi.vectors).adjoint() * &a;
            let coeff = joint.phi.vectors.adjoint() * &b;
            let joint_value: C64 = (0..n)
                .map(|m| left[m].conj() * coeff[m] * alpha.dotc(&(&joint.blocks[m] * &beta)))
                .sum();

            let system = a.dotc(&(&evolution * (&phi_window * &b)));
            let sector_factor = alpha.dotc(&(&e_pi * &beta));
            Ok((joint_value - system * sector_factor).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_discrepancy = discrepancies.iter().copied().fold(0.0, f64::max);
    Ok(PropagatorFactorization { labels, discrepancies, max_discrepancy })
}

/// Singular-value ratios of sampled sector kernel matrices along a delta
/// sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOneReport {
    pub delta_values: Vec<f64>,
    /// `sigma_2 / sigma_1` per delta; zero when a single point is sampled.
    pub sigma_ratio: Vec<f64>,
    /// Log-log slope of the ratio against delta; absent for a single point.
    pub fitted_slope: Option<f64>,
    /// Largest quadrature error of any kernel entry.
    pub max_error: f64,
}

impl RankOneReport {
    /// Ratios do not increase as delta decreases along the sweep.
    pub fn is_monotone(&self) -> bool {
        self.sigma_ratio.windows(2).all(|w| w[1] <= w[0] + 1e-15)
    }
}

/// Sector kernel matrix `M_jk = <point_j|E(-delta < Pi < delta)|point_k>`.
pub fn sector_kernel_matrix(points: &[SectorPoint], delta: f64, quad: &QuadratureSpec) -> Result<(DMatrix<C64>, f64)> {
    let n = points.len();
    let mut m = DMatrix::zeros(n, n);
    let mut err: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let v = pi_sector_kernel(&points[i], &points[j], delta, quad)?;
            m[(i, j)] = v.value;
            m[(j, i)] = v.value.conj();
            err = err.max(v.estimated_error);
        }
    }
    Ok((m, err))
}

pub fn rank_one_report(points: &[SectorPoint], deltas: &[f64], quad: &QuadratureSpec) -> Result<RankOneReport> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("rank-one report needs sample points".into()));
    }
    if deltas.len() < 3 || deltas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter("need at least three strictly decreasing delta values".into()));
    }
    let rows = deltas
        .par_iter()
        .map(|&d| {
            let (m, err) = sector_kernel_matrix(points, d, quad)?;
            let sv = m.singular_values();
            let mut s: Vec<f64> = sv.iter().copied().collect();
            s.sort_by(|a, b| b.total_cmp(a));
            if !(s[0] > 0.0) {
                return Err(Error::InvalidParameter("sector kernel matrix vanishes: degenerate sample set".into()));
            }
            Ok((if s.len() > 1 { s[1] / s[0] } else { 0.0 }, err))
        })
        .collect::<Result<Vec<_>>>()?;
    let sigma_ratio: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let max_error = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let fitted_slope = (points.len() > 1).then(|| loglog_slope(deltas, &sigma_ratio));
    let report = RankOneReport { delta_values: deltas.to_vec(), sigma_ratio, fitted_slope, max_error };
    if !report.is_monotone() {
        log::warn!("sigma ratio is not monotone along the delta sweep: {:?}", report.sigma_ratio);
    }
    Ok(report)
}

/// Seeded sector points, uniform in the square `[-1, 1]^2`.
pub fn random_sector_points(count: usize, seed: u64) -> Vec<SectorPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| SectorPoint::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use crate::constraint::{quartic_constraint, SnapPolicy};

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn coincident_kernel_is_erf() {
        for lambda in [0.0, 1.7, -4.2] {
            let p = SectorPoint::new(0.0, lambda);
            let v = pi_sector_kernel(&p, &p, 0.1, &q()).unwrap();
            assert!((v.value.re - 0.112_462_916_018_284_9).abs() < 1e-14);
            assert!(v.value.im.abs() < 1e-16);
        }
    }

    #[test]
    fn kernel_is_hermitian() {
        let a = SectorPoint::new(0.3, -0.8);
        let b = SectorPoint::new(-0.6, 0.4);
        let ab = pi_sector_kernel(&a, &b, 0.2, &q()).unwrap().value;
        let ba = pi_sector_kernel(&b, &a, 0.2, &q()).unwrap().value;
        assert!((ab - ba.conj()).norm() < 1e-16);
    }

    #[test]
    fn small_delta_factorizes() {
        let a = SectorPoint::new(0.7, 0.0);
        let b = SectorPoint::new(-0.4, 0.0);
        let delta = 1e-4;
        let v = pi_sector_kernel(&a, &b, delta, &q()).unwrap().value / (2.0 * delta);
        let expect = (-0.5 * 0.49 - 0.5 * 0.16f64).exp() / PI.sqrt();
        assert!((v.re - expect).abs() < 1e-8);
    }

    #[test]
    fn periodic_momentum_on_plane_wave() {
        let grid = sector_grid(32, 0.3).unwrap();
        let pi_op = periodic_momentum(&grid).unwrap();
        let k = TAU * 3.0 / (32.0 * 0.3);
        let wave = DVector::from_iterator(32, (0..32).map(|n| C64::from_polar(1.0, k * grid.node(n))));
        let v = StateVector::new(wave.clone(), BasisSpec::Periodic { grid }).unwrap();
        let out = pi_op.apply(&v).unwrap().components;
        assert!((out - wave * C64::new(k, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn grid_sector_matches_analytic_observables() {
        let grid = sector_grid(128, 0.2).unwrap();
        let pts = random_sector_points(6, 11);
        assert!(sector_observable_discrepancy(&pts, &grid).unwrap() < 1e-8);
    }

    #[test]
    fn block_and_dense_routes_agree() {
        let phi = quartic_constraint(16, SnapPolicy::SnapToLevel(0)).unwrap().operator;
        let pi_op = periodic_momentum(&sector_grid(32, 0.4).unwrap()).unwrap();
        for delta in [0.3, 5.0] {
            let block = factorization_residual(&phi, &pi_op, delta).unwrap();
            let dense = factorization_residual_dense(&phi, &pi_op, delta).unwrap();
            assert!(block.residual < 1e-12 && dense.residual < 1e-11, "{block:?} {dense:?}");
            assert_eq!(block.joint_rank, dense.joint_rank);
            assert_eq!(block.joint_rank, block.system_rank * block.sector_rank);
        }
    }

    #[test]
    fn oversized_product_rejected() {
        let phi = OperatorMatrix::from_diagonal(&vec![0.0; 200]);
        let pi_op = periodic_momentum(&sector_grid(128, 0.2).unwrap()).unwrap();
        assert!(factorization_residual(&phi, &pi_op, 0.1).is_err());
    }

    #[test]
    fn rank_one_collapse() {
        let pts = [SectorPoint::new(0.0, 0.0), SectorPoint::new(1.0, 0.0), SectorPoint::new(0.0, 1.0), SectorPoint::new(1.0, 1.0)];
        let r = rank_one_report(&pts, &[0.2, 0.1, 0.05], &q()).unwrap();
        assert!(r.is_monotone());
        assert!((r.fitted_slope.unwrap() - 2.0).abs() < 0.3, "{r:?}");
    }

    #[test]
    fn rescaled_points_approach_rank_one() {
        let base = [SectorPoint::new(0.0, 0.0), SectorPoint::new(1.0, 0.0), SectorPoint::new(0.0, 1.0), SectorPoint::new(1.0, 1.0)];
        let mut last = f64::INFINITY;
        for scale in [1.0, 0.1, 0.01] {
            let pts: Vec<SectorPoint> = base.iter().map(|p| SectorPoint::new(p.pi * scale, p.lambda * scale)).collect();
            let r = rank_one_report(&pts, &[0.8, 0.6, 0.4], &q()).unwrap();
            assert!(r.sigma_ratio[0] < last);
            last = r.sigma_ratio[0];
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn single_point_is_rank_one() {
        let r = rank_one_report(&[SectorPoint::new(0.2, 0.3)], &[0.2, 0.1, 0.05], &q()).unwrap();
        assert!(r.sigma_ratio.iter().all(|&x| x == 0.0));
        assert!(r.fitted_slope.is_none());
    }
}
