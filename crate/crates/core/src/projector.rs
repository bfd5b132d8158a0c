//! Physical-subspace projectors, their averaged approximations, spectral
//! gaps and the interval-average error bound `||F - E|| <= 1/(L Delta)`.
//!
//! Every averaged projector `F = int exp(-i xi Phi) w(xi) dxi` is a function
//! of `Phi`, so the primary route evaluates the scalar filter on the
//! eigenvalues: `F = sum_m g(phi_m) |m><m|`. The secondary route,
//! [`averaged_projector_by_group_quadrature`], integrates the group elements
//! `exp(-i xi Phi)` directly without touching the eigendecomposition; the two
//! serve as each other's oracle.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expm::unitary_group_element;
use crate::operator::{eigendecompose, hermitian_norm, operator_norm, spectral_norm, OperatorMatrix, Spectrum};
use crate::quadrature::gauss_legendre;
use crate::special::{sinc, sine_integral};
use crate::C64;

/// Default zero tolerance relative to `||Phi||`.
pub const DEFAULT_ZERO_RTOL: f64 = 1e-8;

/// Integer-spectrum check for the compact (Haar) average.
pub const INTEGER_SPECTRUM_TOL: f64 = 1e-8;

fn default_refinements() -> u32 {
    20
}

/// Recipe for turning a constraint operator into a projector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProjectorScheme {
    /// Exact spectral window `|phi| < delta`.
    Spectral { delta: f64 },
    /// `int_{-Xi}^{Xi} exp(-i xi Phi) sin(delta xi)/(pi xi) dxi`.
    ///
    /// With a `tolerance`, `Xi` is doubled (at most `max_refinements` times)
    /// until the truncation tail bound and the quadrature error are below it.
    Sinc {
        delta: f64,
        xi_cutoff: f64,
        #[serde(default)]
        tolerance: Option<f64>,
        #[serde(default = "default_refinements")]
        max_refinements: u32,
    },
    /// Uniform average over `xi in [-L, L]`.
    Interval {
        #[serde(rename = "L", alias = "half_width")]
        half_width: f64,
    },
    /// Compact average over `xi in [0, 2 pi)` with equally spaced nodes.
    Haar { nodes: usize },
}

impl ProjectorScheme {
    pub fn sinc(delta: f64, xi_cutoff: f64) -> Self {
        ProjectorScheme::Sinc { delta, xi_cutoff, tolerance: None, max_refinements: default_refinements() }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match *self {
            ProjectorScheme::Spectral { delta } => {
                if delta >= 0.0 && delta.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("window must be >= 0, got {delta}")))
                }
            }
            ProjectorScheme::Sinc { delta, xi_cutoff, tolerance, .. } => {
                positive("delta", delta)?;
                positive("xi_cutoff", xi_cutoff)?;
                if let Some(tol) = tolerance {
                    positive("tolerance", tol)?;
                }
                Ok(())
            }
            ProjectorScheme::Interval { half_width } => positive("L", half_width),
            ProjectorScheme::Haar { nodes } if nodes == 0 => {
                Err(Error::InvalidParameter("haar average needs at least one node".into()))
            }
            ProjectorScheme::Haar { .. } => Ok(()),
        }
    }
}

/// Resolves an optional absolute zero tolerance to `1e-8 ||Phi||`.
pub fn zero_tolerance(op: &OperatorMatrix, explicit: Option<f64>) -> Result<f64> {
    match explicit {
        Some(eps) if eps > 0.0 => Ok(eps),
        Some(eps) => Err(Error::InvalidParameter(format!("zero tolerance must be positive, got {eps}"))),
        None => Ok((DEFAULT_ZERO_RTOL * operator_norm(op)?).max(f64::MIN_POSITIVE)),
    }
}

#[derive(Debug, Clone)]
pub struct SpectralProjector {
    pub matrix: OperatorMatrix,
    pub rank: usize,
    /// Eigenvalues whose eigenvectors span the range.
    pub selected: Vec<f64>,
}

/// `E = sum_{|phi_m| < max(delta, eps_zero)} |m><m|`.
///
/// An empty window yields the rank-0 projector and a logged warning.
pub fn spectral_projector(op: &OperatorMatrix, window: f64, zero_tol: Option<f64>) -> Result<SpectralProjector> {
    if !(window >= 0.0) {
        return Err(Error::InvalidParameter(format!("window must be >= 0, got {window}")));
    }
    let eps = zero_tolerance(op, zero_tol)?;
    let spectrum = eigendecompose(op)?;
    Ok(projector_from_spectrum(&spectrum, window.max(eps)))
}

pub(crate) fn projector_from_spectrum(spectrum: &Spectrum, cut: f64) -> SpectralProjector {
    let idx: Vec<usize> = (0..spectrum.len()).filter(|&m| spectrum.values[m].abs() < cut).collect();
    if idx.is_empty() {
        log::warn!("no eigenvalue inside |phi| < {cut:e}: the physical subspace is empty");
    }
    let selected = idx.iter().map(|&m| spectrum.values[m]).collect();
    let rank = idx.len();
    let matrix = OperatorMatrix::dense(spectrum.projector(idx), spectrum.basis)
        .expect("projector dimension matches its spectrum");
    SpectralProjector { matrix, rank, selected }
}

/// Diagnostics of the truncated sinc average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SincDiagnostics {
    /// Cutoff actually used, after any refinement.
    pub xi_cutoff: f64,
    pub refinements: u32,
    /// Largest per-eigenvalue quadrature error estimate.
    pub quadrature_error: f64,
    /// `(2/pi) / (Xi min_m ||phi_m| - delta|)`, bounding the truncation error
    /// of every filter value.
    pub tail_bound: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct AveragedProjector {
    pub matrix: OperatorMatrix,
    pub eigenvalues: Vec<f64>,
    /// Filter value `g(phi_m)` for each eigenvalue.
    pub filter: Vec<C64>,
    pub sinc: Option<SincDiagnostics>,
}

/// Interval filter `sin(L phi)/(L phi)`.
pub fn interval_filter(half_width: f64, phi: f64) -> f64 {
    sinc(half_width * phi)
}

/// `(1/n) sum_j exp(-i 2 pi j phi / n)`.
pub fn haar_filter(nodes: usize, phi: f64) -> C64 {
    let n = nodes as f64;
    (0..nodes)
        .map(|j| C64::new(0.0, -TAU * j as f64 * phi / n).exp())
        .sum::<C64>()
        / n
}

/// Truncated sinc filter and its quadrature error:
/// `int_{-Xi}^{Xi} e^{-i xi phi} sin(delta xi)/(pi xi) dxi
///  = (Si((delta+phi) Xi) + Si((delta-phi) Xi)) / pi`.
pub fn sinc_filter(delta: f64, xi_cutoff: f64, phi: f64) -> (f64, f64, bool) {
    let a = sine_integral((delta + phi) * xi_cutoff);
    let b = sine_integral((delta - phi) * xi_cutoff);
    ((a.re() + b.re()) / PI, (a.error + b.error) / PI, a.converged && b.converged)
}

fn sinc_tail_bound(delta: f64, xi_cutoff: f64, eigenvalues: &[f64]) -> f64 {
    let dist = eigenvalues.iter().map(|p| (p.abs() - delta).abs()).fold(f64::INFINITY, f64::min);
    if dist == 0.0 {
        f64::INFINITY
    } else {
        2.0 / (PI * xi_cutoff * dist)
    }
}

fn check_integer_spectrum(values: &[f64]) -> Result<()> {
    for &v in values {
        let offset = (v - v.round()).abs();
        if offset > INTEGER_SPECTRUM_TOL {
            return Err(Error::NonIntegerSpectrum { eigenvalue: v, offset });
        }
    }
    Ok(())
}

/// Averaged projector `F = g(Phi)` for the requested scheme.
pub fn averaged_projector(op: &OperatorMatrix, scheme: &ProjectorScheme) -> Result<AveragedProjector> {
    scheme.validate()?;
    let spectrum = eigendecompose(op)?;
    averaged_from_spectrum(&spectrum, scheme)
}

pub(crate) fn averaged_from_spectrum(spectrum: &Spectrum, scheme: &ProjectorScheme) -> Result<AveragedProjector> {
    let values = &spectrum.values;
    let mut sinc_diag = None;
    let filter: Vec<C64> = match *scheme {
        ProjectorScheme::Spectral { delta } => values
            .iter()
            .map(|&p| C64::new(if p.abs() < delta { 1.0 } else { 0.0 }, 0.0))
            .collect(),
        ProjectorScheme::Interval { half_width } => {
            values.iter().map(|&p| C64::new(interval_filter(half_width, p), 0.0)).collect()
        }
        ProjectorScheme::Haar { nodes } => {
            check_integer_spectrum(values)?;
            values.iter().map(|&p| haar_filter(nodes, p)).collect()
        }
        ProjectorScheme::Sinc { delta, xi_cutoff, tolerance, max_refinements } => {
            let mut xi = xi_cutoff;
            let mut refinements = 0;
            loop {
                let evals: Vec<(f64, f64, bool)> =
                    values.par_iter().map(|&p| sinc_filter(delta, xi, p)).collect();
                let quad_err = evals.iter().map(|e| e.1).fold(0.0, f64::max);
                let quad_ok = evals.iter().all(|e| e.2);
                let tail = sinc_tail_bound(delta, xi, values);
                let within = match tolerance {
                    Some(tol) => tail <= tol && quad_err <= tol,
                    None => true,
                };
                if (within && quad_ok) || tolerance.is_none() || refinements >= max_refinements {
                    let converged = within && quad_ok;
                    if !converged {
                        log::warn!(
                            "sinc average not converged at Xi = {xi:e}: tail bound {tail:e}, quadrature error {quad_err:e}"
                        );
                    }
                    sinc_diag = Some(SincDiagnostics {
                        xi_cutoff: xi,
                        refinements,
                        quadrature_error: quad_err,
                        tail_bound: tail,
                        converged,
                    });
                    break evals.into_iter().map(|e| C64::new(e.0, 0.0)).collect();
                }
                xi *= 2.0;
                refinements += 1;
            }
        }
    };
    let matrix = OperatorMatrix::dense(spectrum.function_from_values(&filter), spectrum.basis)?;
    Ok(AveragedProjector { matrix, eigenvalues: values.clone(), filter, sinc: sinc_diag })
}

/// Secondary route: integrates `exp(-i xi Phi)` against the scheme's weight
/// with Gauss-Legendre panels (or equal nodes for Haar), using matrix
/// exponentials only. Refuses jobs needing more than `max_nodes` group
/// elements.
pub fn averaged_projector_by_group_quadrature(
    op: &OperatorMatrix,
    scheme: &ProjectorScheme,
    max_nodes: usize,
) -> Result<DMatrix<C64>> {
    scheme.validate()?;
    op.require_hermitian()?;
    let phi = op.to_dense().into_owned();
    let n = phi.nrows();
    match *scheme {
        ProjectorScheme::Spectral { .. } => Err(Error::Unsupported(
            "the sharp spectral window is not a group average".into(),
        )),
        ProjectorScheme::Haar { nodes } => {
            if nodes > max_nodes {
                return Err(Error::Unsupported(format!("{nodes} haar nodes exceed the budget {max_nodes}")));
            }
            let step = unitary_group_element(&phi, TAU / nodes as f64);
            let mut u = DMatrix::<C64>::identity(n, n);
            let mut acc = DMatrix::<C64>::zeros(n, n);
            for _ in 0..nodes {
                acc += &u;
                u = &step * &u;
            }
            Ok(acc / C64::new(nodes as f64, 0.0))
        }
        ProjectorScheme::Interval { half_width } => {
            let w = move |_xi: f64| 1.0 / (2.0 * half_width);
            panel_quadrature(&phi, -half_width, half_width, w, max_nodes)
        }
        ProjectorScheme::Sinc { delta, xi_cutoff, .. } => {
            let w = move |xi: f64| delta / PI * sinc(delta * xi);
            panel_quadrature(&phi, -xi_cutoff, xi_cutoff, w, max_nodes)
        }
    }
}

const PANEL_NODES: usize = 16;

fn panel_quadrature<W: Fn(f64) -> f64>(
    phi: &DMatrix<C64>,
    a: f64,
    b: f64,
    weight: W,
    max_nodes: usize,
) -> Result<DMatrix<C64>> {
    let n = phi.nrows();
    // panel width keeps each panel's phase excursion below ~2 rad
    let norm1 = (0..n)
        .map(|j| phi.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
        .max(1e-300);
    let panels = (((b - a) * norm1 / 2.0).ceil() as usize).max(1);
    if panels * PANEL_NODES > max_nodes {
        return Err(Error::Unsupported(format!(
            "group quadrature needs {} nodes, budget is {max_nodes}",
            panels * PANEL_NODES
        )));
    }
    let width = (b - a) / panels as f64;
    let rule = gauss_legendre(PANEL_NODES).mapped(0.0, width);
    let local: Vec<DMatrix<C64>> = rule.nodes.iter().map(|&x| unitary_group_element(phi, x)).collect();
    let shift = unitary_group_element(phi, width);
    let mut base = unitary_group_element(phi, a);
    let mut acc = DMatrix::<C64>::zeros(n, n);
    for p in 0..panels {
        let start = a + p as f64 * width;
        let mut panel = DMatrix::<C64>::zeros(n, n);
        for (j, u) in local.iter().enumerate() {
            panel += u * C64::new(rule.weights[j] * weight(start + rule.nodes[j]), 0.0);
        }
        acc += &base * panel;
        base = &base * &shift;
    }
    Ok(acc)
}

/// Structural checks of an averaged projector `F` against `Phi` and the
/// exact projector `E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectorDiagnostics {
    /// `||F^2 - F||`.
    pub idempotence_defect: f64,
    /// `||F - F^dagger||`.
    pub hermiticity_defect: f64,
    /// `||F Phi - Phi F||`.
    pub commutator_norm: f64,
    /// `||F - E||` with `E` the exact zero-eigenvalue projector.
    pub distance_to_exact: f64,
    pub trace: f64,
}

pub fn projector_diagnostics(
    op: &OperatorMatrix,
    f: &OperatorMatrix,
    zero_tol: Option<f64>,
) -> Result<ProjectorDiagnostics> {
    if f.dim() != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), got: f.dim() });
    }
    let phi = op.to_dense().into_owned();
    let fm = f.to_dense().into_owned();
    let e = spectral_projector(op, 0.0, zero_tol)?.matrix.to_dense().into_owned();
    Ok(ProjectorDiagnostics {
        idempotence_defect: spectral_norm(&(&fm * &fm - &fm)),
        hermiticity_defect: spectral_norm(&(&fm - fm.adjoint())),
        commutator_norm: spectral_norm(&(&fm * &phi - &phi * &fm)),
        distance_to_exact: spectral_norm(&(&fm - &e)),
        trace: fm.trace().re,
    })
}

/// Gap structure of a constraint operator around zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    /// `Delta = min |phi_m|` over eigenvalues with `|phi_m| > eps_zero`.
    #[serde(rename = "Delta")]
    pub delta_cap: f64,
    pub zero_multiplicity: usize,
    pub zero_tolerance: f64,
    /// Eigenvalues nearest zero, ordered by magnitude.
    pub spectrum_excerpt: Vec<f64>,
}

const EXCERPT_LEN: usize = 6;

/// Measures `Delta` and the zero multiplicity.
///
/// Tridiagonal grid operators are handled by Sturm counts and never
/// densified.
pub fn spectral_gap(op: &OperatorMatrix, zero_tol: Option<f64>) -> Result<GapReport> {
    let eps = zero_tolerance(op, zero_tol)?;
    if let Some(t) = op.as_tridiagonal() {
        let lo = t.count_below(-eps);
        let hi = t.count_below(eps);
        let window = lo.saturating_sub(EXCERPT_LEN)..(hi + EXCERPT_LEN).min(t.dim());
        return gap_from_spectrum(&t.eigenvalues(window), eps);
    }
    let spectrum = eigendecompose(op)?;
    gap_from_spectrum(&spectrum.values, eps)
}

pub(crate) fn gap_from_spectrum(values: &[f64], eps: f64) -> Result<GapReport> {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let zero = sorted.iter().filter(|v| v.abs() <= eps).count();
    finish_gap(sorted, zero, eps)
}

fn finish_gap(by_magnitude: Vec<f64>, zero: usize, eps: f64) -> Result<GapReport> {
    if zero == 0 {
        return Err(Error::NoZeroEigenvalue {
            nearest: by_magnitude.first().copied().unwrap_or(f64::NAN),
            zero_tolerance: eps,
        });
    }
    let delta_cap = by_magnitude.iter().find(|v| v.abs() > eps).map(|v| v.abs()).unwrap_or(f64::INFINITY);
    let excerpt = by_magnitude.into_iter().take(EXCERPT_LEN).collect();
    Ok(GapReport { delta_cap, zero_multiplicity: zero, zero_tolerance: eps, spectrum_excerpt: excerpt })
}

/// `||F_L - E||` against the bound `1/(L Delta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(rename = "L")]
    pub half_width: f64,
    #[serde(rename = "Delta")]
    pub delta_cap: f64,
    /// Spectral norm of `F_L - E`.
    pub measured_norm: f64,
    /// `max |sin(L phi)/(L phi)|` over the non-zero eigenvalues.
    pub filter_norm: f64,
    /// `|measured_norm - filter_norm|`.
    pub route_discrepancy: f64,
    pub bound: f64,
    pub saturation_ratio: f64,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.measured_norm <= self.bound + 1e-12
    }
}

/// Interval-average bound certificate at one `L`.
pub fn bound_report(op: &OperatorMatrix, half_width: f64, zero_tol: Option<f64>) -> Result<BoundReport> {
    Ok(bound_sweep(op, &[half_width], zero_tol)?.remove(0))
}

/// [`bound_report`] for several `L` sharing one eigendecomposition.
pub fn bound_sweep(op: &OperatorMatrix, half_widths: &[f64], zero_tol: Option<f64>) -> Result<Vec<BoundReport>> {
    let eps = zero_tolerance(op, zero_tol)?;
    let spectrum = eigendecompose(op)?;
    let gap = gap_from_spectrum(&spectrum.values, eps)?;
    if !(gap.delta_cap > 0.0 && gap.delta_cap.is_finite()) {
        return Err(Error::ZeroGap);
    }
    let e = projector_from_spectrum(&spectrum, eps);
    half_widths
        .par_iter()
        .map(|&l| {
            let f = averaged_from_spectrum(&spectrum, &ProjectorScheme::Interval { half_width: l })?;
            let diff = f.matrix.to_dense().into_owned() - e.matrix.to_dense().into_owned();
            let measured = hermitian_norm(&diff);
            let filter_norm = spectrum
                .values
                .iter()
                .filter(|v| v.abs() > eps)
                .map(|&v| interval_filter(l, v).abs())
                .fold(0.0, f64::max);
            let bound = 1.0 / (l * gap.delta_cap);
            Ok(BoundReport {
                half_width: l,
                delta_cap: gap.delta_cap,
                measured_norm: measured,
                filter_norm,
                route_discrepancy: (measured - filter_norm).abs(),
                bound,
                saturation_ratio: measured / bound,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_entries(m: &DMatrix<C64>) -> Vec<C64> {
        (0..m.nrows()).map(|i| m[(i, i)]).collect()
    }

    #[test]
    fn window_selects_zero_eigenvalue() {
        let p = spectral_projector(&OperatorMatrix::from_diagonal(&[0.0, 1.0, -3.0]), 0.5, None).unwrap();
        assert_eq!(p.rank, 1);
        let d = diag_entries(&p.matrix.to_dense());
        assert!((d[0].re - 1.0).abs() < 1e-15 && d[1].norm() < 1e-15 && d[2].norm() < 1e-15);
    }

    #[test]
    fn degenerate_zero_subspace() {
        let p = spectral_projector(&OperatorMatrix::from_diagonal(&[0.0, 0.0, 2.0]), 0.5, None).unwrap();
        assert_eq!(p.rank, 2);
    }

    #[test]
    fn empty_window_gives_rank_zero() {
        let p = spectral_projector(&OperatorMatrix::from_diagonal(&[1.0, 2.0]), 0.5, None).unwrap();
        assert_eq!(p.rank, 0);
        assert!(p.matrix.to_dense().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn interval_filter_on_diagonal() {
        let f = averaged_projector(&OperatorMatrix::from_diagonal(&[0.0, 2.0]), &ProjectorScheme::Interval { half_width: 10.0 })
            .unwrap();
        let d = diag_entries(&f.matrix.to_dense());
        assert!((d[0].re - 1.0).abs() < 1e-15);
        assert!((d[1].re - 20f64.sin() / 20.0).abs() < 1e-15);
        assert!((d[1].re - 0.045_647_262_536_381_4).abs() < 1e-12);
    }

    #[test]
    fn haar_rejects_non_integer_spectrum() {
        let err = averaged_projector(&OperatorMatrix::from_diagonal(&[0.0, 1.5]), &ProjectorScheme::Haar { nodes: 64 })
            .unwrap_err();
        assert!(matches!(err, Error::NonIntegerSpectrum { .. }));
    }

    #[test]
    fn haar_on_number_operator() {
        let phi = OperatorMatrix::from_diagonal(&(0..32).map(|n| n as f64 - 2.0).collect::<Vec<_>>());
        let f = averaged_projector(&phi, &ProjectorScheme::Haar { nodes: 64 }).unwrap();
        let m = f.matrix.to_dense();
        for i in 0..32 {
            for j in 0..32 {
                let expect = if i == 2 && j == 2 { 1.0 } else { 0.0 };
                assert!((m[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn sinc_flags_nonconvergence() {
        let scheme = ProjectorScheme::Sinc { delta: 1.0, xi_cutoff: 1.0, tolerance: Some(1e-9), max_refinements: 3 };
        let f = averaged_projector(&OperatorMatrix::from_diagonal(&[0.0, 5.0]), &scheme).unwrap();
        let diag = f.sinc.unwrap();
        assert!(!diag.converged);
        assert_eq!(diag.refinements, 3);
        assert_eq!(diag.xi_cutoff, 8.0);
    }

    #[test]
    fn sinc_refinement_converges() {
        let scheme = ProjectorScheme::Sinc { delta: 1.0, xi_cutoff: 10.0, tolerance: Some(1e-4), max_refinements: 20 };
        let f = averaged_projector(&OperatorMatrix::from_diagonal(&[0.0, 5.0]), &scheme).unwrap();
        let diag = f.sinc.unwrap();
        assert!(diag.converged);
        assert!(diag.tail_bound <= 1e-4);
        let d = diag_entries(&f.matrix.to_dense());
        assert!((d[0].re - 1.0).abs() <= 1e-4 && d[1].re.abs() <= 1e-4);
    }

    #[test]
    fn gap_examples() {
        let g = spectral_gap(&OperatorMatrix::from_diagonal(&[0.0, 2.0, -3.0]), None).unwrap();
        assert_eq!(g.delta_cap, 2.0);
        assert_eq!(g.zero_multiplicity, 1);
        let g = spectral_gap(&OperatorMatrix::from_diagonal(&[0.0, 0.0, 1e-12, 5.0]), Some(1e-8)).unwrap();
        assert_eq!(g.delta_cap, 5.0);
        assert_eq!(g.zero_multiplicity, 3);
    }

    #[test]
    fn gap_requires_zero() {
        let err = spectral_gap(&OperatorMatrix::from_diagonal(&[1.0, 2.0]), None).unwrap_err();
        assert!(matches!(err, Error::NoZeroEigenvalue { .. }));
    }

    #[test]
    fn bound_on_two_level_example() {
        let r = bound_report(&OperatorMatrix::from_diagonal(&[0.0, 2.0]), 10.0, None).unwrap();
        assert!((r.measured_norm - 0.045_647_262_536_381_4).abs() < 1e-12);
        assert!((r.bound - 0.05).abs() < 1e-15);
        assert!(r.holds());
        assert!(r.route_discrepancy < 1e-12);
    }

    #[test]
    fn bound_needs_nonzero_spectrum() {
        let err = bound_report(&OperatorMatrix::from_diagonal(&[0.0, 0.0]), 10.0, Some(1e-8)).unwrap_err();
        assert!(matches!(err, Error::ZeroGap));
    }

    #[test]
    fn bound_scales_with_l() {
        let op = OperatorMatrix::from_diagonal(&[0.0, 1.3, -2.9, 4.4]);
        let r = bound_sweep(&op, &[7.0, 70.0], None).unwrap();
        assert!((r[0].bound / r[1].bound - 10.0).abs() < 1e-12);
    }
}
