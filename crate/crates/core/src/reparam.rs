//! Kernels of the reparameterization-invariant free particle, `H = P^2/2`.
//!
//! Extended states `|p,q,s,t> = |p,q> (x) |s,t>` carry the momentum-space
//! amplitudes `<k|p,q> = pi^(-1/4) e^{-(k-p)^2/2 - ikq}` and
//! `<sigma|s,t> = pi^(-1/4) e^{-(sigma-s)^2/2 - i sigma t}`. The constraint
//! projector `E(-delta < S + P^2/2 < delta)` restricts the `(k, sigma)`
//! integral to the band `|sigma + k^2/2| < delta`.
//!
//! Every kernel is available by quadrature and by a closed form (or a
//! leading-order form) so that each route checks the other.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{hermitian_norm, PhasePoint};
use crate::quadrature::{adaptive_gk, extrapolate_to_zero, gauss_hermite, gauss_legendre, loglog_slope, Rule};
use crate::C64;

/// Gauss-Legendre nodes across the band `|sigma + k^2/2| < delta`.
const BAND_NODES: usize = 32;

/// Beyond this distance from the centre the Gaussian weights are below
/// `e^{-144}`.
const GAUSSIAN_REACH: f64 = 12.0;

/// Trapezoid spacing for the `s` integrals of the delta limit.
const S_SPACING: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureScheme {
    GaussHermite,
    Adaptive,
}

/// How the oscillatory momentum integrals are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub node_count: usize,
    pub scheme: QuadratureScheme,
    /// Largest regulator `epsilon` of `dt -> dt - i epsilon`; the ladder
    /// divides it by 10 per level.
    pub regulator_epsilon: f64,
    pub extrapolation_levels: usize,
    /// Error estimates above this are flagged as not converged.
    pub tolerance: f64,
    /// Largest `delta` of the delta-limit ladder; halved per level.
    pub delta_start: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            node_count: 96,
            scheme: QuadratureScheme::GaussHermite,
            regulator_epsilon: 1e-2,
            extrapolation_levels: 4,
            tolerance: 1e-10,
            delta_start: 0.2,
        }
    }
}

impl QuadratureSpec {
    pub fn with_nodes(node_count: usize) -> Self {
        Self { node_count, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count < 16 {
            return Err(Error::InvalidParameter(format!("node_count must be >= 16, got {}", self.node_count)));
        }
        if !(self.regulator_epsilon > 0.0) {
            return Err(Error::InvalidParameter("regulator epsilon must be positive".into()));
        }
        if self.extrapolation_levels < 2 {
            return Err(Error::InvalidParameter("at least two extrapolation levels are needed".into()));
        }
        if !(self.tolerance > 0.0) || !(self.delta_start > 0.0) {
            return Err(Error::InvalidParameter("tolerance and delta_start must be positive".into()));
        }
        Ok(())
    }

    /// The working rule and a companion with `3n/4` nodes; their difference
    /// bounds the error of the companion and hence of the working rule.
    fn hermite(&self) -> (Rule, Rule) {
        (gauss_hermite(self.node_count), gauss_hermite(3 * self.node_count / 4))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMethod {
    Quadrature,
    ClosedForm,
    LeadingOrder,
}

/// A kernel value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    #[serde(with = "complex_pair")]
    pub value: C64,
    pub estimated_error: f64,
    pub method: KernelMethod,
    pub converged: bool,
}

impl KernelValue {
    fn closed(value: C64) -> Self {
        Self { value, estimated_error: 0.0, method: KernelMethod::ClosedForm, converged: true }
    }

    fn estimated(value: C64, estimated_error: f64, method: KernelMethod, tolerance: f64) -> Self {
        let converged = estimated_error.is_finite() && estimated_error <= tolerance.max(tolerance * value.norm());
        if !converged {
            log::warn!("kernel value {value} has error estimate {estimated_error:e} above {tolerance:e}");
        }
        Self { value, estimated_error, method, converged }
    }
}

/// Complex numbers as `[re, im]` in reports.
pub mod complex_pair {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::C64;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtendedMode {
    /// Full `(k, sigma)` integral over the band.
    Exact,
    /// Band integral replaced by its value at `sigma = -k^2/2` times
    /// `2 sin(delta dt)/dt`.
    Leading,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReducedMode {
    Quadrature,
    ClosedForm,
    /// `lim (1/(4 sqrt(pi) delta)) int <..|E|..> ds'' ds'`, extrapolated.
    DeltaLimit,
}

fn labels(a: &PhasePoint, b: &PhasePoint) -> Result<()> {
    a.validate()?;
    b.validate()
}

/// `2 sin(delta dt)/dt` with its `dt -> 0` limit `2 delta`.
fn band_factor(delta: f64, dt: f64) -> f64 {
    2.0 * delta * crate::special::sinc(delta * dt)
}

/// Runs a momentum integral `int e^{-(k-centre)^2} f(k) dk` by the scheme
/// in `quad`; returns value and error estimate.
fn momentum_integral<F: Fn(f64) -> C64 + Sync>(quad: &QuadratureSpec, centre: f64, f: F) -> (C64, f64) {
    match quad.scheme {
        QuadratureScheme::GaussHermite => {
            let (full, companion) = quad.hermite();
            let v = full.sum(|x| f(centre + x));
            let coarse = companion.sum(|x| f(centre + x));
            (v, (v - coarse).norm())
        }
        QuadratureScheme::Adaptive => {
            let r = adaptive_gk(
                |k| f(k) * (-(k - centre).powi(2)).exp(),
                centre - GAUSSIAN_REACH,
                centre + GAUSSIAN_REACH,
                1e-15,
                1e-13,
                4000,
            );
            (r.value, if r.converged { r.error } else { f64::INFINITY })
        }
    }
}

/// `int_{c-delta}^{c+delta} g(sigma) e^{i sigma dt} d sigma` by Gauss-Legendre.
fn band_integral<G: Fn(f64) -> f64>(rule: &Rule, centre: f64, delta: f64, dt: f64, g: G) -> C64 {
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| {
            let sigma = centre + delta * x;
            C64::from_polar(g(sigma) * w * delta, sigma * dt)
        })
        .sum()
}

/// `<p'',q'',s'',t''|E(-delta < S + P^2/2 < delta)|p',q',s',t'>`.
pub fn extended_kernel(
    a: &PhasePoint,
    b: &PhasePoint,
    delta: f64,
    mode: ExtendedMode,
    quad: &QuadratureSpec,
) -> Result<KernelValue> {
    labels(a, b)?;
    quad.validate()?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let (sa, sb) = (a.s_or_zero(), b.s_or_zero());
    let dq = a.q - b.q;
    let dt = a.t_or_zero() - b.t_or_zero();
    let pbar = 0.5 * (a.p + b.p);
    let dp = a.p - b.p;
    // e^{-(k-p'')^2/2 - (k-p')^2/2} = e^{-(k-pbar)^2} e^{-dp^2/4}
    let prefactor = (-0.25 * dp * dp).exp() / PI;
    let sigma_weight = move |sigma: f64| (-0.5 * (sigma - sa).powi(2) - 0.5 * (sigma - sb).powi(2)).exp();
    let (value, err) = match mode {
        ExtendedMode::Leading => {
            let factor = band_factor(delta, dt);
            momentum_integral(quad, pbar, |k| {
                let sigma0 = -0.5 * k * k;
                C64::from_polar(sigma_weight(sigma0), k * dq + sigma0 * dt) * factor
            })
        }
        ExtendedMode::Exact => {
            let rule = gauss_legendre(BAND_NODES);
            momentum_integral(quad, pbar, |k| {
                C64::from_polar(1.0, k * dq) * band_integral(&rule, -0.5 * k * k, delta, dt, sigma_weight)
            })
        }
    };
    let method = match mode {
        ExtendedMode::Exact => KernelMethod::Quadrature,
        ExtendedMode::Leading => KernelMethod::LeadingOrder,
    };
    Ok(KernelValue::estimated(value * prefactor, err * prefactor, method, quad.tolerance))
}

/// Closed form of the reduced kernel:
/// `a^{-1/2} exp[b^2/(4a) - pbar^2 - dp^2/4]` with `a = 1 + i dt/2`,
/// `b = 2 pbar + i dq`, principal square root.
pub fn reduced_closed_form(a: &PhasePoint, b: &PhasePoint) -> C64 {
    let dq = a.q - b.q;
    let dt = a.t_or_zero() - b.t_or_zero();
    let pbar = 0.5 * (a.p + b.p);
    let dp = a.p - b.p;
    let coef = C64::new(1.0, 0.5 * dt);
    // Re(coef) = 1 keeps the argument inside (-pi/2, pi/2), far from the cut
    assert!(coef.arg().abs() < 0.5 * PI, "reduced kernel coefficient crossed the branch cut");
    let lin = C64::new(2.0 * pbar, dq);
    (lin * lin / (coef * 4.0) - pbar * pbar - 0.25 * dp * dp).exp() / coef.sqrt()
}

/// `<p'',q'',t''|p',q',t'> =
///  pi^{-1/2} int exp[-(k-p'')^2/2 - (k-p')^2/2 + ik(q''-q') - ik^2(t''-t')/2] dk`.
pub fn reduced_kernel(a: &PhasePoint, b: &PhasePoint, mode: ReducedMode, quad: &QuadratureSpec) -> Result<KernelValue> {
    labels(a, b)?;
    quad.validate()?;
    match mode {
        ReducedMode::ClosedForm => Ok(KernelValue::closed(reduced_closed_form(a, b))),
        ReducedMode::Quadrature => {
            let (value, err) = reduced_by_quadrature(a, b, quad);
            Ok(KernelValue::estimated(value, err, KernelMethod::Quadrature, quad.tolerance))
        }
        ReducedMode::DeltaLimit => reduced_delta_limit(a, b, quad),
    }
}

fn reduced_by_quadrature(a: &PhasePoint, b: &PhasePoint, quad: &QuadratureSpec) -> (C64, f64) {
    let dq = a.q - b.q;
    let dt = a.t_or_zero() - b.t_or_zero();
    let pbar = 0.5 * (a.p + b.p);
    let dp = a.p - b.p;
    let prefactor = (-0.25 * dp * dp).exp() / PI.sqrt();
    let (v, e) = momentum_integral(quad, pbar, |k| C64::from_polar(1.0, k * dq - 0.5 * k * k * dt));
    (v * prefactor, e * prefactor)
}

/// `int e^{-(sigma - s)^2/2} ds` by the trapezoid rule on the fixed grid
/// `s_j = j * S_SPACING`, truncated where the Gaussian drops below `e^{-72}`.
fn s_marginal(sigma: f64) -> f64 {
    let lo = ((sigma - GAUSSIAN_REACH) / S_SPACING).floor() as i64;
    let hi = ((sigma + GAUSSIAN_REACH) / S_SPACING).ceil() as i64;
    (lo..=hi).map(|j| (-0.5 * (sigma - j as f64 * S_SPACING).powi(2)).exp()).sum::<f64>() * S_SPACING
}

/// `(1/(4 sqrt(pi) delta)) int int <a, s''|E|b, s'> ds'' ds'` at one `delta`.
///
/// The `s` integrals are exchanged with the `(k, sigma)` integrals of the
/// exact extended kernel, so each becomes a marginal of the Gaussian factor
/// of `<sigma|s,t>`.
pub fn s_integrated_extended(a: &PhasePoint, b: &PhasePoint, delta: f64, quad: &QuadratureSpec) -> (C64, f64) {
    let dq = a.q - b.q;
    let dt = a.t_or_zero() - b.t_or_zero();
    let pbar = 0.5 * (a.p + b.p);
    let dp = a.p - b.p;
    let prefactor = (-0.25 * dp * dp).exp() / PI / (4.0 * PI.sqrt() * delta);
    let rule = gauss_legendre(BAND_NODES);
    let (v, e) = momentum_integral(quad, pbar, |k| {
        C64::from_polar(1.0, k * dq) * band_integral(&rule, -0.5 * k * k, delta, dt, |sigma| s_marginal(sigma).powi(2))
    });
    (v * prefactor, e * prefactor)
}

fn reduced_delta_limit(a: &PhasePoint, b: &PhasePoint, quad: &QuadratureSpec) -> Result<KernelValue> {
    let deltas: Vec<f64> = (0..quad.extrapolation_levels)
        .map(|j| quad.delta_start * 0.5f64.powi(j as i32))
        .collect();
    let samples: Vec<(C64, f64)> = deltas.par_iter().map(|&d| s_integrated_extended(a, b, d, quad)).collect();
    let xs: Vec<f64> = deltas.iter().map(|d| d * d).collect();
    let ys: Vec<C64> = samples.iter().map(|s| s.0).collect();
    let (value, extrap_err) = extrapolate_to_zero(&xs, &ys);
    let quad_err = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    // the tolerance scales with the slowest piece, the ladder itself
    let tol = quad.tolerance.max(1e-9);
    Ok(KernelValue::estimated(value, extrap_err + quad_err, KernelMethod::Quadrature, tol))
}

/// `|composed - direct|` for the propagation identity
/// `int <a|p,q,t><p,q,t|b> dp dq/(2 pi) = <a|b>` at intermediate time `t_mid`.
///
/// The `q` integral is done analytically and yields `2 pi delta(k - k')`;
/// the `p` integral (Gaussian in `p - k`) and the `k` integral are
/// Gauss-Hermite sums, with the intermediate-time phases
/// `e^{+-i k^2 t_mid/2}` applied numerically.
pub fn propagation_residual(a: &PhasePoint, b: &PhasePoint, t_mid: f64, quad: &QuadratureSpec) -> Result<KernelValue> {
    labels(a, b)?;
    quad.validate()?;
    if !t_mid.is_finite() {
        return Err(Error::InvalidParameter("intermediate time must be finite".into()));
    }
    let composed = |rule: &Rule| -> C64 {
        let (ta, tb) = (a.t_or_zero(), b.t_or_zero());
        let pbar = 0.5 * (a.p + b.p);
        let dp = a.p - b.p;
        let prefactor = (-0.25 * dp * dp).exp() / PI.sqrt();
        // int dp pi^{-1/2} e^{-(p-k)^2}, the same rule centred at k
        let p_integral = rule.weights.iter().sum::<f64>() / PI.sqrt();
        rule.sum(|x| {
            let k = pbar + x;
            // <a|k>: phase e^{ikq'' - ik^2 t''/2}; <k|p,q,t_mid> carries e^{+ik^2 t_mid/2}
            let left = C64::from_polar(1.0, k * a.q - 0.5 * k * k * ta);
            let right = C64::from_polar(1.0, -k * b.q + 0.5 * k * k * tb);
            let mid_in = C64::from_polar(1.0, 0.5 * k * k * t_mid);
            let mid_out = C64::from_polar(1.0, -0.5 * k * k * t_mid);
            left * mid_in * p_integral * mid_out * right
        }) * prefactor
    };
    let (full, companion) = quad.hermite();
    let direct = reduced_closed_form(a, b);
    let value = composed(&full);
    let coarse = composed(&companion);
    let residual = (value - direct).norm();
    let err = (value - coarse).norm();
    Ok(KernelValue {
        value: C64::new(residual, 0.0),
        estimated_error: err,
        method: KernelMethod::Quadrature,
        converged: err <= quad.tolerance.max(1e-8),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagatorMode {
    ClosedForm,
    Quadrature,
}

/// `<q''|e^{-i(P^2/2) dt}|q'> = e^{i dq^2/(2 dt)} / sqrt(2 pi i dt)` with
/// `sqrt(2 pi i dt) = sqrt(2 pi |dt|) e^{i pi/4 sign(dt)}`.
pub fn sharp_q_closed_form(dq: f64, dt: f64) -> C64 {
    let root = C64::from_polar((TAU * dt.abs()).sqrt(), FRAC_PI_4 * dt.signum());
    C64::from_polar(1.0, dq * dq / (2.0 * dt)) / root
}

/// `(1/2 pi) int exp[ik dq - ik^2 (dt - i eps)/2] dk` at one regulator.
///
/// With `eps > 0` the integrand decays in the sector between the real axis
/// and the ray `k = e^{-i pi/4 sign(dt)} u`, so the contour is rotated onto
/// that ray where the integrand is a Gaussian in `u`.
pub fn sharp_q_regulated(dq: f64, dt: f64, eps: f64, rule: &Rule) -> C64 {
    let rot = C64::from_polar(1.0, -FRAC_PI_4 * dt.signum());
    // exponent: -A u^2 + B u with A = (|dt| - i eps sign(dt))/2, B = i rot dq
    let a_coef = C64::new(dt.abs(), -eps * dt.signum()) * 0.5;
    let b_coef = C64::i() * rot * dq;
    let alpha = a_coef.re.sqrt();
    let centre = b_coef.re / (2.0 * a_coef.re);
    let sum = rule.sum(|x| {
        let u = centre + x / alpha;
        // e^{-x^2} is supplied by the rule
        (-a_coef * u * u + b_coef * u + x * x).exp()
    });
    sum * rot / alpha / TAU
}

pub fn sharp_q_propagator(q2: f64, q1: f64, dt: f64, mode: PropagatorMode, quad: &QuadratureSpec) -> Result<KernelValue> {
    if !(q2.is_finite() && q1.is_finite() && dt.is_finite()) {
        return Err(Error::InvalidParameter("propagator arguments must be finite".into()));
    }
    if dt == 0.0 {
        return Err(Error::InvalidParameter(
            "dt = 0 gives a delta function; the sharp-q propagator needs dt != 0".into(),
        ));
    }
    quad.validate()?;
    let dq = q2 - q1;
    match mode {
        PropagatorMode::ClosedForm => Ok(KernelValue::closed(sharp_q_closed_form(dq, dt))),
        PropagatorMode::Quadrature => {
            let rule = gauss_hermite(quad.node_count);
            let eps: Vec<f64> = (0..quad.extrapolation_levels)
                .map(|j| quad.regulator_epsilon * 0.1f64.powi(j as i32))
                .collect();
            let ys: Vec<C64> = eps.iter().map(|&e| sharp_q_regulated(dq, dt, e, &rule)).collect();
            let (value, err) = extrapolate_to_zero(&eps, &ys);
            Ok(KernelValue::estimated(value, err, KernelMethod::Quadrature, quad.tolerance.max(1e-8)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GramKernel {
    /// Exact extended kernel at window `delta`.
    Extended { delta: f64 },
    /// Closed-form reduced kernel.
    Reduced,
}

/// Gram matrix with its positivity diagnostics.
#[derive(Debug, Clone)]
pub struct Gram {
    pub matrix: DMatrix<C64>,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub max_error: f64,
}

impl Gram {
    /// `min eigenvalue >= -1e-10 max eigenvalue`.
    pub fn is_positive_semidefinite(&self) -> bool {
        self.min_eigenvalue >= -1e-10 * self.max_eigenvalue
    }
}

pub fn gram_matrix(points: &[PhasePoint], kernel: GramKernel, quad: &QuadratureSpec) -> Result<Gram> {
    let n = points.len();
    if n == 0 || n > 64 {
        return Err(Error::InvalidParameter(format!("gram matrices take 1 to 64 points, got {n}")));
    }
    for (i, a) in points.iter().enumerate() {
        if points[..i].contains(a) {
            log::warn!("duplicate point {a:?}: the Gram matrix will be rank deficient");
        }
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| match kernel {
            GramKernel::Reduced => reduced_kernel(&points[i], &points[j], ReducedMode::ClosedForm, quad),
            GramKernel::Extended { delta } => {
                extended_kernel(&points[i], &points[j], delta, ExtendedMode::Exact, quad)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut matrix = DMatrix::zeros(n, n);
    let mut max_error: f64 = 0.0;
    for (&(i, j), v) in pairs.iter().zip(&values) {
        matrix[(i, j)] = v.value;
        matrix[(j, i)] = v.value.conj();
        max_error = max_error.max(v.estimated_error);
    }
    for i in 0..n {
        matrix[(i, i)].im = 0.0;
    }
    let eig = matrix.clone().symmetric_eigenvalues();
    let min_eigenvalue = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let max_eigenvalue = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    debug_assert!((hermitian_norm(&matrix) - max_eigenvalue.abs().max(min_eigenvalue.abs())).abs() < 1e-8);
    Ok(Gram { matrix, min_eigenvalue, max_eigenvalue, max_error })
}

/// Size of `exact - leading` of the extended kernel along a delta sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionStudy {
    pub deltas: Vec<f64>,
    pub absolute: Vec<f64>,
    /// `|exact - leading| / |exact|`.
    pub relative: Vec<f64>,
    pub absolute_slope: f64,
    pub relative_slope: f64,
    /// `relative / delta^2` at the smallest delta.
    pub relative_coefficient: f64,
    pub max_error: f64,
}

pub fn correction_study(a: &PhasePoint, b: &PhasePoint, deltas: &[f64], quad: &QuadratureSpec) -> Result<CorrectionStudy> {
    if deltas.len() < 2 {
        return Err(Error::InvalidParameter("a delta sweep needs at least two values".into()));
    }
    let rows = deltas
        .par_iter()
        .map(|&d| {
            let exact = extended_kernel(a, b, d, ExtendedMode::Exact, quad)?;
            let leading = extended_kernel(a, b, d, ExtendedMode::Leading, quad)?;
            Ok((exact, leading))
        })
        .collect::<Result<Vec<_>>>()?;
    let absolute: Vec<f64> = rows.iter().map(|(e, l)| (e.value - l.value).norm()).collect();
    let relative: Vec<f64> = rows.iter().zip(&absolute).map(|((e, _), d)| d / e.value.norm()).collect();
    let max_error = rows.iter().map(|(e, l)| e.estimated_error.max(l.estimated_error)).fold(0.0, f64::max);
    let last = deltas.len() - 1;
    Ok(CorrectionStudy {
        absolute_slope: loglog_slope(deltas, &absolute),
        relative_slope: loglog_slope(deltas, &relative),
        relative_coefficient: relative[last] / (deltas[last] * deltas[last]),
        deltas: deltas.to_vec(),
        absolute,
        relative,
        max_error,
    })
}

/// Seeded labels uniform in `[-1, 1]` per coordinate: `(p, q, t)`, or
/// `(p, q, s, t)` when `extended`.
pub fn random_phase_points(count: usize, seed: u64, extended: bool) -> Vec<PhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let p = rng.random_range(-1.0..1.0);
            let q = rng.random_range(-1.0..1.0);
            if extended {
                let s = rng.random_range(-1.0..1.0);
                PhasePoint::extended(p, q, s, rng.random_range(-1.0..1.0))
            } else {
                PhasePoint::timed(p, q, rng.random_range(-1.0..1.0))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn reduced_coincident_is_one() {
        for pt in [PhasePoint::timed(0.3, -1.2, 0.7), PhasePoint::timed(-1.0, 2.0, -3.0)] {
            for mode in [ReducedMode::ClosedForm, ReducedMode::Quadrature] {
                let v = reduced_kernel(&pt, &pt, mode, &q()).unwrap();
                assert!((v.value - C64::new(1.0, 0.0)).norm() < 1e-12, "{mode:?}");
            }
        }
    }

    #[test]
    fn reduced_position_shift_ratio() {
        let a = PhasePoint::timed(0.0, 0.0, 0.0);
        let b = PhasePoint::timed(0.0, 1.0, 0.0);
        let v = reduced_kernel(&a, &b, ReducedMode::ClosedForm, &q()).unwrap().value;
        assert!((v - C64::new((-0.25f64).exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn reduced_routes_agree() {
        let a = PhasePoint::timed(0.4, -0.3, 0.9);
        let b = PhasePoint::timed(-0.2, 0.5, -0.4);
        let c = reduced_kernel(&a, &b, ReducedMode::ClosedForm, &q()).unwrap().value;
        let g = reduced_kernel(&a, &b, ReducedMode::Quadrature, &q()).unwrap();
        assert!(g.converged);
        assert!((c - g.value).norm() < 1e-12);
    }

    #[test]
    fn delta_limit_matches_closed_form() {
        let a = PhasePoint::timed(0.4, -0.3, 0.9);
        let b = PhasePoint::timed(-0.2, 0.5, -0.4);
        let c = reduced_closed_form(&a, &b);
        let d = reduced_kernel(&a, &b, ReducedMode::DeltaLimit, &q()).unwrap();
        assert!((c - d.value).norm() < 1e-8, "{} vs {}", c, d.value);
    }

    #[test]
    fn s_marginal_is_root_two_pi() {
        for sigma in [0.0, -0.13, -17.71, 3.3] {
            assert!((s_marginal(sigma) - TAU.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn leading_diagonal_at_origin() {
        let o = PhasePoint::extended(0.0, 0.0, 0.0, 0.0);
        let delta = 0.1;
        let v = extended_kernel(&o, &o, delta, ExtendedMode::Leading, &q()).unwrap().value;
        let oracle = adaptive_gk(|k| C64::new((-k * k - k.powi(4) / 4.0).exp(), 0.0), -10.0, 10.0, 1e-16, 1e-15, 500);
        let expect = 2.0 * delta / PI * oracle.re();
        assert!(v.im.abs() < 1e-15 && v.re > 0.0);
        assert!((v.re - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn extended_is_hermitian() {
        let a = PhasePoint::extended(0.3, -0.4, 0.2, 0.5);
        let b = PhasePoint::extended(-0.5, 0.1, -0.3, -0.2);
        for mode in [ExtendedMode::Exact, ExtendedMode::Leading] {
            let ab = extended_kernel(&a, &b, 0.1, mode, &q()).unwrap();
            let ba = extended_kernel(&b, &a, 0.1, mode, &q()).unwrap();
            assert!((ab.value - ba.value.conj()).norm() <= ab.estimated_error.max(1e-15));
        }
    }

    #[test]
    fn adaptive_and_hermite_extended_agree() {
        let a = PhasePoint::extended(0.3, -0.4, 0.2, 0.5);
        let b = PhasePoint::extended(-0.5, 0.1, -0.3, -0.2);
        let gh = extended_kernel(&a, &b, 0.1, ExtendedMode::Exact, &q()).unwrap().value;
        let spec = QuadratureSpec { scheme: QuadratureScheme::Adaptive, ..q() };
        let gk = extended_kernel(&a, &b, 0.1, ExtendedMode::Exact, &spec).unwrap().value;
        assert!((gh - gk).norm() < 1e-12);
    }

    #[test]
    fn time_translation_invariance() {
        let a = PhasePoint::extended(0.3, -0.4, 0.2, 0.5);
        let b = PhasePoint::extended(-0.5, 0.1, -0.3, -0.2);
        let shift = |p: &PhasePoint| PhasePoint { t: Some(p.t_or_zero() + 3.7), ..*p };
        let v0 = extended_kernel(&a, &b, 0.1, ExtendedMode::Exact, &q()).unwrap().value;
        let v1 = extended_kernel(&shift(&a), &shift(&b), 0.1, ExtendedMode::Exact, &q()).unwrap().value;
        assert!((v0 - v1).norm() < 1e-10);
    }

    #[test]
    fn propagator_values() {
        let v = sharp_q_propagator(0.0, 0.0, 1.0, PropagatorMode::ClosedForm, &q()).unwrap().value;
        // e^{-i pi/4}/sqrt(2 pi)
        assert!((v - C64::new(0.282_094_791_8, -0.282_094_791_8)).norm() < 1e-10);
        let v2 = sharp_q_propagator(0.0, 0.0, 2.0, PropagatorMode::ClosedForm, &q()).unwrap().value;
        assert!((v2 - C64::new(0.199_471_140_2, -0.199_471_140_2)).norm() < 1e-10);
        let m = sharp_q_propagator(1.3, -0.2, 2.0, PropagatorMode::ClosedForm, &q()).unwrap().value.norm();
        assert!((m - 0.282_094_791_8).abs() < 1e-10);
        let f = sharp_q_propagator(0.7, 0.1, 1.5, PropagatorMode::ClosedForm, &q()).unwrap().value;
        let r = sharp_q_propagator(0.7, 0.1, -1.5, PropagatorMode::ClosedForm, &q()).unwrap().value;
        assert!((f - r.conj()).norm() < 1e-15);
    }

    #[test]
    fn propagator_quadrature_matches_closed_form() {
        for (dq, dt) in [(0.0, 1.0), (1.3, 0.6), (-2.0, -1.7), (0.5, 3.0)] {
            let c = sharp_q_closed_form(dq, dt);
            let g = sharp_q_propagator(dq, 0.0, dt, PropagatorMode::Quadrature, &q()).unwrap();
            assert!((c - g.value).norm() < 1e-8, "dq {dq} dt {dt}: {c} vs {}", g.value);
        }
    }

    #[test]
    fn propagator_rejects_zero_time() {
        assert!(sharp_q_propagator(0.0, 0.0, 0.0, PropagatorMode::ClosedForm, &q()).is_err());
    }

    #[test]
    fn propagation_identity_holds() {
        let a = PhasePoint::timed(0.4, -0.3, 0.9);
        let b = PhasePoint::timed(-0.2, 0.5, -0.4);
        let r0 = propagation_residual(&a, &b, 0.0, &q()).unwrap().value.re;
        let r7 = propagation_residual(&a, &b, 7.0, &q()).unwrap().value.re;
        assert!(r0 < 1e-10 && r7 < 1e-10);
        assert!((r0 - r7).abs() < 1e-10);
    }

    #[test]
    fn gram_single_point() {
        let p = PhasePoint::timed(0.2, 0.1, 0.0);
        let g = gram_matrix(&[p], GramKernel::Reduced, &q()).unwrap();
        assert_eq!(g.matrix.nrows(), 1);
        assert!((g.matrix[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn correction_is_relatively_second_order() {
        let a = PhasePoint::extended(0.3, -0.4, 0.2, 0.5);
        let b = PhasePoint::extended(-0.5, 0.1, -0.3, -0.2);
        let s = correction_study(&a, &b, &[0.2, 0.1, 0.05, 0.025], &q()).unwrap();
        assert!((s.relative_slope - 2.0).abs() < 0.2, "{s:?}");
    }
}
