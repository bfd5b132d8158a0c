//! Scalar special functions needed by the averaging filters.

use std::f64::consts::FRAC_PI_2;

use crate::quadrature::{adaptive_gk_real, Integral};
use crate::C64;

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Below this argument `Si` is integrated directly along the real axis.
const DIRECT_LIMIT: f64 = 16.0;

/// Sine integral `Si(x) = int_0^x sin(u)/u du`, evaluated by adaptive
/// quadrature.
///
/// Small arguments integrate the oscillatory integrand directly. Large
/// arguments use `Si(x) = pi/2 - f(x) cos x - g(x) sin x` with the auxiliary
/// functions written as Laplace integrals
/// `f(x) = int_0^inf e^{-u} / (x (1 + (u/x)^2)) du`,
/// `g(x) = int_0^inf u e^{-u} / (x^2 (1 + (u/x)^2)) du`,
/// which are smooth and need no oscillation resolution. The returned error
/// is the propagated quadrature estimate.
pub fn sine_integral(x: f64) -> Integral {
    if x == 0.0 {
        return Integral { value: C64::new(0.0, 0.0), error: 0.0, converged: true };
    }
    let sign = x.signum();
    let ax = x.abs();
    if ax <= DIRECT_LIMIT {
        let r = adaptive_gk_real(sinc, 0.0, ax, 1e-15, 1e-15, 200);
        return Integral { value: r.value * sign, ..r };
    }
    // e^{-u} is below 1e-32 past u = 75
    let upper = 75.0;
    let f = adaptive_gk_real(|u| (-u).exp() / (ax * (1.0 + (u / ax).powi(2))), 0.0, upper, 1e-17, 1e-15, 200);
    let g = adaptive_gk_real(
        |u| u * (-u).exp() / (ax * ax * (1.0 + (u / ax).powi(2))),
        0.0,
        upper,
        1e-17,
        1e-15,
        200,
    );
    let value = FRAC_PI_2 - f.re() * ax.cos() - g.re() * ax.sin();
    Integral {
        value: C64::new(sign * value, 0.0),
        error: f.error + g.error,
        converged: f.converged && g.converged,
    }
}
