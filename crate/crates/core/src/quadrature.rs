//! Quadrature rules, adaptive Gauss-Kronrod integration and the small
//! extrapolation/fitting helpers shared by the kernel modules.

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::tridiag::SymTridiagonal;
use crate::C64;

/// Nodes and weights of a fixed rule, `sum_i w_i f(x_i)`.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn sum<F: FnMut(f64) -> C64>(&self, mut f: F) -> C64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(C64::new(0.0, 0.0), |acc, (&x, &w)| acc + f(x) * w)
    }
}

/// Gauss-Hermite rule for the weight `exp(-x^2)` on the real line.
///
/// Nodes start from the eigenvalues of the Jacobi matrix (bisection) and are
/// polished by Newton steps on the normalised Hermite recurrence, which also
/// supplies the weights.
pub fn gauss_hermite(n: usize) -> Rule {
    assert!(n >= 1, "gauss_hermite: need at least one node");
    const PIM4: f64 = 0.751_125_544_464_942_5; // pi^(-1/4)
    let nf = n as f64;
    let jacobi = SymTridiagonal::new(vec![0.0; n], (1..n).map(|j| (0.5 * j as f64).sqrt()).collect());
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = jacobi.eigenvalue(n - 1 - i);
        let mut pp = 0.0;
        for step in 0..8 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            // the last pass only refreshes the derivative for the weight
            if step < 7 {
                z -= p1 / pp;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    Rule { nodes: x, weights: w }
}

/// Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1, "gauss_legendre: need at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    Rule { nodes: x, weights: w }
}

impl Rule {
    /// Affine map of a `[-1, 1]` rule onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> Rule {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        Rule {
            nodes: self.nodes.iter().map(|&x| mid + half * x).collect(),
            weights: self.weights.iter().map(|&w| half * w).collect(),
        }
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: C64,
    pub error: f64,
    pub converged: bool,
}

impl Integral {
    pub fn re(&self) -> f64 {
        self.value.re
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).norm())
}

struct Segment {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive 15-point Gauss-Kronrod integration of a complex
/// integrand on `[a, b]`.
///
/// Stops once the summed Kronrod-minus-Gauss estimate is below
/// `max(abs_tol, rel_tol |I|)`; `converged` is false if `max_segments` is
/// exhausted first.
pub fn adaptive_gk<F: Fn(f64) -> C64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Integral {
    if a == b {
        return Integral { value: C64::new(0.0, 0.0), error: 0.0, converged: true };
    }
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, error: e });
    let mut total = v;
    let mut total_err = e;
    loop {
        let target = abs_tol.max(rel_tol * total.norm());
        if total_err <= target {
            return Integral { value: total, error: total_err, converged: true };
        }
        if heap.len() >= max_segments {
            return Integral { value: total, error: total_err, converged: false };
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval can no longer be split in floating point
            heap.push(worst);
            return Integral { value: total, error: total_err, converged: false };
        }
        let (lv, le) = gk15(&f, worst.a, mid);
        let (rv, re) = gk15(&f, mid, worst.b);
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: lv, error: le });
        heap.push(Segment { a: mid, b: worst.b, value: rv, error: re });
        if total_err < 0.0 {
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
}

/// Real-valued convenience wrapper around [`adaptive_gk`].
pub fn adaptive_gk_real<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Integral {
    adaptive_gk(|x| C64::new(f(x), 0.0), a, b, abs_tol, rel_tol, max_segments)
}

/// Polynomial (Neville) extrapolation of samples `(x_i, y_i)` to `x = 0`.
///
/// Returns the extrapolated value and the change caused by the last sample,
/// which serves as the error estimate.
pub fn extrapolate_to_zero(xs: &[f64], ys: &[C64]) -> (C64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let n = xs.len();
    let neville = |m: usize| -> C64 {
        let mut p: Vec<C64> = ys[..m].to_vec();
        for k in 1..m {
            for i in 0..m - k {
                let (xi, xk) = (xs[i], xs[i + k]);
                p[i] = (p[i + 1] * xi - p[i] * xk) / (xi - xk);
            }
        }
        p[0]
    };
    let full = neville(n);
    let err = if n > 1 { (full - neville(n - 1)).norm() } else { f64::INFINITY };
    (full, err)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_rule_integrates_moments() {
        let rule = gauss_hermite(40);
        let m0 = rule.sum(|_| C64::new(1.0, 0.0)).re;
        let m2 = rule.sum(|x| C64::new(x * x, 0.0)).re;
        let m4 = rule.sum(|x| C64::new(x.powi(4), 0.0)).re;
        assert!((m0 - PI.sqrt()).abs() < 1e-14);
        assert!((m2 - PI.sqrt() / 2.0).abs() < 1e-14);
        assert!((m4 - 3.0 * PI.sqrt() / 4.0).abs() < 1e-13);
    }

    #[test]
    fn hermite_rule_large_n_sums_to_root_pi() {
        for n in [96, 128, 256] {
            let rule = gauss_hermite(n);
            let m0: f64 = rule.weights.iter().sum();
            assert!((m0 - PI.sqrt()).abs() < 1e-13, "n = {n}: {m0}");
            // cos(x) e^{-x^2} integrates to sqrt(pi) e^{-1/4}
            let c = rule.sum(|x| C64::new(x.cos(), 0.0)).re;
            assert!((c - PI.sqrt() * (-0.25f64).exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let rule = gauss_legendre(8);
        let v = rule.sum(|x| C64::new(x.powi(14) + x.powi(3), 0.0)).re;
        assert!((v - 2.0 / 15.0).abs() < 1e-15);
        let mapped = rule.mapped(0.0, 2.0);
        let v = mapped.sum(|x| C64::new(x * x, 0.0)).re;
        assert!((v - 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        // int_0^{50} cos(x) dx = sin(50)
        let r = adaptive_gk_real(|x| x.cos(), 0.0, 50.0, 1e-13, 1e-13, 500);
        assert!(r.converged);
        assert!((r.re() - 50f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn adaptive_flags_budget_exhaustion() {
        let r = adaptive_gk_real(|x| (1000.0 * x * x).sin(), 0.0, 30.0, 1e-14, 1e-14, 4);
        assert!(!r.converged);
    }

    #[test]
    fn extrapolation_recovers_polynomial_limit() {
        let xs = [0.4, 0.2, 0.1, 0.05];
        let ys: Vec<C64> = xs.iter().map(|&x| C64::new(1.0 + 2.0 * x - x * x * x, x)).collect();
        let (v, _) = extrapolate_to_zero(&xs, &ys);
        assert!((v - C64::new(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(2.5)).collect();
        assert!((loglog_slope(&xs, &ys) - 2.5).abs() < 1e-12);
    }
}
