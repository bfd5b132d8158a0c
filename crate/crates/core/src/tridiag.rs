//! Real symmetric tridiagonal matrices: Sturm-sequence bisection for
//! individual eigenvalues and inverse iteration for their eigenvectors.
//!
//! Grid operators with thousands of nodes are stored this way; only the few
//! eigenpairs that are asked for are ever computed.

use std::ops::Range;

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty(), "empty tridiagonal matrix");
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length must be n - 1");
        Self { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    fn scale(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * f64::EPSILON * self.scale());
        let mut count = 0;
        let mut d = self.diag[0] - x;
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
        for i in 1..self.dim() {
            d = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / d;
            if d.abs() < pivmin {
                d = -pivmin;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `index`-th eigenvalue in ascending order, bisected to full
    /// floating-point resolution.
    pub fn eigenvalue(&self, index: usize) -> f64 {
        assert!(index < self.dim(), "eigenvalue index out of range");
        let (mut lo, mut hi) = self.gershgorin();
        let pad = f64::EPSILON * self.scale() * 4.0;
        lo -= pad;
        hi += pad;
        for _ in 0..256 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn eigenvalues(&self, range: Range<usize>) -> Vec<f64> {
        range.map(|i| self.eigenvalue(i)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Unit eigenvector for an eigenvalue computed by [`Self::eigenvalue`],
    /// by inverse iteration with a pivoted tridiagonal factorization.
    pub fn eigenvector(&self, eigenvalue: f64) -> Vec<f64> {
        let n = self.dim();
        if n == 1 {
            return vec![1.0];
        }
        let lu = ShiftedLu::new(self, eigenvalue);
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * (0.7 * i as f64).sin()).collect();
        normalize(&mut x);
        for _ in 0..4 {
            lu.solve(&mut x);
            normalize(&mut x);
        }
        // fix the sign so the largest component is positive
        let imax = x
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        if x[imax] < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        x
    }
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= n);
}

/// LU factorization of `T - shift I` with partial pivoting (row interchanges
/// between neighbours only), tiny pivots lifted to `eps ||T||`.
struct ShiftedLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn new(t: &SymTridiagonal, shift: f64) -> Self {
        let n = t.dim();
        let mut dl = t.off.clone();
        let mut d: Vec<f64> = t.diag.iter().map(|v| v - shift).collect();
        let mut du = t.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n - 1];
        let tiny = f64::EPSILON * t.scale();
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i].abs() < tiny {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d[n - 1].abs() < tiny {
            d[n - 1] = tiny;
        }
        Self { dl, d, du, du2, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n >= 2 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}
