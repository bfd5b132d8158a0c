//! Matrix exponential by scaling and squaring with a truncated Taylor series.
//!
//! Used as the eigendecomposition-free route to the group elements
//! `exp(-i xi Phi)`; it must stay independent of the spectral code path.

use nalgebra::DMatrix;

use crate::C64;

const TAYLOR_DEGREE: usize = 20;

fn one_norm(m: &DMatrix<C64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(m)` for a general complex square matrix.
pub fn expm(m: &DMatrix<C64>) -> DMatrix<C64> {
    assert!(m.is_square(), "expm: matrix must be square");
    let n = m.nrows();
    let norm = one_norm(m);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = m * C64::new(0.5f64.powi(squarings as i32), 0.0);

    // Horner form of sum_k x^k / k!
    let identity = DMatrix::<C64>::identity(n, n);
    let mut acc = identity.clone();
    for k in (1..=TAYLOR_DEGREE).rev() {
        acc = &identity + (&scaled * acc) * C64::new(1.0 / k as f64, 0.0);
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    acc
}

/// `exp(-i xi a)`.
pub fn unitary_group_element(a: &DMatrix<C64>, xi: f64) -> DMatrix<C64> {
    expm(&(a * C64::new(0.0, -xi)))
}
