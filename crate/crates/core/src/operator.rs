//! Hilbert-space representations, canonical operators, coherent states and
//! the spectral primitives everything else is built on.
//!
//! Two representations are supported:
//!
//! * a truncated Fock basis of dimension `N`, with `Q = (a + a^dagger)/sqrt 2`
//!   and `P = i (a^dagger - a)/sqrt 2`, so `[Q, P] = i` everywhere except the
//!   last row and column;
//! * a uniform position grid, with the second-order central-difference
//!   Laplacian and Dirichlet walls at `q_min` and `q_max` (the unknowns live
//!   on the `M - 2` interior nodes). These operators are kept in
//!   [`SymTridiagonal`] form.
//!
//! A third, periodic grid carries the Fourier momentum operator of the
//! multiplier sector (see [`crate::elevation`]).

use std::borrow::Cow;
use std::f64::consts::PI;
use std::io::{self, Write};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tridiag::SymTridiagonal;
use crate::C64;

/// Largest tridiagonal operator that `eigendecompose` will densify.
pub const DENSE_TRIDIAGONAL_LIMIT: usize = 2048;

/// Relative Hermiticity tolerance: `max|A - A^dagger| <= 1e-12 max|A|`.
pub const HERMITIAN_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub q_min: f64,
    pub q_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(q_min: f64, q_max: f64, points: usize) -> Result<Self> {
        let g = Self { q_min, q_max, points };
        g.validate()?;
        Ok(g)
    }

    /// Grid on `[q_min, q_max]` with the requested spacing (rounded to the
    /// nearest whole number of cells).
    pub fn with_spacing(q_min: f64, q_max: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidBasis(format!("grid spacing must be positive, got {h}")));
        }
        let cells = ((q_max - q_min) / h).round() as usize;
        Self::new(q_min, q_max, cells + 1)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q_min.is_finite() && self.q_max.is_finite()) {
            return Err(Error::InvalidBasis("grid bounds must be finite".into()));
        }
        if !(self.q_min < self.q_max) {
            return Err(Error::InvalidBasis(format!(
                "grid requires q_min < q_max (got {} >= {})",
                self.q_min, self.q_max
            )));
        }
        if self.points < 8 {
            return Err(Error::InvalidBasis(format!(
                "grid requires at least 8 points (got {})",
                self.points
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.q_max - self.q_min) / (self.points - 1) as f64
    }

    /// Node `j` of the full grid, `0 <= j < points`.
    pub fn node(&self, j: usize) -> f64 {
        // anchored at both ends so symmetric boxes give mirror-exact nodes
        let m = self.points - 1;
        if 2 * j <= m {
            self.q_min + j as f64 * self.spacing()
        } else {
            self.q_max - (m - j) as f64 * self.spacing()
        }
    }

    /// Interior nodes carrying the Dirichlet unknowns.
    pub fn interior_nodes(&self) -> Vec<f64> {
        (1..self.points - 1).map(|j| self.node(j)).collect()
    }
}

/// A truncated Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisSpec {
    Fock { dim: usize },
    /// Dirichlet grid; dimension is the number of interior nodes.
    Grid { grid: GridSpec },
    /// Periodic grid of `points` nodes `q_min + j h`, period `points * h`.
    Periodic { grid: GridSpec },
}

impl BasisSpec {
    pub fn fock(dim: usize) -> Result<Self> {
        let b = BasisSpec::Fock { dim };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BasisSpec::Fock { dim } if *dim < 2 => {
                Err(Error::InvalidBasis(format!("Fock dimension must be >= 2 (got {dim})")))
            }
            BasisSpec::Fock { .. } => Ok(()),
            BasisSpec::Grid { grid } | BasisSpec::Periodic { grid } => grid.validate(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            BasisSpec::Fock { dim } => *dim,
            BasisSpec::Grid { grid } => grid.points - 2,
            BasisSpec::Periodic { grid } => grid.points,
        }
    }

    /// Position of each basis element for grid bases.
    pub fn positions(&self) -> Option<Vec<f64>> {
        match self {
            BasisSpec::Fock { .. } => None,
            BasisSpec::Grid { grid } => Some(grid.interior_nodes()),
            BasisSpec::Periodic { grid } => Some((0..grid.points).map(|j| grid.node(j)).collect()),
        }
    }
}

#[derive(Debug, Clone)]
enum Storage {
    Dense(DMatrix<C64>),
    Tridiagonal(SymTridiagonal),
}

/// A square operator on a truncated Hilbert space.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    storage: Storage,
    basis: BasisSpec,
    hermitian: bool,
}

fn hermiticity_deviation(m: &DMatrix<C64>) -> (f64, f64) {
    let n = m.nrows();
    let mut dev = 0.0_f64;
    let mut max = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
            max = max.max(m[(i, j)].norm());
        }
    }
    (dev, max)
}

impl OperatorMatrix {
    /// Wraps a dense matrix, recording whether it is Hermitian.
    pub fn dense(entries: DMatrix<C64>, basis: BasisSpec) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::InvalidParameter("operator matrix must be square".into()));
        }
        if entries.nrows() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), got: entries.nrows() });
        }
        let (dev, max) = hermiticity_deviation(&entries);
        let hermitian = dev <= HERMITIAN_RTOL * max;
        Ok(Self { storage: Storage::Dense(entries), basis, hermitian })
    }

    /// Wraps a dense matrix that must be Hermitian.
    pub fn hermitian(entries: DMatrix<C64>, basis: BasisSpec) -> Result<Self> {
        let op = Self::dense(entries, basis)?;
        op.require_hermitian()?;
        Ok(op)
    }

    pub fn tridiagonal(t: SymTridiagonal, basis: BasisSpec) -> Result<Self> {
        if t.dim() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), got: t.dim() });
        }
        Ok(Self { storage: Storage::Tridiagonal(t), basis, hermitian: true })
    }

    /// Real diagonal operator on a Fock-labelled basis of matching size.
    pub fn from_diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let m = DMatrix::from_diagonal(&DVector::from_iterator(n, values.iter().map(|&v| C64::new(v, 0.0))));
        Self { storage: Storage::Dense(m), basis: BasisSpec::Fock { dim: n }, hermitian: true }
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn as_tridiagonal(&self) -> Option<&SymTridiagonal> {
        match &self.storage {
            Storage::Tridiagonal(t) => Some(t),
            Storage::Dense(_) => None,
        }
    }

    /// Dense entries; tridiagonal operators are expanded on demand.
    pub fn to_dense(&self) -> Cow<'_, DMatrix<C64>> {
        match &self.storage {
            Storage::Dense(m) => Cow::Borrowed(m),
            Storage::Tridiagonal(t) => {
                let n = t.dim();
                let mut m = DMatrix::zeros(n, n);
                for i in 0..n {
                    m[(i, i)] = C64::new(t.diag[i], 0.0);
                    if i + 1 < n {
                        m[(i, i + 1)] = C64::new(t.off[i], 0.0);
                        m[(i + 1, i)] = C64::new(t.off[i], 0.0);
                    }
                }
                Cow::Owned(m)
            }
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        match &self.storage {
            Storage::Dense(m) => m[(i, j)],
            Storage::Tridiagonal(t) => {
                if i == j {
                    C64::new(t.diag[i], 0.0)
                } else if i + 1 == j {
                    C64::new(t.off[i], 0.0)
                } else if j + 1 == i {
                    C64::new(t.off[j], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
        }
    }

    /// `max|A - A^dagger|` and `max|A|`.
    pub fn hermiticity_deviation(&self) -> (f64, f64) {
        match &self.storage {
            Storage::Dense(m) => hermiticity_deviation(m),
            Storage::Tridiagonal(t) => {
                let max = t.diag.iter().chain(&t.off).fold(0.0_f64, |a, v| a.max(v.abs()));
                (0.0, max)
            }
        }
    }

    pub(crate) fn require_hermitian(&self) -> Result<()> {
        if self.hermitian {
            return Ok(());
        }
        let (dev, max) = self.hermiticity_deviation();
        Err(Error::NotHermitian { deviation: dev, allowed: HERMITIAN_RTOL * max })
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.dim() });
        }
        let components = match &self.storage {
            Storage::Dense(m) => m * &v.components,
            Storage::Tridiagonal(t) => {
                let n = t.dim();
                DVector::from_iterator(
                    n,
                    (0..n).map(|i| {
                        let mut y = v.components[i] * t.diag[i];
                        if i > 0 {
                            y += v.components[i - 1] * t.off[i - 1];
                        }
                        if i + 1 < n {
                            y += v.components[i + 1] * t.off[i];
                        }
                        y
                    }),
                )
            }
        };
        Ok(StateVector { components, basis: self.basis })
    }

    /// `A - c I`.
    pub fn shifted(&self, c: f64) -> Self {
        let storage = match &self.storage {
            Storage::Dense(m) => {
                let n = m.nrows();
                Storage::Dense(m - DMatrix::<C64>::identity(n, n) * C64::new(c, 0.0))
            }
            Storage::Tridiagonal(t) => Storage::Tridiagonal(SymTridiagonal::new(
                t.diag.iter().map(|d| d - c).collect(),
                t.off.clone(),
            )),
        };
        Self { storage, basis: self.basis, hermitian: self.hermitian }
    }

    /// Writes `(row, col, re, im)` rows for every non-zero entry.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "row,col,re,im")?;
        let n = self.dim();
        for i in 0..n {
            let cols: Box<dyn Iterator<Item = usize>> = match &self.storage {
                Storage::Dense(_) => Box::new(0..n),
                Storage::Tridiagonal(_) => Box::new(i.saturating_sub(1)..(i + 2).min(n)),
            };
            for j in cols {
                let z = self.entry(i, j);
                if z.re != 0.0 || z.im != 0.0 {
                    writeln!(w, "{i},{j},{:e},{:e}", z.re, z.im)?;
                }
            }
        }
        Ok(())
    }
}

/// A state in a truncated representation. Not forced to unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub components: DVector<C64>,
    pub basis: BasisSpec,
}

impl StateVector {
    pub fn new(components: DVector<C64>, basis: BasisSpec) -> Result<Self> {
        if components.len() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), got: components.len() });
        }
        if components.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("state vector has non-finite entries".into()));
        }
        Ok(Self { components, basis })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn norm(&self) -> f64 {
        self.components.norm()
    }

    /// `|1 - ||v|||`, the weight lost to truncation for nominally normalised
    /// states.
    pub fn norm_defect(&self) -> f64 {
        (1.0 - self.norm()).abs()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.components.dotc(&other.components)
    }
}

/// Coherent-state label. `(p, q)` always; `(s, t)` in the extended
/// reparameterization sector; `(pi, lambda)` in the multiplier sector.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhasePoint {
    pub p: f64,
    pub q: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

impl PhasePoint {
    pub fn new(p: f64, q: f64) -> Self {
        Self { p, q, ..Default::default() }
    }

    /// `(p, q, t)` label of the reduced kernel.
    pub fn timed(p: f64, q: f64, t: f64) -> Self {
        Self { p, q, t: Some(t), ..Default::default() }
    }

    /// `(p, q, s, t)` label of the extended kernel.
    pub fn extended(p: f64, q: f64, s: f64, t: f64) -> Self {
        Self { p, q, s: Some(s), t: Some(t), ..Default::default() }
    }

    pub fn s_or_zero(&self) -> f64 {
        self.s.unwrap_or(0.0)
    }

    pub fn t_or_zero(&self) -> f64 {
        self.t.unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [Some(self.p), Some(self.q), self.s, self.t, self.pi, self.lambda];
        if all.iter().flatten().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("phase point has non-finite coordinates: {self:?}")))
        }
    }
}

/// `<k|p,q> = pi^(-1/4) exp[-(k-p)^2/2 - i k q]`.
pub fn momentum_amplitude(p: f64, q: f64, k: f64) -> C64 {
    let norm = PI.powf(-0.25);
    C64::new(-0.5 * (k - p).powi(2), -k * q).exp() * norm
}

/// `<x|p,q> = pi^(-1/4) exp[i p (x-q) - (x-q)^2/2]`.
pub fn position_amplitude(p: f64, q: f64, x: f64) -> C64 {
    let norm = PI.powf(-0.25);
    C64::new(-0.5 * (x - q).powi(2), p * (x - q)).exp() * norm
}

/// One term `coeff * W_1 W_2 ... W_k` with each `W_i` either `P` or `Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: f64,
    /// Operator word over `P` and `Q`, applied as a left-to-right product.
    /// The empty word is the identity.
    #[serde(default)]
    pub word: String,
}

/// A polynomial in `P` and `Q` with real coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polynomial {
    pub terms: Vec<Term>,
}

impl Polynomial {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(mut self, coeff: f64, word: &str) -> Self {
        self.terms.push(Term { coeff, word: word.to_string() });
        self
    }

    /// `P^2 + Q^2 + g Q^4 - c`.
    pub fn quartic(g: f64, c: f64) -> Self {
        let mut poly = Self::new().term(1.0, "PP").term(1.0, "QQ");
        if g != 0.0 {
            poly = poly.term(g, "QQQQ");
        }
        if c != 0.0 {
            poly = poly.term(-c, "");
        }
        poly
    }
}

/// Bounded potentials available to grid operators from configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential {
    Zero,
    /// `coeff * q^2`
    Quadratic { coeff: f64 },
    /// `-(1+q^2)^(-3/2) + q^2/(1+q^2)`
    Mixed,
}

impl Potential {
    pub fn eval(&self, q: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Quadratic { coeff } => coeff * q * q,
            Potential::Mixed => crate::constraint::mixed_potential(q),
        }
    }
}

/// Operator expression: a `P, Q` polynomial (Fock basis) or a kinetic term
/// `kinetic * p^2` plus a potential (grid basis).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum OperatorExpr {
    Polynomial(Polynomial),
    Schrodinger { kinetic: f64, potential: Potential },
}

/// Ladder-operator position and momentum on an `N`-level Fock space.
pub fn canonical_pair(dim: usize) -> (DMatrix<C64>, DMatrix<C64>) {
    let mut q = DMatrix::zeros(dim, dim);
    let mut p = DMatrix::zeros(dim, dim);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for n in 0..dim.saturating_sub(1) {
        let s = ((n + 1) as f64).sqrt() * r;
        q[(n, n + 1)] = C64::new(s, 0.0);
        q[(n + 1, n)] = C64::new(s, 0.0);
        // a_{n,n+1} = sqrt(n+1); P = i (a^dagger - a)/sqrt 2
        p[(n, n + 1)] = C64::new(0.0, -s);
        p[(n + 1, n)] = C64::new(0.0, s);
    }
    (q, p)
}

fn polynomial_matrix(poly: &Polynomial, dim: usize) -> Result<DMatrix<C64>> {
    let (q, p) = canonical_pair(dim);
    let mut total = DMatrix::<C64>::zeros(dim, dim);
    for term in &poly.terms {
        if !term.coeff.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite coefficient in term {:?}", term.word)));
        }
        let mut product = DMatrix::<C64>::identity(dim, dim);
        for c in term.word.chars() {
            product = match c {
                'P' | 'p' => product * &p,
                'Q' | 'q' => product * &q,
                ' ' | '*' => continue,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "operator word {:?} contains {other:?}; only P and Q are allowed",
                        term.word
                    )))
                }
            };
        }
        total += product * C64::new(term.coeff, 0.0);
    }
    Ok(total)
}

/// Builds the Hermitian matrix of `expr` in `basis`.
pub fn build_operator(expr: &OperatorExpr, basis: &BasisSpec) -> Result<OperatorMatrix> {
    basis.validate()?;
    match (expr, basis) {
        (OperatorExpr::Polynomial(poly), BasisSpec::Fock { dim }) => {
            let m = polynomial_matrix(poly, *dim)?;
            OperatorMatrix::hermitian(m, *basis)
        }
        (OperatorExpr::Schrodinger { kinetic, potential }, BasisSpec::Grid { grid }) => {
            build_grid_operator(*kinetic, |q| potential.eval(q), grid)
        }
        (OperatorExpr::Polynomial(_), _) => {
            Err(Error::Unsupported("P, Q polynomials are built in the Fock basis".into()))
        }
        (OperatorExpr::Schrodinger { .. }, _) => {
            Err(Error::Unsupported("kinetic-plus-potential operators are built on a Dirichlet grid".into()))
        }
    }
}

/// `kinetic * p^2 + V(q)` on the interior nodes of a Dirichlet grid, with
/// `p^2` the three-point central difference.
pub fn build_grid_operator<V: Fn(f64) -> f64>(kinetic: f64, potential: V, grid: &GridSpec) -> Result<OperatorMatrix> {
    grid.validate()?;
    if !kinetic.is_finite() {
        return Err(Error::InvalidParameter("kinetic coefficient must be finite".into()));
    }
    let h = grid.spacing();
    let nodes = grid.interior_nodes();
    let stencil = kinetic / (h * h);
    let mut diag = Vec::with_capacity(nodes.len());
    for &q in &nodes {
        let v = potential(q);
        if !v.is_finite() {
            return Err(Error::NonFinitePotential { q });
        }
        diag.push(2.0 * stencil + v);
    }
    let off = vec![-stencil; nodes.len() - 1];
    OperatorMatrix::tridiagonal(SymTridiagonal::new(diag, off), BasisSpec::Grid { grid: *grid })
}

/// Coherent state `|p,q>` expressed in `basis`.
///
/// In the Fock basis the amplitudes are
/// `<n|p,q> = e^{-i p q/2} e^{-|z|^2/2} z^n / sqrt(n!)` with
/// `z = (q + i p)/sqrt 2`, which is the Hermite-function expansion of the
/// momentum-space Gaussian. On grids the position wavefunction is sampled
/// with the `sqrt(h)` quadrature weight.
pub fn coherent_state(point: &PhasePoint, basis: &BasisSpec) -> Result<StateVector> {
    point.validate()?;
    basis.validate()?;
    let (p, q) = (point.p, point.q);
    let components = match basis {
        BasisSpec::Fock { dim } => {
            let z = C64::new(q, p) * std::f64::consts::FRAC_1_SQRT_2;
            let mut c = C64::new(-0.5 * z.norm_sqr(), -0.5 * p * q).exp();
            let mut v = DVector::zeros(*dim);
            for n in 0..*dim {
                v[n] = c;
                c = c * z / ((n + 1) as f64).sqrt();
            }
            v
        }
        BasisSpec::Grid { grid } | BasisSpec::Periodic { grid } => {
            let w = grid.spacing().sqrt();
            let xs = basis.positions().expect("grid basis has positions");
            DVector::from_iterator(xs.len(), xs.iter().map(|&x| position_amplitude(p, q, x) * w))
        }
    };
    let state = StateVector::new(components, *basis)?;
    let defect = state.norm_defect();
    if defect > 1e-6 {
        log::warn!(
            "coherent state at (p, q) = ({p}, {q}) lost {defect:e} of its norm to truncation; \
             the point lies outside the reliable region of this basis"
        );
    }
    Ok(state)
}

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
    pub basis: BasisSpec,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, i: usize) -> StateVector {
        StateVector { components: self.vectors.column(i).into_owned(), basis: self.basis }
    }

    /// `sum_m g(phi_m) v_m v_m^dagger`.
    pub fn function<G: Fn(f64) -> C64>(&self, g: G) -> DMatrix<C64> {
        let weights: Vec<C64> = self.values.iter().map(|&v| g(v)).collect();
        self.function_from_values(&weights)
    }

    /// Same as [`Self::function`] with the filter values precomputed.
    pub fn function_from_values(&self, weights: &[C64]) -> DMatrix<C64> {
        assert_eq!(weights.len(), self.len());
        let mut scaled = self.vectors.clone();
        for (j, w) in weights.iter().enumerate() {
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= *w;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// Sum of `v_m v_m^dagger` over the selected indices.
    pub fn projector<I: IntoIterator<Item = usize>>(&self, indices: I) -> DMatrix<C64> {
        let n = self.vectors.nrows();
        let mut e = DMatrix::zeros(n, n);
        for m in indices {
            let v = self.vectors.column(m);
            e += &v * v.adjoint();
        }
        e
    }
}

/// Full eigendecomposition of a Hermitian operator.
///
/// Tridiagonal grid operators are densified up to
/// [`DENSE_TRIDIAGONAL_LIMIT`] nodes; larger ones must use
/// [`eigenpair`] / [`eigenvalues_in_range`].
pub fn eigendecompose(op: &OperatorMatrix) -> Result<Spectrum> {
    op.require_hermitian()?;
    if op.as_tridiagonal().is_some() && op.dim() > DENSE_TRIDIAGONAL_LIMIT {
        return Err(Error::Unsupported(format!(
            "grid operator with {} nodes is too large for a dense eigendecomposition; \
             request individual eigenpairs instead",
            op.dim()
        )));
    }
    let dense = op.to_dense();
    let sym = (dense.as_ref() + dense.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>());
    Ok(Spectrum { values, vectors, basis: *op.basis() })
}

/// Ascending eigenvalues with indices in `range`.
pub fn eigenvalues_in_range(op: &OperatorMatrix, range: std::ops::Range<usize>) -> Result<Vec<f64>> {
    op.require_hermitian()?;
    if range.end > op.dim() {
        return Err(Error::InvalidParameter(format!(
            "eigenvalue range {range:?} exceeds dimension {}",
            op.dim()
        )));
    }
    match op.as_tridiagonal() {
        Some(t) => Ok(t.eigenvalues(range)),
        None => Ok(eigendecompose(op)?.values[range].to_vec()),
    }
}

/// The `index`-th eigenpair (ascending order).
pub fn eigenpair(op: &OperatorMatrix, index: usize) -> Result<(f64, StateVector)> {
    op.require_hermitian()?;
    if index >= op.dim() {
        return Err(Error::InvalidParameter(format!("eigen index {index} out of range")));
    }
    match op.as_tridiagonal() {
        Some(t) => {
            let value = t.eigenvalue(index);
            let v = t.eigenvector(value);
            let components = DVector::from_iterator(v.len(), v.into_iter().map(|x| C64::new(x, 0.0)));
            Ok((value, StateVector { components, basis: *op.basis() }))
        }
        None => {
            let s = eigendecompose(op)?;
            Ok((s.values[index], s.vector(index)))
        }
    }
}

/// Index of the eigenvalue closest to `target`.
pub fn index_nearest(op: &OperatorMatrix, target: f64) -> Result<usize> {
    op.require_hermitian()?;
    match op.as_tridiagonal() {
        Some(t) => {
            let below = t.count_below(target);
            let candidates: Vec<usize> = [below.checked_sub(1), Some(below)]
                .into_iter()
                .flatten()
                .filter(|&i| i < t.dim())
                .collect();
            Ok(candidates
                .into_iter()
                .min_by(|&a, &b| (t.eigenvalue(a) - target).abs().total_cmp(&(t.eigenvalue(b) - target).abs()))
                .expect("non-empty operator"))
        }
        None => {
            let s = eigendecompose(op)?;
            Ok((0..s.len())
                .min_by(|&a, &b| (s.values[a] - target).abs().total_cmp(&(s.values[b] - target).abs()))
                .expect("non-empty operator"))
        }
    }
}

/// Spectral norm `max |eigenvalue|` of a Hermitian operator.
pub fn operator_norm(op: &OperatorMatrix) -> Result<f64> {
    op.require_hermitian()?;
    match op.as_tridiagonal() {
        Some(t) => Ok(t.eigenvalue(0).abs().max(t.eigenvalue(t.dim() - 1).abs())),
        None => Ok(hermitian_norm(&op.to_dense())),
    }
}

/// Spectral norm of a dense Hermitian matrix.
pub fn hermitian_norm(m: &DMatrix<C64>) -> f64 {
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    sym.symmetric_eigenvalues().iter().fold(0.0_f64, |a, v| a.max(v.abs()))
}

/// Largest singular value of an arbitrary dense matrix.
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    hermitian_norm(&(m.adjoint() * m)).sqrt()
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}
