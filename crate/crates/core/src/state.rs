//! Bipartite density matrices on `C^{dim_a} ⊗ C^{dim_b}`.
//!
//! Composite index is `a·dim_b + b` (first factor major), so for `dim_a = 2`
//! the matrix is the block matrix `[[A, B], [B†, C]]` with `n×n` blocks.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::linalg::{
    self, c64, checked_hermitian, ensure_unitary, hermitian_eigenvalues, kron, tol, ComplexMatrix,
    ComplexVector,
};

/// Tolerances used by state validation.
pub const TRACE_TOL: f64 = 1e-10;
pub const NEGATIVITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteDensityMatrix {
    dim_a: usize,
    dim_b: usize,
    matrix: ComplexMatrix,
}

impl BipartiteDensityMatrix {
    /// Validates `matrix` as a state on `C^{dim_a} ⊗ C^{dim_b}`: square of
    /// side `dim_a·dim_b`, Hermitian, unit trace and positive semidefinite
    /// (each within `1e-10`). The stored matrix is symmetrized.
    pub fn new(matrix: ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::Dimension("local dimensions must be positive".into()));
        }
        let side = dim_a * dim_b;
        if matrix.nrows() != side || matrix.ncols() != side {
            return Err(Error::Dimension(format!(
                "expected {side}x{side} matrix for dims ({dim_a}, {dim_b}), got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let matrix = match checked_hermitian(&matrix, tol::HERMITIAN) {
            Ok(m) => m,
            Err(Error::NotHermitian { deviation }) => {
                return Err(Error::NotAState(format!(
                    "Hermitian invariant violated (deviation {deviation:.3e})"
                )))
            }
            Err(e) => return Err(e),
        };
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotAState(format!(
                "trace invariant violated (trace = {trace})"
            )));
        }
        let lmin = hermitian_eigenvalues(&matrix)?[0];
        if lmin < -NEGATIVITY_TOL {
            return Err(Error::NotAState(format!(
                "positivity invariant violated (minimum eigenvalue {lmin:.3e})"
            )));
        }
        Ok(Self {
            dim_a,
            dim_b,
            matrix,
        })
    }

    /// For results of unitary conjugation of a valid state; only symmetrizes.
    fn from_trusted(matrix: ComplexMatrix, dim_a: usize, dim_b: usize) -> Self {
        Self {
            dim_a,
            dim_b,
            matrix: linalg::symmetrize(&matrix),
        }
    }

    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> Self {
        let d = dim_a * dim_b;
        Self {
            dim_a,
            dim_b,
            matrix: linalg::identity(d).unscale(d as f64),
        }
    }

    /// `|ψ⟩⟨ψ|` for a unit vector `ψ`.
    pub fn pure(psi: &ComplexVector, dim_a: usize, dim_b: usize) -> Result<Self> {
        linalg::ensure_unit(psi, tol::UNIT)?;
        Self::new(linalg::outer(psi, psi), dim_a, dim_b)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Splits a qubit–qudit state into its `n×n` blocks.
    pub fn to_blocks(&self) -> Result<BlockForm> {
        if self.dim_a != 2 {
            return Err(Error::Dimension(format!(
                "block form needs dim_a = 2, got {}",
                self.dim_a
            )));
        }
        let n = self.dim_b;
        Ok(BlockForm {
            a: self.matrix.view((0, 0), (n, n)).into_owned(),
            b: self.matrix.view((0, n), (n, n)).into_owned(),
            c: self.matrix.view((n, n), (n, n)).into_owned(),
        })
    }

    pub fn from_blocks(blocks: &BlockForm) -> Result<Self> {
        let n = blocks.dim();
        Self::new(blocks.assemble(), 2, n)
    }

    /// Transpose on the second factor: every `dim_b × dim_b` block is
    /// replaced by its (unconjugated) transpose.
    pub fn partial_transpose(&self) -> ComplexMatrix {
        partial_transpose(&self.matrix, self.dim_a, self.dim_b)
    }

    pub fn min_pt_eigenvalue(&self) -> f64 {
        min_pt_eigenvalue(&self.matrix, self.dim_a, self.dim_b)
    }

    /// `λmin(ρ^Γ) ≥ −tol`
    pub fn is_ppt(&self, tol: f64) -> bool {
        self.min_pt_eigenvalue() >= -tol
    }

    pub fn spectrum(&self) -> Spectrum {
        let mut values =
            hermitian_eigenvalues(&self.matrix).expect("state matrix is Hermitian by construction");
        values.reverse();
        Spectrum::from_sorted_unchecked(values)
    }

    /// `(U⊗I)† ρ (U⊗I)` for a `dim_a × dim_a` unitary `U`.
    pub fn conjugate_local(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.nrows() != self.dim_a || u.ncols() != self.dim_a {
            return Err(Error::Dimension(format!(
                "local unitary must be {0}x{0}",
                self.dim_a
            )));
        }
        ensure_unitary(u, tol::UNITARY)?;
        let full = kron(u, &linalg::identity(self.dim_b));
        Ok(self.conjugated_by(&full))
    }

    /// `U† ρ U` for a full-dimension unitary `U`.
    pub fn conjugate_global(&self, u: &ComplexMatrix) -> Result<Self> {
        let d = self.dim_a * self.dim_b;
        if u.nrows() != d || u.ncols() != d {
            return Err(Error::Dimension(format!("global unitary must be {d}x{d}")));
        }
        ensure_unitary(u, tol::UNITARY)?;
        Ok(self.conjugated_by(u))
    }

    fn conjugated_by(&self, u: &ComplexMatrix) -> Self {
        Self::from_trusted(u.adjoint() * &self.matrix * u, self.dim_a, self.dim_b)
    }
}

/// Partial transpose of a raw `(dim_a·dim_b)`-square matrix on its second factor.
pub fn partial_transpose(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> ComplexMatrix {
    let n = dim_b;
    let mut out = ComplexMatrix::zeros(dim_a * n, dim_a * n);
    for i in 0..dim_a {
        for j in 0..dim_a {
            for k in 0..n {
                for l in 0..n {
                    out[(i * n + k, j * n + l)] = m[(i * n + l, j * n + k)];
                }
            }
        }
    }
    out
}

pub fn min_pt_eigenvalue(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> f64 {
    hermitian_eigenvalues(&partial_transpose(m, dim_a, dim_b))
        .expect("partial transpose of a Hermitian matrix is Hermitian")[0]
}

/// `ρ = [[A, B], [B†, C]]`
#[derive(Debug, Clone, PartialEq)]
pub struct BlockForm {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
}

impl BlockForm {
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn assemble(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.a);
        m.view_mut((0, n), (n, n)).copy_from(&self.b);
        m.view_mut((n, 0), (n, n)).copy_from(&self.b.adjoint());
        m.view_mut((n, n), (n, n)).copy_from(&self.c);
        m
    }

    pub fn trace(&self) -> f64 {
        self.a.trace().re + self.c.trace().re
    }
}

/// Eigenvalues of a state, descending, negatives within `1e-10` clamped to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts descending, clamps tiny negatives and checks the sum is 1.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Dimension("empty spectrum".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        values.sort_by(|a, b| b.total_cmp(a));
        let last = *values.last().unwrap();
        if last < -NEGATIVITY_TOL {
            return Err(Error::NotAState(format!(
                "positivity invariant violated (eigenvalue {last:.3e})"
            )));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotAState(format!(
                "trace invariant violated (eigenvalues sum to {sum})"
            )));
        }
        values.iter_mut().for_each(|v| *v = v.max(0.0));
        Ok(Self { values })
    }

    fn from_sorted_unchecked(mut values: Vec<f64>) -> Self {
        values.iter_mut().for_each(|v| *v = v.max(0.0));
        Self { values }
    }

    pub fn uniform(len: usize) -> Self {
        Self {
            values: vec![1.0 / len as f64; len],
        }
    }

    /// Uniform sample from the probability simplex (flat Dirichlet).
    pub fn random_flat_dirichlet<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut values: Vec<f64> = (0..len.max(1)).map(|_| rng.sample(Exp1)).collect();
        let sum: f64 = values.iter().sum();
        values.iter_mut().for_each(|v| *v /= sum);
        values.sort_by(|a, b| b.total_cmp(a));
        Self::from_sorted_unchecked(values)
    }

    /// `(1 − s)·I/len + s·p` with `s` uniform on `[0, 1]` and `p` flat
    /// Dirichlet. Puts appreciable mass near the maximally mixed point at
    /// every `len`, where flat Dirichlet samples almost never land.
    pub fn random_near_uniform<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let s: f64 = rng.random();
        let p = Self::random_flat_dirichlet(len, rng);
        let base = (1.0 - s) / len.max(1) as f64;
        Self::from_sorted_unchecked(p.values.iter().map(|v| base + s * v).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// One-based access, `lambda(1)` is the largest eigenvalue.
    pub fn lambda(&self, k: usize) -> f64 {
        self.values[k - 1]
    }

    pub fn purity(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn diagonal_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
            self.len(),
            self.values.iter().map(|&v| c64(v, 0.0)),
        ))
    }
}

/// `QΛQ†` with Haar-random `Q`.
pub fn random_state_with_spectrum<R: Rng + ?Sized>(
    spectrum: &Spectrum,
    dims: (usize, usize),
    rng: &mut R,
) -> Result<BipartiteDensityMatrix> {
    let (dim_a, dim_b) = dims;
    if spectrum.len() != dim_a * dim_b {
        return Err(Error::Dimension(format!(
            "spectrum has {} entries, dims ({dim_a}, {dim_b}) need {}",
            spectrum.len(),
            dim_a * dim_b
        )));
    }
    let q = linalg::random_haar_unitary(dim_a * dim_b, rng);
    let m = &q * spectrum.diagonal_matrix() * q.adjoint();
    Ok(BipartiteDensityMatrix::from_trusted(m, dim_a, dim_b))
}

/// `|ψ⟩⟨ψ|` with `|ψ⟩ = (|00⟩ + |11⟩)/√2`.
pub fn bell_state() -> BipartiteDensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = ComplexVector::from_vec(vec![
        c64(s, 0.0),
        Complex64::ZERO,
        Complex64::ZERO,
        c64(s, 0.0),
    ]);
    BipartiteDensityMatrix::pure(&psi, 2, 2).expect("unit vector")
}
