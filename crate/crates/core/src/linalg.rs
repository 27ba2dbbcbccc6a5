//! Dense complex linear algebra and randomness.
//!
//! Thin layer over `nalgebra` that fixes conventions the rest of the crate
//! relies on: ascending eigenvalues, descending singular values, and a
//! deterministic phase for every returned vector (first non-negligible
//! component real and positive).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Default tolerances. All public checks accept an explicit tolerance; these
/// are the values used when none is given.
pub mod tol {
    /// Hermiticity (max absolute entry deviation) accepted before symmetrizing.
    pub const HERMITIAN: f64 = 1e-10;
    /// Unitarity, measured as `‖UU† − I‖_F`.
    pub const UNITARY: f64 = 1e-10;
    /// Unit-norm deviation for vectors.
    pub const UNIT: f64 = 1e-10;
    /// Components below this magnitude are skipped when fixing a vector phase.
    pub const PHASE: f64 = 1e-12;
}

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> ComplexMatrix {
    assert_eq!(data.len(), rows * cols);
    ComplexMatrix::from_fn(rows, cols, |i, j| c64(data[i * cols + j], 0.0))
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

pub fn basis_vector(dim: usize, k: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(dim);
    v[k] = Complex64::ONE;
    v
}

/// `|v⟩⟨w|`
pub fn outer(v: &ComplexVector, w: &ComplexVector) -> ComplexMatrix {
    v * w.adjoint()
}

/// `⟨v|w⟩`, conjugate-linear in the first argument.
pub fn inner(v: &ComplexVector, w: &ComplexVector) -> Complex64 {
    v.dotc(w)
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.norm()
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )))
    }
}

/// Largest absolute entry of `M − M†`.
pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(M + M†)/2`; exact on inputs that are already Hermitian.
pub fn symmetrize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Checks squareness, finiteness and Hermiticity within `tol`, then
/// returns the symmetrized matrix.
pub fn checked_hermitian(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    ensure_square(m)?;
    if !is_finite(m) {
        return Err(Error::NonFinite);
    }
    let deviation = hermitian_deviation(m);
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(symmetrize(m))
}

/// `‖UU† − I‖_F`
pub fn unitarity_deviation(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    frobenius(&(u * u.adjoint() - identity(u.nrows())))
}

pub fn ensure_unitary(u: &ComplexMatrix, tol: f64) -> Result<()> {
    ensure_square(u)?;
    let deviation = unitarity_deviation(u);
    if deviation > tol {
        Err(Error::NotUnitary { deviation })
    } else {
        Ok(())
    }
}

pub fn ensure_unit(v: &ComplexVector, tol: f64) -> Result<()> {
    let norm = v.norm();
    if (norm - 1.0).abs() > tol {
        Err(Error::NotUnit { norm })
    } else {
        Ok(())
    }
}

/// Multiplies `v` by the phase making its first non-negligible component
/// real and positive; returns that phase.
fn fix_phase(v: &mut [Complex64]) -> Complex64 {
    match v.iter().find(|z| z.norm() > tol::PHASE) {
        Some(&z) => {
            let phase = z.conj() / z.norm();
            v.iter_mut().for_each(|x| *x *= phase);
            phase
        }
        None => Complex64::ONE,
    }
}

/// Orders two phase-fixed vectors: lexicographically larger magnitudes first.
fn tie_order(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = y.norm().total_cmp(&x.norm());
        if ord.is_ne() {
            return ord;
        }
    }
    std::cmp::Ordering::Equal
}

#[derive(Debug, Clone)]
pub struct HermitianEigenSystem {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the unit eigenvector for `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    pub fn eigenvector(&self, k: usize) -> ComplexVector {
        self.eigenvectors.column(k).into_owned()
    }

    /// Number of eigenvalues within `tol` of the smallest one.
    pub fn min_multiplicity(&self, tol: f64) -> usize {
        let lo = self.min_eigenvalue();
        self.eigenvalues
            .iter()
            .take_while(|&&l| l - lo <= tol)
            .count()
    }

    /// Projector onto the span of the first `k` eigenvectors.
    pub fn lower_projector(&self, k: usize) -> ComplexMatrix {
        let cols = self.eigenvectors.columns(0, k);
        cols * cols.adjoint()
    }

    /// `Σ λ_k |v_k⟩⟨v_k|`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let diag =
            ComplexVector::from_iterator(self.dim(), self.eigenvalues.iter().map(|&l| c64(l, 0.0)));
        &self.eigenvectors * ComplexMatrix::from_diagonal(&diag) * self.eigenvectors.adjoint()
    }
}

/// Eigendecomposition of a Hermitian matrix (symmetrized internally).
///
/// Eigenvalues ascend. Each eigenvector has its first non-negligible
/// component real-positive; within a group of equal eigenvalues the vectors
/// are ordered by descending lexicographic magnitude.
pub fn hermitian_eigendecompose(m: &ComplexMatrix) -> Result<HermitianEigenSystem> {
    let h = checked_hermitian(m, tol::HERMITIAN)?;
    let n = h.nrows();
    if n == 0 {
        return Ok(HermitianEigenSystem {
            eigenvalues: Vec::new(),
            eigenvectors: h,
        });
    }
    let eig = h.symmetric_eigen();
    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|k| {
            let mut v: Vec<Complex64> = eig.eigenvectors.column(k).iter().copied().collect();
            fix_phase(&mut v);
            (eig.eigenvalues[k], v)
        })
        .collect();
    let scale = pairs
        .iter()
        .fold(0.0f64, |s, p| s.max(p.0.abs()))
        .max(1e-300);
    let tie = 64.0 * f64::EPSILON * scale;
    pairs.sort_by(|a, b| {
        if (a.0 - b.0).abs() <= tie {
            tie_order(&a.1, &b.1)
        } else {
            a.0.total_cmp(&b.0)
        }
    });
    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| pairs[j].1[i]);
    Ok(HermitianEigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Ascending eigenvalues only.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let h = checked_hermitian(m, tol::HERMITIAN)?;
    let mut vals: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?.first().copied().unwrap_or(0.0))
}

#[derive(Debug, Clone)]
pub struct SingularSystem {
    /// Descending, non-negative.
    pub singular_values: Vec<f64>,
    /// Columns are the left singular vectors `u_k`.
    pub left_vectors: ComplexMatrix,
    /// Columns are the right singular vectors `v_k`.
    pub right_vectors: ComplexMatrix,
}

impl SingularSystem {
    pub fn norm(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn left(&self, k: usize) -> ComplexVector {
        self.left_vectors.column(k).into_owned()
    }

    pub fn right(&self, k: usize) -> ComplexVector {
        self.right_vectors.column(k).into_owned()
    }

    /// Number of singular values within `tol` of the largest one.
    pub fn top_multiplicity(&self, tol: f64) -> usize {
        let hi = self.norm();
        self.singular_values
            .iter()
            .take_while(|&&s| hi - s <= tol)
            .count()
    }

    /// `Σ s_k |u_k⟩⟨v_k|`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.singular_values.len();
        let diag =
            ComplexVector::from_iterator(k, self.singular_values.iter().map(|&s| c64(s, 0.0)));
        &self.left_vectors * ComplexMatrix::from_diagonal(&diag) * self.right_vectors.adjoint()
    }
}

/// Thin SVD with descending singular values. The phase convention is fixed
/// on the right vectors and carried to the matching left vectors.
pub fn singular_value_decompose(m: &ComplexMatrix) -> SingularSystem {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return SingularSystem {
            singular_values: Vec::new(),
            left_vectors: ComplexMatrix::zeros(rows, 0),
            right_vectors: ComplexMatrix::zeros(cols, 0),
        };
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("left vectors requested");
    let v = svd.v_t.expect("right vectors requested").adjoint();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let mut singular_values = Vec::with_capacity(k);
    let mut left_vectors = ComplexMatrix::zeros(rows, k);
    let mut right_vectors = ComplexMatrix::zeros(cols, k);
    for (dst, &src) in order.iter().enumerate() {
        let mut right: Vec<Complex64> = v.column(src).iter().copied().collect();
        let phase = fix_phase(&mut right);
        singular_values.push(svd.singular_values[src].max(0.0));
        for i in 0..cols {
            right_vectors[(i, dst)] = right[i];
        }
        for i in 0..rows {
            left_vectors[(i, dst)] = u[(i, src)] * phase;
        }
    }
    SingularSystem {
        singular_values,
        left_vectors,
        right_vectors,
    }
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0f64, |a, &s| a.max(s))
}

/// `λmin(M) ≥ −tol`
pub fn is_positive_semidefinite(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(min_eigenvalue(m)? >= -tol)
}

/// Haar-distributed unitary: QR of a standard complex Gaussian matrix with
/// the phases of `diag(R)` moved into `Q`.
pub fn random_haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re * scale, im * scale)
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::ONE
        };
        q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    q
}

/// Kronecker product; `(X⊗Y)[i·p + k, j·q + l] = X[i,j]·Y[k,l]`.
pub fn kron(x: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
    x.kronecker(y)
}

/// `e^{iH}` for Hermitian `H`.
pub fn exp_i_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigendecompose(h)?;
    let phases = ComplexVector::from_iterator(
        eig.dim(),
        eig.eigenvalues
            .iter()
            .map(|&l| Complex64::from_polar(1.0, l)),
    );
    Ok(&eig.eigenvectors * ComplexMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint())
}

/// Extends the orthonormal columns of `partial` to a full orthonormal basis
/// by Gram–Schmidt against the standard basis.
pub fn complete_orthonormal_basis(partial: &ComplexMatrix) -> ComplexMatrix {
    let n = partial.nrows();
    let mut cols: Vec<ComplexVector> = partial.column_iter().map(|c| c.into_owned()).collect();
    let mut k = 0;
    while cols.len() < n && k < n {
        let mut v = basis_vector(n, k);
        // two passes for numerical orthogonality
        for _ in 0..2 {
            for c in &cols {
                let proj = inner(c, &v);
                v -= c * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v.unscale(norm));
        }
        k += 1;
    }
    ComplexMatrix::from_columns(&cols)
}
