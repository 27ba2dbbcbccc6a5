//! Explicit separable decompositions of qubit–qudit states whose spectrum
//! satisfies `λ₁ ≤ λ_{2n−1} + 2√(λ_{2n−2}λ_{2n})`.
//!
//! The pipeline rotates the qubit by `U(t*)` until the blocks of
//! `(U⊗I)†ρ(U⊗I) = [[A, B], [B†, C]]` satisfy `‖B‖² ≤ λmin(A)·λmin(C)`,
//! decomposes the rotated state into product terms, and rotates every qubit
//! factor back.

mod align;
mod lemma;
mod rotation;

pub use align::{construct_aligning_unitary, ALIGNMENT_TOL};
pub use lemma::{
    contraction_to_unitaries, decompose_lemma1, unitary_core_to_products, CONTRACTION_TOL,
    LEMMA_TOL, WEIGHT_FLOOR,
};
pub use rotation::{
    alignment_vectors, block_gap, certificate_at, evaluate_f_bracket, find_admissible_rotation,
    gap_of_blocks, golden_section_minimize, rotated_blocks, rotation_family, ADMISSIBLE_GAP,
};

use crate::criteria::abs_sep_condition;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector};
use crate::state::BipartiteDensityMatrix;

/// Parameter `t` of the rotation family `U(t)`; canonical range `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationParameter {
    pub t: f64,
}

impl RotationParameter {
    pub fn new(t: f64) -> Self {
        Self { t }
    }

    pub fn unitary(&self) -> ComplexMatrix {
        rotation_family(self.t)
    }
}

/// One evaluation of the overlap difference `|⟨a_min|b_l⟩| − |⟨b_r|c_min⟩|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FSample {
    pub t: f64,
    /// Value for the deterministically selected vectors.
    pub f_selected: f64,
    /// Bounds containing every value attainable by other vector choices.
    pub f_lo: f64,
    pub f_hi: f64,
    /// Some eigenspace or singular space involved has dimension > 1.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentVectors {
    pub a_min: ComplexVector,
    pub c_min: ComplexVector,
    pub b_l: ComplexVector,
    pub b_r: ComplexVector,
}

/// `weight · |qubit⟩⟨qubit| ⊗ |qudit⟩⟨qudit|`
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTerm {
    pub weight: f64,
    pub qubit: ComplexVector,
    pub qudit: ComplexVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparableDecomposition {
    pub terms: Vec<ProductTerm>,
    /// Frobenius distance between the reassembled sum and its source.
    pub reconstruction_error: f64,
}

impl SeparableDecomposition {
    pub fn total_weight(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    /// Qudit dimension, or 0 for an empty decomposition.
    pub fn dim_b(&self) -> usize {
        self.terms.first().map_or(0, |t| t.qudit.len())
    }

    pub fn reassemble(&self) -> ComplexMatrix {
        lemma::reassemble_terms(&self.terms, self.dim_b())
    }
}

/// Data proving that the rotated blocks satisfy the block inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionCertificate {
    pub t_star: f64,
    pub lambda_min_a: f64,
    pub lambda_min_c: f64,
    pub norm_b: f64,
    /// `λmin(A)·λmin(C) − ‖B‖²`
    pub inequality_margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecomposeOptions {
    /// Grid points on `[0, 1]` for the rotation scan.
    pub grid: usize,
    /// Golden-section stopping width in `t`.
    pub refine_tol: f64,
    /// Refuse spectra failing the eigenvalue condition up front.
    pub require_condition: bool,
    /// Largest accepted Frobenius reconstruction error.
    pub max_reconstruction_error: f64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            grid: 1024,
            refine_tol: 1e-12,
            require_condition: true,
            max_reconstruction_error: 1e-8,
        }
    }
}

/// Full pipeline with default options.
pub fn decompose(
    rho: &BipartiteDensityMatrix,
) -> Result<(SeparableDecomposition, DecompositionCertificate)> {
    decompose_with(rho, &DecomposeOptions::default())
}

pub fn decompose_with(
    rho: &BipartiteDensityMatrix,
    opts: &DecomposeOptions,
) -> Result<(SeparableDecomposition, DecompositionCertificate)> {
    let (dim_a, n) = rho.dims();
    if dim_a != 2 {
        return Err(Error::Dimension(format!(
            "decomposition needs a qubit first factor, got dim_a = {dim_a}"
        )));
    }
    // n = 1 states are products already; the condition is only defined for n >= 2
    if opts.require_condition && n >= 2 {
        let report = abs_sep_condition(&rho.spectrum(), n)?;
        if !report.holds {
            return Err(Error::SpectralCondition {
                margin: report.margin,
            });
        }
    }

    let (t, certificate) = find_admissible_rotation(rho, opts.grid, opts.refine_tol)?;
    let u = t.unitary();
    let rotated = rotated_blocks(&rho.to_blocks()?, t.t);
    let mut decomposition = decompose_lemma1(&rotated)?;
    for term in &mut decomposition.terms {
        term.qubit = &u * &term.qubit;
    }
    decomposition.reconstruction_error = verify_decomposition(rho, &decomposition).distance;
    let error = decomposition.reconstruction_error;
    if error.is_nan() || error > opts.max_reconstruction_error {
        return Err(Error::Numerical(format!(
            "reconstruction error {:.3e} exceeds {:.1e}",
            decomposition.reconstruction_error, opts.max_reconstruction_error
        )));
    }
    Ok((decomposition, certificate))
}

/// Measurements comparing a decomposition to a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verification {
    /// Frobenius distance between `ρ` and the reassembled sum.
    pub distance: f64,
    /// `|Σ weights − 1|`
    pub weight_sum_deviation: f64,
    /// Largest `| ‖v‖ − 1 |` over all qubit and qudit vectors.
    pub max_unit_deviation: f64,
    /// Terms whose weight is below `-1e-12`.
    pub negative_weights: usize,
    /// Terms whose vectors have the wrong length for `ρ`.
    pub shape_mismatches: usize,
}

impl Verification {
    pub fn passes(&self, tol: f64) -> bool {
        self.distance <= tol
            && self.weight_sum_deviation <= tol
            && self.max_unit_deviation <= tol
            && self.negative_weights == 0
            && self.shape_mismatches == 0
    }
}

/// Measures how well `d` reproduces `ρ`. Violations of positivity and
/// normalization are reported separately, not folded into the distance.
pub fn verify_decomposition(
    rho: &BipartiteDensityMatrix,
    d: &SeparableDecomposition,
) -> Verification {
    let (dim_a, dim_b) = rho.dims();
    let shape_mismatches = d
        .terms
        .iter()
        .filter(|t| t.qubit.len() != dim_a || t.qudit.len() != dim_b)
        .count();
    let distance = if shape_mismatches == 0 && dim_a == 2 {
        linalg::frobenius(&(lemma::reassemble_terms(&d.terms, dim_b) - rho.matrix()))
    } else {
        f64::INFINITY
    };
    let max_unit_deviation = d
        .terms
        .iter()
        .flat_map(|t| [t.qubit.norm(), t.qudit.norm()])
        .map(|norm| (norm - 1.0).abs())
        .fold(0.0, f64::max);
    Verification {
        distance,
        weight_sum_deviation: (d.total_weight() - 1.0).abs(),
        max_unit_deviation,
        negative_weights: d.terms.iter().filter(|t| t.weight < -1e-12).count(),
        shape_mismatches,
    }
}
