use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{complete_orthonormal_basis, inner, ComplexMatrix, ComplexVector};

use super::AlignmentVectors;

/// Overlap moduli must agree to this precision for a unitary to exist.
pub const ALIGNMENT_TOL: f64 = 1e-8;

/// Below this norm the second Gram–Schmidt direction is treated as absent.
const PARALLEL_TOL: f64 = 1e-12;

/// Unitary `V` with `V|a_min⟩ = |b_r⟩` and `V|b_l⟩ = |c_min⟩`, after
/// multiplying `|a_min⟩` by the phase that makes `⟨a_min|b_l⟩ = ⟨b_r|c_min⟩`.
///
/// The pair `(a_min, b_l)` is orthonormalized and mapped onto the
/// orthonormalized pair `(b_r, c_min)`; the orthogonal complements are
/// matched by arbitrary orthonormal completions.
pub fn construct_aligning_unitary(av: &AlignmentVectors) -> Result<ComplexMatrix> {
    let n = av.a_min.len();
    if [av.b_l.len(), av.b_r.len(), av.c_min.len()]
        .iter()
        .any(|&len| len != n)
    {
        return Err(Error::Dimension(
            "alignment vectors differ in length".into(),
        ));
    }
    let left = inner(&av.a_min, &av.b_l);
    let right = inner(&av.b_r, &av.c_min);
    let mismatch = (left.norm() - right.norm()).abs();
    if mismatch > ALIGNMENT_TOL {
        return Err(Error::AlignmentInfeasible { mismatch });
    }
    // ⟨e^{iθ}a|b_l⟩ = e^{-iθ}⟨a|b_l⟩
    let phase = if left.norm() > PARALLEL_TOL && right.norm() > PARALLEL_TOL {
        (left / left.norm()) / (right / right.norm())
    } else {
        Complex64::ONE
    };
    let a = &av.a_min * phase;
    let overlap = inner(&a, &av.b_l);

    let source_second = &av.b_l - &a * overlap;
    let target_second = &av.c_min - &av.b_r * inner(&av.b_r, &av.c_min);
    let mut source: Vec<ComplexVector> = vec![a];
    let mut target: Vec<ComplexVector> = vec![av.b_r.clone()];
    let (sn, tn) = (source_second.norm(), target_second.norm());
    if sn > PARALLEL_TOL && tn > PARALLEL_TOL && n > 1 {
        source.push(source_second.unscale(sn));
        target.push(target_second.unscale(tn));
    }
    let source = complete_orthonormal_basis(&ComplexMatrix::from_columns(&source));
    let target = complete_orthonormal_basis(&ComplexMatrix::from_columns(&target));
    Ok(target * source.adjoint())
}
