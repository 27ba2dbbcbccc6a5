//! Explicit product-state decompositions of block matrices satisfying
//! `‖B‖² ≤ λmin(A)·λmin(C)`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, c64, hermitian_eigendecompose, singular_value_decompose, tol, ComplexMatrix,
    ComplexVector, SingularSystem,
};
use crate::state::BlockForm;

use super::{ProductTerm, SeparableDecomposition};

/// Slack on `‖B‖ ≤ 1` before a matrix is refused as a contraction.
pub const CONTRACTION_TOL: f64 = 1e-10;
/// Slack on `‖B‖² − λmin(A)λmin(C) ≤ 0`.
pub const LEMMA_TOL: f64 = 1e-10;
/// Weights below this are dropped.
pub const WEIGHT_FLOOR: f64 = 1e-14;

/// `U± = W(Σ ± i√(I−Σ²))V†` from `B = WΣV†`, singular values clipped to 1.
fn unitary_pair(svd: &SingularSystem) -> (ComplexMatrix, ComplexMatrix) {
    let k = svd.singular_values.len();
    let diag = |sign: f64| {
        ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
            k,
            svd.singular_values.iter().map(|&s| {
                let s = s.min(1.0);
                c64(s, sign * (1.0 - s * s).max(0.0).sqrt())
            }),
        ))
    };
    let w = &svd.left_vectors;
    let vh = svd.right_vectors.adjoint();
    (w * diag(1.0) * &vh, w * diag(-1.0) * &vh)
}

/// Writes a contraction as the average of two unitaries:
/// `B = (U₊ + U₋)/2`.
pub fn contraction_to_unitaries(b: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    linalg::ensure_square(b)?;
    let svd = singular_value_decompose(b);
    let norm = svd.norm();
    if norm > 1.0 + CONTRACTION_TOL {
        return Err(Error::ContractionViolation { norm });
    }
    Ok(unitary_pair(&svd))
}

/// With `U = Σ_k e^{iθ_k}|w_k⟩⟨w_k|`, returns the `n` terms of
/// `[[I, U], [U†, I]] = Σ_k 2 |φ_k⟩⟨φ_k| ⊗ |w_k⟩⟨w_k|`,
/// `|φ_k⟩ = (|0⟩ + e^{−iθ_k}|1⟩)/√2`. Weights are 2 each.
pub fn unitary_core_to_products(u: &ComplexMatrix) -> Result<Vec<ProductTerm>> {
    linalg::ensure_unitary(u, tol::UNITARY)?;
    let n = u.nrows();
    // the Schur form of a normal matrix is diagonal
    let (q, t) = u.clone().schur().unpack();
    Ok((0..n)
        .map(|k| {
            let d = t[(k, k)];
            let phase = d / d.norm();
            ProductTerm {
                weight: 2.0,
                qubit: ComplexVector::from_vec(vec![
                    c64(FRAC_1_SQRT_2, 0.0),
                    phase.conj() * FRAC_1_SQRT_2,
                ]),
                qudit: q.column(k).into_owned(),
            }
        })
        .collect())
}

fn basis_qubit(k: usize) -> ComplexVector {
    linalg::basis_vector(2, k)
}

/// Product terms for `[[A, B], [B†, C]]` under `‖B‖² ≤ λmin(A)·λmin(C)`.
///
/// `A − λmin(A)I` and `C − λmin(C)I` contribute one term per eigenvector
/// with the qubit in `|0⟩` or `|1⟩`. The remaining core
/// `[[λa I, B], [B†, λc I]]` is `diag(√λa, √λc)⊗I` applied on both sides to
/// `[[I, B̃], [B̃†, I]]` with `B̃ = B/√(λa λc)`; `B̃` is split into two
/// unitaries and each unitary core into `n` products, whose qubit factors
/// are then pulled back through `diag(√λa, √λc)`.
pub fn decompose_lemma1(blocks: &BlockForm) -> Result<SeparableDecomposition> {
    let n = blocks.dim();
    let ea = hermitian_eigendecompose(&blocks.a)?;
    let ec = hermitian_eigendecompose(&blocks.c)?;
    let la = ea.min_eigenvalue().max(0.0);
    let lc = ec.min_eigenvalue().max(0.0);
    let svd = singular_value_decompose(&blocks.b);
    let gap = svd.norm().powi(2) - la * lc;
    if gap > LEMMA_TOL {
        return Err(Error::LemmaInapplicable { gap });
    }

    let mut terms = Vec::with_capacity(4 * n);
    if la * lc == 0.0 {
        // B vanishes up to tolerance; A and C decompose on their own
        for (eig, qubit) in [(&ea, 0), (&ec, 1)] {
            for k in 0..n {
                terms.push(ProductTerm {
                    weight: eig.eigenvalues[k],
                    qubit: basis_qubit(qubit),
                    qudit: eig.eigenvector(k),
                });
            }
        }
    } else {
        for (eig, qubit, shift) in [(&ea, 0, la), (&ec, 1, lc)] {
            for k in 0..n {
                terms.push(ProductTerm {
                    weight: eig.eigenvalues[k] - shift,
                    qubit: basis_qubit(qubit),
                    qudit: eig.eigenvector(k),
                });
            }
        }
        let scale = (la * lc).sqrt();
        let b_tilde = blocks.b.unscale(scale);
        let (u_plus, u_minus) = unitary_pair(&singular_value_decompose(&b_tilde));
        let (sa, sc) = (la.sqrt(), lc.sqrt());
        for u in [u_plus, u_minus] {
            for core in unitary_core_to_products(&u)? {
                let pulled = ComplexVector::from_vec(vec![core.qubit[0] * sa, core.qubit[1] * sc]);
                let norm_sq = pulled.norm_squared();
                terms.push(ProductTerm {
                    // half of the average, times the core weight, times the rescaling
                    weight: 0.5 * core.weight * norm_sq,
                    qubit: pulled.unscale(norm_sq.sqrt()),
                    qudit: core.qudit,
                });
            }
        }
    }

    let target = blocks.trace();
    let decomposition = SeparableDecomposition::from_terms(terms, target);
    let error = linalg::frobenius(&(decomposition.reassemble() - blocks.assemble()));
    Ok(SeparableDecomposition {
        reconstruction_error: error,
        ..decomposition
    })
}

impl SeparableDecomposition {
    /// Drops weights below [`WEIGHT_FLOOR`], clamps tiny negatives, and
    /// rescales so the weights sum to `total`.
    pub(crate) fn from_terms(terms: Vec<ProductTerm>, total: f64) -> Self {
        let mut terms: Vec<ProductTerm> = terms
            .into_iter()
            .filter(|t| t.weight >= WEIGHT_FLOOR)
            .collect();
        let sum: f64 = terms.iter().map(|t| t.weight).sum();
        if sum > 0.0 {
            let factor = total / sum;
            terms.iter_mut().for_each(|t| t.weight *= factor);
        }
        Self {
            terms,
            reconstruction_error: f64::NAN,
        }
    }
}

/// `Σ w (|q⟩⟨q|)⊗(|v⟩⟨v|)` of the given terms.
pub(crate) fn reassemble_terms(terms: &[ProductTerm], dim_b: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2 * dim_b, 2 * dim_b);
    for t in terms {
        let v = linalg::kron(
            &ComplexMatrix::from_column_slice(2, 1, t.qubit.as_slice()),
            &ComplexMatrix::from_column_slice(dim_b, 1, t.qudit.as_slice()),
        );
        m += (&v * v.adjoint()) * Complex64::new(t.weight, 0.0);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, random_haar_unitary, real_matrix, unitarity_deviation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_contraction(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(n, n, |_, _| {
            c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let target = rng.random::<f64>();
        g.unscale(linalg::operator_norm(&g) / target)
    }

    #[test]
    fn contraction_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_haar_unitary(3, &mut rng);
        let (p, m) = contraction_to_unitaries(&u).unwrap();
        assert!(frobenius(&(&p - &u)) < 1e-14 && frobenius(&(&m - &u)) < 1e-14);

        let z = ComplexMatrix::zeros(3, 3);
        let (p, m) = contraction_to_unitaries(&z).unwrap();
        assert!(unitarity_deviation(&p) < 1e-14 && unitarity_deviation(&m) < 1e-14);
        assert!(frobenius(&(&p + &m)) < 1e-14);

        let d = real_matrix(2, 2, &[0.5, 0.0, 0.0, 1.0]);
        let (p, m) = contraction_to_unitaries(&d).unwrap();
        let h = 3f64.sqrt() / 2.0;
        let ep = ComplexMatrix::from_diagonal(&ComplexVector::from_vec(vec![
            c64(0.5, h),
            c64(1.0, 0.0),
        ]));
        let em = ComplexMatrix::from_diagonal(&ComplexVector::from_vec(vec![
            c64(0.5, -h),
            c64(1.0, 0.0),
        ]));
        assert!(frobenius(&(p - ep)) < 1e-15);
        assert!(frobenius(&(m - em)) < 1e-15);

        let big = real_matrix(2, 2, &[1.5, 0.0, 0.0, 0.2]);
        assert!(matches!(
            contraction_to_unitaries(&big),
            Err(Error::ContractionViolation { .. })
        ));
    }

    #[test]
    fn contractions_average_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let n = rng.random_range(1..9);
            let b = random_contraction(n, &mut rng);
            let (p, m) = contraction_to_unitaries(&b).unwrap();
            assert!(frobenius(&((&p + &m).unscale(2.0) - &b)) <= 1e-12);
            assert!(unitarity_deviation(&p) <= 1e-12);
            assert!(unitarity_deviation(&m) <= 1e-12);
        }
    }

    fn core(u: &ComplexMatrix) -> ComplexMatrix {
        let n = u.nrows();
        BlockForm {
            a: linalg::identity(n),
            b: u.clone(),
            c: linalg::identity(n),
        }
        .assemble()
    }

    #[test]
    fn unitary_core_examples() {
        let terms = unitary_core_to_products(&linalg::identity(3)).unwrap();
        assert_eq!(terms.len(), 3);
        for t in &terms {
            assert!((t.qubit[0] - t.qubit[1]).norm() < 1e-15);
        }
        assert!(frobenius(&(reassemble_terms(&terms, 3) - core(&linalg::identity(3)))) < 1e-14);

        let z = real_matrix(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let terms = unitary_core_to_products(&z).unwrap();
        let mut signs: Vec<f64> = terms.iter().map(|t| (t.qubit[1] / t.qubit[0]).re).collect();
        signs.sort_by(f64::total_cmp);
        assert!((signs[0] + 1.0).abs() < 1e-15 && (signs[1] - 1.0).abs() < 1e-15);
        assert!(frobenius(&(reassemble_terms(&terms, 2) - core(&z))) < 1e-14);

        assert!(unitary_core_to_products(&real_matrix(2, 2, &[1.0, 1.0, 0.0, 1.0])).is_err());
    }

    #[test]
    fn haar_cores_reassemble() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let n = rng.random_range(1..9);
            let u = random_haar_unitary(n, &mut rng);
            let terms = unitary_core_to_products(&u).unwrap();
            assert_eq!(terms.len(), n);
            assert!(frobenius(&(reassemble_terms(&terms, n) - core(&u))) <= 1e-10);
        }
    }

    #[test]
    fn lemma_on_maximally_mixed() {
        for n in 1..6 {
            let blocks = BlockForm {
                a: linalg::identity(n).unscale((2 * n) as f64),
                b: ComplexMatrix::zeros(n, n),
                c: linalg::identity(n).unscale((2 * n) as f64),
            };
            let d = decompose_lemma1(&blocks).unwrap();
            assert!(d.reconstruction_error <= 1e-14);
            assert!(d.terms.len() <= 4 * n);
        }
    }

    #[test]
    fn lemma_on_hadamard_conjugated_example() {
        let m = real_matrix(
            4,
            4,
            &[
                4.0, 2.0, -2.0, 2.0, 2.0, 7.0, -2.0, -1.0, -2.0, -2.0, 4.0, -2.0, 2.0, -1.0, -2.0,
                7.0,
            ],
        )
        .unscale(22.0);
        let blocks = crate::state::BipartiteDensityMatrix::new(m, 2, 2)
            .unwrap()
            .to_blocks()
            .unwrap();
        let d = decompose_lemma1(&blocks).unwrap();
        assert!(d.terms.len() <= 8);
        assert!(d.reconstruction_error <= 1e-10);
        assert!(d.terms.iter().all(|t| t.weight >= 0.0));
    }

    #[test]
    fn lemma_on_scaled_unitary_cores() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..9 {
            let u = random_haar_unitary(n, &mut rng);
            let scale = 1.0 / (2 * n) as f64;
            let blocks = BlockForm {
                a: linalg::identity(n).scale(scale),
                b: u.scale(scale),
                c: linalg::identity(n).scale(scale),
            };
            let d = decompose_lemma1(&blocks).unwrap();
            assert_eq!(d.terms.len(), 2 * n);
            assert!(d.reconstruction_error <= 1e-10);
        }
    }

    #[test]
    fn lemma_refuses_large_off_diagonal() {
        let blocks = BlockForm {
            a: real_matrix(2, 2, &[1.0, 0.0, 0.0, 3.0]).unscale(11.0),
            b: real_matrix(2, 2, &[0.0, 0.0, 2.0, 0.0]).unscale(11.0),
            c: real_matrix(2, 2, &[3.0, 0.0, 0.0, 4.0]).unscale(11.0),
        };
        match decompose_lemma1(&blocks) {
            Err(Error::LemmaInapplicable { gap }) => assert!((gap - 1.0 / 121.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn singular_diagonal_block() {
        let blocks = BlockForm {
            a: real_matrix(2, 2, &[0.3, 0.0, 0.0, 0.0]),
            b: ComplexMatrix::zeros(2, 2),
            c: real_matrix(2, 2, &[0.4, 0.1, 0.1, 0.3]),
        };
        let d = decompose_lemma1(&blocks).unwrap();
        assert!(d.reconstruction_error <= 1e-15);
        assert!(d.terms.len() <= 4);
    }
}
