//! The qubit rotation family `U(t)` and the scalar objectives evaluated
//! along it.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::linalg::{
    self, c64, hermitian_eigendecompose, hermitian_eigenvalues, inner, singular_value_decompose,
    ComplexMatrix,
};
use crate::state::{BipartiteDensityMatrix, BlockForm};

use super::{AlignmentVectors, DecompositionCertificate, FSample, RotationParameter};

/// `h(t) ≤ ADMISSIBLE_GAP` is accepted as "the block inequality holds at t".
pub const ADMISSIBLE_GAP: f64 = 1e-10;

/// Grid local minima refined when the best one alone does not reach zero.
const REFINED_MINIMA: usize = 4;

/// `U(t) = [[cos(πt/2), −sin(πt/2)], [sin(πt/2), cos(πt/2)]]`
pub fn rotation_family(t: f64) -> ComplexMatrix {
    let (s, c) = (FRAC_PI_2 * t).sin_cos();
    linalg::real_matrix(2, 2, &[c, -s, s, c])
}

/// Blocks of `(U(t)⊗I)† ρ (U(t)⊗I)`, computed blockwise.
pub fn rotated_blocks(blocks: &BlockForm, t: f64) -> BlockForm {
    let (s, c) = (FRAC_PI_2 * t).sin_cos();
    let BlockForm { a, b, c: cc } = blocks;
    let b_sum = b + b.adjoint();
    let cs = c64(c * s, 0.0);
    let c2 = c64(c * c, 0.0);
    let s2 = c64(s * s, 0.0);
    BlockForm {
        a: a * c2 + &b_sum * cs + cc * s2,
        b: (cc - a) * cs + b * c2 - b.adjoint() * s2,
        c: a * s2 - &b_sum * cs + cc * c2,
    }
}

/// `‖B‖² − λmin(A)·λmin(C)`
pub fn gap_of_blocks(blocks: &BlockForm) -> f64 {
    let lmin =
        |m: &ComplexMatrix| hermitian_eigenvalues(m).expect("diagonal blocks are Hermitian")[0];
    let btb = blocks.b.adjoint() * &blocks.b;
    let norm_sq = *hermitian_eigenvalues(&btb)
        .expect("B†B is Hermitian")
        .last()
        .unwrap();
    norm_sq.max(0.0) - lmin(&blocks.a) * lmin(&blocks.c)
}

/// Block gap `h(t)` of the rotated state; `h(t) ≤ 0` means the block
/// inequality holds after rotating the qubit by `U(t)`.
pub fn block_gap(rho: &BipartiteDensityMatrix, t: f64) -> Result<f64> {
    Ok(gap_of_blocks(&rotated_blocks(&rho.to_blocks()?, t)))
}

/// Minimal eigenvectors of `A`, `C` and top singular pair of `B`, with the
/// deterministic selection of [`linalg::hermitian_eigendecompose`] and
/// [`linalg::singular_value_decompose`].
pub fn alignment_vectors(blocks: &BlockForm) -> Result<AlignmentVectors> {
    let ea = hermitian_eigendecompose(&blocks.a)?;
    let ec = hermitian_eigendecompose(&blocks.c)?;
    let sb = singular_value_decompose(&blocks.b);
    Ok(AlignmentVectors {
        a_min: ea.eigenvector(0),
        c_min: ec.eigenvector(0),
        b_l: sb.left(0),
        b_r: sb.right(0),
    })
}

/// Range `[lo, hi]` of `|⟨x|y⟩|` over unit `x` in the span of the first
/// `kx` columns of `x_basis` and unit `y` in the span of the first `ky`
/// columns of `y_basis`. Exact when both spans are lines; otherwise
/// `[0, σmax(P_x P_y)]`, a superset.
fn overlap_range(
    x_basis: &ComplexMatrix,
    kx: usize,
    y_basis: &ComplexMatrix,
    ky: usize,
) -> (f64, f64) {
    let x = x_basis.columns(0, kx);
    let y = y_basis.columns(0, ky);
    let cross = x.adjoint() * y;
    if kx == 1 && ky == 1 {
        let v = cross[(0, 0)].norm();
        (v, v)
    } else {
        (0.0, linalg::operator_norm(&cross).min(1.0))
    }
}

/// Samples the set-valued overlap difference
/// `|⟨a_min|b_l⟩| − |⟨b_r|c_min⟩|` at `t`.
pub fn evaluate_f_bracket(
    rho: &BipartiteDensityMatrix,
    t: f64,
    degeneracy_tol: f64,
) -> Result<FSample> {
    f_sample_of_blocks(&rotated_blocks(&rho.to_blocks()?, t), t, degeneracy_tol)
}

pub(crate) fn f_sample_of_blocks(
    blocks: &BlockForm,
    t: f64,
    degeneracy_tol: f64,
) -> Result<FSample> {
    let ea = hermitian_eigendecompose(&blocks.a)?;
    let ec = hermitian_eigendecompose(&blocks.c)?;
    let sb = singular_value_decompose(&blocks.b);
    let ka = ea.min_multiplicity(degeneracy_tol);
    let kc = ec.min_multiplicity(degeneracy_tol);
    let kb = sb.top_multiplicity(degeneracy_tol);

    let first = inner(&ea.eigenvector(0), &sb.left(0)).norm();
    let second = inner(&sb.right(0), &ec.eigenvector(0)).norm();
    let f_selected = first - second;

    let (lo1, hi1) = overlap_range(&ea.eigenvectors, ka, &sb.left_vectors, kb);
    let (lo2, hi2) = overlap_range(&sb.right_vectors, kb, &ec.eigenvectors, kc);
    Ok(FSample {
        t,
        f_selected,
        f_lo: (lo1 - hi2).min(f_selected),
        f_hi: (hi1 - lo2).max(f_selected),
        degenerate: ka > 1 || kc > 1 || kb > 1,
    })
}

/// Golden-section minimization of `f` on `[lo, hi]` down to an interval of
/// width `tol`. Returns the best point seen.
pub fn golden_section_minimize<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    // each step shrinks by 1/φ, so this bound is never the binding one for sane tol
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
            if f1 < best.1 {
                best = (x1, f1);
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
            if f2 < best.1 {
                best = (x2, f2);
            }
        }
    }
    best
}

/// Certificate data for the blocks rotated by `U(t)`.
pub fn certificate_at(blocks: &BlockForm, t: f64) -> Result<DecompositionCertificate> {
    let r = rotated_blocks(blocks, t);
    let lambda_min_a = hermitian_eigenvalues(&r.a)?[0];
    let lambda_min_c = hermitian_eigenvalues(&r.c)?[0];
    let norm_b = linalg::operator_norm(&r.b);
    Ok(DecompositionCertificate {
        t_star: t,
        lambda_min_a,
        lambda_min_c,
        norm_b,
        inequality_margin: lambda_min_a * lambda_min_c - norm_b * norm_b,
    })
}

/// Finds `t ∈ [0, 1]` with `h(t) ≤ 1e-10`.
///
/// `t = 0` is taken as is when `h(0) ≤ 0`. Otherwise `h` is scanned on a
/// uniform grid of `grid` points, the lowest local minima are refined by
/// golden-section search down to `refine_tol`, and as a last resort the sign
/// changes of the selected overlap difference are bisected.
pub fn find_admissible_rotation(
    rho: &BipartiteDensityMatrix,
    grid: usize,
    refine_tol: f64,
) -> Result<(RotationParameter, DecompositionCertificate)> {
    let blocks = rho.to_blocks()?;
    let h = |t: f64| gap_of_blocks(&rotated_blocks(&blocks, t));
    let accept = |t: f64| -> Result<(RotationParameter, DecompositionCertificate)> {
        Ok((RotationParameter::new(t), certificate_at(&blocks, t)?))
    };

    if h(0.0) <= 0.0 {
        return accept(0.0);
    }

    let grid = grid.max(2);
    let step = 1.0 / (grid - 1) as f64;
    let ts: Vec<f64> = (0..grid).map(|i| i as f64 * step).collect();
    let hs: Vec<f64> = ts.iter().map(|&t| h(t)).collect();

    // local minima of the sampled curve, lowest first, ties to smaller t
    let mut minima: Vec<usize> = (0..grid)
        .filter(|&i| (i == 0 || hs[i] <= hs[i - 1]) && (i + 1 == grid || hs[i] <= hs[i + 1]))
        .collect();
    minima.sort_by(|&i, &j| hs[i].total_cmp(&hs[j]).then(i.cmp(&j)));

    let mut best = (ts[minima[0]], hs[minima[0]]);
    for &i in minima.iter().take(REFINED_MINIMA) {
        if best.1 < 0.0 {
            break;
        }
        let lo = ts[i.saturating_sub(1)];
        let hi = ts[(i + 1).min(grid - 1)];
        let refined = golden_section_minimize(h, lo, hi, refine_tol);
        if refined.1 < best.1 {
            best = refined;
        }
    }
    if best.1 <= ADMISSIBLE_GAP {
        return accept(best.0);
    }

    // fallback: zero crossings of the selected overlap difference
    let f = |t: f64| f_sample_of_blocks(&rotated_blocks(&blocks, t), t, 1e-9).map(|s| s.f_selected);
    let fs: Vec<f64> = ts.iter().map(|&t| f(t)).collect::<Result<_>>()?;
    for i in 0..grid - 1 {
        if fs[i] * fs[i + 1] > 0.0 {
            continue;
        }
        let (mut lo, mut hi, mut flo) = (ts[i], ts[i + 1], fs[i]);
        while hi - lo > refine_tol {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid)?;
            if fm * flo > 0.0 {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        for t in [lo, hi] {
            let ht = h(t);
            if ht < best.1 {
                best = (t, ht);
            }
        }
        if best.1 <= ADMISSIBLE_GAP {
            return accept(best.0);
        }
    }
    Err(Error::NotAdmissible { min_gap: best.1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, real_matrix, unitarity_deviation};
    use crate::state::{random_state_with_spectrum, Spectrum};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn example_state() -> BipartiteDensityMatrix {
        let m = real_matrix(
            4,
            4,
            &[
                1.0, 0.0, 0.0, 0.0, 0.0, 3.0, 2.0, 0.0, 0.0, 2.0, 3.0, 0.0, 0.0, 0.0, 0.0, 4.0,
            ],
        )
        .unscale(11.0);
        BipartiteDensityMatrix::new(m, 2, 2).unwrap()
    }

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> BipartiteDensityMatrix {
        let raw: Vec<f64> = (0..2 * n).map(|_| -rng.random::<f64>().ln()).collect();
        let s: f64 = raw.iter().sum();
        let spec = Spectrum::new(raw.into_iter().map(|v| v / s).collect()).unwrap();
        random_state_with_spectrum(&spec, (2, n), rng).unwrap()
    }

    #[test]
    fn rotation_examples() {
        assert!(frobenius(&(rotation_family(0.0) - linalg::identity(2))) == 0.0);
        let r1 = rotation_family(1.0);
        let expected = real_matrix(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(frobenius(&(r1 - expected)) < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let half = real_matrix(2, 2, &[s, -s, s, s]);
        assert!(frobenius(&(rotation_family(0.5) - half)) < 1e-15);
        for t in [-3.3, 0.1, 0.77, 5.0] {
            assert!(unitarity_deviation(&rotation_family(t)) < 1e-15);
        }
    }

    #[test]
    fn rotated_blocks_match_full_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [1, 2, 5] {
            let rho = random_state(n, &mut rng);
            for t in [0.0, 0.3, 0.5, 1.0, 1.7] {
                let direct = rho
                    .conjugate_local(&rotation_family(t))
                    .unwrap()
                    .to_blocks()
                    .unwrap();
                let fast = rotated_blocks(&rho.to_blocks().unwrap(), t);
                assert!(frobenius(&(direct.assemble() - fast.assemble())) < 1e-14);
            }
        }
    }

    #[test]
    fn block_gap_examples() {
        let rho = example_state();
        assert!((block_gap(&rho, 0.0).unwrap() - 1.0 / 121.0).abs() < 1e-15);
        assert!(block_gap(&rho, 0.5).unwrap().abs() < 1e-12);
        for n in 1..5 {
            let mm = BipartiteDensityMatrix::maximally_mixed(2, n);
            let expected = -1.0 / ((2 * n) as f64).powi(2);
            for t in [0.0, 0.25, 0.9] {
                assert!((block_gap(&mm, t).unwrap() - expected).abs() < 1e-15);
            }
        }
        let qutrit = BipartiteDensityMatrix::maximally_mixed(3, 2);
        assert!(block_gap(&qutrit, 0.0).is_err());
    }

    #[test]
    fn f_bracket_examples() {
        let mm = BipartiteDensityMatrix::maximally_mixed(2, 3);
        let s = evaluate_f_bracket(&mm, 0.2, 1e-9).unwrap();
        assert!(s.degenerate);
        assert_eq!((s.f_lo, s.f_hi), (-1.0, 1.0));

        let s = evaluate_f_bracket(&example_state(), 0.0, 1e-9).unwrap();
        assert!(!s.degenerate);
        assert!((s.f_selected + 1.0).abs() < 1e-15);
        assert_eq!(s.f_lo, s.f_selected);
        assert_eq!(s.f_hi, s.f_selected);
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section_minimize(|x| (x - 0.3).powi(2) + 1.0, 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-5);
        assert!((fx - 1.0).abs() < 1e-10);
        let (x, _) = golden_section_minimize(|x| (x - 0.61).abs(), 0.0, 1.0, 1e-12);
        assert!((x - 0.61).abs() < 1e-11);
    }

    #[test]
    fn admissible_rotation_examples() {
        let (t, cert) = find_admissible_rotation(&example_state(), 1024, 1e-12).unwrap();
        assert!((t.t - 0.5).abs() < 1e-3, "t* = {}", t.t);
        assert!(cert.inequality_margin >= -1e-10);

        let mm = BipartiteDensityMatrix::maximally_mixed(2, 4);
        let (t, cert) = find_admissible_rotation(&mm, 1024, 1e-12).unwrap();
        assert_eq!(t.t, 0.0);
        assert!((cert.inequality_margin - 1.0 / 64.0).abs() < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = crate::linalg::ComplexVector::from_vec(vec![
            c64(s, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(s, 0.0),
        ]);
        let pure = BipartiteDensityMatrix::pure(&psi, 2, 3).unwrap();
        match find_admissible_rotation(&pure, 256, 1e-12) {
            Err(Error::NotAdmissible { min_gap }) => assert!(min_gap > 1e-3),
            other => panic!("expected not-admissible, got {other:?}"),
        }
    }

    #[test]
    fn block_swap_identity_and_sign_flip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let n = rng.random_range(1..7);
            let rho = random_state(n, &mut rng);
            let h0 = block_gap(&rho, 0.0).unwrap();
            let h1 = block_gap(&rho, 1.0).unwrap();
            assert!((h0 - h1).abs() <= 1e-12);
            let f0 = evaluate_f_bracket(&rho, 0.0, 1e-9).unwrap();
            let f1 = evaluate_f_bracket(&rho, 1.0, 1e-9).unwrap();
            if !f0.degenerate && !f1.degenerate {
                assert!((f0.f_selected + f1.f_selected).abs() <= 1e-10);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn gap_has_period_two(seed in any::<u64>(), n in 1usize..6, t in -2.0f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_state(n, &mut rng);
            let a = block_gap(&rho, t).unwrap();
            let b = block_gap(&rho, t + 2.0).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
        }

        #[test]
        fn bracket_contains_selection(seed in any::<u64>(), n in 1usize..6, t in 0.0f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_state(n, &mut rng);
            let s = evaluate_f_bracket(&rho, t, 1e-9).unwrap();
            prop_assert!(s.f_lo <= s.f_selected && s.f_selected <= s.f_hi);
            prop_assert!((-1.0..=1.0).contains(&s.f_selected));
        }

        #[test]
        fn gap_is_continuous(seed in any::<u64>(), n in 2usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_state(n, &mut rng);
            let blocks = rho.to_blocks().unwrap();
            let mut prev = gap_of_blocks(&blocks);
            for i in 1..=1000 {
                let next = gap_of_blocks(&rotated_blocks(&blocks, i as f64 * 1e-3));
                prop_assert!((next - prev).abs() <= 0.1);
                prev = next;
            }
        }
    }
}
