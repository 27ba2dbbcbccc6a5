//! Spectrum-level separability tests and the randomized orbit checks used to
//! cross-examine them.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, inner, tol, ComplexMatrix, ComplexVector};
use crate::state::{BipartiteDensityMatrix, BlockForm, Spectrum};

/// Slack allowed on `margin` before a report is declared failing.
pub const REPORT_TOL: f64 = 1e-10;

/// Outcome of a scalar inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub condition_name: &'static str,
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`
    pub margin: f64,
}

impl CriterionReport {
    fn new(condition_name: &'static str, lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            condition_name,
            holds: margin >= -REPORT_TOL,
            lhs,
            rhs,
            margin,
        }
    }
}

/// `λ₁ ≤ λ_{2n−1} + 2√(λ_{2n−2} λ_{2n})` for a `2⊗n` spectrum.
///
/// For a qubit–qudit system this single inequality characterizes both the
/// spectra whose whole unitary orbit is PPT and those whose orbit is
/// separable.
pub fn abs_sep_condition(spectrum: &Spectrum, n: usize) -> Result<CriterionReport> {
    if n < 2 {
        return Err(Error::Dimension(format!(
            "condition needs a qudit dimension n >= 2, got {n}"
        )));
    }
    if spectrum.len() != 2 * n {
        return Err(Error::Dimension(format!(
            "spectrum has {} entries, expected {}",
            spectrum.len(),
            2 * n
        )));
    }
    let l = |k: usize| spectrum.lambda(k);
    let rhs = l(2 * n - 1) + 2.0 * (l(2 * n - 2) * l(2 * n)).sqrt();
    Ok(CriterionReport::new("separable from spectrum", l(1), rhs))
}

/// Separable ball around the maximally mixed state, in purity form:
/// `tr ρ² ≤ 1/(N−1)` with `N` the total dimension.
pub fn gurvits_barnum_ball(spectrum: &Spectrum) -> CriterionReport {
    let total = spectrum.len() as f64;
    CriterionReport::new("separable ball", spectrum.purity(), 1.0 / (total - 1.0))
}

/// Three-qubit spectra: `λ₁ ≤ λ₇ + 2√(λ₆λ₈)` gives separability across each
/// of the three `2⊗4` cuts at once, since the test only sees the spectrum.
pub fn three_qubit_all_cuts(spectrum: &Spectrum) -> Result<CriterionReport> {
    if spectrum.len() != 8 {
        return Err(Error::Dimension(format!(
            "three-qubit spectrum needs 8 entries, got {}",
            spectrum.len()
        )));
    }
    let l = |k: usize| spectrum.lambda(k);
    let rhs = l(7) + 2.0 * (l(6) * l(8)).sqrt();
    Ok(CriterionReport::new(
        "separable across every cut",
        l(1),
        rhs,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitSample {
    pub all_ppt: bool,
    /// Smallest `λmin((U†ρU)^Γ)` seen.
    pub worst: f64,
}

/// Conjugates `ρ` by `trials` Haar unitaries and records the smallest
/// partial-transpose eigenvalue. Can refute PPT-from-spectrum, never prove it.
pub fn orbit_ppt_sample<R: Rng + ?Sized>(
    rho: &BipartiteDensityMatrix,
    trials: usize,
    rng: &mut R,
    tol: f64,
) -> Result<OrbitSample> {
    if trials == 0 {
        return Err(Error::Dimension(
            "orbit sampling needs at least one trial".into(),
        ));
    }
    let (dim_a, dim_b) = rho.dims();
    let mut worst = f64::INFINITY;
    for _ in 0..trials {
        let u = linalg::random_haar_unitary(dim_a * dim_b, rng);
        let m = u.adjoint() * rho.matrix() * &u;
        worst = worst.min(crate::state::min_pt_eigenvalue(
            &linalg::symmetrize(&m),
            dim_a,
            dim_b,
        ));
    }
    Ok(OrbitSample {
        all_ppt: worst >= -tol,
        worst,
    })
}

/// `(⟨x|A|x⟩·⟨z|C|z⟩, |⟨z|WBW|x⟩|²)`. For states that are PPT from
/// spectrum the first entry dominates for every probe.
pub fn ppt_inequality_probe(
    blocks: &BlockForm,
    x: &ComplexVector,
    z: &ComplexVector,
    w: &ComplexMatrix,
) -> Result<(f64, f64)> {
    let n = blocks.dim();
    if x.len() != n || z.len() != n || w.nrows() != n || w.ncols() != n {
        return Err(Error::Dimension(format!(
            "probe vectors must live in C^{n}"
        )));
    }
    linalg::ensure_unit(x, tol::UNIT)?;
    linalg::ensure_unit(z, tol::UNIT)?;
    linalg::ensure_unitary(w, tol::UNITARY)?;
    let ax = inner(x, &(&blocks.a * x)).re;
    let cz = inner(z, &(&blocks.c * z)).re;
    let cross = inner(z, &(w * &blocks.b * w * x));
    Ok((ax * cz, cross.norm_sqr()))
}

/// Exact separability in `2⊗2` and `2⊗3`, where PPT is equivalent to
/// separability.
pub fn exact_separability_small(rho: &BipartiteDensityMatrix) -> Result<bool> {
    match rho.dims() {
        (2, 2) | (2, 3) => Ok(rho.is_ppt(REPORT_TOL)),
        (dim_a, dim_b) => Err(Error::UnsupportedDimension {
            dim_a,
            dim_b,
            reason: "PPT implies separability only for 2x2 and 2x3",
        }),
    }
}
