//! Search for a unitary whose conjugate of a fixed spectrum fails PPT.
//!
//! Objective is `λmin((U†ΛU)^Γ)`, minimized by Riemannian gradient descent
//! on the unitary group from Haar-random starting points. With `v` the lowest
//! eigenvector of the partial transpose and `X = (|v⟩⟨v|)^Γ`, the derivative
//! of the objective along `U ↦ U e^{iεH}` is `tr(H G)` where `G = −i[ρ, X]`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eigendecompose, ComplexMatrix};
use crate::state::{partial_transpose, Spectrum};

/// A witness must push the smallest partial-transpose eigenvalue below `-WITNESS_THRESHOLD`.
pub const WITNESS_THRESHOLD: f64 = 1e-8;

/// Local steps tried from one starting point before restarting.
const STEPS_PER_RESTART: usize = 200;
/// Line search gives up below this step length.
const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct WitnessResult {
    pub found: bool,
    /// `U` with `λmin((U†ΛU)^Γ) = min_pt_eigenvalue`; present iff `found`.
    pub unitary: Option<ComplexMatrix>,
    /// Best objective value reached, whether or not it is a witness.
    pub min_pt_eigenvalue: f64,
    /// Objective evaluations spent.
    pub iterations: usize,
}

struct Objective<'a> {
    lambda: &'a ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
}

struct Point {
    u: ComplexMatrix,
    rho: ComplexMatrix,
    value: f64,
    /// Lowest eigenvector of the partial transpose, as a column.
    low: ComplexMatrix,
}

impl Objective<'_> {
    fn eval(&self, u: ComplexMatrix) -> Result<Point> {
        let rho = linalg::symmetrize(&(u.adjoint() * self.lambda * &u));
        let eig = hermitian_eigendecompose(&partial_transpose(&rho, self.dim_a, self.dim_b))?;
        Ok(Point {
            value: eig.min_eigenvalue(),
            low: eig.eigenvectors.columns(0, 1).into_owned(),
            u,
            rho,
        })
    }

    /// `G = −i[ρ, X]`, Hermitian.
    fn gradient(&self, p: &Point) -> ComplexMatrix {
        let x = partial_transpose(&(&p.low * p.low.adjoint()), self.dim_a, self.dim_b);
        let comm = &p.rho * &x - &x * &p.rho;
        comm.map(|z| num_complex::Complex64::new(z.im, -z.re))
    }
}

/// Random restarts plus gradient steps with step-halving line search, until
/// the objective drops well below `-WITNESS_THRESHOLD` or `budget`
/// evaluations are spent.
pub fn npt_witness_search<R: Rng + ?Sized>(
    spectrum: &Spectrum,
    dims: (usize, usize),
    budget: usize,
    rng: &mut R,
) -> Result<WitnessResult> {
    let (dim_a, dim_b) = dims;
    let d = dim_a * dim_b;
    if spectrum.len() != d {
        return Err(Error::Dimension(format!(
            "spectrum has {} entries, dims ({dim_a}, {dim_b}) need {d}",
            spectrum.len()
        )));
    }
    let lambda = spectrum.diagonal_matrix();
    let objective = Objective {
        lambda: &lambda,
        dim_a,
        dim_b,
    };
    let stop_at = -10.0 * WITNESS_THRESHOLD;

    let mut best: Option<Point> = None;
    let mut iterations = 0;
    while iterations < budget {
        let mut current = objective.eval(linalg::random_haar_unitary(d, rng))?;
        iterations += 1;
        let mut step = 0.5;
        let mut local = 0;
        while iterations < budget && local < STEPS_PER_RESTART && current.value > stop_at {
            let g = objective.gradient(&current);
            let gnorm = linalg::frobenius(&g);
            if gnorm < 1e-15 {
                break;
            }
            let mut improved = false;
            while step >= MIN_STEP && iterations < budget {
                let rotation = linalg::exp_i_hermitian(&g.scale(-step / gnorm))?;
                let trial = objective.eval(&current.u * rotation)?;
                iterations += 1;
                local += 1;
                if trial.value < current.value {
                    current = trial;
                    step *= 2.0;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| current.value < b.value) {
            best = Some(current);
        }
        if best.as_ref().is_some_and(|b| b.value <= stop_at) {
            break;
        }
    }

    let (value, u) = match best {
        Some(p) => (p.value, p.u),
        None => (f64::INFINITY, linalg::identity(d)),
    };
    let found = value <= -WITNESS_THRESHOLD;
    Ok(WitnessResult {
        found,
        unitary: found.then_some(u),
        min_pt_eigenvalue: value,
        iterations,
    })
}
