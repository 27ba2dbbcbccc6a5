//! Separability from spectrum for qubit–qudit (`2⊗n`) states.
//!
//! * [`criteria`]: the eigenvalue condition `λ₁ ≤ λ_{2n−1} + 2√(λ_{2n−2}λ_{2n})`
//!   and related spectral tests, plus Haar-orbit PPT sampling.
//! * [`decompose`]: for states passing the condition, an explicit list of
//!   weighted product states reproducing the state, with a certificate.
//! * [`witness`]: for spectra failing it, a search for a unitary conjugate
//!   with a negative partial transpose.
//!
//! ```
//! use sepspec::{decompose, random_state_with_spectrum, seeded_rng, Spectrum};
//!
//! let spectrum = Spectrum::new(vec![0.2, 0.18, 0.17, 0.16, 0.15, 0.14]).unwrap();
//! let rho = random_state_with_spectrum(&spectrum, (2, 3), &mut seeded_rng(1)).unwrap();
//! let (decomposition, certificate) = decompose(&rho).unwrap();
//! assert!(decomposition.terms.len() <= 12);
//! assert!(decomposition.reconstruction_error <= 1e-8);
//! assert!((0.0..=1.0).contains(&certificate.t_star));
//! ```

pub mod criteria;
pub mod decompose;
pub mod error;
pub mod linalg;
pub mod state;
pub mod witness;

pub use criteria::{
    abs_sep_condition, exact_separability_small, gurvits_barnum_ball, orbit_ppt_sample,
    ppt_inequality_probe, three_qubit_all_cuts, CriterionReport, OrbitSample,
};
pub use decompose::{
    decompose, decompose_with, verify_decomposition, DecomposeOptions, DecompositionCertificate,
    ProductTerm, SeparableDecomposition, Verification,
};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector};
pub use num_complex::Complex64;
pub use state::{random_state_with_spectrum, BipartiteDensityMatrix, BlockForm, Spectrum};
pub use witness::{npt_witness_search, WitnessResult};

/// Seeded generator used throughout; one instance per thread.
pub type SeededRng = rand_chacha::ChaCha8Rng;

/// `SeededRng` from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> SeededRng {
    <SeededRng as rand::SeedableRng>::seed_from_u64(seed)
}
