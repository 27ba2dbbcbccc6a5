//! Fixed inputs shared by the benchmarks.

use sepspec::{
    abs_sep_condition, random_state_with_spectrum, seeded_rng, BipartiteDensityMatrix, Spectrum,
};

/// Seeded `2⊗n` state whose spectrum passes the eigenvalue condition.
pub fn passing_state(n: usize, seed: u64) -> BipartiteDensityMatrix {
    let mut rng = seeded_rng(seed);
    let spectrum = loop {
        let s = Spectrum::random_near_uniform(2 * n, &mut rng);
        if abs_sep_condition(&s, n).unwrap().holds {
            break s;
        }
    };
    random_state_with_spectrum(&spectrum, (2, n), &mut rng).unwrap()
}

/// Seeded spectrum of length `2n` failing the condition by more than `gap`.
pub fn failing_spectrum(n: usize, gap: f64, seed: u64) -> Spectrum {
    let mut rng = seeded_rng(seed);
    loop {
        let s = Spectrum::random_flat_dirichlet(2 * n, &mut rng);
        if abs_sep_condition(&s, n).unwrap().margin < -gap {
            return s;
        }
    }
}
