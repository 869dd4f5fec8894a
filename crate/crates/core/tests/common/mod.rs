#![allow(dead_code)]

use catmetro::channels::{SpectralState, SpectralTerm};
use catmetro::fock::TwoModeState;
use catmetro::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Mixtures of up to three random pure states on a small two-mode grid.
pub fn random_states(count: usize, n_max: usize, seed: u64) -> Vec<SpectralState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let rank = rng.random_range(1..=3);
            let mut weights: Vec<f64> = (0..rank).map(|_| rng.random_range(0.1..1.0)).collect();
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
            let d = (n_max + 1) * (n_max + 1);
            let mut basis: Vec<Vec<Complex64>> = Vec::new();
            for _ in 0..rank {
                let mut v: Vec<Complex64> = (0..d)
                    .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                for u in &basis {
                    let overlap: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    v.iter_mut().zip(u).for_each(|(b, a)| *b -= overlap * a);
                }
                let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                v.iter_mut().for_each(|z| *z /= norm);
                basis.push(v);
            }
            let terms = weights
                .into_iter()
                .zip(basis)
                .map(|(weight, amps)| SpectralTerm {
                    weight,
                    vector: TwoModeState::from_grid(n_max, amps).unwrap(),
                })
                .collect();
            SpectralState::from_terms(n_max, terms).unwrap()
        })
        .collect()
}

pub fn max_abs_diff(a: &SpectralState, b: &SpectralState) -> f64 {
    let (a, b) = (a.density_matrix(), b.density_matrix());
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
