//! Quantum Fisher information of pure and mixed two-mode states under a
//! phase generator diagonal in the photon-number basis.

use serde::{Deserialize, Serialize};

use crate::channels::{NoonMixture, SpectralState};
use crate::density::SparseDensity;
use crate::error::{Error, Result};
use crate::fock::{self, CatSpec, Mode, TwoModeState};

/// Pairs whose eigenvalue sum falls below this contribute nothing. Each pair
/// term is bounded by `2 (l_i + l_j) |G_ij|^2`, so this only guards `0 / 0`;
/// a larger cutoff would erase whole low-weight photon-number sectors.
pub const DENOMINATOR_EPS: f64 = 1e-300;
/// Eigenvalue spacing below which eigenvector derivatives are ambiguous.
pub const DEGENERACY_GAP: f64 = 1e-10;

/// Phase-shift configuration for pure states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PureConfig {
    /// `exp(i phi n_b)` on mode b only: `4 Var(n_b)`.
    OneModeB,
    /// `exp(-i phi n_a / 2) exp(i phi n_b / 2)`: `Var(n_b - n_a)`.
    TwoModeHalf,
}

/// Generator of the phase family `exp(i G phi) rho exp(-i G phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    NumberB,
    HalfDifference,
}

impl Generator {
    #[inline]
    pub fn eigenvalue(self, na: usize, nb: usize) -> f64 {
        match self {
            Generator::NumberB => nb as f64,
            Generator::HalfDifference => 0.5 * (nb as f64 - na as f64),
        }
    }
}

fn clip(f: f64) -> f64 {
    if f < 0.0 && f > -1e-12 {
        0.0
    } else {
        f
    }
}

/// Phase uncertainty bound `1 / sqrt(F)`; infinite when `F = 0`.
pub fn delta_phi(qfi: f64) -> f64 {
    if qfi > 0.0 {
        1.0 / qfi.sqrt()
    } else {
        f64::INFINITY
    }
}

/// Pure-state QFI as a number variance. `s` must be normalized.
pub fn qfi_pure(s: &TwoModeState, config: PureConfig) -> f64 {
    let (generator, scale) = match config {
        PureConfig::OneModeB => (Generator::NumberB, 4.0),
        PureConfig::TwoModeHalf => (Generator::HalfDifference, 4.0),
    };
    let mean = s.expect_diagonal(|na, nb| generator.eigenvalue(na, nb));
    let second = s.expect_diagonal(|na, nb| generator.eigenvalue(na, nb).powi(2));
    clip(scale * (second - mean * mean))
}

/// Both evaluations of the mixed-state QFI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedQfi {
    /// `sum_{ij} 2 |<i| d rho |j>|^2 / (l_i + l_j)` over a complete eigenbasis.
    pub value: f64,
    /// `4 sum_i l_i f_i - sum_{i != j} 8 l_i l_j / (l_i + l_j) |<l'_i|l_j>|^2`
    /// over the supplied spectral terms.
    pub eigen_derivative_form: f64,
    /// Two supplied weights lie closer than [`DEGENERACY_GAP`].
    pub degenerate: bool,
}

/// Mixed-state QFI of `exp(i G phi) rho exp(-i G phi)` at `phi = 0`.
pub fn qfi_mixed(s: &SpectralState, generator: Generator) -> Result<f64> {
    qfi_mixed_detailed(s, generator).map(|q| q.value)
}

pub fn qfi_mixed_detailed(s: &SpectralState, generator: Generator) -> Result<MixedQfi> {
    let value = clip(sum_form(s, generator));
    let literal = clip(eigen_derivative_form(s, generator));
    if (value - literal).abs() > 1e-8 * value.abs().max(1.0) {
        return Err(Error::RouteMismatch {
            sum_form: value,
            literal,
        });
    }

    let mut weights: Vec<f64> = s.terms().iter().map(|t| t.weight).collect();
    weights.sort_by(f64::total_cmp);
    let degenerate = weights.windows(2).any(|w| w[1] - w[0] < DEGENERACY_GAP);
    if degenerate {
        log::debug!("near-degenerate spectrum; eigenvector derivatives are ambiguous, using the sum form");
    }
    Ok(MixedQfi {
        value,
        eigen_derivative_form: literal,
        degenerate,
    })
}

/// Re-diagonalizes the density operator block by block, kernel included, and
/// sums `2 (l_i - l_j)^2 |G_ij|^2 / (l_i + l_j)`, which equals
/// `2 |<i| i[G, rho] |j>|^2 / (l_i + l_j)`.
fn sum_form(s: &SpectralState, generator: Generator) -> f64 {
    let rho = SparseDensity::from_spectral(s, |_, _| true);
    let mut total = 0.0;
    for block in rho.blocks() {
        let d = block.basis.len();
        let lambda: Vec<f64> = block.values.iter().map(|v| v.max(0.0)).collect();
        let g: Vec<f64> = block
            .basis
            .iter()
            .map(|&(na, nb)| generator.eigenvalue(na, nb))
            .collect();
        let u = &block.vectors;
        for i in 0..d {
            for j in 0..d {
                let denom = lambda[i] + lambda[j];
                if denom <= DENOMINATOR_EPS || i == j {
                    continue;
                }
                let gij: num_complex::Complex64 =
                    (0..d).map(|r| u[(r, i)].conj() * g[r] * u[(r, j)]).sum();
                let diff = lambda[i] - lambda[j];
                total += 2.0 * diff * diff * gij.norm_sqr() / denom;
            }
        }
    }
    total
}

/// Evaluates the eigenvalue/eigenvector-derivative expression directly on the
/// supplied terms, with `|l'_i> = i G |l_i>`.
fn eigen_derivative_form(s: &SpectralState, generator: Generator) -> f64 {
    let n_max = s.n_max();
    let sparse: Vec<(f64, Vec<(usize, num_complex::Complex64, f64)>)> = s
        .terms()
        .iter()
        .map(|t| {
            let entries = t
                .vector
                .amps()
                .iter()
                .enumerate()
                .filter(|(_, a)| **a != num_complex::Complex64::default())
                .map(|(idx, a)| {
                    let (na, nb) = (idx / (n_max + 1), idx % (n_max + 1));
                    (idx, *a, generator.eigenvalue(na, nb))
                })
                .collect();
            (t.weight, entries)
        })
        .collect();

    let mut f = 0.0;
    for (w, v) in &sparse {
        let g1: f64 = v.iter().map(|(_, a, g)| g * a.norm_sqr()).sum();
        let g2: f64 = v.iter().map(|(_, a, g)| g * g * a.norm_sqr()).sum();
        f += 4.0 * w * (g2 - g1 * g1);
    }
    for (i, (wi, vi)) in sparse.iter().enumerate() {
        for (j, (wj, vj)) in sparse.iter().enumerate() {
            if i == j || wi + wj <= DENOMINATOR_EPS {
                continue;
            }
            // <l_i| G |l_j> by merging the sorted supports.
            let (mut p, mut q) = (0, 0);
            let mut overlap = num_complex::Complex64::default();
            while p < vi.len() && q < vj.len() {
                match vi[p].0.cmp(&vj[q].0) {
                    std::cmp::Ordering::Less => p += 1,
                    std::cmp::Ordering::Greater => q += 1,
                    std::cmp::Ordering::Equal => {
                        overlap += vi[p].1.conj() * vi[p].2 * vj[q].1;
                        p += 1;
                        q += 1;
                    }
                }
            }
            f -= 8.0 * wi * wj / (wi + wj) * overlap.norm_sqr();
        }
    }
    f
}

/// Closed reduction of the mixed-state QFI for noon-diagonal mixtures:
/// `sum_n n^2 (l+_n - l-_n)^2 / (l+_n + l-_n)`.
pub fn qfi_noon_mixture(m: &NoonMixture) -> f64 {
    m.rows
        .iter()
        .filter(|r| r.lambda_plus + r.lambda_minus > 0.0)
        .map(|r| {
            let n2 = (r.n * r.n) as f64;
            let d = r.lambda_plus - r.lambda_minus;
            n2 * d * d / (r.lambda_plus + r.lambda_minus)
        })
        .sum()
}

/// `F_{Q,1} / N_av` of `|C_N>|0> + |0>|C_N>` next to `4 (1 + Q)` of `|C_N>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MandelComparison {
    pub fisher_per_photon: f64,
    pub mandel_q: f64,
    pub mandel_prediction: f64,
    pub gap: f64,
}

pub fn mandel_ratio_comparison(n_components: usize, alpha: f64) -> Result<MandelComparison> {
    let n_max = fock::default_cutoff(alpha);
    let cat = fock::cat_state(CatSpec::real(n_components, alpha)?, n_max)?;
    let q = fock::mandel_q(&cat)?;
    let state = TwoModeState::path_symmetric(&cat)?;
    let n_av = state.number_moment(Mode::A, 1);
    let fisher_per_photon = qfi_pure(&state, PureConfig::OneModeB) / n_av;
    let mandel_prediction = 4.0 * (1.0 + q);
    Ok(MandelComparison {
        fisher_per_photon,
        mandel_q: q,
        mandel_prediction,
        gap: fisher_per_photon - mandel_prediction,
    })
}
