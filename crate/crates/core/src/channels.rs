//! Non-unitary maps on two-mode states: photon loss, phase averaging and the
//! heralded conditional-phase-shift rounds that grow cat components.

use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::binomial;

use crate::density::{Block, Occ, SparseDensity};
use crate::error::{Error, Result};
use crate::fock::{self, beam_splitter_5050, CatSpec, Mode, TwoModeState};

/// Eigenvalues below this fraction of their block's largest eigenvalue are
/// solver noise and are dropped.
const EIGEN_REL_FLOOR: f64 = 1e-13;
/// Negative eigenvalues beyond this are reported as errors, not clipped.
const NEGATIVE_TOL: f64 = 1e-12;
/// Stray weight allowed outside the noon span.
const NOON_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SpectralTerm {
    pub weight: f64,
    pub vector: TwoModeState,
}

/// Mixed two-mode state `sum_i w_i |v_i><v_i|` with orthonormal `v_i`.
#[derive(Debug, Clone)]
pub struct SpectralState {
    n_max: usize,
    terms: Vec<SpectralTerm>,
}

impl From<TwoModeState> for SpectralState {
    /// Rank-one wrapper; the weight is the squared norm of the vector.
    fn from(s: TwoModeState) -> Self {
        let n_max = s.n_max();
        let weight = s.norm_sqr();
        let terms = match s.normalize() {
            Ok(vector) => vec![SpectralTerm { weight, vector }],
            Err(_) => Vec::new(),
        };
        Self { n_max, terms }
    }
}

impl From<&TwoModeState> for SpectralState {
    fn from(s: &TwoModeState) -> Self {
        s.clone().into()
    }
}

impl SpectralState {
    pub fn from_terms(n_max: usize, terms: Vec<SpectralTerm>) -> Result<Self> {
        for t in &terms {
            if t.vector.n_max() != n_max {
                return Err(Error::DimensionMismatch {
                    left: t.vector.n_max(),
                    right: n_max,
                });
            }
            if t.weight < -NEGATIVE_TOL {
                return Err(Error::NegativeWeight(t.weight));
            }
        }
        Ok(Self { n_max, terms })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn terms(&self) -> &[SpectralTerm] {
        &self.terms
    }

    pub fn trace(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    pub fn number_moment(&self, mode: Mode, order: u32) -> f64 {
        self.terms
            .iter()
            .map(|t| t.weight * t.vector.number_moment(mode, order))
            .sum()
    }

    /// Largest deviation of the term vectors from orthonormality.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.terms.iter().enumerate() {
            for b in &self.terms[i..] {
                let g = a.vector.inner(&b.vector).unwrap_or_default();
                let target = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }

    /// Dense density matrix over the full `(n_max + 1)^2` grid.
    pub fn density_matrix(&self) -> DMatrix<Complex64> {
        let d = (self.n_max + 1) * (self.n_max + 1);
        let mut m = DMatrix::zeros(d, d);
        for t in &self.terms {
            let nz: Vec<(usize, Complex64)> = t
                .vector
                .amps()
                .iter()
                .enumerate()
                .filter(|(_, a)| **a != Complex64::default())
                .map(|(i, a)| (i, *a))
                .collect();
            for &(i, a) in &nz {
                for &(j, b) in &nz {
                    m[(i, j)] += a * b.conj() * t.weight;
                }
            }
        }
        m
    }

    pub(crate) fn from_blocks(n_max: usize, blocks: &[Block]) -> Result<Self> {
        let mut terms = Vec::new();
        for block in blocks {
            let top = block.values.iter().copied().fold(0.0, f64::max);
            for (k, &value) in block.values.iter().enumerate() {
                if value < -NEGATIVE_TOL {
                    return Err(Error::NegativeWeight(value));
                }
                if value <= top * EIGEN_REL_FLOOR || value <= 0.0 {
                    continue;
                }
                let mut v = TwoModeState::zeros(n_max);
                for (r, &(na, nb)) in block.basis.iter().enumerate() {
                    v.set(na, nb, block.vectors[(r, k)]);
                }
                terms.push(SpectralTerm {
                    weight: value,
                    vector: v,
                });
            }
        }
        Ok(Self { n_max, terms })
    }
}

/// Intensity transmission of the loss-modelling beam splitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    transmission: f64,
}

impl LossSpec {
    pub fn new(transmission: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmission) {
            return Err(Error::InvalidParameter(format!(
                "transmission {transmission} outside [0, 1]"
            )));
        }
        Ok(Self { transmission })
    }

    pub fn lossless() -> Self {
        Self { transmission: 1.0 }
    }

    pub fn transmission(&self) -> f64 {
        self.transmission
    }

    pub fn reflectance(&self) -> f64 {
        1.0 - self.transmission
    }
}

/// Equal pure loss on both modes.
///
/// Each mode passes through a beam splitter of transmission `T` whose other
/// port holds vacuum; the reflected mode is traced out. In operator-sum form
/// the `k`-photon-loss term is `sqrt(R^k / k!) T^{n/2} a^k`, which maps
/// `|n>` to `sqrt(C(n,k) T^{n-k} R^k) |n-k>`.
pub fn loss_channel(s: &SpectralState, loss: LossSpec) -> Result<SpectralState> {
    let n_max = s.n_max();
    let (t, r) = (loss.transmission(), loss.reflectance());
    let kraus: Vec<Vec<f64>> = (0..=n_max)
        .map(|n| {
            (0..=n)
                .map(|k| {
                    (binomial(n as u64, k as u64) * t.powi((n - k) as i32) * r.powi(k as i32))
                        .sqrt()
                })
                .collect()
        })
        .collect();

    let rho = SparseDensity::from_spectral(s, |_, _| true);
    let mut out: HashMap<(Occ, Occ), Complex64> = HashMap::with_capacity(rho.elems.len());
    for (&((na, nb), (ma, mb)), &v) in &rho.elems {
        if v == Complex64::default() {
            continue;
        }
        for ka in 0..=na.min(ma) {
            let ca = kraus[na][ka] * kraus[ma][ka];
            if ca == 0.0 {
                continue;
            }
            for kb in 0..=nb.min(mb) {
                let c = ca * kraus[nb][kb] * kraus[mb][kb];
                if c == 0.0 {
                    continue;
                }
                *out.entry(((na - ka, nb - kb), (ma - ka, mb - kb)))
                    .or_default() += v * c;
            }
        }
    }
    let rho_out = SparseDensity { elems: out };
    let result = SpectralState::from_blocks(n_max, &rho_out.blocks())?;
    let trace = result.trace();
    if (trace - 1.0).abs() > 1e-8 {
        return Err(Error::TraceLoss { trace });
    }
    Ok(result)
}

/// Uniform average over a common phase rotation of both modes: removes every
/// coherence between different total photon numbers.
pub fn phase_average(s: &SpectralState) -> Result<SpectralState> {
    let rho = SparseDensity::from_spectral(s, |i, j| i.0 + i.1 == j.0 + j.1);
    SpectralState::from_blocks(s.n_max(), &rho.blocks())
}

/// One row of a noon mixture: weights on `(|n,0> +/- e^{i n phi} |0,n>)/sqrt 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoonRow {
    pub n: usize,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

/// Mixed state diagonal in the noon basis. Row `n = 0` stores the whole
/// vacuum weight in `lambda_plus`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoonMixture {
    pub rows: Vec<NoonRow>,
    pub phi: f64,
}

impl NoonMixture {
    pub fn new(rows: Vec<NoonRow>, phi: f64) -> Result<Self> {
        let mut rows = rows;
        for row in &mut rows {
            for w in [&mut row.lambda_plus, &mut row.lambda_minus] {
                if *w < -1e-14 {
                    return Err(Error::NegativeWeight(*w));
                }
                *w = w.max(0.0);
            }
            if row.n == 0 {
                row.lambda_plus += row.lambda_minus;
                row.lambda_minus = 0.0;
            }
        }
        rows.sort_by_key(|r| r.n);
        Ok(Self { rows, phi })
    }

    pub fn trace(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.lambda_plus + r.lambda_minus)
            .sum()
    }

    pub fn row(&self, n: usize) -> NoonRow {
        self.rows
            .iter()
            .find(|r| r.n == n)
            .copied()
            .unwrap_or(NoonRow {
                n,
                lambda_plus: 0.0,
                lambda_minus: 0.0,
            })
    }

    /// Spectral form on a two-mode grid with cutoff `n_max`. Rows above the
    /// cutoff are dropped if their total weight is below the default tail
    /// tolerance.
    pub fn to_spectral(&self, n_max: usize) -> Result<SpectralState> {
        let tail: f64 = self
            .rows
            .iter()
            .filter(|r| r.n > n_max)
            .map(|r| r.lambda_plus + r.lambda_minus)
            .sum();
        if tail > fock::DEFAULT_TAIL_TOL {
            return Err(Error::CutoffTooSmall { n_max, tail });
        }
        let mut terms = Vec::new();
        for row in self.rows.iter().filter(|r| r.n <= n_max) {
            if row.n == 0 {
                if row.lambda_plus > 0.0 {
                    terms.push(SpectralTerm {
                        weight: row.lambda_plus,
                        vector: TwoModeState::vacuum(n_max),
                    });
                }
                continue;
            }
            let phase = Complex64::from_polar(1.0, row.n as f64 * self.phi);
            for (sign, weight) in [(1.0, row.lambda_plus), (-1.0, row.lambda_minus)] {
                if weight <= 0.0 {
                    continue;
                }
                let mut v = TwoModeState::zeros(n_max);
                v.set(row.n, 0, Complex64::new(1.0 / SQRT_2, 0.0));
                v.set(0, row.n, phase * (sign / SQRT_2));
                terms.push(SpectralTerm { weight, vector: v });
            }
        }
        SpectralState::from_terms(n_max, terms)
    }
}

/// Re-expresses a state supported on `span{|n,0>, |0,n>}` in the noon basis
/// with relative phase `e^{i n phi}`.
pub fn to_noon_mixture(s: &SpectralState, phi: f64) -> Result<NoonMixture> {
    // Weight of rho outside the noon span.
    let mut stray = 0.0;
    let mut worst = (0, 0.0);
    for t in s.terms() {
        for ((na, nb), a) in t.vector.iter_nonzero() {
            if na != 0 && nb != 0 {
                let w = t.weight * a.norm_sqr();
                stray += w;
                if w > worst.1 {
                    worst = (na + nb, w);
                }
            }
        }
    }
    if stray >= NOON_TOL {
        return Err(Error::NotNoonSupported {
            n: worst.0,
            weight: stray,
        });
    }
    let rho = SparseDensity::from_spectral(s, |i, j| {
        (i.0 == 0 || i.1 == 0) && (j.0 == 0 || j.1 == 0)
    });
    // Coherences between different photon numbers are not noon-diagonal.
    for (&(i, j), v) in &rho.elems {
        if i.0 + i.1 != j.0 + j.1 && v.norm() >= NOON_TOL {
            return Err(Error::NotNoonSupported {
                n: i.0 + i.1,
                weight: v.norm(),
            });
        }
    }

    let mut rows = vec![NoonRow {
        n: 0,
        lambda_plus: rho.get((0, 0), (0, 0)).re,
        lambda_minus: 0.0,
    }];
    for n in 1..=s.n_max() {
        let a = rho.get((n, 0), (n, 0)).re;
        let b = rho.get((0, n), (0, n)).re;
        let c = rho.get((n, 0), (0, n));
        let rotated = Complex64::from_polar(1.0, n as f64 * phi) * c;
        let off = Complex64::new(0.5 * (a - b), -rotated.im);
        if off.norm() >= NOON_TOL {
            return Err(Error::NotNoonSupported { n, weight: off.norm() });
        }
        rows.push(NoonRow {
            n,
            lambda_plus: 0.5 * (a + b) + rotated.re,
            lambda_minus: 0.5 * (a + b) - rotated.re,
        });
    }
    NoonMixture::new(rows, phi)
}

/// Result of heralded operations: the renormalized state and the probability
/// of the heralding outcomes.
#[derive(Debug, Clone)]
pub struct Herald {
    pub state: TwoModeState,
    pub success_probability: f64,
}

/// Conditional phase shift with the ancilla prepared and detected in `|+>`,
/// applied to mode `a` and then mode `b`: `|psi> -> |psi> + e^{i varphi n}|psi>`
/// on each mode, renormalized after each herald.
pub fn cps_round(s: &TwoModeState, varphi: f64) -> Result<Herald> {
    let mut state = s.normalize()?;
    let mut success_probability = 1.0;
    for mode in [Mode::A, Mode::B] {
        let branch = state.add(&state.phase_shift(mode, varphi))?;
        let norm = branch.norm_sqr();
        if norm < 1e-20 {
            return Err(Error::ZeroNorm);
        }
        success_probability *= norm / 4.0;
        state = branch.normalize()?;
    }
    Ok(Herald {
        state,
        success_probability,
    })
}

/// Output of the cat-growing generation scheme.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub state: TwoModeState,
    pub n_components: usize,
    pub success_probability: f64,
}

/// Beam-splits two even cats `|C_2(alpha/sqrt 2)>` and then applies `k`
/// heralded CPS rounds with `varphi_j = 2 pi / 2^{j+1}`, `j = 1..=k`, giving
/// `(|C_N(alpha)>|0> + |0>|C_N(alpha)>)` with `N = 2^{k+1}`.
pub fn synthesize_extended(alpha: f64, k: u32) -> Result<Synthesis> {
    if alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    if k > 20 {
        return Err(Error::InvalidParameter(format!("too many iterations: {k}")));
    }
    let n_max = fock::default_cutoff(alpha);
    let even_cat = fock::cat_state(CatSpec::real(2, alpha / SQRT_2)?, n_max)?;
    let mut state = beam_splitter_5050(&even_cat, &even_cat)?.normalize()?;
    let mut success_probability = 1.0;
    for j in 1..=k {
        let varphi = 2.0 * PI / f64::from(1u32 << (j + 1));
        let herald = cps_round(&state, varphi)?;
        success_probability *= herald.success_probability;
        state = herald.state;
    }
    Ok(Synthesis {
        state,
        n_components: 1 << (k + 1),
        success_probability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use statrs::function::factorial::ln_factorial;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn ecs(alpha: f64, n_max: usize) -> TwoModeState {
        TwoModeState::path_symmetric(&fock::coherent(c(alpha), n_max).unwrap()).unwrap()
    }

    fn modified(alpha: f64, n_max: usize) -> TwoModeState {
        let cat = fock::cat_state(CatSpec::real(2, alpha).unwrap(), n_max).unwrap();
        TwoModeState::path_symmetric(&cat).unwrap()
    }

    fn sector_weights(s: &SpectralState) -> Vec<f64> {
        let mut w = vec![0.0; 2 * s.n_max() + 1];
        for t in s.terms() {
            for (n, p) in t.vector.total_number_distribution().iter().enumerate() {
                w[n] += t.weight * p;
            }
        }
        w
    }

    #[test]
    fn lossless_channel_is_identity() {
        let s: SpectralState = ecs(0.8, 12).into();
        let out = loss_channel(&s, LossSpec::lossless()).unwrap();
        assert!(max_diff(&s.density_matrix(), &out.density_matrix()) < 1e-12);
    }

    #[test]
    fn coherent_input_stays_pure_under_loss() {
        let n_max = 16;
        let alpha = Complex64::new(0.9, 0.3);
        let t = 0.7;
        let input = TwoModeState::product(
            &fock::coherent(alpha, n_max).unwrap(),
            &fock::FockVector::vacuum(n_max),
        )
        .unwrap();
        let out = loss_channel(&input.into(), LossSpec::new(t).unwrap()).unwrap();
        assert_eq!(out.terms().len(), 1);
        let expected = TwoModeState::product(
            &fock::coherent(alpha * t.sqrt(), n_max).unwrap(),
            &fock::FockVector::vacuum(n_max),
        )
        .unwrap();
        assert_abs_diff_eq!(out.terms()[0].weight, 1.0, epsilon = 1e-10);
        assert!(1.0 - out.terms()[0].vector.fidelity(&expected).unwrap() < 1e-10);
    }

    #[test]
    fn loss_spec_bounds() {
        assert!(LossSpec::new(1.2).is_err());
        assert!(LossSpec::new(-0.1).is_err());
        assert_abs_diff_eq!(LossSpec::new(0.85).unwrap().reflectance(), 0.15, epsilon = 1e-15);
    }

    #[test]
    fn noon_unchanged_by_phase_average() {
        let s: SpectralState = TwoModeState::noon(3, 6).unwrap().into();
        let pa = phase_average(&s).unwrap();
        assert!(max_diff(&s.density_matrix(), &pa.density_matrix()) < 1e-14);
    }

    #[test]
    fn phase_averaged_ecs_has_poisson_sector_weights() {
        let alpha: f64 = 1.1;
        let x = alpha * alpha;
        let n_max = fock::default_cutoff(alpha);
        let pa = phase_average(&ecs(alpha, n_max).into()).unwrap();
        let w = sector_weights(&pa);
        for n in 0..=n_max {
            let mut expected =
                (-x).exp() * (n as f64 * x.ln() - ln_factorial(n as u64)).exp() / (1.0 + (-x).exp());
            if n == 0 {
                // The vacuum "noon" vector is |00> counted twice.
                expected *= 2.0;
            }
            assert_abs_diff_eq!(w[n], expected, epsilon = 1e-10);
        }
        to_noon_mixture(&pa, 0.0).unwrap();
    }

    #[test]
    fn phase_averaged_modified_state_keeps_even_sectors() {
        let alpha: f64 = 1.3;
        let x = alpha * alpha;
        let n_max = fock::default_cutoff(alpha);
        let pa = phase_average(&modified(alpha, n_max).into()).unwrap();
        let w = sector_weights(&pa);
        let e = (-x).exp();
        for n in 0..=n_max {
            let selector = if n % 2 == 0 { 2.0 } else { 0.0 };
            let mut expected =
                e / (1.0 + e).powi(2) * (n as f64 * x.ln() - ln_factorial(n as u64)).exp() * selector;
            if n == 0 {
                expected *= 2.0;
            }
            assert_abs_diff_eq!(w[n], expected, epsilon = 1e-10);
        }
    }

    #[test]
    fn noon_mixture_of_pure_noon() {
        let s: SpectralState = TwoModeState::noon(2, 5).unwrap().into();
        let m = to_noon_mixture(&s, 0.0).unwrap();
        let row = m.row(2);
        assert_abs_diff_eq!(row.lambda_plus, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(row.lambda_minus, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.trace(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn noon_mixture_rejects_thermal_like_state() {
        let n_max = 4;
        let mut terms = Vec::new();
        let z: f64 = (0..=n_max)
            .flat_map(|a| (0..=n_max).map(move |b| 0.5f64.powi((a + b) as i32)))
            .sum();
        for a in 0..=n_max {
            for b in 0..=n_max {
                let mut v = TwoModeState::zeros(n_max);
                v.set(a, b, c(1.0));
                terms.push(SpectralTerm {
                    weight: 0.5f64.powi((a + b) as i32) / z,
                    vector: v,
                });
            }
        }
        let s = SpectralState::from_terms(n_max, terms).unwrap();
        assert!(matches!(
            to_noon_mixture(&s, 0.0),
            Err(Error::NotNoonSupported { .. })
        ));
    }

    #[test]
    fn cps_round_cases() {
        let n_max = fock::default_cutoff(1.0);
        let s = modified(1.0, n_max);
        let h = cps_round(&s, 0.0).unwrap();
        assert!(1.0 - h.state.fidelity(&s).unwrap() < 1e-14);
        assert_abs_diff_eq!(h.success_probability, 1.0, epsilon = 1e-12);

        let v = TwoModeState::vacuum(8);
        let h = cps_round(&v, 1.0).unwrap();
        assert!(1.0 - h.state.fidelity(&v).unwrap() < 1e-14);

        let h = cps_round(&s, PI / 2.0).unwrap();
        let cat4 = fock::cat_state(CatSpec::real(4, 1.0).unwrap(), n_max).unwrap();
        let target = TwoModeState::path_symmetric(&cat4).unwrap();
        assert!(1.0 - h.state.fidelity(&target).unwrap() < 1e-10);
        assert!(h.success_probability > 0.0 && h.success_probability <= 1.0);
    }

    #[test]
    fn cps_round_zero_branch() {
        // |1,0> with varphi = pi is annihilated by the mode-a herald.
        let mut s = TwoModeState::zeros(3);
        s.set(1, 0, c(1.0));
        assert!(matches!(cps_round(&s, PI), Err(Error::ZeroNorm)));
    }

    #[test]
    fn synthesized_states_match_cat_targets() {
        for k in 0..=2u32 {
            let syn = synthesize_extended(1.0, k).unwrap();
            let n_max = syn.state.n_max();
            let cat = fock::cat_state(CatSpec::real(syn.n_components, 1.0).unwrap(), n_max).unwrap();
            let target = TwoModeState::path_symmetric(&cat).unwrap();
            let f = syn.state.fidelity(&target).unwrap();
            assert!(1.0 - f < 1e-10, "k={k}: fidelity {f}");
        }
        assert!(synthesize_extended(0.0, 1).is_err());
    }

    #[test]
    fn phase_average_idempotent_and_trace_preserving() {
        let n_max = 5;
        let mut s = TwoModeState::zeros(n_max);
        for a in 0..=n_max {
            for b in 0..=n_max {
                s.set(a, b, Complex64::new((a as f64 + 0.3).sin(), (b as f64 * 1.7).cos()));
            }
        }
        let s: SpectralState = s.normalize().unwrap().into();
        let once = phase_average(&s).unwrap();
        let twice = phase_average(&once).unwrap();
        assert_abs_diff_eq!(once.trace(), 1.0, epsilon = 1e-12);
        assert!(max_diff(&once.density_matrix(), &twice.density_matrix()) < 1e-12);
        assert!(once.orthonormality_error() < 1e-8);
    }

    #[test]
    fn loss_semigroup() {
        let n_max = 6;
        let mut v = TwoModeState::zeros(n_max);
        for a in 0..=n_max {
            for b in 0..=n_max {
                v.set(a, b, Complex64::new(1.0 / (1.0 + (a * b) as f64), (a as f64 - b as f64) * 0.1));
            }
        }
        let s: SpectralState = v.normalize().unwrap().into();
        let (t1, t2) = (0.8, 0.9);
        let two_step = loss_channel(
            &loss_channel(&s, LossSpec::new(t1).unwrap()).unwrap(),
            LossSpec::new(t2).unwrap(),
        )
        .unwrap();
        let one_step = loss_channel(&s, LossSpec::new(t1 * t2).unwrap()).unwrap();
        assert!(max_diff(&two_step.density_matrix(), &one_step.density_matrix()) < 1e-8);
    }
}
