//! Truncated Fock-space states of one and two bosonic modes.
//!
//! Single-mode states are amplitude vectors over photon numbers `0..=n_max`;
//! two-mode states are dense `(n_max + 1) x (n_max + 1)` grids indexed by
//! `(n_a, n_b)`. Every constructor checks that the probability mass discarded
//! by the cutoff stays below [`DEFAULT_TAIL_TOL`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};

/// Relative probability mass a constructor may drop beyond the cutoff.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Cutoffs never go below this many photons.
pub const MIN_CUTOFF: usize = 32;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    A,
    B,
}

/// Number of components and amplitude of a multi-headed cat state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatSpec {
    n_components: usize,
    alpha: Complex64,
}

impl CatSpec {
    pub fn new(n_components: usize, alpha: Complex64) -> Result<Self> {
        if n_components == 0 {
            return Err(Error::InvalidParameter(
                "a cat state needs at least one component".into(),
            ));
        }
        Ok(Self {
            n_components,
            alpha,
        })
    }

    pub fn real(n_components: usize, alpha: f64) -> Result<Self> {
        Self::new(n_components, Complex64::new(alpha, 0.0))
    }

    pub fn n_components(&self) -> usize {
        self.n_components
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }
}

/// Fraction of the weight `x^k / k!` (restricted to `k` divisible by
/// `stride`) that sits above `n_max`.
pub(crate) fn truncated_fraction(x: f64, stride: usize, n_max: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let ln_x = x.ln();
    let ln_term = |k: usize| k as f64 * ln_x - ln_factorial(k as u64);
    // The largest admissible term sits next to k = x.
    let peak = {
        let k0 = (x.floor() as usize / stride) * stride;
        ln_term(k0).max(ln_term(k0 + stride))
    };
    let mut kept = 0.0;
    let mut dropped = 0.0;
    let mut k = 0;
    loop {
        let rel = ln_term(k) - peak;
        let w = rel.exp();
        if k <= n_max {
            kept += w;
        } else {
            dropped += w;
        }
        if k as f64 > x && k > n_max && rel < -90.0 {
            break;
        }
        k += stride;
    }
    dropped / (kept + dropped)
}

/// Smallest cutoff whose Poisson(`alpha_abs^2`) tail is at most `tail_tol`,
/// floored at [`MIN_CUTOFF`].
pub fn truncation_bound(alpha_abs: f64, tail_tol: f64) -> usize {
    let x = alpha_abs * alpha_abs;
    let mut n = 0;
    while truncated_fraction(x, 1, n) > tail_tol {
        n += 1;
    }
    n.max(MIN_CUTOFF)
}

/// Working cutoff for states whose per-mode amplitude is at most `alpha_abs`.
pub fn default_cutoff(alpha_abs: f64) -> usize {
    let heuristic = (alpha_abs * alpha_abs + 10.0 * alpha_abs + 20.0).ceil() as usize;
    heuristic.max(truncation_bound(alpha_abs, DEFAULT_TAIL_TOL))
}

/// Single-mode pure state over photon numbers `0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<Complex64>,
}

impl FockVector {
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidParameter("empty amplitude vector".into()));
        }
        Ok(Self { amps })
    }

    pub fn vacuum(n_max: usize) -> Self {
        Self::number_state(0, n_max)
    }

    pub fn number_state(n: usize, n_max: usize) -> Self {
        let mut amps = vec![ZERO; n_max + 1];
        amps[n.min(n_max)] = ONE;
        Self { amps }
    }

    pub fn n_max(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, n: usize) -> Complex64 {
        self.amps.get(n).copied().unwrap_or(ZERO)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            amps: self.amps.iter().map(|a| a / norm).collect(),
        })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::DimensionMismatch {
                left: self.amps.len(),
                right: other.amps.len(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Weight on the last retained photon number.
    pub fn tail_mass(&self) -> f64 {
        self.amps[self.n_max()].norm_sqr()
    }

    /// `sum_n n^order |amps[n]|^2`.
    pub fn moment(&self, order: u32) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(n, a)| (n as f64).powi(order as i32) * a.norm_sqr())
            .sum()
    }

    pub fn mean_number(&self) -> f64 {
        self.moment(1)
    }

    /// Applies the annihilation operator (unnormalized).
    pub fn annihilate(&self) -> Self {
        let mut amps = vec![ZERO; self.amps.len()];
        for n in 1..self.amps.len() {
            amps[n - 1] = self.amps[n] * (n as f64).sqrt();
        }
        Self { amps }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }
}

/// Coherent state `|alpha>` with amplitudes `e^{-|alpha|^2/2} alpha^n / sqrt(n!)`.
pub fn coherent(alpha: Complex64, n_max: usize) -> Result<FockVector> {
    let x = alpha.norm_sqr();
    let tail = truncated_fraction(x, 1, n_max);
    if tail > DEFAULT_TAIL_TOL {
        return Err(Error::CutoffTooSmall { n_max, tail });
    }
    if x == 0.0 {
        return Ok(FockVector::vacuum(n_max));
    }
    let (r, theta) = alpha.to_polar();
    let ln_r = r.ln();
    let amps = (0..=n_max)
        .map(|n| {
            let ln_mag = -0.5 * x + n as f64 * ln_r - 0.5 * ln_factorial(n as u64);
            Complex64::from_polar(ln_mag.exp(), n as f64 * theta)
        })
        .collect();
    Ok(FockVector { amps })
}

/// Normalized equal superposition of `N` coherent states `|alpha e^{2 pi i k / N}>`.
///
/// Only photon numbers divisible by `N` carry weight.
pub fn cat_state(spec: CatSpec, n_max: usize) -> Result<FockVector> {
    let stride = spec.n_components;
    let x = spec.alpha.norm_sqr();
    let tail = truncated_fraction(x, stride, n_max);
    if tail > DEFAULT_TAIL_TOL {
        return Err(Error::CutoffTooSmall { n_max, tail });
    }
    if x == 0.0 {
        return Ok(FockVector::vacuum(n_max));
    }
    let (r, theta) = spec.alpha.to_polar();
    let ln_r = r.ln();
    let ln_mag = |n: usize| n as f64 * ln_r - 0.5 * ln_factorial(n as u64);
    let peak = (0..=n_max)
        .step_by(stride)
        .map(ln_mag)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut amps = vec![ZERO; n_max + 1];
    for n in (0..=n_max).step_by(stride) {
        amps[n] = Complex64::from_polar((ln_mag(n) - peak).exp(), n as f64 * theta);
    }
    FockVector { amps }.normalize()
}

/// Mandel Q factor `(Var n - <n>) / <n>`.
pub fn mandel_q(s: &FockVector) -> Result<f64> {
    let mean = s.moment(1);
    if mean < 1e-14 {
        return Err(Error::UndefinedForVacuum);
    }
    Ok((s.moment(2) - mean * mean) / mean - 1.0)
}

/// Two-mode pure state on the grid `(n_a, n_b)`, both axes `0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    n_max: usize,
    amps: Vec<Complex64>,
}

impl TwoModeState {
    pub fn zeros(n_max: usize) -> Self {
        Self {
            n_max,
            amps: vec![ZERO; (n_max + 1) * (n_max + 1)],
        }
    }

    pub fn vacuum(n_max: usize) -> Self {
        let mut s = Self::zeros(n_max);
        s.amps[0] = ONE;
        s
    }

    /// Row-major grid: index `n_a * (n_max + 1) + n_b`.
    pub fn from_grid(n_max: usize, amps: Vec<Complex64>) -> Result<Self> {
        let dim = (n_max + 1) * (n_max + 1);
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                left: amps.len(),
                right: dim,
            });
        }
        Ok(Self { n_max, amps })
    }

    pub fn product(a: &FockVector, b: &FockVector) -> Result<Self> {
        if a.n_max() != b.n_max() {
            return Err(Error::DimensionMismatch {
                left: a.n_max(),
                right: b.n_max(),
            });
        }
        let mut s = Self::zeros(a.n_max());
        for (na, x) in a.amps.iter().enumerate() {
            for (nb, y) in b.amps.iter().enumerate() {
                s.set(na, nb, x * y);
            }
        }
        Ok(s)
    }

    /// `(|n,0> + |0,n>) / sqrt(2)`; the vacuum for `n = 0`.
    pub fn noon(n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(Error::CutoffTooSmall { n_max, tail: 1.0 });
        }
        let mut s = Self::zeros(n_max);
        if n == 0 {
            s.set(0, 0, ONE);
        } else {
            let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            s.set(n, 0, h);
            s.set(0, n, h);
        }
        Ok(s)
    }

    /// Normalized `|v>_a |0>_b + |0>_a |v>_b`.
    pub fn path_symmetric(v: &FockVector) -> Result<Self> {
        let n_max = v.n_max();
        let mut s = Self::zeros(n_max);
        for (n, a) in v.amps.iter().enumerate() {
            *s.amp_mut(n, 0) += a;
            *s.amp_mut(0, n) += a;
        }
        s.normalize()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    #[inline]
    pub fn index(&self, na: usize, nb: usize) -> usize {
        na * (self.n_max + 1) + nb
    }

    #[inline]
    pub fn occupation(&self, idx: usize) -> (usize, usize) {
        (idx / (self.n_max + 1), idx % (self.n_max + 1))
    }

    pub fn amp(&self, na: usize, nb: usize) -> Complex64 {
        if na > self.n_max || nb > self.n_max {
            return ZERO;
        }
        self.amps[self.index(na, nb)]
    }

    pub fn set(&mut self, na: usize, nb: usize, value: Complex64) {
        let i = self.index(na, nb);
        self.amps[i] = value;
    }

    fn amp_mut(&mut self, na: usize, nb: usize) -> &mut Complex64 {
        let i = self.index(na, nb);
        &mut self.amps[i]
    }

    /// Nonzero amplitudes as `((n_a, n_b), amp)`.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = ((usize, usize), Complex64)> + '_ {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != ZERO)
            .map(|(i, a)| (self.occupation(i), *a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.map_amps(|_, a| a / norm))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        self.map_amps(|_, a| a * factor)
    }

    fn map_amps(&self, f: impl Fn((usize, usize), Complex64) -> Complex64) -> Self {
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| f(self.occupation(i), *a))
            .collect();
        Self {
            n_max: self.n_max,
            amps,
        }
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.n_max != other.n_max {
            return Err(Error::DimensionMismatch {
                left: self.n_max,
                right: other.n_max,
            });
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_grid(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2` between the normalized states.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        let overlap = self.inner(other)?.norm_sqr();
        Ok(overlap / (self.norm_sqr() * other.norm_sqr()))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            n_max: self.n_max,
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect(),
        })
    }

    /// Applies `exp(i phi n_mode)`.
    pub fn phase_shift(&self, mode: Mode, phi: f64) -> Self {
        self.map_amps(|(na, nb), a| {
            let n = match mode {
                Mode::A => na,
                Mode::B => nb,
            };
            a * Complex64::from_polar(1.0, phi * n as f64)
        })
    }

    /// `sum f(n_a, n_b) |amp|^2` for an operator diagonal in the number basis.
    pub fn expect_diagonal(&self, f: impl Fn(usize, usize) -> f64) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let (na, nb) = self.occupation(i);
                f(na, nb) * a.norm_sqr()
            })
            .sum()
    }

    /// `<n_mode^order>`.
    pub fn number_moment(&self, mode: Mode, order: u32) -> f64 {
        self.expect_diagonal(|na, nb| {
            let n = match mode {
                Mode::A => na,
                Mode::B => nb,
            };
            (n as f64).powi(order as i32)
        })
    }

    /// Probability of each total photon number `n_a + n_b`.
    pub fn total_number_distribution(&self) -> Vec<f64> {
        let mut p = vec![0.0; 2 * self.n_max + 1];
        for (i, a) in self.amps.iter().enumerate() {
            let (na, nb) = self.occupation(i);
            p[na + nb] += a.norm_sqr();
        }
        p
    }
}

/// 50:50 beam splitter acting as `a^dag -> (a^dag - b^dag)/sqrt 2`,
/// `b^dag -> (a^dag + b^dag)/sqrt 2`.
///
/// Coherent inputs `|u>_a |v>_b` leave as `|(u+v)/sqrt 2>_a |(v-u)/sqrt 2>_b`.
/// The output keeps the input cutoff; the discarded mass must stay below 1e-10.
pub fn beam_splitter_5050(a: &FockVector, b: &FockVector) -> Result<TwoModeState> {
    if a.n_max() != b.n_max() {
        return Err(Error::DimensionMismatch {
            left: a.n_max(),
            right: b.n_max(),
        });
    }
    let n_max = a.n_max();
    // Work on a grid wide enough to hold every total photon number.
    let width = 2 * n_max + 1;
    let idx = |i: usize, j: usize| i * width + j;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let sqrt_n: Vec<f64> = (0..=width).map(|n| (n as f64).sqrt()).collect();

    // `out = (ca a^dag + cb b^dag) v`, with `v` supported on totals below `max_total`.
    let raise = |v: &[Complex64], ca: f64, cb: f64, max_total: usize| -> Vec<Complex64> {
        let mut out = vec![ZERO; width * width];
        for i in 0..=max_total.min(width - 1) {
            for j in 0..=(max_total - i).min(width - 1) {
                let x = v[idx(i, j)];
                if x == ZERO {
                    continue;
                }
                out[idx(i + 1, j)] += x * (ca * sqrt_n[i + 1]);
                out[idx(i, j + 1)] += x * (cb * sqrt_n[j + 1]);
            }
        }
        out
    };
    let coeffs = |v: &FockVector| -> Vec<Complex64> {
        v.amps
            .iter()
            .enumerate()
            .map(|(n, c)| c * (-0.5 * ln_factorial(n as u64)).exp())
            .collect()
    };

    // Horner evaluation of g(B)|0,0> with B = (a^dag + b^dag)/sqrt 2.
    let eb = coeffs(b);
    let mut w = vec![ZERO; width * width];
    w[0] = eb[n_max];
    for n in (0..n_max).rev() {
        w = raise(&w, inv_sqrt2, inv_sqrt2, n_max - n - 1);
        w[0] += eb[n];
    }
    // Horner evaluation of f(A) w with A = (a^dag - b^dag)/sqrt 2.
    let ea = coeffs(a);
    let mut u: Vec<Complex64> = w.iter().map(|x| x * ea[n_max]).collect();
    for m in (0..n_max).rev() {
        u = raise(&u, inv_sqrt2, -inv_sqrt2, 2 * n_max - m - 1);
        for (ui, wi) in u.iter_mut().zip(&w) {
            *ui += wi * ea[m];
        }
    }

    let mut out = TwoModeState::zeros(n_max);
    let mut dropped = 0.0;
    for i in 0..width {
        for j in 0..width {
            let x = u[idx(i, j)];
            if i <= n_max && j <= n_max {
                out.set(i, j, x);
            } else {
                dropped += x.norm_sqr();
            }
        }
    }
    let input = a.norm_sqr() * b.norm_sqr();
    if dropped > 1e-10 * input {
        return Err(Error::CutoffTooSmall {
            n_max,
            tail: dropped / input,
        });
    }
    Ok(out)
}
