//! Analytic expressions for the resource families as plain scalar functions.
//!
//! Every series uses term-ratio stopping: summation ends once a term on the
//! decreasing side of the series falls below `1e-16` of the running sum, with
//! a hard cap of [`SERIES_MAX_TERMS`].
//!
//! Two different quantities share the letter K in the literature. Here
//! [`cat_tail_k`] is the cat normalization series `sum |alpha|^{2Nn}/(Nn)!`
//! and [`loss_k`] is the sector factor `e^{R|alpha|^2} + (-1)^n e^{-R|alpha|^2}`
//! of the lossy modified state.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};
use statrs::function::factorial::{ln_binomial, ln_factorial};

use crate::channels::{LossSpec, NoonMixture, NoonRow};
use crate::error::{Error, Result};
use crate::fock;

pub const SERIES_REL_TOL: f64 = 1e-16;
pub const SERIES_MAX_TERMS: usize = 5000;
/// Allowed trace deficit of an analytic noon mixture.
pub const MIXTURE_TRACE_TOL: f64 = 1e-10;

/// Sums `term(0) + term(1) + ...` with term-ratio stopping.
fn series(mut term: impl FnMut(usize) -> f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for k in 0..SERIES_MAX_TERMS {
        let t = term(k);
        sum += t;
        if t.abs() <= prev.abs() && t.abs() < SERIES_REL_TOL * sum.abs() {
            return Ok(sum);
        }
        if t == 0.0 && sum == 0.0 && k > 0 {
            return Ok(sum);
        }
        prev = t;
    }
    Err(Error::SeriesCapExceeded {
        terms: SERIES_MAX_TERMS,
    })
}

/// `x^n / n!` evaluated in log space; `0^0 = 1`.
fn poisson_term(x: f64, n: usize) -> f64 {
    if n == 0 {
        1.0
    } else if x == 0.0 {
        0.0
    } else {
        (n as f64 * x.ln() - ln_factorial(n as u64)).exp()
    }
}

/// `sum_n |alpha|^{2Nn} / (Nn)!`.
pub fn cat_tail_k(n_components: usize, alpha: f64) -> Result<f64> {
    let x = alpha * alpha;
    series(|n| poisson_term(x, n_components * n))
}

/// `sum_n |alpha|^{2Nn} (Nn)^p / (Nn)!`.
fn cat_moment_series(n_components: usize, alpha: f64, power: i32) -> Result<f64> {
    let x = alpha * alpha;
    series(|n| {
        let m = n_components * n;
        poisson_term(x, m) * (m as f64).powi(power)
    })
}

/// `e^{R x} + (-1)^n e^{-R x}`.
pub fn loss_k(n: usize, x: f64, reflectance: f64) -> f64 {
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    (reflectance * x).exp() + sign * (-reflectance * x).exp()
}

/// Squared norm of `sum_k |alpha e^{2 pi i k / N}>`:
/// `N sum_q Re exp(|alpha|^2 (e^{2 pi i q / N} - 1))`.
pub fn normalization(n_components: usize, alpha: f64) -> f64 {
    let x = alpha * alpha;
    let n = n_components as f64;
    n * (0..n_components)
        .map(|q| {
            let theta = 2.0 * PI * q as f64 / n;
            (x * (theta.cos() - 1.0)).exp() * (x * theta.sin()).cos()
        })
        .sum::<f64>()
}

/// Mode-b number moments of an input state plus its per-mode mean photon number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentPair {
    pub mean_nb: f64,
    pub mean_nb2: f64,
    pub n_av: f64,
}

impl MomentPair {
    pub fn variance(&self) -> f64 {
        self.mean_nb2 - self.mean_nb * self.mean_nb
    }

    /// `4 Var(n_b)`.
    pub fn qfi_one_mode(&self) -> f64 {
        let f = 4.0 * self.variance();
        if f < 0.0 && f > -1e-12 {
            0.0
        } else {
            f
        }
    }
}

/// Moments of the state obtained by mixing `|C_4(alpha/sqrt 2)>` with
/// `|beta/sqrt 2>` on a 50:50 beam splitter.
pub fn fig1_moments(alpha: f64, beta: f64) -> MomentPair {
    let (a2, b2) = (alpha * alpha, beta * beta);
    let (a4, b4) = (a2 * a2, b2 * b2);
    let me = normalization(4, alpha / SQRT_2);
    let e = (-a2).exp();
    let h = (-a2 / 2.0).exp();
    let (cos, sin) = ((a2 / 2.0).cos(), (a2 / 2.0).sin());
    let mean_nb2 = ((a4 + b4) / 4.0 + b2) * (1.0 + e)
        + a2 * (1.0 + b2) * (1.0 - e)
        + 2.0 * h * ((b2 + (b4 - a4) / 4.0) * cos - a2 * (1.0 + b2) * sin);
    let mean_nb = a2 * (1.0 - e - 2.0 * h * sin) + b2 * (1.0 + e + 2.0 * h * cos);
    MomentPair {
        mean_nb: mean_nb / me,
        mean_nb2: mean_nb2 / me,
        n_av: mean_nb / me,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EcsQfi {
    pub qfi: f64,
    pub n_av: f64,
}

/// One-mode QFI and mean photon number of `|alpha,0> + |0,alpha>`.
pub fn ecs_qfi(alpha: f64) -> EcsQfi {
    let x = alpha * alpha;
    let d = 1.0 + (-x).exp();
    EcsQfi {
        qfi: 2.0 * (x + x * x) / d - x * x / (d * d),
        n_av: x / (2.0 * d),
    }
}

/// Moments of `(|alpha> + |-alpha>)|0> + |0>(|alpha> + |-alpha>)`.
pub fn modified_moments(alpha: f64) -> MomentPair {
    let x = alpha * alpha;
    let d = 1.0 + (-x).exp();
    let e2 = (-2.0 * x).exp();
    let mean_nb2 = x * (1.0 + x + (x - 1.0) * e2) / (2.0 * d * d);
    let mean_nb = x * (1.0 - e2) / (2.0 * d * d);
    MomentPair {
        mean_nb,
        mean_nb2,
        n_av: mean_nb,
    }
}

/// Moments of `|C_N(alpha)>|0> + |0>|C_N(alpha)>`.
pub fn extended_moments(n_components: usize, alpha: f64) -> Result<MomentPair> {
    check_components(n_components)?;
    let k = cat_tail_k(n_components, alpha)?;
    let pref = 1.0 / (2.0 * (1.0 + k));
    let mean_nb = pref * cat_moment_series(n_components, alpha, 1)?;
    let mean_nb2 = pref * cat_moment_series(n_components, alpha, 2)?;
    Ok(MomentPair {
        mean_nb,
        mean_nb2,
        n_av: mean_nb,
    })
}

/// Normalization `M = 2 [1 + 1/K]` of the extended entangled state.
pub fn extended_normalization(n_components: usize, alpha: f64) -> Result<f64> {
    Ok(2.0 * (1.0 + 1.0 / cat_tail_k(n_components, alpha)?))
}

fn check_components(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    Ok(())
}

/// Resource families with analytic phase-averaged and lossy forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateFamily {
    /// Noon state with photon number `n` (real-valued for smooth curves).
    Noon(f64),
    Ecs,
    Modified,
    Extended(usize),
}

/// `N + 2 sum_{q=1}^{N-1} (N - q) cos(2 pi n q / N)`, which equals `N^2` when
/// `N | n` and zero otherwise.
pub fn cosine_selector(n_components: usize, n: usize) -> f64 {
    let big_n = n_components as f64;
    big_n
        + 2.0
            * (1..n_components)
                .map(|q| {
                    let r = (n * q) % n_components;
                    (n_components - q) as f64 * (2.0 * PI * r as f64 / big_n).cos()
                })
                .sum::<f64>()
}

fn as_photon_number(n: f64) -> Result<usize> {
    if n < 0.0 || (n - n.round()).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "noon photon number {n} is not a nonnegative integer"
        )));
    }
    Ok(n.round() as usize)
}

/// Total weight of the photon-number-`n` sector after phase averaging.
///
/// The vacuum sector carries twice the coefficient of the (unnormalized)
/// `n = 0` noon projector, so the weights over all `n` sum to one.
pub fn pa_weights(family: StateFamily, alpha: f64, n: usize) -> Result<f64> {
    let x = alpha * alpha;
    let vacuum = if n == 0 { 2.0 } else { 1.0 };
    let w = match family {
        StateFamily::Noon(m) => {
            if as_photon_number(m)? == n {
                1.0
            } else {
                0.0
            }
        }
        StateFamily::Ecs => {
            let e = (-x).exp();
            vacuum * e / (1.0 + e) * poisson_term(x, n)
        }
        StateFamily::Modified => {
            let e = (-x).exp();
            let selector = if n % 2 == 0 { 2.0 } else { 0.0 };
            vacuum * e / (1.0 + e).powi(2) * poisson_term(x, n) * selector
        }
        StateFamily::Extended(big_n) => {
            check_components(big_n)?;
            let k = cat_tail_k(big_n, alpha)?;
            let nn = (big_n * big_n) as f64;
            vacuum * poisson_term(x, n) * cosine_selector(big_n, n) / (nn * (1.0 + k))
        }
    };
    Ok(w)
}

/// QFI of the phase-averaged state.
pub fn pa_qfi(family: StateFamily, alpha: f64) -> Result<f64> {
    let x = alpha * alpha;
    let e = (-x).exp();
    match family {
        StateFamily::Noon(n) => Ok(n * n),
        StateFamily::Ecs => Ok(x * (1.0 + x) / (1.0 + e)),
        StateFamily::Modified => Ok(x * (1.0 + x + (x - 1.0) * (-2.0 * x).exp()) / (1.0 + e).powi(2)),
        StateFamily::Extended(big_n) => {
            check_components(big_n)?;
            Ok(cat_moment_series(big_n, alpha, 2)? / (1.0 + cat_tail_k(big_n, alpha)?))
        }
    }
}

/// Per-mode mean photon number of the (phase-averaged or pure) input.
pub fn family_n_av(family: StateFamily, alpha: f64) -> Result<f64> {
    match family {
        StateFamily::Noon(n) => Ok(n / 2.0),
        StateFamily::Ecs => Ok(ecs_qfi(alpha).n_av),
        StateFamily::Modified => Ok(modified_moments(alpha).n_av),
        StateFamily::Extended(big_n) => Ok(extended_moments(big_n, alpha)?.n_av),
    }
}

/// Photon-number cutoff for the analytic mixtures at amplitude `alpha`.
pub fn default_mixture_cutoff(alpha: f64) -> usize {
    fock::truncation_bound(alpha, 1e-14) + 8
}

/// Spectrum of the phase-averaged state after equal loss on both modes, in
/// the noon basis. Row `n = 0` holds the full vacuum weight.
pub fn lossy_noon_mixture(
    family: StateFamily,
    alpha: f64,
    loss: LossSpec,
    n_cut: usize,
) -> Result<NoonMixture> {
    let x = alpha * alpha;
    let (t, r) = (loss.transmission(), loss.reflectance());
    let mut rows = Vec::with_capacity(n_cut + 1);
    match family {
        StateFamily::Noon(n) => {
            let n = as_photon_number(n)?;
            for m in 0..=n {
                let w = if m == n {
                    t.powi(n as i32)
                } else {
                    0.5 * (ln_binomial(n as u64, m as u64)).exp()
                        * t.powi(m as i32)
                        * r.powi((n - m) as i32)
                };
                let (plus, minus) = match m {
                    0 => (2.0 * w, 0.0),
                    _ if m == n => (w, 0.0),
                    _ => (w, w),
                };
                rows.push(NoonRow {
                    n: m,
                    lambda_plus: plus,
                    lambda_minus: minus,
                });
            }
        }
        StateFamily::Ecs => {
            let denom = 2.0 * (1.0 + x.exp());
            let erx = (r * x).exp();
            for m in 0..n_cut {
                let p = poisson_term(x * t, m);
                let plus = p * (erx + 1.0) / denom;
                let minus = p * (erx - 1.0) / denom;
                rows.push(vacuum_row(m, plus, minus));
            }
        }
        StateFamily::Modified => {
            let e = (-x).exp();
            let pref = e / (2.0 * (1.0 + e).powi(2));
            for m in 0..n_cut {
                let k = loss_k(m, x, r);
                let parity = if m % 2 == 0 { 1.0 } else { -1.0 };
                let p = pref * poisson_term(x * t, m);
                rows.push(vacuum_row(m, p * (k + 1.0 + parity), p * (k - 1.0 - parity)));
            }
        }
        StateFamily::Extended(big_n) => {
            check_components(big_n)?;
            let k = cat_tail_k(big_n, alpha)?;
            let pref = 1.0 / ((big_n * big_n) as f64 * (1.0 + k));
            let c: Vec<f64> = (0..n_cut)
                .map(|n| poisson_term(x, n) * cosine_selector(big_n, n))
                .collect();
            for m in 0..n_cut {
                // sum_{n>m} n! C_n R^{n-m} / ((n-m)! m!)
                let inner: f64 = if r == 0.0 {
                    0.0
                } else {
                    (m + 1..n_cut)
                        .map(|n| {
                            let ln = ln_binomial(n as u64, m as u64) + (n - m) as f64 * r.ln();
                            ln.exp() * c[n]
                        })
                        .sum()
                };
                let tm = t.powi(m as i32);
                let plus = pref * tm * (c[m] + 0.5 * inner);
                let minus = 0.5 * pref * tm * inner;
                rows.push(vacuum_row(m, plus, minus));
            }
        }
    }
    let mixture = NoonMixture::new(rows, 0.0)?;
    let deficit = (mixture.trace() - 1.0).abs();
    if deficit > MIXTURE_TRACE_TOL {
        return Err(Error::TailTooHeavy { deficit });
    }
    Ok(mixture)
}

/// Row `m` with the vacuum convention applied: at `m = 0` the projector is
/// `2|00><00|` and the minus branch has no vector.
fn vacuum_row(m: usize, plus: f64, minus: f64) -> NoonRow {
    if m == 0 {
        NoonRow {
            n: 0,
            lambda_plus: 2.0 * plus,
            lambda_minus: 0.0,
        }
    } else {
        NoonRow {
            n: m,
            lambda_plus: plus,
            lambda_minus: minus,
        }
    }
}

/// QFI of the phase-averaged state after loss. Noon states use `T^n n^2`,
/// valid for real `n`.
pub fn lossy_qfi(family: StateFamily, alpha: f64, loss: LossSpec) -> Result<f64> {
    match family {
        StateFamily::Noon(n) => Ok(loss.transmission().powf(n) * n * n),
        _ => {
            let m = lossy_noon_mixture(family, alpha, loss, default_mixture_cutoff(alpha))?;
            Ok(crate::qfi::qfi_noon_mixture(&m))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn normalization_matches_series() {
        assert_abs_diff_eq!(normalization(4, 0.0), 16.0, epsilon = 1e-14);
        let alpha = 2f64.sqrt();
        let m4 = normalization(4, alpha);
        let x: f64 = 2.0;
        let printed = 4.0 * (1.0 + (-2.0 * x).exp() + 2.0 * (-x).exp() * x.cos());
        assert_abs_diff_eq!(m4, printed, epsilon = 1e-13);
        assert_abs_diff_eq!(m4, 3.622_707_755_617_9, epsilon = 1e-12);
        for n in [1usize, 2, 3, 4, 8, 16] {
            for alpha in [0.3f64, 1.0, 2.1] {
                let x = alpha * alpha;
                let series = (n * n) as f64 * (-x).exp() * cat_tail_k(n, alpha).unwrap();
                assert_abs_diff_eq!(normalization(n, alpha), series, epsilon = 1e-12 * series.max(1.0));
            }
        }
        let x: f64 = 1.44;
        assert_abs_diff_eq!(normalization(2, 1.2), 2.0 * (1.0 + (-2.0 * x).exp()), epsilon = 1e-14);
    }

    #[test]
    fn fig1_reduces_to_coherent_at_zero_alpha() {
        let beta: f64 = 1.7;
        let m = fig1_moments(0.0, beta);
        let b2 = beta * beta;
        assert_abs_diff_eq!(m.mean_nb, b2 / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.mean_nb2, b2 * b2 / 16.0 + b2 / 4.0, epsilon = 1e-14);
    }

    #[test]
    fn ecs_values() {
        let zero = ecs_qfi(0.0);
        assert_eq!((zero.qfi, zero.n_av), (0.0, 0.0));
        let one = ecs_qfi(1.0);
        assert_abs_diff_eq!(one.qfi, 2.389_787_669_131_5, epsilon = 1e-12);
        assert_abs_diff_eq!(one.n_av, 0.365_529_289_315_0, epsilon = 1e-12);
        // Large amplitude: F / N_av approaches 2|alpha|^2 + 4 = 4 (1 + N_av).
        let big = ecs_qfi(5.0);
        let ratio = big.qfi / big.n_av;
        assert!((ratio / 54.0 - 1.0).abs() < 0.01, "{ratio}");
    }

    #[test]
    fn modified_values() {
        let zero = modified_moments(0.0);
        assert_eq!((zero.mean_nb, zero.mean_nb2, zero.n_av), (0.0, 0.0, 0.0));
        let m = modified_moments(1.0);
        let e = (-1f64).exp();
        assert_abs_diff_eq!(m.mean_nb, (1.0 - e * e) / (2.0 * (1.0 + e).powi(2)), epsilon = 1e-15);
        assert_abs_diff_eq!(m.mean_nb, 0.231_058_578_630_005, epsilon = 1e-12);
    }

    #[test]
    fn extended_reductions() {
        for alpha in [0.25, 0.5, 1.0, 1.5, 2.0, 3.0] {
            let e1 = extended_moments(1, alpha).unwrap();
            let ecs = ecs_qfi(alpha);
            assert_abs_diff_eq!(e1.n_av, ecs.n_av, epsilon = 1e-10 * ecs.n_av.max(1.0));
            assert_abs_diff_eq!(e1.qfi_one_mode(), ecs.qfi, epsilon = 1e-10 * ecs.qfi.max(1.0));
            let e2 = extended_moments(2, alpha).unwrap();
            let m = modified_moments(alpha);
            assert_abs_diff_eq!(e2.mean_nb, m.mean_nb, epsilon = 1e-10 * m.mean_nb.max(1.0));
            assert_abs_diff_eq!(e2.mean_nb2, m.mean_nb2, epsilon = 1e-10 * m.mean_nb2.max(1.0));
            // The printed normalization equals 2(1 + |<0|C_N>|^2).
            let x: f64 = alpha * alpha;
            assert_abs_diff_eq!(
                extended_normalization(1, alpha).unwrap(),
                2.0 * (1.0 + (-x).exp()),
                epsilon = 1e-12
            );
        }
        assert!(extended_moments(0, 1.0).is_err());
    }

    #[test]
    fn phase_averaged_weights() {
        for n in (1..20).step_by(2) {
            assert_eq!(pa_weights(StateFamily::Modified, 1.2, n).unwrap(), 0.0);
        }
        assert_abs_diff_eq!(pa_weights(StateFamily::Extended(4), 1.0, 6).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cosine_selector(4, 8), 16.0, epsilon = 1e-12);
        for family in [StateFamily::Ecs, StateFamily::Modified, StateFamily::Extended(4), StateFamily::Extended(8)] {
            let total: f64 = (0..80).map(|n| pa_weights(family, 1.0, n).unwrap()).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        }
        assert_eq!(pa_weights(StateFamily::Noon(3.0), 1.0, 3).unwrap(), 1.0);
    }

    #[test]
    fn phase_averaged_qfi_values() {
        assert_eq!(pa_qfi(StateFamily::Noon(4.0), 0.0).unwrap(), 16.0);
        assert_abs_diff_eq!(pa_qfi(StateFamily::Modified, 1.0).unwrap(), 1.068_893_290_777_05, epsilon = 1e-12);
        assert_abs_diff_eq!(pa_qfi(StateFamily::Ecs, 1.0).unwrap(), 1.462_117_157_260_01, epsilon = 1e-12);
        // Extended N=1, 2 collapse onto the ECS and modified closed forms.
        for alpha in [0.5, 1.5, 3.0] {
            let a = pa_qfi(StateFamily::Extended(1), alpha).unwrap();
            let b = pa_qfi(StateFamily::Ecs, alpha).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-10 * b);
            let a = pa_qfi(StateFamily::Extended(2), alpha).unwrap();
            let b = pa_qfi(StateFamily::Modified, alpha).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-10 * b);
        }
    }

    #[test]
    fn lossless_mixture_matches_phase_averaged_weights() {
        for family in [StateFamily::Ecs, StateFamily::Modified, StateFamily::Extended(4)] {
            let m = lossy_noon_mixture(family, 1.2, LossSpec::lossless(), 60).unwrap();
            for row in &m.rows {
                assert_abs_diff_eq!(row.lambda_minus, 0.0, epsilon = 1e-15);
                assert_abs_diff_eq!(row.lambda_plus, pa_weights(family, 1.2, row.n).unwrap(), epsilon = 1e-14);
            }
            let f = crate::qfi::qfi_noon_mixture(&m);
            assert_abs_diff_eq!(f, pa_qfi(family, 1.2).unwrap(), epsilon = 1e-10);
        }
    }

    #[test]
    fn general_loss_formula_reduces_to_specific_ones() {
        let loss = LossSpec::new(0.85).unwrap();
        for alpha in [0.5, 1.0, 2.0] {
            let ecs = lossy_noon_mixture(StateFamily::Ecs, alpha, loss, 70).unwrap();
            let ext1 = lossy_noon_mixture(StateFamily::Extended(1), alpha, loss, 70).unwrap();
            let modi = lossy_noon_mixture(StateFamily::Modified, alpha, loss, 70).unwrap();
            let ext2 = lossy_noon_mixture(StateFamily::Extended(2), alpha, loss, 70).unwrap();
            for n in 0..70 {
                let (a, b) = (ecs.row(n), ext1.row(n));
                assert_abs_diff_eq!(a.lambda_plus, b.lambda_plus, epsilon = 1e-12);
                assert_abs_diff_eq!(a.lambda_minus, b.lambda_minus, epsilon = 1e-12);
                let (a, b) = (modi.row(n), ext2.row(n));
                assert_abs_diff_eq!(a.lambda_plus, b.lambda_plus, epsilon = 1e-12);
                assert_abs_diff_eq!(a.lambda_minus, b.lambda_minus, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn lossy_noon_qfi() {
        for n in 1..=8 {
            for t in [1.0, 0.9, 0.85] {
                let loss = LossSpec::new(t).unwrap();
                let m = lossy_noon_mixture(StateFamily::Noon(n as f64), 0.0, loss, 0).unwrap();
                let expected = t.powi(n) * (n * n) as f64;
                assert_abs_diff_eq!(crate::qfi::qfi_noon_mixture(&m), expected, epsilon = 1e-12);
                assert_abs_diff_eq!(lossy_qfi(StateFamily::Noon(n as f64), 0.0, loss).unwrap(), expected, epsilon = 1e-12);
            }
        }
        assert!(lossy_noon_mixture(StateFamily::Noon(2.5), 0.0, LossSpec::lossless(), 0).is_err());
    }

    #[test]
    fn truncated_mixture_is_rejected() {
        assert!(matches!(
            lossy_noon_mixture(StateFamily::Ecs, 2.0, LossSpec::new(0.9).unwrap(), 5),
            Err(Error::TailTooHeavy { .. })
        ));
    }

    #[test]
    fn series_cap() {
        // A series that never decreases trips the cap.
        assert!(matches!(series(|_| 1.0), Err(Error::SeriesCapExceeded { .. })));
    }
}
