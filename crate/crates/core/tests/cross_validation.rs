mod common;

use approx::assert_relative_eq;
use catmetro::bench::{
    self, spectrum_checks, verify_consistency, Analytic, ClosedFormModel, Curve, Family, Point,
    Setting, VerifyGrid,
};
use catmetro::channels::{self, LossSpec, NoonMixture, SpectralState};
use catmetro::closed_form::{self as cf, StateFamily};
use catmetro::fock::{self, CatSpec, Mode, TwoModeState};
use catmetro::qfi::{self, Generator, PureConfig};
use catmetro::{Complex64, Result};
use proptest::prelude::*;

fn extended_state(n: usize, alpha: f64) -> TwoModeState {
    let cat = fock::cat_state(CatSpec::real(n, alpha).unwrap(), fock::default_cutoff(alpha)).unwrap();
    TwoModeState::path_symmetric(&cat).unwrap()
}

#[test]
fn four_headed_cat_moments_match_grid() {
    let (alpha, beta) = (1.0f64, 1.0f64);
    let n_max = fock::default_cutoff(alpha + beta);
    let cat = fock::cat_state(CatSpec::real(4, alpha / 2f64.sqrt()).unwrap(), n_max).unwrap();
    let coh = fock::coherent(Complex64::new(beta / 2f64.sqrt(), 0.0), n_max).unwrap();
    let s = fock::beam_splitter_5050(&cat, &coh).unwrap();
    let m = cf::fig1_moments(alpha, beta);
    assert_relative_eq!(s.number_moment(Mode::B, 1), m.mean_nb, max_relative = 1e-10);
    assert_relative_eq!(s.number_moment(Mode::B, 2), m.mean_nb2, max_relative = 1e-10);
    assert_relative_eq!(qfi::qfi_pure(&s, PureConfig::OneModeB), m.qfi_one_mode(), max_relative = 1e-10);
}

#[test]
fn modified_moments_match_synthesized_state() {
    for alpha in [0.5, 1.0, 2.0] {
        let s = channels::synthesize_extended(alpha, 0).unwrap();
        let f = qfi::qfi_pure(&s.state, PureConfig::OneModeB);
        assert_relative_eq!(f, cf::modified_moments(alpha).qfi_one_mode(), max_relative = 1e-9);
    }
}

#[test]
fn extended_moments_match_grid() {
    let s = extended_state(4, 1.0);
    let m = cf::extended_moments(4, 1.0).unwrap();
    assert_relative_eq!(s.number_moment(Mode::B, 1), m.mean_nb, max_relative = 1e-9);
    assert_relative_eq!(s.number_moment(Mode::B, 2), m.mean_nb2, max_relative = 1e-9);
}

#[test]
fn phase_averaged_extended_matches_mixed_engine() {
    let rho = channels::phase_average(&SpectralState::from(extended_state(4, 1.0))).unwrap();
    let numeric = qfi::qfi_mixed(&rho, Generator::NumberB).unwrap();
    assert_relative_eq!(numeric, cf::pa_qfi(StateFamily::Extended(4), 1.0).unwrap(), max_relative = 1e-8);
    let sectors = channels::to_noon_mixture(&rho, 0.0).unwrap();
    for row in &sectors.rows {
        let w = cf::pa_weights(StateFamily::Extended(4), 1.0, row.n).unwrap();
        assert!((row.lambda_plus - w).abs() < 1e-12);
        assert!(row.lambda_minus.abs() < 1e-12);
    }
    let modified = channels::phase_average(&SpectralState::from(extended_state(2, 1.0))).unwrap();
    assert_relative_eq!(
        qfi::qfi_mixed(&modified, Generator::NumberB).unwrap(),
        1.068_893_290_777_05,
        max_relative = 1e-10
    );
}

#[test]
fn lossy_rows_match_channel_pipeline() {
    for family in [Family::Ecs, Family::Modified] {
        let checks = spectrum_checks(&Analytic, family, 1.0, 0.9);
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
    }
    let loss = LossSpec::new(0.9).unwrap();
    let rho = channels::loss_channel(
        &channels::phase_average(&SpectralState::from(extended_state(2, 1.0))).unwrap(),
        loss,
    )
    .unwrap();
    assert_relative_eq!(rho.trace(), 1.0, epsilon = 1e-12);
    assert_relative_eq!(
        qfi::qfi_mixed(&rho, Generator::NumberB).unwrap(),
        cf::lossy_qfi(StateFamily::Modified, 1.0, loss).unwrap(),
        max_relative = 1e-8
    );
}

#[test]
fn qfi_is_phase_covariant() {
    for family in [Family::Ecs, Family::Modified, Family::Extended(4)] {
        let s = bench::build_state(family, 1.0).unwrap();
        let loss = LossSpec::new(0.85).unwrap();
        let at = |phi: f64| {
            let shifted = s.phase_shift(Mode::B, phi);
            let rho = channels::loss_channel(&channels::phase_average(&SpectralState::from(&shifted)).unwrap(), loss)
                .unwrap();
            let mixture = channels::to_noon_mixture(&rho, phi).unwrap();
            (qfi::qfi_mixed(&rho, Generator::NumberB).unwrap(), qfi::qfi_noon_mixture(&mixture))
        };
        let (f0, r0) = at(0.0);
        let (f1, r1) = at(0.7);
        assert_relative_eq!(f0, f1, max_relative = 1e-8);
        assert_relative_eq!(r0, r1, max_relative = 1e-8);
        assert_relative_eq!(f0, r0, max_relative = 1e-8);
    }
}

#[test]
fn default_verification_grid_passes() {
    let report = verify_consistency(&VerifyGrid::default(), &Analytic);
    let failures: Vec<_> = report.failures().collect();
    assert!(failures.is_empty(), "{failures:#?}");
    assert!(report.count("qfi:") >= 150);
    assert_eq!(report.count("unit transmission"), 6 * 7);
}

/// The analytic model with the sign of the phase-averaged modified correction flipped.
struct SignFlipped;

impl ClosedFormModel for SignFlipped {
    fn point(&self, curve: &Curve, alpha: f64) -> Result<Point> {
        let mut p = Analytic.point(curve, alpha)?;
        if curve.family == Family::Modified && curve.setting == Setting::PhaseAveraged {
            let x = alpha * alpha;
            let e = (-x).exp();
            p.qfi = x * (1.0 + x - (x - 1.0) * (-2.0 * x).exp()) / (1.0 + e).powi(2);
        }
        Ok(p)
    }

    fn lossy_mixture(&self, family: StateFamily, alpha: f64, loss: LossSpec, n_cut: usize) -> Result<NoonMixture> {
        cf::lossy_noon_mixture(family, alpha, loss, n_cut)
    }
}

#[test]
fn corrupted_closed_form_is_reported() {
    let report = verify_consistency(&VerifyGrid::default(), &SignFlipped);
    assert!(!report.passed());
    let failures: Vec<_> = report.failures().collect();
    assert!(failures
        .iter()
        .any(|c| c.name == "qfi: phase-averaged modified QFI" && c.params == "family=modified alpha=0.5"));
    assert!(failures.iter().all(|c| c.name.contains("modified")));
}

#[test]
fn unit_transmission_matches_lossless_path() {
    for family in [Family::Ecs, Family::Modified, Family::Extended(4), Family::Extended(8)] {
        for alpha in [0.5, 1.5] {
            let lossless = Curve::new(family, Setting::PhaseAveraged).evaluate(alpha, bench::EvalPath::Numeric).unwrap();
            let lossy = Curve::new(family, Setting::Lossy(LossSpec::lossless()))
                .evaluate(alpha, bench::EvalPath::Numeric)
                .unwrap();
            assert!((lossless.qfi - lossy.qfi).abs() <= 1e-10 * lossless.qfi.max(1.0));
        }
    }
}

#[test]
fn mandel_relation_is_approximate() {
    // F/N_av = 4 (1 + Q) + 4 <n>_C (1 - p) with p = K / (2 (1 + K)).
    for n in [1usize, 2, 4, 8] {
        for alpha in [0.5, 1.0, 2.0] {
            let cmp = qfi::mandel_ratio_comparison(n, alpha).unwrap();
            let k = cf::cat_tail_k(n, alpha).unwrap();
            let cat = fock::cat_state(CatSpec::real(n, alpha).unwrap(), fock::default_cutoff(alpha)).unwrap();
            let p = k / (2.0 * (1.0 + k));
            let expected_gap = 4.0 * cat.mean_number() * (1.0 - p);
            assert!((cmp.gap - expected_gap).abs() <= 1e-8 * cmp.mandel_prediction, "{cmp:?} {expected_gap}");
            assert!(cmp.gap > 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mixtures_have_unit_trace_and_nonnegative_rows(
        alpha in 0.1f64..2.5,
        t in 0.5f64..=1.0,
        which in 0usize..4,
    ) {
        let family = [StateFamily::Ecs, StateFamily::Modified, StateFamily::Extended(4), StateFamily::Extended(8)][which];
        let m = cf::lossy_noon_mixture(family, alpha, LossSpec::new(t).unwrap(), cf::default_mixture_cutoff(alpha)).unwrap();
        prop_assert!((m.trace() - 1.0).abs() <= 1e-10);
        prop_assert!(m.rows.iter().all(|r| r.lambda_plus >= 0.0 && r.lambda_minus >= 0.0));
    }

    #[test]
    fn extended_one_tracks_ecs(alpha in 0.0f64..3.0) {
        let e = cf::extended_moments(1, alpha).unwrap();
        let ecs = cf::ecs_qfi(alpha);
        prop_assert!((e.n_av - ecs.n_av).abs() <= 1e-10 * ecs.n_av.max(1.0));
        prop_assert!((e.qfi_one_mode() - ecs.qfi).abs() <= 1e-10 * ecs.qfi.max(1.0));
    }

    #[test]
    fn random_states_keep_channel_properties(seed in any::<u64>()) {
        let s = &common::random_states(1, 3, seed)[0];
        let pa = channels::phase_average(s).unwrap();
        prop_assert!((pa.trace() - 1.0).abs() <= 1e-10);
        prop_assert!(common::max_abs_diff(&pa, &channels::phase_average(&pa).unwrap()) <= 1e-12);
        let lossy = channels::loss_channel(s, LossSpec::new(0.7).unwrap()).unwrap();
        prop_assert!((lossy.trace() - 1.0).abs() <= 1e-10);
        prop_assert!(lossy.terms().iter().all(|t| t.weight >= -1e-14));
    }
}
