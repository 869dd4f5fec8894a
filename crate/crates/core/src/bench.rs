//! Figure sweeps, equal-energy comparisons and the consistency verifier.
//!
//! Every curve is evaluated along two independent paths: the scalar closed
//! forms in [`crate::closed_form`] and a truncated-Fock pipeline built from
//! [`crate::fock`], [`crate::channels`] and [`crate::qfi`].

use std::f64::consts::SQRT_2;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{self, LossSpec, NoonMixture, SpectralState};
use crate::closed_form::{self as cf, StateFamily};
use crate::error::{Error, Result};
use crate::fock::{self, CatSpec, FockVector, Mode, TwoModeState};
use crate::qfi::{self, Generator, PureConfig};
use crate::Complex64;

/// Relative agreement required between the two evaluation paths.
pub const PATH_TOL: f64 = 1e-8;
/// Resolution of [`find_crossover`] in mean photon number.
pub const CROSSOVER_TOL: f64 = 1e-4;

pub const CSV_HEADER: &str =
    "figure,family,alpha,beta,n_components,transmission,n_av,qfi,delta_phi,path";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig1,
    Fig2a,
    Fig2b,
    Fig4,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig1, Figure::Fig2a, Figure::Fig2b, Figure::Fig4];

    pub fn as_str(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2a => "fig2a",
            Figure::Fig2b => "fig2b",
            Figure::Fig4 => "fig4",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown figure {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalPath {
    ClosedForm,
    Numeric,
}

impl EvalPath {
    pub fn as_str(self) -> &'static str {
        match self {
            EvalPath::ClosedForm => "closed_form",
            EvalPath::Numeric => "numeric",
        }
    }
}

/// Input-state families. Amplitude `alpha` is supplied at evaluation time;
/// for [`Family::Noon`] the photon number is `n = alpha^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `|alpha>|0>` through the beam splitter.
    Coherent,
    /// Four-headed cat `|C_4(alpha/sqrt 2)>` mixed with `|beta/sqrt 2>`, `beta = ratio * alpha`.
    Cat4 { beta_ratio: f64 },
    Ecs,
    Noon,
    Modified,
    Extended(usize),
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::Coherent => "coherent",
            Family::Cat4 { .. } => "cat4",
            Family::Ecs => "ecs",
            Family::Noon => "noon",
            Family::Modified => "modified",
            Family::Extended(_) => "extended",
        }
    }

    pub fn n_components(&self) -> Option<usize> {
        match self {
            Family::Coherent | Family::Ecs => Some(1),
            Family::Cat4 { .. } => Some(4),
            Family::Noon => None,
            Family::Modified => Some(2),
            Family::Extended(n) => Some(*n),
        }
    }

    pub fn beta(&self, alpha: f64) -> Option<f64> {
        match self {
            Family::Cat4 { beta_ratio } => Some(beta_ratio * alpha),
            _ => None,
        }
    }

    fn state_family(&self, alpha: f64) -> Result<StateFamily> {
        match self {
            Family::Ecs => Ok(StateFamily::Ecs),
            Family::Noon => Ok(StateFamily::Noon(alpha * alpha)),
            Family::Modified => Ok(StateFamily::Modified),
            Family::Extended(n) => Ok(StateFamily::Extended(*n)),
            other => Err(Error::Unsupported(format!(
                "{} has no mixed-state form",
                other.label()
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    Pure,
    PhaseAveraged,
    Lossy(LossSpec),
}

impl Setting {
    pub fn transmission(&self) -> f64 {
        match self {
            Setting::Lossy(l) => l.transmission(),
            _ => 1.0,
        }
    }
}

/// One family in one setting, as a function of `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub family: Family,
    pub setting: Setting,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub n_av: f64,
    pub qfi: f64,
}

impl Point {
    pub fn delta_phi(&self) -> f64 {
        qfi::delta_phi(self.qfi)
    }
}

impl Curve {
    pub fn new(family: Family, setting: Setting) -> Self {
        Self { family, setting }
    }

    pub fn evaluate(&self, alpha: f64, path: EvalPath) -> Result<Point> {
        match path {
            EvalPath::ClosedForm => Analytic.point(self, alpha),
            EvalPath::Numeric => numeric_point(self, alpha),
        }
    }

    /// Whether the numeric path can represent this curve at `alpha`.
    pub fn has_numeric(&self, alpha: f64) -> bool {
        match self.family {
            Family::Noon => noon_number(alpha).is_some(),
            _ => true,
        }
    }

    /// Label written to output; continued noon curves are flagged.
    pub fn row_label(&self, alpha: f64) -> &'static str {
        match self.family {
            Family::Noon if noon_number(alpha).is_none() => "noon_cont",
            f => f.label(),
        }
    }

    pub fn matches(&self, row: &SweepRow) -> bool {
        let label_ok = match self.family {
            Family::Noon => row.family == "noon" || row.family == "noon_cont",
            f => row.family == f.label(),
        };
        let beta_ok = match self.family {
            Family::Cat4 { beta_ratio } => row
                .beta
                .is_some_and(|b| (b - beta_ratio * row.alpha).abs() <= 1e-12 * row.alpha.max(1.0)),
            _ => true,
        };
        label_ok
            && beta_ok
            && row.n_components == self.family.n_components()
            && (row.transmission - self.setting.transmission()).abs() < 1e-12
    }
}

fn noon_number(alpha: f64) -> Option<usize> {
    let n = alpha * alpha;
    let r = n.round();
    ((n - r).abs() <= 1e-9 && r >= 0.0).then_some(r as usize)
}

/// Source of closed-form values. The verifier takes this as a parameter so a
/// deliberately broken model can be checked against the numeric path.
pub trait ClosedFormModel: Sync {
    fn point(&self, curve: &Curve, alpha: f64) -> Result<Point>;

    fn lossy_mixture(
        &self,
        family: StateFamily,
        alpha: f64,
        loss: LossSpec,
        n_cut: usize,
    ) -> Result<NoonMixture> {
        cf::lossy_noon_mixture(family, alpha, loss, n_cut)
    }
}

/// The closed forms of [`crate::closed_form`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Analytic;

impl ClosedFormModel for Analytic {
    fn point(&self, curve: &Curve, alpha: f64) -> Result<Point> {
        let x = alpha * alpha;
        let moments = |m: cf::MomentPair| Point {
            n_av: m.n_av,
            qfi: m.qfi_one_mode(),
        };
        match (curve.family, curve.setting) {
            (Family::Coherent, Setting::Pure) => Ok(Point {
                n_av: x / 2.0,
                qfi: 2.0 * x,
            }),
            (Family::Cat4 { beta_ratio }, Setting::Pure) => {
                Ok(moments(cf::fig1_moments(alpha, beta_ratio * alpha)))
            }
            (Family::Ecs, Setting::Pure) => {
                let e = cf::ecs_qfi(alpha);
                Ok(Point {
                    n_av: e.n_av,
                    qfi: e.qfi,
                })
            }
            (Family::Noon, Setting::Pure) => Ok(Point {
                n_av: x / 2.0,
                qfi: x * x,
            }),
            (Family::Modified, Setting::Pure) => Ok(moments(cf::modified_moments(alpha))),
            (Family::Extended(n), Setting::Pure) => Ok(moments(cf::extended_moments(n, alpha)?)),
            (family, Setting::PhaseAveraged) => {
                let sf = family.state_family(alpha)?;
                Ok(Point {
                    n_av: cf::family_n_av(sf, alpha)?,
                    qfi: cf::pa_qfi(sf, alpha)?,
                })
            }
            (family, Setting::Lossy(loss)) => {
                let sf = family.state_family(alpha)?;
                let qfi = match sf {
                    StateFamily::Noon(n) => loss.transmission().powf(n) * n * n,
                    _ => {
                        let m = self.lossy_mixture(sf, alpha, loss, cf::default_mixture_cutoff(alpha))?;
                        qfi::qfi_noon_mixture(&m)
                    }
                };
                Ok(Point {
                    n_av: cf::family_n_av(sf, alpha)?,
                    qfi,
                })
            }
        }
    }
}

/// Builds the pure input state of a family on a truncated Fock grid.
pub fn build_state(family: Family, alpha: f64) -> Result<TwoModeState> {
    let c = |v: f64| Complex64::new(v, 0.0);
    match family {
        Family::Coherent => {
            let n_max = fock::default_cutoff(alpha);
            let a = fock::coherent(c(alpha), n_max)?;
            fock::beam_splitter_5050(&a, &FockVector::vacuum(n_max))
        }
        Family::Cat4 { beta_ratio } => {
            let beta = beta_ratio * alpha;
            let n_max = fock::default_cutoff(alpha + beta);
            let cat = fock::cat_state(CatSpec::real(4, alpha / SQRT_2)?, n_max)?;
            let coh = fock::coherent(c(beta / SQRT_2), n_max)?;
            fock::beam_splitter_5050(&cat, &coh)
        }
        Family::Ecs => {
            let n_max = fock::default_cutoff(alpha);
            let cat = fock::cat_state(CatSpec::real(2, alpha / SQRT_2)?, n_max)?;
            let coh = fock::coherent(c(alpha / SQRT_2), n_max)?;
            fock::beam_splitter_5050(&cat, &coh)
        }
        Family::Noon => {
            let n = noon_number(alpha).ok_or_else(|| {
                Error::Unsupported(format!("noon photon number {} is not an integer", alpha * alpha))
            })?;
            TwoModeState::noon(n, n.max(1))
        }
        Family::Modified => symmetric_cat(2, alpha),
        Family::Extended(n) => symmetric_cat(n, alpha),
    }
}

fn symmetric_cat(n: usize, alpha: f64) -> Result<TwoModeState> {
    let cat = fock::cat_state(CatSpec::real(n, alpha)?, fock::default_cutoff(alpha))?;
    TwoModeState::path_symmetric(&cat)
}

/// Input for the mixed-state settings. The beam-splitter construction leaves
/// rounding noise on every grid point, so the ECS uses its axis form here.
fn mixed_input(family: Family, alpha: f64) -> Result<TwoModeState> {
    match family {
        Family::Ecs => symmetric_cat(1, alpha),
        Family::Coherent | Family::Cat4 { .. } => Err(Error::Unsupported(format!(
            "{} has no mixed-state form",
            family.label()
        ))),
        f => build_state(f, alpha),
    }
}

fn numeric_point(curve: &Curve, alpha: f64) -> Result<Point> {
    match curve.setting {
        Setting::Pure => {
            let s = build_state(curve.family, alpha)?;
            Ok(Point {
                n_av: s.number_moment(Mode::B, 1),
                qfi: qfi::qfi_pure(&s, PureConfig::OneModeB),
            })
        }
        Setting::PhaseAveraged => {
            let s = mixed_input(curve.family, alpha)?;
            let rho = channels::phase_average(&SpectralState::from(&s))?;
            Ok(Point {
                n_av: rho.number_moment(Mode::B, 1),
                qfi: qfi::qfi_mixed(&rho, Generator::NumberB)?,
            })
        }
        Setting::Lossy(loss) => {
            let s = mixed_input(curve.family, alpha)?;
            let rho = channels::phase_average(&SpectralState::from(&s))?;
            let n_av = rho.number_moment(Mode::B, 1);
            let out = channels::loss_channel(&rho, loss)?;
            Ok(Point {
                n_av,
                qfi: qfi::qfi_mixed(&out, Generator::NumberB)?,
            })
        }
    }
}

/// One output record of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub figure: Figure,
    pub family: String,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub n_components: Option<usize>,
    pub transmission: f64,
    pub n_av: f64,
    pub qfi: f64,
    pub delta_phi: f64,
    pub path: EvalPath,
}

impl SweepRow {
    pub fn new(figure: Figure, curve: &Curve, alpha: f64, path: EvalPath, p: Point) -> Self {
        Self {
            figure,
            family: curve.row_label(alpha).to_string(),
            alpha,
            beta: curve.family.beta(alpha),
            n_components: curve.family.n_components(),
            transmission: curve.setting.transmission(),
            n_av: p.n_av,
            qfi: p.qfi,
            delta_phi: p.delta_phi(),
            path,
        }
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        [
            self.figure.to_string(),
            self.family.clone(),
            fmt_sig(self.alpha),
            opt(self.beta.map(fmt_sig)),
            opt(self.n_components.map(|n| n.to_string())),
            fmt_sig(self.transmission),
            fmt_sig(self.n_av),
            fmt_sig(self.qfi),
            fmt_sig(self.delta_phi),
            self.path.as_str().to_string(),
        ]
        .join(",")
    }
}

/// Twelve significant digits, `%g` style, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut w: W) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{}", r.to_csv())?;
    }
    Ok(())
}

pub fn write_json<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, rows)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub figure: Figure,
    pub alpha_grid: Vec<f64>,
    /// `beta / alpha` values for the four-headed cat curves.
    pub beta_ratios: Vec<f64>,
    pub n_components: Vec<usize>,
    pub transmissions: Vec<f64>,
}

/// `start, start + step, ...` up to `stop`, rounded to 1e-12.
pub fn alpha_range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=count)
        .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
        .collect()
}

impl SweepConfig {
    pub fn default_for(figure: Figure) -> Self {
        match figure {
            Figure::Fig1 => Self {
                figure,
                alpha_grid: alpha_range(0.05, 2.2, 0.05),
                beta_ratios: vec![1.0, 0.5, 0.25, 0.0],
                n_components: vec![],
                transmissions: vec![],
            },
            Figure::Fig2a | Figure::Fig2b => Self {
                figure,
                alpha_grid: alpha_range(0.1, 3.0, 0.05),
                beta_ratios: vec![],
                n_components: vec![4, 8, 16],
                transmissions: vec![],
            },
            Figure::Fig4 => Self {
                figure,
                alpha_grid: alpha_range(0.1, 3.0, 0.05),
                beta_ratios: vec![],
                n_components: vec![4, 8],
                transmissions: vec![0.9, 0.85],
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha_grid.is_empty() {
            return Err(Error::InvalidParameter("empty alpha grid".into()));
        }
        if self.alpha_grid.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidParameter("alpha must be finite and nonnegative".into()));
        }
        if self.alpha_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("alpha grid must be strictly increasing".into()));
        }
        match self.figure {
            Figure::Fig1 if self.beta_ratios.is_empty() => {
                Err(Error::InvalidParameter("fig1 needs at least one beta ratio".into()))
            }
            Figure::Fig4 if self.transmissions.is_empty() => {
                Err(Error::InvalidParameter("fig4 needs at least one transmission".into()))
            }
            Figure::Fig4 => self.transmissions.iter().try_for_each(|t| LossSpec::new(*t).map(|_| ())),
            _ => Ok(()),
        }
    }

    /// Curves of the figure in output order.
    pub fn curves(&self) -> Vec<Curve> {
        let mut families = Vec::new();
        match self.figure {
            Figure::Fig1 => {
                families.extend(self.beta_ratios.iter().map(|&r| Family::Cat4 { beta_ratio: r }));
                families.extend([Family::Ecs, Family::Coherent]);
            }
            _ => {
                families.extend([Family::Noon, Family::Ecs, Family::Modified]);
                families.extend(self.n_components.iter().map(|&n| Family::Extended(n)));
            }
        }
        let settings: Vec<Setting> = match self.figure {
            Figure::Fig1 | Figure::Fig2a => vec![Setting::Pure],
            Figure::Fig2b => vec![Setting::PhaseAveraged],
            Figure::Fig4 => self
                .transmissions
                .iter()
                .filter_map(|&t| LossSpec::new(t).ok().map(Setting::Lossy))
                .collect(),
        };
        settings
            .iter()
            .flat_map(|&s| families.iter().map(move |&f| Curve::new(f, s)))
            .collect()
    }
}

/// A sweep point that failed to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub figure: Figure,
    pub family: String,
    pub alpha: f64,
    pub path: EvalPath,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Evaluates every curve of the figure on the grid along both paths. Rows
/// come back ordered by curve, then `alpha`, then path.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let mut work = Vec::new();
    for curve in cfg.curves() {
        for &alpha in &cfg.alpha_grid {
            work.push((curve, alpha, EvalPath::ClosedForm));
            if curve.has_numeric(alpha) {
                work.push((curve, alpha, EvalPath::Numeric));
            }
        }
    }
    let results: Vec<_> = work
        .par_iter()
        .map(|(curve, alpha, path)| curve.evaluate(*alpha, *path))
        .collect();
    let mut out = SweepOutput::default();
    for ((curve, alpha, path), r) in work.into_iter().zip(results) {
        match r {
            Ok(p) => out.rows.push(SweepRow::new(cfg.figure, &curve, alpha, path, p)),
            Err(e) => {
                log::debug!("{} {} alpha={alpha}: {e}", cfg.figure, curve.family.label());
                out.diagnostics.push(Diagnostic {
                    figure: cfg.figure,
                    family: curve.row_label(alpha).to_string(),
                    alpha,
                    path,
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(out)
}

/// `delta_phi` of `curve` at mean photon number `n_av`, found by bisecting
/// `alpha` between the bracketing sampled rows and evaluating the closed form
/// there.
pub fn interpolate_at_nav(rows: &[SweepRow], curve: &Curve, n_av: f64) -> Result<f64> {
    let mut samples: Vec<&SweepRow> = rows
        .iter()
        .filter(|r| r.path == EvalPath::ClosedForm && curve.matches(r))
        .collect();
    samples.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    if samples.is_empty() {
        return Err(Error::OutOfRange {
            n_av,
            lo: f64::NAN,
            hi: f64::NAN,
        });
    }
    if let Some(w) = samples.windows(2).find(|w| w[1].n_av <= w[0].n_av) {
        return Err(Error::NonMonotone(format!(
            "{} n_av not increasing between alpha={} and alpha={}",
            curve.family.label(),
            w[0].alpha,
            w[1].alpha
        )));
    }
    let (lo, hi) = (samples[0].n_av, samples[samples.len() - 1].n_av);
    if !(lo..=hi).contains(&n_av) {
        return Err(Error::OutOfRange { n_av, lo, hi });
    }
    if let Some(r) = samples.iter().find(|r| r.n_av == n_av) {
        return Ok(r.delta_phi);
    }
    let k = samples.partition_point(|r| r.n_av < n_av);
    let (mut a_lo, mut a_hi) = (samples[k - 1].alpha, samples[k].alpha);
    let nav_at = |a: f64| curve.evaluate(a, EvalPath::ClosedForm).map(|p| p.n_av);
    for _ in 0..200 {
        let mid = 0.5 * (a_lo + a_hi);
        if mid <= a_lo || mid >= a_hi {
            break;
        }
        if nav_at(mid)? < n_av {
            a_lo = mid;
        } else {
            a_hi = mid;
        }
    }
    let alpha = 0.5 * (a_lo + a_hi);
    Ok(curve.evaluate(alpha, EvalPath::ClosedForm)?.delta_phi())
}

/// Root of `delta_phi_a - delta_phi_b` in `n_av` within `bracket`.
pub fn find_crossover(rows: &[SweepRow], a: &Curve, b: &Curve, bracket: (f64, f64)) -> Result<f64> {
    let diff = |n: f64| -> Result<f64> {
        Ok(interpolate_at_nav(rows, a, n)? - interpolate_at_nav(rows, b, n)?)
    };
    let (mut lo, mut hi) = bracket;
    let (d_lo, d_hi) = (diff(lo)?, diff(hi)?);
    if d_lo * d_hi >= 0.0 {
        return Err(Error::NoSignChange);
    }
    let sign_lo = d_lo.signum();
    while hi - lo > CROSSOVER_TOL * 1e-2 {
        let mid = 0.5 * (lo + hi);
        if diff(mid)?.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Parameter grid of the consistency verifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyGrid {
    pub alphas: Vec<f64>,
    pub beta_ratios: Vec<f64>,
    pub n_components: Vec<usize>,
    pub transmissions: Vec<f64>,
    pub noon_numbers: Vec<usize>,
    /// Amplitudes for the phase-reference identity.
    pub identity_alphas: Vec<f64>,
    /// Amplitudes for the element-wise lossy spectrum comparison.
    pub spectrum_alphas: Vec<f64>,
}

impl Default for VerifyGrid {
    fn default() -> Self {
        Self {
            alphas: vec![0.25, 0.5, 1.0, 1.5, 2.0, 3.0],
            beta_ratios: vec![0.0, 0.25, 0.5, 1.0],
            n_components: vec![1, 2, 4, 8, 16],
            transmissions: vec![1.0, 0.9, 0.85],
            noon_numbers: (1..=8).collect(),
            identity_alphas: vec![0.5, 1.5],
            spectrum_alphas: vec![0.5, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub params: String,
    pub expected: f64,
    pub actual: f64,
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub message: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn count(&self, prefix: &str) -> usize {
        self.checks.iter().filter(|c| c.name.starts_with(prefix)).count()
    }
}

/// Relative comparison `|a - b| / max(|b|, floor)`.
fn compare(name: String, params: String, expected: f64, actual: f64, tol: f64, floor: f64) -> Check {
    let error = (actual - expected).abs() / expected.abs().max(floor);
    Check {
        name,
        params,
        expected,
        actual,
        error,
        tolerance: tol,
        passed: error <= tol,
        message: None,
    }
}

fn failed(name: String, params: String, e: Error) -> Check {
    Check {
        name,
        params,
        expected: f64::NAN,
        actual: f64::NAN,
        error: f64::INFINITY,
        tolerance: 0.0,
        passed: false,
        message: Some(e.to_string()),
    }
}

fn setting_name(s: &Setting) -> String {
    match s {
        Setting::Pure => "pure".into(),
        Setting::PhaseAveraged => "phase-averaged".into(),
        Setting::Lossy(l) => format!("lossy T={}", l.transmission()),
    }
}

fn describe(curve: &Curve, alpha: f64) -> String {
    let mut p = format!("family={} alpha={alpha}", curve.family.label());
    if let Some(b) = curve.family.beta(alpha) {
        p += &format!(" beta={b}");
    }
    if let Family::Extended(n) = curve.family {
        p += &format!(" N={n}");
    }
    if let Setting::Lossy(l) = curve.setting {
        p += &format!(" T={}", l.transmission());
    }
    p
}

/// Curves and amplitudes of the closed-form versus numeric comparison.
pub fn verification_points(grid: &VerifyGrid) -> Vec<(Curve, f64)> {
    let mut pts = Vec::new();
    let mut settings = vec![Setting::Pure, Setting::PhaseAveraged];
    settings.extend(
        grid.transmissions
            .iter()
            .filter_map(|&t| LossSpec::new(t).ok().map(Setting::Lossy)),
    );
    for &alpha in &grid.alphas {
        pts.push((Curve::new(Family::Coherent, Setting::Pure), alpha));
        for &r in &grid.beta_ratios {
            pts.push((Curve::new(Family::Cat4 { beta_ratio: r }, Setting::Pure), alpha));
        }
        let mut families = vec![Family::Ecs, Family::Modified];
        families.extend(grid.n_components.iter().map(|&n| Family::Extended(n)));
        for f in families {
            for s in &settings {
                pts.push((Curve::new(f, *s), alpha));
            }
        }
    }
    for &n in &grid.noon_numbers {
        for s in &settings {
            pts.push((Curve::new(Family::Noon, *s), (n as f64).sqrt()));
        }
    }
    pts
}

/// Cross-checks a closed-form model against the numeric pipeline.
pub fn verify_consistency(grid: &VerifyGrid, model: &dyn ClosedFormModel) -> Report {
    let mut checks: Vec<Check> = verification_points(grid)
        .par_iter()
        .flat_map_iter(|(curve, alpha)| {
            let name = format!("{} {} QFI", setting_name(&curve.setting), curve.family.label());
            let params = describe(curve, *alpha);
            let cf = model.point(curve, *alpha);
            let num = numeric_point(curve, *alpha);
            match (cf, num) {
                (Ok(c), Ok(n)) => vec![
                    compare(format!("qfi: {name}"), params.clone(), n.qfi, c.qfi, PATH_TOL, 1e-6),
                    compare(format!("n_av: {name}"), params, n.n_av, c.n_av, PATH_TOL, 1e-6),
                ],
                (Err(e), _) | (_, Err(e)) => vec![failed(format!("qfi: {name}"), params, e)],
            }
        })
        .collect();

    // Unit transmission reproduces the lossless phase-averaged value.
    let mut families = vec![Family::Ecs, Family::Modified];
    families.extend(grid.n_components.iter().map(|&n| Family::Extended(n)));
    for &alpha in &grid.alphas {
        for f in &families {
            let lossy = Curve::new(*f, Setting::Lossy(LossSpec::lossless()));
            let pa = Curve::new(*f, Setting::PhaseAveraged);
            let params = describe(&pa, alpha);
            let name = format!("unit transmission: {}", f.label());
            match (model.point(&lossy, alpha), model.point(&pa, alpha)) {
                (Ok(a), Ok(b)) => checks.push(compare(name, params, b.qfi, a.qfi, 1e-10, 1e-6)),
                (Err(e), _) | (_, Err(e)) => checks.push(failed(name, params, e)),
            }
        }
    }

    // Phase-averaged QFI with an external reference equals the two-mode
    // symmetric QFI of the pure state.
    for &alpha in &grid.identity_alphas {
        for f in [Family::Ecs, Family::Modified, Family::Extended(4)] {
            let curve = Curve::new(f, Setting::PhaseAveraged);
            let params = describe(&curve, alpha);
            let name = format!("phase-reference identity: {}", f.label());
            let two_mode = mixed_input(f, alpha).map(|s| qfi::qfi_pure(&s, PureConfig::TwoModeHalf));
            match (model.point(&curve, alpha), two_mode) {
                (Ok(p), Ok(f2)) => checks.push(compare(name, params, f2, p.qfi, 1e-8, 1e-6)),
                (Err(e), _) | (_, Err(e)) => checks.push(failed(name, params, e)),
            }
        }
    }

    for &alpha in &grid.spectrum_alphas {
        for &t in grid.transmissions.iter().filter(|t| **t < 1.0) {
            for f in [Family::Ecs, Family::Modified, Family::Extended(4)] {
                checks.extend(spectrum_checks(model, f, alpha, t));
            }
        }
    }
    Report { checks }
}

/// Element-wise comparison of analytic lossy spectra with the numeric
/// pipeline, plus the trace of the analytic mixture.
pub fn spectrum_checks(model: &dyn ClosedFormModel, family: Family, alpha: f64, t: f64) -> Vec<Check> {
    let curve = match LossSpec::new(t) {
        Ok(l) => Curve::new(family, Setting::Lossy(l)),
        Err(e) => return vec![failed("lossy spectrum".into(), format!("T={t}"), e)],
    };
    let params = describe(&curve, alpha);
    let name = format!("lossy spectrum: {}", family.label());
    let run = || -> Result<Vec<Check>> {
        let Setting::Lossy(loss) = curve.setting else {
            unreachable!()
        };
        let sf = family.state_family(alpha)?;
        let analytic = model.lossy_mixture(sf, alpha, loss, cf::default_mixture_cutoff(alpha))?;
        let s = mixed_input(family, alpha)?;
        let rho = channels::loss_channel(&channels::phase_average(&SpectralState::from(&s))?, loss)?;
        let numeric = channels::to_noon_mixture(&rho, 0.0)?;
        let mut worst = (0.0f64, 0usize);
        let n_rows = analytic.rows.len().max(numeric.rows.len());
        for m in 0..n_rows {
            let (a, b) = (analytic.row(m), numeric.row(m));
            let e = (a.lambda_plus - b.lambda_plus)
                .abs()
                .max((a.lambda_minus - b.lambda_minus).abs());
            if e > worst.0 {
                worst = (e, m);
            }
        }
        let mut elementwise = compare(name.clone(), params.clone(), 0.0, worst.0, 1e-8, 1.0);
        elementwise.params = format!("{params} worst row n={}", worst.1);
        let trace = compare(
            format!("{name} trace"),
            params.clone(),
            1.0,
            analytic.trace(),
            1e-10,
            1.0,
        );
        Ok(vec![elementwise, trace])
    };
    run().unwrap_or_else(|e| vec![failed(name, params, e)])
}
