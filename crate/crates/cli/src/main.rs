use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use catmetro::bench::{
    self, alpha_range, Analytic, Curve, EvalPath, Family, Figure, Setting, SweepConfig,
    VerifyGrid,
};
use catmetro::channels::{self, LossSpec, SpectralState};
use catmetro::fock::{self, CatSpec, Mode, TwoModeState};
use catmetro::qfi::{self, Generator, PureConfig};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "catmetro", version, about = "Phase-estimation QFI for cat-state resources")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a two-mode input state and print its moments.
    State {
        #[command(flatten)]
        family: FamilyArgs,
        /// Also list the nonzero amplitudes.
        #[arg(long)]
        amplitudes: bool,
    },
    /// Evaluate the QFI at a single point.
    Qfi {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        transmission: Option<f64>,
        #[arg(long, value_enum, default_value_t = GeneratorArg::NumberB)]
        generator: GeneratorArg,
        #[arg(long)]
        phase_averaged: bool,
    },
    /// Sweep the curves of one figure and write CSV or JSON.
    Sweep {
        #[arg(long, value_enum)]
        figure: FigureArg,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Override the default amplitude grid: start,stop,step.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(f64, f64, f64)>,
    },
    /// Locate where two curves of a figure cross at equal mean photon number.
    Crossover {
        #[arg(long, value_enum, default_value_t = FigureArg::Fig1)]
        figure: FigureArg,
        /// First curve, e.g. `cat4:0.25`, `ecs`, `noon`, `modified`, `extended:4`.
        #[arg(long, default_value = "cat4:0.25", value_parser = parse_family)]
        a: Family,
        #[arg(long, default_value = "ecs", value_parser = parse_family)]
        b: Family,
        #[arg(long, default_value_t = 0.1)]
        lo: f64,
        #[arg(long, default_value_t = 1.2)]
        hi: f64,
        /// Loss for fig4 curves.
        #[arg(long, default_value_t = 0.9)]
        transmission: f64,
    },
    /// Run the heralded generation scheme and compare with the cat-built target.
    Synthesize {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        iterations: u32,
    },
    /// Cross-check every closed form against the truncated-Fock pipeline.
    Verify {
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(clap::Args, Debug)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: FamilyKind,
    #[arg(long)]
    alpha: f64,
    /// Coherent amplitude mixed with the four-headed cat.
    #[arg(long)]
    beta: Option<f64>,
    /// Number of cat components of the extended family.
    #[arg(long)]
    n_components: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FamilyKind {
    Coherent,
    Cat4,
    Ecs,
    Noon,
    Modified,
    Extended,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum GeneratorArg {
    NumberB,
    HalfDifference,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FigureArg {
    Fig1,
    Fig2a,
    Fig2b,
    Fig4,
}

impl From<FigureArg> for Figure {
    fn from(f: FigureArg) -> Self {
        match f {
            FigureArg::Fig1 => Figure::Fig1,
            FigureArg::Fig2a => Figure::Fig2a,
            FigureArg::Fig2b => Figure::Fig2b,
            FigureArg::Fig4 => Figure::Fig4,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Format {
    Csv,
    Json,
}

fn parse_grid(s: &str) -> Result<(f64, f64, f64), String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [start, stop, step] if step > 0.0 && stop >= start && start >= 0.0 => Ok((start, stop, step)),
        _ => Err("expected start,stop,step with 0 <= start <= stop and step > 0".into()),
    }
}

fn parse_family(s: &str) -> Result<Family, String> {
    let (name, arg) = s.split_once(':').map_or((s, None), |(a, b)| (a, Some(b)));
    let num = |a: Option<&str>| -> Result<f64, String> {
        a.ok_or(format!("{name} needs a parameter"))?
            .parse::<f64>()
            .map_err(|e| e.to_string())
    };
    match name {
        "coherent" => Ok(Family::Coherent),
        "ecs" => Ok(Family::Ecs),
        "noon" => Ok(Family::Noon),
        "modified" => Ok(Family::Modified),
        "cat4" => Ok(Family::Cat4 { beta_ratio: num(arg)? }),
        "extended" => {
            let n = num(arg)?;
            if n < 1.0 || n.fract() != 0.0 {
                return Err("extended needs a positive integer N".into());
            }
            Ok(Family::Extended(n as usize))
        }
        _ => Err(format!("unknown family {name:?}")),
    }
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<catmetro::Error> for Failure {
    fn from(e: catmetro::Error) -> Self {
        let code = match e {
            catmetro::Error::InvalidParameter(_) | catmetro::Error::Unsupported(_) => EXIT_USAGE,
            _ => EXIT_NUMERIC,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_NUMERIC,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn family_of(args: &FamilyArgs) -> Result<Family, Failure> {
    if !(args.alpha.is_finite() && args.alpha >= 0.0) {
        return Err(usage("--alpha must be finite and nonnegative"));
    }
    Ok(match args.family {
        FamilyKind::Coherent => Family::Coherent,
        FamilyKind::Cat4 => {
            let beta = args.beta.ok_or_else(|| usage("cat4 needs --beta"))?;
            if args.alpha == 0.0 {
                return Err(usage("cat4 needs --alpha > 0 to express beta as a ratio"));
            }
            Family::Cat4 {
                beta_ratio: beta / args.alpha,
            }
        }
        FamilyKind::Ecs => Family::Ecs,
        FamilyKind::Noon => Family::Noon,
        FamilyKind::Modified => Family::Modified,
        FamilyKind::Extended => {
            let n = args.n_components.ok_or_else(|| usage("extended needs --n-components"))?;
            if n == 0 {
                return Err(usage("--n-components must be positive"));
            }
            Family::Extended(n)
        }
    })
}

fn print_json(v: &Value) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_state(args: &FamilyArgs, amplitudes: bool) -> Result<(), Failure> {
    let family = family_of(args)?;
    let s = bench::build_state(family, args.alpha)?;
    let mut v = json!({
        "family": family.label(),
        "alpha": args.alpha,
        "n_max": s.n_max(),
        "norm_sqr": s.norm_sqr(),
        "mean_na": s.number_moment(Mode::A, 1),
        "mean_nb": s.number_moment(Mode::B, 1),
        "mean_nb2": s.number_moment(Mode::B, 2),
    });
    if amplitudes {
        v["amplitudes"] = s
            .iter_nonzero()
            .filter(|(_, a)| a.norm_sqr() > 1e-30)
            .map(|((na, nb), a)| json!({"na": na, "nb": nb, "re": a.re, "im": a.im}))
            .collect();
    }
    print_json(&v)
}

fn cmd_qfi(args: &FamilyArgs, transmission: Option<f64>, generator: GeneratorArg, phase_averaged: bool) -> Result<(), Failure> {
    let family = family_of(args)?;
    let setting = match (transmission, phase_averaged) {
        (Some(t), _) => Setting::Lossy(LossSpec::new(t)?),
        (None, true) => Setting::PhaseAveraged,
        (None, false) => Setting::Pure,
    };
    let curve = Curve::new(family, setting);
    let mut v = json!({
        "family": family.label(),
        "alpha": args.alpha,
        "beta": family.beta(args.alpha),
        "n_components": family.n_components(),
        "transmission": setting.transmission(),
    });
    match generator {
        GeneratorArg::NumberB => {
            for path in [EvalPath::ClosedForm, EvalPath::Numeric] {
                if path == EvalPath::Numeric && !curve.has_numeric(args.alpha) {
                    continue;
                }
                let p = curve.evaluate(args.alpha, path)?;
                v[path.as_str()] = json!({"n_av": p.n_av, "qfi": p.qfi, "delta_phi": p.delta_phi()});
            }
        }
        GeneratorArg::HalfDifference => {
            // Symmetric two-mode generator; numeric path only.
            let s = bench::build_state(family, args.alpha)?;
            let f = match setting {
                Setting::Pure => qfi::qfi_pure(&s, PureConfig::TwoModeHalf),
                Setting::PhaseAveraged => {
                    qfi::qfi_mixed(&channels::phase_average(&SpectralState::from(&s))?, Generator::HalfDifference)?
                }
                Setting::Lossy(loss) => {
                    let rho = channels::phase_average(&SpectralState::from(&s))?;
                    qfi::qfi_mixed(&channels::loss_channel(&rho, loss)?, Generator::HalfDifference)?
                }
            };
            v["numeric"] = json!({
                "n_av": s.number_moment(Mode::B, 1),
                "qfi": f,
                "delta_phi": qfi::delta_phi(f),
            });
        }
    }
    print_json(&v)
}

fn cmd_sweep(figure: Figure, out: Option<PathBuf>, format: Format, grid: Option<(f64, f64, f64)>) -> Result<(), Failure> {
    let mut cfg = SweepConfig::default_for(figure);
    if let Some((start, stop, step)) = grid {
        cfg.alpha_grid = alpha_range(start, stop, step);
    }
    let result = bench::run_sweep(&cfg)?;
    for d in &result.diagnostics {
        eprintln!("skipped {} {} alpha={} ({}): {}", d.figure, d.family, d.alpha, d.path.as_str(), d.message);
    }
    let sink: Box<dyn Write> = match &out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match format {
        Format::Csv => bench::write_csv(&result.rows, sink)?,
        Format::Json => bench::write_json(&result.rows, sink)?,
    }
    if let Some(p) = out {
        eprintln!("wrote {} rows to {}", result.rows.len(), p.display());
    }
    Ok(())
}

fn cmd_crossover(figure: Figure, a: Family, b: Family, bracket: (f64, f64), transmission: f64) -> Result<(), Failure> {
    let setting = match figure {
        Figure::Fig1 | Figure::Fig2a => Setting::Pure,
        Figure::Fig2b => Setting::PhaseAveraged,
        Figure::Fig4 => Setting::Lossy(LossSpec::new(transmission)?),
    };
    let mut cfg = SweepConfig::default_for(figure);
    match figure {
        Figure::Fig1 => {
            cfg.beta_ratios = [a, b]
                .iter()
                .filter_map(|f| match f {
                    Family::Cat4 { beta_ratio } => Some(*beta_ratio),
                    _ => None,
                })
                .collect();
            if cfg.beta_ratios.is_empty() {
                cfg.beta_ratios.push(0.25);
            }
        }
        Figure::Fig4 => cfg.transmissions = vec![transmission],
        _ => {}
    }
    cfg.n_components = [a, b]
        .iter()
        .filter_map(|f| match f {
            Family::Extended(n) => Some(*n),
            _ => None,
        })
        .collect();
    let rows = bench::run_sweep(&cfg)?.rows;
    let (ca, cb) = (Curve::new(a, setting), Curve::new(b, setting));
    let x = bench::find_crossover(&rows, &ca, &cb, bracket)?;
    print_json(&json!({
        "figure": figure.as_str(),
        "a": a.label(),
        "b": b.label(),
        "n_av": x,
        "delta_phi": bench::interpolate_at_nav(&rows, &ca, x)?,
    }))
}

fn cmd_synthesize(alpha: f64, iterations: u32) -> Result<(), Failure> {
    let s = channels::synthesize_extended(alpha, iterations)?;
    let cat = fock::cat_state(CatSpec::real(s.n_components, alpha)?, s.state.n_max())?;
    let target = TwoModeState::path_symmetric(&cat)?;
    let fidelity = s.state.fidelity(&target)?;
    print_json(&json!({
        "alpha": alpha,
        "iterations": iterations,
        "n_components": s.n_components,
        "fidelity": fidelity,
        "success_probability": s.success_probability,
    }))
}

fn cmd_verify(as_json: bool) -> Result<(), Failure> {
    let report = bench::verify_consistency(&VerifyGrid::default(), &Analytic);
    if as_json {
        print_json(&serde_json::to_value(&report).map_err(io::Error::from)?)?;
    } else {
        for c in report.failures() {
            println!(
                "FAIL {} [{}] expected {} got {} (error {:.3e}, tolerance {:.1e}){}",
                c.name,
                c.params,
                c.expected,
                c.actual,
                c.error,
                c.tolerance,
                c.message.as_deref().map(|m| format!(": {m}")).unwrap_or_default()
            );
        }
        let failed = report.failures().count();
        println!("{} checks, {} passed, {} failed", report.checks.len(), report.checks.len() - failed, failed);
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VERIFY,
            message: "verification failed".into(),
        })
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::State { family, amplitudes } => cmd_state(&family, amplitudes),
        Command::Qfi {
            family,
            transmission,
            generator,
            phase_averaged,
        } => cmd_qfi(&family, transmission, generator, phase_averaged),
        Command::Sweep {
            figure,
            out,
            format,
            grid,
        } => cmd_sweep(figure.into(), out, format, grid),
        Command::Crossover {
            figure,
            a,
            b,
            lo,
            hi,
            transmission,
        } => cmd_crossover(figure.into(), a, b, (lo, hi), transmission),
        Command::Synthesize { alpha, iterations } => cmd_synthesize(alpha, iterations),
        Command::Verify { json } => cmd_verify(json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
