//! Argument parsing and the four subcommands.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use spectra_core::aim::{aim_spectrum, AimConfig};
use spectra_core::hdm::{
    default_mu_range, hdm_spectrum, hdm_spectrum_auto, plateau_scan, HdmConfig, PlateauReport, DEFAULT_PLATEAU_STEPS,
};
use spectra_core::potential::Precheck;
use spectra_core::{PotentialParams, Precision};

use crate::config::{ConfigFile, Layers};
use crate::curves::{emit_curves, Which};
use crate::error::{CliError, CliResult};
use crate::report::{e12, HdmRun, ParamsOut, SpectrumReport, E12};
use crate::tables::{reproduce, TablesOptions};
use crate::{Engines, Format};

const DEFAULT_N: usize = 100;

#[derive(Debug, Parser)]
#[command(
    name = "spectra",
    version,
    about = "Bound-state spectra of V(r) = V0 (exp(-lambda r) - gamma) / (exp(lambda r) - 1)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the bound states with one or both engines.
    Run(RunArgs),
    /// Recompute the reference tables and diff them against the stored values.
    Tables(TablesArgs),
    /// Sample V(r) and the regular part U(r) as CSV.
    Curves(CurvesArgs),
    /// Scan the basis scale mu and report where the spectrum is stable.
    Plateau(PlateauArgs),
}

#[derive(Debug, Args)]
struct PotentialArgs {
    #[arg(long = "V0", allow_negative_numbers = true)]
    v0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat `key = value` file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    potential: PotentialArgs,
    /// Angular momentum (the AIM engine handles ell = 0 only).
    #[arg(long)]
    ell: Option<u32>,
    #[arg(long, value_enum)]
    method: Option<Engines>,
    /// Laguerre basis size.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Basis scale; picked from the plateau scan when omitted.
    #[arg(long)]
    mu: Option<f64>,
    /// AIM iteration depth.
    #[arg(long)]
    n_max: Option<usize>,
    /// AIM working precision in decimal digits.
    #[arg(long)]
    digits: Option<u32>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct TablesArgs {
    #[arg(long, value_enum)]
    method: Option<Engines>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    digits: Option<u32>,
    /// Absolute tolerance applied to every check instead of the defaults.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CurvesArgs {
    #[command(flatten)]
    potential: PotentialArgs,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, value_enum)]
    which: Option<Which>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlateauArgs {
    #[command(flatten)]
    potential: PotentialArgs,
    #[arg(long)]
    ell: Option<u32>,
    #[arg(long = "N")]
    n: Option<usize>,
    /// Scan range; defaults to [lambda/2, 20 lambda].
    #[arg(long)]
    mu_min: Option<f64>,
    #[arg(long)]
    mu_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

/// Entry point shared by the binary and the tests. Returns the exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(a, stdout, stderr),
        Command::Tables(a) => tables(a, stdout, stderr),
        Command::Curves(a) => curves(a, stdout),
        Command::Plateau(a) => plateau(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn load_config(path: Option<PathBuf>) -> CliResult<Option<ConfigFile>> {
    path.as_deref().map(ConfigFile::load).transpose()
}

fn potential(l: &Layers, a: &PotentialArgs, ell: u32) -> CliResult<PotentialParams> {
    let need = |v: Option<f64>, key: &str| {
        v.ok_or_else(|| CliError::Invalid(format!("missing --{key} (flag or config key {key})")))
    };
    let v0 = need(l.get(a.v0, "V0")?, "V0")?;
    let lambda = need(l.get(a.lambda, "lambda")?, "lambda")?;
    let gamma = need(l.get(a.gamma, "gamma")?, "gamma")?;
    Ok(PotentialParams::new(v0, lambda, gamma, ell)?)
}

fn emit(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn warn_regime(p: &PotentialParams, stderr: &mut dyn Write) {
    if !p.interesting_regime() {
        let _ = writeln!(
            stderr,
            "warning: gamma = {} lies outside (0, 1); the potential has no valley and barrier",
            p.gamma
        );
    }
    if let Precheck::Warning(msg) = p.bound_state_precheck() {
        let _ = writeln!(stderr, "warning: {msg}");
    }
}

fn run(a: RunArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<i32> {
    let file = load_config(a.output.config)?;
    let l = Layers::new(file.as_ref());
    let ell = l.get(a.ell, "ell")?.unwrap_or(0);
    let p = potential(&l, &a.potential, ell)?;
    let engines = l.get(a.method, "method")?.unwrap_or(Engines::Both);
    let n = l.get(a.n, "N")?;
    let mu = l.get(a.mu, "mu")?;
    let n_max = l.get(a.n_max, "n-max")?;
    let digits = l.get(a.digits, "digits")?;
    let format = l.get(a.output.format, "format")?.unwrap_or(Format::Table);
    let out = l.get(a.output.out, "out")?;
    l.finish()?;

    if !engines.hdm() && (n.is_some() || mu.is_some()) {
        return Err(CliError::Invalid("N and mu apply to the hdm method only".into()));
    }
    if !engines.aim() && (n_max.is_some() || digits.is_some()) {
        return Err(CliError::Invalid(
            "n-max and digits apply to the aim method only".into(),
        ));
    }
    let aim_cfg = AimConfig {
        n_max: n_max.unwrap_or(AimConfig::default().n_max),
        precision: Precision::new(digits.unwrap_or(Precision::DEFAULT_DIGITS))?,
        ..AimConfig::default()
    };
    let n = n.unwrap_or(DEFAULT_N);
    let hdm_cfg = HdmConfig::new(n, mu.unwrap_or(1.0), ell)?;
    if engines.aim() {
        aim_cfg.resolve_bracket(&p)?;
        if ell != 0 {
            return Err(spectra_core::Error::UnsupportedAngularMomentum(ell).into());
        }
    }
    warn_regime(&p, stderr);

    let aim = engines.aim().then(|| aim_spectrum(&p, &aim_cfg)).transpose()?;
    let hdm = match (engines.hdm(), mu) {
        (false, _) => None,
        (true, Some(_)) => Some(HdmRun {
            spectrum: hdm_spectrum(&p, &hdm_cfg)?,
            plateau: None,
        }),
        (true, None) => {
            let (spectrum, plateau) = hdm_spectrum_auto(&p, n)?;
            Some(HdmRun {
                spectrum,
                plateau: Some(plateau),
            })
        }
    };
    let report = SpectrumReport::build(&p, aim.as_ref().map(|r| (r, aim_cfg.precision.digits())), hdm.as_ref());
    let text = match format {
        Format::Table => report.to_table(),
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    emit(&text, out.as_deref(), stdout)?;

    let mut missing = Vec::new();
    if aim.as_ref().is_some_and(|r| r.eigenvalues().is_empty()) {
        missing.push(format!("aim: no level stable after {} iterations", aim_cfg.n_max));
    }
    if hdm.as_ref().is_some_and(|h| h.spectrum.bound.is_empty()) {
        missing.push(format!("hdm: no bound level at N = {n}"));
    }
    if missing.is_empty() {
        return Ok(0);
    }
    let err = CliError::NotConverged(missing.join("; "));
    let _ = writeln!(stderr, "error: {err}");
    Ok(err.exit_code())
}

fn tables(a: TablesArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<i32> {
    let file = load_config(a.config)?;
    let l = Layers::new(file.as_ref());
    let engines = l.get(a.method, "method")?.unwrap_or(Engines::Both);
    let n = l.get(a.n, "N")?;
    let n_max = l.get(a.n_max, "n-max")?;
    let digits = l.get(a.digits, "digits")?;
    let tolerance = l.get(a.tolerance, "tolerance")?;
    let out = l.get(a.out, "out")?;
    l.finish()?;

    if !engines.hdm() && n.is_some() {
        return Err(CliError::Invalid("N applies to the hdm method only".into()));
    }
    if !engines.aim() && (n_max.is_some() || digits.is_some()) {
        return Err(CliError::Invalid(
            "n-max and digits apply to the aim method only".into(),
        ));
    }
    if let Some(t) = tolerance {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(CliError::Invalid(format!(
                "tolerance must be a finite non-negative number (got {t})"
            )));
        }
    }
    let mut opts = TablesOptions {
        engines,
        tolerance,
        ..TablesOptions::default()
    };
    opts.n = n.unwrap_or(opts.n);
    opts.aim.n_max = n_max.unwrap_or(opts.aim.n_max);
    opts.aim.precision = Precision::new(digits.unwrap_or(Precision::DEFAULT_DIGITS))?;
    if opts.aim.stability_runs > opts.aim.n_max || opts.aim.n_max < opts.aim.n_min {
        return Err(CliError::Invalid(format!(
            "n-max must be at least {}",
            opts.aim.stability_runs.max(opts.aim.n_min)
        )));
    }

    let report = reproduce(&opts, &mut |line| {
        let _ = writeln!(stderr, "{line}");
    })?;
    emit(&report.render(), out.as_deref(), stdout)?;
    if report.passed() {
        return Ok(0);
    }
    let err = CliError::NotConverged(format!("{} checks outside tolerance", report.failures()));
    let _ = writeln!(stderr, "error: {err}");
    Ok(err.exit_code())
}

fn curves(a: CurvesArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let file = load_config(a.config)?;
    let l = Layers::new(file.as_ref());
    let p = potential(&l, &a.potential, 0)?;
    let r_max = l.get(a.r_max, "r-max")?.unwrap_or(20.0);
    let points = l.get(a.points, "points")?.unwrap_or(201);
    let which = l.get(a.which, "which")?.unwrap_or(Which::Both);
    let out = l.get(a.out, "out")?;
    l.finish()?;
    emit(&emit_curves(&p, r_max, points, which)?, out.as_deref(), stdout)?;
    Ok(0)
}

#[derive(Serialize)]
struct PlateauRow {
    mu: E12,
    #[serde(rename = "E")]
    levels: Vec<E12>,
    /// Ground-state digits shared with the next μ.
    ground_digits: Option<E12>,
}

#[derive(Serialize)]
struct PlateauOut {
    params: ParamsOut,
    #[serde(rename = "N")]
    n: usize,
    best_mu: E12,
    window: Option<[E12; 2]>,
    no_plateau: bool,
    scan: Vec<PlateauRow>,
}

fn plateau_text(r: &PlateauReport, format: Format) -> String {
    let width = r.levels.iter().map(Vec::len).max().unwrap_or(0);
    let ground = |i: usize| r.digits.get(i).and_then(|d| d.first()).copied();
    let in_window = |i: usize| r.window.is_some_and(|(a, b)| i >= a && i <= b);
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str("mu,ground_digits,in_window,best");
            for k in 0..width {
                let _ = write!(out, ",E{k}");
            }
            out.push('\n');
            for (i, mu) in r.mu.iter().enumerate() {
                let g = ground(i).map(|d| format!("{d:.2}")).unwrap_or_default();
                let _ = write!(out, "{},{g},{},{}", e12(*mu), in_window(i), i == r.best);
                for k in 0..width {
                    out.push(',');
                    out.push_str(&r.levels[i].get(k).map(|e| e12(*e)).unwrap_or_default());
                }
                out.push('\n');
            }
        }
        _ => {
            match r.window_mu() {
                Some((a, b)) => {
                    let _ = writeln!(
                        out,
                        "plateau {a:.6} .. {b:.6} ({} points), best mu = {:.6}",
                        r.window_len(),
                        r.best_mu()
                    );
                }
                None => {
                    let _ = writeln!(out, "no plateau found; best mu = {:.6}", r.best_mu());
                }
            }
            let _ = writeln!(out, "{:>14}  {:>6}  {:>18}  levels", "mu", "digits", "E0");
            for (i, mu) in r.mu.iter().enumerate() {
                let mark = if i == r.best {
                    '<'
                } else if in_window(i) {
                    '|'
                } else {
                    ' '
                };
                let g = ground(i).map(|d| format!("{d:.2}")).unwrap_or_else(|| "-".into());
                let e0 = r.levels[i].first().map(|e| e12(*e)).unwrap_or_else(|| "-".into());
                let _ = writeln!(
                    out,
                    "{:>14}{mark} {g:>6}  {e0:>18}  {}",
                    format!("{mu:.6}"),
                    r.levels[i].len()
                );
            }
        }
    }
    out
}

fn plateau(a: PlateauArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let file = load_config(a.output.config)?;
    let l = Layers::new(file.as_ref());
    let ell = l.get(a.ell, "ell")?.unwrap_or(0);
    let p = potential(&l, &a.potential, ell)?;
    let n = l.get(a.n, "N")?.unwrap_or(DEFAULT_N);
    let (lo, hi) = default_mu_range(&p);
    let mu_min = l.get(a.mu_min, "mu-min")?.unwrap_or(lo);
    let mu_max = l.get(a.mu_max, "mu-max")?.unwrap_or(hi);
    let steps = l.get(a.steps, "steps")?.unwrap_or(DEFAULT_PLATEAU_STEPS);
    let format = l.get(a.output.format, "format")?.unwrap_or(Format::Table);
    let out = l.get(a.output.out, "out")?;
    l.finish()?;

    let report = plateau_scan(&p, &HdmConfig::new(n, 1.0, ell)?, mu_min, mu_max, steps)?;
    let text = match format {
        Format::Json => {
            let body = PlateauOut {
                params: (&p).into(),
                n,
                best_mu: E12(report.best_mu()),
                window: report.window_mu().map(|(a, b)| [E12(a), E12(b)]),
                no_plateau: report.no_plateau(),
                scan: (0..report.mu.len())
                    .map(|i| PlateauRow {
                        mu: E12(report.mu[i]),
                        levels: report.levels[i].iter().map(|&e| E12(e)).collect(),
                        ground_digits: report.digits.get(i).and_then(|d| d.first()).map(|&d| E12(d)),
                    })
                    .collect(),
            };
            let mut s = serde_json::to_string_pretty(&body).expect("plateau report serializes");
            s.push('\n');
            s
        }
        f => plateau_text(&report, f),
    };
    emit(&text, out.as_deref(), stdout)?;
    Ok(if report.no_plateau() { 3 } else { 0 })
}
