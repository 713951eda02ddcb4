//! The `ctorsion` command line.
//!
//! Every subcommand validates its inputs, writes its outputs atomically and
//! maps failures to stable exit codes: 0 success, 1 i/o, 2 validation,
//! 3 no closure root, 4 numerical non-convergence.
//!
//! `--config FILE` reads `key = value` lines (`#` starts a comment) that
//! stand in for `--key value` flags of the chosen subcommand; flags given on
//! the command line take precedence. A `true` value enables a switch.
//! Angles are radians; degree input is rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analysis::{
    check_binormal_curvature, estimate_with, geodesic_curvature, geodesic_curvature_sphere, geodesic_inflection_count,
    looks_periodic, on_unit_sphere, sphere_identity_residuals, AnalysisReport,
};
use crate::closure::{build_closed_ct_curve, solve_beta_with, ClosurePath, SolveOptions};
use crate::darboux::{Polyline, SampleInvariants};
use crate::epicycle::{sample_epicycle, EpicycleParams};
use crate::error::{Error, Result};
use crate::io::{
    flat_record, format_f64, read_curve_csv, to_json, write_atomic, write_curve_csv, write_json, write_obj,
};
use crate::spherical_ct::{integrate_spherical_ct, zeta_sweep, SphericalCTParams, ZetaSample, DEFAULT_CT_STEPS};

#[derive(Debug, Parser)]
#[command(name = "ctorsion", version, about = "Closed curves of constant torsion from spherical epicycles")]
#[command(args_override_self = true)]
pub struct Cli {
    /// key = value file supplying defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a spherical (m,n)-epicycle B(t) on [0, 2π].
    Epicycle(EpicycleArgs),
    /// Solve for the β that closes the constant-torsion curve.
    SolveBeta(SolveBetaArgs),
    /// Build the closed constant-torsion curve and certify it.
    Construct(ConstructArgs),
    /// Estimate curvature, torsion and identity residuals of a curve CSV.
    Analyze(AnalyzeArgs),
    /// Integrate the constant-torsion curve on the unit sphere.
    SphereCt(SphereCtArgs),
    /// Tabulate the central angle ζ(τ) between the limit points.
    ZetaSweep(ZetaSweepArgs),
    /// Convert a curve CSV to an OBJ polyline.
    ExportObj(ExportObjArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Periodicity {
    /// Decide from the gap between the first and last samples.
    Auto,
    Open,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathChoice {
    Auto,
    ClosedForm,
    Quadrature,
}

/// Parses an angle in radians, refusing degree notation.
fn radians(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim();
    let lower = t.to_ascii_lowercase();
    if lower.ends_with("deg") || lower.ends_with("degrees") || t.ends_with('°') {
        return Err(format!("{t:?} is in degrees; angles are accepted in radians only"));
    }
    t.parse::<f64>().map_err(|_| format!("{t:?} is not a number of radians"))
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct EpicycleArgs {
    #[arg(long)]
    pub m: i64,
    #[arg(long)]
    pub n: i64,
    /// Cone angle α in radians, 0 < α < π.
    #[arg(long, value_parser = radians)]
    pub alpha: f64,
    /// Second cone angle β in radians, 0 < β < π.
    #[arg(long, value_parser = radians)]
    pub beta: f64,
    #[arg(long, default_value_t = 4096)]
    pub samples: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SolveBetaArgs {
    #[arg(long)]
    pub m: i64,
    #[arg(long)]
    pub n: i64,
    #[arg(long, value_parser = radians)]
    pub alpha: f64,
    /// Residual tolerance (default depends on the evaluation path).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = PathChoice::Auto)]
    pub path: PathChoice,
    /// Also write the solution record as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ConstructArgs {
    #[arg(long)]
    pub m: i64,
    #[arg(long)]
    pub n: i64,
    #[arg(long, value_parser = radians)]
    pub alpha: f64,
    /// Constant torsion, nonzero.
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 16384)]
    pub samples: usize,
    /// Curve CSV of γ, parametrized by the epicycle parameter t.
    #[arg(long)]
    pub out: PathBuf,
    /// Flat JSON report of closure, analysis and identity residuals.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Also write the binormal curve B(t) as CSV.
    #[arg(long)]
    pub binormal_out: Option<PathBuf>,
    /// Add kappa, tau (of γ) and kappa_g (of B, inward normal) columns.
    #[arg(long)]
    pub invariants: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Flat JSON report; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Torsion the deviation is measured against (default: the mean).
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, value_enum, default_value_t = Periodicity::Auto)]
    pub periodic: Periodicity,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SphereCtArgs {
    #[arg(long)]
    pub tau: f64,
    /// Margin kept from each end of the maximal arclength interval.
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    #[arg(long, default_value_t = DEFAULT_CT_STEPS)]
    pub steps: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Add kappa, tau and kappa_g (inward normal) columns.
    #[arg(long)]
    pub invariants: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ZetaSweepArgs {
    #[arg(long)]
    pub tau_min: f64,
    #[arg(long)]
    pub tau_max: f64,
    #[arg(long, default_value_t = 25)]
    pub points: usize,
    /// Geometric instead of uniform spacing.
    #[arg(long)]
    pub log: bool,
    /// CSV table `tau,zeta,err`; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportObjArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Periodicity::Auto)]
    pub closed: Periodicity,
}

/// Reads `key = value` lines into `--key value` tokens.
pub fn config_tokens(text: &str, path: &Path) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            message: format!("line {}: expected key = value", i + 1),
        })?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(Error::Parse { path: path.to_path_buf(), message: format!("line {}: bad key {key:?}", i + 1) });
        }
        match value.trim() {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            v => {
                out.push(format!("--{key}"));
                out.push(v.to_string());
            }
        }
    }
    Ok(out)
}

/// Removes `--config FILE` and splices the file's flags in front of the
/// user's flags, so the latter override them.
fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            config = Some(it.next().ok_or_else(|| Error::validation("--config needs a file path"))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            config = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else { return Ok(rest) };
    if path.is_empty() {
        return Err(Error::validation("--config needs a nonempty path"));
    }
    let path = PathBuf::from(path);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
    let tokens = config_tokens(&text, &path)?;
    // the subcommand is the first non-flag token after the program name
    let at = rest.iter().skip(1).position(|a| !a.starts_with('-')).map(|p| p + 2).unwrap_or(rest.len());
    rest.splice(at.min(rest.len())..at.min(rest.len()), tokens);
    Ok(rest)
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => return report_error(&e),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => report_error(&e),
    }
}

fn report_error(e: &Error) -> i32 {
    eprintln!("error: {e}");
    e.exit_code()
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Epicycle(a) => cmd_epicycle(&a),
        Command::SolveBeta(a) => cmd_solve_beta(&a),
        Command::Construct(a) => cmd_construct(&a),
        Command::Analyze(a) => cmd_analyze(&a),
        Command::SphereCt(a) => cmd_sphere_ct(&a),
        Command::ZetaSweep(a) => cmd_zeta_sweep(&a),
        Command::ExportObj(a) => cmd_export_obj(&a),
    }
}

fn check_angle(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < std::f64::consts::PI) {
        return Err(Error::validation(format!("{name} = {x} must lie in (0, π); angles are in radians")));
    }
    Ok(())
}

fn cmd_epicycle(a: &EpicycleArgs) -> Result<()> {
    check_angle("alpha", a.alpha)?;
    check_angle("beta", a.beta)?;
    let p = EpicycleParams::new(a.m, a.n, a.alpha, a.beta)?;
    let b = sample_epicycle(&p, a.samples)?;
    match a.format {
        OutputFormat::Csv => {
            let line = Polyline::new(b.params.clone(), b.points.clone(), "epicycle")?;
            write_curve_csv(&a.out, &line)?;
        }
        OutputFormat::Json => {
            let points: Vec<[f64; 3]> = b.points.iter().map(|p| [p.x, p.y, p.z]).collect();
            write_json(&a.out, &json!({ "epicycle": p, "params": b.params, "points": points }))?;
        }
    }
    println!("wrote {} samples of the ({}, {}) epicycle to {}", b.len(), a.m, a.n, a.out.display());
    Ok(())
}

fn cmd_solve_beta(a: &SolveBetaArgs) -> Result<()> {
    check_angle("alpha", a.alpha)?;
    if a.tol.is_some_and(|t| !(t > 0.0)) {
        return Err(Error::validation("tolerance must be positive"));
    }
    let path = match a.path {
        PathChoice::Auto => ClosurePath::Auto,
        PathChoice::ClosedForm => ClosurePath::ClosedForm,
        PathChoice::Quadrature => ClosurePath::Quadrature,
    };
    let opts = SolveOptions { path, tol: a.tol, ..SolveOptions::default() };
    let sol = solve_beta_with(a.m, a.n, a.alpha, &opts)?;
    println!("beta = {:.12}", sol.params.beta);
    println!("residual = {:.3e}", sol.residual);
    println!("bracket = [{:.12}, {:.12}]", sol.bracket.0, sol.bracket.1);
    println!("iterations = {}", sol.iterations);
    if !sol.other_brackets.is_empty() {
        println!("other roots bracketed = {}", sol.other_brackets.len());
    }
    if let Some(out) = &a.out {
        write_json(out, &sol)?;
    }
    Ok(())
}

fn invariants_with(est_report: &AnalysisReport, kappa_g: &[f64]) -> Vec<SampleInvariants> {
    let est = &est_report.estimates;
    (0..est.len()).map(|i| SampleInvariants { kappa: est.kappa[i], tau: est.tau[i], kappa_g: kappa_g[i] }).collect()
}

fn cmd_construct(a: &ConstructArgs) -> Result<()> {
    check_angle("alpha", a.alpha)?;
    let curve = build_closed_ct_curve(a.m, a.n, a.alpha, a.tau, a.samples)?;
    let mut gamma = curve.gamma.clone();
    let mut analysis = estimate_with(&gamma, looks_periodic(&gamma))?;
    let b = &curve.binormal;
    let b_line = Polyline::new(b.params.clone(), b.points.clone(), "binormal")?;
    analysis.identity_residuals = sphere_identity_residuals(&b_line)?;
    analysis.identity_residuals.insert("binormal_curvature".to_string(), check_binormal_curvature(b, &gamma, a.tau)?);
    let b_inflections = geodesic_inflection_count(b)?;
    if a.invariants {
        let kg = geodesic_curvature_sphere(b)?;
        gamma.invariants = Some(invariants_with(&analysis, &kg));
    }
    write_curve_csv(&a.out, &gamma)?;
    if let Some(path) = &a.binormal_out {
        write_curve_csv(path, &b_line)?;
    }
    let extra = json!({
        "m": a.m,
        "n": a.n,
        "alpha": a.alpha,
        "beta": curve.solution.params.beta,
        "tau": a.tau,
        "binormal_inflection_count": b_inflections,
    });
    let record = flat_record(&[to_value(&curve.report)?, to_value(&analysis)?, extra])?;
    if let Some(path) = &a.report {
        write_json(path, &record)?;
    }
    println!("beta = {:.12}", curve.solution.params.beta);
    println!("closure_gap = {:.3e}", curve.report.closure_gap);
    println!("tau_mean = {:.9}, tau_max_dev = {:.3e}", analysis.tau_mean, analysis.tau_max_dev);
    println!("kappa_min = {:.6}, curvature sign changes = {}", analysis.kappa_min, analysis.inflection_count);
    println!("binormal geodesic-curvature inflections = {b_inflections}");
    Ok(())
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<serde_json::Value> {
    serde_json::to_value(v).map_err(|e| Error::validation(format!("json encoding failed: {e}")))
}

fn resolve_periodic(choice: Periodicity, line: &Polyline) -> bool {
    match choice {
        Periodicity::Auto => looks_periodic(line),
        Periodicity::Open => false,
        Periodicity::Closed => true,
    }
}

fn cmd_analyze(a: &AnalyzeArgs) -> Result<()> {
    let mut line = read_curve_csv(&a.input)?;
    if let Some(t) = a.tau {
        if !t.is_finite() {
            return Err(Error::validation("target torsion must be finite"));
        }
        line.torsion = Some(t);
    }
    let periodic = resolve_periodic(a.periodic, &line);
    let mut report = estimate_with(&line, periodic)?;
    let mut extra = BTreeMap::new();
    let spherical = on_unit_sphere(&line.points);
    extra.insert("on_unit_sphere".to_string(), json!(spherical));
    if spherical {
        let kg = geodesic_curvature(&line.params, &line.points, periodic)?;
        let m = if periodic { kg.len() - 1 } else { kg.len() };
        let finite: Vec<f64> = kg[..m].iter().copied().filter(|k| k.is_finite()).collect();
        extra.insert(
            "geodesic_inflection_count".to_string(),
            json!(crate::analysis::count_sign_changes(&finite, periodic)),
        );
        if periodic {
            report.identity_residuals = sphere_identity_residuals(&line)?;
        }
    }
    let record = flat_record(&[to_value(&report)?, to_value(&extra)?])?;
    match &a.out {
        Some(path) => {
            write_json(path, &record)?;
            println!(
                "{} samples, periodic = {}, tau_mean = {:.9}, tau_max_dev = {:.3e}",
                report.samples, report.periodic, report.tau_mean, report.tau_max_dev
            );
        }
        None => print!("{}", to_json(&record)?),
    }
    Ok(())
}

fn cmd_sphere_ct(a: &SphereCtArgs) -> Result<()> {
    let p = SphericalCTParams::with_frame(a.tau, a.eps, a.steps, crate::frames::Frame::identity())?;
    let mut line = integrate_spherical_ct(&p)?;
    if a.invariants {
        let report = estimate_with(&line, false)?;
        let kg = geodesic_curvature(&line.params, &line.points, false)?;
        line.invariants = Some(invariants_with(&report, &kg));
    }
    write_curve_csv(&a.out, &line)?;
    let norm_dev = line.points.iter().map(|x| (x.norm() - 1.0).abs()).fold(0.0, f64::max);
    println!(
        "{} samples over s in [{:.9}, {:.9}], max |‖γ‖ − 1| = {norm_dev:.3e}",
        line.len(),
        line.params[0],
        line.params[line.len() - 1]
    );
    Ok(())
}

/// Uniform or geometric grid of `points` values from `lo` to `hi`.
pub fn sweep_grid(lo: f64, hi: f64, points: usize, log: bool) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) || points == 0 {
        return Err(Error::validation("sweep needs finite bounds and at least one point"));
    }
    if points > 1 && !(lo < hi) {
        return Err(Error::validation(format!("tau-min ({lo}) must be below tau-max ({hi})")));
    }
    if log && !(lo > 0.0) {
        return Err(Error::validation("a logarithmic sweep needs positive bounds"));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let f = i as f64 / last;
            if i + 1 == points {
                hi
            } else if log {
                lo * (hi / lo).powf(f)
            } else {
                lo + (hi - lo) * f
            }
        })
        .collect())
}

/// `tau,zeta,err` table with LF line endings.
pub fn zeta_table(samples: &[ZetaSample]) -> String {
    let mut out = String::from("tau,zeta,err\n");
    for z in samples {
        out.push_str(&format!("{},{},{}\n", format_f64(z.tau), format_f64(z.zeta), format_f64(z.extrapolation_error)));
    }
    out
}

fn cmd_zeta_sweep(a: &ZetaSweepArgs) -> Result<()> {
    let grid = sweep_grid(a.tau_min, a.tau_max, a.points, a.log)?;
    let table = zeta_table(&zeta_sweep(&grid)?);
    match &a.out {
        Some(path) => {
            write_atomic(path, table.as_bytes())?;
            println!("wrote {} rows to {}", grid.len(), path.display());
        }
        None => print!("{table}"),
    }
    Ok(())
}

fn cmd_export_obj(a: &ExportObjArgs) -> Result<()> {
    let line = read_curve_csv(&a.input)?;
    let closed = resolve_periodic(a.closed, &line);
    write_obj(&a.out, &line.points, closed)?;
    println!(
        "wrote {} polyline ({} samples) to {}",
        if closed { "closed" } else { "open" },
        line.len(),
        a.out.display()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees_are_rejected() {
        assert!(radians("45deg").is_err());
        assert!(radians("45°").is_err());
        assert_eq!(radians(" 0.5 ").unwrap(), 0.5);
        assert!(check_angle("alpha", 45.0).is_err());
    }

    #[test]
    fn config_tokens_and_precedence() {
        let toks =
            config_tokens("# comment\nalpha = 0.7\ntau_min=1\nlog = true\nquiet = false\n", Path::new("c")).unwrap();
        assert_eq!(toks, ["--alpha", "0.7", "--tau-min", "1", "--log"]);
        assert!(config_tokens("novalue\n", Path::new("c")).is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(sweep_grid(1.0, 100.0, 3, true).unwrap(), vec![1.0, 10.0, 100.0]);
        assert_eq!(sweep_grid(0.0, 1.0, 3, false).unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(sweep_grid(0.0, 1.0, 3, true).is_err());
        assert!(sweep_grid(2.0, 1.0, 3, false).is_err());
        assert_eq!(sweep_grid(2.0, 2.0, 1, false).unwrap(), vec![2.0]);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["ctorsion", "epicycle", "--m", "1", "--n", "-3", "--alpha", "0.7", "--beta", "0.5"]), 2);
        assert_eq!(run(["ctorsion", "bogus"]), 2);
        assert_eq!(run(["ctorsion", "--help"]), 0);
    }
}
