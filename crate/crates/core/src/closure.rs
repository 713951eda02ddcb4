//! Solving for epicycle radii that close the constant-torsion curve.
//!
//! For a 3-fold symmetric epicycle the three area integrals agree, so closure
//! reduces to one scalar equation in `β` for fixed `α`. Roots are found by a
//! sign scan, bisection down to a coarse bracket, then a safeguarded secant.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::darboux::{
    area_integrals, closed_form_area, closure_normalization, closure_report, gamma_from_binormal, ClosureReport,
    Polyline,
};
use crate::epicycle::{sample_epicycle, EpicycleParams, SphericalCurve};
use crate::error::{Error, Result};

/// Default residual tolerance when a closed form is available.
pub const CLOSED_FORM_TOL: f64 = 1e-10;
/// Default residual tolerance on the quadrature path.
pub const QUADRATURE_TOL: f64 = 1e-8;
/// Bracket width at which bisection hands over to the secant polish.
const BISECTION_WIDTH: f64 = 1e-3;
const MAX_ITERATIONS: usize = 200;

/// How the closure integral is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosurePath {
    /// Closed form when published for `(m, n)`, quadrature otherwise.
    Auto,
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub path: ClosurePath,
    /// Residual tolerance; `None` picks the per-path default.
    pub tol: Option<f64>,
    /// Search interval for `β`, open at the left end.
    pub range: (f64, f64),
    /// Grid intervals used to scan for sign changes.
    pub scan_intervals: usize,
    /// Samples of `B` per quadrature evaluation.
    pub quadrature_samples: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            path: ClosurePath::Auto,
            tol: None,
            range: (0.0, FRAC_PI_2),
            scan_intervals: 256,
            quadrature_samples: 512,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureSolution {
    pub params: EpicycleParams,
    /// Normalized closure integral at the returned `β`.
    pub residual: f64,
    /// Final bracket around the root; endpoint values differ in sign.
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub path: ClosurePath,
    /// Further sign-change brackets seen on the scan grid (roots not refined).
    pub other_brackets: Vec<(f64, f64)>,
}

/// Smallest `β ∈ (0, π/2]` closing the `(m, n)` epicycle at `α`, default options.
pub fn solve_beta(m: i64, n: i64, alpha: f64, tol: f64) -> Result<ClosureSolution> {
    solve_beta_with(m, n, alpha, &SolveOptions { tol: Some(tol), ..SolveOptions::default() })
}

pub fn solve_beta_with(m: i64, n: i64, alpha: f64, opts: &SolveOptions) -> Result<ClosureSolution> {
    if n % 3 != 0 {
        return Err(Error::validation(format!("n must be a multiple of 3 for a single closure equation, got {n}")));
    }
    if !(alpha > 0.0 && alpha < std::f64::consts::PI) {
        return Err(Error::validation(format!("alpha must lie in (0, π), got {alpha}")));
    }
    let (lo, hi) = opts.range;
    if !(lo >= 0.0 && hi > lo && hi <= std::f64::consts::PI) {
        return Err(Error::validation(format!("invalid beta range ({lo}, {hi}]")));
    }
    let has_closed_form = closed_form_area(m, n, alpha, 0.0).is_ok();
    let path = match opts.path {
        ClosurePath::Auto if has_closed_form => ClosurePath::ClosedForm,
        ClosurePath::Auto => ClosurePath::Quadrature,
        ClosurePath::ClosedForm if !has_closed_form => {
            return Err(Error::validation(format!("no closed form for (m, n) = ({m}, {n})")));
        }
        p => p,
    };
    let tol = opts.tol.unwrap_or(match path {
        ClosurePath::Quadrature => QUADRATURE_TOL,
        _ => CLOSED_FORM_TOL,
    });
    if !(tol > 0.0) {
        return Err(Error::validation(format!("tolerance must be positive, got {tol}")));
    }
    let samples = opts.quadrature_samples;
    let f = |beta: f64| -> Result<f64> {
        match path {
            ClosurePath::Quadrature => quadrature_residual(m, n, alpha, beta, samples),
            _ => closed_form_area(m, n, alpha, beta),
        }
    };

    let brackets = scan_sign_changes(&f, lo, hi, opts.scan_intervals.max(2))?;
    let Some(&(a, b, fa, fb)) = brackets.first() else {
        return Err(Error::NoRoot(format!(
            "closure integral of ({m}, {n}) at alpha = {alpha} keeps one sign on ({lo}, {hi}]"
        )));
    };
    let root = refine_root(&f, a, b, fa, fb, tol)?;
    if root.residual.abs() >= tol {
        return Err(Error::NonConvergence(format!(
            "closure residual {:.3e} above tolerance {tol:.1e} after {} iterations",
            root.residual, root.iterations
        )));
    }
    Ok(ClosureSolution {
        params: EpicycleParams::new(m, n, alpha, root.x)?,
        residual: root.residual,
        bracket: root.bracket,
        iterations: root.iterations,
        path,
        other_brackets: brackets[1..].iter().map(|&(a, b, _, _)| (a, b)).collect(),
    })
}

/// Normalized quadrature of `∮(x dy - y dx)` for the sampled epicycle.
pub fn quadrature_residual(m: i64, n: i64, alpha: f64, beta: f64, samples: usize) -> Result<f64> {
    let b = sample_epicycle(&EpicycleParams::new(m, n, alpha, beta)?, samples)?;
    let scale = if m == 0 { 1.0 } else { closure_normalization(m) };
    Ok(scale * area_integrals(&b)?.ixy)
}

type Bracket = (f64, f64, f64, f64);

fn scan_sign_changes(f: &impl Fn(f64) -> Result<f64>, lo: f64, hi: f64, intervals: usize) -> Result<Vec<Bracket>> {
    let mut out = Vec::new();
    // the left end is excluded: β = 0 is the bare circle, never a closure
    let mut x0 = lo;
    let mut f0 = f(lo)?;
    for k in 1..=intervals {
        let x1 = lo + (hi - lo) * k as f64 / intervals as f64;
        let f1 = f(x1)?;
        if f1 == 0.0 {
            out.push((x1, x1, f1, f1));
        } else if f0 != 0.0 && f0.signum() != f1.signum() {
            out.push((x0, x1, f0, f1));
        }
        x0 = x1;
        f0 = f1;
    }
    Ok(out)
}

struct Root {
    x: f64,
    residual: f64,
    bracket: (f64, f64),
    iterations: usize,
}

/// Bisection to a coarse bracket, then secant steps kept inside the bracket.
fn refine_root(
    f: &impl Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    tol: f64,
) -> Result<Root> {
    if fa == 0.0 {
        return Ok(Root { x: a, residual: 0.0, bracket: (a, b), iterations: 0 });
    }
    let mut iterations = 0;
    while b - a > BISECTION_WIDTH && iterations < MAX_ITERATIONS {
        let mid = 0.5 * (a + b);
        let fm = f(mid)?;
        iterations += 1;
        if fm == 0.0 {
            return Ok(Root { x: mid, residual: 0.0, bracket: (a, b), iterations });
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
    }
    // secant from the two bracket ends; fall back to bisection when a step leaves it
    let (mut x_prev, mut f_prev) = (a, fa);
    let (mut x, mut fx) = (b, fb);
    while iterations < MAX_ITERATIONS {
        let mut next = x - fx * (x - x_prev) / (fx - f_prev);
        if !(next > a && next < b) || !next.is_finite() {
            next = 0.5 * (a + b);
        }
        let fn_ = f(next)?;
        iterations += 1;
        if fn_ == 0.0 {
            return Ok(Root { x: next, residual: 0.0, bracket: (a, b), iterations });
        }
        if fn_.signum() == fa.signum() {
            a = next;
            fa = fn_;
        } else {
            b = next;
        }
        let step = (next - x).abs();
        x_prev = x;
        f_prev = fx;
        x = next;
        fx = fn_;
        if fx.abs() < tol && (step <= 4.0 * f64::EPSILON * x.abs().max(1.0) || fx.abs() < 1e-3 * tol) {
            break;
        }
        if b - a <= 4.0 * f64::EPSILON * b.abs().max(1.0) {
            break;
        }
    }
    Ok(Root { x, residual: fx, bracket: (a, b), iterations })
}

/// One point of a closure-locus sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocusPoint {
    pub alpha: f64,
    pub solution: Option<ClosureSolution>,
    /// Why no solution was returned.
    pub failure: Option<String>,
    /// `|Δβ| <= LOCUS_SLOPE |Δα|` against the previous grid point, which must
    /// itself have been solved.
    pub continuous_with_previous: bool,
}

/// Largest `|dβ/dα|` between neighbouring locus points still treated as continuous.
pub const LOCUS_SLOPE: f64 = 5.0;

/// Solves for `β` at every `α` of the grid (in parallel, order preserved).
pub fn closure_locus(m: i64, n: i64, alphas: &[f64]) -> Vec<LocusPoint> {
    let solved: Vec<Result<ClosureSolution>> =
        alphas.par_iter().map(|&alpha| solve_beta_with(m, n, alpha, &SolveOptions::default())).collect();
    let mut prev: Option<(f64, f64)> = None;
    alphas
        .iter()
        .zip(solved)
        .map(|(&alpha, res)| match res {
            Ok(sol) => {
                let beta = sol.params.beta;
                let continuous = prev.is_none_or(|(a, b)| (beta - b).abs() <= LOCUS_SLOPE * (alpha - a).abs());
                prev = Some((alpha, beta));
                LocusPoint { alpha, solution: Some(sol), failure: None, continuous_with_previous: continuous }
            }
            Err(e) => {
                prev = None;
                LocusPoint { alpha, solution: None, failure: Some(e.to_string()), continuous_with_previous: false }
            }
        })
        .collect()
}

/// A closed curve of constant torsion together with its generating data.
#[derive(Debug, Clone)]
pub struct ClosedCurve {
    pub gamma: Polyline,
    pub binormal: SphericalCurve,
    pub report: ClosureReport,
    pub solution: ClosureSolution,
}

/// Solves for `β`, samples the epicycle and integrates `γ` with torsion `τ`.
pub fn build_closed_ct_curve(m: i64, n: i64, alpha: f64, tau: f64, samples: usize) -> Result<ClosedCurve> {
    if tau == 0.0 || !tau.is_finite() {
        return Err(Error::validation(format!("torsion must be finite and nonzero, got {tau}")));
    }
    let solution = solve_beta_with(m, n, alpha, &SolveOptions::default())?;
    let binormal = sample_epicycle(&solution.params, samples)?;
    let report = closure_report(&binormal, tau)?;
    let gamma = gamma_from_binormal(&binormal, tau)?;
    // a root with residual r leaves every integral at r/normalization
    let scale = if m == 0 { 1.0 } else { closure_normalization(m) };
    let allowed = 3f64.sqrt() * (solution.residual.abs() / scale + report.quadrature_tolerance) / tau.abs()
        + 1e-9 * gamma.extent().max(1.0);
    if report.closure_gap > allowed {
        return Err(Error::NonConvergence(format!(
            "closure gap {:.3e} exceeds the composed tolerance {allowed:.3e}",
            report.closure_gap
        )));
    }
    Ok(ClosedCurve { gamma, binormal, report, solution })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, SQRT_2};

    fn beta1() -> f64 {
        0.5 * ((67.0 - 24.0 * SQRT_2) / 71.0).acos()
    }

    fn beta2() -> f64 {
        0.5 * (-5.0f64 / 7.0).acos()
    }

    #[test]
    fn published_radii() {
        let s1 = solve_beta(1, -3, FRAC_PI_4, CLOSED_FORM_TOL).unwrap();
        assert_abs_diff_eq!(s1.params.beta, beta1(), epsilon = 1e-9);
        assert_abs_diff_eq!(s1.params.beta, 0.543_231_791_6, epsilon = 1e-9);
        assert!(s1.residual.abs() < CLOSED_FORM_TOL);
        let s2 = solve_beta(2, -3, FRAC_PI_3, CLOSED_FORM_TOL).unwrap();
        assert_abs_diff_eq!(s2.params.beta, beta2(), epsilon = 1e-9);
        assert_abs_diff_eq!(s2.params.beta, 1.183_199_640_1, epsilon = 1e-9);
    }

    #[test]
    fn bracket_straddles_root() {
        for (m, alpha) in [(1, FRAC_PI_4), (2, FRAC_PI_3), (1, 0.6), (1, 1.0)] {
            let s = solve_beta(m, -3, alpha, CLOSED_FORM_TOL).unwrap();
            let (a, b) = s.bracket;
            let fa = closed_form_area(m, -3, alpha, a).unwrap();
            let fb = closed_form_area(m, -3, alpha, b).unwrap();
            assert!(a <= s.params.beta && s.params.beta <= b);
            assert!(fa * fb <= 0.0, "{fa} {fb}");
        }
    }

    #[test]
    fn quadrature_path_agrees_with_closed_form() {
        for (m, alpha) in [(1, FRAC_PI_4), (2, FRAC_PI_3)] {
            let cf = solve_beta(m, -3, alpha, CLOSED_FORM_TOL).unwrap();
            let opts = SolveOptions { path: ClosurePath::Quadrature, ..SolveOptions::default() };
            let q = solve_beta_with(m, -3, alpha, &opts).unwrap();
            assert_eq!(q.path, ClosurePath::Quadrature);
            assert!(q.residual.abs() < QUADRATURE_TOL);
            assert_abs_diff_eq!(q.params.beta, cf.params.beta, epsilon = 1e-7);
        }
    }

    #[test]
    fn no_closure_when_coefficients_share_sign() {
        // cos²α - 6cosα + 1 > 0 once cos α < 3 - 2√2, i.e. α > 1.3985
        let err = solve_beta(1, -3, 1.5, CLOSED_FORM_TOL).unwrap_err();
        assert!(matches!(err, Error::NoRoot(_)));
        assert_eq!(err.exit_code(), 3);
        // small α still closes, with a small β
        let s = solve_beta(1, -3, 0.01, CLOSED_FORM_TOL).unwrap();
        assert!(s.params.beta < 0.01);
    }

    #[test]
    fn input_validation() {
        assert!(matches!(solve_beta(1, -2, 0.5, 1e-10), Err(Error::Validation(_))));
        assert!(matches!(solve_beta(1, -3, 0.0, 1e-10), Err(Error::Validation(_))));
        assert!(matches!(solve_beta(1, -3, 3.2, 1e-10), Err(Error::Validation(_))));
        assert!(matches!(solve_beta(1, -3, 0.5, 0.0), Err(Error::Validation(_))));
        let opts = SolveOptions { path: ClosurePath::ClosedForm, ..SolveOptions::default() };
        assert!(solve_beta_with(1, 6, 0.5, &opts).is_err());
    }

    #[test]
    fn general_family_uses_quadrature() {
        let s = solve_beta_with(1, 6, 0.8, &SolveOptions::default());
        if let Ok(s) = s {
            assert_eq!(s.path, ClosurePath::Quadrature);
            assert!(quadrature_residual(1, 6, 0.8, s.params.beta, 512).unwrap().abs() < QUADRATURE_TOL);
        }
    }

    #[test]
    fn locus_through_published_points() {
        let locus = closure_locus(1, -3, &[0.6, FRAC_PI_4, 1.0]);
        assert_eq!(locus.len(), 3);
        for p in &locus {
            let s = p.solution.as_ref().unwrap();
            assert!(s.residual.abs() < 1e-10);
            assert!(p.continuous_with_previous);
        }
        assert_abs_diff_eq!(locus[1].solution.as_ref().unwrap().params.beta, beta1(), epsilon = 1e-9);
        let l2 = closure_locus(2, -3, &[FRAC_PI_3]);
        assert_abs_diff_eq!(l2[0].solution.as_ref().unwrap().params.beta, beta2(), epsilon = 1e-9);
        let gap = closure_locus(1, -3, &[1.0, 1.5, 1.0]);
        assert!(gap[1].solution.is_none() && gap[1].failure.is_some());
        assert!(!gap[1].continuous_with_previous);
    }

    #[test]
    fn closed_curves_and_mirror() {
        let c = build_closed_ct_curve(1, -3, FRAC_PI_4, 1.0, 4096).unwrap();
        assert!(c.report.closure_gap < 1e-6);
        let mirror = build_closed_ct_curve(1, -3, FRAC_PI_4, -1.0, 4096).unwrap();
        for (p, q) in c.gamma.points.iter().zip(&mirror.gamma.points) {
            assert_eq!(*p, -*q);
        }
        assert!(build_closed_ct_curve(1, -3, FRAC_PI_4, 0.0, 4096).is_err());
        let c2 = build_closed_ct_curve(2, -3, FRAC_PI_3, 1.0, 4096).unwrap();
        assert!(c2.report.closure_gap < 1e-6);
    }
}
