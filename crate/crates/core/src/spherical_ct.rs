//! Curves of constant torsion on the unit sphere.
//!
//! Along a unit-sphere curve with outward normal `ν = γ` the Darboux frame
//! `(t, u, ν)` obeys
//!
//! ```text
//! F' = F A,    A = [ 0   -κ_g  1 ]
//!                  [ κ_g  0    0 ]
//!                  [ -1   0    0 ]
//! ```
//!
//! and constant torsion `τ` forces `κ_g = tan(τs)`, `κ = sec(τs)`. The curve
//! exists on `|s| < π/(2|τ|)` only, spiralling into a limit point at each end.

use std::collections::HashSet;
use std::f64::consts::FRAC_PI_2;

use log::warn;
use nalgebra::Matrix3;
use rayon::prelude::*;
use serde::Serialize;

use crate::darboux::Polyline;
use crate::error::{Error, Result};
use crate::frames::{nearest_rotation, Frame, Vec3};

/// Default number of steps of the coarse spacing across each half of the domain.
pub const DEFAULT_CT_STEPS: usize = 2048;
/// Largest step in arclength, whatever the domain size.
pub const MAX_CT_STEP: f64 = 1e-2;
/// Steps near the ends shrink to this fraction of the distance to the
/// singularity and of `1/|κ_g|`.
pub const GRADING: f64 = 0.02;
/// Largest `|κ_g|` an integration may reach.
pub const MAX_GEODESIC_CURVATURE: f64 = 1e12;
/// Margins, relative to `min(1, π/(2|τ|))`, used to extrapolate the limit points.
pub const EPS_SEQUENCE: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];

/// Inputs of one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalCTParams {
    pub tau: f64,
    /// Margin kept from each end of the maximal domain.
    pub eps: f64,
    /// Coarse steps per half domain.
    pub steps: usize,
    /// Darboux frame `(t, u, ν)` at `s = 0`; its third column is the starting point.
    pub frame: Frame,
}

impl SphericalCTParams {
    /// Starting at the north pole with `t = e₁`, `u = e₂`, `ν = e₃`.
    pub fn new(tau: f64, eps: f64) -> Result<Self> {
        Self::with_frame(tau, eps, DEFAULT_CT_STEPS, Frame::identity())
    }

    pub fn with_frame(tau: f64, eps: f64, steps: usize, frame: Frame) -> Result<Self> {
        check_tau(tau)?;
        let s_max = max_half_length(tau);
        if !(eps > 0.0 && eps < s_max) {
            return Err(Error::validation(format!("ε must lie in (0, π/(2|τ|)) = (0, {s_max}), got {eps}")));
        }
        if steps < 16 {
            return Err(Error::validation(format!("need at least 16 steps, got {steps}")));
        }
        Ok(Self { tau, eps, steps, frame })
    }

    pub fn initial_point(&self) -> Vec3 {
        self.frame.f3()
    }

    /// Half-length `π/(2|τ|) − ε` of the integrated domain.
    pub fn half_length(&self) -> f64 {
        max_half_length(self.tau) - self.eps
    }
}

/// Central angle between the two limit points for one torsion value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaSample {
    pub tau: f64,
    pub zeta: f64,
    pub extrapolation_error: f64,
}

fn check_tau(tau: f64) -> Result<()> {
    if tau == 0.0 || !tau.is_finite() {
        return Err(Error::validation(format!("torsion must be finite and nonzero, got {tau}")));
    }
    Ok(())
}

/// `π/(2|τ|)`, half the maximal arclength.
pub fn max_half_length(tau: f64) -> f64 {
    FRAC_PI_2 / tau.abs()
}

/// Arclength and Darboux frame at one integration node.
type Sample = (f64, Matrix3<f64>);

fn generator(tau: f64, s: f64) -> Matrix3<f64> {
    let kg = (tau * s).tan();
    Matrix3::new(0.0, -kg, 1.0, kg, 0.0, 0.0, -1.0, 0.0, 0.0)
}

fn rk4(f: &Matrix3<f64>, s: f64, h: f64, tau: f64) -> Matrix3<f64> {
    let (a0, am, a1) = (generator(tau, s), generator(tau, s + 0.5 * h), generator(tau, s + h));
    let k1 = f * a0;
    let k2 = (f + k1 * (0.5 * h)) * am;
    let k3 = (f + k2 * (0.5 * h)) * am;
    let k4 = (f + k3 * h) * a1;
    nearest_rotation(&(f + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0)))
}

fn step_size(tau: f64, s_abs: f64, h_max: f64) -> f64 {
    let delta = max_half_length(tau) - s_abs;
    let kg = (tau * s_abs).tan().abs();
    let mut h = h_max.min(GRADING * delta);
    if kg > 0.0 {
        h = h.min(GRADING / kg);
    }
    h
}

/// Integrates from `s = 0` to `sign · targets.last()`, landing exactly on each
/// `|s|` in the ascending `targets`. Returns all `(s, F)` and the frames at the targets.
fn integrate_half(
    tau: f64,
    frame: &Matrix3<f64>,
    sign: f64,
    targets: &[f64],
    h_max: f64,
) -> (Vec<Sample>, Vec<Matrix3<f64>>) {
    let mut out = vec![(0.0, *frame)];
    let mut hits = Vec::with_capacity(targets.len());
    let mut f = *frame;
    let mut s_abs = 0.0;
    for &target in targets {
        while s_abs < target {
            let mut h = step_size(tau, s_abs, h_max);
            // avoid a sliver step just short of the target
            if s_abs + 1.5 * h >= target {
                h = if s_abs + h >= target { target - s_abs } else { 0.5 * (target - s_abs) };
            }
            f = rk4(&f, sign * s_abs, sign * h, tau);
            s_abs = if s_abs + h >= target { target } else { s_abs + h };
            out.push((sign * s_abs, f));
        }
        hits.push(f);
    }
    (out, hits)
}

fn check_curvature_range(tau: f64, s_abs: f64, eps: f64) -> Result<()> {
    let kg = (tau.abs() * s_abs).tan();
    if !kg.is_finite() || kg > MAX_GEODESIC_CURVATURE {
        return Err(Error::validation(format!(
            "ε = {eps:e} is too small: |κ_g| would reach {kg:.3e} (limit {MAX_GEODESIC_CURVATURE:e})"
        )));
    }
    Ok(())
}

fn coarse_step(tau: f64, steps: usize) -> f64 {
    (max_half_length(tau) / steps as f64).min(MAX_CT_STEP)
}

/// Integrates outward from `s = 0` in both directions over `|s| ≤ π/(2|τ|) − ε`.
///
/// The result carries the Darboux frames; its points are the third frame
/// columns, so they lie on the unit sphere up to roundoff.
pub fn integrate_spherical_ct(p: &SphericalCTParams) -> Result<Polyline> {
    let half = p.half_length();
    check_curvature_range(p.tau, half, p.eps)?;
    let h_max = coarse_step(p.tau, p.steps);
    let f0 = *p.frame.matrix();
    let (back, _) = integrate_half(p.tau, &f0, -1.0, &[half], h_max);
    let (fwd, _) = integrate_half(p.tau, &f0, 1.0, &[half], h_max);
    let samples: Vec<Sample> = back.into_iter().rev().chain(fwd.into_iter().skip(1)).collect();
    let params = samples.iter().map(|(s, _)| *s).collect();
    let points = samples.iter().map(|(_, f)| f.column(2).into_owned()).collect();
    let mut line = Polyline::new(params, points, format!("sphere-ct(tau={})", p.tau))?;
    line.frames = Some(samples.iter().map(|(_, f)| Frame::from_matrix_unchecked(*f)).collect());
    line.torsion = Some(p.tau);
    Ok(line)
}

fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Limit points `γ(∓s_max)` extrapolated over [`EPS_SEQUENCE`], with the
/// magnitude of the last extrapolation correction of each.
fn limit_points(tau: f64, frame: &Frame, steps: usize) -> Result<(Vec3, Vec3, [f64; 4])> {
    check_tau(tau)?;
    let s_max = max_half_length(tau);
    let scale = s_max.min(1.0);
    let eps: Vec<f64> = EPS_SEQUENCE.iter().map(|e| e * scale).collect();
    check_curvature_range(tau, s_max - eps[3], eps[3])?;
    let targets: Vec<f64> = eps.iter().map(|e| s_max - e).collect();
    let h_max = coarse_step(tau, steps);
    let (_, back) = integrate_half(tau, frame.matrix(), -1.0, &targets, h_max);
    let (_, fwd) = integrate_half(tau, frame.matrix(), 1.0, &targets, h_max);
    let zetas: Vec<f64> = back
        .iter()
        .zip(&fwd)
        .map(|(a, b)| angle_between(&a.column(2).into_owned(), &b.column(2).into_owned()))
        .collect();
    let extrapolate = |v: &[Vec3]| -> Vec3 {
        // linear in ε through the two smallest margins
        let (e3, e4) = (eps[2], eps[3]);
        v[3] + (v[3] - v[2]) * (e4 / (e3 - e4))
    };
    let minus: Vec<Vec3> = back.iter().map(|f| f.column(2).into_owned()).collect();
    let plus: Vec<Vec3> = fwd.iter().map(|f| f.column(2).into_owned()).collect();
    Ok((extrapolate(&minus).normalize(), extrapolate(&plus).normalize(), [zetas[0], zetas[1], zetas[2], zetas[3]]))
}

/// Central angle `ζ(τ)` between the two limit points, from the default
/// initial frame. Extrapolated linearly in `ε` through the two smallest
/// margins; the error estimate is the size of that correction.
pub fn central_angle(tau: f64) -> Result<ZetaSample> {
    central_angle_with(tau, DEFAULT_CT_STEPS)
}

/// [`central_angle`] with an explicit coarse step count.
pub fn central_angle_with(tau: f64, steps: usize) -> Result<ZetaSample> {
    let (_, _, z) = limit_points(tau, &Frame::identity(), steps)?;
    let (d1, d2, d3) = ((z[1] - z[0]).abs(), (z[2] - z[1]).abs(), (z[3] - z[2]).abs());
    // the approach is O(ε): successive differences must shrink
    if d3 > d2.max(d1) + 1e-12 {
        return Err(Error::NonConvergence(format!(
            "central angle for τ = {tau} does not settle as ε → 0 (differences {d1:.3e}, {d2:.3e}, {d3:.3e})"
        )));
    }
    let (e3, e4) = (EPS_SEQUENCE[2], EPS_SEQUENCE[3]);
    let correction = (z[3] - z[2]) * (e4 / (e3 - e4));
    let zeta = (z[3] + correction).clamp(0.0, std::f64::consts::PI);
    Ok(ZetaSample { tau, zeta, extrapolation_error: correction.abs() })
}

/// Distinct values of `grid` in first-seen order, warning about repeats.
fn dedupe(grid: &[f64]) -> Vec<f64> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(grid.len());
    for &t in grid {
        if seen.insert(t.to_bits()) {
            out.push(t);
        } else {
            warn!("duplicate torsion value {t} dropped from the sweep");
        }
    }
    out
}

/// `ζ(τ)` over a grid, in grid order, computed in parallel.
///
/// Repeated values are dropped with a warning; zero is rejected.
pub fn zeta_sweep(grid: &[f64]) -> Result<Vec<ZetaSample>> {
    let grid = dedupe(grid);
    grid.iter().try_for_each(|&t| check_tau(t))?;
    grid.par_iter().map(|&t| central_angle(t)).collect()
}

/// The `+` limit point as a function of `τ`, all from the same initial frame,
/// as a curve on the unit sphere parametrized by `τ` (grid sorted, repeats dropped).
pub fn limit_point_locus(grid: &[f64], frame: &Frame) -> Result<Polyline> {
    let mut grid = dedupe(grid);
    grid.iter().try_for_each(|&t| check_tau(t))?;
    grid.sort_by(f64::total_cmp);
    let points: Vec<Vec3> =
        grid.par_iter().map(|&t| limit_points(t, frame, DEFAULT_CT_STEPS).map(|p| p.1)).collect::<Result<_>>()?;
    Polyline::new(grid, points, "limit-point-locus")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::estimate_with;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn half_torsion_curve_stays_on_the_sphere() {
        let p = SphericalCTParams::new(0.5, 1e-3).unwrap();
        let line = integrate_spherical_ct(&p).unwrap();
        for (i, x) in line.points.iter().enumerate() {
            assert_abs_diff_eq!(x.norm(), 1.0, epsilon = 1e-8);
            let f = &line.frames.as_ref().unwrap()[i];
            assert!(f.orthonormality_defect() < 1e-8);
            // tangent to the sphere
            assert_abs_diff_eq!(x.dot(&f.f1()), 0.0, epsilon = 1e-8);
        }
        assert_abs_diff_eq!(line.params[0], -(PI - 1e-3), epsilon = 1e-12);
        assert_abs_diff_eq!(*line.params.last().unwrap(), PI - 1e-3, epsilon = 1e-12);
        assert!(line.params.last().unwrap() - line.params[0] < 2.0 * PI);
        assert_eq!(line.points[line.params.iter().position(|s| *s == 0.0).unwrap()], Vec3::z());
    }

    #[test]
    fn estimated_curvature_is_secant_and_torsion_constant() {
        let tau = 0.5;
        let line = integrate_spherical_ct(&SphericalCTParams::new(tau, 1e-3).unwrap()).unwrap();
        let r = estimate_with(&line, false).unwrap();
        let est = &r.estimates;
        let s_max = max_half_length(tau);
        let mut checked = 0;
        for i in (0..line.len()).filter(|&i| line.params[i].abs() < 0.9 * s_max && est.tau[i].is_finite()) {
            let s = line.params[i];
            assert_abs_diff_eq!(est.kappa[i], 1.0 / (tau * s).cos(), epsilon = 1e-4);
            assert_abs_diff_eq!(est.tau[i], tau, epsilon = 1e-4);
            checked += 1;
        }
        assert!(checked > 1000);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(SphericalCTParams::new(0.0, 1e-3).is_err());
        assert!(SphericalCTParams::new(0.5, 0.0).is_err());
        assert!(SphericalCTParams::new(0.5, 4.0).is_err());
        let tiny = SphericalCTParams::new(1.0, 1e-14).unwrap();
        let err = integrate_spherical_ct(&tiny).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("κ_g"));
        assert!(central_angle(0.0).is_err());
    }

    #[test]
    fn central_angle_limits() {
        let small = central_angle(0.01).unwrap();
        assert!((small.zeta - PI).abs() < 0.05, "{small:?}");
        let (z10, z100) = (central_angle(10.0).unwrap(), central_angle(100.0).unwrap());
        let slope = (z100.zeta.ln() - z10.zeta.ln()) / (100f64.ln() - 10f64.ln());
        assert!((-1.1..=-0.9).contains(&slope), "{slope}");
        assert!(small.extrapolation_error >= 0.0);
    }

    #[test]
    fn central_angle_is_even_in_torsion() {
        for tau in [0.3, 2.0] {
            let (a, b) = (central_angle(tau).unwrap(), central_angle(-tau).unwrap());
            assert_abs_diff_eq!(a.zeta, b.zeta, epsilon = 1e-8);
        }
    }

    #[test]
    fn sweep_order_dedupe_and_empty() {
        let out = zeta_sweep(&[0.1, 1.0, 10.0, 1.0]).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out[0].zeta > out[1].zeta && out[1].zeta > out[2].zeta);
        assert!(out.iter().all(|z| z.zeta > 0.0 && z.zeta <= PI));
        assert!(zeta_sweep(&[]).unwrap().is_empty());
        assert!(zeta_sweep(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn limit_locus_is_spherical_and_continuous() {
        let grid: Vec<f64> = (0..20).map(|i| 0.5 + 0.05 * i as f64).collect();
        let locus = limit_point_locus(&grid, &Frame::identity()).unwrap();
        assert_eq!(locus.len(), 20);
        for p in &locus.points {
            assert_abs_diff_eq!(p.norm(), 1.0, epsilon = 1e-6);
        }
        let fine: Vec<f64> = (0..39).map(|i| 0.5 + 0.025 * i as f64).collect();
        let finer = limit_point_locus(&fine, &Frame::identity()).unwrap();
        let coarse_jump = locus.points.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max);
        let fine_jump = finer.points.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max);
        assert!(fine_jump < 0.75 * coarse_jump, "{coarse_jump} {fine_jump}");
    }
}
