//! Identities of curves on spheres and of the Darboux frame along surfaces.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::{curve_estimates, looks_periodic, CurveEstimates};
use crate::darboux::Polyline;
use crate::epicycle::SphericalCurve;
use crate::error::{Error, Result};
use crate::frames::Vec3;
use crate::numerics::{curve_derivatives, fornberg_weights, scalar_derivative_strided, stencil, trapezoid};

/// Unit-sphere inputs must satisfy `|‖p‖ − 1| ≤` this.
pub const SPHERE_NORM_TOL: f64 = 1e-6;
/// Samples with `|τ| < ODE_TORSION_CUTOFF · max|τ|` are excluded from the
/// spherical-curve ODE residual (its correction term is `0/0` there).
pub const ODE_TORSION_CUTOFF: f64 = 3e-2;

/// The residual differentiates estimated curvature and torsion again, so its
/// stencils span about this many spacings over the data.
pub const ODE_STENCIL_SPACINGS: usize = 1024;

fn check_unit_sphere(points: &[Vec3]) -> Result<()> {
    match points.iter().map(|p| (p.norm() - 1.0).abs()).enumerate().find(|(_, d)| *d > SPHERE_NORM_TOL) {
        Some((i, d)) => Err(Error::validation(format!(
            "sample {i} is off the unit sphere by {d:.3e} (tolerance {SPHERE_NORM_TOL:e})"
        ))),
        None => Ok(()),
    }
}

/// Whether every sample lies on the unit sphere within [`SPHERE_NORM_TOL`].
pub fn on_unit_sphere(points: &[Vec3]) -> bool {
    check_unit_sphere(points).is_ok()
}

/// Integer powers checked by [`sphere_identity_residuals`].
pub const IDENTITY_POWERS: [i32; 5] = [-2, -1, 0, 1, 2];

/// Residuals of the closed-spherical-curve identities, keyed `I_n` for
/// `n` in [`IDENTITY_POWERS`], `wong_radius` (`|R − 1|`) and `wong_fit`
/// (largest pointwise residual of the fit).
pub fn sphere_identity_residuals(line: &Polyline) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for (n, v) in integral_identities(line, &IDENTITY_POWERS)? {
        out.insert(format!("I_{n}"), v.abs());
    }
    let wong = check_wong(line)?;
    out.insert("wong_radius".to_string(), (wong.radius - 1.0).abs());
    out.insert("wong_fit".to_string(), wong.max_residual);
    Ok(out)
}

/// Signed geodesic curvature `−det(B, B', B'') / |B'|³` of samples on the
/// unit sphere, taken with respect to the inward normal `−B` (`NaN` at open
/// ends).
///
/// A small circle of geodesic radius `α` traversed clockwise about its
/// centre, as seen from outside the sphere, has `κ_g = cot α`.
pub fn geodesic_curvature(params: &[f64], points: &[Vec3], periodic: bool) -> Result<Vec<f64>> {
    check_unit_sphere(points)?;
    let d = curve_derivatives(params, points, periodic)?;
    Ok((0..points.len())
        .map(|i| if d.valid[i] { -points[i].dot(&d.d1[i].cross(&d.d2[i])) / d.d1[i].norm().powi(3) } else { f64::NAN })
        .collect())
}

/// [`geodesic_curvature`] of a spherical curve.
pub fn geodesic_curvature_sphere(b: &SphericalCurve) -> Result<Vec<f64>> {
    geodesic_curvature(&b.params, &b.points, b.is_closed())
}

/// Sign changes of the geodesic curvature around a spherical curve (cyclically
/// when it closes), ignoring values within the dead band of the maximum.
pub fn geodesic_inflection_count(b: &SphericalCurve) -> Result<usize> {
    let kg = geodesic_curvature_sphere(b)?;
    let closed = b.is_closed();
    let m = if closed { kg.len() - 1 } else { kg.len() };
    let finite: Vec<f64> = kg[..m].iter().copied().filter(|k| k.is_finite()).collect();
    Ok(super::count_sign_changes(&finite, closed))
}

/// Largest pointwise `|κ_g^B − τ κ|`, where `κ_g^B = ⟨B_ss, T⟩` along the
/// arclength of `γ` and `κ` is the signed curvature estimated from `γ`.
///
/// `κ_g^B` is computed from `B` alone: it equals `τ|τ|` times the intrinsic
/// geodesic curvature of [`geodesic_curvature`]. Curvature of `γ` is
/// positive where its estimated binormal points along `−B`, fixed where
/// `|κ̂|` is largest and transported continuously elsewhere.
pub fn check_binormal_curvature(b: &SphericalCurve, gamma: &Polyline, tau: f64) -> Result<f64> {
    if b.len() != gamma.len() {
        return Err(Error::validation(format!(
            "misaligned sampling: {} binormal samples, {} curve samples",
            b.len(),
            gamma.len()
        )));
    }
    let scale = b.params.iter().fold(1.0f64, |m, p| m.max(p.abs()));
    if b.params.iter().zip(&gamma.params).any(|(x, y)| (x - y).abs() > 1e-12 * scale) {
        return Err(Error::validation("misaligned sampling: parameter grids differ"));
    }
    let kg = geodesic_curvature_sphere(b)?;
    let mut est = curve_estimates(&gamma.params, &gamma.points, looks_periodic(gamma))?;
    let j = (0..est.len())
        .filter(|&i| est.kappa[i].is_finite())
        .max_by(|&x, &y| est.kappa[x].abs().total_cmp(&est.kappa[y].abs()))
        .ok_or_else(|| Error::validation("no curvature estimates"))?;
    let opposed = est.binormal[j].dot(&b.points[j]) < 0.0;
    let positive = (est.kappa[j] > 0.0) == opposed;
    super::orient_curvature(&mut est, j, positive);
    let residual = kg
        .iter()
        .zip(&est.kappa)
        .filter(|(g, k)| g.is_finite() && k.is_finite())
        .map(|(g, k)| (tau * tau.abs() * g - tau * k).abs())
        .fold(0.0, f64::max);
    Ok(residual)
}

/// Residual of the spherical-curve equation `τ/κ − (κ'/(κ²τ))' = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct OdeResidual {
    pub max_residual: f64,
    pub evaluated: usize,
    /// Samples skipped near vanishing torsion or curvature, or at open ends.
    pub excluded: usize,
}

/// Discrete residual of the spherical-curve equation on an arclength grid.
///
/// Windows touching samples with near-zero `κ` or `τ` are excluded and
/// counted; it is an error when nothing remains.
pub fn spherical_ode_residual(kappa: &[f64], tau: &[f64], s: &[f64], periodic: bool) -> Result<OdeResidual> {
    if kappa.len() != s.len() || tau.len() != s.len() {
        return Err(Error::validation("κ, τ and s must have equal lengths"));
    }
    let kscale = kappa.iter().fold(0.0f64, |m, k| m.max(k.abs()));
    let tscale = tau.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let stride = (s.len() / ODE_STENCIL_SPACINGS).max(1);
    let (dk, valid) = scalar_derivative_strided(s, kappa, periodic, stride)?;
    let q: Vec<f64> = (0..s.len())
        .map(|i| {
            let small = kappa[i].abs() < 1e-8 * kscale || tau[i].abs() < ODE_TORSION_CUTOFF * tscale;
            if valid[i] && !small {
                dk[i] / (kappa[i] * kappa[i] * tau[i])
            } else {
                f64::NAN
            }
        })
        .collect();
    let (dq, valid_q) = scalar_derivative_strided(s, &q, periodic, stride)?;
    let m = if periodic { s.len() - 1 } else { s.len() };
    let residuals: Vec<f64> =
        (0..m).filter(|&i| valid_q[i] && dq[i].is_finite()).map(|i| (tau[i] / kappa[i] - dq[i]).abs()).collect();
    if residuals.is_empty() {
        return Err(Error::validation("no samples left after excluding near-zero curvature or torsion"));
    }
    Ok(OdeResidual {
        max_residual: residuals.iter().copied().fold(0.0, f64::max),
        evaluated: residuals.len(),
        excluded: m - residuals.len(),
    })
}

fn sphere_estimates(line: &Polyline, need_closed: bool) -> Result<CurveEstimates> {
    let periodic = looks_periodic(line);
    if need_closed && !periodic {
        return Err(Error::validation(format!("curve is open (closure gap {:.3e})", line.closure_gap())));
    }
    curve_estimates(&line.params, &line.points, periodic)
}

/// `I_n = ∫ κⁿ τ ds` over a closed curve on the unit sphere, for each `n`.
pub fn integral_identities(line: &Polyline, ns: &[i32]) -> Result<Vec<(i32, f64)>> {
    check_unit_sphere(&line.points)?;
    let est = sphere_estimates(line, true)?;
    if est.tau.iter().any(|t| !t.is_finite()) {
        return Err(Error::validation("torsion undefined at some samples"));
    }
    Ok(ns
        .iter()
        .map(|&n| {
            let f: Vec<f64> = (0..est.len()).map(|i| est.kappa[i].abs().powi(n) * est.tau[i] * est.speed[i]).collect();
            (n, trapezoid(&est.params, &f))
        })
        .collect())
}

/// Least-squares fit of `(A cos φ + B sin φ) κ = 1` with `φ = ∫ τ ds`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WongFit {
    pub a: f64,
    pub b: f64,
    /// Radius of the sphere the curve lies on, `√(A² + B²)`.
    pub radius: f64,
    pub max_residual: f64,
    pub samples: usize,
}

/// Fits the spherical-curve relation over every sample with defined torsion.
///
/// The phase `φ` starts at the first such sample (the first sample of a
/// closed curve, the fourth of an open one).
pub fn check_wong(line: &Polyline) -> Result<WongFit> {
    let est = sphere_estimates(line, false)?;
    let idx: Vec<usize> = (0..est.distinct()).filter(|&i| est.valid[i]).collect();
    if idx.iter().any(|&i| !est.tau[i].is_finite()) {
        return Err(Error::validation("torsion undefined at some samples; the curve is not spherical"));
    }
    let mut phase = Vec::with_capacity(idx.len());
    let mut acc = 0.0;
    for (k, &i) in idx.iter().enumerate() {
        if k > 0 {
            let p = idx[k - 1];
            acc += 0.5 * (est.tau[i] * est.speed[i] + est.tau[p] * est.speed[p]) * (est.params[i] - est.params[p]);
        }
        phase.push(acc);
    }
    // normal equations for ρ = 1/κ ≈ A cos φ + B sin φ
    let (mut scc, mut scs, mut sss, mut scr, mut ssr) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, &i) in idx.iter().enumerate() {
        let (c, s, rho) = (phase[k].cos(), phase[k].sin(), 1.0 / est.kappa[i].abs());
        scc += c * c;
        scs += c * s;
        sss += s * s;
        scr += c * rho;
        ssr += s * rho;
    }
    let det = scc * sss - scs * scs;
    if det <= 1e-12 * (scc + sss).powi(2) {
        return Err(Error::validation("rank-deficient fit: the torsion phase barely varies"));
    }
    let a = (sss * scr - scs * ssr) / det;
    let b = (scc * ssr - scs * scr) / det;
    let max_residual = idx
        .iter()
        .enumerate()
        .map(|(k, &i)| ((a * phase[k].cos() + b * phase[k].sin()) * est.kappa[i].abs() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(WongFit { a, b, radius: a.hypot(b), max_residual, samples: idx.len() })
}

/// Darboux-frame coefficients of a curve along a surface with normal `ν`.
#[derive(Debug, Clone, Serialize)]
pub struct DarbouxQuantities {
    /// Directed angle from the principal normal to `ν` about the tangent.
    pub phi: Vec<f64>,
    pub kappa_g: Vec<f64>,
    pub kappa_n: Vec<f64>,
    /// Geodesic torsion `τ_g = τ + φ'`.
    pub tau_g: Vec<f64>,
}

fn wrap_angle(x: f64) -> f64 {
    (x + PI).rem_euclid(TAU) - PI
}

/// Geodesic torsion, geodesic and normal curvature along `line` with the
/// per-sample surface normals `normals` (`NaN` where the principal normal is
/// undefined or the stencil leaves the data).
pub fn geodesic_torsion(line: &Polyline, normals: &[Vec3]) -> Result<DarbouxQuantities> {
    if normals.len() != line.len() {
        return Err(Error::validation("one surface normal per sample is required"));
    }
    if let Some(i) = normals.iter().position(|v| (v.norm() - 1.0).abs() > SPHERE_NORM_TOL) {
        return Err(Error::validation(format!("surface normal {i} is not a unit vector")));
    }
    let est = curve_estimates(&line.params, &line.points, looks_periodic(line))?;
    let n = est.len();
    let phi: Vec<f64> = (0..n)
        .map(|i| {
            if est.tau[i].is_finite() {
                let (nn, nu, t) = (est.normal[i], normals[i], est.tangent[i]);
                nn.cross(&nu).dot(&t).atan2(nn.dot(&nu))
            } else {
                f64::NAN
            }
        })
        .collect();
    let mut q = DarbouxQuantities {
        phi: phi.clone(),
        kappa_g: vec![f64::NAN; n],
        kappa_n: vec![f64::NAN; n],
        tau_g: vec![f64::NAN; n],
    };
    for i in (0..n).filter(|&i| phi[i].is_finite()) {
        q.kappa_g[i] = est.kappa[i] * phi[i].sin();
        q.kappa_n[i] = est.kappa[i] * phi[i].cos();
        // angle differences relative to the centre keep a constant φ exactly stationary
        if let Some((idx, nodes)) = stencil(&est.params, i, est.periodic, est.stride) {
            let w = fornberg_weights(est.params[i], &nodes, 1);
            let dphi: f64 = idx.iter().enumerate().map(|(slot, &j)| w[1][slot] * wrap_angle(phi[j] - phi[i])).sum();
            q.tau_g[i] = est.tau[i] + dphi / est.speed[i];
        }
    }
    if est.periodic {
        q.tau_g[n - 1] = q.tau_g[0];
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::solve_beta;
    use crate::darboux::gamma_from_binormal;
    use crate::epicycle::{sample_epicycle, EpicycleParams};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    fn circle(alpha: f64, samples: usize) -> Polyline {
        let params: Vec<f64> = (0..samples).map(|i| TAU * i as f64 / (samples - 1) as f64).collect();
        let points =
            params.iter().map(|&t| Vec3::new(alpha.sin() * t.cos(), alpha.sin() * t.sin(), alpha.cos())).collect();
        Polyline::new(params, points, "circle").unwrap()
    }

    fn example1(samples: usize) -> SphericalCurve {
        let sol = solve_beta(1, -3, FRAC_PI_4, 1e-12).unwrap();
        sample_epicycle(&sol.params, samples).unwrap()
    }

    #[test]
    fn circles_have_constant_geodesic_curvature() {
        let great = circle(PI / 2.0, 1025);
        for k in geodesic_curvature(&great.params, &great.points, true).unwrap() {
            assert_abs_diff_eq!(k, 0.0, epsilon = 1e-8);
        }
        // counter-clockwise about +z seen from outside: curving away from the inward side
        let small = circle(0.4, 1025);
        for k in geodesic_curvature(&small.params, &small.points, true).unwrap() {
            assert_abs_diff_eq!(k, -1.0 / 0.4f64.tan(), epsilon = 1e-6);
        }
    }

    #[test]
    fn off_sphere_input_rejected() {
        let mut c = circle(0.4, 65);
        c.points[5] *= 1.001;
        assert!(geodesic_curvature(&c.params, &c.points, true).is_err());
        assert!(integral_identities(&c, &[0]).is_err());
    }

    #[test]
    fn example1_binormal_has_positive_geodesic_curvature() {
        let b = example1(4096);
        let kg = geodesic_curvature_sphere(&b).unwrap();
        assert!(kg.iter().all(|k| *k > 0.0));
        assert_eq!(geodesic_inflection_count(&b).unwrap(), 0);
    }

    #[test]
    fn example2_binormal_has_six_inflections() {
        let sol = solve_beta(2, -3, std::f64::consts::FRAC_PI_3, 1e-12).unwrap();
        for samples in [4096, 16384] {
            let b = sample_epicycle(&sol.params, samples).unwrap();
            assert_eq!(geodesic_inflection_count(&b).unwrap(), 6);
        }
    }

    #[test]
    fn binormal_curvature_identity_on_example1_and_its_mirror() {
        let b = example1(16384);
        for tau in [1.0, -1.0, 2.5] {
            let gamma = gamma_from_binormal(&b, tau).unwrap();
            let r = check_binormal_curvature(&b, &gamma, tau).unwrap();
            assert!(r < 1e-4 * tau * tau, "τ = {tau}: {r}");
        }
        let gamma = gamma_from_binormal(&b, 1.0).unwrap();
        // a binormal that did not generate γ breaks the relation
        let other = sample_epicycle(&EpicycleParams::new(1, -3, FRAC_PI_4, 0.3).unwrap(), 16384).unwrap();
        assert!(check_binormal_curvature(&other, &gamma, 1.0).unwrap() > 0.1);
        let short = sample_epicycle(&b.source.unwrap(), 2048).unwrap();
        assert!(check_binormal_curvature(&short, &gamma, 1.0).is_err());
    }

    #[test]
    fn ode_residual_vanishes_for_secant_curvature() {
        let tau = 0.5;
        let s: Vec<f64> = (0..2001).map(|i| -2.5 + i as f64 * 0.0025).collect();
        let k: Vec<f64> = s.iter().map(|x| 1.0 / (tau * x).cos()).collect();
        let t = vec![tau; s.len()];
        let r = spherical_ode_residual(&k, &t, &s, false).unwrap();
        assert!(r.max_residual < 1e-6, "{}", r.max_residual);
        assert_eq!(r.excluded, 12);
    }

    #[test]
    fn ode_residual_of_helix_is_one() {
        let s: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        let ones = vec![1.0; s.len()];
        let r = spherical_ode_residual(&ones, &ones, &s, false).unwrap();
        assert_abs_diff_eq!(r.max_residual, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ode_residual_on_example1_binormal() {
        let b = example1(16384);
        let line = Polyline::new(b.params.clone(), b.points.clone(), "B").unwrap();
        let est = curve_estimates(&line.params, &line.points, true).unwrap();
        let k: Vec<f64> = est.kappa.iter().map(|k| k.abs()).collect();
        let r = spherical_ode_residual(&k, &est.tau, &est.arclength, true).unwrap();
        assert!(r.max_residual < 1e-3, "{r:?}");
        assert!(r.evaluated > 14_000);
    }

    #[test]
    fn integral_identities_on_example1_binormal() {
        let b = example1(16384);
        let line = Polyline::new(b.params.clone(), b.points.clone(), "B").unwrap();
        for (n, v) in integral_identities(&line, &[-2, -1, 0, 1, 2]).unwrap() {
            assert!(v.abs() < 1e-5, "I_{n} = {v}");
        }
    }

    #[test]
    fn planar_circle_identities_vanish_exactly() {
        let params: Vec<f64> = (0..257).map(|i| TAU * i as f64 / 256.0).collect();
        let points = params.iter().map(|&t| Vec3::new(t.cos(), t.sin(), 0.0)).collect();
        let c = Polyline::new(params, points, "equator").unwrap();
        for (_, v) in integral_identities(&c, &[-1, 0, 3]).unwrap() {
            assert_eq!(v, 0.0);
        }
        let open = Polyline::new(c.params[..100].to_vec(), c.points[..100].to_vec(), "arc").unwrap();
        assert!(integral_identities(&open, &[0]).is_err());
    }

    #[test]
    fn wong_radius_of_example1_binormal() {
        let b = example1(16384);
        let fit = check_wong(&Polyline::new(b.params, b.points, "B").unwrap()).unwrap();
        assert_abs_diff_eq!(fit.radius, 1.0, epsilon = 1e-4);
    }

    #[test]
    fn wong_fit_recovers_scaled_sphere_and_rejects_circles() {
        let b = example1(8192);
        let scaled: Vec<Vec3> = b.points.iter().map(|p| p * 3.0).collect();
        let fit = check_wong(&Polyline::new(b.params.clone(), scaled, "3B").unwrap()).unwrap();
        assert_abs_diff_eq!(fit.radius, 3.0, epsilon = 1e-3);
        assert!(check_wong(&circle(0.7, 513)).is_err());
    }

    #[test]
    fn sphere_curves_have_no_geodesic_torsion() {
        let b = example1(8192);
        let line = Polyline::new(b.params.clone(), b.points.clone(), "B").unwrap();
        let q = geodesic_torsion(&line, &b.points).unwrap();
        for i in 0..line.len() {
            assert_abs_diff_eq!(q.tau_g[i], 0.0, epsilon = 1e-5);
            assert_abs_diff_eq!(q.kappa_n[i], -1.0, epsilon = 1e-6);
        }
        let est = curve_estimates(&line.params, &line.points, true).unwrap();
        let f: Vec<f64> = (0..line.len()).map(|i| q.tau_g[i] * est.speed[i]).collect();
        assert_abs_diff_eq!(trapezoid(&line.params, &f), 0.0, epsilon = 1e-6);
        // geodesic curvature agrees with the intrinsic estimator
        let kg = geodesic_curvature_sphere(&b).unwrap();
        for i in (0..line.len()).step_by(97) {
            // outward normals: the opposite sign of the inward convention
            assert_abs_diff_eq!(q.kappa_g[i], -kg[i], epsilon = 1e-6);
        }
    }

    #[test]
    fn plane_curve_with_constant_normal_has_zero_geodesic_torsion() {
        let params: Vec<f64> = (0..200).map(|i| i as f64 * 0.03).collect();
        let points: Vec<Vec3> = params.iter().map(|&t| Vec3::new(t, (2.0 * t).sin(), 0.0)).collect();
        let line = Polyline::new(params, points, "wave").unwrap();
        let q = geodesic_torsion(&line, &vec![Vec3::z(); line.len()]).unwrap();
        assert!(q.tau_g.iter().filter(|t| t.is_finite()).all(|t| *t == 0.0));
        assert!(q.tau_g.iter().filter(|t| t.is_finite()).count() > 150);
    }

    #[test]
    fn epicycle_example_params_are_unit() {
        let p = EpicycleParams::new(2, -3, PI / 3.0, 1.1832).unwrap();
        let b = sample_epicycle(&p, 512).unwrap();
        check_unit_sphere(&b.points).unwrap();
    }
}
