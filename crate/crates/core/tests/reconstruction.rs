//! Curves rebuilt from their own estimated curvature and torsion.

use std::f64::consts::{FRAC_PI_4, PI};

use constant_torsion::analysis::{curve_estimates, fit_helix};
use constant_torsion::closure::build_closed_ct_curve;
use constant_torsion::frames::{Frame, Vec3};
use constant_torsion::frenet::{integrate_frenet, FramedCurveState, FrenetCoefficients};

fn point_segment_distance(x: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let ab = b - a;
    let t = ((x - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (x - (a + ab * t)).norm()
}

/// Symmetric Hausdorff distance between two polylines (vertices of each
/// against the segments of the other).
fn hausdorff(a: &[Vec3], b: &[Vec3]) -> f64 {
    let directed = |p: &[Vec3], q: &[Vec3]| {
        p.iter()
            .map(|x| q.windows(2).map(|w| point_segment_distance(x, &w[0], &w[1])).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

#[test]
fn example1_reintegrates_from_estimated_invariants() {
    let curve = build_closed_ct_curve(1, -3, FRAC_PI_4, 1.0, 16384).unwrap();
    let gamma = &curve.gamma;
    let est = curve_estimates(&gamma.params, &gamma.points, true).unwrap();
    // example 1 has positive curvature, so |κ̂| is the Frenet curvature
    let kappa: Vec<f64> = est.kappa.iter().map(|k| k.abs()).collect();
    assert!(est.tau.iter().all(|t| t.is_finite()));
    let coeffs = FrenetCoefficients::from_samples(&est.arclength, &kappa, &est.tau).unwrap();
    let frame = Frame::from_columns(est.tangent[0], est.normal[0], est.binormal[0], 1e-9).unwrap();
    let rebuilt = integrate_frenet(&coeffs, &FramedCurveState::new(0.0, gamma.points[0], frame), 8192).unwrap();
    let d = hausdorff(&rebuilt.points, &gamma.points);
    assert!(d < 1e-4, "Hausdorff distance {d:e}");
    assert!(rebuilt.closure_gap() < 1e-4);
}

#[test]
fn helix_from_constant_invariants() {
    let line = integrate_frenet(
        &FrenetCoefficients::constant(1.0, 1.0, 8.0 * PI).unwrap(),
        &FramedCurveState::standard(),
        8192,
    )
    .unwrap();
    let fit = fit_helix(&line.points).unwrap();
    assert!((fit.radius - 0.5).abs() < 1e-5, "{fit:?}");
    assert!((fit.pitch - 0.5).abs() < 1e-5, "{fit:?}");
    // the axis of the standard start is along T + B = (1, 0, 1)/√2
    assert!((fit.axis.dot(&Vec3::new(1.0, 0.0, 1.0).normalize()).abs() - 1.0).abs() < 1e-9);
    assert!(line.frames.unwrap().iter().all(|f| f.orthonormality_defect() < 1e-9));
}

#[test]
fn helix_with_other_invariants() {
    // radius κ/(κ²+τ²), rise per radian τ/(κ²+τ²)
    for (k, t) in [(2.0, 0.5), (0.5, -1.5)] {
        let line =
            integrate_frenet(&FrenetCoefficients::constant(k, t, 30.0).unwrap(), &FramedCurveState::standard(), 8192)
                .unwrap();
        let fit = fit_helix(&line.points).unwrap();
        let d = k * k + t * t;
        assert!((fit.radius - k / d).abs() < 1e-6, "{fit:?}");
        assert!((fit.pitch - t.abs() / d).abs() < 1e-6, "{fit:?}");
    }
}
