//! Integrate the Frenet equations for κ = τ = 1, recover the helix, and
//! round-trip a closed constant-torsion curve through its estimated κ and τ.

use std::f64::consts::FRAC_PI_4;

use constant_torsion::analysis::{curve_estimates, fit_helix};
use constant_torsion::closure::build_closed_ct_curve;
use constant_torsion::frenet::{frenet_to_darboux_gauge, integrate_frenet, FramedCurveState, FrenetCoefficients};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let helix = integrate_frenet(&FrenetCoefficients::constant(1.0, 1.0, 40.0)?, &FramedCurveState::standard(), 8192)?;
    let fit = fit_helix(&helix.points)?;
    println!("helix κ = τ = 1: radius {:.9}, rise per radian {:.9}", fit.radius, fit.pitch);

    let curve = build_closed_ct_curve(1, -3, FRAC_PI_4, 1.0, 16384)?;
    let est = curve_estimates(&curve.gamma.params, &curve.gamma.points, true)?;
    let kappa: Vec<f64> = est.kappa.iter().map(|k| k.abs()).collect();
    let tau: Vec<f64> = est.tau.clone();
    let coeffs = FrenetCoefficients::from_samples(&est.arclength, &kappa, &tau)?;
    let start = curve.gamma.points[0];
    let frame = constant_torsion::frames::Frame::from_columns(est.tangent[0], est.normal[0], est.binormal[0], 1e-6)?;
    let again = integrate_frenet(&coeffs, &FramedCurveState::new(0.0, start, frame), 8192)?;
    println!("reintegrated example 1: closure gap {:.3e} over length {:.6}", again.closure_gap(), coeffs.length);
    let g = frenet_to_darboux_gauge(0.3);
    println!("Frenet → Darboux gauge for φ = 0.3:\n{}", g.matrix());
    Ok(())
}
