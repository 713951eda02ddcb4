//! Check the identities tying the binormal indicatrix to the curve it
//! generates, and the closed-spherical-curve identities of the indicatrix.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

use constant_torsion::analysis::{
    check_binormal_curvature, curve_estimates, sphere_identity_residuals, spherical_ode_residual,
};
use constant_torsion::closure::build_closed_ct_curve;
use constant_torsion::darboux::Polyline;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (m, n, alpha) in [(1, -3, FRAC_PI_4), (2, -3, FRAC_PI_3)] {
        for tau in [1.0, -2.0] {
            let curve = build_closed_ct_curve(m, n, alpha, tau, 16384)?;
            let prop = check_binormal_curvature(&curve.binormal, &curve.gamma, tau)?;
            println!("({m}, {n}) τ = {tau}: max |κ_g(B) − τκ(γ)| = {prop:.3e}");
        }
        let curve = build_closed_ct_curve(m, n, alpha, 1.0, 16384)?;
        let b = Polyline::new(curve.binormal.params.clone(), curve.binormal.points.clone(), "B")?;
        for (key, value) in sphere_identity_residuals(&b)? {
            println!("  {key:<12} {value:.3e}");
        }
        let est = curve_estimates(&b.params, &b.points, true)?;
        let kappa: Vec<f64> = est.kappa.iter().map(|k| k.abs()).collect();
        let ode = spherical_ode_residual(&kappa, &est.tau, &est.arclength, true)?;
        println!(
            "  spherical ODE residual {:.3e} over {} samples ({} excluded near τ = 0)",
            ode.max_residual, ode.evaluated, ode.excluded
        );
    }
    Ok(())
}
