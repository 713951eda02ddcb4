//! Build the closed constant-torsion curves of both examples and print their
//! closure and discrete curvature/torsion certificates.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

use constant_torsion::analysis::{estimate_curvature_torsion, geodesic_inflection_count};
use constant_torsion::closure::build_closed_ct_curve;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (m, n, alpha) in [(1, -3, FRAC_PI_4), (2, -3, FRAC_PI_3)] {
        let curve = build_closed_ct_curve(m, n, alpha, 1.0, 16384)?;
        let report = estimate_curvature_torsion(&curve.gamma)?;
        println!("({m}, {n}) epicycle, β = {:.12}", curve.solution.params.beta);
        println!("  closure gap        {:.3e}", curve.report.closure_gap);
        println!("  length             {:.9}", report.length);
        println!("  κ range            [{:.6}, {:.6}]", report.kappa_min, report.kappa_max);
        println!("  τ̂ mean / max dev   {:.9} / {:.3e}", report.tau_mean, report.tau_max_dev);
        println!("  curvature sign changes of γ: {}", report.inflection_count);
        println!("  geodesic inflections of B:   {}", geodesic_inflection_count(&curve.binormal)?);
    }
    Ok(())
}
