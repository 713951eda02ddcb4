//! Torsion bounds for closed constant-torsion curves on the sphere and on
//! ellipsoids, from the largest gap between principal curvatures.

use constant_torsion::analysis::{admits_closed_ct, torsion_bound, SurfaceCurvatureBounds};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sphere = SurfaceCurvatureBounds::sphere(1.0)?;
    println!(
        "unit sphere: μ = {}, bound {}, admits τ = 0.1: {}",
        sphere.mu,
        torsion_bound(&sphere),
        admits_closed_ct(&sphere, 0.1)
    );
    for (a, b, c) in [(1.0, 1.0, 1.2), (1.0, 1.0, 2.0), (2.0, 1.0, 1.5)] {
        let e = SurfaceCurvatureBounds::ellipsoid(a, b, c, 181, 72)?;
        println!(
            "ellipsoid ({a}, {b}, {c}): μ = {:.9}, |τ| < {:.9}, admits τ = 0.1: {}",
            e.mu,
            torsion_bound(&e),
            admits_closed_ct(&e, 0.1)
        );
    }
    Ok(())
}
