//! Signed area and turning number of planar epicycles, the flat model of
//! the closure condition.

use constant_torsion::epicycle::{planar_signed_area, planar_turning_number, PlanarEpicycleParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (a, b) in [(1.0, 0.2), (1.0, 1.0 / 2f64.sqrt()), (1.0, 0.9)] {
        let p = PlanarEpicycleParams::new(a, b)?;
        println!(
            "a = {a}, b = {b:.6}: signed area {:+.9}, turning number {}",
            planar_signed_area(&p),
            planar_turning_number(&p)?
        );
    }
    Ok(())
}
