//! Write the example-1 curve as CSV (with invariants), OBJ and a JSON
//! closure report into a directory (default: the system temp directory).

use std::f64::consts::FRAC_PI_4;
use std::path::PathBuf;

use constant_torsion::analysis::{estimate_curvature_torsion, geodesic_curvature_sphere};
use constant_torsion::closure::build_closed_ct_curve;
use constant_torsion::darboux::SampleInvariants;
use constant_torsion::io::{read_curve_csv, write_curve_csv, write_json, write_obj};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let curve = build_closed_ct_curve(1, -3, FRAC_PI_4, 1.0, 4096)?;
    let mut gamma = curve.gamma.clone();
    let est = estimate_curvature_torsion(&gamma)?.estimates;
    let kg = geodesic_curvature_sphere(&curve.binormal)?;
    gamma.invariants = Some(
        (0..gamma.len()).map(|i| SampleInvariants { kappa: est.kappa[i], tau: est.tau[i], kappa_g: kg[i] }).collect(),
    );
    let (csv, obj, json) = (dir.join("example1.csv"), dir.join("example1.obj"), dir.join("example1_closure.json"));
    write_curve_csv(&csv, &gamma)?;
    write_obj(&obj, &gamma.points, true)?;
    write_json(&json, &curve.report)?;
    let back = read_curve_csv(&csv)?;
    println!("wrote {}, {}, {}", csv.display(), obj.display(), json.display());
    println!("CSV round trip exact: {}", back.points == gamma.points && back.params == gamma.params);
    Ok(())
}
