//! Sweep the central angle ζ(τ) between the two limit points of the
//! spherical constant-torsion curve and estimate c in ζ ≈ c/τ.

use constant_torsion::spherical_ct::zeta_sweep;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid: Vec<f64> = (0..=16).map(|i| 0.01 * 10f64.powf(i as f64 / 4.0)).collect();
    let table = zeta_sweep(&grid)?;
    println!("{:>12} {:>16} {:>12} {:>12}", "tau", "zeta", "err", "tau*zeta");
    for z in &table {
        println!("{:>12.5} {:>16.12} {:>12.2e} {:>12.6}", z.tau, z.zeta, z.extrapolation_error, z.tau * z.zeta);
    }
    let (a, b) = (&table[table.len() - 5], &table[table.len() - 1]);
    println!("log-log slope over [{}, {}]: {:.5}", a.tau, b.tau, (b.zeta / a.zeta).ln() / (b.tau / a.tau).ln());
    Ok(())
}
