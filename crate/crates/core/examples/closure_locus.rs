//! Trace the closure locus β(α) of the (1, −3) epicycle, showing where the
//! closing root disappears.

use constant_torsion::closure::closure_locus;

fn main() {
    let alphas: Vec<f64> = (1..=30).map(|i| 0.05 * i as f64).collect();
    for p in closure_locus(1, -3, &alphas) {
        match (&p.solution, &p.failure) {
            (Some(sol), _) => {
                println!("α = {:.3}  β = {:.9}  continuous = {}", p.alpha, sol.params.beta, p.continuous_with_previous)
            }
            (None, Some(why)) => println!("α = {:.3}  no root: {why}", p.alpha),
            (None, None) => unreachable!(),
        }
    }
}
