//! Solve for the closing cone angle β of both published epicycle examples
//! and compare with their exact radicals.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, SQRT_2};

use constant_torsion::closure::{solve_beta, CLOSED_FORM_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        (1, -3, FRAC_PI_4, 0.5 * ((67.0 - 24.0 * SQRT_2) / 71.0).acos()),
        (2, -3, FRAC_PI_3, 0.5 * (-5.0f64 / 7.0).acos()),
    ];
    for (m, n, alpha, exact) in cases {
        let sol = solve_beta(m, n, alpha, CLOSED_FORM_TOL)?;
        println!(
            "(m, n) = ({m}, {n}), α = {alpha:.10}: β = {:.12} (exact {exact:.12}, |Δ| = {:.1e}), residual {:.1e}, {} iterations",
            sol.params.beta,
            (sol.params.beta - exact).abs(),
            sol.residual,
            sol.iterations
        );
    }
    Ok(())
}
