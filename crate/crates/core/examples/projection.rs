//! Metric projection of `1` onto `J H^p` and the distance formula
//! `(1 - |J(0)|²)^{1/p}`, checked against the polynomial solver.
//!
//! ```bash
//! cargo run --release --example projection
//! ```

use hardy_opa::function::FunctionSpec;
use hardy_opa::grid::make_grid;
use hardy_opa::opa::{solve_opa, SolverOptions};
use hardy_opa::projection::{distance_formula, project_one};
use num_complex::Complex64;

fn main() -> hardy_opa::Result<()> {
    let grid = make_grid(4096)?;
    let opts = SolverOptions::default().with_grid(4096);
    let j = FunctionSpec::blaschke(vec![
        Complex64::new(0.5, 0.0),
        Complex64::new(-0.5, 0.0),
        Complex64::new(0.0, 0.3),
    ])?;

    println!("{:>4} {:>12} {:>12} {:>12} {:>10}", "p", "formula", "‖1-g*‖", "OPA n=16", "cert");
    for p in [1.5, 2.0, 3.0, 4.0] {
        let proj = project_one(&j, p, &grid)?;
        let opa = solve_opa(&j, 16, p, &opts)?;
        println!(
            "{p:>4} {:>12.9} {:>12.9} {:>12.9} {:>10.1e}",
            distance_formula(&j, p)?,
            proj.residual_norm,
            opa.error,
            proj.certificate
        );
    }
    Ok(())
}
