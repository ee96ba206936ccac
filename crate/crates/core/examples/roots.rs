//! Roots of an OPA together with every lower bound that applies.
//!
//! ```bash
//! cargo run --release --example roots
//! ```

use hardy_opa::function::FunctionSpec;
use hardy_opa::grid::make_grid;
use hardy_opa::opa::{solve_opa, SolverOptions};
use hardy_opa::roots::{lemma_0opa_bound, root_report};
use num_complex::Complex64;

fn main() -> hardy_opa::Result<()> {
    let grid = make_grid(4096)?;
    let opts = SolverOptions::default().with_grid(4096);
    let f = FunctionSpec::blaschke(vec![Complex64::new(0.6, 0.2)])?
        .with_outer(vec![Complex64::new(1.0, 0.0), Complex64::new(0.4, 0.0)])?;

    for p in [1.5, 2.0, 3.0] {
        let opa = solve_opa(&f, 6, p, &opts)?;
        let rep = root_report(&f, &opa, p, &grid)?;
        println!("p = {p}, error = {:.6}", opa.error);
        for z in &rep.roots {
            println!("  root {z:.6}  |z| = {:.6}", z.norm());
        }
        for b in &rep.bounds {
            println!("  {:<10} {:.6} ≥ {:.6}  {}", b.name, b.lhs, b.rhs, if b.satisfied { "ok" } else { "VIOLATED" });
        }
    }

    let one_plus = FunctionSpec::polynomial(vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)])?;
    let lemma = lemma_0opa_bound(&one_plus, 3.0, &grid)?;
    let e = solve_opa(&one_plus, 0, 3.0, &opts)?.error.powf(lemma.r);
    println!("degree-zero bound, p = 3: error^r = {e:.6} ≤ {:.6}", lemma.bound_on_error_to_the_r.unwrap_or(f64::NAN));
    Ok(())
}
