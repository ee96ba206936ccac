//! Compares `‖1 - J f‖_p` with the best constant multiple `min_c ‖1 - c f‖_p`
//! over single-zero inner functions `J`. A negative margin is flagged.
//!
//! ```bash
//! cargo run --release --example conjecture_scan
//! ```

use hardy_opa::function::FunctionSpec;
use hardy_opa::opa::{conjecture_scan, SolverOptions};
use num_complex::Complex64;

fn main() -> hardy_opa::Result<()> {
    let f = FunctionSpec::polynomial(vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.3)])?;
    let family = (0..8)
        .map(|k| FunctionSpec::blaschke(vec![Complex64::from_polar(0.7, k as f64 * std::f64::consts::FRAC_PI_4)]))
        .collect::<hardy_opa::Result<Vec<_>>>()?;
    let opts = SolverOptions::default().with_grid(2048);
    for p in [1.5, 2.0, 3.0] {
        println!("p = {p}");
        for e in conjecture_scan(&f, &family, p, &opts)? {
            println!(
                "  J{}: lhs {:.6}  min over C {:.6}  min over T {:.6}  margin {:+.3e}{}",
                e.index,
                e.lhs,
                e.rhs,
                e.rhs_unimodular,
                e.margin,
                if e.counterexample { "  COUNTEREXAMPLE" } else { "" }
            );
        }
    }
    Ok(())
}
