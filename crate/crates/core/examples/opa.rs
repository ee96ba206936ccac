//! Optimal polynomial approximants of `1/f` for `f = 1 + z/2`.
//!
//! ```bash
//! cargo run --release --example opa
//! ```

use hardy_opa::function::FunctionSpec;
use hardy_opa::opa::{opa_error_sequence, solve_opa, SolverOptions};
use num_complex::Complex64;

fn main() -> hardy_opa::Result<()> {
    let f = FunctionSpec::polynomial(vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)])?;
    let opts = SolverOptions::default().with_grid(2048);

    // p = 2, degree 0: q = 4/5 and the squared error is 1/5.
    let r = solve_opa(&f, 0, 2.0, &opts)?;
    println!("p=2 n=0: q = {:.12}, error^2 = {:.12}", r.coefficients[0], r.error * r.error);

    for p in [1.5, 2.5, 4.0] {
        println!("p = {p}");
        for entry in opa_error_sequence(&f, p, 8, &opts)? {
            println!("  n = {:2}  error = {:.3e}  certificate = {:.1e}", entry.n, entry.error, entry.certificate);
        }
    }
    Ok(())
}
