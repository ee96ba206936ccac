//! Distances to the invariant subspaces of truncated Blaschke products, and
//! the family with an `n`-fold zero at `1 - 1/n`.
//!
//! ```bash
//! cargo run --release --example truncation
//! ```

use hardy_opa::projection::{multiple_zero_family, truncation_distance_experiment};
use num_complex::Complex64;

fn main() -> hardy_opa::Result<()> {
    let p = 3.0;
    let rep = truncation_distance_experiment(|k| Complex64::new(1.0 - 0.5f64.powi(k as i32), 0.0), p, &[0, 1, 2, 4, 8, 16])?;
    for row in &rep.rows {
        println!("n = {:2}  |B_n(0)| = {:.6}  distance = {:.6}", row.n, row.j_at_zero_modulus, row.distance);
    }
    println!("nondecreasing in n: {}", rep.monotone);

    let fam = multiple_zero_family(p, &[2, 4, 8, 16, 64, 256])?;
    for row in &fam.rows {
        println!("(1-1/n)^n, n = {:3}: |B_n(0)| = {:.6}  distance = {:.6}", row.n, row.j_at_zero_modulus, row.distance);
    }
    println!("|B_n(0)| decreasing: {}  (limit 1/e = {:.6})", fam.decreasing_at_origin, fam.limit_at_origin);
    Ok(())
}
