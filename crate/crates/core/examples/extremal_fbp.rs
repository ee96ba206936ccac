//! Explicit extremal for a finite Blaschke product with a double zero at 1/2.
//!
//! `(1 - conj(J(0)) J)^{2/p}` is a polynomial multiple of `1/(1 - w z)` type
//! factors; here `c = 15/16` and the single outer root sits at `w = 4/5`.
//!
//! ```bash
//! cargo run --release --example extremal_fbp
//! ```

use hardy_opa::grid::make_grid;
use hardy_opa::projection::{finite_blaschke_extremal, spicyham_check};
use num_complex::Complex64;

fn main() -> hardy_opa::Result<()> {
    let grid = make_grid(4096)?;
    let zeros = [Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)];
    for p in [1.5, 2.0, 3.0] {
        let r = finite_blaschke_extremal(&zeros, p, &grid)?;
        println!("p = {p}");
        println!("  c = {:.15}, d = {}, w = {:?}", r.c, r.d, r.w);
        println!("  consistency residual {:.1e}", r.max_consistency_residual());
        println!("  identity residual    {:.1e}", r.identity_residual);
        println!("  orthogonality (n ≤ 20) {:.1e}", spicyham_check(&r, 20)?);
    }
    Ok(())
}
