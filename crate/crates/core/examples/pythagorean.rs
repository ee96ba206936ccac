//! Pythagorean inequalities for `1 ⊥ g` with `g` vanishing at the origin.
//!
//! ```bash
//! cargo run --release --example pythagorean
//! ```

use hardy_opa::grid::{make_grid, BoundarySamples};
use hardy_opa::orthogonality::{bj_residual, pythagorean_report};
use num_complex::Complex64;

fn main() -> hardy_opa::Result<()> {
    let grid = make_grid(2048)?;
    let one = BoundarySamples::constant(&grid, Complex64::new(1.0, 0.0));
    let g = BoundarySamples::from_fn(&grid, |z| z * (Complex64::new(0.8, -0.3) + 0.5 * z * z));

    for p in [1.25, 1.5, 2.0, 3.0, 6.0] {
        let rep = pythagorean_report(&one, &g, p, 1e-10)?;
        println!("p = {p}: residual {:.1e}", bj_residual(&one, &g, p)?);
        for chk in &rep.inequalities {
            println!("  {:<7} {:.6} vs {:.6}  holds = {}", chk.name, chk.lhs, chk.rhs, chk.holds);
        }
    }
    Ok(())
}
