//! Root trajectories of the OPAs of `1 + 0.9 z` as the degree grows.
//! Writes the trajectory CSV to stdout.
//!
//! ```bash
//! cargo run --release --example escape > trajectory.csv
//! ```

use hardy_opa::function::FunctionSpec;
use hardy_opa::opa::SolverOptions;
use hardy_opa::roots::{escape_tracker, write_trajectory_csv};
use num_complex::Complex64;

fn main() -> hardy_opa::Result<()> {
    let f = FunctionSpec::polynomial(vec![Complex64::new(1.0, 0.0), Complex64::new(0.9, 0.0)])?;
    let opts = SolverOptions::default().with_grid(2048);
    let rep = escape_tracker(&f, 3.0, 16, &[0.5, 0.9, 0.99], &opts)?;
    for step in &rep.steps {
        eprintln!(
            "n = {:2}: {} in-disk root(s), min modulus {:?}",
            step.degree, step.in_disk_count, step.min_in_disk_modulus
        );
    }
    for r in &rep.radii {
        eprintln!("radius {}: clear of roots from n = {:?}", r.radius, r.escaped_from);
    }
    write_trajectory_csv(&rep.trajectory, std::io::stdout())
}
