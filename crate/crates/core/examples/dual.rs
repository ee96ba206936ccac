//! The dual extremal problem `sup |L(g)|` over the unit ball of `H^q`.
//!
//! ```bash
//! cargo run --release --example dual
//! ```

use hardy_opa::dual::{dual_sup, single_zero_extremal, two_factor_gap, DualProblem, DEFAULT_SEARCH_DEGREE};
use hardy_opa::grid::make_grid;
use hardy_opa::opa::SolverOptions;
use num_complex::Complex64;

fn main() -> hardy_opa::Result<()> {
    let opts = SolverOptions::default().with_grid(4096);
    let a = Complex64::new(0.5, 0.0);

    for q in [1.5, 2.0, 3.0] {
        let prob = DualProblem::new(vec![a], q, DEFAULT_SEARCH_DEGREE)?;
        let r = dual_sup(&prob, &opts)?;
        let g = single_zero_extremal(a, q, &make_grid(4096)?)?;
        println!(
            "q = {q}: sup ≈ {:.9}, exact {:.9}, closed-form extremal attains {:.9}",
            r.value,
            r.exact,
            prob.functional(&g)?.norm()
        );
    }

    let gap = two_factor_gap(a, Complex64::new(0.6, 0.0), 2.0, DEFAULT_SEARCH_DEGREE, &opts)?;
    println!(
        "zeros {{0.5, 0.6}}, q = 2: lhs {:.6} < rhs {:.6} (estimate {:.6}), holds = {}",
        gap.lhs, gap.rhs_exact, gap.rhs_estimate, gap.holds
    );
    Ok(())
}
