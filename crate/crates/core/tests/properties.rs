use hardy_opa::dual::{residue_sum, DualProblem};
use hardy_opa::function::{fractional_power, truncate_blaschke, FunctionSpec};
use hardy_opa::grid::{cauchy_functional, fourier_coefficient, lp_norm, make_grid, BoundarySamples, Grid};
use hardy_opa::opa::{opa_error_sequence, solve_opa, solve_opa_from, solve_opa_p2, SolverOptions};
use hardy_opa::orthogonality::{bj_pairing, bj_residual, power_dual, pythagorean_report};
use hardy_opa::projection::{distance_formula, project_one};
use hardy_opa::roots::{bound_p_less_2, check_product_bound, poly_roots, reconstruction_residual};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn grid(n: usize) -> Grid {
    make_grid(n).unwrap()
}

fn complex_in(r: f64) -> impl Strategy<Value = Complex64> {
    (-r..r, -r..r).prop_map(|(a, b)| c(a, b))
}

fn disk_point(min: f64, max: f64) -> impl Strategy<Value = Complex64> {
    (min..max, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn zero_set(max_len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(disk_point(0.05, 0.9), 1..=max_len)
}

fn exponent() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0])
}

/// `1 + small perturbation`: zero-free in the closed disk, so outer.
fn outer_poly(max_deg: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(complex_in(0.3), 0..=max_deg).prop_map(|mut tail| {
        tail.insert(0, c(1.0, 0.0));
        tail
    })
}

fn polynomial_samples(grid: &Grid, coeffs: &[Complex64], shift: i64) -> BoundarySamples {
    BoundarySamples::from_fn(grid, |z| {
        let head = coeffs.iter().rev().fold(c(0.0, 0.0), |acc, &a| acc * z + a);
        head * z.powi(shift as i32)
    })
}

fn opts(n: usize) -> SolverOptions {
    SolverOptions::default().with_grid(n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parseval_on_trigonometric_polynomials(
        coeffs in prop::collection::vec(complex_in(1.0), 1..40),
        low in -40i64..0,
    ) {
        let g = grid(128);
        let f = polynomial_samples(&g, &coeffs, low);
        let parseval = coeffs.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!((lp_norm(&f, 2.0) - parseval).abs() <= 1e-12 * parseval.max(1.0));
    }

    #[test]
    fn cauchy_functional_is_coefficient_minus_one(
        a in prop::collection::vec(complex_in(1.0), 1..8),
        b in prop::collection::vec(complex_in(1.0), 1..8),
    ) {
        let g = grid(64);
        let x = polynomial_samples(&g, &a, 0);
        let psi = polynomial_samples(&g, &b, -3);
        let lhs = cauchy_functional(&x, &psi).unwrap();
        let rhs = fourier_coefficient(&x.mul(&psi).unwrap(), -1).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn lp_norm_is_homogeneous(coeffs in prop::collection::vec(complex_in(1.0), 1..6), s in complex_in(3.0), p in exponent()) {
        let g = grid(256);
        let f = polynomial_samples(&g, &coeffs, 0);
        let lhs = lp_norm(&f.scale(s), p);
        let rhs = s.norm() * lp_norm(&f, p);
        prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs.max(1e-300));
    }

    #[test]
    fn inner_parts_are_unimodular(zeros in zero_set(5), mass in 0.0..2.0f64, t in 0.0..std::f64::consts::TAU) {
        let g = grid(512);
        let mut f = FunctionSpec::blaschke(zeros).unwrap();
        if mass > 0.0 {
            f = f.times(&FunctionSpec::atom(mass, Complex64::from_polar(1.0, t)).unwrap());
        }
        let s = f.sample(&g).unwrap();
        let worst = s.values().iter().map(|v| (v.norm() - 1.0).abs()).fold(0.0, f64::max);
        prop_assert!(worst <= 1e-10, "{}", worst);
    }

    #[test]
    fn fractional_powers_compose(a in disk_point(0.0, 0.9), s in 0.1..0.9f64, t in 0.1..0.9f64) {
        // 1 - conj(a) z has positive real part on the closed disk
        let g = grid(256);
        let base = BoundarySamples::from_fn(&g, |z| 1.0 - a.conj() * z);
        let one = c(1.0, 0.0);
        let inner = fractional_power(&base, one, t).unwrap();
        let twice = fractional_power(&inner, one, s).unwrap();
        let direct = fractional_power(&base, one, s * t).unwrap();
        prop_assert!(twice.sub(&direct).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn truncation_modulus_is_product(zeros in zero_set(8), n in 0usize..8) {
        let n = n.min(zeros.len());
        let b = truncate_blaschke(zeros.iter().copied(), n).unwrap();
        let prod: f64 = zeros[..n].iter().map(|a| a.norm()).product();
        prop_assert!((b.at_zero().norm() - prod).abs() <= 1e-15);
    }

    #[test]
    fn pairing_is_linear_in_second_argument(
        f in prop::collection::vec(complex_in(1.0), 1..5),
        g1 in prop::collection::vec(complex_in(1.0), 1..5),
        g2 in prop::collection::vec(complex_in(1.0), 1..5),
        al in complex_in(2.0),
        be in complex_in(2.0),
        p in exponent(),
    ) {
        let g = grid(256);
        let f = polynomial_samples(&g, &f, 0);
        let x = polynomial_samples(&g, &g1, 0);
        let y = polynomial_samples(&g, &g2, 0);
        let combo = x.scale(al).add(&y.scale(be)).unwrap();
        let lhs = bj_pairing(&f, &combo, p).unwrap();
        let rhs = al * bj_pairing(&f, &x, p).unwrap() + be * bj_pairing(&f, &y, p).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        let r = bj_residual(&f, &combo, p).unwrap();
        let bound = al.norm() * bj_residual(&f, &x, p).unwrap() + be.norm() * bj_residual(&f, &y, p).unwrap();
        prop_assert!(r <= bound + 1e-12 * (1.0 + bound));
    }

    #[test]
    fn orthogonality_means_no_descent(
        tail in prop::collection::vec(complex_in(1.0), 1..5),
        p in exponent(),
    ) {
        let g = grid(256);
        let one = BoundarySamples::constant(&g, c(1.0, 0.0));
        let h = polynomial_samples(&g, &tail, 1);
        prop_assume!(bj_residual(&one, &h, p).unwrap() <= 1e-12);
        for t in [1.0, -1.0, 0.5, -0.5, 0.1, -0.1] {
            let moved = one.add(&h.scale(c(t, 0.0))).unwrap();
            prop_assert!(lp_norm(&moved, p) >= 1.0 - 1e-8);
        }
    }

    #[test]
    fn power_dual_norm_identity(coeffs in prop::collection::vec(complex_in(1.0), 1..6), p in exponent()) {
        let g = grid(512);
        let f = polynomial_samples(&g, &coeffs, 0);
        let q = p / (p - 1.0);
        let lhs = lp_norm(&power_dual(&f, p - 1.0), q);
        let rhs = lp_norm(&f, p).powf(p - 1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0));
    }

    #[test]
    fn pythagorean_inequalities_hold(tail in prop::collection::vec(complex_in(1.5), 1..5), p in exponent()) {
        let g = grid(512);
        let one = BoundarySamples::constant(&g, c(1.0, 0.0));
        let h = polynomial_samples(&g, &tail, 1);
        let rep = pythagorean_report(&one, &h, p, 1e-10).unwrap();
        prop_assert!(rep.orthogonal);
        prop_assert!(rep.all_hold(), "{:?}", rep);
    }

    #[test]
    fn strict_nesting(z1 in zero_set(3), z2 in zero_set(3), p in exponent()) {
        let j1 = FunctionSpec::blaschke(z1).unwrap();
        let j2 = FunctionSpec::blaschke(z2).unwrap();
        let j12 = j1.times(&j2);
        let margin = j1.inner_at_zero().norm_sqr() * (1.0 - j2.inner_at_zero().norm_sqr());
        prop_assert!(margin > 0.0);
        prop_assert!(distance_formula(&j12, p).unwrap() > distance_formula(&j1, p).unwrap());
    }

    #[test]
    fn p2_projection_is_scaled_inner(zeros in zero_set(4)) {
        let g = grid(1024);
        let f = FunctionSpec::blaschke(zeros).unwrap();
        let proj = project_one(&f, 2.0, &g).unwrap();
        let j = f.sample(&g).unwrap().scale(f.inner_at_zero().conj());
        prop_assert!(proj.gstar.sub(&j).unwrap().max_abs() <= 1e-10);
    }

    #[test]
    fn residue_sum_matches_contour(
        zeros in prop::collection::hash_set((1u32..9, 0u32..16), 1..4),
        coeffs in prop::collection::vec(complex_in(1.0), 1..=11),
        q in prop::sample::select(vec![1.5, 2.0, 3.0]),
    ) {
        // distinct zeros on a polar lattice keep the residue denominators tame
        let zeros: Vec<Complex64> = zeros
            .into_iter()
            .map(|(r, t)| Complex64::from_polar(r as f64 * 0.1, t as f64 * std::f64::consts::TAU / 16.0))
            .collect();
        let n = zeros.len();
        let prob = DualProblem::new(zeros, q, 24).unwrap();
        let g = grid(1024);
        let contour = prob.functional(&polynomial_samples(&g, &coeffs, 0)).unwrap();
        let residue = residue_sum(&prob, &FunctionSpec::polynomial(coeffs).unwrap()).unwrap();
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        prop_assert!((residue * sign - contour).norm() <= 1e-9, "{} vs {}", residue, contour);
        prop_assert!((residue.norm() - contour.norm()).abs() <= 1e-9);
    }

    #[test]
    fn root_reconstruction(coeffs in prop::collection::vec(complex_in(1.0), 2..=41)) {
        prop_assume!(coeffs.last().unwrap().norm() > 1e-3);
        let roots = poly_roots(&coeffs).unwrap();
        prop_assert_eq!(roots.len(), coeffs.len() - 1);
        let r = reconstruction_residual(&coeffs, &roots);
        prop_assert!(r <= 1e-8, "{}", r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn opa_error_is_monotone(zeros in zero_set(2), outer in outer_poly(2), p in exponent()) {
        let f = FunctionSpec::blaschke(zeros).unwrap().with_outer(outer).unwrap();
        let seq = opa_error_sequence(&f, p, 6, &opts(1024)).unwrap();
        for w in seq.windows(2) {
            prop_assert!(w[1].error <= w[0].error + 1e-12, "{:?}", w);
        }
    }

    #[test]
    fn converged_certificates_are_sound(zeros in zero_set(2), outer in outer_poly(2), p in exponent(), n in 0usize..6) {
        let g = grid(1024);
        let f = FunctionSpec::blaschke(zeros).unwrap().with_outer(outer).unwrap();
        let o = opts(1024);
        let r = solve_opa(&f, n, p, &o).unwrap();
        prop_assume!(r.converged);
        let fs = f.sample(&g).unwrap();
        let q = polynomial_samples(&g, &r.coefficients, 0);
        let residual = BoundarySamples::constant(&g, c(1.0, 0.0)).sub(&q.mul(&fs).unwrap()).unwrap();
        for k in 0..=n as i64 {
            let probe = BoundarySamples::monomial(&g, k).mul(&fs).unwrap();
            prop_assert!(bj_residual(&residual, &probe, p).unwrap() <= o.tol);
        }
    }

    #[test]
    fn opa_is_unique(
        zeros in zero_set(2),
        p in prop::sample::select(vec![1.5, 3.0, 4.0]),
        s1 in prop::collection::vec(complex_in(2.0), 5),
        s2 in prop::collection::vec(complex_in(2.0), 5),
    ) {
        let f = FunctionSpec::blaschke(zeros).unwrap();
        let o = opts(1024);
        let a = solve_opa_from(&f, 4, p, &o, Some(&s1)).unwrap();
        let b = solve_opa_from(&f, 4, p, &o, Some(&s2)).unwrap();
        prop_assert!(a.converged && b.converged);
        for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
            prop_assert!((x - y).norm() <= 1e-6, "{} vs {}", x, y);
        }
    }

    #[test]
    fn p2_solver_matches_normal_equations(zeros in zero_set(2), outer in outer_poly(3), n in 0usize..8) {
        let g = grid(1024);
        let f = FunctionSpec::blaschke(zeros).unwrap().with_outer(outer).unwrap();
        let a = solve_opa(&f, n, 2.0, &opts(1024)).unwrap();
        let b = solve_opa_p2(&f, n, &g).unwrap();
        for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
            prop_assert!((x - y).norm() <= 1e-8);
        }
    }

    #[test]
    fn projection_beats_polynomials(zeros in zero_set(3), p in exponent()) {
        let g = grid(1024);
        let f = FunctionSpec::blaschke(zeros).unwrap();
        let proj = project_one(&f, p, &g).unwrap();
        let opa = solve_opa(&f, 12, p, &opts(1024)).unwrap();
        prop_assert!(proj.residual_norm <= opa.error + 1e-6);
    }

    #[test]
    fn solver_distance_approaches_formula(zeros in zero_set(2), p in prop::sample::select(vec![1.5, 2.0, 3.0, 4.0])) {
        let f = FunctionSpec::blaschke(zeros).unwrap();
        let opa = solve_opa(&f, 16, p, &SolverOptions::default().with_grid(4096)).unwrap();
        let exact = distance_formula(&f, p).unwrap();
        prop_assert!((opa.error - exact).abs() <= 5e-3, "{} vs {}", opa.error, exact);
    }

    #[test]
    fn solver_sees_strict_nesting(z1 in zero_set(2), z2 in zero_set(1), p in prop::sample::select(vec![1.5, 2.0, 3.0])) {
        let o = opts(1024);
        let j1 = FunctionSpec::blaschke(z1).unwrap();
        let j12 = j1.times(&FunctionSpec::blaschke(z2).unwrap());
        let e1 = solve_opa(&j1, 12, p, &o).unwrap();
        let e12 = solve_opa(&j12, 12, p, &o).unwrap();
        prop_assert!(e12.error - e1.error > 10.0 * o.tol, "{} vs {}", e12.error, e1.error);
    }

    #[test]
    fn dual_value_is_phase_invariant(
        zeros in zero_set(2),
        q in prop::sample::select(vec![1.5, 2.0, 3.0]),
        start in prop::collection::vec(complex_in(1.0), 13),
        t in 0.0..std::f64::consts::TAU,
    ) {
        let o = opts(1024);
        let prob = DualProblem::contour_only(zeros, q, 12).unwrap();
        prop_assume!(prob.functional(&polynomial_samples(&o.grid().unwrap(), &start, 0)).unwrap().norm() > 1e-3);
        let a = hardy_opa::dual::dual_sup_from(&prob, &o, Some(&start)).unwrap();
        let rotated: Vec<Complex64> = start.iter().map(|s| s * Complex64::from_polar(1.0, t)).collect();
        let b = hardy_opa::dual::dual_sup_from(&prob, &o, Some(&rotated)).unwrap();
        prop_assert!((a.value - b.value).abs() <= 1e-8, "{} vs {}", a.value, b.value);
        prop_assert!(a.value <= a.exact + 1e-9);
    }

    #[test]
    fn product_bound_is_tight_for_inner_at_p2(zeros in zero_set(3), n in 0usize..8) {
        let f = FunctionSpec::blaschke(zeros).unwrap();
        let opa = solve_opa(&f, n, 2.0, &opts(1024)).unwrap();
        let b = check_product_bound(&f, &opa, 2.0).unwrap();
        prop_assert!(b.slack.abs() <= 1e-9, "{:?}", b);
    }

    #[test]
    fn small_p_bound_sits_below_product_bound(zeros in zero_set(3), p in 1.1..1.95f64, n in 0usize..6) {
        let g = grid(1024);
        let f = FunctionSpec::blaschke(zeros).unwrap();
        let opa = solve_opa(&f, n, p, &opts(1024)).unwrap();
        let product = check_product_bound(&f, &opa, p).unwrap();
        let small = bound_p_less_2(&f, p, &g).unwrap();
        prop_assert!(small <= product.rhs + 1e-9, "{} vs {}", small, product.rhs);
        prop_assert!(product.satisfied);
    }
}
