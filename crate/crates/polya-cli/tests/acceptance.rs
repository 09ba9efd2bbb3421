//! Acceptance suite: the quantitative guarantees the library ships with.
//!
//! Each test checks one numbered criterion end to end, with its tolerance
//! and runtime limit pinned in the code, and prints a single PASS/FAIL line
//! (visible under `cargo test -- --nocapture`).

use std::time::{Duration, Instant};

use polya_core::series::{lauricella_fc_direct, sum_multi_coeff};
use polya_core::specfun::gamma_product_u3;
use polya_core::{
    estimate_return, laplace_rhs, lattice_green_integral, lauricella_fc, return_probability,
    u_quadrature, u_series, verify_lemma1, Error, LaplaceSpec, LatticeIntegralConfig,
    LauricellaParams, Method, QuadratureConfig, SeriesConfig, WalkConfig,
};

/// Published reference values: the expected number of origin visits and the
/// return probability of the simple random walk on Z^3.
const U3_REFERENCE: f64 = 1.5163860592;
const P3_REFERENCE: f64 = 0.3405373296;

fn report(criterion: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("{verdict} criterion {criterion}: {detail}");
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

#[test]
fn criterion_01_triple_agreement_on_u3() {
    const REL_TOL: f64 = 1e-9;
    const TIME_LIMIT: Duration = Duration::from_secs(5);
    let cfg = SeriesConfig::default();
    let qcfg = QuadratureConfig::default();

    let start = Instant::now();
    let series = u_series(3, &cfg).expect("series route").value;
    let quad = u_quadrature(3, &qcfg).expect("quadrature route").value;
    let gamma = gamma_product_u3();
    let elapsed = start.elapsed();

    let values = [series, quad, gamma];
    let worst_vs_reference = values
        .iter()
        .map(|&v| rel_diff(v, U3_REFERENCE))
        .fold(0.0, f64::max);
    let mut worst_pairwise = 0.0f64;
    for i in 0..3 {
        for j in (i + 1)..3 {
            worst_pairwise = worst_pairwise.max(rel_diff(values[i], values[j]));
        }
    }
    report(
        1,
        worst_vs_reference < REL_TOL && worst_pairwise < REL_TOL && elapsed < TIME_LIMIT,
        &format!(
            "u(3) series={series:.12} quad={quad:.12} gamma={gamma:.12}; \
             max rel vs {U3_REFERENCE} = {worst_vs_reference:.3e} (tol {REL_TOL:.0e}), \
             max pairwise = {worst_pairwise:.3e} (tol {REL_TOL:.0e}), \
             elapsed {elapsed:.2?} (limit {TIME_LIMIT:?})"
        ),
    );
}

#[test]
fn criterion_02_p3_by_all_three_routes() {
    const ABS_TOL: f64 = 1e-9;
    const TIME_LIMIT: Duration = Duration::from_secs(5);
    let cfg = SeriesConfig::default();

    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut rendered = String::new();
    for method in [Method::Series, Method::Quadrature, Method::GammaProduct] {
        let result = return_probability(3, method, &cfg).expect("route succeeds");
        worst = worst.max((result.p - P3_REFERENCE).abs());
        rendered.push_str(&format!("{:?}={:.12} ", method, result.p));
    }
    let elapsed = start.elapsed();

    report(
        2,
        worst < ABS_TOL && elapsed < TIME_LIMIT,
        &format!(
            "p(3) {rendered}; max abs diff vs {P3_REFERENCE} = {worst:.3e} (tol {ABS_TOL:.0e}), \
             elapsed {elapsed:.2?} (limit {TIME_LIMIT:?})"
        ),
    );
}

#[test]
fn criterion_03_lauricella_green_point_equals_gamma_product() {
    const REL_TOL: f64 = 1e-9;
    let params = LauricellaParams {
        a: 1.0,
        b: 0.5,
        c: vec![1.0, 1.0, 1.0],
        x: vec![1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0],
    };
    let fc = lauricella_fc(&params, &SeriesConfig::default()).expect("green point evaluates");
    let gamma = gamma_product_u3();
    let diff = rel_diff(fc.value, gamma);
    report(
        3,
        diff < REL_TOL,
        &format!(
            "F_C(1,1/2;1,1,1;1/9,...) = {:.15} vs gamma product {:.15}; rel diff {:.3e} (tol {REL_TOL:.0e})",
            fc.value, gamma, diff
        ),
    );
}

#[test]
fn criterion_04_multi_index_truncation_matches_collapsed_partial_sum() {
    const REL_TOL: f64 = 1e-12;
    const DEGREE: usize = 12;
    const TIME_LIMIT: Duration = Duration::from_secs(10);
    // A tolerance far below reach forces both routes to sum every term up to
    // the degree cap, so the comparison is between exact truncations.
    let cfg = SeriesConfig {
        tolerance: 1e-300,
        n_max: DEGREE,
        tail_model: false,
    };

    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut rendered = String::new();
    for d in [3u32, 4] {
        let df = d as f64;
        let params = LauricellaParams {
            a: 1.0,
            b: 0.5,
            c: vec![1.0; d as usize],
            x: vec![1.0 / (df * df); d as usize],
        };
        let naive = lauricella_fc_direct(&params, &cfg).expect("direct summation");
        let collapsed = u_series(d, &cfg).expect("collapsed summation");
        let diff = rel_diff(naive.value, collapsed.value);
        worst = worst.max(diff);
        rendered.push_str(&format!("d={d}: {:.15} vs {:.15}; ", naive.value, collapsed.value));
    }
    let elapsed = start.elapsed();

    report(
        4,
        worst < REL_TOL && elapsed < TIME_LIMIT,
        &format!(
            "degree <= {DEGREE} truncations {rendered}max rel diff {worst:.3e} (tol {REL_TOL:.0e}), \
             elapsed {elapsed:.2?} (limit {TIME_LIMIT:?})"
        ),
    );
}

#[test]
fn criterion_05_cross_method_table_d3_to_d10() {
    const REL_TOL: f64 = 1e-9;
    const TIME_LIMIT: Duration = Duration::from_secs(60);
    let cfg = SeriesConfig::default();
    let qcfg = QuadratureConfig::default();

    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut previous = f64::INFINITY;
    let mut monotone = true;
    for d in 3..=10u32 {
        let series = u_series(d, &cfg).expect("series").value;
        let quad = u_quadrature(d, &qcfg).expect("quadrature").value;
        worst = worst.max(rel_diff(series, quad));
        monotone &= series < previous;
        previous = series;
    }
    let elapsed = start.elapsed();

    report(
        5,
        worst < REL_TOL && monotone && elapsed < TIME_LIMIT,
        &format!(
            "d=3..10 series vs quadrature max rel diff {worst:.3e} (tol {REL_TOL:.0e}), \
             u(d) strictly decreasing: {monotone}, elapsed {elapsed:.2?} (limit {TIME_LIMIT:?})"
        ),
    );
}

#[test]
fn criterion_06_laplace_identity_on_fifty_seeded_specs() {
    const REL_TOL: f64 = 1e-6;
    const COUNT: u32 = 50;
    const SEED: u64 = 1;
    const TIME_LIMIT: Duration = Duration::from_secs(120);

    let start = Instant::now();
    let rep = verify_lemma1(COUNT, SEED).expect("verification runs");
    let elapsed = start.elapsed();

    report(
        6,
        rep.max_rel_diff < REL_TOL && elapsed < TIME_LIMIT,
        &format!(
            "{COUNT} seeded specs (seed {SEED}): max rel diff {:.3e} (tol {REL_TOL:.0e}), \
             mean {:.3e}, worst index {}, elapsed {elapsed:.2?} (limit {TIME_LIMIT:?})",
            rep.max_rel_diff, rep.mean_rel_diff, rep.worst_index
        ),
    );
}

#[test]
fn criterion_07_laplace_series_side_specializes_to_u() {
    const REL_TOL: f64 = 1e-10;
    let cfg = SeriesConfig::default();

    let mut worst = 0.0f64;
    for d in 3..=10u32 {
        let df = d as f64;
        // lambda = 0, nu_j = 0, a_j = 1/d, p = 1: the transform of
        // prod_j I_0(x/d) e^{-x}, which counts origin visits.
        let spec = LaplaceSpec {
            lambda: 0.0,
            nu: vec![0.0; d as usize],
            a: vec![1.0 / df; d as usize],
            p: 1.0,
        };
        let rhs = laplace_rhs(&spec, &cfg).expect("series side evaluates on the boundary");
        let u = u_series(d, &cfg).expect("series").value;
        worst = worst.max(rel_diff(rhs, u));
    }

    report(
        7,
        worst < REL_TOL,
        &format!(
            "lambda=0, nu=0, a=1/d, p=1 for d=3..10: max rel diff vs u_series {worst:.3e} \
             (tol {REL_TOL:.0e})"
        ),
    );
}

#[test]
fn criterion_08_monte_carlo_oracle_at_scale() {
    const ABS_TOL: f64 = 0.003;
    const TIME_LIMIT: Duration = Duration::from_secs(600);
    let config = WalkConfig {
        d: 3,
        walks: 1_000_000,
        horizon: 1_000_000,
        seed: 7,
        workers: 1,
        ..WalkConfig::default()
    };

    let start = Instant::now();
    let estimate = estimate_return(&config).expect("simulation runs");
    let elapsed = start.elapsed();

    let diff = (estimate.p_hat - P3_REFERENCE).abs();
    report(
        8,
        diff < ABS_TOL && elapsed < TIME_LIMIT,
        &format!(
            "10^6 walks, horizon 10^6, seed 7: p_hat = {:.7} (se {:.1e}), |p_hat - {P3_REFERENCE}| = \
             {diff:.5} (tol {ABS_TOL}), elapsed {elapsed:.1?} (limit {TIME_LIMIT:?})",
            estimate.p_hat, estimate.std_err
        ),
    );
}

#[test]
fn criterion_09_coefficients_match_exhaustive_enumeration() {
    const REL_TOL: f64 = 1e-13;

    // Exhaustive reference: sum of prod_j 1/(k_j!)^2 over every multi-index
    // (k_1..k_d) with |k| = n, accumulated in linear scale with factorials
    // that are exact in f64 for n <= 10.
    fn factorial(k: usize) -> f64 {
        (1..=k).map(|i| i as f64).product()
    }
    fn enumerate(d: usize, n: usize) -> f64 {
        if d == 1 {
            let f = factorial(n);
            return 1.0 / (f * f);
        }
        let mut total = 0.0;
        for k in 0..=n {
            let f = factorial(k);
            total += enumerate(d - 1, n - k) / (f * f);
        }
        total
    }

    let mut worst = 0.0f64;
    for d in 1..=4u32 {
        for n in 0..=10usize {
            let fast = sum_multi_coeff(d, n).expect("coefficient");
            let reference = enumerate(d as usize, n);
            // Relative agreement of the linear values bounds the absolute
            // log-space discrepancy by the same amount.
            worst = worst.max(rel_diff(fast, reference));
        }
    }

    report(
        9,
        worst < REL_TOL,
        &format!(
            "c_d(n) for d <= 4, n <= 10: max rel diff vs exhaustive enumeration {worst:.3e} \
             (tol {REL_TOL:.0e})"
        ),
    );
}

#[test]
fn criterion_10_recurrent_dimensions_are_rejected_everywhere() {
    let cfg = SeriesConfig::default();
    let qcfg = QuadratureConfig::default();
    let lcfg = LatticeIntegralConfig {
        samples: 10,
        ..LatticeIntegralConfig::default()
    };

    let mut all_rejected = true;
    let fc_green = |d: u32| LauricellaParams {
        a: 1.0,
        b: 0.5,
        c: vec![1.0; d as usize],
        x: vec![1.0 / (d as f64 * d as f64); d as usize],
    };
    for d in [1u32, 2] {
        let refusals: Vec<(&str, bool)> = vec![
            (
                "u_series",
                matches!(u_series(d, &cfg), Err(Error::RecurrentDimension { .. })),
            ),
            (
                "u_quadrature",
                matches!(u_quadrature(d, &qcfg), Err(Error::RecurrentDimension { .. })),
            ),
            (
                "lattice_green_integral",
                matches!(
                    lattice_green_integral(d, &lcfg),
                    Err(Error::RecurrentDimension { .. })
                ),
            ),
            (
                "lauricella_fc at the Green point",
                matches!(
                    lauricella_fc(&fc_green(d), &cfg),
                    Err(Error::RecurrentDimension { .. })
                ),
            ),
            (
                "return_probability(series)",
                matches!(
                    return_probability(d, Method::Series, &cfg),
                    Err(Error::RecurrentDimension { .. })
                ),
            ),
            (
                "return_probability(quadrature)",
                matches!(
                    return_probability(d, Method::Quadrature, &cfg),
                    Err(Error::RecurrentDimension { .. })
                ),
            ),
            (
                "return_probability(gamma)",
                matches!(
                    return_probability(d, Method::GammaProduct, &cfg),
                    Err(Error::RecurrentDimension { .. })
                ),
            ),
        ];
        for (route, rejected) in &refusals {
            if !rejected {
                println!("route {route} accepted recurrent d = {d}");
                all_rejected = false;
            }
        }
    }

    report(
        10,
        all_rejected,
        "every analytic route refuses d in {1, 2} with the recurrent-dimension error",
    );
}

#[test]
fn criterion_11_lattice_oracle_at_ten_million_points() {
    const ABS_TOL: f64 = 5e-3;
    const TIME_LIMIT: Duration = Duration::from_secs(60);
    let config = LatticeIntegralConfig {
        samples: 10_000_000,
        seed: 1,
        normalize: true,
    };

    let start = Instant::now();
    let estimate = lattice_green_integral(3, &config).expect("lattice estimate");
    let elapsed = start.elapsed();

    let u3 = u_series(3, &SeriesConfig::default()).expect("series").value;
    let diff = (estimate.value - u3).abs();
    report(
        11,
        diff < ABS_TOL && elapsed < TIME_LIMIT,
        &format!(
            "10^7 points, seed 1: estimate {:.8} vs u(3) {:.8}; abs diff {diff:.2e} \
             (tol {ABS_TOL:.0e}), elapsed {elapsed:.2?} (limit {TIME_LIMIT:?})",
            estimate.value, u3
        ),
    );
}
