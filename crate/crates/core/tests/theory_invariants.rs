use proptest::prelude::*;
use zokit_core::sampling::SamplingMode;
use zokit_core::theory::{coefficients, corollary1_params, theorem_bound, SmoothnessParams, TheoryParams, Variant};

/// Constant-parameter recursion `c_k = (1+θ)c_{k+1} + a` solved in closed
/// form: `c_0 = a((1+θ)^m − 1)/θ`.
#[allow(clippy::too_many_arguments)]
fn closed_form_c0(variant: Variant, d: f64, b: f64, dn: f64, l: f64, eta: f64, beta: f64, m: usize) -> f64 {
    let (theta, a) = match variant {
        Variant::Rand => {
            let k = 6.0 * (1.0 + 4.0 * d) * l * l * dn / b;
            (beta * eta + k * eta * eta, k / 2.0 * l * eta * eta)
        }
        Variant::AvgRand { q } => {
            let q = q as f64;
            let k = 6.0 * (4.0 * d + 5.0 * q) * l * l * dn / (b * q);
            (beta * eta + k * eta * eta, k / 2.0 * l * eta * eta)
        }
        Variant::Coord => {
            let k = 2.0 * d * l * l * dn / b;
            (beta * eta + k * eta * eta, k / 2.0 * l * eta * eta)
        }
    };
    a * ((1.0 + theta).powi(m as i32) - 1.0) / theta
}

fn variants() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::Rand), (1usize..40).prop_map(|q| Variant::AvgRand { q }), Just(Variant::Coord)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn recursion_matches_closed_form(
        variant in variants(),
        d in 1usize..200,
        b in 1usize..50,
        extra in 0usize..50,
        l in 0.1f64..10.0,
        eta in 1e-5f64..1e-2,
        beta in 0.1f64..5.0,
        m in 1usize..60,
        with in any::<bool>(),
    ) {
        let n = b + extra;
        let mode = if with { SamplingMode::WithReplacement } else { SamplingMode::WithoutReplacement };
        let p = TheoryParams::constant(variant, d, b, n, mode, 0.01, eta, beta, m, 10 * m);
        let tr = coefficients(&p, &SmoothnessParams::new(l, 1.0).unwrap()).unwrap();
        let want = closed_form_c0(variant, d as f64, b as f64, p.delta_n(), l, eta, beta, m);
        prop_assert!((tr.c[0] - want).abs() <= 1e-9 * want.max(1e-300), "{} vs {}", tr.c[0], want);
        prop_assert_eq!(tr.c[m], 0.0);
        prop_assert!(tr.c.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn corollary1_caps_and_positive_gamma(
        variant in variants(),
        d in 1usize..300,
        b in 1usize..64,
        extra in 0usize..100,
        l in 0.1f64..20.0,
        inv_rho in 518.0f64..5000.0,
        t in 1usize..100_000,
    ) {
        let rho = 1.0 / inv_rho;
        let n = b + extra;
        let c1 = corollary1_params(variant, d, l, rho, t).unwrap();
        let p = TheoryParams::from_corollary1(variant, &c1, b, n, SamplingMode::WithReplacement, t);
        let tr = coefficients(&p, &SmoothnessParams::new(l, 1.0).unwrap()).unwrap();
        let cap = match variant {
            Variant::Rand => 30.0 * l * rho / b as f64,
            Variant::AvgRand { q } => 54.0 * l * rho / (b * d.min(q)) as f64,
            Variant::Coord => 2.0 * l * rho / b as f64,
        };
        prop_assert!(tr.c[0] <= cap, "c0 {} > cap {}", tr.c[0], cap);
        prop_assert!(tr.gamma_bar > 0.0);
        if variant == Variant::Rand {
            prop_assert!(tr.gamma_bar >= c1.eta * (0.5 - 259.0 * rho));
        }
    }

    #[test]
    fn averaging_more_directions_tightens_coefficients(
        d in 2usize..100,
        b in 1usize..20,
        q in 1usize..30,
        t in 100usize..10_000,
    ) {
        let s = SmoothnessParams::new(1.0, 2.0).unwrap();
        let c1 = corollary1_params(Variant::AvgRand { q: 1 }, d, 1.0, 1.0 / 600.0, t).unwrap();
        let trace = |q: usize| {
            let p = TheoryParams::constant(Variant::AvgRand { q }, d, b, 10 * b, SamplingMode::WithReplacement, c1.mu, c1.eta, c1.beta, c1.m, t);
            coefficients(&p, &s).unwrap()
        };
        let (lo, hi) = (trace(q), trace(q + 1));
        prop_assert!(hi.c[0] <= lo.c[0]);
        prop_assert!(hi.gamma_bar >= lo.gamma_bar);
    }
}

#[test]
fn full_batch_removes_variance_coupling() {
    let s = SmoothnessParams::new(2.0, 5.0).unwrap();
    for variant in [Variant::Rand, Variant::AvgRand { q: 3 }, Variant::Coord] {
        let p = TheoryParams::constant(variant, 8, 12, 12, SamplingMode::WithoutReplacement, 0.01, 1e-3, 1.0, 10, 100);
        let tr = coefficients(&p, &s).unwrap();
        assert!(tr.c.iter().all(|&c| c == 0.0), "{variant:?}");
    }
}

#[test]
fn bound_shrinks_with_more_iterations_under_corollary1() {
    let s = SmoothnessParams::new(1.0, 1.0).unwrap();
    let bound = |t: usize| {
        let c1 = corollary1_params(Variant::Rand, 20, 1.0, 1.0 / 600.0, t).unwrap();
        let p = TheoryParams::from_corollary1(Variant::Rand, &c1, 10, 100, SamplingMode::WithReplacement, t);
        theorem_bound(&coefficients(&p, &s).unwrap(), 1.0, &p, &s)
    };
    let (a, b) = (bound(1_000), bound(100_000));
    assert!(!a.vacuous && !b.vacuous);
    assert!(b.initial_gap < a.initial_gap);
    assert!(b.total < a.total);
}
