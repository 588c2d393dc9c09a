use hierarchy_forge::hierarchy::{residual, GeneralRiccatiHierarchySpec};
use hierarchy_forge::linear::CoefVector;
use hierarchy_forge::nonlinear::*;
use hierarchy_forge::series::Radius;
use hierarchy_forge::{Rational, Scalar};
use num::Zero;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| Rational::ratio(p, q))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (1i64..=5, 1i64..=3, prop::bool::ANY).prop_map(|(p, q, neg)| Rational::ratio(if neg { -p } else { p }, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn recurrence_holds_exactly(seeds in prop::collection::vec(rational(), 10), a in nonzero_rational(), depth in 1usize..=4, order in 1usize..=6) {
        let c = CoefVector::new(seeds[..depth + order].to_vec());
        let t = lambda_table(LambdaSeed::Constants(c), &a, depth, order).unwrap();
        prop_assert!(t.recurrence_defect().is_zero());
    }

    #[test]
    fn low_order_closed_forms(seeds in prop::collection::vec(rational(), 9), a in nonzero_rational()) {
        let c = CoefVector::new(seeds);
        let t = lambda_table(LambdaSeed::Constants(c.clone()), &a, 5, 4).unwrap();
        for n in 1..=5 {
            for k in 0..=3 {
                prop_assert_eq!(t.get(n, k), &lambda_closed_constants(&c, &a, n, k).unwrap());
            }
        }
    }

    #[test]
    fn sigma_closed_forms_satisfy_constraint(sigma in prop::collection::vec(-1.5f64..1.5, 4)) {
        for n in 1..=6 {
            for k in 0..=3 {
                let lhs = (k as f64 + 1.0) * lambda_closed_sigma(&sigma, n, k);
                let rhs: f64 = (0..=k).map(|l| lambda_closed_sigma(&sigma, n + 1, k - l) * lambda_closed_sigma(&sigma, n + 1, l)).sum();
                prop_assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0), "n={} k={}", n, k);
            }
            let c0 = lambda_closed_sigma(&sigma, n, 0);
            prop_assert!((c0 - (sigma[0] * 2f64.powi(1 - n as i32)).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn invariances_preserve_solutions(eps in -0.4f64..0.4, x in 0.2f64..1.5, tau in -1.0f64..1.0) {
        for id in [SpecialSolution::Y1 { tau }, SpecialSolution::Y2, SpecialSolution::Y3] {
            let p = NonlinearPoint::of_special(id, 6, x).unwrap();
            for which in [UncoupledInvariance::T1, UncoupledInvariance::T2] {
                let t = apply_uncoupled_invariance(which, eps, &p).unwrap();
                let scale = t.y.iter().chain(&t.dy).fold(1.0f64, |m, v| m.max(v.abs()));
                prop_assert!(t.hierarchy_residual().unwrap() < 1e-12 * scale * scale / t.x.powi(3).min(1.0));
            }
        }
    }
}

#[test]
fn random_seed_solution_has_zero_residual() {
    let c = CoefVector::new([3, -1, 2, 5, -4, 1, 7, -2, 3, 1, -1, 2].iter().map(|&v| Rational::ratio(v, 3)).collect());
    let t = lambda_table(LambdaSeed::Constants(c), &Rational::ratio(1, 1), 4, 8).unwrap();
    let r = residual(&GeneralRiccatiHierarchySpec::nonlinear(), &assemble_solution(&t).unwrap()).unwrap();
    assert!(r.exact_zero);
    assert!(r.checked_orders.iter().all(|o| o.is_some()));
}

#[test]
fn sigma_zero_is_x_squared() {
    let t = lambda_table(LambdaSeed::Sigma(SigmaVector(vec![Rational::zero(); 4])), &Rational::zero(), 4, 3).unwrap();
    let state = assemble_solution(&t).unwrap();
    let r = residual(&GeneralRiccatiHierarchySpec::nonlinear(), &state).unwrap();
    assert!(r.exact_zero);
    let v = state.evaluate(&Rational::ratio(3, 2));
    assert!(v.iter().all(|y| y == &Rational::ratio(9, 4)));
}

#[test]
fn y3_coefficient_chain_and_limit() {
    for n in 1..10 {
        let (b, b_next) = (y3_log_prefactor(n).exp(), y3_log_prefactor(n + 1).exp());
        assert!((b * (y3_exponent(n) - 1.0) - b_next * b_next).abs() < 1e-12);
    }
    for x in [0.5f64, 1.0, 2.0] {
        let gaps: Vec<f64> = [4, 8, 16, 40].iter().map(|&n| (special_solution(SpecialSolution::Y3, n, &x).unwrap() - x * x).abs()).collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0] || w[1] < 1e-12), "{gaps:?}");
        assert!(gaps[3] < 1e-8);
    }
}

#[test]
fn coverage_verdicts() {
    let y1 = coverage_check(SpecialSolution::Y1 { tau: 0.0 }, 1.0, 5, 40).unwrap();
    assert_eq!(y1.verdict, CoverageVerdict::Global);
    assert!(y1.matched.iter().all(|row| row[0] == 1.0));

    let y3 = coverage_check(SpecialSolution::Y3, 1.0, 5, 60).unwrap();
    match y3.verdict {
        CoverageVerdict::Partial { radius } => assert!((radius - 1.0).abs() < 0.1, "{radius}"),
        v => panic!("{v:?}"),
    }
    assert!(y3.recurrence_mismatch < 1e-10);
    assert!(y3.levels.iter().all(|l| !l.covers_origin || l.radius == Radius::Infinite));

    let y2 = coverage_check(SpecialSolution::Y2, 1.0, 5, 40).unwrap();
    assert!(matches!(y2.verdict, CoverageVerdict::None { .. }));
    assert_eq!([y2.matched[0][0], y2.matched[1][0], y2.matched[2][0]], [-1.0, 1.0, 0.0]);
    // the matched local coefficients obey the recurrence exactly
    let seed = CoefVector::new((1..=45).map(|n| Rational::from_i64(match n { 1 => -1, 2 => 1, _ => 0 })).collect());
    let t = lambda_table(LambdaSeed::Constants(seed), &Rational::ratio(1, 1), 5, 40).unwrap();
    for n in 1..=5 {
        for k in 0..=40 {
            assert_eq!(t.get(n, k).to_f64(), y2.matched[n - 1][k]);
        }
    }
}

#[test]
fn matched_y3_closed_form() {
    let report = coverage_check(SpecialSolution::Y3, 1.0, 3, 20).unwrap();
    assert_eq!(matched_lambda_y3(1.0, 1, 0), 1.0);
    for n in 1..=3 {
        let b = y3_log_prefactor(n).exp();
        for k in 0..=6 {
            let closed = matched_lambda_y3(1.0, n, k);
            assert!((closed - report.matched[n - 1][k]).abs() < 1e-12, "n={n} k={k}");
            if let Some(exact) = matched_lambda_y3_normalized(&Rational::ratio(1, 1), n, k) {
                // integer β: the closed form divided by bₙ is the exact binomial expansion
                let series_exact = {
                    let x = hierarchy_forge::TruncatedSeries::polynomial(Rational::ratio(1, 1), vec![Rational::ratio(1, 1), Rational::ratio(1, 1)]);
                    x.powi(if n == 1 { 2 } else { 1 }).unwrap().coeff(k)
                };
                assert_eq!(exact, series_exact);
                assert!((exact.to_f64() * b - closed).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn matched_series_diverges_beyond_a() {
    let a = 1.0;
    let t = 1.5 * a;
    let mut partial = 0.0;
    let mut sums = Vec::new();
    for k in 0..=80 {
        partial += matched_lambda_y3(a, 3, k) * t.powi(k as i32);
        sums.push(partial.abs());
    }
    assert!(sums[80] > 1e6 * sums[20].max(1.0), "{} {}", sums[20], sums[80]);
}
