use maxent_core::maxent::{check_feasibility, estimate_with, toric_ideal, EstimateOptions};
use maxent_core::numkernel::{int, ratio};
use maxent_core::{estimate, MaxEntProblem, Method, Rational, ToricSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small feasible target problems: features in `0..=2`, targets are the
/// moments of a strictly positive rational distribution.
fn small_problem() -> impl Strategy<Value = MaxEntProblem> {
    (2usize..=5, 1usize..=2)
        .prop_flat_map(|(m, d)| {
            (
                proptest::collection::vec(proptest::collection::vec(0i64..=2, m), d),
                proptest::collection::vec(1i64..=6, m),
            )
        })
        .prop_filter_map("degenerate features", |(features, weights)| {
            let m = weights.len();
            let total: i64 = weights.iter().sum();
            let targets = features
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&weights)
                        .fold(int(0), |acc, (&a, &w)| acc + ratio(a * w, total))
                })
                .collect();
            let p = MaxEntProblem::with_targets(m, features, targets).ok()?;
            check_feasibility(&p).ok()?;
            Some(p)
        })
}

fn kc_opts() -> EstimateOptions {
    EstimateOptions {
        max_cycles: 100_000,
        ..EstimateOptions::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn methods_agree_on_small_problems(p in small_problem()) {
        let direct = estimate(&p, Method::Direct, 1e-10).unwrap();
        for method in [Method::Newton, Method::Gis, Method::Kc] {
            let other = estimate_with(&p, method, &EstimateOptions { tol: 1e-10, ..kc_opts() }).unwrap();
            let gap = direct.distribution.linf_distance(&other.distribution);
            prop_assert!(gap < 1e-8, "{method} differs from direct by {gap:e}");
        }
    }

    #[test]
    fn solutions_meet_their_constraints(p in small_problem()) {
        let s = estimate(&p, Method::Direct, 1e-10).unwrap();
        prop_assert!(s.max_residual() <= 1e-10);
        prop_assert!(s.distribution.is_strictly_positive());
    }
}

/// `x_j = θ^{a_j}` for rational `θ`, with negative entries allowed.
fn monomial_point(a: &[Vec<i64>], theta: &[Rational]) -> Vec<Rational> {
    let m = a[0].len();
    (0..m)
        .map(|j| {
            a.iter()
                .zip(theta)
                .fold(int(1), |acc, (row, t)| acc * t.pow(row[j] as i32))
        })
        .collect()
}

#[test]
fn toric_generators_vanish_on_the_monomial_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let matrices = [
        vec![vec![1, 1, 1, 1], vec![0, 1, 2, 3]],
        vec![vec![1, 1, 0, 0], vec![0, 0, 1, 1], vec![1, 0, 1, 0]],
        vec![vec![2, 1, 0, -1], vec![0, 1, 2, 1]],
    ];
    for a in matrices {
        let m = a[0].len();
        let gens = toric_ideal(&ToricSpec::uniform(a.clone(), m).unwrap()).unwrap();
        assert!(!gens.is_empty());
        for _ in 0..20 {
            let theta: Vec<Rational> = (0..a.len())
                .map(|_| ratio(rng.gen_range(1..=9), rng.gen_range(1..=9)))
                .collect();
            let x = monomial_point(&a, &theta);
            for g in &gens {
                assert_eq!(g.evaluate(&x).unwrap(), int(0), "{a:?}: {g} at {x:?}");
            }
        }
    }
}

#[test]
fn dual_and_direct_find_the_same_positive_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 15 {
        // the dual is built for integer targets: pick one strictly inside the feature range
        let m = rng.gen_range(2..=5);
        let row: Vec<i64> = (0..m).map(|_| rng.gen_range(0..=5)).collect();
        let (lo, hi) = (*row.iter().min().unwrap(), *row.iter().max().unwrap());
        if hi - lo < 2 {
            continue;
        }
        let target = int(rng.gen_range(lo + 1..hi));
        let p = MaxEntProblem::with_targets(m, vec![row], vec![target]).unwrap();
        let direct = estimate(&p, Method::Direct, 1e-10).unwrap();
        let dual = estimate(&p, Method::Dual, 1e-10).unwrap();
        let gap = direct.distribution.linf_distance(&dual.distribution);
        assert!(gap < 1e-9, "{:?}: gap {gap:e}", p.features());
        checked += 1;
    }
}
