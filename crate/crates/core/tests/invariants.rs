use std::sync::Arc;

use pamlab_core::logspace::logsumexp;
use pamlab_core::rng::{stream, PATH_STREAM};
use pamlab_core::{
    endpoint_law, enumerate_ball, forward_recursion, make_kernel, modified_field_stats, order_statistics,
    sample_pareto_field, viterbi_path, FieldRealization, PathClassifier, PathSampler, WalkKernel,
};
use proptest::prelude::*;

fn ball(d: usize, n: usize) -> Arc<pamlab_core::BallIndex> {
    Arc::new(enumerate_ball(d, n).unwrap())
}

fn dim_and_n() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![(Just(1usize), 0usize..40), (Just(2usize), 0usize..12), (Just(3usize), 0usize..6)]
}

fn alpha() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.5), Just(1.0), Just(2.0), 0.3f64..4.0]
}

fn kernel_weights(d: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.05f64..1.0, 2 * d + 1).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.iter().map(|v| v / s).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn law_is_normalized((d, n) in dim_and_n(), seed in any::<u64>(), a in alpha()) {
        let f = sample_pareto_field(seed, a, ball(d, n)).unwrap();
        let k = WalkKernel::uniform(d).unwrap();
        let law = endpoint_law(&forward_recursion(&f, &k, n).unwrap()).unwrap();
        prop_assert!(logsumexp(law.log_p()).abs() < 1e-9);
        prop_assert_eq!(law.log_p().len(), f.ball().len_within(n));
        prop_assert!(law.log_p().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn constant_field_gives_walk_law(d in 1usize..=2, n in 0usize..10, c in 1.0f64..50.0) {
        let k = WalkKernel::uniform(d).unwrap();
        let zero = FieldRealization::constant(ball(d, n), 0.0).unwrap();
        let f = FieldRealization::constant(ball(d, n), c).unwrap();
        let p0 = endpoint_law(&forward_recursion(&zero, &k, n).unwrap()).unwrap();
        let p = endpoint_law(&forward_recursion(&f, &k, n).unwrap()).unwrap();
        for (a, b) in p.log_p().iter().zip(p0.log_p()) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        // at N = 1 the lazy uniform walk puts equal mass on B_1
        if n != 1 {
            prop_assert!(p.w().is_origin());
            prop_assert_eq!(modified_field_stats(&f, n).unwrap().z1(), p.w());
        }
    }

    #[test]
    fn shift_leaves_law_and_w_unchanged(
        (d, n) in dim_and_n(), seed in any::<u64>(), a in alpha(), c in -20.0f64..20.0
    ) {
        let f = sample_pareto_field(seed, a, ball(d, n)).unwrap();
        let g = f.map_values(|_, v| v + c).unwrap();
        let k = WalkKernel::uniform(d).unwrap();
        let p = endpoint_law(&forward_recursion(&f, &k, n).unwrap()).unwrap();
        let q = endpoint_law(&forward_recursion(&g, &k, n).unwrap()).unwrap();
        let tol = 1e-9 * (1.0 + p.log_u().abs());
        for (x, y) in p.log_p().iter().zip(q.log_p()) {
            prop_assert!((x - y).abs() < tol);
        }
        let gap = p.log_p()[p.w_index()]
            - p.log_p().iter().enumerate().filter(|(i, _)| *i != p.w_index()).map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
        if gap > 10.0 * tol {
            prop_assert_eq!(p.w(), q.w());
        }
    }

    #[test]
    fn reinforcing_w_does_not_lower_its_mass(
        d in 1usize..=2, n in 1usize..10, seed in any::<u64>(), a in alpha(), bump in 0.0f64..5.0
    ) {
        let f = sample_pareto_field(seed, a, ball(d, n)).unwrap();
        let k = WalkKernel::uniform(d).unwrap();
        let p = endpoint_law(&forward_recursion(&f, &k, n).unwrap()).unwrap();
        let w = p.w_index();
        let g = f.map_values(|i, v| if i == w { v + bump } else { v }).unwrap();
        let q = endpoint_law(&forward_recursion(&g, &k, n).unwrap()).unwrap();
        prop_assert!(q.log_p()[w] >= p.log_p()[w] - 1e-12 * (1.0 + p.log_u().abs()));
    }

    #[test]
    fn finite_speed_under_any_kernel(n in 0usize..15, seed in any::<u64>(), w in kernel_weights(1)) {
        let f = sample_pareto_field(seed, 1.5, ball(1, n + 3)).unwrap();
        let k = make_kernel(1, &w).unwrap();
        let fr = forward_recursion(&f, &k, n).unwrap();
        let front = fr.last();
        for x in -(n as i32 + 3)..=(n as i32 + 3) {
            let v = front.at(&pamlab_core::LatticeSite::d1(x));
            prop_assert_eq!(v.is_finite(), x.unsigned_abs() as usize <= n);
        }
    }

    #[test]
    fn sampled_paths_respect_events_and_viterbi(
        d in 1usize..=2, n in 3usize..12, seed in any::<u64>(), a in alpha()
    ) {
        let f = sample_pareto_field(seed, a, ball(d, n)).unwrap();
        let k = WalkKernel::uniform(d).unwrap();
        let fr = forward_recursion(&f, &k, n).unwrap();
        let law = endpoint_law(&fr).unwrap();
        let m = modified_field_stats(&f, n).unwrap();
        let mut c = PathClassifier::new(&f, &m, &law).unwrap();
        let best = viterbi_path(&f, &k, n).unwrap();
        let s = PathSampler::new(&fr, &f, &k).unwrap();
        let mut rng = stream(seed, PATH_STREAM);
        for _ in 0..50 {
            let p = s.sample(&mut rng);
            prop_assert_eq!(p.local_time().values().sum::<u32>() as usize, n);
            prop_assert!(p.log_weight() <= best.log_weight() + 1e-9 * (1.0 + best.log_weight().abs()));
            let flags = c.classify(&p).unwrap();
            prop_assert!(flags.nesting_holds());
            for i in 0..2 {
                if flags.in_w[i] {
                    prop_assert_eq!(p.endpoint(), if i == 0 { m.z1() } else { m.z2() });
                }
            }
        }
    }

    #[test]
    fn modified_stats_bounded_by_order_stats((d, n) in dim_and_n(), seed in any::<u64>(), a in alpha()) {
        let f = sample_pareto_field(seed, a, ball(d, n + 1)).unwrap();
        let x = order_statistics(&f, n).unwrap();
        let z = modified_field_stats(&f, n).unwrap();
        for k in 1..=x.len() {
            prop_assert!(z.value(k) <= x.value(k));
        }
        let xi = f.xi_within(n);
        for (p, v) in z.psi().iter().zip(xi) {
            prop_assert!(p <= v);
        }
        let z_next = modified_field_stats(&f, n + 1).unwrap();
        prop_assert!(z.value(1) <= z_next.value(1));
        // sorting is a permutation of the field
        let mut rebuilt = vec![f64::NAN; x.len()];
        for k in 1..=x.len() {
            rebuilt[x.index(k)] = x.value(k);
        }
        prop_assert_eq!(rebuilt.as_slice(), xi);
    }
}
