mod common;

use mch::analysis::{mixing_condition, tmix_bound};
use mch::coupling::exact_contraction_check;
use mch::graph::generate_erdos_renyi;
use mch::queueing::queue_length_bound;
use mch::{Configuration, Graph, ModelParams};
use proptest::prelude::*;

use common::{nonisomorphic_graphs, random_params_with_margin};

#[test]
fn graph_class_counts() {
    let counts: Vec<usize> = (1..=5).map(|n| nonisomorphic_graphs(n).len()).collect();
    assert_eq!(counts, [1, 2, 4, 11, 34]);
}

proptest! {
    #[test]
    fn queue_bound_monotone(
        n in 2usize..2000,
        extra in 1usize..100,
        beta in 0.01f64..1.0,
        lambda_min in 0.1f64..3.0,
        s in 0.05f64..1.0,
        frac in 0.0f64..0.95,
        shrink in 0.05f64..1.0,
    ) {
        let nu = frac * s;
        let b = queue_length_bound(n, beta, lambda_min, s, nu).unwrap().bound;
        // Larger gap s - nu: no larger bound.
        let closer = queue_length_bound(n, beta, lambda_min, s, nu + (s - nu) * (1.0 - shrink)).unwrap().bound;
        prop_assert!(closer >= b * (1.0 - 1e-12));
        prop_assert!(queue_length_bound(n + extra, beta, lambda_min, s, nu).unwrap().bound >= b);
    }

    #[test]
    fn tmix_curve_shape(n in 1usize..50, p in 0.01f64..0.99, t in 0.0f64..100.0) {
        let g = Graph::empty(n);
        let report = mixing_condition(&g, &ModelParams::uniform(n, 2, 1.0, p).unwrap()).unwrap();
        prop_assert_eq!(report.beta, 1.0);
        prop_assert_eq!(report.bound_curve(0.0), 1.0);
        prop_assert!(report.bound_curve(t) <= 1.0);
        prop_assert!(report.bound_curve(t + 1.0) <= report.bound_curve(t));
        if n >= 1 {
            let t_quarter = tmix_bound(&report, 0.25).unwrap();
            prop_assert!((report.bound_curve(t_quarter) - 0.25).abs() < 1e-9);
        }
    }

    #[test]
    fn contraction_on_random_small_graphs(seed in 0u64..10_000, k in 1u16..=3) {
        let g = generate_erdos_renyi(5, 0.5, seed).unwrap();
        let mut rng = mch::rng::rng_from_seed(seed);
        let params = random_params_with_margin(&g, k, 0.01, 0.9, &mut rng);
        for v in 0..5 {
            prop_assert!(exact_contraction_check(&g, &params, v, 100_000).unwrap().passes);
        }
    }

    #[test]
    fn greedy_start_is_proper_and_maximal(seed in 0u64..10_000, k in 1u16..=4) {
        let g = generate_erdos_renyi(30, 0.2, seed).unwrap();
        let x = Configuration::greedy_maximal(&g, k, &mut mch::rng::rng_from_seed(seed));
        prop_assert!(mch::model::is_proper(&g, &x, k).unwrap());
        for v in 0..30 {
            if x.colour(v) == 0 {
                prop_assert!(mch::model::available_colours(&g, &x, v, k).is_empty());
            }
        }
    }
}
