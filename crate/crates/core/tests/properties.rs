use fpp_core::lattice::{origin_edges, EdgeWeights};
use fpp_core::mixing::{keyed, uniform};
use fpp_core::passage::{passage_time, passage_time_excluding, path_time};
use fpp_core::{EdgeSet, EdgeWeightModel, Environment, PassageQuery, Region, Site};
use proptest::prelude::*;

fn model_strategy() -> impl Strategy<Value = EdgeWeightModel> {
    prop_oneof![
        (0.2f64..3.0, 0.1f64..1.0).prop_map(|(a, r)| EdgeWeightModel::weibull(a, r).unwrap()),
        (0.2f64..2.0, 0.1f64..0.95, 0.0f64..1.0).prop_map(|(a, r, f)| {
            let gamma = -0.5 + f * (r + 0.5);
            EdgeWeightModel::log_perturbed(a, r, gamma).unwrap()
        }),
        (0.2f64..2.0, 1.1f64..4.0)
            .prop_map(|(a, k)| EdgeWeightModel::anomalous(a, a * k).unwrap()),
    ]
}

fn site(d: usize, v: &[i32]) -> Site {
    Site::new(&v[..d])
}

fn t(env: &Environment, a: &Site, b: &Site) -> f64 {
    passage_time(env, &PassageQuery::new(*a, *b)).unwrap().time
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn survival_is_monotone(m in model_strategy(), a in 0.0f64..40.0, b in 0.0f64..40.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(m.survival(hi).unwrap() <= m.survival(lo).unwrap());
    }

    #[test]
    fn quantile_round_trip(m in model_strategy(), u in 0.001f64..0.999) {
        let x = m.quantile(u).unwrap();
        prop_assert!((m.survival(x).unwrap() - (1.0 - u)).abs() < 1e-10);
    }

    #[test]
    fn sampling_is_monotone_in_u(m in model_strategy(), a in 0.0001f64..0.9999, b in 0.0001f64..0.9999) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(m.sample(lo).unwrap() <= m.sample(hi).unwrap());
    }

    #[test]
    fn keyed_uniforms_stay_open(seed in any::<u64>(), key in any::<u128>()) {
        let u = uniform(seed, key);
        prop_assert!(u > 0.0 && u < 1.0);
        prop_assert_eq!(keyed(seed, key), keyed(seed, key));
    }

    #[test]
    fn triangle_inequality(seed in 0u64..1000, d in 2usize..4, pts in proptest::collection::vec(-6i32..6, 9)) {
        let env = Environment::new(d, EdgeWeightModel::weibull(1.0, 0.8).unwrap(), seed).unwrap();
        let x = site(d, &pts[0..3]);
        let y = site(d, &pts[3..6]);
        let z = site(d, &pts[6..9]);
        let direct = t(&env, &x, &z);
        prop_assert!(direct <= t(&env, &x, &y) + t(&env, &y, &z) + 1e-12 * direct.max(1.0));
    }

    #[test]
    fn subadditive_along_axis(seed in 0u64..1000, m in 1i32..12, n in 1i32..12) {
        let env = Environment::new(2, EdgeWeightModel::exponential(1.0).unwrap(), seed).unwrap();
        let o = Site::origin(2);
        let a = Site::on_axis(2, 0, m);
        let b = Site::on_axis(2, 0, m + n);
        let whole = t(&env, &o, &b);
        prop_assert!(whole <= t(&env, &o, &a) + t(&env, &a, &b) + 1e-12 * whole);
    }

    #[test]
    fn restriction_is_monotone(seed in 0u64..1000, k in 2u32..6, x in 1i32..3) {
        let env = Environment::new(2, EdgeWeightModel::weibull(1.0, 0.5).unwrap(), seed).unwrap();
        let target = Site::new(&[x, -1]);
        let q = |region: Region| {
            passage_time(&env, &PassageQuery::new(Site::origin(2), target).within(region))
                .unwrap()
                .time
        };
        let small = q(Region::boxed(Site::origin(2), k));
        let large = q(Region::boxed(Site::origin(2), k + 2));
        let full = q(Region::Full);
        prop_assert!(small >= large && large >= full);
    }

    #[test]
    fn excluding_edges_never_helps(seed in 0u64..1000, n in 2i32..10) {
        let env = Environment::new(2, EdgeWeightModel::exponential(1.0).unwrap(), seed).unwrap();
        let target = Site::on_axis(2, 0, n);
        let excluded: EdgeSet = origin_edges(2).into_iter().skip(1).collect();
        let restricted =
            passage_time_excluding(&env, Site::origin(2), target, excluded).unwrap().time;
        prop_assert!(restricted >= t(&env, &Site::origin(2), &target));
    }

    #[test]
    fn geodesic_sums_to_time(seed in 0u64..1000, x in -8i32..8, y in -8i32..8) {
        let env = Environment::new(2, EdgeWeightModel::weibull(1.0, 0.7).unwrap(), seed).unwrap();
        let q = PassageQuery::new(Site::origin(2), Site::new(&[x, y])).with_geodesic();
        let r = passage_time(&env, &q).unwrap();
        let path = r.geodesic.unwrap();
        let along = path_time(&env, &path).unwrap();
        prop_assert!((along - r.time).abs() <= 1e-9 * r.time.max(1e-300));
    }

    #[test]
    fn environments_are_pure(seed in any::<u64>(), x in -100i32..100, y in -100i32..100, axis in 0usize..2) {
        let model = EdgeWeightModel::weibull(1.0, 0.5).unwrap();
        let a = Environment::new(2, model.clone(), seed).unwrap();
        let b = Environment::new(2, model, seed).unwrap();
        let e = fpp_core::EdgeId::new(Site::new(&[x, y]), axis).unwrap();
        prop_assert_eq!(a.edge_weight(&e).to_bits(), b.edge_weight(&e).to_bits());
    }
}
