use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tvlab::adversary::{
    consistency_set, exact_posterior, flip_event_probability, multi_consistency_probability,
    weighted_categorical_adversary, ConsistencySet,
};
use tvlab::covers::{canonical_entropy_profile, verify_categorical_cover};
use tvlab::harness::{run_trials, RateEstimate, TrialOutcome};
use tvlab::learners::{noisy_majority_confident, pac_to_wtv, ubme_wtv, MajorityConstant, SampleSizePlan, SizeRule};
use tvlab::{
    categorical_canonical_cover, categorical_distance_closed_form,
    cube_distance_closed_form, exact_distance, greedy_cover, sample, tv_class_conditional, CategoricalInstance,
    DistanceMatrix, NoisyCubeInstance, Point, Teacher,
};

fn cube(n: usize, rho: f64, bits: u64) -> (NoisyCubeInstance<f64>, Point) {
    (NoisyCubeInstance::new(n, rho).unwrap(), Point::from_bits(n, bits))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cube_distances_form_a_pseudometric(n in 2usize..10, rho in 0.0f64..0.5, bits: u64) {
        let (inst, x) = cube(n, rho, bits);
        let d = inst.distribution(x.clone()).unwrap();
        let m = DistanceMatrix::exact(&d, &inst.dictators()).unwrap();
        for i in 0..n {
            prop_assert_eq!(m.get(i, i), 0.0);
            for j in 0..n {
                prop_assert_eq!(m.get(i, j), m.get(j, i));
                if i != j {
                    let c = cube_distance_closed_form(&x, rho, i, j).unwrap();
                    prop_assert!((c - m.get(i, j)).abs() <= 1e-12);
                }
                for k in 0..n {
                    prop_assert!(m.get(i, k) <= m.get(i, j) + m.get(j, k) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn categorical_closed_form_matches_product_path(n in 2usize..40, special_seed: usize, j_seed: usize, k_seed: usize) {
        let inst = CategoricalInstance::<f64>::new(n).unwrap();
        let special = special_seed % n;
        let j = j_seed % n;
        let k = (j + 1 + k_seed % (n - 1)) % n;
        let d = inst.distribution(special).unwrap();
        let class = inst.indicators();
        let exact = exact_distance(&d, class.get(j), class.get(k)).unwrap();
        let closed = categorical_distance_closed_form(&inst, special, j, k).unwrap();
        prop_assert!((exact - closed).abs() <= 1e-12);
    }

    #[test]
    fn single_precision_tracks_double(n in 2usize..12, rho in 0.0f64..0.5, bits: u64, i_seed: usize, j_seed: usize) {
        let x = Point::from_bits(n, bits);
        let i = i_seed % n;
        let j = (i + 1 + j_seed % (n - 1)) % n;
        let a = cube_distance_closed_form(&x, rho, i, j).unwrap();
        let b = cube_distance_closed_form(&x, rho as f32, i, j).unwrap();
        prop_assert!((a - b as f64).abs() <= 1e-5);
    }

    #[test]
    fn class_conditional_tv_is_a_pseudometric(n in 2usize..8, rho in 0.0f64..0.5, a: u64, b: u64, c: u64) {
        let inst = NoisyCubeInstance::<f64>::new(n, rho).unwrap();
        let class = inst.dictators();
        let [da, db, dc] = [a, b, c].map(|s| inst.distribution(Point::from_bits(n, s)).unwrap());
        let ab = tv_class_conditional(&da, &db, &class).unwrap();
        let ba = tv_class_conditional(&db, &da, &class).unwrap();
        let ac = tv_class_conditional(&da, &dc, &class).unwrap();
        let cb = tv_class_conditional(&dc, &db, &class).unwrap();
        prop_assert_eq!(tv_class_conditional(&da, &da, &class).unwrap(), 0.0);
        prop_assert_eq!(ab, ba);
        prop_assert!(ab <= ac + cb + 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab));
    }

    #[test]
    fn estimates_are_symmetric_with_zero_diagonal(n in 2usize..8, rho in 0.0f64..0.5, bits: u64, seed: u64, m in 1usize..60) {
        let (inst, x) = cube(n, rho, bits);
        let d = inst.distribution(x).unwrap();
        let class = inst.dictators();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = sample(&d, m, &mut rng).unwrap();
        let tp = sample(&d, m, &mut rng).unwrap();
        let ubme = ubme_wtv::<f64>(&class, &t).unwrap();
        let pac = pac_to_wtv::<f64>(&MajorityConstant, &class, &t, &tp).unwrap();
        for est in [&ubme, &pac.estimate] {
            for i in 0..n {
                prop_assert_eq!(est.get(i, i), 0.0);
                for j in 0..n {
                    prop_assert_eq!(est.get(i, j), est.get(j, i));
                    prop_assert!((0.0..=1.0).contains(&est.get(i, j)));
                }
            }
        }
    }

    #[test]
    fn size_rules_are_monotone(eps in 0.01f64..1.0, eps_up in 0.0f64..0.5, delta in 0.01f64..0.9, delta_up in 0.0f64..0.09, k in 1usize..10_000) {
        let rules = [
            SizeRule::CHERNOFF, SizeRule::ERM, SizeRule::STV_TO_PAC_ERM, SizeRule::PAC_TO_WTV,
            SizeRule::UBME_WTV, SizeRule::CATEGORICAL_WTV, SizeRule::MAJORITY,
        ];
        let eps2 = (eps + eps_up).min(1.0);
        let delta2 = delta + delta_up;
        for r in rules {
            let base = r.size(eps, delta, k).unwrap();
            prop_assert!(r.size(eps2, delta, k).unwrap() <= base);
            prop_assert!(r.size(eps, delta2, k).unwrap() <= base);
            prop_assert!(r.size(eps, delta, k + 1).unwrap() >= base);
        }
        let plan = SampleSizePlan::finite_class(k);
        for f in [SampleSizePlan::n_pac, SampleSizePlan::n_stv, SampleSizePlan::n_wtv, SampleSizePlan::n_etv, SampleSizePlan::n_ue] {
            prop_assert!(f(&plan, eps2, delta2).unwrap() <= f(&plan, eps, delta).unwrap());
        }
    }

    #[test]
    fn posterior_is_a_distribution_on_w(n in 1usize..60, t in 1u32..5, mask: u64) {
        let inst = CategoricalInstance::<f64>::new(n).unwrap();
        let members: Vec<usize> = (0..n).filter(|&j| mask >> (j % 64) & 1 == 1).collect();
        prop_assume!(!members.is_empty());
        let w = ConsistencySet::new(n, members).unwrap();
        let post = exact_posterior(&w, &inst, t).unwrap();
        let total: f64 = post.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        for (j, &p) in post.iter().enumerate() {
            if w.contains(j) {
                prop_assert!((p - 1.0 / w.len() as f64).abs() <= 1e-12);
            } else {
                prop_assert_eq!(p, 0.0);
            }
        }
    }

    #[test]
    fn drawn_index_is_always_consistent(n in 1usize..80, t in 1u32..4, seed: u64) {
        let inst = CategoricalInstance::<f64>::new(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw = weighted_categorical_adversary(&inst, t, &mut rng).unwrap();
        let s = Teacher::new(&draw.distribution, &draw.target).labeled(t as usize, &mut rng).unwrap();
        prop_assert!(consistency_set(&s, &inst).unwrap().contains(draw.index));
        let p = multi_consistency_probability(&inst, draw.index, t).unwrap();
        prop_assert!(p.exact <= p.bound + 1e-15);
    }

    #[test]
    fn flip_probabilities_are_probabilities(n in 1usize..1_000_000, rho in 0.0f64..=0.5, t in 1u32..10) {
        let e = flip_event_probability(n, rho, t).unwrap();
        prop_assert!((0.0..=1.0).contains(&e.some_always_flipped));
        prop_assert!(e.expected_unanimous <= n as f64 + 1e-9);
        prop_assert!(e.expected_unanimous <= e.unanimous_bound + 1e-9);
    }

    #[test]
    fn covers_are_valid_and_profiles_monotone(n in 2usize..9, rho in 0.0f64..0.5, bits: u64, special_seed: usize, size in 2usize..200) {
        let (inst, x) = cube(n, rho, bits);
        let d = inst.distribution(x).unwrap();
        let class = inst.dictators();
        let mut last = usize::MAX;
        for eps in [0.05, 0.1, 0.2, 0.4, 0.8] {
            let c = greedy_cover(&d, &class, eps).unwrap();
            prop_assert!(c.verify(&d, &class).unwrap() <= eps);
            prop_assert!(c.len() <= last);
            last = c.len();
        }
        let cat = CategoricalInstance::<f64>::new(size).unwrap();
        let special = special_seed % size;
        let grid = [0.125, 0.25, 0.5, 1.0];
        let profile = canonical_entropy_profile(&cat, special, &grid).unwrap();
        let mut smallest = usize::MAX;
        for (&eps, &(e, size)) in grid.iter().zip(profile.points()) {
            let pair = categorical_canonical_cover(&cat, special, eps).unwrap();
            prop_assert!(verify_categorical_cover(&pair, &cat, special).unwrap() <= eps);
            prop_assert!(pair.map().iter().all(Option::is_some));
            smallest = smallest.min(pair.len());
            prop_assert_eq!((e, size), (eps, smallest));
        }
    }

    #[test]
    fn noisy_majority_abstains_on_exactly_half(half in 1usize..40, rho in 0.0f64..0.5, bits: u64, seed: u64, t in 1usize..6) {
        let n = 2 * half;
        let (inst, x) = cube(n, rho, bits);
        let d = inst.distribution(x).unwrap();
        let s = sample(&d, t, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let out = noisy_majority_confident(&s).unwrap();
        prop_assert_eq!(out.labeled_count(), half);
        prop_assert_eq!(&out, &noisy_majority_confident(&s).unwrap());
    }

    #[test]
    fn wilson_brackets_the_point_and_ignores_order(flags in proptest::collection::vec(any::<bool>(), 1..300), rot in 0usize..300) {
        let r = RateEstimate::of(flags.iter().copied()).unwrap();
        prop_assert!(0.0 <= r.lower && r.lower <= r.point && r.point <= r.upper && r.upper <= 1.0);
        let mut shuffled = flags.clone();
        let len = shuffled.len();
        shuffled.rotate_left(rot % len);
        shuffled.reverse();
        prop_assert_eq!(RateEstimate::of(shuffled).unwrap(), r);
    }

    #[test]
    fn sampled_points_stay_in_the_domain(n in 1usize..30, seed: u64, m in 1usize..50) {
        let inst = CategoricalInstance::<f64>::new(n).unwrap();
        let d = inst.distribution(n / 2).unwrap();
        let s = sample(&d, m, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(s.len(), m);
        for x in s.iter() {
            prop_assert!(d.domain().contains(x));
            prop_assert!(x[n / 2] <= 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn trial_reports_do_not_depend_on_workers(trials in 1usize..40, seed: u64, workers in 1usize..4) {
        let f = |k: usize, rng: &mut ChaCha8Rng| {
            use rand::Rng;
            let u: f64 = rng.gen();
            Ok(TrialOutcome::new(u < 0.3).metric("u", u).metric("k", k as f64))
        };
        let a = run_trials("prop", trials, seed, Some(1), f).unwrap();
        let b = run_trials("prop", trials, seed, Some(workers), f).unwrap();
        prop_assert_eq!(a, b);
    }
}
