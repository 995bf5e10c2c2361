use certikit::certify::{chunked_certificate, ChunkSize};
use certikit::sampling::{
    agreement_probability_curve, certificate_coefficient_mc, draw_labeled, prob_at_least_unseen, rejection_sample,
    run_trials, sample_size_bound, tightness_experiments, trial_rng, Distribution, McConfig, Reweighted,
    ReweightingScheme, TightnessParams, TightnessTerm,
};
use certikit::{CertError, Hypothesis, HypothesisFamily, Label, Oracle, Point};
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[test]
fn rejection_sampling_matches_tilted_distribution() {
    let probs = [0.1, 0.2, 0.3, 0.25, 0.15];
    let weights = [1.0, 0.5, 0.2, 0.8, 0.0];
    let dist = Distribution::finite(vec![1, 2, 3, 4, 5], probs.to_vec()).unwrap();
    let scheme = ReweightingScheme::table((1..=5).zip(weights).collect()).unwrap();
    let z: f64 = probs.iter().zip(&weights).map(|(p, w)| p * w).sum();
    let mut rng = trial_rng(2024, 0);
    let n = 100_000;
    let mut counts = [0usize; 5];
    for _ in 0..n {
        let (p, _) = rejection_sample(&dist, &scheme, &mut rng, 1_000).unwrap();
        counts[p.as_discrete().unwrap() - 1] += 1;
    }
    assert_eq!(counts[4], 0);
    let stat: f64 = (0..4)
        .map(|i| {
            let expected = n as f64 * probs[i] * weights[i] / z;
            (counts[i] as f64 - expected).powi(2) / expected
        })
        .sum();
    let p_value = 1.0 - ChiSquared::new(3.0).unwrap().cdf(stat);
    assert!(p_value > 0.001, "chi-square {stat}, p = {p_value}");
}

#[test]
fn constant_one_scheme_accepts_every_draw() {
    let dist = Distribution::unit_ball(3).unwrap();
    let scheme = ReweightingScheme::constant(1.0).unwrap();
    let mut rng = trial_rng(5, 0);
    for _ in 0..1000 {
        assert_eq!(rejection_sample(&dist, &scheme, &mut rng, 10).unwrap().1, 1);
    }
}

#[test]
fn planar_half_ball_acceptance_rate_is_a_quarter() {
    let dist = Distribution::unit_ball(2).unwrap();
    let scheme = ReweightingScheme::ball_indicator(vec![0.5, 0.0], 0.5).unwrap();
    let mut rng = trial_rng(9, 0);
    let accepted = 20_000;
    let draws: u64 = (0..accepted)
        .map(|_| rejection_sample(&dist, &scheme, &mut rng, 10_000).unwrap().1)
        .sum();
    let rate = accepted as f64 / draws as f64;
    let sigma = (0.25 * 0.75 / draws as f64).sqrt();
    assert!((rate - 0.25).abs() < 4.0 * sigma, "rate {rate}");
}

#[test]
fn curve_is_monotone_within_noise() {
    let family = HypothesisFamily::singletons(3).unwrap();
    let oracle = Oracle::new(&family);
    let dist = Distribution::uniform_on(vec![1, 2]).unwrap();
    let grid = [1, 2, 3, 4, 6, 8, 12, 16];
    let curve = agreement_probability_curve(
        &oracle,
        &dist,
        &Hypothesis::Id(3),
        &Point::Discrete(3),
        1,
        &grid,
        400,
        11,
    )
    .unwrap();
    for pair in curve.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let var = |p: f64, n: usize| p * (1.0 - p) / n as f64;
        let slack = 3.0 * (var(a.probability, a.trials) + var(b.probability, b.trials)).sqrt();
        assert!(b.probability >= a.probability - slack, "{a:?} then {b:?}");
    }
    assert_eq!(curve[0].probability, 0.0);
    assert!(curve.last().unwrap().probability > 0.99);
}

#[test]
fn zero_coefficient_is_never_certified() {
    let family = HypothesisFamily::singletons(3).unwrap();
    let oracle = Oracle::new(&family);
    // hypothesis 1 agrees with the target wherever this distribution puts mass
    let dist = Distribution::uniform_on(vec![2]).unwrap();
    let target = Hypothesis::Id(3);
    let test = Point::Discrete(3);
    for m in [1, 5, 20, 60] {
        let records = run_trials(&oracle, &dist, &target, &test, 0, m, 50, 3, m).unwrap();
        assert!(records.iter().all(|r| r.outcome == Some(false)));
    }
    let err = agreement_probability_curve(&oracle, &dist, &target, &test, 0, &[10], 10, 3).unwrap_err();
    assert!(matches!(err, CertError::Unboundable(_)));
}

#[test]
fn reweighted_ball_coefficient_is_one_half() {
    let family = HypothesisFamily::affine_halfspace(3).unwrap();
    let target = Hypothesis::Weights(vec![0.0, 0.0, 0.0, 1.0]);
    let test = Point::Vector(vec![0.5, 0.0, 0.0]);
    let dist = Distribution::unit_ball(3).unwrap();
    let scheme = ReweightingScheme::ball_indicator(vec![0.5, 0.0, 0.0], 0.5).unwrap();
    let sampler = Reweighted::new(&dist, &scheme);
    let seeds = 20;
    let inside = (0..seeds)
        .filter(|&seed| {
            let est = certificate_coefficient_mc(
                &family,
                &sampler,
                &target,
                &test,
                McConfig {
                    samples: 10_000,
                    directions: 32,
                    seed,
                },
            )
            .unwrap();
            (est.estimate - 0.5).abs() <= est.half_width
        })
        .count();
    // a 95% interval should cover in most runs
    assert!(inside >= 16, "covered in {inside} of {seeds} runs");
}

#[test]
fn unit_ball_coefficient_is_at_most_the_cap() {
    let family = HypothesisFamily::affine_halfspace(2).unwrap();
    let target = Hypothesis::Weights(vec![0.0, 0.0, 1.0]);
    let test = Point::Vector(vec![0.5, 0.0]);
    let dist = Distribution::unit_ball(2).unwrap();
    let est = certificate_coefficient_mc(
        &family,
        &dist,
        &target,
        &test,
        McConfig {
            samples: 50_000,
            directions: 64,
            seed: 1,
        },
    )
    .unwrap();
    // area of the disk segment {x_1 >= 1/2} over the disk area
    let theta = 2.0 * 0.5f64.acos();
    let cap = (theta - theta.sin()) / (2.0 * std::f64::consts::PI);
    assert!(est.estimate <= cap + est.half_width, "{est:?} vs cap {cap}");
    assert!(est.estimate >= cap - 3.0 * est.half_width);
}

#[test]
fn centered_test_has_coefficient_one_half() {
    let family = HypothesisFamily::affine_halfspace(2).unwrap();
    let target = Hypothesis::Weights(vec![0.0, 0.0, 1.0]);
    let dist = Distribution::unit_ball(2).unwrap();
    let est = certificate_coefficient_mc(
        &family,
        &dist,
        &target,
        &Point::Vector(vec![0.0, 0.0]),
        McConfig {
            samples: 50_000,
            directions: 64,
            seed: 4,
        },
    )
    .unwrap();
    assert!((est.estimate - 0.5).abs() <= 2.0 * est.half_width, "{est:?}");
}

/// `P(at least j of k coupons unseen after m draws)` by a Markov chain on the number seen.
fn unseen_by_chain(k: usize, m: usize, j: usize) -> f64 {
    let mut dist = vec![0.0; k + 1];
    dist[0] = 1.0;
    for _ in 0..m {
        let mut next = vec![0.0; k + 1];
        for (seen, &p) in dist.iter().enumerate() {
            let new = (k - seen) as f64 / k as f64;
            next[seen] += p * (1.0 - new);
            if seen < k {
                next[seen + 1] += p * new;
            }
        }
        dist = next;
    }
    dist.iter()
        .enumerate()
        .filter(|&(seen, _)| k - seen >= j)
        .map(|(_, p)| p)
        .sum()
}

proptest! {
    #[test]
    fn coupon_formula_matches_markov_chain(k in 1usize..=20, m in 0usize..=60, j in 0usize..=21) {
        let a = prob_at_least_unseen(k, m, j);
        let b = if j > k { 0.0 } else { unseen_by_chain(k, m, j) };
        prop_assert!((a - b).abs() < 1e-8, "k={} m={} j={}: {} vs {}", k, m, j, a, b);
    }

    #[test]
    fn sample_size_bound_is_monotone(
        b in 0u64..20,
        d in 1usize..20,
        eps in 0.001f64..1.0,
        delta in 0.001f64..0.999,
        shrink in 0.1f64..0.99,
    ) {
        let base = sample_size_bound(b, d, eps, delta, 8.0).unwrap();
        prop_assert!(sample_size_bound(b + 1, d, eps, delta, 8.0).unwrap() >= base);
        prop_assert!(sample_size_bound(b, d + 1, eps, delta, 8.0).unwrap() >= base);
        prop_assert!(sample_size_bound(b, d, eps * shrink, delta, 8.0).unwrap() >= base);
        prop_assert!(sample_size_bound(b, d, eps, delta * shrink, 8.0).unwrap() >= base);
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let run = || {
        let family = HypothesisFamily::singletons(3).unwrap();
        let oracle = Oracle::new(&family);
        let dist = Distribution::uniform_on(vec![1, 2]).unwrap();
        let target = Hypothesis::Id(3);
        let test = Point::Discrete(3);
        let curve = agreement_probability_curve(&oracle, &dist, &target, &test, 1, &[2, 4, 8], 200, 77).unwrap();
        let stream = draw_labeled(&family, &dist, &target, 256, &mut trial_rng(77, 0)).unwrap();
        let chunked = chunked_certificate(&oracle, &stream, 1, &test, Label::Pos, ChunkSize::Fixed(4), 2).unwrap();
        let tight = tightness_experiments(TightnessTerm::Delta, &TightnessParams::default(), 300, 77).unwrap();
        (
            serde_json::to_string(&curve).unwrap(),
            chunked.certificate.indices,
            serde_json::to_string(&tight).unwrap(),
        )
    };
    let in_pool = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(run)
    };
    assert_eq!(in_pool(1), in_pool(4));
}
