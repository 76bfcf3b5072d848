use proptest::prelude::*;
use psequiv::catalog::{bertrand_demand, bertrand_profits, example_game, polynomial_game, BertrandParams, ExampleGame};
use psequiv::equivalence::{monfg_from_continuous, ConvexBody, StrategyBijection};
use psequiv::game::{
    identity_payoffs, BoxStrategySet, JointMixedStrategy, MixedStrategy, Monfg, PayoffTensor, ScalarUtility,
};
use psequiv::hierarchical::{collapse_to_mixed, hierarchical_utility, HierarchicalStrategy};
use psequiv::solvers::{
    best_response, continuous_deviation_gains, fictitious_play, verify_ne, BestResponseConfig, FpConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// A point of the probability simplex with `k` vertices.
fn simplex(k: usize) -> impl Strategy<Value = MixedStrategy> {
    prop::collection::vec(0.0f64..1.0, k).prop_map(|w| {
        let total: f64 = w.iter().sum::<f64>() + 1e-9;
        let mut p: Vec<f64> = w.iter().map(|x| x / total).collect();
        let rest = 1.0 - p.iter().sum::<f64>();
        p[0] += rest;
        MixedStrategy::new(p).unwrap()
    })
}

fn joint(counts: Vec<usize>) -> impl Strategy<Value = JointMixedStrategy> {
    counts.into_iter().map(simplex).collect::<Vec<_>>().prop_map(JointMixedStrategy::new)
}

fn counts_and_joint() -> impl Strategy<Value = (Vec<usize>, JointMixedStrategy)> {
    prop::collection::vec(2usize..=4, 1..=3).prop_flat_map(|c| (Just(c.clone()), joint(c)))
}

fn random_game() -> impl Strategy<Value = Monfg> {
    (prop::collection::vec(2usize..=3, 2..=3), 1usize..=3).prop_flat_map(|(dims, d)| {
        let n = dims.len();
        let size = dims.iter().product::<usize>() * d;
        prop::collection::vec(prop::collection::vec(-5.0f64..5.0, size), n).prop_map(move |tables| {
            Monfg::new(tables.into_iter().map(|t| PayoffTensor::new(dims.clone(), d, t).unwrap()).collect()).unwrap()
        })
    })
}

fn game_and_joint() -> impl Strategy<Value = (Monfg, JointMixedStrategy)> {
    random_game().prop_flat_map(|g| {
        let c = g.action_counts().to_vec();
        (Just(g), joint(c))
    })
}

proptest! {
    #[test]
    fn identity_game_returns_concatenated_strategies((counts, joint) in counts_and_joint()) {
        let mo = identity_payoffs(counts.len(), &counts).unwrap();
        for i in 0..counts.len() {
            prop_assert!(sup(&mo.expected_payoff(i, &joint).unwrap(), &joint.concat()) <= 1e-12);
        }
    }

    #[test]
    fn expected_payoff_is_affine_in_own_strategy(
        (game, base) in game_and_joint(),
        lambda in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = (seed % game.n_players() as u64) as usize;
        let k = game.action_counts()[i];
        let other = MixedStrategy::new(psequiv::game::sample_simplex(k, &mut rng)).unwrap();
        let mix: Vec<f64> = base.players()[i].probs().iter().zip(other.probs()).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        let with = |d: MixedStrategy| {
            let mut j = base.clone();
            j.0[i] = d;
            game.expected_payoff(i, &j).unwrap()
        };
        let lhs = with(MixedStrategy::new(mix).unwrap());
        let a = with(base.players()[i].clone());
        let b = with(other);
        let rhs: Vec<f64> = a.iter().zip(&b).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect();
        prop_assert!(sup(&lhs, &rhs) <= 1e-10);
    }

    #[test]
    fn pure_profiles_read_the_tensor(game in random_game(), seed in any::<u64>()) {
        let profile: Vec<usize> = game.action_counts().iter().enumerate().map(|(j, &k)| ((seed >> (4 * j)) as usize) % k).collect();
        let joint = JointMixedStrategy::new(
            profile.iter().zip(game.action_counts()).map(|(&a, &k)| MixedStrategy::pure(k, a).unwrap()).collect(),
        );
        for i in 0..game.n_players() {
            prop_assert_eq!(game.expected_payoff(i, &joint).unwrap(), game.payoff(i).unwrap().get(&profile).unwrap().to_vec());
        }
    }

    #[test]
    fn mixed_strategy_clamps_tiny_negatives(eps in 0.0f64..1e-12, p in 0.0f64..1.0) {
        let s = MixedStrategy::new(vec![-eps, p, 1.0 - p + eps]).unwrap();
        prop_assert!(s.probs().iter().all(|&x| x >= 0.0));
        prop_assert!((s.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(MixedStrategy::new(vec![p, 1.0 - p + 2e-9]).is_err());
    }

    #[test]
    fn interval_bijections_round_trip(lo in -100.0f64..100.0, width in 1e-3f64..100.0, seed in any::<u64>()) {
        let b = StrategyBijection::interval(lo, lo + width).unwrap();
        let (d, s) = b.round_trip_errors(50, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!(d <= 1e-7 * width.max(1.0) && s <= 1e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn box_bijections_round_trip(
        bounds in prop::collection::vec((-3.0f64..3.0, 0.5f64..4.0), 2..=3),
        seed in any::<u64>(),
    ) {
        let lower: Vec<f64> = bounds.iter().map(|b| b.0).collect();
        let upper: Vec<f64> = bounds.iter().map(|b| b.0 + b.1).collect();
        let bx = BoxStrategySet::new(lower, upper).unwrap();
        let b = StrategyBijection::box_to_simplex(&bx).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d, s) = b.round_trip_errors(20, &mut rng).unwrap();
        prop_assert!(d <= 1e-7 && s <= 1e-7, "errors {d} {s}");
        let image = b.forward(&bx.sample(&mut rng)).unwrap();
        prop_assert!((image.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert!(image.probs().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn minkowski_gauge_is_homogeneous_and_normalised(
        half in prop::collection::vec(0.5f64..3.0, 2..=3),
        dir in prop::collection::vec(-1.0f64..1.0, 3),
        alpha in 0.01f64..20.0,
    ) {
        let lower: Vec<f64> = half.iter().map(|h| -h).collect();
        let body = ConvexBody::from_box(&BoxStrategySet::new(lower, half.clone()).unwrap()).unwrap();
        let y: Vec<f64> = dir[..half.len()].to_vec();
        prop_assume!(y.iter().any(|v| v.abs() > 1e-3));
        let p = body.minkowski(&y).unwrap();
        let scaled: Vec<f64> = y.iter().map(|v| alpha * v).collect();
        prop_assert!((body.minkowski(&scaled).unwrap() - alpha * p).abs() <= 1e-8 * (alpha * p).max(1.0));
        // The box gauge in closed form.
        let exact = y.iter().zip(&half).map(|(v, h)| v.abs() / h).fold(0.0, f64::max);
        prop_assert!((p - exact).abs() <= 1e-8);
        prop_assert!((body.minkowski(&body.boundary_point(&y).unwrap()).unwrap() - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn hierarchical_utility_dominates_collapse_under_convex_utility(
        atoms1 in prop::collection::vec(simplex(2), 1..=3),
        atoms2 in prop::collection::vec(simplex(2), 1..=3),
        w in prop::collection::vec(0.01f64..1.0, 6),
    ) {
        let (mo, utils) = example_game(ExampleGame::Balanced2x2);
        let weights = |n: usize, off: usize| {
            let s: f64 = w[off..off + n].iter().sum();
            w[off..off + n].iter().map(|x| x / s).collect::<Vec<_>>()
        };
        let mu = vec![
            HierarchicalStrategy::new(atoms1.clone(), weights(atoms1.len(), 0)).unwrap(),
            HierarchicalStrategy::new(atoms2.clone(), weights(atoms2.len(), 3)).unwrap(),
        ];
        let collapsed = JointMixedStrategy::new(mu.iter().map(collapse_to_mixed).collect());
        for i in 0..2 {
            let h = hierarchical_utility(&mo, &utils[i], i, &mu).unwrap();
            let m = mo.strategy_utility(&utils[i], i, &collapsed).unwrap();
            prop_assert!(h >= m - 1e-10, "{h} < {m}");
        }
    }

    #[test]
    fn point_mass_hierarchical_utility_equals_mixed_utility((game, j) in game_and_joint()) {
        let u = ScalarUtility::new("sum of squares", game.objective_count(), |p| p.iter().map(|x| x * x).sum());
        let mu: Vec<HierarchicalStrategy> = j.players().iter().cloned().map(HierarchicalStrategy::point_mass).collect();
        for i in 0..game.n_players() {
            let h = hierarchical_utility(&game, &u, i, &mu).unwrap();
            prop_assert!((h - game.strategy_utility(&u, i, &j).unwrap()).abs() <= 1e-12 * h.abs().max(1.0));
        }
    }

    #[test]
    fn hierarchical_utility_is_affine_in_weights(
        atoms in prop::collection::vec(simplex(2), 3),
        other in simplex(2),
        w1 in prop::collection::vec(0.01f64..1.0, 3),
        w2 in prop::collection::vec(0.01f64..1.0, 3),
        lambda in 0.0f64..=1.0,
    ) {
        let (mo, utils) = example_game(ExampleGame::Balanced2x2);
        let norm = |w: &[f64]| { let s: f64 = w.iter().sum(); w.iter().map(|x| x / s).collect::<Vec<_>>() };
        let (a, b) = (norm(&w1), norm(&w2));
        let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect();
        let value = |w: Vec<f64>| {
            let mu = vec![HierarchicalStrategy::new(atoms.clone(), w).unwrap(), HierarchicalStrategy::point_mass(other.clone())];
            hierarchical_utility(&mo, &utils[0], 0, &mu).unwrap()
        };
        let lhs = value(mix);
        let rhs = lambda * value(a) + (1.0 - lambda) * value(b);
        prop_assert!((lhs - rhs).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn best_response_beats_fine_scan(
        table in prop::collection::vec(-3.0f64..3.0, 8),
        coeffs in prop::collection::vec(-1.0f64..1.0, 5),
        opponent in simplex(2),
        player in 0usize..2,
    ) {
        let game = Monfg::shared(PayoffTensor::new(vec![2, 2], 2, table).unwrap()).unwrap();
        let c = coeffs.clone();
        let u = ScalarUtility::new("quadratic", 2, move |p| c[0] * p[0] + c[1] * p[1] + c[2] * p[0] * p[0] + c[3] * p[1] * p[1] + c[4] * p[0] * p[1]);
        let br = best_response(&game, &u, player, std::slice::from_ref(&opponent), &BestResponseConfig::default()).unwrap();
        let mut joint = JointMixedStrategy::new(vec![opponent.clone(), opponent]);
        let mut scan = f64::NEG_INFINITY;
        for k in 0..100_000 {
            let t = k as f64 / 99_999.0;
            joint.0[player] = MixedStrategy::new(vec![t, 1.0 - t]).unwrap();
            scan = scan.max(game.strategy_utility(&u, player, &joint).unwrap());
        }
        prop_assert!(br.utility >= scan - 1e-6, "{} < {scan}", br.utility);
    }

    #[test]
    fn verified_strategies_survive_a_doubled_grid(dx in -0.004f64..0.004, dy in -0.004f64..0.004) {
        let bij = vec![StrategyBijection::interval(-1.0, 1.0).unwrap(); 2];
        let (mo, utils) = monfg_from_continuous(&polynomial_game(), &bij).unwrap();
        let x = 16f64.powf(-1.0 / 3.0);
        let candidate = JointMixedStrategy::new(vec![bij[0].forward(&[x + dx]).unwrap(), bij[1].forward(&[1.0 / (4.0 * x) + dy]).unwrap()]);
        let cfg = BestResponseConfig::default();
        let report = verify_ne(&mo, &utils, &candidate, &cfg, 1e-3).unwrap();
        if report.passed {
            let fine = verify_ne(&mo, &utils, &candidate, &cfg.doubled(), 1e-3).unwrap();
            prop_assert!(fine.max_gain() <= 1e-3, "doubled grid gain {}", fine.max_gain());
            // The inverse-mapped strategy is an equilibrium of the continuous game too.
            let gains = continuous_deviation_gains(&polynomial_game(), &[vec![x + dx], vec![1.0 / (4.0 * x) + dy]], 10_000).unwrap();
            prop_assert!(gains.iter().all(|&g| g <= 1e-3 + 1e-6), "{gains:?}");
        }
    }

    #[test]
    fn fictitious_play_is_deterministic(seed in any::<u64>()) {
        let bij = vec![StrategyBijection::interval(-1.0, 1.0).unwrap(); 2];
        let (mo, utils) = monfg_from_continuous(&polynomial_game(), &bij).unwrap();
        let fp = FpConfig { iterations: 15, trials: 2, seed, record_every: 1 };
        let br = BestResponseConfig { grid_points_per_dim: 201, ..Default::default() };
        prop_assert_eq!(fictitious_play(&mo, &utils, &fp, &br).unwrap(), fictitious_play(&mo, &utils, &fp, &br).unwrap());
    }

    #[test]
    fn bertrand_profits_are_symmetric(p in 1.0f64..30.0, q in 1.0f64..30.0) {
        let params = BertrandParams::paper();
        let (rx, ry) = bertrand_profits(&params, p, q).unwrap();
        let (sx, sy) = bertrand_profits(&params, q, p).unwrap();
        prop_assert_eq!(rx, sy);
        prop_assert_eq!(ry, sx);
    }
}

#[test]
fn bertrand_demand_is_positive_on_the_price_grid() {
    let params = BertrandParams::paper();
    for i in 0..100 {
        for j in 0..100 {
            let px = 1.0 + 29.0 * i as f64 / 99.0;
            let py = 1.0 + 29.0 * j as f64 / 99.0;
            assert!(bertrand_demand(&params, px, py).unwrap() > 0.0, "d_x({px}, {py})");
        }
    }
}

#[test]
fn polynomial_game_is_zero_sum() {
    let g = polynomial_game();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..1000 {
        let s = g.sample_joint(&mut rng);
        assert!((g.utility(0, &s).unwrap() + g.utility(1, &s).unwrap()).abs() <= 1e-12);
    }
}
