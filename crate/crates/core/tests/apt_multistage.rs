use deception_games::apt::{
    backward_induction, belief_update, comparative_statics, deviation_gain, evaluate_policies,
    monte_carlo, simulate, threat_sweep, AptGameSpec, AptOptions, BeliefState, LinearPayoff,
    Player, ToyPlantConfig, TypeBuckets,
};
use deception_games::oracle::{apt_bellman_residual, enumerate_root};
use deception_games::GameError;
use proptest::prelude::*;

fn toy() -> AptGameSpec {
    ToyPlantConfig::default().build().unwrap()
}

#[test]
fn negative_exponents_are_rejected() {
    let b = BeliefState::new(2.0, 3.0).unwrap();
    assert!(matches!(
        belief_update(b, -1, 0),
        Err(GameError::InvalidParameter(_))
    ));
}

#[test]
fn toy_solution_is_an_equilibrium() {
    let game = toy();
    let sol = backward_induction(&game, &AptOptions::default()).unwrap();
    assert!(apt_bellman_residual(&game, &sol.values, &sol.policies) <= 1e-12);
    for player in [Player::Attacker, Player::Defender] {
        let gain = deviation_gain(&game, &sol.policies, player, 100).unwrap();
        assert!(gain <= 1e-9, "{player:?} gains {gain}");
    }
    let mc = monte_carlo(&game, &sol.policies, 20_000, 11).unwrap();
    assert!((mc.defender_mean - sol.root_value()).abs() <= 3.0 * mc.defender_std_error);
}

#[test]
fn stored_values_match_a_fresh_evaluation() {
    let game = toy();
    let sol = backward_induction(&game, &AptOptions::default()).unwrap();
    let fresh = evaluate_policies(&game, &sol.policies).unwrap();
    for (key, v) in &sol.values.nodes {
        let f = fresh.get(key).unwrap();
        assert!((f.defender - v.defender).abs() < 1e-12);
    }
}

#[test]
fn secure_state_is_left_alone() {
    let game = toy();
    let sol = backward_induction(&game, &AptOptions::default()).unwrap();
    for (key, d) in &sol.policies.decisions {
        if key.state == 0 {
            assert_eq!(d.defender[game.defend_action], 0.0, "{key:?}");
            assert!(d.attacker.iter().all(|p| p[game.attack_message] == 0.0));
        }
    }
}

#[test]
fn defence_grows_with_threat() {
    let game = toy();
    let beliefs = threat_sweep(
        BeliefState::new(1.0, 9.0).unwrap(),
        BeliefState::new(9.0, 1.0).unwrap(),
        17,
    )
    .unwrap();
    let points = comparative_statics(&game, &AptOptions::default(), &beliefs).unwrap();
    for w in points.windows(2) {
        assert!(w[1].defend_probability >= w[0].defend_probability);
    }
    assert!(points[0].defend_probability < points[16].defend_probability);
    // the threshold trends upward but is not monotone point by point
    assert!(points[0].attack_threshold < points[16].attack_threshold);
}

#[test]
fn trajectories_are_reproducible() {
    let game = toy();
    let sol = backward_induction(&game, &AptOptions::default()).unwrap();
    let a = simulate(&game, &sol.policies, 0.9, 5).unwrap();
    let b = simulate(&game, &sol.policies, 0.9, 5).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.steps.len(), game.horizon);
    let csv = a.to_csv(&game);
    assert_eq!(csv.lines().count(), game.horizon + 1);
    assert!(simulate(&game, &sol.policies, 1.5, 5).is_err());
}

fn payoff(values: &[f64], i: &mut usize) -> LinearPayoff {
    let p = LinearPayoff::new(values[*i % values.len()], values[(*i + 1) % values.len()]);
    *i += 2;
    p
}

/// Two states, two stages, two messages and two actions with arbitrary payoffs.
fn small_game(values: Vec<f64>, moves: Vec<usize>, prior: (f64, f64)) -> AptGameSpec {
    let (horizon, n, nm, na) = (2, 2, 2, 2);
    let (mut i, mut j) = (0, 0);
    let mut table = |vals: &[f64]| -> Vec<Vec<Vec<Vec<LinearPayoff>>>> {
        (0..horizon)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        (0..nm)
                            .map(|_| (0..na).map(|_| payoff(vals, &mut i)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect()
    };
    let sender_utility = table(&values);
    let receiver_utility = table(&values.iter().rev().copied().collect::<Vec<_>>());
    let transition = (0..horizon)
        .map(|_| {
            (0..n)
                .map(|_| {
                    (0..nm)
                        .map(|_| {
                            (0..na)
                                .map(|_| {
                                    j += 1;
                                    moves[j % moves.len()] % n
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    AptGameSpec {
        horizon,
        n_states: n,
        messages: vec!["normal".into(), "attack".into()],
        actions: vec!["allow".into(), "defend".into()],
        likelihood: vec![[0, 1], [1, 0]],
        transition,
        sender_utility,
        receiver_utility,
        initial_state: 0,
        prior: BeliefState::new(prior.0, prior.1).unwrap(),
        attack_message: 1,
        defend_action: 1,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn updates_compose(
        a in 0.1..20.0f64,
        b in 0.1..20.0f64,
        s in 0i64..6,
        t in 0i64..6,
        u in 0i64..6,
        v in 0i64..6,
    ) {
        let prior = BeliefState::new(a, b).unwrap();
        let two = belief_update(belief_update(prior, s, t).unwrap(), u, v).unwrap();
        let one = belief_update(prior, s + u, t + v).unwrap();
        prop_assert!((two.a - one.a).abs() < 1e-12 && (two.b - one.b).abs() < 1e-12);
    }

    #[test]
    fn bucket_masses_form_a_distribution(a in 0.2..30.0f64, b in 0.2..30.0f64, n in 1usize..16) {
        let buckets = TypeBuckets::new(n).unwrap();
        let masses = buckets.masses(&BeliefState::new(a, b).unwrap());
        prop_assert_eq!(masses.len(), n);
        prop_assert!(masses.iter().all(|m| *m >= 0.0));
        prop_assert!((masses.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_games_agree_with_tree_enumeration(
        values in prop::collection::vec(-2.0..2.0f64, 7..13),
        moves in prop::collection::vec(0usize..2, 3..9),
        a in 0.5..6.0f64,
        b in 0.5..6.0f64,
    ) {
        let game = small_game(values, moves, (a, b));
        let options = AptOptions { buckets: 4, defender_grid: 20 };
        let sol = backward_induction(&game, &options).unwrap();
        let root = enumerate_root(&game, 4, 20).unwrap();
        prop_assert!((root.defender_value - sol.root_value()).abs() < 1e-9);
        prop_assert_eq!(&root.defender, &sol.root_decision().defender);
        prop_assert!(apt_bellman_residual(&game, &sol.values, &sol.policies) < 1e-9);
        for player in [Player::Attacker, Player::Defender] {
            let gain = deviation_gain(&game, &sol.policies, player, 20).unwrap();
            prop_assert!(gain <= 1e-9, "{:?} gains {}", player, gain);
        }
    }
}
