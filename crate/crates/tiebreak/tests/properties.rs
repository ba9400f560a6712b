//! Property suites: the random-game oracles and the structural invariants
//! the library promises. Random games come from a seeded generator, so every
//! failure is reproducible from the printed seed.

mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::GeneratorConfig;
use tiebreak::game::{
    canonicalize_outcomes, leaves, resolve, validate, Game, GameTree, NodeAddress, PlayerId,
    Utility,
};
use tiebreak::gdl;
use tiebreak::induction::{
    collapse, enumerate_spe, scenario_solve_all, solve_generic, solve_with_policy, subgame,
    Disposition, DispositionProfile, TieBreakPolicy,
};
use tiebreak::normalform::{
    best_responses, guaranteed_value_vs_rational, play, pure_nash, to_normal_form,
};
use tiebreak::repeated::{
    all_f, all_u, play_repeated, simultaneous_indifference, tit_for_tat, JointAction, StrategyRule,
};
use tiebreak::report;

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn tie_heavy(seed: u64) -> Game {
    common::random_game(&mut rng_for(seed), &GeneratorConfig::tie_heavy())
}

fn parser_corpus(seed: u64) -> Game {
    common::random_game(&mut rng_for(seed), &GeneratorConfig::parser())
}

fn generic(seed: u64) -> Game {
    common::random_generic_game(&mut rng_for(seed), &GeneratorConfig::tie_heavy())
}

fn random_profile(rng: &mut impl Rng, num_players: usize) -> DispositionProfile {
    DispositionProfile::new(
        (0..num_players)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    Disposition::Friendly
                } else {
                    Disposition::Unfriendly
                }
            })
            .collect(),
    )
}

proptest! {
    #[test]
    fn generated_games_are_valid(seed in any::<u64>()) {
        prop_assert!(validate(&tie_heavy(seed)).is_empty());
        prop_assert!(validate(&parser_corpus(seed)).is_empty());
        prop_assert!(validate(&generic(seed)).is_empty());
    }

    #[test]
    fn round_trip_and_canonical_stability(seed in any::<u64>()) {
        let game = parser_corpus(seed);
        let text = gdl::serialize(&game);
        let parsed = gdl::parse_game(&text)
            .unwrap_or_else(|e| panic!("canonical text must parse, got {e}\n{text}"));
        prop_assert_eq!(&parsed, &game);
        prop_assert_eq!(gdl::serialize(&parsed), text);
    }

    #[test]
    fn parse_errors_point_into_the_source(seed in any::<u64>(), cut in 0usize..2000) {
        let text = gdl::serialize(&parser_corpus(seed));
        let chars: Vec<char> = text.chars().collect();
        let truncated: String = chars[..cut.min(chars.len())].iter().collect();
        if let Err(e) = gdl::parse_game(&truncated) {
            let line_count = truncated.lines().count().max(1);
            prop_assert!(e.line >= 1 && e.line <= line_count,
                "line {} outside 1..={line_count}", e.line);
            let line_len = truncated
                .lines()
                .nth(e.line - 1)
                .map(|l| l.chars().count())
                .unwrap_or(0);
            prop_assert!(e.column >= 1 && e.column <= line_len + 1,
                "column {} outside 1..={}", e.column, line_len + 1);
        }
    }

    #[test]
    fn canonicalize_is_idempotent_and_shape_preserving(seed in any::<u64>()) {
        let game = parser_corpus(seed);
        let once = canonicalize_outcomes(&game);
        prop_assert_eq!(&canonicalize_outcomes(&once), &once);
        let original: Vec<_> = leaves(&game).into_iter().map(|(a, o)| (a, o.utilities.clone())).collect();
        let relabeled: Vec<_> = leaves(&once).into_iter().map(|(a, o)| (a, o.utilities.clone())).collect();
        prop_assert_eq!(original, relabeled);
    }

    #[test]
    fn every_leaf_address_resolves(seed in any::<u64>()) {
        let game = tie_heavy(seed);
        for (addr, outcome) in leaves(&game) {
            match resolve(&game, &addr) {
                Ok(GameTree::Leaf { outcome: found }) => prop_assert_eq!(found, outcome),
                other => prop_assert!(false, "address {} resolved to {:?}", addr, other),
            }
        }
    }

    #[test]
    fn spe_matches_brute_force(seed in any::<u64>()) {
        let game = tie_heavy(seed);
        let ours = common::spe_as_keys(&enumerate_spe(&game));
        let oracle = common::brute_force_spe(&game);
        prop_assert_eq!(ours, oracle);
    }

    #[test]
    fn pure_nash_matches_brute_force(seed in any::<u64>()) {
        let game = tie_heavy(seed);
        let nf = to_normal_form(&game);
        let ours: std::collections::BTreeSet<Vec<usize>> = pure_nash(&nf).into_iter().collect();
        prop_assert_eq!(ours, common::brute_force_nash(&game));
    }

    #[test]
    fn spe_profiles_are_nash(seed in any::<u64>()) {
        let game = tie_heavy(seed);
        let nash = common::brute_force_nash(&game);
        let per_player_maps: Vec<_> = game
            .players()
            .map(|p| common::player_strategy_maps(&game, p))
            .collect();
        for (profile, _) in enumerate_spe(&game) {
            let indices: Vec<usize> = profile
                .iter()
                .enumerate()
                .map(|(p, strategy)| {
                    common::strategy_index_in(&per_player_maps[p], strategy)
                        .expect("every SPE strategy is in the enumeration")
                })
                .collect();
            prop_assert!(nash.contains(&indices), "SPE profile {indices:?} is not Nash");
        }
    }

    #[test]
    fn affine_transforms_change_nothing_observable(
        seed in any::<u64>(),
        player_pick in any::<u64>(),
        scale_pick in 0usize..5,
        shift in -3i64..=3,
    ) {
        let game = tie_heavy(seed);
        let player = PlayerId::new((player_pick % game.num_players as u64) as usize + 1);
        let scales = ["1/2", "2", "3", "5/2", "1/3"];
        let a = parse_utility(scales[scale_pick]);
        let b = Utility::new(shift, 2).unwrap();
        let transformed = common::affine_transform(&game, player, a, b);

        let mut rng = rng_for(seed ^ 0x5eed);
        let policies = [
            TieBreakPolicy::FirstListed,
            TieBreakPolicy::ByProfile(random_profile(&mut rng, game.num_players)),
        ];
        for policy in &policies {
            let before = solve_with_policy(&game, policy).unwrap();
            let after = solve_with_policy(&transformed, policy).unwrap();
            prop_assert_eq!(&before.best_sets, &after.best_sets);
            prop_assert_eq!(&before.chosen_path, &after.chosen_path);
            prop_assert_eq!(&before.tie_nodes, &after.tie_nodes);
        }

        // Friendliness classifications and scores are scale-free.
        prop_assert_eq!(
            report::render_friendliness(&game).unwrap(),
            report::render_friendliness(&transformed).unwrap()
        );
    }

    #[test]
    fn policies_agree_on_generic_games(seed in any::<u64>(), target_pick in any::<u64>()) {
        let game = generic(seed);
        let reference = solve_generic(&game).unwrap();
        let target = PlayerId::new((target_pick % game.num_players as u64) as usize + 1);
        let mut rng = rng_for(seed ^ 0xfeed);
        let policies = [
            TieBreakPolicy::FirstListed,
            TieBreakPolicy::FriendlyTo(target),
            TieBreakPolicy::UnfriendlyTo(target),
            TieBreakPolicy::ByProfile(random_profile(&mut rng, game.num_players)),
        ];
        for policy in policies {
            let solved = solve_with_policy(&game, &policy).unwrap();
            prop_assert_eq!(&solved.chosen_path, &reference.chosen_path);
            prop_assert_eq!(&solved.root_value, &reference.root_value);
        }
    }

    #[test]
    fn collapsing_a_subgame_preserves_the_value(seed in any::<u64>(), node_pick in any::<u64>()) {
        let game = tie_heavy(seed);
        let nodes = tiebreak::game::decision_nodes(&game);
        prop_assume!(!nodes.is_empty());
        let (addr, _, _) = &nodes[(node_pick % nodes.len() as u64) as usize];
        let mut rng = rng_for(seed ^ 0xc0111a95e);
        let policies = [
            TieBreakPolicy::FirstListed,
            TieBreakPolicy::ByProfile(random_profile(&mut rng, game.num_players)),
        ];
        for policy in policies {
            let whole = solve_with_policy(&game, &policy).unwrap();
            let sub = subgame(&game, addr).unwrap();
            let sub_result = solve_with_policy(&sub, &policy).unwrap();
            let collapsed = collapse(&game, addr, &sub_result).unwrap();
            prop_assert!(validate(&collapsed).is_empty());
            let again = solve_with_policy(&collapsed, &policy).unwrap();
            prop_assert_eq!(&again.root_value, &whole.root_value);
        }
    }

    #[test]
    fn chosen_paths_replay_to_the_root_value(seed in any::<u64>()) {
        let game = tie_heavy(seed);
        let mut rng = rng_for(seed ^ 0x9a17);
        let policy = TieBreakPolicy::ByProfile(random_profile(&mut rng, game.num_players));
        let result = solve_with_policy(&game, &policy).unwrap();
        let leaf_addr = match result.chosen_path.last() {
            Some((addr, branch)) => addr.child(*branch),
            None => NodeAddress::root(),
        };
        match resolve(&game, &leaf_addr).unwrap() {
            GameTree::Leaf { outcome } => prop_assert_eq!(&outcome.utilities, &result.root_value),
            GameTree::Decision { .. } => prop_assert!(false, "path must end at a leaf"),
        }
        // Every chosen branch lies in its node's best set.
        for (addr, branch) in &result.chosen_path {
            prop_assert!(result.best_sets[addr].actions.contains(branch));
        }
    }

    #[test]
    fn scenario_tables_cover_all_profiles(seed in any::<u64>()) {
        let game = tie_heavy(seed);
        prop_assume!(game.num_players <= 3);
        let table = scenario_solve_all(&game).unwrap();
        prop_assert_eq!(table.len(), 1 << game.num_players);
    }

    #[test]
    fn payoff_tensor_agrees_with_play(seed in any::<u64>()) {
        let game = tie_heavy(seed);
        let nf = to_normal_form(&game);
        for profile in nf.profiles() {
            let strategies: Vec<_> = profile
                .iter()
                .enumerate()
                .map(|(p, &s)| nf.strategies(PlayerId::new(p + 1))[s].clone())
                .collect();
            let outcome = play(&game, &strategies).unwrap();
            prop_assert_eq!(nf.payoff(&profile), outcome.utilities.as_slice());
        }
    }

    #[test]
    fn guarantee_is_a_lower_bound_on_best_response_payoffs(seed in any::<u64>()) {
        let mut rng = rng_for(seed);
        let cfg = GeneratorConfig {
            max_players: 2,
            max_leaves: 8,
            max_branching: 3,
            inject_ties: true,
            fancy: false,
        };
        let game = common::random_game(&mut rng, &cfg);
        prop_assume!(game.num_players == 2);
        let nf = to_normal_form(&game);
        for player in [PlayerId::new(1), PlayerId::new(2)] {
            let opponent = PlayerId::new(3 - player.index());
            for s in 0..nf.strategies(player).len() {
                let guarantee = guaranteed_value_vs_rational(&nf, player, s).unwrap();
                let responses = best_responses(&nf, opponent, &[s]).unwrap();
                let own_payoffs: Vec<Utility> = responses
                    .iter()
                    .map(|&r| {
                        let mut profile = [0usize; 2];
                        profile[player.index0()] = s;
                        profile[opponent.index0()] = r;
                        nf.payoff(&profile)[player.index0()]
                    })
                    .collect();
                let max = *own_payoffs.iter().max().unwrap();
                prop_assert!(guarantee <= max);
                let constant = own_payoffs.iter().all(|&p| p == own_payoffs[0]);
                prop_assert_eq!(guarantee == max, constant);
            }
        }
    }

    #[test]
    fn tit_for_tat_mirrors_any_opponent(seed in any::<u64>(), rounds in 1usize..12) {
        let mut rng = rng_for(seed);
        let script: Vec<String> = (0..rounds)
            .map(|_| if rng.gen_bool(0.5) { "F" } else { "U" }.to_owned())
            .collect();
        let scripted = StrategyRule::new("scripted", move |_role, history: &[JointAction]| {
            script[history.len()].clone()
        });
        let transcript = play_repeated(
            &simultaneous_indifference(),
            &tit_for_tat(),
            &scripted,
            rounds,
        )
        .unwrap();
        for t in 1..rounds {
            prop_assert_eq!(
                &transcript.rounds[t].actions.p1,
                &transcript.rounds[t - 1].actions.p2
            );
        }
    }
}

fn parse_utility(text: &str) -> Utility {
    match text.split_once('/') {
        Some((n, d)) => Utility::new(n.parse().unwrap(), d.parse().unwrap()).unwrap(),
        None => Utility::from_int(text.parse().unwrap()),
    }
}

/// Cumulative payoffs of every pairing of the bundled strategies, for a few
/// horizons. Friendly play against Tit-for-Tat earns the full horizon;
/// constant unfriendliness earns only the single opening unit and starves
/// Tit-for-Tat entirely.
#[test]
fn tit_for_tat_incentive_matrix() {
    let stage = simultaneous_indifference();
    for t in 1..=6usize {
        let total = |s1: &StrategyRule, s2: &StrategyRule| {
            play_repeated(&stage, s1, s2, t).unwrap().cumulative
        };
        let horizon = Utility::from_int(t as i64);
        let zero = Utility::zero();
        let one = Utility::one();

        assert_eq!(total(&tit_for_tat(), &tit_for_tat()), (horizon, horizon));
        assert_eq!(total(&all_f(), &tit_for_tat()), (horizon, horizon));
        assert_eq!(total(&tit_for_tat(), &all_f()), (horizon, horizon));
        assert_eq!(total(&all_u(), &tit_for_tat()), (one, zero));
        assert_eq!(total(&tit_for_tat(), &all_u()), (zero, one));
        assert_eq!(total(&all_u(), &all_u()), (zero, zero));
        assert_eq!(total(&all_f(), &all_u()), (zero, horizon));

        // Against Tit-for-Tat, constant friendliness is maximal among the
        // bundled strategies.
        let vs_tft = |s: &StrategyRule| total(s, &tit_for_tat()).0;
        let best = vs_tft(&all_f());
        assert!(best >= vs_tft(&all_u()));
        assert!(best >= vs_tft(&tit_for_tat()));
    }
}

/// The strategy-count identity: a player has one strategy per assignment of
/// branches to its nodes.
#[test]
fn strategy_count_identity_on_random_games() {
    for seed in 0..50u64 {
        let game = tie_heavy(seed);
        let nf = to_normal_form(&game);
        for player in game.players() {
            let expected: usize = tiebreak::normalform::player_decision_nodes(&game, player)
                .iter()
                .map(|(_, labels)| labels.len())
                .product();
            assert_eq!(nf.strategies(player).len(), expected);
        }
    }
}
