//! Shared test helpers: random game generation with deliberate tie
//! injection, and brute-force oracles for subgame-perfect equilibria and
//! pure Nash equilibria that stay independent of the library's own
//! algorithms.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use tiebreak::game::{decision_nodes, Game, GameTree, NodeAddress, Outcome, PlayerId, Utility};
use tiebreak::normalform::PureStrategy;

pub struct GeneratorConfig {
    pub max_players: usize,
    pub max_leaves: usize,
    pub max_branching: usize,
    /// Draw utilities from a small integer pool and sometimes reuse whole
    /// vectors, so ties are common.
    pub inject_ties: bool,
    /// Use non-integer rationals and awkward label strings (for the parser).
    pub fancy: bool,
}

impl GeneratorConfig {
    /// The corpus used by the oracle suites: small tie-heavy games.
    pub fn tie_heavy() -> Self {
        GeneratorConfig {
            max_players: 3,
            max_leaves: 12,
            max_branching: 3,
            inject_ties: true,
            fancy: false,
        }
    }

    /// The corpus used by the parser suites: rationals and hostile labels.
    pub fn parser() -> Self {
        GeneratorConfig {
            max_players: 3,
            max_leaves: 16,
            max_branching: 4,
            inject_ties: false,
            fancy: true,
        }
    }
}

const LABEL_CHARS: &[char] = &[
    'L', 'R', 'x', '7', ' ', '"', '\\', ';', '(', ')', '/', '=', 'π',
];

pub fn random_game(rng: &mut impl Rng, cfg: &GeneratorConfig) -> Game {
    let num_players = rng.gen_range(1..=cfg.max_players);
    let budget = rng.gen_range(1..=cfg.max_leaves);
    let mut pool: Vec<Vec<Utility>> = Vec::new();
    let root = random_tree(rng, cfg, num_players, budget, &mut pool);
    Game::new(num_players, root)
}

fn random_tree(
    rng: &mut impl Rng,
    cfg: &GeneratorConfig,
    num_players: usize,
    budget: usize,
    pool: &mut Vec<Vec<Utility>>,
) -> GameTree {
    if budget == 1 {
        let utilities = if cfg.inject_ties && !pool.is_empty() && rng.gen_bool(0.3) {
            pool[rng.gen_range(0..pool.len())].clone()
        } else {
            (0..num_players).map(|_| random_utility(rng, cfg)).collect()
        };
        pool.push(utilities.clone());
        let label = if cfg.fancy && rng.gen_bool(0.4) {
            Some(random_label(rng))
        } else {
            None
        };
        return GameTree::Leaf {
            outcome: Outcome { label, utilities },
        };
    }
    let branch_count = rng.gen_range(2..=cfg.max_branching.min(budget));
    let mut remaining = budget;
    let mut branches = Vec::with_capacity(branch_count);
    for i in 0..branch_count {
        let slots_left = branch_count - i - 1;
        let share = if slots_left == 0 {
            remaining
        } else {
            rng.gen_range(1..=remaining - slots_left)
        };
        remaining -= share;
        let label = if cfg.fancy {
            distinct_label(rng, &branches)
        } else {
            simple_label(i)
        };
        branches.push((label, random_tree(rng, cfg, num_players, share, pool)));
    }
    GameTree::Decision {
        mover: PlayerId::new(rng.gen_range(1..=num_players)),
        branches,
    }
}

fn simple_label(index: usize) -> String {
    const NAMES: &[&str] = &["L", "R", "M", "X"];
    NAMES[index].to_owned()
}

fn random_label(rng: &mut impl Rng) -> String {
    let len = rng.gen_range(0..=4);
    (0..len)
        .map(|_| LABEL_CHARS[rng.gen_range(0..LABEL_CHARS.len())])
        .collect()
}

fn distinct_label(rng: &mut impl Rng, taken: &[(String, GameTree)]) -> String {
    loop {
        let candidate = random_label(rng);
        if !taken.iter().any(|(seen, _)| *seen == candidate) {
            return candidate;
        }
    }
}

fn random_utility(rng: &mut impl Rng, cfg: &GeneratorConfig) -> Utility {
    if cfg.fancy {
        Utility::new(rng.gen_range(-9..=9), rng.gen_range(1..=4)).expect("denominator > 0")
    } else {
        Utility::from_int(rng.gen_range(-2..=2))
    }
}

/// A game where no player is ever indifferent: each player's utilities over
/// the leaves are a permutation of distinct integers.
pub fn random_generic_game(rng: &mut impl Rng, cfg: &GeneratorConfig) -> Game {
    let mut game = random_game(
        rng,
        &GeneratorConfig {
            max_players: cfg.max_players,
            max_leaves: cfg.max_leaves,
            max_branching: cfg.max_branching,
            inject_ties: false,
            fancy: false,
        },
    );
    let leaf_count = tiebreak::game::leaves(&game).len();
    let mut permutations: Vec<Vec<i64>> = Vec::new();
    for _ in 0..game.num_players {
        let mut values: Vec<i64> = (0..leaf_count as i64).collect();
        values.shuffle(rng);
        permutations.push(values);
    }
    let mut counter = 0;
    overwrite_leaves(&mut game.root, &permutations, &mut counter);
    game
}

fn overwrite_leaves(tree: &mut GameTree, permutations: &[Vec<i64>], counter: &mut usize) {
    match tree {
        GameTree::Leaf { outcome } => {
            outcome.utilities = permutations
                .iter()
                .map(|per_player| Utility::from_int(per_player[*counter]))
                .collect();
            *counter += 1;
        }
        GameTree::Decision { branches, .. } => {
            for (_, subtree) in branches {
                overwrite_leaves(subtree, permutations, counter);
            }
        }
    }
}

/// Applies `u -> a*u + b` to one player's utility at every leaf.
pub fn affine_transform(game: &Game, player: PlayerId, a: Utility, b: Utility) -> Game {
    let mut transformed = game.clone();
    transform_leaves(&mut transformed.root, player, a, b);
    transformed
}

fn transform_leaves(tree: &mut GameTree, player: PlayerId, a: Utility, b: Utility) {
    match tree {
        GameTree::Leaf { outcome } => {
            let u = outcome.utilities[player.index0()];
            outcome.utilities[player.index0()] = a * u + b;
        }
        GameTree::Decision { branches, .. } => {
            for (_, subtree) in branches {
                transform_leaves(subtree, player, a, b);
            }
        }
    }
}

/// A complete assignment of one branch per decision node, with the value it
/// induces at the root: the currency of the brute-force oracles.
pub type ChoiceMap = BTreeMap<NodeAddress, usize>;

/// Equilibrium identity used for set comparison: the flattened choice map
/// plus the induced root value.
pub type SpeKey = (Vec<(NodeAddress, usize)>, Vec<Utility>);

/// Every complete choice map of the game, by odometer over decision nodes.
pub fn all_choice_maps(game: &Game) -> Vec<ChoiceMap> {
    let nodes = decision_nodes(game);
    let counts: Vec<usize> = nodes.iter().map(|(_, _, n)| *n).collect();
    let mut maps = Vec::new();
    let mut current = vec![0usize; counts.len()];
    let total: usize = counts.iter().product();
    for _ in 0..total.max(1) {
        maps.push(
            nodes
                .iter()
                .zip(current.iter())
                .map(|((addr, _, _), &choice)| (addr.clone(), choice))
                .collect(),
        );
        for pos in (0..counts.len()).rev() {
            current[pos] += 1;
            if current[pos] < counts[pos] {
                break;
            }
            current[pos] = 0;
        }
    }
    maps
}

/// Walks the whole tree under `choices`, returning the induced root value
/// and whether the chosen action is optimal at every decision node.
fn check_node_wise_optimality(
    tree: &GameTree,
    addr: NodeAddress,
    choices: &ChoiceMap,
) -> (Vec<Utility>, bool) {
    match tree {
        GameTree::Leaf { outcome } => (outcome.utilities.clone(), true),
        GameTree::Decision { mover, branches } => {
            let mut values = Vec::with_capacity(branches.len());
            let mut all_ok = true;
            for (i, (_, subtree)) in branches.iter().enumerate() {
                let (value, ok) = check_node_wise_optimality(subtree, addr.child(i), choices);
                all_ok &= ok;
                values.push(value);
            }
            let chosen = choices[&addr];
            let own = mover.index0();
            let best = values.iter().map(|v| v[own]).max().expect("non-empty");
            all_ok &= values[chosen][own] == best;
            (values[chosen].clone(), all_ok)
        }
    }
}

/// Brute-force subgame-perfect equilibria: filter all choice maps by direct
/// node-wise optimality.
pub fn brute_force_spe(game: &Game) -> BTreeSet<SpeKey> {
    all_choice_maps(game)
        .into_iter()
        .filter_map(|choices| {
            let (value, ok) = check_node_wise_optimality(&game.root, NodeAddress::root(), &choices);
            ok.then(|| (choices.into_iter().collect(), value))
        })
        .collect()
}

/// Folds the library's per-player equilibrium profiles into the oracle's
/// key space.
pub fn spe_as_keys(spe: &[(Vec<PureStrategy>, Outcome)]) -> BTreeSet<SpeKey> {
    spe.iter()
        .map(|(profile, outcome)| {
            let mut merged: ChoiceMap = BTreeMap::new();
            for strategy in profile {
                merged.extend(strategy.choices.clone());
            }
            (merged.into_iter().collect(), outcome.utilities.clone())
        })
        .collect()
}

/// One player's pure strategies as choice maps, in the same lexicographic
/// order the library documents (first decision node most significant).
pub fn player_strategy_maps(game: &Game, player: PlayerId) -> Vec<ChoiceMap> {
    let nodes: Vec<(NodeAddress, usize)> = decision_nodes(game)
        .into_iter()
        .filter(|(_, mover, _)| *mover == player)
        .map(|(addr, _, n)| (addr, n))
        .collect();
    let counts: Vec<usize> = nodes.iter().map(|(_, n)| *n).collect();
    let total: usize = counts.iter().product();
    let mut current = vec![0usize; counts.len()];
    let mut maps = Vec::with_capacity(total);
    for _ in 0..total.max(1) {
        maps.push(
            nodes
                .iter()
                .zip(current.iter())
                .map(|((addr, _), &c)| (addr.clone(), c))
                .collect(),
        );
        for pos in (0..counts.len()).rev() {
            current[pos] += 1;
            if current[pos] < counts[pos] {
                break;
            }
            current[pos] = 0;
        }
    }
    maps
}

/// Plays the game by direct tree walk under per-player choice maps.
pub fn play_choices(game: &Game, per_player: &[&ChoiceMap]) -> Vec<Utility> {
    let mut node = &game.root;
    let mut addr = NodeAddress::root();
    loop {
        match node {
            GameTree::Leaf { outcome } => return outcome.utilities.clone(),
            GameTree::Decision { mover, branches } => {
                let branch = per_player[mover.index0()][&addr];
                node = &branches[branch].1;
                addr = addr.child(branch);
            }
        }
    }
}

/// Brute-force pure Nash equilibria over per-player strategy indices, with
/// payoffs recomputed by direct tree walks for every deviation.
pub fn brute_force_nash(game: &Game) -> BTreeSet<Vec<usize>> {
    let strategies: Vec<Vec<ChoiceMap>> = game
        .players()
        .map(|p| player_strategy_maps(game, p))
        .collect();
    let counts: Vec<usize> = strategies.iter().map(Vec::len).collect();
    let mut nash = BTreeSet::new();
    let total: usize = counts.iter().product();
    let mut profile = vec![0usize; counts.len()];
    for _ in 0..total.max(1) {
        let maps: Vec<&ChoiceMap> = profile
            .iter()
            .enumerate()
            .map(|(p, &s)| &strategies[p][s])
            .collect();
        let payoffs = play_choices(game, &maps);
        let mut stable = true;
        'players: for player in 0..counts.len() {
            for (alternative, map) in strategies[player].iter().enumerate() {
                if alternative == profile[player] {
                    continue;
                }
                let mut deviated = maps.clone();
                deviated[player] = map;
                if play_choices(game, &deviated)[player] > payoffs[player] {
                    stable = false;
                    break 'players;
                }
            }
        }
        if stable {
            nash.insert(profile.clone());
        }
        for pos in (0..counts.len()).rev() {
            profile[pos] += 1;
            if profile[pos] < counts[pos] {
                break;
            }
            profile[pos] = 0;
        }
    }
    nash
}

/// Index of a library strategy within the oracle's enumeration for the same
/// player.
pub fn strategy_index_in(maps: &[ChoiceMap], strategy: &PureStrategy) -> Option<usize> {
    maps.iter().position(|m| *m == strategy.choices)
}
