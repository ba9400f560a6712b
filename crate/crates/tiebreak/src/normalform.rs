//! Normal-form view of an extensive game: pure-strategy enumeration, the
//! payoff tensor, pure Nash equilibria, best responses, payoff-equivalence
//! classes, and the value a strategy guarantees against a rational opponent.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::game::{Game, GameTree, NodeAddress, Outcome, PlayerId, Utility};

/// A pure strategy: one branch choice at each of the player's decision nodes.
///
/// `label` concatenates the chosen action labels in depth-first node order,
/// e.g. `"RL"` for a player who picks "R" at his first node and "L" at his
/// second. A player with no decision nodes has exactly one strategy with an
/// empty choice map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureStrategy {
    pub player: PlayerId,
    pub choices: BTreeMap<NodeAddress, usize>,
    pub label: String,
}

/// Complete payoff tensor over every pure-strategy profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    strategies: Vec<Vec<PureStrategy>>,
    /// Row-major over strategy indices, player 1 most significant.
    payoffs: Vec<Vec<Utility>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalFormError {
    #[error("profile has {found} strategies, game has {expected} players")]
    WrongProfileLength { expected: usize, found: usize },
    #[error("strategy for player {player} does not cover decision node {node}")]
    IncompleteProfile { player: PlayerId, node: NodeAddress },
    #[error("player {player} has {available} strategies, index {index} is out of range")]
    StrategyIndexOutOfRange {
        player: PlayerId,
        index: usize,
        available: usize,
    },
    #[error("expected strategy indices for {expected} other players, got {found}")]
    WrongOthersLength { expected: usize, found: usize },
    #[error("defined for 2-player games only, this one has {found} players")]
    TwoPlayersOnly { found: usize },
}

impl NormalForm {
    /// Assembles a normal form from per-player strategy lists and a payoff
    /// tensor laid out row-major with player 1 most significant.
    ///
    /// # Panics
    /// Panics if the tensor is incomplete or a payoff vector has the wrong
    /// width.
    pub fn from_parts(strategies: Vec<Vec<PureStrategy>>, payoffs: Vec<Vec<Utility>>) -> Self {
        let num_players = strategies.len();
        let expected: usize = strategies.iter().map(Vec::len).product();
        assert_eq!(payoffs.len(), expected, "payoff tensor is incomplete");
        assert!(
            payoffs.iter().all(|p| p.len() == num_players),
            "payoff vectors must have one utility per player"
        );
        NormalForm {
            strategies,
            payoffs,
        }
    }

    pub fn num_players(&self) -> usize {
        self.strategies.len()
    }

    pub fn strategies(&self, player: PlayerId) -> &[PureStrategy] {
        &self.strategies[player.index0()]
    }

    pub fn strategy_counts(&self) -> Vec<usize> {
        self.strategies.iter().map(Vec::len).collect()
    }

    fn flat_index(&self, profile: &[usize]) -> usize {
        debug_assert_eq!(profile.len(), self.strategies.len());
        let mut index = 0;
        for (player, &strategy) in profile.iter().enumerate() {
            debug_assert!(strategy < self.strategies[player].len());
            index = index * self.strategies[player].len() + strategy;
        }
        index
    }

    /// The utility vector of a profile of strategy indices.
    pub fn payoff(&self, profile: &[usize]) -> &[Utility] {
        &self.payoffs[self.flat_index(profile)]
    }

    /// All profiles of strategy indices, in lexicographic order.
    pub fn profiles(&self) -> Vec<Vec<usize>> {
        enumerate_profiles(&self.strategy_counts())
    }

    /// Strategy labels of a profile, one per player.
    pub fn profile_labels(&self, profile: &[usize]) -> Vec<String> {
        profile
            .iter()
            .enumerate()
            .map(|(p, &s)| self.strategies[p][s].label.clone())
            .collect()
    }
}

fn enumerate_profiles(counts: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = counts.iter().product();
    let mut profiles = Vec::with_capacity(total);
    let mut current = vec![0; counts.len()];
    for _ in 0..total {
        profiles.push(current.clone());
        for pos in (0..counts.len()).rev() {
            current[pos] += 1;
            if current[pos] < counts[pos] {
                break;
            }
            current[pos] = 0;
        }
    }
    profiles
}

/// The decision nodes owned by one player, in depth-first order, with the
/// action labels available at each.
pub fn player_decision_nodes(game: &Game, player: PlayerId) -> Vec<(NodeAddress, Vec<String>)> {
    let mut nodes = Vec::new();
    collect_player_nodes(&game.root, NodeAddress::root(), player, &mut nodes);
    nodes
}

fn collect_player_nodes(
    tree: &GameTree,
    addr: NodeAddress,
    player: PlayerId,
    acc: &mut Vec<(NodeAddress, Vec<String>)>,
) {
    if let GameTree::Decision { mover, branches } = tree {
        if *mover == player {
            acc.push((
                addr.clone(),
                branches.iter().map(|(label, _)| label.clone()).collect(),
            ));
        }
        for (i, (_, subtree)) in branches.iter().enumerate() {
            collect_player_nodes(subtree, addr.child(i), player, acc);
        }
    }
}

/// Enumerates one player's pure strategies in lexicographic branch-index
/// order (the first decision node varies slowest).
pub fn strategies_for(game: &Game, player: PlayerId) -> Vec<PureStrategy> {
    let nodes = player_decision_nodes(game, player);
    let counts: Vec<usize> = nodes.iter().map(|(_, labels)| labels.len()).collect();
    enumerate_profiles(&counts)
        .into_iter()
        .map(|choice_vec| {
            let mut choices = BTreeMap::new();
            let mut label = String::new();
            for ((addr, labels), &branch) in nodes.iter().zip(choice_vec.iter()) {
                choices.insert(addr.clone(), branch);
                label.push_str(&labels[branch]);
            }
            PureStrategy {
                player,
                choices,
                label,
            }
        })
        .collect()
}

/// Splits a whole-tree choice map (decision node -> branch) into one
/// [`PureStrategy`] per player.
pub fn profile_from_choices(
    game: &Game,
    choices: &BTreeMap<NodeAddress, usize>,
) -> Vec<PureStrategy> {
    game.players()
        .map(|player| {
            let nodes = player_decision_nodes(game, player);
            let mut own = BTreeMap::new();
            let mut label = String::new();
            for (addr, labels) in &nodes {
                let branch = choices[addr];
                own.insert(addr.clone(), branch);
                label.push_str(&labels[branch]);
            }
            PureStrategy {
                player,
                choices: own,
                label,
            }
        })
        .collect()
}

/// Plays the game under a profile of one pure strategy per player and returns
/// the reached leaf's outcome.
pub fn play(game: &Game, profile: &[PureStrategy]) -> Result<Outcome, NormalFormError> {
    if profile.len() != game.num_players {
        return Err(NormalFormError::WrongProfileLength {
            expected: game.num_players,
            found: profile.len(),
        });
    }
    let mut node = &game.root;
    let mut addr = NodeAddress::root();
    loop {
        match node {
            GameTree::Leaf { outcome } => return Ok(outcome.clone()),
            GameTree::Decision { mover, branches } => {
                let strategy = &profile[mover.index0()];
                let branch = *strategy.choices.get(&addr).ok_or_else(|| {
                    NormalFormError::IncompleteProfile {
                        player: *mover,
                        node: addr.clone(),
                    }
                })?;
                node = &branches[branch].1;
                addr = addr.child(branch);
            }
        }
    }
}

/// Converts a game to its normal form: every player's pure strategies and the
/// full payoff tensor filled in via [`play`].
pub fn to_normal_form(game: &Game) -> NormalForm {
    let strategies: Vec<Vec<PureStrategy>> = game
        .players()
        .map(|player| strategies_for(game, player))
        .collect();
    let counts: Vec<usize> = strategies.iter().map(Vec::len).collect();
    let payoffs = enumerate_profiles(&counts)
        .into_iter()
        .map(|profile| {
            let chosen: Vec<PureStrategy> = profile
                .iter()
                .enumerate()
                .map(|(p, &s)| strategies[p][s].clone())
                .collect();
            play(game, &chosen)
                .expect("strategies_for covers every decision node")
                .utilities
        })
        .collect();
    NormalForm {
        strategies,
        payoffs,
    }
}

/// All pure Nash equilibria: profiles where no player can strictly increase
/// its own payoff by a unilateral deviation. Lexicographic output order.
pub fn pure_nash(nf: &NormalForm) -> Vec<Vec<usize>> {
    let counts = nf.strategy_counts();
    nf.profiles()
        .into_iter()
        .filter(|profile| {
            (0..counts.len()).all(|player| {
                let own = nf.payoff(profile)[player];
                let mut deviation = profile.clone();
                (0..counts[player]).all(|alternative| {
                    deviation[player] = alternative;
                    nf.payoff(&deviation)[player] <= own
                })
            })
        })
        .collect()
}

/// The argmax set of `player`'s strategies against fixed strategies of the
/// others. `others` lists one strategy index per other player, in ascending
/// player order.
pub fn best_responses(
    nf: &NormalForm,
    player: PlayerId,
    others: &[usize],
) -> Result<Vec<usize>, NormalFormError> {
    let counts = nf.strategy_counts();
    if others.len() + 1 != counts.len() {
        return Err(NormalFormError::WrongOthersLength {
            expected: counts.len() - 1,
            found: others.len(),
        });
    }
    let mut profile = Vec::with_capacity(counts.len());
    let mut next_other = others.iter();
    for (p, &available) in counts.iter().enumerate() {
        if p == player.index0() {
            profile.push(0);
        } else {
            let &index = next_other.next().expect("length checked");
            if index >= available {
                return Err(NormalFormError::StrategyIndexOutOfRange {
                    player: PlayerId::new(p + 1),
                    index,
                    available,
                });
            }
            profile.push(index);
        }
    }
    let own = player.index0();
    let payoff_of = |candidate: usize, profile: &mut Vec<usize>| {
        profile[own] = candidate;
        nf.payoff(profile)[own]
    };
    let best = (0..counts[own])
        .map(|c| payoff_of(c, &mut profile))
        .max()
        .expect("players have at least one strategy");
    Ok((0..counts[own])
        .filter(|&c| payoff_of(c, &mut profile) == best)
        .collect())
}

/// In a 2-player game, the worst payoff `player` can receive when the
/// opponent plays any best response to `strategy`: what the strategy
/// guarantees if the opponent is rational.
pub fn guaranteed_value_vs_rational(
    nf: &NormalForm,
    player: PlayerId,
    strategy: usize,
) -> Result<Utility, NormalFormError> {
    if nf.num_players() != 2 {
        return Err(NormalFormError::TwoPlayersOnly {
            found: nf.num_players(),
        });
    }
    let counts = nf.strategy_counts();
    if strategy >= counts[player.index0()] {
        return Err(NormalFormError::StrategyIndexOutOfRange {
            player,
            index: strategy,
            available: counts[player.index0()],
        });
    }
    let opponent = if player.index() == 1 {
        PlayerId::new(2)
    } else {
        PlayerId::new(1)
    };
    let responses = best_responses(nf, opponent, &[strategy])?;
    let own_payoff = |response: usize| {
        let mut profile = vec![0; 2];
        profile[player.index0()] = strategy;
        profile[opponent.index0()] = response;
        nf.payoff(&profile)[player.index0()]
    };
    Ok(responses
        .into_iter()
        .map(own_payoff)
        .min()
        .expect("best-response sets are non-empty"))
}

/// Partitions `player`'s strategies into classes whose own-payoff slices are
/// identical across every profile of the other players. Classes are ordered
/// by their smallest member.
pub fn payoff_equivalent_strategies(nf: &NormalForm, player: PlayerId) -> Vec<Vec<usize>> {
    let counts = nf.strategy_counts();
    let own = player.index0();
    let other_counts: Vec<usize> = counts
        .iter()
        .enumerate()
        .filter(|&(p, _)| p != own)
        .map(|(_, &c)| c)
        .collect();
    let slice_of = |strategy: usize| -> Vec<Utility> {
        enumerate_profiles(&other_counts)
            .into_iter()
            .map(|others| {
                let mut profile = Vec::with_capacity(counts.len());
                let mut rest = others.iter();
                for p in 0..counts.len() {
                    if p == own {
                        profile.push(strategy);
                    } else {
                        profile.push(*rest.next().expect("length matches"));
                    }
                }
                nf.payoff(&profile)[own]
            })
            .collect()
    };
    let mut classes: Vec<(Vec<Utility>, Vec<usize>)> = Vec::new();
    for strategy in 0..counts[own] {
        let slice = slice_of(strategy);
        match classes.iter_mut().find(|(seen, _)| *seen == slice) {
            Some((_, members)) => members.push(strategy),
            None => classes.push((slice, vec![strategy])),
        }
    }
    classes.into_iter().map(|(_, members)| members).collect()
}
