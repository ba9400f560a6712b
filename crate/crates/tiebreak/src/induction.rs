//! Backward induction with exact tie detection.
//!
//! Under genericity (no player indifferent between any two outcomes) backward
//! induction is deterministic and [`solve_generic`] finds the unique play.
//! Real games have ties, and this module makes them first class: every
//! decision node's full best set is reported; ties can be broken by a
//! [`TieBreakPolicy`] (first-listed, friendly or unfriendly toward a target,
//! or per-player dispositions); an ambiguous game can be analyzed under all
//! disposition scenarios at once ([`scenario_solve`]); best-set actions can
//! be classified and scored for how friendly they are toward each other
//! player; and [`enumerate_spe`] lists every pure subgame-perfect
//! equilibrium, i.e. every play reachable by backward induction under some
//! tie resolution.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::game::{resolve, Game, GameTree, NodeAddress, Outcome, PlayerId, ResolveError, Utility};
use crate::normalform::{profile_from_choices, PureStrategy};

/// One utility per player, in ascending player order.
pub type UtilityVector = Vec<Utility>;

/// The set of branch indices at a node that maximize the mover's continuation
/// utility. Always non-empty and sorted ascending; actions outside the set
/// yield strictly less for the mover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestSet {
    pub node: NodeAddress,
    pub actions: Vec<usize>,
}

impl BestSet {
    pub fn is_tie(&self) -> bool {
        self.actions.len() >= 2
    }
}

/// A player's attitude when breaking its own ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Disposition {
    Friendly,
    Unfriendly,
}

impl Disposition {
    pub fn letter(self) -> char {
        match self {
            Disposition::Friendly => 'F',
            Disposition::Unfriendly => 'U',
        }
    }
}

impl fmt::Display for Disposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// One disposition per player: how each player resolves its own ties toward
/// everyone else.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DispositionProfile(Vec<Disposition>);

impl DispositionProfile {
    pub fn new(dispositions: Vec<Disposition>) -> Self {
        DispositionProfile(dispositions)
    }

    /// The same disposition for every player.
    pub fn uniform(num_players: usize, disposition: Disposition) -> Self {
        DispositionProfile(vec![disposition; num_players])
    }

    /// All 2^n profiles for `num_players` players, in lexicographic order
    /// with Friendly before Unfriendly and player 1 most significant.
    pub fn all(num_players: usize) -> Vec<DispositionProfile> {
        let mut profiles = vec![DispositionProfile(Vec::new())];
        for _ in 0..num_players {
            profiles = profiles
                .into_iter()
                .flat_map(|p| {
                    [Disposition::Friendly, Disposition::Unfriendly].map(|d| {
                        let mut next = p.0.clone();
                        next.push(d);
                        DispositionProfile(next)
                    })
                })
                .collect();
        }
        profiles
    }

    pub fn num_players(&self) -> usize {
        self.0.len()
    }

    pub fn of(&self, player: PlayerId) -> Disposition {
        self.0[player.index0()]
    }
}

impl fmt::Display for DispositionProfile {
    /// Renders in the `1=F,2=U` syntax used by the command line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}={}", i + 1, d.letter())?;
        }
        Ok(())
    }
}

/// How to choose an action when a mover's best set has more than one member.
/// Residual ties always fall back to the lowest branch index, so every policy
/// is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TieBreakPolicy {
    /// Lowest branch index.
    FirstListed,
    /// Maximize the target player's utility over the best set.
    FriendlyTo(PlayerId),
    /// Minimize the target player's utility over the best set.
    UnfriendlyTo(PlayerId),
    /// Each mover applies its own disposition toward the other players,
    /// taken in ascending player order: maximize (or minimize) the utility of
    /// the smallest other player over the candidates, keep only the ties,
    /// move to the next player, and so on.
    ByProfile(DispositionProfile),
}

/// The outcome of a backward-induction run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    /// Utility vector of the realized leaf.
    pub root_value: UtilityVector,
    /// The realized play: each visited decision node and the branch taken.
    pub chosen_path: Vec<(NodeAddress, usize)>,
    /// Best set of every decision node in the game, reached or not.
    pub best_sets: BTreeMap<NodeAddress, BestSet>,
    /// Every decision node whose best set has two or more actions.
    pub tie_nodes: BTreeSet<NodeAddress>,
}

/// A tie encountered where genericity was required.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct IndifferenceError {
    pub node: NodeAddress,
    pub mover: PlayerId,
    /// The tied branch indices with their action labels.
    pub tied: Vec<(usize, String)>,
}

impl fmt::Display for IndifferenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let actions = self
            .tied
            .iter()
            .map(|(_, label)| format!("{label:?}"))
            .collect::<Vec<_>>()
            .join(", ");
        write!(
            f,
            "player {} is indifferent at node {} between actions {}",
            self.mover, self.node, actions
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InductionError {
    /// FriendlyTo/UnfriendlyTo cannot break a tie of the target itself.
    #[error("tie at node {node}: policy target is the mover, player {mover}")]
    TargetIsMover { node: NodeAddress, mover: PlayerId },
    #[error("policy target {target} is outside 1..={num_players}")]
    TargetOutOfRange { target: usize, num_players: usize },
    #[error("disposition profile covers {found} players, game has {expected}")]
    ProfileSize { expected: usize, found: usize },
    #[error("no disposition profiles given")]
    NoProfiles,
    #[error("node {0} is a leaf, not a decision node")]
    NotADecisionNode(NodeAddress),
    #[error(transparent)]
    Address(#[from] ResolveError),
    #[error("continuation covers {found} branches, node has {expected}")]
    ContinuationCount { expected: usize, found: usize },
    #[error("continuation utility vector has {found} entries, game has {expected} players")]
    ContinuationWidth { expected: usize, found: usize },
    #[error("solve result does not fit the subgame: {0}")]
    PathMismatch(String),
}

/// How a solver run treats ties.
enum Resolution<'a> {
    /// Any tie is an error.
    Generic,
    /// Ties are broken by the policy.
    Policy(&'a TieBreakPolicy),
}

enum SolveFailure {
    Indifference(IndifferenceError),
    Policy(InductionError),
}

struct Solver<'a> {
    game: &'a Game,
    resolution: Resolution<'a>,
    best_sets: BTreeMap<NodeAddress, BestSet>,
    tie_nodes: BTreeSet<NodeAddress>,
    chosen: BTreeMap<NodeAddress, usize>,
}

impl<'a> Solver<'a> {
    fn new(game: &'a Game, resolution: Resolution<'a>) -> Self {
        Solver {
            game,
            resolution,
            best_sets: BTreeMap::new(),
            tie_nodes: BTreeSet::new(),
            chosen: BTreeMap::new(),
        }
    }

    /// Post-order evaluation; the first tie reported is therefore the
    /// deepest-leftmost one in depth-first order.
    fn value(&mut self, tree: &GameTree, addr: NodeAddress) -> Result<UtilityVector, SolveFailure> {
        match tree {
            GameTree::Leaf { outcome } => Ok(outcome.utilities.clone()),
            GameTree::Decision { mover, branches } => {
                let mut continuations = Vec::with_capacity(branches.len());
                for (i, (_, subtree)) in branches.iter().enumerate() {
                    continuations.push(self.value(subtree, addr.child(i))?);
                }
                let best = argmax_actions(*mover, &continuations);
                let choice = match &self.resolution {
                    Resolution::Generic => {
                        if best.len() > 1 {
                            return Err(SolveFailure::Indifference(IndifferenceError {
                                node: addr,
                                mover: *mover,
                                tied: best.iter().map(|&b| (b, branches[b].0.clone())).collect(),
                            }));
                        }
                        best[0]
                    }
                    Resolution::Policy(policy) => apply_policy(
                        policy,
                        *mover,
                        self.game.num_players,
                        &best,
                        &continuations,
                        &addr,
                    )
                    .map_err(SolveFailure::Policy)?,
                };
                if best.len() > 1 {
                    self.tie_nodes.insert(addr.clone());
                }
                self.best_sets.insert(
                    addr.clone(),
                    BestSet {
                        node: addr.clone(),
                        actions: best,
                    },
                );
                self.chosen.insert(addr, choice);
                Ok(continuations.swap_remove(choice))
            }
        }
    }

    fn finish(self, root_value: UtilityVector) -> SolveResult {
        let mut chosen_path = Vec::new();
        let mut addr = NodeAddress::root();
        let mut node = &self.game.root;
        while let GameTree::Decision { branches, .. } = node {
            let choice = self.chosen[&addr];
            chosen_path.push((addr.clone(), choice));
            node = &branches[choice].1;
            addr = addr.child(choice);
        }
        SolveResult {
            root_value,
            chosen_path,
            best_sets: self.best_sets,
            tie_nodes: self.tie_nodes,
        }
    }
}

/// Ascending branch indices maximizing the mover's coordinate.
fn argmax_actions(mover: PlayerId, continuations: &[UtilityVector]) -> Vec<usize> {
    let best = continuations
        .iter()
        .map(|v| v[mover.index0()])
        .max()
        .expect("decision nodes have at least one branch");
    continuations
        .iter()
        .enumerate()
        .filter(|(_, v)| v[mover.index0()] == best)
        .map(|(i, _)| i)
        .collect()
}

fn apply_policy(
    policy: &TieBreakPolicy,
    mover: PlayerId,
    num_players: usize,
    best: &[usize],
    continuations: &[UtilityVector],
    addr: &NodeAddress,
) -> Result<usize, InductionError> {
    if best.len() == 1 {
        return Ok(best[0]);
    }
    match policy {
        TieBreakPolicy::FirstListed => Ok(best[0]),
        TieBreakPolicy::FriendlyTo(target) => {
            check_target(*target, mover, num_players, addr)?;
            Ok(extremal_by(best, continuations, *target, true))
        }
        TieBreakPolicy::UnfriendlyTo(target) => {
            check_target(*target, mover, num_players, addr)?;
            Ok(extremal_by(best, continuations, *target, false))
        }
        TieBreakPolicy::ByProfile(profile) => {
            if profile.num_players() != num_players {
                return Err(InductionError::ProfileSize {
                    expected: num_players,
                    found: profile.num_players(),
                });
            }
            let maximize = profile.of(mover) == Disposition::Friendly;
            let mut candidates = best.to_vec();
            for other in (1..=num_players).map(PlayerId::new) {
                if other == mover {
                    continue;
                }
                if candidates.len() == 1 {
                    break;
                }
                let kept = extremal_value(&candidates, continuations, other, maximize);
                candidates.retain(|&b| continuations[b][other.index0()] == kept);
            }
            Ok(candidates[0])
        }
    }
}

fn check_target(
    target: PlayerId,
    mover: PlayerId,
    num_players: usize,
    addr: &NodeAddress,
) -> Result<(), InductionError> {
    if target.index() > num_players {
        return Err(InductionError::TargetOutOfRange {
            target: target.index(),
            num_players,
        });
    }
    if target == mover {
        return Err(InductionError::TargetIsMover {
            node: addr.clone(),
            mover,
        });
    }
    Ok(())
}

fn extremal_value(
    candidates: &[usize],
    continuations: &[UtilityVector],
    target: PlayerId,
    maximize: bool,
) -> Utility {
    let values = candidates
        .iter()
        .map(|&b| continuations[b][target.index0()]);
    if maximize {
        values.max().expect("candidates non-empty")
    } else {
        values.min().expect("candidates non-empty")
    }
}

/// Lowest candidate achieving the extremal value of the target's utility.
fn extremal_by(
    candidates: &[usize],
    continuations: &[UtilityVector],
    target: PlayerId,
    maximize: bool,
) -> usize {
    let value = extremal_value(candidates, continuations, target, maximize);
    *candidates
        .iter()
        .find(|&&b| continuations[b][target.index0()] == value)
        .expect("extremal value is attained")
}

/// Standard backward induction. Succeeds only when no decision node has a
/// tie for its mover; otherwise reports the first tie found in depth-first
/// (children-before-parent, left-to-right) order.
pub fn solve_generic(game: &Game) -> Result<SolveResult, IndifferenceError> {
    let mut solver = Solver::new(game, Resolution::Generic);
    match solver.value(&game.root, NodeAddress::root()) {
        Ok(value) => Ok(solver.finish(value)),
        Err(SolveFailure::Indifference(err)) => Err(err),
        Err(SolveFailure::Policy(_)) => unreachable!("generic runs apply no policy"),
    }
}

/// Backward induction with ties broken by `policy` at every tied node.
pub fn solve_with_policy(
    game: &Game,
    policy: &TieBreakPolicy,
) -> Result<SolveResult, InductionError> {
    let mut solver = Solver::new(game, Resolution::Policy(policy));
    match solver.value(&game.root, NodeAddress::root()) {
        Ok(value) => Ok(solver.finish(value)),
        Err(SolveFailure::Policy(err)) => Err(err),
        Err(SolveFailure::Indifference(_)) => unreachable!("policy runs break ties"),
    }
}

/// The mover's argmax set at the decision node `addr`, given one continuation
/// utility vector per branch.
pub fn best_actions(
    game: &Game,
    addr: &NodeAddress,
    continuations: &[UtilityVector],
) -> Result<BestSet, InductionError> {
    let (mover, branch_count) = decision_at(game, addr)?;
    check_continuations(game, branch_count, continuations)?;
    Ok(BestSet {
        node: addr.clone(),
        actions: argmax_actions(mover, continuations),
    })
}

fn decision_at(game: &Game, addr: &NodeAddress) -> Result<(PlayerId, usize), InductionError> {
    match resolve(game, addr)? {
        GameTree::Decision { mover, branches } => Ok((*mover, branches.len())),
        GameTree::Leaf { .. } => Err(InductionError::NotADecisionNode(addr.clone())),
    }
}

fn check_continuations(
    game: &Game,
    branch_count: usize,
    continuations: &[UtilityVector],
) -> Result<(), InductionError> {
    if continuations.len() != branch_count {
        return Err(InductionError::ContinuationCount {
            expected: branch_count,
            found: continuations.len(),
        });
    }
    for vector in continuations {
        if vector.len() != game.num_players {
            return Err(InductionError::ContinuationWidth {
                expected: game.num_players,
                found: vector.len(),
            });
        }
    }
    Ok(())
}

/// Friendliness of one best-set action toward one other player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FriendlinessEntry {
    pub player: PlayerId,
    /// Friendly iff the action is best for `player` among the best set.
    pub classification: Disposition,
    /// Where the action places `player`'s utility within the best set's
    /// range: 1 at the top, 0 at the bottom, 1 when the range is degenerate.
    pub score: Utility,
}

/// Friendliness of one best-set action toward every other player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionFriendliness {
    pub action: usize,
    pub toward: Vec<FriendlinessEntry>,
}

/// Per-action friendliness classification at one decision node. Only actions
/// in the best set appear; excluded actions are irrational, not unfriendly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FriendlinessReport {
    pub node: NodeAddress,
    pub mover: PlayerId,
    pub actions: Vec<ActionFriendliness>,
}

/// Classifies every best-set action at `addr` as friendly or unfriendly
/// toward each other player, with the quantified score.
pub fn classify_friendliness(
    game: &Game,
    addr: &NodeAddress,
    continuations: &[UtilityVector],
) -> Result<FriendlinessReport, InductionError> {
    let (mover, _) = decision_at(game, addr)?;
    let best = best_actions(game, addr, continuations)?;
    let actions = best
        .actions
        .iter()
        .enumerate()
        .map(|(position, &action)| {
            let toward = game_players_except(game, mover)
                .map(|player| {
                    let over_best: Vec<Utility> = best
                        .actions
                        .iter()
                        .map(|&b| continuations[b][player.index0()])
                        .collect();
                    let score = friendliness_score(&over_best, position);
                    FriendlinessEntry {
                        player,
                        classification: if score == Utility::one() {
                            Disposition::Friendly
                        } else {
                            Disposition::Unfriendly
                        },
                        score,
                    }
                })
                .collect();
            ActionFriendliness { action, toward }
        })
        .collect();
    Ok(FriendlinessReport {
        node: addr.clone(),
        mover,
        actions,
    })
}

fn game_players_except(game: &Game, except: PlayerId) -> impl Iterator<Item = PlayerId> {
    (1..=game.num_players)
        .map(PlayerId::new)
        .filter(move |&p| p != except)
}

/// Position of the chosen entry within the range of `utilities`:
/// `(u[chosen] - min) / (max - min)`, and 1 when all entries are equal.
///
/// # Panics
/// Panics when `utilities` is empty or `chosen` is out of range.
pub fn friendliness_score(utilities: &[Utility], chosen: usize) -> Utility {
    assert!(
        !utilities.is_empty(),
        "friendliness needs at least one utility"
    );
    let min = *utilities.iter().min().expect("non-empty");
    let max = *utilities.iter().max().expect("non-empty");
    if min == max {
        Utility::one()
    } else {
        (utilities[chosen] - min) / (max - min)
    }
}

/// Every pure subgame-perfect equilibrium: profiles whose action at every
/// decision node, reached or not, lies in that node's best set against the
/// continuation the profile itself induces. Equivalently, every play of
/// backward induction under every possible tie resolution. Profiles are
/// ordered lexicographically by branch indices.
pub fn enumerate_spe(game: &Game) -> Vec<(Vec<PureStrategy>, Outcome)> {
    let entries = spe_entries(&game.root, NodeAddress::root());
    let mut results: Vec<(Vec<usize>, Vec<PureStrategy>, Outcome)> = entries
        .into_iter()
        .map(|(choices, outcome)| {
            let profile = profile_from_choices(game, &choices);
            let key: Vec<usize> = profile
                .iter()
                .flat_map(|s| s.choices.values().copied())
                .collect();
            (key, profile, outcome)
        })
        .collect();
    results.sort_by(|a, b| a.0.cmp(&b.0));
    results
        .into_iter()
        .map(|(_, profile, outcome)| (profile, outcome))
        .collect()
}

/// All subgame-perfect choice maps of one subtree with their induced
/// outcomes.
fn spe_entries(tree: &GameTree, addr: NodeAddress) -> Vec<(BTreeMap<NodeAddress, usize>, Outcome)> {
    match tree {
        GameTree::Leaf { outcome } => vec![(BTreeMap::new(), outcome.clone())],
        GameTree::Decision { mover, branches } => {
            // Cartesian product of the branches' equilibrium sets.
            let mut combos: Vec<(BTreeMap<NodeAddress, usize>, Vec<Outcome>)> =
                vec![(BTreeMap::new(), Vec::new())];
            for (i, (_, subtree)) in branches.iter().enumerate() {
                let below = spe_entries(subtree, addr.child(i));
                combos = combos
                    .into_iter()
                    .flat_map(|(choices, outcomes)| {
                        below.iter().map(move |(sub_choices, sub_outcome)| {
                            let mut merged = choices.clone();
                            merged.extend(sub_choices.clone());
                            let mut outcomes = outcomes.clone();
                            outcomes.push(sub_outcome.clone());
                            (merged, outcomes)
                        })
                    })
                    .collect();
            }
            combos
                .into_iter()
                .flat_map(|(choices, outcomes)| {
                    let continuations: Vec<UtilityVector> =
                        outcomes.iter().map(|o| o.utilities.clone()).collect();
                    let best = argmax_actions(*mover, &continuations);
                    let addr = addr.clone();
                    best.into_iter().map(move |choice| {
                        let mut full = choices.clone();
                        full.insert(addr.clone(), choice);
                        (full, outcomes[choice].clone())
                    })
                })
                .collect()
        }
    }
}

/// Solve results per disposition profile.
pub type ScenarioTable = BTreeMap<DispositionProfile, SolveResult>;

/// Runs [`solve_with_policy`] under each given disposition profile.
pub fn scenario_solve(
    game: &Game,
    profiles: &[DispositionProfile],
) -> Result<ScenarioTable, InductionError> {
    if profiles.is_empty() {
        return Err(InductionError::NoProfiles);
    }
    let mut table = ScenarioTable::new();
    for profile in profiles {
        let result = solve_with_policy(game, &TieBreakPolicy::ByProfile(profile.clone()))?;
        table.insert(profile.clone(), result);
    }
    Ok(table)
}

/// [`scenario_solve`] over all 2^n disposition profiles.
pub fn scenario_solve_all(game: &Game) -> Result<ScenarioTable, InductionError> {
    scenario_solve(game, &DispositionProfile::all(game.num_players))
}

/// Replaces the subgame at `addr` by a single leaf carrying the subgame's
/// solved value; the leaf keeps the label of the leaf the solve reached, if
/// any. `result` must have been computed on the subgame rooted at `addr`.
pub fn collapse(
    game: &Game,
    addr: &NodeAddress,
    result: &SolveResult,
) -> Result<Game, InductionError> {
    let subtree = resolve(game, addr)?;
    if subtree.is_leaf() {
        return Err(InductionError::NotADecisionNode(addr.clone()));
    }
    // Replay the chosen path inside the subgame to find the reached leaf.
    let mut node = subtree;
    let mut at = NodeAddress::root();
    for (step_addr, branch) in &result.chosen_path {
        if *step_addr != at {
            return Err(InductionError::PathMismatch(format!(
                "expected step at {at}, found {step_addr}"
            )));
        }
        match node {
            GameTree::Leaf { .. } => {
                return Err(InductionError::PathMismatch(format!(
                    "path continues at {at} but the subgame has a leaf there"
                )))
            }
            GameTree::Decision { branches, .. } => {
                if *branch >= branches.len() {
                    return Err(InductionError::PathMismatch(format!(
                        "branch {branch} does not exist at {at}"
                    )));
                }
                node = &branches[*branch].1;
                at = at.child(*branch);
            }
        }
    }
    let label = match node {
        GameTree::Leaf { outcome } => outcome.label.clone(),
        GameTree::Decision { .. } => {
            return Err(InductionError::PathMismatch(
                "chosen path stops before reaching a leaf".to_owned(),
            ))
        }
    };
    let replacement = GameTree::Leaf {
        outcome: Outcome {
            label,
            utilities: result.root_value.clone(),
        },
    };
    let mut collapsed = game.clone();
    *subtree_mut(&mut collapsed.root, addr) = replacement;
    Ok(collapsed)
}

fn subtree_mut<'a>(tree: &'a mut GameTree, addr: &NodeAddress) -> &'a mut GameTree {
    let mut node = tree;
    for &branch in &addr.0 {
        match node {
            GameTree::Decision { branches, .. } => node = &mut branches[branch].1,
            GameTree::Leaf { .. } => unreachable!("address was resolved before"),
        }
    }
    node
}

/// A solved subgame as a standalone game, for collapsing piecemeal.
pub fn subgame(game: &Game, addr: &NodeAddress) -> Result<Game, ResolveError> {
    let subtree = resolve(game, addr)?;
    Ok(Game::new(game.num_players, subtree.clone()))
}
