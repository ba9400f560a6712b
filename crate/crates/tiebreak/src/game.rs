//! Exact-arithmetic domain model: players, outcomes, and perfect-information game trees.

use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// A player, identified by its 1-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlayerId(usize);

impl PlayerId {
    /// Creates a player id from a 1-based index.
    ///
    /// # Panics
    /// Panics if `index` is zero; player indices start at 1.
    pub fn new(index: usize) -> Self {
        assert!(index >= 1, "player indices are 1-based");
        PlayerId(index)
    }

    /// The 1-based index, as used in every external interface.
    pub fn index(self) -> usize {
        self.0
    }

    /// The 0-based index, for internal vector addressing.
    pub fn index0(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An exact rational utility value.
///
/// Equality is exact arithmetic equality; there is no tolerance parameter
/// anywhere in this crate. Values are kept in lowest terms with a positive
/// denominator. Numerator and denominator are 64-bit; arithmetic assumes
/// results stay within that range (comparisons are always exact).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Utility(Rational64);

impl Utility {
    /// Builds a utility from an integer numerator and denominator.
    /// Returns `None` when `den` is zero or either argument is `i64::MIN`
    /// (whose magnitude is unrepresentable after sign normalization). The
    /// sign is normalized onto the numerator and the fraction is reduced.
    pub fn new(num: i64, den: i64) -> Option<Self> {
        if den == 0 || num == i64::MIN || den == i64::MIN {
            None
        } else {
            Some(Utility(Rational64::new(num, den)))
        }
    }

    /// An integer utility.
    pub fn from_int(value: i64) -> Self {
        Utility(Rational64::from_integer(value))
    }

    pub fn zero() -> Self {
        Utility(Rational64::zero())
    }

    pub fn one() -> Self {
        Utility(Rational64::one())
    }

    /// Numerator in lowest terms (carries the sign).
    pub fn numer(self) -> i64 {
        *self.0.numer()
    }

    /// Denominator in lowest terms, always positive.
    pub fn denom(self) -> i64 {
        *self.0.denom()
    }

    pub fn is_negative(self) -> bool {
        self.0.is_negative()
    }
}

impl From<i64> for Utility {
    fn from(value: i64) -> Self {
        Utility::from_int(value)
    }
}

impl std::ops::Add for Utility {
    type Output = Utility;
    fn add(self, rhs: Utility) -> Utility {
        Utility(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Utility {
    type Output = Utility;
    fn sub(self, rhs: Utility) -> Utility {
        Utility(self.0 - rhs.0)
    }
}

impl std::ops::Mul for Utility {
    type Output = Utility;
    fn mul(self, rhs: Utility) -> Utility {
        Utility(self.0 * rhs.0)
    }
}

impl std::ops::Div for Utility {
    type Output = Utility;
    fn div(self, rhs: Utility) -> Utility {
        Utility(self.0 / rhs.0)
    }
}

impl std::ops::AddAssign for Utility {
    fn add_assign(&mut self, rhs: Utility) {
        self.0 += rhs.0;
    }
}

impl std::iter::Sum for Utility {
    fn sum<I: Iterator<Item = Utility>>(iter: I) -> Utility {
        iter.fold(Utility::zero(), |acc, u| acc + u)
    }
}

impl fmt::Display for Utility {
    /// Prints `n` for integers and `n/d` otherwise, in lowest terms.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

/// The payoff attached to a leaf: one utility per player, plus an optional
/// advisory label. Algorithms consult only the utility vector; two leaves with
/// equal vectors denote the same outcome regardless of their labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Outcome {
    pub label: Option<String>,
    pub utilities: Vec<Utility>,
}

impl Outcome {
    pub fn new(label: Option<&str>, utilities: Vec<Utility>) -> Self {
        Outcome {
            label: label.map(str::to_owned),
            utilities,
        }
    }

    /// Unlabeled outcome from integer payoffs.
    pub fn from_ints(utilities: &[i64]) -> Self {
        Outcome {
            label: None,
            utilities: utilities.iter().map(|&u| Utility::from_int(u)).collect(),
        }
    }

    /// Labeled outcome from integer payoffs.
    pub fn labeled(label: &str, utilities: &[i64]) -> Self {
        Outcome {
            label: Some(label.to_owned()),
            utilities: utilities.iter().map(|&u| Utility::from_int(u)).collect(),
        }
    }

    /// Utility of one player.
    pub fn utility(&self, player: PlayerId) -> Utility {
        self.utilities[player.index0()]
    }
}

/// A finite perfect-information game tree: interior decision nodes with
/// ordered, labeled branches, and leaves carrying outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameTree {
    Decision {
        mover: PlayerId,
        branches: Vec<(String, GameTree)>,
    },
    Leaf {
        outcome: Outcome,
    },
}

impl GameTree {
    pub fn decision(mover: PlayerId, branches: Vec<(&str, GameTree)>) -> Self {
        GameTree::Decision {
            mover,
            branches: branches
                .into_iter()
                .map(|(label, tree)| (label.to_owned(), tree))
                .collect(),
        }
    }

    pub fn leaf(outcome: Outcome) -> Self {
        GameTree::Leaf { outcome }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, GameTree::Leaf { .. })
    }

    /// Number of branches at a decision node, 0 at a leaf.
    pub fn branch_count(&self) -> usize {
        match self {
            GameTree::Decision { branches, .. } => branches.len(),
            GameTree::Leaf { .. } => 0,
        }
    }
}

/// A finite perfect-information game: a player count and a tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    pub num_players: usize,
    pub root: GameTree,
}

impl Game {
    pub fn new(num_players: usize, root: GameTree) -> Self {
        Game { num_players, root }
    }

    /// All player ids of this game, ascending.
    pub fn players(&self) -> impl Iterator<Item = PlayerId> {
        (1..=self.num_players).map(PlayerId::new)
    }
}

/// Path from the root to a node, as 0-based branch indices. The empty path is
/// the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeAddress(pub Vec<usize>);

impl NodeAddress {
    pub fn root() -> Self {
        NodeAddress(Vec::new())
    }

    pub fn from_path(path: &[usize]) -> Self {
        NodeAddress(path.to_vec())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// The address one branch further down.
    pub fn child(&self, branch: usize) -> Self {
        let mut path = self.0.clone();
        path.push(branch);
        NodeAddress(path)
    }
}

impl fmt::Display for NodeAddress {
    /// Renders as a slash path: `/` for the root, `/0/1` for deeper nodes.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "/");
        }
        for step in &self.0 {
            write!(f, "/{step}")?;
        }
        Ok(())
    }
}

/// Failure to resolve a [`NodeAddress`] against a tree.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    /// The step at `step` asks for a branch the node does not have.
    #[error(
        "address {addr}: step {step} selects branch {branch} but the node has {available} branches"
    )]
    BranchOutOfRange {
        addr: NodeAddress,
        step: usize,
        branch: usize,
        available: usize,
    },
    /// The step at `step` tries to descend into a leaf.
    #[error("address {addr}: step {step} descends into a leaf")]
    IntoLeaf { addr: NodeAddress, step: usize },
}

/// One broken invariant found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub addr: NodeAddress,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    /// `num_players` must be at least 1.
    NoPlayers,
    /// A mover index outside `1..=num_players`.
    MoverOutOfRange { mover: usize, num_players: usize },
    /// A decision node with no branches.
    NoBranches,
    /// Two branches at one node share a label.
    DuplicateActionLabel { label: String },
    /// A leaf whose utility vector length differs from the player count.
    WrongUtilityCount { expected: usize, found: usize },
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::NoPlayers => write!(f, "game must have at least one player"),
            ViolationKind::MoverOutOfRange { mover, num_players } => {
                write!(f, "mover {mover} is outside 1..={num_players}")
            }
            ViolationKind::NoBranches => write!(f, "decision node has no branches"),
            ViolationKind::DuplicateActionLabel { label } => {
                write!(f, "duplicate action label {label:?}")
            }
            ViolationKind::WrongUtilityCount { expected, found } => {
                write!(f, "leaf has {found} utilities, expected {expected}")
            }
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.addr, self.kind)
    }
}

/// Checks every structural invariant of `game` and returns the violations
/// found; an empty list means a well-formed game.
pub fn validate(game: &Game) -> Vec<Violation> {
    let mut violations = Vec::new();
    if game.num_players == 0 {
        violations.push(Violation {
            addr: NodeAddress::root(),
            kind: ViolationKind::NoPlayers,
        });
    }
    validate_tree(
        &game.root,
        game.num_players,
        NodeAddress::root(),
        &mut violations,
    );
    violations
}

fn validate_tree(
    tree: &GameTree,
    num_players: usize,
    addr: NodeAddress,
    violations: &mut Vec<Violation>,
) {
    match tree {
        GameTree::Leaf { outcome } => {
            if outcome.utilities.len() != num_players {
                violations.push(Violation {
                    addr,
                    kind: ViolationKind::WrongUtilityCount {
                        expected: num_players,
                        found: outcome.utilities.len(),
                    },
                });
            }
        }
        GameTree::Decision { mover, branches } => {
            if mover.index() > num_players {
                violations.push(Violation {
                    addr: addr.clone(),
                    kind: ViolationKind::MoverOutOfRange {
                        mover: mover.index(),
                        num_players,
                    },
                });
            }
            if branches.is_empty() {
                violations.push(Violation {
                    addr: addr.clone(),
                    kind: ViolationKind::NoBranches,
                });
            }
            for (i, (label, _)) in branches.iter().enumerate() {
                if branches[..i].iter().any(|(seen, _)| seen == label) {
                    violations.push(Violation {
                        addr: addr.clone(),
                        kind: ViolationKind::DuplicateActionLabel {
                            label: label.clone(),
                        },
                    });
                }
            }
            for (i, (_, subtree)) in branches.iter().enumerate() {
                validate_tree(subtree, num_players, addr.child(i), violations);
            }
        }
    }
}

/// Returns the subtree rooted at `addr`; the empty path returns the root.
pub fn resolve<'a>(game: &'a Game, addr: &NodeAddress) -> Result<&'a GameTree, ResolveError> {
    let mut node = &game.root;
    for (step, &branch) in addr.0.iter().enumerate() {
        match node {
            GameTree::Leaf { .. } => {
                return Err(ResolveError::IntoLeaf {
                    addr: addr.clone(),
                    step,
                })
            }
            GameTree::Decision { branches, .. } => {
                if branch >= branches.len() {
                    return Err(ResolveError::BranchOutOfRange {
                        addr: addr.clone(),
                        step,
                        branch,
                        available: branches.len(),
                    });
                }
                node = &branches[branch].1;
            }
        }
    }
    Ok(node)
}

/// Relabels leaves so that leaves with equal utility vectors carry the same
/// label: the first label encountered in depth-first, left-to-right order
/// wins. Utility vectors and tree shape are unchanged, so the operation is
/// idempotent.
pub fn canonicalize_outcomes(game: &Game) -> Game {
    let mut labels: Vec<(Vec<Utility>, String)> = Vec::new();
    for (_, outcome) in leaves(game) {
        if let Some(label) = &outcome.label {
            if !labels.iter().any(|(u, _)| *u == outcome.utilities) {
                labels.push((outcome.utilities.clone(), label.clone()));
            }
        }
    }
    let mut canonical = game.clone();
    relabel(&mut canonical.root, &labels);
    canonical
}

fn relabel(tree: &mut GameTree, labels: &[(Vec<Utility>, String)]) {
    match tree {
        GameTree::Leaf { outcome } => {
            if let Some((_, label)) = labels.iter().find(|(u, _)| *u == outcome.utilities) {
                outcome.label = Some(label.clone());
            }
        }
        GameTree::Decision { branches, .. } => {
            for (_, subtree) in branches {
                relabel(subtree, labels);
            }
        }
    }
}

/// Enumerates all leaves in depth-first, left-to-right order.
pub fn leaves(game: &Game) -> Vec<(NodeAddress, &Outcome)> {
    let mut acc = Vec::new();
    collect_leaves(&game.root, NodeAddress::root(), &mut acc);
    acc
}

fn collect_leaves<'a>(
    tree: &'a GameTree,
    addr: NodeAddress,
    acc: &mut Vec<(NodeAddress, &'a Outcome)>,
) {
    match tree {
        GameTree::Leaf { outcome } => acc.push((addr, outcome)),
        GameTree::Decision { branches, .. } => {
            for (i, (_, subtree)) in branches.iter().enumerate() {
                collect_leaves(subtree, addr.child(i), acc);
            }
        }
    }
}

/// Every decision node of the game with its address, depth-first.
pub fn decision_nodes(game: &Game) -> Vec<(NodeAddress, PlayerId, usize)> {
    let mut acc = Vec::new();
    collect_decisions(&game.root, NodeAddress::root(), &mut acc);
    acc
}

fn collect_decisions(
    tree: &GameTree,
    addr: NodeAddress,
    acc: &mut Vec<(NodeAddress, PlayerId, usize)>,
) {
    if let GameTree::Decision { mover, branches } = tree {
        acc.push((addr.clone(), *mover, branches.len()));
        for (i, (_, subtree)) in branches.iter().enumerate() {
            collect_decisions(subtree, addr.child(i), acc);
        }
    }
}
