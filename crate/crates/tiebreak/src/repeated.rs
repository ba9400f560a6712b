//! The simultaneous stage game in which each player decides whether the
//! other receives a unit of utility, history-dependent strategies over it
//! (Tit-for-Tat and the constants), finite repeated play, and the alternating
//! perfect-information variant of the same game.

use std::fmt;

use thiserror::Error;

use crate::game::{Game, GameTree, Outcome, PlayerId, Utility};
use crate::normalform::{NormalForm, PureStrategy};

/// A 2-player bimatrix stage game with labeled actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageGame {
    actions: [Vec<String>; 2],
    /// Row-major over action indices: `payoffs[i1 * |A2| + i2]`.
    payoffs: Vec<(Utility, Utility)>,
}

impl StageGame {
    /// Builds a stage game from the two action lists and one payoff pair per
    /// cell, row-major in Player 1's actions.
    ///
    /// # Panics
    /// Panics if the payoff table does not cover the full action product.
    pub fn new(
        actions_p1: Vec<String>,
        actions_p2: Vec<String>,
        payoffs: Vec<(Utility, Utility)>,
    ) -> Self {
        assert_eq!(
            payoffs.len(),
            actions_p1.len() * actions_p2.len(),
            "stage game payoffs must cover the whole action product"
        );
        StageGame {
            actions: [actions_p1, actions_p2],
            payoffs,
        }
    }

    pub fn actions(&self, player: PlayerId) -> &[String] {
        &self.actions[player.index0()]
    }

    pub fn action_index(&self, player: PlayerId, label: &str) -> Option<usize> {
        self.actions[player.index0()]
            .iter()
            .position(|a| a == label)
    }

    pub fn payoff_by_index(&self, a1: usize, a2: usize) -> (Utility, Utility) {
        self.payoffs[a1 * self.actions[1].len() + a2]
    }

    /// Payoff pair for a joint action given by labels.
    pub fn payoff(&self, a1: &str, a2: &str) -> Option<(Utility, Utility)> {
        let i1 = self.action_index(PlayerId::new(1), a1)?;
        let i2 = self.action_index(PlayerId::new(2), a2)?;
        Some(self.payoff_by_index(i1, i2))
    }
}

/// The Simultaneous Indifference stage game: playing "F" gives the other
/// player one unit, "U" gives nothing, and neither player can affect its own
/// payoff.
pub fn simultaneous_indifference() -> StageGame {
    let u = |a: i64, b: i64| (Utility::from_int(a), Utility::from_int(b));
    StageGame::new(
        vec!["F".to_owned(), "U".to_owned()],
        vec!["F".to_owned(), "U".to_owned()],
        // (F,F), (F,U), (U,F), (U,U)
        vec![u(1, 1), u(0, 1), u(1, 0), u(0, 0)],
    )
}

/// What both players did in one round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointAction {
    pub p1: String,
    pub p2: String,
}

impl JointAction {
    /// The action the opponent of `role` played.
    pub fn opponent_of(&self, role: PlayerId) -> &str {
        if role.index() == 1 {
            &self.p2
        } else {
            &self.p1
        }
    }
}

/// Rounds played so far, oldest first.
pub type History = [JointAction];

type RuleFn = Box<dyn Fn(PlayerId, &History) -> String + Send + Sync>;

/// A deterministic rule mapping (own role, history so far) to the next
/// action label.
pub struct StrategyRule {
    name: String,
    rule: RuleFn,
}

impl StrategyRule {
    pub fn new(
        name: &str,
        rule: impl Fn(PlayerId, &History) -> String + Send + Sync + 'static,
    ) -> Self {
        StrategyRule {
            name: name.to_owned(),
            rule: Box::new(rule),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn act(&self, role: PlayerId, history: &History) -> String {
        (self.rule)(role, history)
    }

    /// Looks up one of the bundled rules by its command-line name:
    /// `tft`, `allf`, or `allu`.
    pub fn by_name(name: &str) -> Option<StrategyRule> {
        match name {
            "tft" => Some(tit_for_tat()),
            "allf" => Some(all_f()),
            "allu" => Some(all_u()),
            _ => None,
        }
    }
}

impl fmt::Debug for StrategyRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StrategyRule")
            .field("name", &self.name)
            .finish()
    }
}

/// Start with "F", then repeat whatever the opponent played last round.
pub fn tit_for_tat() -> StrategyRule {
    StrategyRule::new("tft", |role, history| match history.last() {
        None => "F".to_owned(),
        Some(last) => last.opponent_of(role).to_owned(),
    })
}

/// Always "F".
pub fn all_f() -> StrategyRule {
    StrategyRule::new("allf", |_, _| "F".to_owned())
}

/// Always "U".
pub fn all_u() -> StrategyRule {
    StrategyRule::new("allu", |_, _| "U".to_owned())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    /// 1-based round number.
    pub round: usize,
    pub actions: JointAction,
    pub payoffs: (Utility, Utility),
}

/// The full record of a repeated play.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub rounds: Vec<RoundRecord>,
    pub cumulative: (Utility, Utility),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepeatedError {
    #[error("a repeated game needs at least one round")]
    ZeroRounds,
    #[error("strategy {strategy:?} played {label:?}, which player {player} does not have")]
    UnknownAction {
        player: PlayerId,
        strategy: String,
        label: String,
    },
}

/// Plays `rounds` rounds of the stage game, feeding each rule the joint
/// history of all previous rounds.
pub fn play_repeated(
    stage: &StageGame,
    s1: &StrategyRule,
    s2: &StrategyRule,
    rounds: usize,
) -> Result<Transcript, RepeatedError> {
    if rounds == 0 {
        return Err(RepeatedError::ZeroRounds);
    }
    let mut history: Vec<JointAction> = Vec::with_capacity(rounds);
    let mut records = Vec::with_capacity(rounds);
    let mut cumulative = (Utility::zero(), Utility::zero());
    for round in 1..=rounds {
        let a1 = s1.act(PlayerId::new(1), &history);
        let a2 = s2.act(PlayerId::new(2), &history);
        check_action(stage, PlayerId::new(1), s1, &a1)?;
        check_action(stage, PlayerId::new(2), s2, &a2)?;
        let payoffs = stage.payoff(&a1, &a2).expect("actions checked");
        cumulative.0 += payoffs.0;
        cumulative.1 += payoffs.1;
        let actions = JointAction { p1: a1, p2: a2 };
        history.push(actions.clone());
        records.push(RoundRecord {
            round,
            actions,
            payoffs,
        });
    }
    Ok(Transcript {
        rounds: records,
        cumulative,
    })
}

fn check_action(
    stage: &StageGame,
    player: PlayerId,
    rule: &StrategyRule,
    label: &str,
) -> Result<(), RepeatedError> {
    if stage.action_index(player, label).is_none() {
        return Err(RepeatedError::UnknownAction {
            player,
            strategy: rule.name().to_owned(),
            label: label.to_owned(),
        });
    }
    Ok(())
}

/// The alternating perfect-information version: players move in turn
/// (Player 1 first), each choosing "F" to give the other player one unit or
/// "U" to give nothing. Leaves carry the accumulated totals, so the game has
/// `2^moves` leaves.
pub fn alternating_game(moves: usize) -> Game {
    Game::new(2, alternating_subtree(1, moves, 0, 0))
}

fn alternating_subtree(move_number: usize, moves: usize, p1_total: i64, p2_total: i64) -> GameTree {
    if move_number > moves {
        return GameTree::Leaf {
            outcome: Outcome::from_ints(&[p1_total, p2_total]),
        };
    }
    let mover_is_p1 = move_number % 2 == 1;
    let mover = PlayerId::new(if mover_is_p1 { 1 } else { 2 });
    let give = |gift: i64| {
        if mover_is_p1 {
            alternating_subtree(move_number + 1, moves, p1_total, p2_total + gift)
        } else {
            alternating_subtree(move_number + 1, moves, p1_total + gift, p2_total)
        }
    };
    GameTree::Decision {
        mover,
        branches: vec![("F".to_owned(), give(1)), ("U".to_owned(), give(0))],
    }
}

/// The stage game as a two-player [`NormalForm`], so the normal-form
/// analyses (pure Nash, best responses, payoff equivalence) apply to it.
/// Stage strategies have no decision nodes, only their action label.
pub fn stage_as_normal_form(stage: &StageGame) -> NormalForm {
    let strategies: Vec<Vec<PureStrategy>> = [PlayerId::new(1), PlayerId::new(2)]
        .into_iter()
        .map(|player| {
            stage
                .actions(player)
                .iter()
                .map(|label| PureStrategy {
                    player,
                    choices: Default::default(),
                    label: label.clone(),
                })
                .collect()
        })
        .collect();
    let mut payoffs = Vec::new();
    for i1 in 0..stage.actions(PlayerId::new(1)).len() {
        for i2 in 0..stage.actions(PlayerId::new(2)).len() {
            let (u1, u2) = stage.payoff_by_index(i1, i2);
            payoffs.push(vec![u1, u2]);
        }
    }
    NormalForm::from_parts(strategies, payoffs)
}
