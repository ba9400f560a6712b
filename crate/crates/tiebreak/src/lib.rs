//! A solver toolkit for finite perfect-information extensive-form games that
//! treats player indifference as a first-class phenomenon.
//!
//! Utilities are exact rationals, so ties are detected exactly rather than
//! perturbed away. On top of tie detection the crate offers:
//!
//! - [`induction`]: backward induction that either demands genericity
//!   ([`induction::solve_generic`]) or breaks ties by an explicit policy
//!   (first-listed, friendly/unfriendly toward a target player, or
//!   per-player dispositions); scenario tables over all disposition
//!   profiles; subgame collapsing; friendliness classification and scoring
//!   of tied actions; and exhaustive enumeration of pure subgame-perfect
//!   equilibria.
//! - [`normalform`]: extensive-to-normal-form conversion, pure Nash
//!   equilibria, best responses, payoff-equivalence classes, and the value a
//!   strategy guarantees against a rational opponent.
//! - [`repeated`]: the simultaneous gift-giving stage game, Tit-for-Tat and
//!   constant strategies, finite repeated play, and the alternating
//!   perfect-information variant.
//! - [`gdl`]: a small s-expression game-description language with a
//!   canonical serializer, plus builders for the bundled example games.
//! - [`cli`] and [`report`]: the `tiebreak` command line and its stable
//!   tab-separated output.
//!
//! ```
//! use tiebreak::gdl;
//! use tiebreak::induction::{
//!     solve_generic, solve_with_policy, Disposition, DispositionProfile, TieBreakPolicy,
//! };
//! use tiebreak::game::PlayerId;
//!
//! // Player 2 cannot affect his own payoff anywhere in this game, so plain
//! // backward induction refuses to pick for him.
//! let game = gdl::indifference_game();
//! let tie = solve_generic(&game).unwrap_err();
//! assert_eq!(tie.mover, PlayerId::new(2));
//!
//! // Under mutual friendliness both players break their ties in the other
//! // player's favor and the play reaches the (1,1) outcome.
//! let both_friendly = DispositionProfile::uniform(2, Disposition::Friendly);
//! let solved = solve_with_policy(&game, &TieBreakPolicy::ByProfile(both_friendly)).unwrap();
//! assert_eq!(solved.root_value, vec![tiebreak::Utility::one(); 2]);
//! ```

pub mod cli;
pub mod game;
pub mod gdl;
pub mod induction;
pub mod normalform;
pub mod repeated;
pub mod report;

pub use game::{Game, GameTree, NodeAddress, Outcome, PlayerId, Utility};
