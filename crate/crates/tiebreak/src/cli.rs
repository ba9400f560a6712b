//! Command-line front end. `run` is the whole program; the binary wraps it
//! with process streams so tests can drive it in-process as well.
//!
//! Exit codes: 0 on success, 1 on usage, file, or parse errors, 2 when
//! `solve` without a policy detects indifference. No other codes.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use crate::game::{validate, Game};
use crate::gdl;
use crate::induction::solve_generic;
use crate::repeated::{simultaneous_indifference, StrategyRule};
use crate::report;

#[derive(Parser)]
#[command(
    name = "tiebreak",
    version,
    about = "Solve finite perfect-information games with exact tie detection and friendliness-based tie-breaking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a game file against the structural invariants.
    Validate { file: PathBuf },
    /// Solve by backward induction; fails on indifference unless a
    /// tie-breaking policy is given.
    Solve {
        file: PathBuf,
        /// first | friendly:I | unfriendly:I | profile:1=F,2=U
        #[arg(long)]
        policy: Option<String>,
    },
    /// Enumerate all pure subgame-perfect equilibria.
    Spe { file: PathBuf },
    /// Solve under every disposition profile.
    Scenarios { file: PathBuf },
    /// Classify tied actions as friendly or unfriendly toward each player.
    Friendliness { file: PathBuf },
    /// Print the normal-form payoff tensor.
    Nf { file: PathBuf },
    /// Enumerate pure Nash equilibria of the normal form.
    Nash { file: PathBuf },
    /// Play a repeated or alternating gift game between named strategies.
    Simulate {
        /// Strategy of player 1: tft | allf | allu
        #[arg(long)]
        p1: String,
        /// Strategy of player 2: tft | allf | allu
        #[arg(long)]
        p2: String,
        /// Rounds to play (moves, in the alternating game).
        #[arg(long)]
        rounds: usize,
        /// The stage game to repeat.
        #[arg(long, conflicts_with = "alternating")]
        stage: Option<StageKind>,
        /// Play the alternating perfect-information version instead.
        #[arg(long)]
        alternating: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StageKind {
    /// Simultaneous Indifference.
    Simind,
}

/// Runs the command line against arbitrary streams and returns the exit
/// code. `terminal` selects aligned human-readable output instead of raw
/// tab-separated values.
pub fn run<I, A>(args: I, out: &mut dyn Write, err: &mut dyn Write, terminal: bool) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    1
                }
            };
        }
    };
    match dispatch(cli.command, terminal) {
        Ok(text) => {
            let text = if terminal {
                report::align_columns(&text)
            } else {
                text
            };
            let _ = write!(out, "{text}");
            0
        }
        Err(failure) => {
            let _ = writeln!(err, "{}", failure.message);
            failure.code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

fn load_game(file: &Path) -> Result<Game, Failure> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| Failure::usage(format!("{}: {e}", file.display())))?;
    gdl::parse_game(&text).map_err(|e| Failure::usage(format!("{}:{e}", file.display())))
}

fn dispatch(command: Command, _terminal: bool) -> Result<String, Failure> {
    match command {
        Command::Validate { file } => {
            let game = load_game(&file)?;
            let violations = validate(&game);
            let text = report::render_violations(&violations);
            if violations.is_empty() {
                Ok(text)
            } else {
                Err(Failure {
                    code: 1,
                    message: text.trim_end().to_owned(),
                })
            }
        }
        Command::Solve { file, policy } => {
            let game = load_game(&file)?;
            let result = match policy {
                None => solve_generic(&game).map_err(|e| Failure {
                    code: 2,
                    message: e.to_string(),
                })?,
                Some(spec) => {
                    let policy = report::parse_policy(&spec, game.num_players)
                        .map_err(|e| Failure::usage(format!("--policy: {e}")))?;
                    crate::induction::solve_with_policy(&game, &policy)
                        .map_err(|e| Failure::usage(e.to_string()))?
                }
            };
            Ok(report::render_solve(&game, &result))
        }
        Command::Spe { file } => Ok(report::render_spe(&load_game(&file)?)),
        Command::Scenarios { file } => {
            let game = load_game(&file)?;
            report::render_scenarios(&game).map_err(|e| Failure::usage(e.to_string()))
        }
        Command::Friendliness { file } => {
            let game = load_game(&file)?;
            report::render_friendliness(&game).map_err(|e| Failure::usage(e.to_string()))
        }
        Command::Nf { file } => Ok(report::render_normal_form(&load_game(&file)?)),
        Command::Nash { file } => Ok(report::render_nash(&load_game(&file)?)),
        Command::Simulate {
            p1,
            p2,
            rounds,
            stage,
            alternating,
        } => {
            let s1 = strategy(&p1, "--p1")?;
            let s2 = strategy(&p2, "--p2")?;
            if rounds == 0 {
                return Err(Failure::usage("--rounds: must be at least 1"));
            }
            if alternating {
                report::render_alternating(&s1, &s2, rounds)
                    .map_err(|e| Failure::usage(e.to_string()))
            } else {
                let StageKind::Simind = stage.unwrap_or(StageKind::Simind);
                report::render_simulation(&simultaneous_indifference(), &s1, &s2, rounds)
                    .map_err(|e| Failure::usage(e.to_string()))
            }
        }
    }
}

fn strategy(name: &str, flag: &str) -> Result<StrategyRule, Failure> {
    StrategyRule::by_name(name).ok_or_else(|| {
        Failure::usage(format!(
            "{flag}: unknown strategy {name:?}; use tft, allf, or allu"
        ))
    })
}
