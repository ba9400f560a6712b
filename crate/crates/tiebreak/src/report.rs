//! The machine-facing text layer: parsing of policy specifications and the
//! tab-separated reports printed by the command line and returned over the
//! C API. Every report has a header row; identical inputs produce identical
//! bytes.

use std::fmt::Write as _;

use crate::game::{resolve, Game, GameTree, NodeAddress, PlayerId, Utility, Violation};
use crate::induction::{
    classify_friendliness, scenario_solve_all, solve_with_policy, subgame, Disposition,
    DispositionProfile, InductionError, SolveResult, TieBreakPolicy, UtilityVector,
};
use crate::normalform::{pure_nash, to_normal_form, NormalForm};
use crate::repeated::{play_repeated, RepeatedError, StageGame, StrategyRule};

/// Parses a policy specification: `first`, `friendly:I`, `unfriendly:I`, or
/// `profile:SPEC` with SPEC like `1=F,2=U`.
pub fn parse_policy(spec: &str, num_players: usize) -> Result<TieBreakPolicy, String> {
    if spec == "first" {
        return Ok(TieBreakPolicy::FirstListed);
    }
    if let Some(target) = spec.strip_prefix("friendly:") {
        return parse_target(target, num_players).map(TieBreakPolicy::FriendlyTo);
    }
    if let Some(target) = spec.strip_prefix("unfriendly:") {
        return parse_target(target, num_players).map(TieBreakPolicy::UnfriendlyTo);
    }
    if let Some(profile) = spec.strip_prefix("profile:") {
        return parse_profile(profile, num_players).map(TieBreakPolicy::ByProfile);
    }
    Err(format!(
        "unknown policy {spec:?}; use first, friendly:I, unfriendly:I, or profile:1=F,2=U"
    ))
}

fn parse_target(text: &str, num_players: usize) -> Result<PlayerId, String> {
    let index: usize = text
        .parse()
        .map_err(|_| format!("player index {text:?} is not a positive integer"))?;
    if index == 0 || index > num_players {
        return Err(format!("player index {index} is outside 1..={num_players}"));
    }
    Ok(PlayerId::new(index))
}

/// Parses a disposition specification like `1=F,2=U`, which must assign every
/// player of the game exactly once.
pub fn parse_profile(spec: &str, num_players: usize) -> Result<DispositionProfile, String> {
    let mut assigned: Vec<Option<Disposition>> = vec![None; num_players];
    for part in spec.split(',') {
        let (player, disposition) = part
            .split_once('=')
            .ok_or_else(|| format!("bad disposition {part:?}; expected forms like 1=F"))?;
        let player = parse_target(player, num_players)?;
        let disposition = match disposition {
            "F" => Disposition::Friendly,
            "U" => Disposition::Unfriendly,
            other => return Err(format!("bad disposition {other:?}; expected F or U")),
        };
        let slot = &mut assigned[player.index0()];
        if slot.is_some() {
            return Err(format!("player {player} assigned twice"));
        }
        *slot = Some(disposition);
    }
    let dispositions: Option<Vec<Disposition>> = assigned.into_iter().collect();
    match dispositions {
        Some(d) => Ok(DispositionProfile::new(d)),
        None => Err(format!("profile must assign all {num_players} players")),
    }
}

/// Space-separated utilities, rationals as `n` or `n/d`.
pub fn render_utilities(value: &[Utility]) -> String {
    value
        .iter()
        .map(Utility::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn action_label(game: &Game, addr: &NodeAddress, branch: usize) -> String {
    match resolve(game, addr) {
        Ok(GameTree::Decision { branches, .. }) => branches[branch].0.clone(),
        _ => String::new(),
    }
}

/// The action labels along a chosen path, space-separated.
pub fn render_path(game: &Game, path: &[(NodeAddress, usize)]) -> String {
    path.iter()
        .map(|(addr, branch)| action_label(game, addr, *branch))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn render_violations(violations: &[Violation]) -> String {
    let mut out = String::from("address\tviolation\n");
    for v in violations {
        let _ = writeln!(out, "{}\t{}", v.addr, v.kind);
    }
    out
}

/// The realized play of a solve: one row per decision taken, then the
/// reached leaf with the game value.
pub fn render_solve(game: &Game, result: &SolveResult) -> String {
    let mut out = String::from("node\taction\tvalue\n");
    let mut leaf_addr = NodeAddress::root();
    for (addr, branch) in &result.chosen_path {
        let _ = writeln!(out, "{}\t{}\t", addr, action_label(game, addr, *branch));
        leaf_addr = addr.child(*branch);
    }
    let _ = writeln!(
        out,
        "{}\t\t{}",
        leaf_addr,
        render_utilities(&result.root_value)
    );
    out
}

/// One row per pure subgame-perfect equilibrium: each player's strategy
/// label, the reached outcome's label, and its utilities.
pub fn render_spe(game: &Game) -> String {
    let mut out = header_per_player(game.num_players, &["label", "value"]);
    for (profile, outcome) in crate::induction::enumerate_spe(game) {
        for strategy in &profile {
            let _ = write!(out, "{}\t", strategy.label);
        }
        let _ = writeln!(
            out,
            "{}\t{}",
            outcome.label.as_deref().unwrap_or(""),
            render_utilities(&outcome.utilities)
        );
    }
    out
}

fn header_per_player(num_players: usize, rest: &[&str]) -> String {
    let mut columns: Vec<String> = (1..=num_players).map(|p| format!("p{p}")).collect();
    columns.extend(rest.iter().map(|s| s.to_string()));
    let mut out = columns.join("\t");
    out.push('\n');
    out
}

/// One row per disposition profile: the profile, the root value it induces,
/// and the realized action path.
pub fn render_scenarios(game: &Game) -> Result<String, InductionError> {
    let table = scenario_solve_all(game)?;
    let mut out = String::from("profile\tvalue\tpath\n");
    for (profile, result) in &table {
        let _ = writeln!(
            out,
            "{}\t{}\t{}",
            profile,
            render_utilities(&result.root_value),
            render_path(game, &result.chosen_path)
        );
    }
    Ok(out)
}

/// Classifies every best-set action at every tied node. Continuation values
/// below each candidate branch are computed with first-listed tie resolution,
/// so the table does not depend on any disposition assumption.
pub fn render_friendliness(game: &Game) -> Result<String, InductionError> {
    let baseline = solve_with_policy(game, &TieBreakPolicy::FirstListed)?;
    let mut out = String::from("node\taction\tplayer\tclass\tscore\n");
    for addr in &baseline.tie_nodes {
        let node = resolve(game, addr)?;
        let branch_count = node.branch_count();
        let mut continuations: Vec<UtilityVector> = Vec::with_capacity(branch_count);
        for branch in 0..branch_count {
            let below = subgame(game, &addr.child(branch))?;
            let solved = solve_with_policy(&below, &TieBreakPolicy::FirstListed)?;
            continuations.push(solved.root_value);
        }
        let report = classify_friendliness(game, addr, &continuations)?;
        for action in &report.actions {
            for entry in &action.toward {
                let class = match entry.classification {
                    Disposition::Friendly => "friendly",
                    Disposition::Unfriendly => "unfriendly",
                };
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}",
                    addr,
                    action_label(game, addr, action.action),
                    entry.player,
                    class,
                    entry.score
                );
            }
        }
    }
    Ok(out)
}

/// The full payoff tensor, one row per strategy profile.
pub fn render_normal_form(game: &Game) -> String {
    let nf = to_normal_form(game);
    render_tensor(&nf, None)
}

/// One row per pure Nash equilibrium of the game's normal form.
pub fn render_nash(game: &Game) -> String {
    let nf = to_normal_form(game);
    let nash = pure_nash(&nf);
    render_tensor(&nf, Some(&nash))
}

fn render_tensor(nf: &NormalForm, only: Option<&[Vec<usize>]>) -> String {
    let mut out = header_per_player(nf.num_players(), &["value"]);
    let profiles = nf.profiles();
    let selected: Vec<&Vec<usize>> = match only {
        Some(subset) => subset.iter().collect(),
        None => profiles.iter().collect(),
    };
    for profile in selected {
        for label in nf.profile_labels(profile) {
            let _ = write!(out, "{label}\t");
        }
        let _ = writeln!(out, "{}", render_utilities(nf.payoff(profile)));
    }
    out
}

/// Per-round transcript of a repeated stage game plus a cumulative row.
pub fn render_simulation(
    stage: &StageGame,
    s1: &StrategyRule,
    s2: &StrategyRule,
    rounds: usize,
) -> Result<String, RepeatedError> {
    let transcript = play_repeated(stage, s1, s2, rounds)?;
    let mut out = String::from("round\tp1\tp2\tu1\tu2\n");
    for record in &transcript.rounds {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            record.round, record.actions.p1, record.actions.p2, record.payoffs.0, record.payoffs.1
        );
    }
    let _ = writeln!(
        out,
        "total\t\t\t{}\t{}",
        transcript.cumulative.0, transcript.cumulative.1
    );
    Ok(out)
}

/// Walks the alternating gift game move by move: Player 1 moves first, "F"
/// hands the other player one unit, and Tit-for-Tat copies the single
/// preceding move (or opens with "F"). One row per move with the payoff
/// deltas, then a cumulative row.
pub fn render_alternating(
    s1: &StrategyRule,
    s2: &StrategyRule,
    moves: usize,
) -> Result<String, RepeatedError> {
    if moves == 0 {
        return Err(RepeatedError::ZeroRounds);
    }
    let mut out = String::from("move\tplayer\taction\tu1\tu2\n");
    let mut totals = (Utility::zero(), Utility::zero());
    let mut previous: Option<String> = None;
    for move_number in 1..=moves {
        let mover_is_p1 = move_number % 2 == 1;
        let (rule, role) = if mover_is_p1 {
            (s1, PlayerId::new(1))
        } else {
            (s2, PlayerId::new(2))
        };
        let action = alternating_action(rule, role, previous.as_deref())?;
        let delta = if action == "F" {
            Utility::one()
        } else {
            Utility::zero()
        };
        let (d1, d2) = if mover_is_p1 {
            (Utility::zero(), delta)
        } else {
            (delta, Utility::zero())
        };
        totals.0 += d1;
        totals.1 += d2;
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            move_number,
            role.index(),
            action,
            d1,
            d2
        );
        previous = Some(action);
    }
    let _ = writeln!(out, "total\t\t\t{}\t{}", totals.0, totals.1);
    Ok(out)
}

/// In the alternating game a rule sees only the single preceding move, so the
/// stage-game rules are adapted: the opponent's "last action" is that move.
fn alternating_action(
    rule: &StrategyRule,
    role: PlayerId,
    previous: Option<&str>,
) -> Result<String, RepeatedError> {
    let history: Vec<crate::repeated::JointAction> = match previous {
        None => Vec::new(),
        Some(action) => vec![crate::repeated::JointAction {
            p1: action.to_owned(),
            p2: action.to_owned(),
        }],
    };
    let action = rule.act(role, &history);
    if action != "F" && action != "U" {
        return Err(RepeatedError::UnknownAction {
            player: role,
            strategy: rule.name().to_owned(),
            label: action,
        });
    }
    Ok(action)
}

/// Pads tab-separated cells into aligned columns for terminal display.
pub fn align_columns(tsv: &str) -> String {
    let rows: Vec<Vec<&str>> = tsv.lines().map(|line| line.split('\t').collect()).collect();
    let mut widths: Vec<usize> = Vec::new();
    for row in &rows {
        for (i, cell) in row.iter().enumerate() {
            let len = cell.chars().count();
            if i >= widths.len() {
                widths.push(len);
            } else if widths[i] < len {
                widths[i] = len;
            }
        }
    }
    let mut out = String::new();
    for row in &rows {
        let mut line = String::new();
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            if i + 1 == row.len() {
                line.push_str(cell);
            } else {
                let _ = write!(line, "{:width$}", cell, width = widths[i]);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gdl;

    #[test]
    fn policy_specs_parse() {
        assert_eq!(parse_policy("first", 2), Ok(TieBreakPolicy::FirstListed));
        assert_eq!(
            parse_policy("friendly:2", 2),
            Ok(TieBreakPolicy::FriendlyTo(PlayerId::new(2)))
        );
        assert_eq!(
            parse_policy("unfriendly:1", 2),
            Ok(TieBreakPolicy::UnfriendlyTo(PlayerId::new(1)))
        );
        let policy = parse_policy("profile:2=U,1=F", 2).unwrap();
        match policy {
            TieBreakPolicy::ByProfile(profile) => {
                assert_eq!(profile.of(PlayerId::new(1)), Disposition::Friendly);
                assert_eq!(profile.of(PlayerId::new(2)), Disposition::Unfriendly);
            }
            _ => panic!("expected a profile policy"),
        }
    }

    #[test]
    fn bad_policy_specs_are_rejected() {
        assert!(parse_policy("nice", 2).is_err());
        assert!(parse_policy("friendly:3", 2).is_err());
        assert!(parse_policy("friendly:0", 2).is_err());
        assert!(parse_policy("profile:1=F", 2).is_err());
        assert!(parse_policy("profile:1=F,1=U", 2).is_err());
        assert!(parse_policy("profile:1=F,2=X", 2).is_err());
        assert!(parse_policy("profile:1=F,2=U,3=F", 2).is_err());
    }

    #[test]
    fn scenarios_table_for_indifference() {
        let table = render_scenarios(&gdl::indifference_game()).unwrap();
        assert_eq!(
            table,
            "profile\tvalue\tpath\n\
             1=F,2=F\t1 1\tR L\n\
             1=F,2=U\t0 1\tR R\n\
             1=U,2=F\t1 0\tL L\n\
             1=U,2=U\t0 0\tL R\n"
        );
    }

    #[test]
    fn friendliness_table_for_indifference() {
        let table = render_friendliness(&gdl::indifference_game()).unwrap();
        assert_eq!(
            table,
            "node\taction\tplayer\tclass\tscore\n\
             /\tL\t2\tunfriendly\t0\n\
             /\tR\t2\tfriendly\t1\n\
             /0\tL\t1\tfriendly\t1\n\
             /0\tR\t1\tunfriendly\t0\n\
             /1\tL\t1\tfriendly\t1\n\
             /1\tR\t1\tunfriendly\t0\n"
        );
    }

    #[test]
    fn simulation_table_matches_hand_play() {
        let stage = crate::repeated::simultaneous_indifference();
        let table = render_simulation(
            &stage,
            &crate::repeated::tit_for_tat(),
            &crate::repeated::all_u(),
            3,
        )
        .unwrap();
        assert_eq!(
            table,
            "round\tp1\tp2\tu1\tu2\n\
             1\tF\tU\t0\t1\n\
             2\tU\tU\t0\t0\n\
             3\tU\tU\t0\t0\n\
             total\t\t\t0\t1\n"
        );
    }

    #[test]
    fn alternating_walk_matches_game_leaf() {
        let table = render_alternating(
            &crate::repeated::tit_for_tat(),
            &crate::repeated::tit_for_tat(),
            4,
        )
        .unwrap();
        assert!(table.ends_with("total\t\t\t2\t2\n"));

        // The walk's totals equal the leaf reached in the alternating game
        // by those moves.
        let game = crate::repeated::alternating_game(4);
        let all_f_path = NodeAddress::from_path(&[0, 0, 0, 0]);
        match resolve(&game, &all_f_path).unwrap() {
            GameTree::Leaf { outcome } => {
                assert_eq!(render_utilities(&outcome.utilities), "2 2");
            }
            GameTree::Decision { .. } => panic!("expected a leaf"),
        }
    }

    #[test]
    fn alignment_keeps_cell_text() {
        let aligned = align_columns("a\tbb\tc\nlong\tb\tccc\n");
        assert_eq!(aligned, "a     bb  c\nlong  b   ccc\n");
    }
}
