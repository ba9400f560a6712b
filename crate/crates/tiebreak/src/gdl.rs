//! The textual game-description language: parser, canonical serializer, and
//! builders for the bundled example games.
//!
//! Files use the `.gdl` extension. `;` starts a comment that runs to the end
//! of the line. The grammar, with tokens separated by whitespace:
//!
//! ```text
//! game    := "(" "game" "players" INT tree ")"
//! tree    := node | leaf
//! node    := "(" "node" "p" INT branch branch* ")"
//! branch  := "(" STRING tree ")"
//! leaf    := "(" "leaf" [STRING] "(" RAT+ ")" ")"
//! RAT     := ["-"] INT [ "/" INT ]        ; denominator > 0
//! STRING  := double-quoted; escapes \" and \\ only
//! ```
//!
//! The parser rejects any text that would produce an ill-formed game
//! (player index out of range, wrong payoff count, duplicate action labels),
//! so every parsed game passes [`crate::game::validate`]. Trees nested
//! deeper than 200 levels are rejected rather than risking the stack. The
//! serializer emits a canonical form: one node per line, two-space
//! indentation per depth, rationals in lowest terms.

use std::fmt;

use thiserror::Error;

use crate::game::{Game, GameTree, Outcome, PlayerId, Utility};

/// Parse failure, pointing at a 1-based line and column of the source.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Option<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if let Some(expected) = &self.expected {
            write!(f, " (expected {expected})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

impl Pos {
    fn error(self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            message: message.into(),
            expected: None,
        }
    }

    fn expecting(self, message: impl Into<String>, expected: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            message: message.into(),
            expected: Some(expected.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    LParen(Pos),
    RParen(Pos),
    Atom(String, Pos),
    Str(String, Pos),
}

impl Token {
    fn pos(&self) -> Pos {
        match self {
            Token::LParen(p) | Token::RParen(p) => *p,
            Token::Atom(_, p) | Token::Str(_, p) => *p,
        }
    }

    fn describe(&self) -> String {
        match self {
            Token::LParen(_) => "\"(\"".to_owned(),
            Token::RParen(_) => "\")\"".to_owned(),
            Token::Atom(a, _) => format!("{a:?}"),
            Token::Str(s, _) => format!("string {s:?}"),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.chars().peekable(),
            pos: Pos { line: 1, column: 1 },
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    fn tokenize(mut self) -> Result<Vec<Token>, ParseError> {
        let mut tokens = Vec::new();
        loop {
            // Skip whitespace and comments.
            match self.chars.peek() {
                None => break,
                Some(c) if c.is_whitespace() => {
                    self.bump();
                    continue;
                }
                Some(';') => {
                    while let Some(&c) = self.chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                    continue;
                }
                Some(_) => {}
            }
            let start = self.pos;
            let c = self.bump().expect("peeked");
            match c {
                '(' => tokens.push(Token::LParen(start)),
                ')' => tokens.push(Token::RParen(start)),
                '"' => {
                    let mut text = String::new();
                    loop {
                        let at = self.pos;
                        match self.bump() {
                            None => return Err(start.error("unterminated string")),
                            Some('"') => break,
                            Some('\\') => match self.bump() {
                                Some('"') => text.push('"'),
                                Some('\\') => text.push('\\'),
                                _ => {
                                    return Err(
                                        at.expecting("invalid escape in string", "\\\" or \\\\")
                                    )
                                }
                            },
                            Some(other) => text.push(other),
                        }
                    }
                    tokens.push(Token::Str(text, start));
                }
                _ => {
                    let mut atom = String::new();
                    atom.push(c);
                    while let Some(&next) = self.chars.peek() {
                        if next.is_whitespace() || matches!(next, '(' | ')' | '"' | ';') {
                            break;
                        }
                        atom.push(next);
                        self.bump();
                    }
                    tokens.push(Token::Atom(atom, start));
                }
            }
        }
        Ok(tokens)
    }
}

/// Position just past the last character of the last line, where errors about
/// missing input point.
fn eof_pos(src: &str) -> Pos {
    let line = src.lines().count().max(1);
    let column = src.lines().last().map(|l| l.chars().count()).unwrap_or(0) + 1;
    Pos { line, column }
}

/// Trees deeper than this are rejected; the parser is recursive and must not
/// exhaust the stack on hostile input.
const MAX_DEPTH: usize = 200;

struct Parser {
    tokens: Vec<Token>,
    cursor: usize,
    eof: Pos,
    num_players: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.cursor)
    }

    fn next(&mut self, expected: &str) -> Result<Token, ParseError> {
        match self.tokens.get(self.cursor) {
            Some(token) => {
                self.cursor += 1;
                Ok(token.clone())
            }
            None => Err(self.eof.expecting("unexpected end of input", expected)),
        }
    }

    fn expect_lparen(&mut self, ctx: &str) -> Result<Pos, ParseError> {
        match self.next(ctx)? {
            Token::LParen(pos) => Ok(pos),
            other => Err(other
                .pos()
                .expecting(format!("found {}", other.describe()), ctx)),
        }
    }

    fn expect_rparen(&mut self, ctx: &str) -> Result<(), ParseError> {
        match self.next(ctx)? {
            Token::RParen(_) => Ok(()),
            other => Err(other
                .pos()
                .expecting(format!("found {}", other.describe()), ctx)),
        }
    }

    fn expect_keyword(&mut self, word: &str) -> Result<Pos, ParseError> {
        match self.next(&format!("\"{word}\""))? {
            Token::Atom(atom, pos) if atom == word => Ok(pos),
            other => Err(other
                .pos()
                .expecting(format!("found {}", other.describe()), format!("\"{word}\""))),
        }
    }

    fn expect_int(&mut self, ctx: &str) -> Result<(usize, Pos), ParseError> {
        match self.next(ctx)? {
            Token::Atom(atom, pos) => {
                if atom.chars().all(|c| c.is_ascii_digit()) && !atom.is_empty() {
                    atom.parse::<usize>()
                        .map(|n| (n, pos))
                        .map_err(|_| pos.error(format!("integer {atom} is out of range")))
                } else {
                    Err(pos.expecting(format!("found {atom:?}"), ctx))
                }
            }
            other => Err(other
                .pos()
                .expecting(format!("found {}", other.describe()), ctx)),
        }
    }

    fn game(&mut self) -> Result<Game, ParseError> {
        self.expect_lparen("\"(\" opening the game")?;
        self.expect_keyword("game")?;
        self.expect_keyword("players")?;
        let (num_players, pos) = self.expect_int("player count")?;
        if num_players == 0 {
            return Err(pos.error("a game needs at least one player"));
        }
        self.num_players = num_players;
        let root = self.tree()?;
        debug_assert_eq!(self.depth, 0);
        self.expect_rparen("\")\" closing the game")?;
        if let Some(extra) = self.peek() {
            return Err(extra
                .pos()
                .expecting(format!("found {}", extra.describe()), "end of input"));
        }
        Ok(Game::new(num_players, root))
    }

    fn tree(&mut self) -> Result<GameTree, ParseError> {
        let open = self.expect_lparen("\"(\" opening a node or leaf")?;
        if self.depth >= MAX_DEPTH {
            return Err(open.error(format!("tree is nested deeper than {MAX_DEPTH} levels")));
        }
        self.depth += 1;
        let tree = match self.next("\"node\" or \"leaf\"")? {
            Token::Atom(atom, _) if atom == "node" => self.node_body(),
            Token::Atom(atom, pos) if atom == "leaf" => self.leaf_body(pos),
            other => Err(other.pos().expecting(
                format!("found {}", other.describe()),
                "\"node\" or \"leaf\"",
            )),
        };
        self.depth -= 1;
        tree
    }

    fn node_body(&mut self) -> Result<GameTree, ParseError> {
        self.expect_keyword("p")?;
        let (mover, mover_pos) = self.expect_int("player index")?;
        if mover == 0 || mover > self.num_players {
            return Err(mover_pos.error(format!(
                "player index {mover} is outside 1..={}",
                self.num_players
            )));
        }
        let mut branches: Vec<(String, GameTree)> = Vec::new();
        loop {
            match self.peek() {
                Some(Token::LParen(_)) => {
                    let (label, label_pos, subtree) = self.branch()?;
                    if branches.iter().any(|(seen, _)| *seen == label) {
                        return Err(label_pos.error(format!("duplicate action label {label:?}")));
                    }
                    branches.push((label, subtree));
                }
                Some(Token::RParen(_)) => {
                    self.cursor += 1;
                    break;
                }
                Some(other) => {
                    return Err(other
                        .pos()
                        .expecting(format!("found {}", other.describe()), "a branch or \")\""))
                }
                None => return Err(self.eof.expecting("unexpected end of input", "a branch")),
            }
        }
        if branches.is_empty() {
            return Err(mover_pos.error("a decision node needs at least one branch"));
        }
        Ok(GameTree::Decision {
            mover: PlayerId::new(mover),
            branches,
        })
    }

    fn branch(&mut self) -> Result<(String, Pos, GameTree), ParseError> {
        self.expect_lparen("\"(\" opening a branch")?;
        let (label, pos) = match self.next("an action label string")? {
            Token::Str(label, pos) => (label, pos),
            other => {
                return Err(other.pos().expecting(
                    format!("found {}", other.describe()),
                    "an action label string",
                ))
            }
        };
        let subtree = self.tree()?;
        self.expect_rparen("\")\" closing the branch")?;
        Ok((label, pos, subtree))
    }

    fn leaf_body(&mut self, leaf_pos: Pos) -> Result<GameTree, ParseError> {
        let label = match self.peek() {
            Some(Token::Str(label, _)) => {
                let label = label.clone();
                self.cursor += 1;
                Some(label)
            }
            _ => None,
        };
        self.expect_lparen("\"(\" opening the payoff list")?;
        let mut utilities = Vec::new();
        loop {
            match self.next("a rational payoff or \")\"")? {
                Token::RParen(_) => break,
                Token::Atom(atom, pos) => utilities.push(parse_rational(&atom, pos)?),
                other => {
                    return Err(other.pos().expecting(
                        format!("found {}", other.describe()),
                        "a rational payoff or \")\"",
                    ))
                }
            }
        }
        if utilities.is_empty() {
            return Err(leaf_pos.error("a leaf needs at least one payoff"));
        }
        if utilities.len() != self.num_players {
            return Err(leaf_pos.error(format!(
                "expected {} payoffs, found {}",
                self.num_players,
                utilities.len()
            )));
        }
        self.expect_rparen("\")\" closing the leaf")?;
        Ok(GameTree::Leaf {
            outcome: Outcome { label, utilities },
        })
    }
}

fn parse_rational(atom: &str, pos: Pos) -> Result<Utility, ParseError> {
    let bad = || pos.expecting(format!("found {atom:?}"), "a rational like 3 or -1/2");
    let (num_text, den_text) = match atom.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (atom, None),
    };
    let unsigned = num_text.strip_prefix('-').unwrap_or(num_text);
    if unsigned.is_empty() || !unsigned.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let num: i64 = num_text
        .parse()
        .map_err(|_| pos.error(format!("integer {num_text} is out of range")))?;
    let den: i64 = match den_text {
        None => 1,
        Some(d) => {
            if d.is_empty() || !d.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let den = d
                .parse()
                .map_err(|_| pos.error(format!("integer {d} is out of range")))?;
            if den == 0 {
                return Err(pos.error("denominator must be positive"));
            }
            den
        }
    };
    Utility::new(num, den).ok_or_else(|| pos.error(format!("rational {atom} is out of range")))
}

/// Parses a game description. Any accepted text yields a game on which
/// [`crate::game::validate`] returns no violations.
pub fn parse_game(src: &str) -> Result<Game, ParseError> {
    let tokens = Lexer::new(src).tokenize()?;
    let mut parser = Parser {
        tokens,
        cursor: 0,
        eof: eof_pos(src),
        num_players: 0,
        depth: 0,
    };
    parser.game()
}

/// Serializes a game to canonical form: one node per line, two-space
/// indentation per depth, rationals as `n` or `n/d` in lowest terms, and all
/// closing parentheses gathered at the end of each subtree's last line.
/// `parse_game(serialize(g))` is structurally equal to `g`.
pub fn serialize(game: &Game) -> String {
    let mut out = format!("(game players {}\n", game.num_players);
    write_tree(&mut out, &game.root, 1);
    out.push(')');
    out.push('\n');
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn write_tree(out: &mut String, tree: &GameTree, depth: usize) {
    indent(out, depth);
    write_tree_inline(out, tree, depth);
}

/// Writes a tree starting at the current position; decision nodes continue
/// onto fresh lines for their branches.
fn write_tree_inline(out: &mut String, tree: &GameTree, depth: usize) {
    match tree {
        GameTree::Leaf { outcome } => {
            out.push_str("(leaf ");
            if let Some(label) = &outcome.label {
                write_string(out, label);
                out.push(' ');
            }
            out.push('(');
            for (i, utility) in outcome.utilities.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                out.push_str(&utility.to_string());
            }
            out.push_str("))");
        }
        GameTree::Decision { mover, branches } => {
            out.push_str(&format!("(node p {}", mover.index()));
            for (label, subtree) in branches {
                out.push('\n');
                indent(out, depth + 1);
                out.push('(');
                write_string(out, label);
                out.push(' ');
                write_tree_inline(out, subtree, depth + 1);
                out.push(')');
            }
            out.push(')');
        }
    }
}

fn write_string(out: &mut String, text: &str) {
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            _ => out.push(c),
        }
    }
    out.push('"');
}

/// The two-player Indifference game: Player 1 picks one of Player 2's two
/// decision nodes. Player 2's own payoff is the same on both sides of each of
/// his nodes, so only Player 1's payoff distinguishes them; symmetrically,
/// Player 1's payoff is the same under best play on both sides, so only
/// Player 2's payoff distinguishes Player 1's choice.
pub fn indifference_game() -> Game {
    let p1 = PlayerId::new(1);
    let p2 = PlayerId::new(2);
    Game::new(
        2,
        GameTree::decision(
            p1,
            vec![
                (
                    "L",
                    GameTree::decision(
                        p2,
                        vec![
                            ("L", GameTree::leaf(Outcome::labeled("A", &[1, 0]))),
                            ("R", GameTree::leaf(Outcome::labeled("B", &[0, 0]))),
                        ],
                    ),
                ),
                (
                    "R",
                    GameTree::decision(
                        p2,
                        vec![
                            ("L", GameTree::leaf(Outcome::labeled("C", &[1, 1]))),
                            ("R", GameTree::leaf(Outcome::labeled("D", &[0, 1]))),
                        ],
                    ),
                ),
            ],
        ),
    )
}

/// The Indifference game collapsed under Player 2 matching Player 1's
/// friendliness: a single Player 1 decision between (0,0) and (1,1).
pub fn tft_reduced_game() -> Game {
    Game::new(
        2,
        GameTree::decision(
            PlayerId::new(1),
            vec![
                ("L", GameTree::leaf(Outcome::from_ints(&[0, 0]))),
                ("R", GameTree::leaf(Outcome::from_ints(&[1, 1]))),
            ],
        ),
    )
}

/// The three-stage game: Player 2 first picks one of two copies of the
/// Indifference game. The left copy doubles Player 1's nonzero payoffs, the
/// right copy is unchanged, so friendly play collapses them to (2,1) and
/// (1,1).
pub fn three_stage_game() -> Game {
    let indifference = |labels: [&str; 4], p1_payoff: i64| {
        let p1 = PlayerId::new(1);
        let p2 = PlayerId::new(2);
        GameTree::decision(
            p1,
            vec![
                (
                    "L",
                    GameTree::decision(
                        p2,
                        vec![
                            (
                                "L",
                                GameTree::leaf(Outcome::labeled(labels[0], &[p1_payoff, 0])),
                            ),
                            ("R", GameTree::leaf(Outcome::labeled(labels[1], &[0, 0]))),
                        ],
                    ),
                ),
                (
                    "R",
                    GameTree::decision(
                        p2,
                        vec![
                            (
                                "L",
                                GameTree::leaf(Outcome::labeled(labels[2], &[p1_payoff, 1])),
                            ),
                            ("R", GameTree::leaf(Outcome::labeled(labels[3], &[0, 1]))),
                        ],
                    ),
                ),
            ],
        )
    };
    Game::new(
        2,
        GameTree::decision(
            PlayerId::new(2),
            vec![
                ("L", indifference(["A'", "B'", "C'", "D'"], 2)),
                ("R", indifference(["A", "B", "C", "D"], 1)),
            ],
        ),
    )
}
