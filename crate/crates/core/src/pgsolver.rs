//! Reader and writer for the line-oriented PGSolver game format.
//!
//! ```text
//! parity <max-vertex-id>;
//! <id> <priority> <owner> <succ>(,<succ>)* ("name")? ;
//! ```
//!
//! Owner `0` is Eve and `1` is Adam. Parsing accepts arbitrary horizontal
//! whitespace between tokens and blank lines; writing emits the canonical
//! single-space form with vertices in ascending order.

use std::fmt;

use thiserror::Error;

use crate::game::{GameError, ParityGame, Player, Priority, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based line number the diagnostic is anchored to.
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    MissingHeader,
    DuplicateVertex(Vertex),
    VertexOutOfRange { vertex: Vertex, max_id: Vertex },
    UndeclaredSuccessor { vertex: Vertex, successor: Vertex },
    MissingVertex(Vertex),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ParseErrorKind::MissingHeader => write!(f, "expected header `parity <max-vertex-id>;`"),
            ParseErrorKind::DuplicateVertex(v) => write!(f, "duplicate vertex id {v}"),
            ParseErrorKind::VertexOutOfRange { vertex, max_id } => {
                write!(f, "vertex id {vertex} exceeds declared maximum {max_id}")
            }
            ParseErrorKind::UndeclaredSuccessor { vertex, successor } => {
                write!(f, "vertex {vertex} has undeclared successor {successor}")
            }
            ParseErrorKind::MissingVertex(v) => write!(f, "vertex {v} is never declared"),
        }
    }
}

struct Cursor<'a> {
    rest: &'a str,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Cursor { rest: text, line }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            kind: ParseErrorKind::Syntax(msg.into()),
        }
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn peek(&self) -> Option<char> {
        self.rest.chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if let Some(stripped) = self.rest.strip_prefix(c) {
            self.rest = stripped;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`, found {}", self.found())))
        }
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(c) => format!("`{c}`"),
            None => "end of line".to_string(),
        }
    }

    fn keyword(&mut self, word: &str) -> bool {
        self.skip_ws();
        match self.rest.strip_prefix(word) {
            Some(stripped) if !stripped.starts_with(|c: char| c.is_alphanumeric()) => {
                self.rest = stripped;
                true
            }
            _ => false,
        }
    }

    fn uint(&mut self, what: &str) -> Result<usize, ParseError> {
        self.skip_ws();
        let end = self
            .rest
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.rest.len());
        if end == 0 {
            return Err(self.error(format!("expected {what}, found {}", self.found())));
        }
        let (digits, rest) = self.rest.split_at(end);
        let value = digits
            .parse()
            .map_err(|_| self.error(format!("{what} `{digits}` is too large")))?;
        self.rest = rest;
        Ok(value)
    }

    fn quoted(&mut self) -> Result<String, ParseError> {
        // Opening quote already consumed.
        let mut out = String::new();
        let mut chars = self.rest.char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.rest = &self.rest[i + 1..];
                    return Ok(out);
                }
                '\\' => match chars.next() {
                    Some((_, e)) => out.push(e),
                    None => break,
                },
                c => out.push(c),
            }
        }
        Err(self.error("unterminated vertex name"))
    }

    fn end(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        if self.rest.is_empty() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected trailing input {}", self.found())))
        }
    }
}

struct VertexLine {
    line: usize,
    priority: Priority,
    owner: Player,
    successors: Vec<Vertex>,
    name: Option<String>,
}

/// Parses a game. The bound `d` is the largest priority rounded up to even.
pub fn parse_pgsolver(text: &str) -> Result<ParityGame, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());

    let (header_line, header) = lines.next().ok_or(ParseError {
        line: 1,
        kind: ParseErrorKind::MissingHeader,
    })?;
    let mut cur = Cursor::new(header, header_line);
    if !cur.keyword("parity") {
        return Err(ParseError {
            line: header_line,
            kind: ParseErrorKind::MissingHeader,
        });
    }
    let max_id = cur.uint("maximum vertex id")?;
    cur.expect(';')?;
    cur.end()?;

    let mut slots: Vec<Option<VertexLine>> = Vec::new();
    let mut last_line = header_line;
    for (line, text) in lines {
        last_line = line;
        let mut cur = Cursor::new(text, line);
        let id = cur.uint("vertex id")?;
        let priority = cur.uint("priority")?;
        let owner_tag = cur.uint("owner")?;
        let owner = Player::from_index(owner_tag)
            .ok_or_else(|| cur.error(format!("owner must be 0 or 1, found {owner_tag}")))?;
        let mut successors = vec![cur.uint("successor")?];
        while cur.eat(',') {
            successors.push(cur.uint("successor")?);
        }
        let name = if cur.eat('"') { Some(cur.quoted()?) } else { None };
        cur.expect(';')?;
        cur.end()?;

        if id > max_id {
            return Err(ParseError {
                line,
                kind: ParseErrorKind::VertexOutOfRange { vertex: id, max_id },
            });
        }
        if slots.len() <= id {
            slots.resize_with(id + 1, || None);
        }
        if slots[id].is_some() {
            return Err(ParseError {
                line,
                kind: ParseErrorKind::DuplicateVertex(id),
            });
        }
        slots[id] = Some(VertexLine {
            line,
            priority,
            owner,
            successors,
            name,
        });
    }

    let n = max_id + 1;
    slots.resize_with(n, || None);
    if let Some(missing) = slots.iter().position(Option::is_none) {
        return Err(ParseError {
            line: last_line,
            kind: ParseErrorKind::MissingVertex(missing),
        });
    }
    let vertices: Vec<VertexLine> = slots.into_iter().map(Option::unwrap).collect();
    for (v, vl) in vertices.iter().enumerate() {
        if let Some(&w) = vl.successors.iter().find(|&&w| w >= n) {
            return Err(ParseError {
                line: vl.line,
                kind: ParseErrorKind::UndeclaredSuccessor { vertex: v, successor: w },
            });
        }
    }

    let priority: Vec<Priority> = vertices.iter().map(|v| v.priority).collect();
    let d = ParityGame::tight_bound(&priority);
    let owner = vertices.iter().map(|v| v.owner).collect();
    let names = vertices.iter().map(|v| v.name.clone()).collect();
    let successors = vertices.into_iter().map(|v| v.successors).collect();
    // Every structural invariant has been checked above.
    Ok(ParityGame::new_unchecked(d, owner, priority, successors).with_names(names))
}

/// Canonical text of a valid game, without a trailing newline.
pub fn write_pgsolver(game: &ParityGame) -> Result<String, GameError> {
    let violations = game.validate();
    if !violations.is_empty() {
        return Err(GameError::Invalid(violations));
    }
    let mut lines = Vec::with_capacity(game.num_vertices() + 1);
    lines.push(format!("parity {};", game.num_vertices() - 1));
    for v in game.vertices() {
        let succ = game
            .successors(v)
            .iter()
            .map(|w| w.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let mut line = format!(
            "{} {} {} {}",
            v,
            game.priority(v),
            game.owner(v).to_index(),
            succ
        );
        if let Some(name) = game.name(v) {
            line.push_str(" \"");
            for c in name.chars() {
                if c == '"' || c == '\\' {
                    line.push('\\');
                }
                line.push(c);
            }
            line.push('"');
        }
        line.push(';');
        lines.push(line);
    }
    Ok(lines.join("\n"))
}
