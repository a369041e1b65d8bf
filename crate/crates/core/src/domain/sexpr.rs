//! Tokenizer and s-expression reader. Iterative, so arbitrarily nested input
//! cannot overflow the stack; nesting beyond [`MAX_DEPTH`] is reported.

use super::{DiagCode, Diagnostic, Severity};

pub const MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Atom(..) => None,
        }
    }

    /// Case-insensitive keyword match on an atom.
    pub fn is_keyword(&self, kw: &str) -> bool {
        self.as_atom().is_some_and(|a| a.eq_ignore_ascii_case(kw))
    }
}

pub fn error(code: DiagCode, pos: Pos, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        severity: Severity::Error,
        code,
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

/// Position just past the last character of `src`.
pub fn end_pos(src: &str) -> Pos {
    let mut pos = Pos { line: 1, column: 1 };
    for ch in src.chars() {
        if ch == '\n' {
            pos.line += 1;
            pos.column = 1;
        } else {
            pos.column += 1;
        }
    }
    pos
}

fn is_delim(ch: char) -> bool {
    ch.is_whitespace() || ch == '(' || ch == ')' || ch == ';'
}

/// Reads every top-level form in `src`.
pub fn read(src: &str) -> Result<Vec<Sexp>, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut top: Vec<Sexp> = Vec::new();
    // open lists: (items, position of the opening paren)
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut chars = src.chars().peekable();
    let mut pos = Pos { line: 1, column: 1 };
    // depth beyond MAX_DEPTH: count the extra opens so closes stay balanced
    let mut overflow = 0usize;

    let advance = |ch: char, pos: &mut Pos| {
        if ch == '\n' {
            pos.line += 1;
            pos.column = 1;
        } else {
            pos.column += 1;
        }
    };

    while let Some(&ch) = chars.peek() {
        let start = pos;
        if ch.is_whitespace() {
            chars.next();
            advance(ch, &mut pos);
        } else if ch == ';' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                advance(c, &mut pos);
            }
        } else if ch == '(' {
            chars.next();
            advance(ch, &mut pos);
            if overflow > 0 || stack.len() >= MAX_DEPTH {
                if overflow == 0 {
                    diags.push(error(
                        DiagCode::NestingTooDeep,
                        start,
                        format!("lists nested deeper than {MAX_DEPTH} levels"),
                    ));
                }
                overflow += 1;
            } else {
                stack.push((Vec::new(), start));
            }
        } else if ch == ')' {
            chars.next();
            advance(ch, &mut pos);
            if overflow > 0 {
                overflow -= 1;
            } else if let Some((items, open)) = stack.pop() {
                let list = Sexp::List(items, open);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(list),
                    None => top.push(list),
                }
            } else {
                diags.push(error(
                    DiagCode::UnbalancedParens,
                    start,
                    "unexpected `)` with no matching `(`",
                ));
            }
        } else {
            let mut text = String::new();
            while let Some(&c) = chars.peek() {
                if is_delim(c) {
                    break;
                }
                text.push(c);
                chars.next();
                advance(c, &mut pos);
            }
            let atom = Sexp::Atom(text, start);
            if overflow > 0 {
                continue;
            }
            match stack.last_mut() {
                Some((parent, _)) => parent.push(atom),
                None => top.push(atom),
            }
        }
    }

    for (_, open) in stack.iter().rev() {
        diags.push(error(DiagCode::UnbalancedParens, *open, "`(` is never closed"));
    }
    if diags.is_empty() {
        Ok(top)
    } else {
        Err(diags)
    }
}
