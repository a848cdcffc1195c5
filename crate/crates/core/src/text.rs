//! Shared helpers for the textual grammars.

use std::fmt;

use thiserror::Error;

/// A parse failure at a 1-based line and column.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { line, column, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

/// A line/column location inside a source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Loc {
    pub line: usize,
    pub column: usize,
}

impl Loc {
    pub fn of_offset(src: &str, offset: usize) -> Loc {
        let before = &src[..offset.min(src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Loc { line, column }
    }

    /// Location of `part`, which must be a subslice of `src`.
    pub fn of_slice(src: &str, part: &str) -> Loc {
        let offset = (part.as_ptr() as usize).saturating_sub(src.as_ptr() as usize);
        Loc::of_offset(src, offset)
    }

    pub fn error(self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.column, message)
    }
}

/// A separator-delimited piece of a source text.
#[derive(Clone, Copy, Debug)]
pub struct Item<'a> {
    pub text: &'a str,
}

impl<'a> Item<'a> {
    pub fn locate(&self, src: &str, part: &str) -> Loc {
        Loc::of_slice(src, part)
    }
}

pub fn split_items<'a>(src: &'a str, seps: &[char]) -> Vec<Item<'a>> {
    src.split(|c| seps.contains(&c)).map(|text| Item { text }).collect()
}

/// Splits an instruction sequence on `;`, rejecting empty tokens. Each token is
/// returned trimmed, with its location.
pub fn tokens(src: &str) -> Result<Vec<(&str, Loc)>, ParseError> {
    if src.trim().is_empty() {
        return Err(Loc::of_offset(src, 0).error("empty instruction sequence"));
    }
    src.split(';')
        .map(|raw| {
            let tok = raw.trim();
            let loc = if tok.is_empty() { Loc::of_slice(src, raw) } else { Loc::of_slice(src, tok) };
            if tok.is_empty() {
                Err(loc.error("empty instruction"))
            } else {
                Ok((tok, loc))
            }
        })
        .collect()
}

/// Parses a decimal natural number.
pub fn natural(s: &str) -> Option<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

pub fn join<T: fmt::Display>(items: &[T], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(";")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}
