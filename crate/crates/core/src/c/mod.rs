//! The code semigroup C: bidirectional basic, test and jump instructions.

mod c0;
mod cp;

pub use c0::{c0_to_c, c_to_c0, C0InSeq, C0Instr};
pub use cp::{c_to_cp, cp_to_c, CpInSeq, CpInstr};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::machine::{self, Machine, PositionGraph, Transition};
use crate::text::{self, Loc, ParseError};
use crate::thread::{Action, ThreadSpec};

/// Direction of an instruction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    Fwd,
    Bwd,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Fwd => Dir::Bwd,
            Dir::Bwd => Dir::Fwd,
        }
    }

    /// `+1` or `-1`.
    pub fn sign(self) -> i64 {
        match self {
            Dir::Fwd => 1,
            Dir::Bwd => -1,
        }
    }

    pub fn slash(self) -> char {
        match self {
            Dir::Fwd => '/',
            Dir::Bwd => '\\',
        }
    }

    pub(crate) fn from_slash(c: char) -> Option<Dir> {
        match c {
            '/' => Some(Dir::Fwd),
            '\\' => Some(Dir::Bwd),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CError {
    #[error("an instruction sequence must be non-empty")]
    Empty,
    #[error("jump counter must be at least 1")]
    ZeroJump,
    #[error("position {pos} is outside 1..={len}")]
    BadPosition { pos: i64, len: usize },
    #[error("abort is not an instruction of the jump-zero variant")]
    AbortInC0,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CInstr {
    Basic(Dir, Action),
    Pos(Dir, Action),
    Neg(Dir, Action),
    Jump(Dir, usize),
    Abort,
    Halt,
}

impl CInstr {
    pub fn dir(&self) -> Option<Dir> {
        match self {
            CInstr::Basic(d, _) | CInstr::Pos(d, _) | CInstr::Neg(d, _) | CInstr::Jump(d, _) => Some(*d),
            CInstr::Abort | CInstr::Halt => None,
        }
    }

    /// The same instruction with its direction reversed.
    pub fn dual(&self) -> CInstr {
        match self {
            CInstr::Basic(d, a) => CInstr::Basic(d.flip(), a.clone()),
            CInstr::Pos(d, a) => CInstr::Pos(d.flip(), a.clone()),
            CInstr::Neg(d, a) => CInstr::Neg(d.flip(), a.clone()),
            CInstr::Jump(d, k) => CInstr::Jump(d.flip(), *k),
            other => other.clone(),
        }
    }

    /// Step taken by this instruction when it sits at position `i`.
    pub fn step_at(&self, i: i64) -> Transition {
        match self {
            CInstr::Basic(d, a) => {
                let n = i + d.sign();
                Transition::Emit { action: a.clone(), yes: n, no: n }
            }
            CInstr::Pos(d, a) => Transition::Emit { action: a.clone(), yes: i + d.sign(), no: i + 2 * d.sign() },
            CInstr::Neg(d, a) => Transition::Emit { action: a.clone(), yes: i + 2 * d.sign(), no: i + d.sign() },
            CInstr::Jump(d, k) => Transition::Transfer(i + d.sign() * *k as i64),
            CInstr::Abort => Transition::Dead,
            CInstr::Halt => Transition::Halt,
        }
    }

    pub fn jump(dir: Dir, k: usize) -> CInstr {
        CInstr::Jump(dir, k)
    }
}

impl fmt::Display for CInstr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CInstr::Basic(d, a) => write!(f, "{}{a}", d.slash()),
            CInstr::Pos(d, a) => write!(f, "+{}{a}", d.slash()),
            CInstr::Neg(d, a) => write!(f, "-{}{a}", d.slash()),
            CInstr::Jump(d, k) => write!(f, "{}#{k}", d.slash()),
            CInstr::Abort => f.write_str("#"),
            CInstr::Halt => f.write_str("!"),
        }
    }
}

/// Parses the tokens common to C and Cg: basics, tests, jumps, `#` and `!`.
/// Returns `None` if the token is not of that shape.
pub(crate) fn parse_common(tok: &str, loc: Loc) -> Result<Option<CInstr>, ParseError> {
    let action = |s: &str| Action::new(s).map_err(|e| loc.error(e.to_string()));
    match tok {
        "#" => return Ok(Some(CInstr::Abort)),
        "!" => return Ok(Some(CInstr::Halt)),
        _ => {}
    }
    let mut chars = tok.chars();
    let first = chars.next().unwrap_or(' ');
    let rest = chars.as_str();
    if first == '+' || first == '-' {
        let mut chars = rest.chars();
        let Some(dir) = chars.next().and_then(Dir::from_slash) else {
            return Ok(None);
        };
        let a = action(chars.as_str())?;
        return Ok(Some(if first == '+' { CInstr::Pos(dir, a) } else { CInstr::Neg(dir, a) }));
    }
    let Some(dir) = Dir::from_slash(first) else {
        return Ok(None);
    };
    if let Some(num) = rest.strip_prefix('#') {
        let k = text::natural(num).ok_or_else(|| loc.error(format!("bad jump counter in `{tok}`")))?;
        return Ok(Some(CInstr::Jump(dir, k)));
    }
    if rest.starts_with(|c: char| c.is_ascii_lowercase()) {
        return Ok(Some(CInstr::Basic(dir, action(rest)?)));
    }
    Ok(None)
}

impl FromStr for CInstr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let loc = Loc { line: 1, column: 1 };
        match parse_common(s.trim(), loc)? {
            Some(CInstr::Jump(_, 0)) => Err(loc.error("jump counter must be at least 1")),
            Some(u) => Ok(u),
            None => Err(loc.error(format!("unknown C instruction `{s}`"))),
        }
    }
}

/// A non-empty C instruction sequence with jump counters ≥ 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CInSeq(Vec<CInstr>);

impl CInSeq {
    pub fn new(instrs: Vec<CInstr>) -> Result<Self, CError> {
        if instrs.is_empty() {
            return Err(CError::Empty);
        }
        if instrs.iter().any(|u| matches!(u, CInstr::Jump(_, 0))) {
            return Err(CError::ZeroJump);
        }
        Ok(CInSeq(instrs))
    }

    pub fn instrs(&self) -> &[CInstr] {
        &self.0
    }

    pub fn into_instrs(self) -> Vec<CInstr> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Instruction at 1-based position `i`.
    pub fn inst(&self, i: i64) -> Option<&CInstr> {
        usize::try_from(i).ok().and_then(|i| i.checked_sub(1)).and_then(|i| self.0.get(i))
    }

    pub fn concat(&self, other: &CInSeq) -> CInSeq {
        CInSeq(self.0.iter().chain(&other.0).cloned().collect())
    }

    /// `|i, X|`.
    pub fn behavior_at(&self, i: i64) -> ThreadSpec {
        machine::behavior_at(self, i)
    }

    pub fn left(&self) -> ThreadSpec {
        self.behavior_at(1)
    }

    pub fn right(&self) -> ThreadSpec {
        self.behavior_at(self.len() as i64)
    }

    pub fn accessibility(&self) -> PositionGraph {
        PositionGraph::of(self)
    }

    pub fn reachable(&self, i: i64) -> BTreeSet<i64> {
        machine::reachable(self, i)
    }

    pub fn exits(&self) -> BTreeSet<i64> {
        machine::exits(self)
    }

    /// Drops every position not reachable from `i`, shortening jumps that
    /// cross a removed position. Returns the new sequence and start position.
    pub fn remove_unreachable(&self, i: i64) -> Result<(CInSeq, i64), CError> {
        if !self.in_range(i) {
            return Err(CError::BadPosition { pos: i, len: self.len() });
        }
        let keep = self.reachable(i);
        let mut instrs: Vec<(i64, CInstr)> = self.0.iter().cloned().enumerate().map(|(p, u)| (p as i64 + 1, u)).collect();
        let mut start = i;
        for j in (1..=self.len() as i64).rev().filter(|j| !keep.contains(j)) {
            instrs.retain(|(p, _)| *p != j);
            for (p, u) in instrs.iter_mut() {
                if let CInstr::Jump(d, k) = u {
                    let target = *p + d.sign() * *k as i64;
                    if (*p < j && j < target) || (target < j && j < *p) {
                        *k -= 1;
                    }
                }
                if *p > j {
                    *p -= 1;
                }
            }
            if start > j {
                start -= 1;
            }
        }
        let seq = CInSeq(instrs.into_iter().map(|(_, u)| u).collect());
        Ok((seq, start))
    }

    /// Reverses the sequence and dualizes each instruction.
    pub fn rev(&self) -> CInSeq {
        CInSeq(self.0.iter().rev().map(CInstr::dual).collect())
    }

    /// Largest jump counter, 0 when there are no jumps.
    pub fn max_jump(&self) -> usize {
        self.0
            .iter()
            .filter_map(|u| match u {
                CInstr::Jump(_, k) => Some(*k),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Applies a per-instruction expansion.
    pub fn expand(&self, f: impl Fn(&CInstr) -> Vec<CInstr>) -> CInSeq {
        CInSeq(self.0.iter().flat_map(f).collect())
    }
}

impl Machine for CInSeq {
    fn len(&self) -> usize {
        self.0.len()
    }

    fn step(&self, pos: i64) -> Transition {
        self.0[pos as usize - 1].step_at(pos)
    }
}

impl fmt::Display for CInSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        text::join(&self.0, f)
    }
}

impl FromStr for CInSeq {
    type Err = ParseError;
    fn from_str(src: &str) -> Result<Self, Self::Err> {
        let instrs = text::tokens(src)?
            .into_iter()
            .map(|(tok, loc)| match parse_common(tok, loc)? {
                Some(CInstr::Jump(_, 0)) => Err(loc.error("jump counter must be at least 1")),
                Some(u) => Ok(u),
                None => Err(loc.error(format!("unknown C instruction `{tok}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CInSeq(instrs))
    }
}
