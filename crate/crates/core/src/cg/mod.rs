//! The code semigroup Cg: label and goto instructions instead of jumps.

mod general;
mod lnf;
mod rel;

pub use general::{from_general, from_general_uniform, to_directional, GeneralTranslation, UNIFORM_FACTOR};
pub use lnf::LabelRelations;
pub use rel::{rel_k, rel_block_len};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::c::{parse_common, CInstr, Dir};
use crate::machine::{self, Machine, PositionGraph, Transition};
use crate::text::{self, Loc, ParseError};
use crate::thread::{Action, ThreadSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CgError {
    #[error("an instruction sequence must be non-empty")]
    Empty,
    #[error("relative-jump parameter k must be at least 2, got {0}")]
    BadK(usize),
    #[error("position {pos} is outside 1..={len}")]
    BadPosition { pos: i64, len: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CgInstr {
    Basic(Dir, Action),
    Pos(Dir, Action),
    Neg(Dir, Action),
    Label(Dir, usize),
    Goto(Dir, usize),
    Abort,
    Halt,
}

impl CgInstr {
    pub fn dir(&self) -> Option<Dir> {
        match self {
            CgInstr::Basic(d, _)
            | CgInstr::Pos(d, _)
            | CgInstr::Neg(d, _)
            | CgInstr::Label(d, _)
            | CgInstr::Goto(d, _) => Some(*d),
            CgInstr::Abort | CgInstr::Halt => None,
        }
    }

    pub fn is_backward(&self) -> bool {
        self.dir() == Some(Dir::Bwd)
    }

    /// Label number of a label or goto.
    pub fn number(&self) -> Option<usize> {
        match self {
            CgInstr::Label(_, l) | CgInstr::Goto(_, l) => Some(*l),
            _ => None,
        }
    }

    pub fn dual(&self) -> CgInstr {
        match self {
            CgInstr::Basic(d, a) => CgInstr::Basic(d.flip(), a.clone()),
            CgInstr::Pos(d, a) => CgInstr::Pos(d.flip(), a.clone()),
            CgInstr::Neg(d, a) => CgInstr::Neg(d.flip(), a.clone()),
            CgInstr::Label(d, l) => CgInstr::Label(d.flip(), *l),
            CgInstr::Goto(d, l) => CgInstr::Goto(d.flip(), *l),
            other => other.clone(),
        }
    }

    /// The C instruction with the same step, for instructions that are not
    /// labels or gotos.
    pub(crate) fn as_c(&self) -> Option<CInstr> {
        Some(match self {
            CgInstr::Basic(d, a) => CInstr::Basic(*d, a.clone()),
            CgInstr::Pos(d, a) => CInstr::Pos(*d, a.clone()),
            CgInstr::Neg(d, a) => CInstr::Neg(*d, a.clone()),
            CgInstr::Abort => CInstr::Abort,
            CgInstr::Halt => CInstr::Halt,
            CgInstr::Label(..) | CgInstr::Goto(..) => return None,
        })
    }

    pub(crate) fn from_c(u: &CInstr) -> Option<CgInstr> {
        Some(match u {
            CInstr::Basic(d, a) => CgInstr::Basic(*d, a.clone()),
            CInstr::Pos(d, a) => CgInstr::Pos(*d, a.clone()),
            CInstr::Neg(d, a) => CgInstr::Neg(*d, a.clone()),
            CInstr::Abort => CgInstr::Abort,
            CInstr::Halt => CgInstr::Halt,
            CInstr::Jump(..) => return None,
        })
    }

    fn renumbered(&self, f: impl Fn(usize) -> usize) -> CgInstr {
        match self {
            CgInstr::Label(d, l) => CgInstr::Label(*d, f(*l)),
            CgInstr::Goto(d, l) => CgInstr::Goto(*d, f(*l)),
            other => other.clone(),
        }
    }
}

impl fmt::Display for CgInstr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CgInstr::Label(d, l) => write!(f, "{}L{l}", d.slash()),
            CgInstr::Goto(d, l) => write!(f, "{}G{l}", d.slash()),
            other => write!(f, "{}", other.as_c().expect("not a label or goto")),
        }
    }
}

fn parse_cg_token(tok: &str, loc: Loc) -> Result<CgInstr, ParseError> {
    let mut chars = tok.chars();
    if let Some(dir) = chars.next().and_then(Dir::from_slash) {
        let rest = chars.as_str();
        for (tag, is_label) in [('L', true), ('G', false)] {
            if let Some(num) = rest.strip_prefix(tag) {
                let l = text::natural(num).ok_or_else(|| loc.error(format!("bad label number in `{tok}`")))?;
                return Ok(if is_label { CgInstr::Label(dir, l) } else { CgInstr::Goto(dir, l) });
            }
        }
    }
    match parse_common(tok, loc)? {
        Some(CInstr::Jump(..)) => Err(loc.error("jumps are not Cg instructions")),
        Some(u) => Ok(CgInstr::from_c(&u).expect("not a jump")),
        None => Err(loc.error(format!("unknown Cg instruction `{tok}`"))),
    }
}

impl FromStr for CgInstr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_cg_token(s.trim(), Loc { line: 1, column: 1 })
    }
}

/// How goto instructions find their target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GotoMode {
    /// Search in the goto's direction for a label of the same direction.
    Directional,
    /// Gotos numbered `1..=k` are relative jumps, `0` blocks, larger numbers
    /// search directionally.
    Relative(usize),
    /// Search in the goto's direction for a label of either direction.
    General,
}

/// A non-empty Cg instruction sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CgInSeq(Vec<CgInstr>);

impl CgInSeq {
    pub fn new(instrs: Vec<CgInstr>) -> Result<Self, CgError> {
        if instrs.is_empty() {
            return Err(CgError::Empty);
        }
        Ok(CgInSeq(instrs))
    }

    pub fn instrs(&self) -> &[CgInstr] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn inst(&self, i: i64) -> Option<&CgInstr> {
        usize::try_from(i).ok().and_then(|i| i.checked_sub(1)).and_then(|i| self.0.get(i))
    }

    pub fn concat(&self, other: &CgInSeq) -> CgInSeq {
        CgInSeq(self.0.iter().chain(&other.0).cloned().collect())
    }

    pub fn expand(&self, f: impl Fn(&CgInstr) -> Vec<CgInstr>) -> CgInSeq {
        CgInSeq(self.0.iter().flat_map(f).collect())
    }

    /// Least `j ≥ i` holding a member of `set`, or `len + 1`.
    pub fn fsearch(&self, i: i64, set: &[CgInstr]) -> i64 {
        let from = i.max(1);
        (from..=self.len() as i64)
            .find(|&j| set.contains(&self.0[j as usize - 1]))
            .unwrap_or(self.len() as i64 + 1)
    }

    /// Greatest `j ≤ i` holding a member of `set`, or `0`.
    pub fn bsearch(&self, i: i64, set: &[CgInstr]) -> i64 {
        let from = i.min(self.len() as i64);
        (1..=from).rev().find(|&j| set.contains(&self.0[j as usize - 1])).unwrap_or(0)
    }

    /// Where the goto at `i` transfers control under `mode`.
    fn goto_target(&self, i: i64, dir: Dir, l: usize, mode: GotoMode) -> Option<i64> {
        let set: Vec<CgInstr> = match mode {
            GotoMode::Relative(_) if l == 0 => return None,
            GotoMode::Relative(k) if l <= k => return Some(i + dir.sign() * l as i64),
            GotoMode::Directional | GotoMode::Relative(_) => vec![CgInstr::Label(dir, l)],
            GotoMode::General => vec![CgInstr::Label(Dir::Fwd, l), CgInstr::Label(Dir::Bwd, l)],
        };
        Some(match dir {
            Dir::Fwd => self.fsearch(i, &set),
            Dir::Bwd => self.bsearch(i, &set),
        })
    }

    pub fn with_mode(&self, mode: GotoMode) -> CgMachine<'_> {
        CgMachine { seq: self, mode }
    }

    /// `|i, X|` under the standard semantics.
    pub fn behavior_at(&self, i: i64) -> ThreadSpec {
        machine::behavior_at(&self.with_mode(GotoMode::Directional), i)
    }

    pub fn left(&self) -> ThreadSpec {
        self.behavior_at(1)
    }

    pub fn right(&self) -> ThreadSpec {
        self.behavior_at(self.len() as i64)
    }

    /// Behavior where gotos numbered at most `k` act as relative jumps.
    pub fn rel_behavior_at(&self, i: i64, k: usize) -> ThreadSpec {
        machine::behavior_at(&self.with_mode(GotoMode::Relative(k)), i)
    }

    /// Behavior where gotos accept labels of either direction.
    pub fn general_behavior_at(&self, i: i64) -> ThreadSpec {
        machine::behavior_at(&self.with_mode(GotoMode::General), i)
    }

    pub fn accessibility(&self) -> PositionGraph {
        PositionGraph::of(&self.with_mode(GotoMode::Directional))
    }

    pub fn reachable(&self, i: i64) -> BTreeSet<i64> {
        machine::reachable(&self.with_mode(GotoMode::Directional), i)
    }

    pub fn exits(&self) -> BTreeSet<i64> {
        machine::exits(&self.with_mode(GotoMode::Directional))
    }

    /// Goto positions whose target lies outside the sequence.
    pub fn orphaned(&self) -> BTreeSet<i64> {
        (1..=self.len() as i64)
            .filter(|&i| match &self.0[i as usize - 1] {
                CgInstr::Goto(d, l) => {
                    let t = self.goto_target(i, *d, *l, GotoMode::Directional).expect("directional");
                    t < 1 || t > self.len() as i64
                }
                _ => false,
            })
            .collect()
    }

    /// Drops every position not reachable from `i`.
    pub fn remove_unreachable(&self, i: i64) -> Result<(CgInSeq, i64), CgError> {
        if i < 1 || i > self.len() as i64 {
            return Err(CgError::BadPosition { pos: i, len: self.len() });
        }
        let keep = self.reachable(i);
        let instrs = (1..=self.len() as i64)
            .filter(|p| keep.contains(p))
            .map(|p| self.0[p as usize - 1].clone())
            .collect();
        let start = (1..i).filter(|p| keep.contains(p)).count() as i64 + 1;
        Ok((CgInSeq(instrs), start))
    }

    pub fn rev(&self) -> CgInSeq {
        CgInSeq(self.0.iter().rev().map(CgInstr::dual).collect())
    }

    /// Largest label number among gotos, 0 when there are none.
    pub fn max_goto_label(&self) -> usize {
        self.0
            .iter()
            .filter_map(|u| match u {
                CgInstr::Goto(_, l) => Some(*l),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Increments every label number `≥ l`, leaving `l` unused.
    pub fn free_one(&self, l: usize) -> CgInSeq {
        CgInSeq(self.0.iter().map(|u| u.renumbered(|n| if n >= l { n + 1 } else { n })).collect())
    }

    /// Frees `ls[0]` first, then `ls[1]`, and so on.
    pub fn free_seq(&self, ls: &[usize]) -> CgInSeq {
        ls.iter().fold(self.clone(), |x, &l| x.free_one(l))
    }

    pub(crate) fn relabel(&self, f: impl Fn(usize, usize) -> usize) -> CgInSeq {
        CgInSeq(
            self.0
                .iter()
                .enumerate()
                .map(|(p, u)| u.renumbered(|n| f(p + 1, n)))
                .collect(),
        )
    }
}

/// A Cg sequence paired with a goto semantics.
#[derive(Clone, Copy, Debug)]
pub struct CgMachine<'a> {
    seq: &'a CgInSeq,
    mode: GotoMode,
}

impl Machine for CgMachine<'_> {
    fn len(&self) -> usize {
        self.seq.len()
    }

    fn step(&self, i: i64) -> Transition {
        match &self.seq.0[i as usize - 1] {
            CgInstr::Label(d, _) => Transition::Transfer(i + d.sign()),
            CgInstr::Goto(d, l) => match self.seq.goto_target(i, *d, *l, self.mode) {
                Some(t) => Transition::Transfer(t),
                None => Transition::Dead,
            },
            u => u.as_c().expect("not a label or goto").step_at(i),
        }
    }
}

impl fmt::Display for CgInSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        text::join(&self.0, f)
    }
}

impl FromStr for CgInSeq {
    type Err = ParseError;
    fn from_str(src: &str) -> Result<Self, Self::Err> {
        let instrs = text::tokens(src)?
            .into_iter()
            .map(|(tok, loc)| parse_cg_token(tok, loc))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CgInSeq(instrs))
    }
}
