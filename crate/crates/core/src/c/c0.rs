//! Variant of C without abort, where a jump of distance zero blocks.

use std::fmt;
use std::str::FromStr;

use crate::machine::{self, Machine, Transition};
use crate::text::{self, ParseError};
use crate::thread::ThreadSpec;

use super::{parse_common, CError, CInSeq, CInstr};

/// `/#0` and `\#0` denote the same instruction, so there is one constructor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum C0Instr {
    /// Any C instruction except abort.
    Plain(CInstr),
    Jump0,
}

impl fmt::Display for C0Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            C0Instr::Plain(u) => write!(f, "{u}"),
            C0Instr::Jump0 => f.write_str("/#0"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct C0InSeq(Vec<C0Instr>);

impl C0InSeq {
    pub fn new(instrs: Vec<C0Instr>) -> Result<Self, CError> {
        if instrs.is_empty() {
            return Err(CError::Empty);
        }
        for u in &instrs {
            match u {
                C0Instr::Plain(CInstr::Abort) => return Err(CError::AbortInC0),
                C0Instr::Plain(CInstr::Jump(_, 0)) => return Err(CError::ZeroJump),
                _ => {}
            }
        }
        Ok(C0InSeq(instrs))
    }

    pub fn instrs(&self) -> &[C0Instr] {
        &self.0
    }

    pub fn behavior_at(&self, i: i64) -> ThreadSpec {
        machine::behavior_at(self, i)
    }
}

impl Machine for C0InSeq {
    fn len(&self) -> usize {
        self.0.len()
    }

    fn step(&self, pos: i64) -> Transition {
        match &self.0[pos as usize - 1] {
            C0Instr::Plain(u) => u.step_at(pos),
            C0Instr::Jump0 => Transition::Transfer(pos),
        }
    }
}

impl fmt::Display for C0InSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        text::join(&self.0, f)
    }
}

impl FromStr for C0InSeq {
    type Err = ParseError;
    fn from_str(src: &str) -> Result<Self, Self::Err> {
        let instrs = text::tokens(src)?
            .into_iter()
            .map(|(tok, loc)| match parse_common(tok, loc)? {
                Some(CInstr::Jump(_, 0)) => Ok(C0Instr::Jump0),
                Some(CInstr::Abort) => Err(loc.error("`#` is written `/#0` in this variant")),
                Some(u) => Ok(C0Instr::Plain(u)),
                None => Err(loc.error(format!("unknown instruction `{tok}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(C0InSeq(instrs))
    }
}

/// Replaces the zero jump by abort.
pub fn c0_to_c(x: &C0InSeq) -> CInSeq {
    let instrs = x
        .0
        .iter()
        .map(|u| match u {
            C0Instr::Plain(u) => u.clone(),
            C0Instr::Jump0 => CInstr::Abort,
        })
        .collect();
    CInSeq::new(instrs).expect("non-empty with positive counters")
}

/// Replaces abort by the zero jump.
pub fn c_to_c0(x: &CInSeq) -> C0InSeq {
    C0InSeq(
        x.instrs()
            .iter()
            .map(|u| match u {
                CInstr::Abort => C0Instr::Jump0,
                u => C0Instr::Plain(u.clone()),
            })
            .collect(),
    )
}
