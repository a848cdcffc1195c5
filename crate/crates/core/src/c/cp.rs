//! Variant of C with non-directional tests: after `+?a`, a true reply moves
//! left and a false reply moves right (`-?a` swaps these).

use std::fmt;
use std::str::FromStr;

use crate::machine::{self, Machine, Transition};
use crate::text::{self, ParseError};
use crate::thread::{Action, ThreadSpec};

use super::{parse_common, CError, CInSeq, CInstr, Dir};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CpInstr {
    Basic(Dir, Action),
    Pos(Action),
    Neg(Action),
    Jump(Dir, usize),
    Abort,
    Halt,
}

impl fmt::Display for CpInstr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CpInstr::Basic(d, a) => write!(f, "{}{a}", d.slash()),
            CpInstr::Pos(a) => write!(f, "+?{a}"),
            CpInstr::Neg(a) => write!(f, "-?{a}"),
            CpInstr::Jump(d, k) => write!(f, "{}#{k}", d.slash()),
            CpInstr::Abort => f.write_str("#"),
            CpInstr::Halt => f.write_str("!"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CpInSeq(Vec<CpInstr>);

impl CpInSeq {
    pub fn new(instrs: Vec<CpInstr>) -> Result<Self, CError> {
        if instrs.is_empty() {
            return Err(CError::Empty);
        }
        if instrs.iter().any(|u| matches!(u, CpInstr::Jump(_, 0))) {
            return Err(CError::ZeroJump);
        }
        Ok(CpInSeq(instrs))
    }

    pub fn instrs(&self) -> &[CpInstr] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn behavior_at(&self, i: i64) -> ThreadSpec {
        machine::behavior_at(self, i)
    }
}

impl Machine for CpInSeq {
    fn len(&self) -> usize {
        self.0.len()
    }

    fn step(&self, i: i64) -> Transition {
        match &self.0[i as usize - 1] {
            CpInstr::Basic(d, a) => CInstr::Basic(*d, a.clone()).step_at(i),
            CpInstr::Pos(a) => Transition::Emit { action: a.clone(), yes: i - 1, no: i + 1 },
            CpInstr::Neg(a) => Transition::Emit { action: a.clone(), yes: i + 1, no: i - 1 },
            CpInstr::Jump(d, k) => CInstr::Jump(*d, *k).step_at(i),
            CpInstr::Abort => Transition::Dead,
            CpInstr::Halt => Transition::Halt,
        }
    }
}

impl fmt::Display for CpInSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        text::join(&self.0, f)
    }
}

impl FromStr for CpInSeq {
    type Err = ParseError;
    fn from_str(src: &str) -> Result<Self, Self::Err> {
        let instrs = text::tokens(src)?
            .into_iter()
            .map(|(tok, loc)| {
                for (prefix, pos) in [("+?", true), ("-?", false)] {
                    if let Some(name) = tok.strip_prefix(prefix) {
                        let a = Action::new(name).map_err(|e| loc.error(e.to_string()))?;
                        return Ok(if pos { CpInstr::Pos(a) } else { CpInstr::Neg(a) });
                    }
                }
                match parse_common(tok, loc)? {
                    Some(CInstr::Basic(d, a)) => Ok(CpInstr::Basic(d, a)),
                    Some(CInstr::Jump(_, 0)) => Err(loc.error("jump counter must be at least 1")),
                    Some(CInstr::Jump(d, k)) => Ok(CpInstr::Jump(d, k)),
                    Some(CInstr::Abort) => Ok(CpInstr::Abort),
                    Some(CInstr::Halt) => Ok(CpInstr::Halt),
                    _ => Err(loc.error(format!("unknown instruction `{tok}`"))),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CpInSeq(instrs))
    }
}

/// Five instructions per C instruction; entering a block at either end
/// behaves as the original instruction.
pub fn c_to_cp(x: &CInSeq) -> CpInSeq {
    use CpInstr::{Abort, Halt};
    let fj = |k: usize| CpInstr::Jump(Dir::Fwd, k);
    let bj = |k: usize| CpInstr::Jump(Dir::Bwd, k);
    let out = x
        .instrs()
        .iter()
        .flat_map(|u| match u {
            CInstr::Basic(Dir::Fwd, a) => vec![CpInstr::Basic(Dir::Fwd, a.clone()), fj(4), Abort, Abort, bj(4)],
            CInstr::Basic(Dir::Bwd, a) => vec![fj(4), Abort, Abort, bj(4), CpInstr::Basic(Dir::Bwd, a.clone())],
            CInstr::Jump(Dir::Fwd, k) => vec![fj(5 * k), Abort, Abort, Abort, bj(4)],
            CInstr::Jump(Dir::Bwd, k) => vec![fj(4), Abort, Abort, Abort, bj(5 * k)],
            CInstr::Pos(Dir::Fwd, a) => vec![fj(2), fj(4), CpInstr::Pos(a.clone()), fj(7), bj(2)],
            CInstr::Neg(Dir::Fwd, a) => vec![fj(2), fj(4), CpInstr::Neg(a.clone()), fj(7), bj(2)],
            CInstr::Pos(Dir::Bwd, a) => vec![fj(2), bj(2), CpInstr::Pos(a.clone()), bj(9), bj(2)],
            CInstr::Neg(Dir::Bwd, a) => vec![fj(2), bj(2), CpInstr::Neg(a.clone()), bj(9), bj(2)],
            CInstr::Abort => vec![Abort; 5],
            CInstr::Halt => vec![Halt, Abort, Abort, Abort, Halt],
        })
        .collect();
    CpInSeq(out)
}

/// Four C instructions per instruction of the variant.
pub fn cp_to_c(x: &CpInSeq) -> CInSeq {
    use CInstr::{Abort, Halt};
    let fj = |k: usize| CInstr::Jump(Dir::Fwd, k);
    let bj = |k: usize| CInstr::Jump(Dir::Bwd, k);
    let out = x
        .0
        .iter()
        .flat_map(|u| match u {
            CpInstr::Basic(Dir::Fwd, a) => vec![CInstr::Basic(Dir::Fwd, a.clone()), fj(3), Abort, bj(3)],
            CpInstr::Basic(Dir::Bwd, a) => vec![fj(3), Abort, bj(3), CInstr::Basic(Dir::Bwd, a.clone())],
            CpInstr::Pos(a) => vec![CInstr::Pos(Dir::Fwd, a.clone()), bj(2), fj(2), bj(3)],
            CpInstr::Neg(a) => vec![CInstr::Neg(Dir::Fwd, a.clone()), bj(2), fj(2), bj(3)],
            CpInstr::Jump(Dir::Fwd, k) => vec![fj(4 * k), Abort, Abort, bj(3)],
            CpInstr::Jump(Dir::Bwd, k) => vec![fj(3), Abort, Abort, bj(4 * k)],
            CpInstr::Abort => vec![Abort; 4],
            CpInstr::Halt => vec![Halt, Abort, Abort, Halt],
        })
        .collect();
    CInSeq::new(out).expect("non-empty with positive counters")
}
