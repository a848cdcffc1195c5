//! Translations between PGA, C and Cg, and the stages they are built from.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::c::{c0_to_c, c_to_c0, c_to_cp, cp_to_c, C0InSeq, CInSeq, CInstr, CpInSeq, Dir};
use crate::cg::{self, rel_block_len, rel_k, CgInSeq, CgInstr};
use crate::expressiveness::elim_backward_to_minimal;
use crate::pga::{snd, PgaInstr, PgaTerm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranslateError {
    #[error("bound m = {m} must be at least 2 and at least the largest jump counter {max_jump}")]
    BadBound { m: usize, max_jump: usize },
    #[error("k = {k} must be at least 2")]
    BadK { k: usize },
    #[error("k = {k} is smaller than the largest jump counter {needed}")]
    KTooSmall { k: usize, needed: usize },
    #[error("k = {k} is smaller than the largest goto label {needed}")]
    GotoExceedsK { k: usize, needed: usize },
}

fn fj(k: usize) -> CInstr {
    CInstr::Jump(Dir::Fwd, k)
}

fn bj(k: usize) -> CInstr {
    CInstr::Jump(Dir::Bwd, k)
}

fn seq(instrs: Vec<CInstr>) -> CInSeq {
    CInSeq::new(instrs).expect("translations emit non-empty sequences with positive counters")
}

/// Replaces backward basics and tests; three instructions per instruction,
/// entered at the first.
pub fn eliminate_backward(x: &CInSeq) -> CInSeq {
    use CInstr::{Abort, Basic, Halt, Jump, Neg, Pos};
    x.expand(|u| match u {
        Basic(Dir::Fwd, a) => vec![Basic(Dir::Fwd, a.clone()), fj(2), Abort],
        Basic(Dir::Bwd, a) => vec![Basic(Dir::Fwd, a.clone()), bj(4), Abort],
        Pos(Dir::Fwd, a) => vec![Pos(Dir::Fwd, a.clone()), fj(2), fj(4)],
        Pos(Dir::Bwd, a) => vec![Pos(Dir::Fwd, a.clone()), bj(4), bj(8)],
        Neg(Dir::Fwd, a) => vec![Neg(Dir::Fwd, a.clone()), fj(2), fj(4)],
        Neg(Dir::Bwd, a) => vec![Neg(Dir::Fwd, a.clone()), bj(4), bj(8)],
        Jump(d, k) => vec![Jump(*d, 3 * k), Abort, Abort],
        Abort => vec![Abort; 3],
        Halt => vec![Halt, Abort, Abort],
    })
}

/// `/#(m+1);#^m;X;#^m;\#(m+1)`: a sequence without exit positions.
pub fn to_program(x: &CInSeq, m: usize) -> Result<CInSeq, TranslateError> {
    let max_jump = x.max_jump();
    if m < 2 || m < max_jump {
        return Err(TranslateError::BadBound { m, max_jump });
    }
    let mut out = vec![fj(m + 1)];
    out.extend(std::iter::repeat(CInstr::Abort).take(m));
    out.extend(x.instrs().iter().cloned());
    out.extend(std::iter::repeat(CInstr::Abort).take(m));
    out.push(bj(m + 1));
    Ok(seq(out))
}

/// A repeating PGA term with the left behavior of `x`.
pub fn c2pga(x: &CInSeq) -> PgaTerm {
    let fwd = eliminate_backward(x);
    let m = fwd.max_jump().max(2);
    let prog = to_program(&fwd, m).expect("bound chosen from the input");
    let n = prog.len();
    let body = prog
        .instrs()
        .iter()
        .map(|u| match u {
            CInstr::Basic(_, a) => PgaInstr::Basic(a.clone()),
            CInstr::Pos(_, a) => PgaInstr::Pos(a.clone()),
            CInstr::Neg(_, a) => PgaInstr::Neg(a.clone()),
            CInstr::Jump(Dir::Fwd, k) => PgaInstr::Jump(*k),
            CInstr::Jump(Dir::Bwd, k) => PgaInstr::Jump(n - k),
            CInstr::Abort => PgaInstr::Jump(0),
            CInstr::Halt => PgaInstr::Halt,
        })
        .collect();
    PgaTerm::new(Vec::new(), body).expect("non-empty")
}

/// C sequence for a term already in second canonical form.
pub fn snd2c(term: &PgaTerm) -> CInSeq {
    let psi = |u: &PgaInstr| match u {
        PgaInstr::Basic(a) => CInstr::Basic(Dir::Fwd, a.clone()),
        PgaInstr::Pos(a) => CInstr::Pos(Dir::Fwd, a.clone()),
        PgaInstr::Neg(a) => CInstr::Neg(Dir::Fwd, a.clone()),
        PgaInstr::Jump(0) => CInstr::Abort,
        PgaInstr::Jump(k) => fj(*k),
        PgaInstr::Halt => CInstr::Halt,
    };
    let mut out: Vec<CInstr> = term.prefix().iter().chain(term.repeat()).map(psi).collect();
    let m = term.repeat().len();
    if m > 0 {
        out.extend(std::iter::repeat(bj(m)).take(2.max(m - 1)));
    }
    seq(out)
}

pub fn pga2c(term: &PgaTerm) -> CInSeq {
    snd2c(&snd(term))
}

fn rem(x: i64, k: usize) -> usize {
    x.rem_euclid(k as i64 + 1) as usize
}

/// Guards each translated instruction with labels numbered by position
/// modulo `k + 1`.
pub fn c2cg_positional(x: &CInSeq, k: usize) -> Result<CgInSeq, TranslateError> {
    if k < 2 {
        return Err(TranslateError::BadK { k });
    }
    if x.max_jump() > k {
        return Err(TranslateError::KTooSmall { k, needed: x.max_jump() });
    }
    let fg = |i: i64| CgInstr::Goto(Dir::Fwd, rem(i, k));
    let bg = |i: i64| CgInstr::Goto(Dir::Bwd, rem(i, k));
    let mut out = Vec::new();
    for (p, u) in x.instrs().iter().enumerate() {
        let i = p as i64 + 1;
        let body = match u {
            CInstr::Basic(Dir::Fwd, a) => vec![CgInstr::Basic(Dir::Fwd, a.clone()), fg(i + 1)],
            CInstr::Pos(Dir::Fwd, a) => vec![CgInstr::Pos(Dir::Fwd, a.clone()), fg(i + 1), fg(i + 2)],
            CInstr::Neg(Dir::Fwd, a) => vec![CgInstr::Neg(Dir::Fwd, a.clone()), fg(i + 1), fg(i + 2)],
            CInstr::Basic(Dir::Bwd, a) => vec![CgInstr::Basic(Dir::Fwd, a.clone()), bg(i - 1)],
            CInstr::Pos(Dir::Bwd, a) => vec![CgInstr::Pos(Dir::Fwd, a.clone()), bg(i - 1), bg(i - 2)],
            CInstr::Neg(Dir::Bwd, a) => vec![CgInstr::Neg(Dir::Fwd, a.clone()), bg(i - 1), bg(i - 2)],
            CInstr::Jump(Dir::Fwd, l) => vec![fg(i + *l as i64)],
            CInstr::Jump(Dir::Bwd, l) => vec![bg(i - *l as i64)],
            CInstr::Abort => vec![CgInstr::Abort],
            CInstr::Halt => vec![CgInstr::Halt],
        };
        let r = rem(i, k);
        out.extend([CgInstr::Goto(Dir::Fwd, r), CgInstr::Label(Dir::Bwd, r), CgInstr::Label(Dir::Fwd, r)]);
        out.extend(body);
        out.push(CgInstr::Goto(Dir::Bwd, r));
    }
    Ok(CgInSeq::new(out).expect("non-empty"))
}

/// `c2cg_positional` with the least admissible `k`.
pub fn c2cg(x: &CInSeq) -> CgInSeq {
    c2cg_positional(x, x.max_jump().max(2)).expect("k covers every counter")
}

/// Jumps become gotos, then `rel_k` makes them relative again.
pub fn c2cg_hom(x: &CInSeq, k: usize) -> Result<CgInSeq, TranslateError> {
    if k < 2 {
        return Err(TranslateError::BadK { k });
    }
    if x.max_jump() > k {
        return Err(TranslateError::KTooSmall { k, needed: x.max_jump() });
    }
    let gotos = CgInSeq::new(
        x.instrs()
            .iter()
            .map(|u| match u {
                CInstr::Jump(d, l) => CgInstr::Goto(*d, *l),
                u => CgInstr::from_c(u).expect("not a jump"),
            })
            .collect(),
    )
    .expect("non-empty");
    Ok(rel_k(&gotos, k).expect("k >= 2"))
}

/// Labels become unit jumps and gotos become jumps to their resolved target.
pub fn cg2c(x: &CgInSeq) -> CInSeq {
    let out = x
        .instrs()
        .iter()
        .enumerate()
        .map(|(p, u)| {
            let i = p as i64 + 1;
            match u {
                CgInstr::Label(d, _) => CInstr::Jump(*d, 1),
                CgInstr::Goto(Dir::Fwd, l) => {
                    let j = x.fsearch(i, &[CgInstr::Label(Dir::Fwd, *l)]);
                    fj((j - i) as usize)
                }
                CgInstr::Goto(Dir::Bwd, l) => {
                    let j = x.bsearch(i, &[CgInstr::Label(Dir::Bwd, *l)]);
                    bj((i - j) as usize)
                }
                u => u.as_c().expect("not a label or goto"),
            }
        })
        .collect();
    seq(out)
}

/// Block length of [`cg2c_hom`].
pub fn highway_block_len(k: usize) -> usize {
    2 * k + 5
}

/// The highway homomorphism: each instruction becomes `2k + 5` C
/// instructions, `2k + 2` of which are lanes carrying goto traffic.
pub fn cg2c_hom(x: &CgInSeq, k: usize) -> Result<CInSeq, TranslateError> {
    if x.max_goto_label() > k {
        return Err(TranslateError::GotoExceedsK { k, needed: x.max_goto_label() });
    }
    let lane = 2 * k + 5;
    Ok(x.expand_c(|u| {
        let mut out = vec![match u {
            CgInstr::Basic(_, a) => CInstr::Basic(Dir::Fwd, a.clone()),
            CgInstr::Pos(_, a) => CInstr::Pos(Dir::Fwd, a.clone()),
            CgInstr::Neg(_, a) => CInstr::Neg(Dir::Fwd, a.clone()),
            CgInstr::Label(..) => fj(1),
            CgInstr::Goto(Dir::Fwd, l) => fj(k + l + 4),
            CgInstr::Goto(Dir::Bwd, l) => fj(l + 3),
            CgInstr::Abort => CInstr::Abort,
            CgInstr::Halt => CInstr::Halt,
        }];
        if u.is_backward() {
            out.extend([bj(2 * k + 6), bj(4 * k + 12)]);
        } else {
            out.extend([fj(2 * k + 4), fj(4 * k + 8)]);
        }
        for l in 0..=k {
            out.push(match u {
                CgInstr::Label(Dir::Bwd, n) if *n == l => bj(l + 3),
                _ => bj(lane),
            });
        }
        for l in 0..=k {
            out.push(match u {
                CgInstr::Label(Dir::Fwd, n) if *n == l => bj(k + l + 4),
                _ => fj(lane),
            });
        }
        out
    }))
}

impl CgInSeq {
    fn expand_c(&self, f: impl Fn(&CgInstr) -> Vec<CInstr>) -> CInSeq {
        seq(self.instrs().iter().flat_map(f).collect())
    }
}

/// A program in any of the supported formalisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Program {
    Pga(PgaTerm),
    C(CInSeq),
    Cg(CgInSeq),
    Cp(CpInSeq),
    C0(C0InSeq),
}

impl Program {
    pub fn len(&self) -> usize {
        use crate::machine::Machine;
        match self {
            Program::Pga(t) => t.len(),
            Program::C(x) => x.len(),
            Program::Cg(x) => x.len(),
            Program::Cp(x) => x.len(),
            Program::C0(x) => x.instrs().len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn formalism(&self) -> Formalism {
        match self {
            Program::Pga(_) => Formalism::Pga,
            Program::C(_) => Formalism::C,
            Program::Cg(_) => Formalism::Cg,
            Program::Cp(_) => Formalism::Cp,
            Program::C0(_) => Formalism::C0,
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Program::Pga(t) => write!(f, "{t}"),
            Program::C(x) => write!(f, "{x}"),
            Program::Cg(x) => write!(f, "{x}"),
            Program::Cp(x) => write!(f, "{x}"),
            Program::C0(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Formalism {
    Pga,
    C,
    Cg,
    Cp,
    C0,
}

impl Formalism {
    pub fn parse_program(self, src: &str) -> Result<Program, crate::ParseError> {
        Ok(match self {
            Formalism::Pga => Program::Pga(src.parse()?),
            Formalism::C => Program::C(src.parse()?),
            Formalism::Cg => Program::Cg(src.parse()?),
            Formalism::Cp => Program::Cp(src.parse()?),
            Formalism::C0 => Program::C0(src.parse()?),
        })
    }
}

impl FromStr for Formalism {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "pga" => Formalism::Pga,
            "c" => Formalism::C,
            "cg" => Formalism::Cg,
            "cp" => Formalism::Cp,
            "c0" => Formalism::C0,
            _ => return Err(format!("unknown formalism `{s}` (expected pga, c, cg, cp or c0)")),
        })
    }
}

/// A named translation or stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    C2Pga,
    Pga2C,
    C2Cg,
    C2CgPositional,
    C2CgHom,
    Cg2C,
    Cg2CHom,
    EliminateBackward,
    ToProgram,
    ElimMinimal,
    CToCp,
    CpToC,
    CToC0,
    C0ToC,
    Rel,
    ToDirectional,
    FromGeneral,
    FromGeneralUniform,
}

impl Route {
    pub const ALL: [Route; 18] = [
        Route::C2Pga,
        Route::Pga2C,
        Route::C2Cg,
        Route::C2CgPositional,
        Route::C2CgHom,
        Route::Cg2C,
        Route::Cg2CHom,
        Route::EliminateBackward,
        Route::ToProgram,
        Route::ElimMinimal,
        Route::CToCp,
        Route::CpToC,
        Route::CToC0,
        Route::C0ToC,
        Route::Rel,
        Route::ToDirectional,
        Route::FromGeneral,
        Route::FromGeneralUniform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Route::C2Pga => "c2pga",
            Route::Pga2C => "pga2c",
            Route::C2Cg => "c2cg",
            Route::C2CgPositional => "c2cg-positional",
            Route::C2CgHom => "c2cg-hom",
            Route::Cg2C => "cg2c",
            Route::Cg2CHom => "cg2c-hom",
            Route::EliminateBackward => "eliminate-backward",
            Route::ToProgram => "to-program",
            Route::ElimMinimal => "elim-minimal",
            Route::CToCp => "c-to-cp",
            Route::CpToC => "cp-to-c",
            Route::CToC0 => "c-to-c0",
            Route::C0ToC => "c0-to-c",
            Route::Rel => "rel",
            Route::ToDirectional => "to-directional",
            Route::FromGeneral => "from-general",
            Route::FromGeneralUniform => "from-general-uniform",
        }
    }

    pub fn input(self) -> Formalism {
        match self {
            Route::Pga2C => Formalism::Pga,
            Route::Cg2C
            | Route::Cg2CHom
            | Route::Rel
            | Route::ToDirectional
            | Route::FromGeneral
            | Route::FromGeneralUniform => Formalism::Cg,
            Route::CpToC => Formalism::Cp,
            Route::C0ToC => Formalism::C0,
            _ => Formalism::C,
        }
    }

    /// Whether the route needs `k` (or `m` for `to-program`).
    pub fn takes_k(self) -> bool {
        matches!(self, Route::C2CgPositional | Route::C2CgHom | Route::Cg2CHom | Route::ToProgram | Route::Rel)
    }

    /// Applies the route. `k` defaults to the least admissible value.
    pub fn apply(self, input: &Program, k: Option<usize>) -> Result<(Program, RouteReport), RouteError> {
        let mismatch = || RouteError::WrongInput { route: self.name(), expected: self.input() };
        let (out, k_used, factor, map): (Program, Option<usize>, Option<usize>, String) = match (self, input) {
            (Route::C2Pga, Program::C(x)) => {
                (Program::Pga(c2pga(x)), None, None, "left behavior at position 1".into())
            }
            (Route::Pga2C, Program::Pga(t)) => {
                (Program::C(pga2c(t)), None, None, "term behavior at position 1".into())
            }
            (Route::C2Cg, Program::C(x)) => {
                let k = x.max_jump().max(2);
                (Program::Cg(c2cg(x)), Some(k), None, "left and right behavior".into())
            }
            (Route::C2CgPositional, Program::C(x)) => {
                let k = k.unwrap_or(x.max_jump().max(2));
                (Program::Cg(c2cg_positional(x, k)?), Some(k), None, "left and right behavior".into())
            }
            (Route::C2CgHom, Program::C(x)) => {
                let k = k.unwrap_or(x.max_jump().max(2));
                let b = rel_block_len(k);
                (Program::Cg(c2cg_hom(x, k)?), Some(k), Some(b), format!("i -> {b}(i-1)+1 and i -> {b}i"))
            }
            (Route::Cg2C, Program::Cg(x)) => (Program::C(cg2c(x)), None, Some(1), "i -> i".into()),
            (Route::Cg2CHom, Program::Cg(x)) => {
                let k = k.unwrap_or(x.max_goto_label());
                let b = highway_block_len(k);
                (Program::C(cg2c_hom(x, k)?), Some(k), Some(b), format!("i -> {b}(i-1)+1"))
            }
            (Route::EliminateBackward, Program::C(x)) => {
                (Program::C(eliminate_backward(x)), None, Some(3), "i -> 3(i-1)+1".into())
            }
            (Route::ToProgram, Program::C(x)) => {
                let m = k.unwrap_or(x.max_jump().max(2));
                (Program::C(to_program(x, m)?), Some(m), None, "left and right behavior".into())
            }
            (Route::ElimMinimal, Program::C(x)) => {
                (Program::C(elim_backward_to_minimal(x)), None, Some(3), "left behavior".into())
            }
            (Route::CToCp, Program::C(x)) => {
                (Program::Cp(c_to_cp(x)), None, Some(5), "i -> 5(i-1)+1 and i -> 5i".into())
            }
            (Route::CpToC, Program::Cp(x)) => {
                (Program::C(cp_to_c(x)), None, Some(4), "i -> 4(i-1)+1 and i -> 4i".into())
            }
            (Route::CToC0, Program::C(x)) => (Program::C0(c_to_c0(x)), None, Some(1), "i -> i".into()),
            (Route::C0ToC, Program::C0(x)) => (Program::C(c0_to_c(x)), None, Some(1), "i -> i".into()),
            (Route::Rel, Program::Cg(x)) => {
                let k = k.unwrap_or(2);
                let b = rel_block_len(k);
                let out = rel_k(x, k).map_err(|_| TranslateError::BadK { k })?;
                (Program::Cg(out), Some(k), Some(b), format!("i -> {b}(i-1)+1 and i -> {b}i"))
            }
            (Route::ToDirectional, Program::Cg(x)) => {
                (Program::Cg(cg::to_directional(x)), None, Some(1), "i -> i".into())
            }
            (Route::FromGeneral, Program::Cg(x)) => {
                let t = cg::from_general(x);
                let map = format!("i -> {:?}", &t.witness[1..t.witness.len() - 1]);
                (Program::Cg(t.program), None, None, map)
            }
            (Route::FromGeneralUniform, Program::Cg(x)) => {
                let b = cg::UNIFORM_FACTOR;
                (Program::Cg(cg::from_general_uniform(x)), None, Some(b), format!("i -> {b}(i-1)+1 and i -> {b}i"))
            }
            _ => return Err(mismatch()),
        };
        let report = RouteReport {
            route: self.name(),
            input_len: input.len(),
            output_len: out.len(),
            factor,
            k: k_used,
            position_map: map,
        };
        Ok((out, report))
    }
}

impl FromStr for Route {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Route::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Route::ALL.iter().map(|r| r.name()).collect();
                format!("unknown route `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RouteError {
    #[error("route {route} expects a {expected:?} program")]
    WrongInput { route: &'static str, expected: Formalism },
    #[error(transparent)]
    Precondition(#[from] TranslateError),
}

/// Summary of one translation run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouteReport {
    pub route: &'static str,
    pub input_len: usize,
    pub output_len: usize,
    /// Output instructions per input instruction, for uniform routes.
    pub factor: Option<usize>,
    pub k: Option<usize>,
    pub position_map: String,
}

impl fmt::Display for RouteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "route: {}", self.route)?;
        writeln!(f, "input length: {}", self.input_len)?;
        writeln!(f, "output length: {}", self.output_len)?;
        match self.factor {
            Some(b) => writeln!(f, "expansion factor: {b}")?,
            None => writeln!(f, "expansion factor: none")?,
        }
        if let Some(k) = self.k {
            writeln!(f, "k: {k}")?;
        }
        write!(f, "positions: {}", self.position_map)
    }
}
