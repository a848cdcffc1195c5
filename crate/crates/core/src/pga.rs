//! PGA: single-pass instruction sequences with forward jumps and repetition.
//!
//! Terms are kept in first canonical form `X` or `X;Y^ω` ([`PgaTerm`]). Parsed
//! expressions are converted with [`fst`]; [`snd`] computes the minimal second
//! canonical form.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::machine::{self, Machine, Transition};
use crate::text::{self, Loc, ParseError};
use crate::thread::{Action, ThreadSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PgaError {
    #[error("the term denotes an empty instruction sequence")]
    EmptyTerm,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PgaInstr {
    Basic(Action),
    Pos(Action),
    Neg(Action),
    Jump(usize),
    Halt,
}

impl fmt::Display for PgaInstr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PgaInstr::Basic(a) => write!(f, "{a}"),
            PgaInstr::Pos(a) => write!(f, "+{a}"),
            PgaInstr::Neg(a) => write!(f, "-{a}"),
            PgaInstr::Jump(k) => write!(f, "#{k}"),
            PgaInstr::Halt => f.write_str("!"),
        }
    }
}

/// A PGA expression tree as written, before canonicalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PgaExpr {
    Instr(PgaInstr),
    Concat(Vec<PgaExpr>),
    Repeat(Box<PgaExpr>),
}

impl PgaExpr {
    fn has_repetition(&self) -> bool {
        match self {
            PgaExpr::Instr(_) => false,
            PgaExpr::Concat(xs) => xs.iter().any(PgaExpr::has_repetition),
            PgaExpr::Repeat(_) => true,
        }
    }
}

impl fmt::Display for PgaExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PgaExpr::Instr(u) => write!(f, "{u}"),
            PgaExpr::Concat(xs) => text::join(xs, f),
            PgaExpr::Repeat(x) => write!(f, "({x})^w"),
        }
    }
}

/// A first canonical form: `prefix` followed by `repeat^ω` unless `repeat` is
/// empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PgaTerm {
    prefix: Vec<PgaInstr>,
    repeat: Vec<PgaInstr>,
}

impl PgaTerm {
    pub fn new(prefix: Vec<PgaInstr>, repeat: Vec<PgaInstr>) -> Result<Self, PgaError> {
        if prefix.is_empty() && repeat.is_empty() {
            return Err(PgaError::EmptyTerm);
        }
        Ok(PgaTerm { prefix, repeat })
    }

    pub fn prefix(&self) -> &[PgaInstr] {
        &self.prefix
    }

    pub fn repeat(&self) -> &[PgaInstr] {
        &self.repeat
    }

    pub fn is_repetition_free(&self) -> bool {
        self.repeat.is_empty()
    }

    fn n(&self) -> i64 {
        self.prefix.len() as i64
    }

    fn m(&self) -> i64 {
        self.repeat.len() as i64
    }

    fn at(&self, p: i64) -> &PgaInstr {
        let p = p as usize;
        if p <= self.prefix.len() {
            &self.prefix[p - 1]
        } else {
            &self.repeat[p - 1 - self.prefix.len()]
        }
    }

    /// Position reached from `p` by moving `k` places forward; `None` when it
    /// leaves a repetition-free term.
    fn advance(&self, p: i64, k: i64) -> Option<i64> {
        let (n, m) = (self.n(), self.m());
        let t = p + k;
        if m == 0 {
            return (t <= n).then_some(t);
        }
        Some(if t <= n + m { t } else { n + 1 + (t - n - 1).rem_euclid(m) })
    }

    /// `|X|`.
    pub fn behavior(&self) -> ThreadSpec {
        machine::behavior_at(self, 1)
    }
}

impl Machine for PgaTerm {
    fn len(&self) -> usize {
        self.prefix.len() + self.repeat.len()
    }

    fn step(&self, p: i64) -> Transition {
        // positions past the end are encoded as 0, which is out of range
        let go = |k: i64| self.advance(p, k).unwrap_or(0);
        match self.at(p) {
            PgaInstr::Basic(a) => Transition::Emit { action: a.clone(), yes: go(1), no: go(1) },
            PgaInstr::Pos(a) => Transition::Emit { action: a.clone(), yes: go(1), no: go(2) },
            PgaInstr::Neg(a) => Transition::Emit { action: a.clone(), yes: go(2), no: go(1) },
            PgaInstr::Jump(0) => Transition::Dead,
            PgaInstr::Jump(k) => Transition::Transfer(go(*k as i64)),
            PgaInstr::Halt => Transition::Halt,
        }
    }
}

impl fmt::Display for PgaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        text::join(&self.prefix, f)?;
        if !self.repeat.is_empty() {
            if !self.prefix.is_empty() {
                f.write_str(";")?;
            }
            f.write_str("(")?;
            text::join(&self.repeat, f)?;
            f.write_str(")^w")?;
        }
        Ok(())
    }
}

/// First canonical form using only the instruction sequence congruence.
pub fn fst(expr: &PgaExpr) -> Result<PgaTerm, PgaError> {
    let (prefix, repeat) = fst_parts(expr);
    PgaTerm::new(prefix, repeat)
}

fn fst_parts(expr: &PgaExpr) -> (Vec<PgaInstr>, Vec<PgaInstr>) {
    match expr {
        PgaExpr::Instr(u) => (vec![u.clone()], Vec::new()),
        PgaExpr::Concat(xs) => {
            let mut prefix = Vec::new();
            for x in xs {
                let (p, r) = fst_parts(x);
                prefix.extend(p);
                if !r.is_empty() {
                    return (prefix, r);
                }
            }
            (prefix, Vec::new())
        }
        PgaExpr::Repeat(x) => {
            let (p, r) = fst_parts(x);
            if x.has_repetition() {
                // X^ω = X;X^ω and everything after X's repetition is dropped
                (p, r)
            } else {
                (Vec::new(), p)
            }
        }
    }
}

/// Minimal second canonical form: no chained jumps, minimal counters, the
/// shortest repeating period and the shortest prefix.
pub fn snd(term: &PgaTerm) -> PgaTerm {
    let mut t = term.clone();
    loop {
        let next = snd_round(&t);
        debug_assert!(next.behavior().bisimilar(&t.behavior()));
        if next == t {
            return t;
        }
        t = next;
    }
}

fn snd_round(t: &PgaTerm) -> PgaTerm {
    let t = reduce_counters(t);
    let t = collapse_chains(&t);
    let t = shortest_period(&t);
    fold_prefix(&t)
}

/// Rewrites every jump to reach its target with the least counter.
fn reduce_counters(t: &PgaTerm) -> PgaTerm {
    let (n, m) = (t.n(), t.m());
    if m == 0 {
        return t.clone();
    }
    let mut out = t.clone();
    for p in 1..=n + m {
        if let PgaInstr::Jump(k) = *t.at(p) {
            if k == 0 {
                continue;
            }
            let target = t.advance(p, k as i64).expect("terms with repetition never leave");
            let k2 = if p > n {
                (target - p).rem_euclid(m)
            } else {
                target - p
            };
            set(&mut out, p, PgaInstr::Jump(k2 as usize));
        }
    }
    out
}

fn set(t: &mut PgaTerm, p: i64, u: PgaInstr) {
    let p = p as usize;
    if p <= t.prefix.len() {
        t.prefix[p - 1] = u;
    } else {
        let i = p - 1 - t.prefix.len();
        t.repeat[i] = u;
    }
}

/// Redirects jumps onto the first non-jump they eventually reach; jumps that
/// only reach jumps become `#0`.
fn collapse_chains(t: &PgaTerm) -> PgaTerm {
    let (n, m) = (t.n(), t.m());
    let last = n + m;
    let mut out = t.clone();
    for p in 1..=last {
        let PgaInstr::Jump(k) = *t.at(p) else { continue };
        if k == 0 {
            continue;
        }
        let mut seen = vec![p];
        let mut cur = t.advance(p, k as i64);
        let end = loop {
            match cur {
                None => break None,
                Some(q) => match *t.at(q) {
                    PgaInstr::Jump(0) => break Some(None),
                    PgaInstr::Jump(_) if seen.contains(&q) => break Some(None),
                    PgaInstr::Jump(j) => {
                        seen.push(q);
                        cur = t.advance(q, j as i64);
                    }
                    _ => break Some(Some(q)),
                },
            }
        };
        let u = match end {
            // leaves a repetition-free term: keep a jump past the end
            None => PgaInstr::Jump((n + 1 - p) as usize),
            Some(None) => PgaInstr::Jump(0),
            Some(Some(q)) if p > n => PgaInstr::Jump((q - p).rem_euclid(m) as usize),
            Some(Some(q)) => PgaInstr::Jump((q - p) as usize),
        };
        set(&mut out, p, u);
    }
    out
}

/// Replaces the repeating part by its shortest period.
fn shortest_period(t: &PgaTerm) -> PgaTerm {
    let (n, m) = (t.n() as usize, t.m() as usize);
    if m <= 1 {
        return t.clone();
    }
    for d in (1..m).filter(|d| m % d == 0) {
        let same = (0..m - d).all(|q| congruent(&t.repeat[q], &t.repeat[q + d], d));
        if !same {
            continue;
        }
        let repeat: Vec<PgaInstr> = t.repeat[..d]
            .iter()
            .map(|u| match u {
                PgaInstr::Jump(k) if *k > 0 => PgaInstr::Jump(k % d),
                u => u.clone(),
            })
            .collect();
        let mut prefix = t.prefix.clone();
        for (p, u) in prefix.iter_mut().enumerate() {
            if let PgaInstr::Jump(k) = u {
                let target = p + 1 + *k;
                if *k > 0 && target > n {
                    let folded = n + 1 + (target - n - 1) % d;
                    *k = folded - (p + 1);
                }
            }
        }
        return PgaTerm { prefix, repeat };
    }
    t.clone()
}

fn congruent(u: &PgaInstr, v: &PgaInstr, d: usize) -> bool {
    match (u, v) {
        (PgaInstr::Jump(a), PgaInstr::Jump(b)) => (*a == 0) == (*b == 0) && a % d == b % d,
        _ => u == v,
    }
}

/// Moves the last prefix instruction into the repeating part while it equals
/// the last repeated instruction.
fn fold_prefix(t: &PgaTerm) -> PgaTerm {
    let mut t = t.clone();
    while !t.repeat.is_empty() {
        match (t.prefix.last(), t.repeat.last()) {
            (Some(u), Some(v)) if u == v => {}
            _ => break,
        }
        t.prefix.pop();
        let v = t.repeat.pop().expect("non-empty");
        t.repeat.insert(0, v);
        t = reduce_counters(&t);
    }
    t
}

fn parse_instr(tok: &str, loc: Loc) -> Result<PgaInstr, ParseError> {
    let action = |s: &str| Action::new(s).map_err(|e| loc.error(e.to_string()));
    if tok == "!" {
        return Ok(PgaInstr::Halt);
    }
    if let Some(num) = tok.strip_prefix('#') {
        return text::natural(num)
            .map(PgaInstr::Jump)
            .ok_or_else(|| loc.error(format!("bad jump counter in `{tok}`")));
    }
    if let Some(a) = tok.strip_prefix('+') {
        return Ok(PgaInstr::Pos(action(a)?));
    }
    if let Some(a) = tok.strip_prefix('-') {
        return Ok(PgaInstr::Neg(action(a)?));
    }
    Ok(PgaInstr::Basic(action(tok)?))
}

struct ExprParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> ExprParser<'a> {
    fn loc(&self) -> Loc {
        Loc::of_offset(self.src, self.pos)
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn sequence(&mut self) -> Result<PgaExpr, ParseError> {
        let mut items = vec![self.factor()?];
        while self.peek() == Some(';') {
            self.pos += 1;
            items.push(self.factor()?);
        }
        Ok(if items.len() == 1 { items.pop().expect("one item") } else { PgaExpr::Concat(items) })
    }

    fn factor(&mut self) -> Result<PgaExpr, ParseError> {
        if self.peek() == Some('(') {
            self.pos += 1;
            let inner = if self.peek() == Some(')') { PgaExpr::Concat(Vec::new()) } else { self.sequence()? };
            if self.peek() != Some(')') {
                return Err(self.loc().error("expected `)`"));
            }
            self.pos += 1;
            self.skip_ws();
            if self.src[self.pos..].starts_with("^w") {
                self.pos += 2;
                Ok(PgaExpr::Repeat(Box::new(inner)))
            } else {
                Ok(inner)
            }
        } else {
            let start = self.pos;
            let len = self.src[start..]
                .find(|c: char| c == ';' || c == '(' || c == ')' || c.is_whitespace())
                .unwrap_or(self.src.len() - start);
            if len == 0 {
                return Err(self.loc().error("expected an instruction"));
            }
            self.pos += len;
            parse_instr(&self.src[start..start + len], Loc::of_offset(self.src, start)).map(PgaExpr::Instr)
        }
    }
}

impl FromStr for PgaExpr {
    type Err = ParseError;
    fn from_str(src: &str) -> Result<Self, Self::Err> {
        let mut p = ExprParser { src, pos: 0 };
        let e = p.sequence()?;
        if p.peek().is_some() {
            return Err(p.loc().error("unexpected trailing input"));
        }
        Ok(e)
    }
}

impl FromStr for PgaTerm {
    type Err = ParseError;
    fn from_str(src: &str) -> Result<Self, Self::Err> {
        let e: PgaExpr = src.parse()?;
        fst(&e).map_err(|err| Loc::of_offset(src, 0).error(err.to_string()))
    }
}
