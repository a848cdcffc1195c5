//! Constructions over restricted instruction sets and the thread families and
//! gadgets used to separate them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::c::{CInSeq, CInstr, Dir};
use crate::cg::{CgInSeq, CgInstr};
use crate::thread::{Action, StateDef, ThreadSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("the thread has a reachable cycle; only finite threads can be built from one-directional jumps")]
    InfiniteThread,
    #[error("invalid counter set: {0}")]
    BadCounterSet(String),
}

/// One arithmetic progression `{k ≥ lo | k ≡ r (mod m)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Progression {
    pub modulus: usize,
    pub residue: usize,
    pub lo: usize,
}

impl Progression {
    fn contains(&self, k: usize) -> bool {
        k >= self.lo && k % self.modulus == self.residue
    }

    fn min_at_least(&self, n: usize) -> usize {
        let start = n.max(self.lo);
        let shift = (self.residue + self.modulus - start % self.modulus) % self.modulus;
        start + shift
    }
}

/// An infinite set of positive jump counters: a union of progressions plus
/// finitely many extra members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterSet {
    classes: Vec<Progression>,
    extras: BTreeSet<usize>,
}

impl CounterSet {
    pub fn new(classes: Vec<Progression>, extras: BTreeSet<usize>) -> Result<Self, ExprError> {
        if classes.is_empty() {
            return Err(ExprError::BadCounterSet("at least one `every` term is required".into()));
        }
        for c in &classes {
            if c.modulus == 0 || c.residue >= c.modulus || c.lo == 0 {
                return Err(ExprError::BadCounterSet(format!(
                    "need modulus >= 1, offset < modulus and from >= 1 (got every {} from {} offset {})",
                    c.modulus, c.lo, c.residue
                )));
            }
        }
        if extras.contains(&0) {
            return Err(ExprError::BadCounterSet("jump counters must be positive".into()));
        }
        Ok(CounterSet { classes, extras })
    }

    /// `{k ≥ lo | k ≡ r (mod m)}`.
    pub fn every(modulus: usize, lo: usize, residue: usize) -> Result<Self, ExprError> {
        Self::new(vec![Progression { modulus, residue, lo }], BTreeSet::new())
    }

    pub fn all_from(lo: usize) -> Self {
        Self::every(1, lo.max(1), 0).expect("valid progression")
    }

    pub fn with_extras(mut self, extras: impl IntoIterator<Item = usize>) -> Result<Self, ExprError> {
        self.extras.extend(extras);
        Self::new(self.classes, self.extras)
    }

    pub fn contains(&self, k: usize) -> bool {
        self.extras.contains(&k) || self.classes.iter().any(|c| c.contains(k))
    }

    /// Least member `≥ n`.
    pub fn min_at_least(&self, n: usize) -> usize {
        let from_classes = self.classes.iter().map(|c| c.min_at_least(n)).min().expect("non-empty");
        match self.extras.range(n..).next() {
            Some(&e) => e.min(from_classes),
            None => from_classes,
        }
    }

    /// The first `count` members `≥ n`.
    pub fn members_from(&self, n: usize, count: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(count);
        let mut next = n;
        while out.len() < count {
            let k = self.min_at_least(next);
            out.push(k);
            next = k + 1;
        }
        out
    }
}

impl fmt::Display for CounterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<String> = self
            .classes
            .iter()
            .map(|c| format!("every {} from {} offset {}", c.modulus, c.lo, c.residue))
            .collect();
        if !self.extras.is_empty() {
            let list: Vec<String> = self.extras.iter().map(usize::to_string).collect();
            terms.push(format!("plus {{{}}}", list.join(",")));
        }
        write!(f, "{}", terms.join(", "))
    }
}

impl FromStr for CounterSet {
    type Err = ExprError;

    /// Comma-separated terms `every <m> from <lo> [offset <r>]` and
    /// `plus {k1,k2,...}`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: String| ExprError::BadCounterSet(msg);
        let mut terms = Vec::new();
        let mut depth = 0usize;
        let mut start = 0;
        for (i, ch) in s.char_indices() {
            match ch {
                '{' => depth += 1,
                '}' => depth = depth.checked_sub(1).ok_or_else(|| bad("unbalanced `}`".into()))?,
                ',' if depth == 0 => {
                    terms.push(&s[start..i]);
                    start = i + 1;
                }
                _ => {}
            }
        }
        if depth != 0 {
            return Err(bad("unbalanced `{`".into()));
        }
        terms.push(&s[start..]);

        let num = |w: Option<&str>, what: &str| -> Result<usize, ExprError> {
            let w = w.ok_or_else(|| bad(format!("missing {what}")))?;
            w.parse().map_err(|_| bad(format!("`{w}` is not a natural number ({what})")))
        };
        let mut classes = Vec::new();
        let mut extras = BTreeSet::new();
        for term in terms {
            let term = term.trim();
            if let Some(rest) = term.strip_prefix("plus") {
                let inner = rest
                    .trim()
                    .strip_prefix('{')
                    .and_then(|r| r.strip_suffix('}'))
                    .ok_or_else(|| bad(format!("expected `plus {{k1,k2}}`, got `{term}`")))?;
                for k in inner.split(',').map(str::trim).filter(|k| !k.is_empty()) {
                    extras.insert(num(Some(k), "extra member")?);
                }
                continue;
            }
            let words: Vec<&str> = term.split_whitespace().collect();
            match words.as_slice() {
                ["every", m, "from", lo] => {
                    classes.push(Progression { modulus: num(Some(m), "modulus")?, residue: 0, lo: num(Some(lo), "lower bound")? });
                }
                ["every", m, "from", lo, "offset", r] => {
                    classes.push(Progression {
                        modulus: num(Some(m), "modulus")?,
                        residue: num(Some(r), "offset")?,
                        lo: num(Some(lo), "lower bound")?,
                    });
                }
                _ => return Err(bad(format!("unrecognized term `{term}`"))),
            }
        }
        CounterSet::new(classes, extras)
    }
}

/// How the replica construction picks from an eligible set of counters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Selection {
    /// Always the least eligible counter.
    #[default]
    Least,
    /// Uniformly among the few least eligible counters.
    Seeded(u64),
}

const SPREAD: usize = 4;

struct Selector(Option<StdRng>);

impl Selector {
    fn new(sel: Selection) -> Self {
        match sel {
            Selection::Least => Selector(None),
            Selection::Seeded(seed) => Selector(Some(StdRng::seed_from_u64(seed))),
        }
    }

    fn pick(&mut self, set: &CounterSet, at_least: usize) -> usize {
        match &mut self.0 {
            None => set.min_at_least(at_least),
            Some(rng) => {
                let options = set.members_from(at_least, SPREAD);
                options[rng.gen_range(0..options.len())]
            }
        }
    }
}

fn a_test(action: &Action) -> CInstr {
    CInstr::Pos(Dir::Fwd, action.clone())
}

/// The endomorphism onto `{+/a, /#k, \#k, !}`, three instructions per
/// instruction, preserving left behavior.
pub fn elim_backward_to_minimal(x: &CInSeq) -> CInSeq {
    use CInstr::{Abort, Basic, Halt, Jump, Neg, Pos};
    let f = |k| CInstr::Jump(Dir::Fwd, k);
    let b = |k| CInstr::Jump(Dir::Bwd, k);
    x.expand(|u| match u {
        Basic(Dir::Fwd, a) => vec![a_test(a), f(2), f(1)],
        Basic(Dir::Bwd, a) => vec![a_test(a), b(4), b(5)],
        Pos(Dir::Fwd, a) => vec![a_test(a), f(2), f(4)],
        Pos(Dir::Bwd, a) => vec![a_test(a), b(4), b(8)],
        Neg(Dir::Fwd, a) => vec![a_test(a), f(5), f(1)],
        Neg(Dir::Bwd, a) => vec![a_test(a), b(7), b(5)],
        Jump(d, k) => vec![Jump(*d, 3 * k), Halt, Halt],
        Abort => vec![f(1), b(1), Halt],
        Halt => vec![Halt, Halt, Halt],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Pos,
    Neg,
}

/// Builds a sequence over `{±/a, /#k (k ∈ jumps), !}` whose left behavior is
/// the finite thread `p`.
pub fn forward_only_build(p: &ThreadSpec, jumps: &CounterSet, polarity: Polarity) -> Result<CInSeq, ExprError> {
    if !p.is_finite() {
        return Err(ExprError::InfiniteThread);
    }
    let instrs = build_state(p, p.entry(), jumps, polarity);
    Ok(CInSeq::new(instrs).expect("non-empty, positive counters"))
}

fn build_state(p: &ThreadSpec, state: usize, jumps: &CounterSet, polarity: Polarity) -> Vec<CInstr> {
    match &p.states()[state] {
        StateDef::Halt => vec![CInstr::Halt],
        StateDef::Dead => vec![CInstr::Jump(Dir::Fwd, jumps.min_at_least(1))],
        StateDef::Test { action, yes, no } => {
            let (test, near, far) = match polarity {
                Polarity::Pos => (CInstr::Pos(Dir::Fwd, action.clone()), *no, *yes),
                Polarity::Neg => (CInstr::Neg(Dir::Fwd, action.clone()), *yes, *no),
            };
            let near = build_state(p, near, jumps, polarity);
            let far = build_state(p, far, jumps, polarity);
            let k = jumps.min_at_least(near.len() + 1);
            let pad = k - near.len() - 1;
            let tail = pad + far.len();
            let len = near.len() as i64;
            let mut out = vec![test, CInstr::Jump(Dir::Fwd, k)];
            out.extend(near.into_iter().enumerate().map(|(q, u)| match u {
                CInstr::Jump(Dir::Fwd, j) if q as i64 + 1 + j as i64 > len => {
                    CInstr::Jump(Dir::Fwd, jumps.min_at_least(j + tail))
                }
                u => u,
            }));
            out.extend(std::iter::repeat(CInstr::Halt).take(pad));
            out.extend(far);
            out
        }
    }
}

/// Jump instructions that carry control from `i` to one of the `s` replicas
/// `j, j + (s-1), …` of a state, placed to the right of `z`.
pub fn connect(i: usize, j: usize, z: usize, s: usize, fwd: &CounterSet, bwd: &CounterSet) -> Vec<(usize, CInstr)> {
    connect_with(i, j, z, s, fwd, bwd, &mut Selector(None))
}

fn connect_with(
    i: usize,
    j: usize,
    z: usize,
    s: usize,
    fwd: &CounterSet,
    bwd: &CounterSet,
    sel: &mut Selector,
) -> Vec<(usize, CInstr)> {
    let r = i + sel.pick(fwd, (z + 1).saturating_sub(i).max(1));
    let l = r as i64 - sel.pick(bwd, r - j) as i64;
    let s_i = s as i64;
    let mut p = (j as i64 - l).div_euclid(s_i);
    p += j as i64 - (l + p * s_i);
    let mut out = vec![(i, CInstr::Jump(Dir::Fwd, r - i))];
    out.extend((0..p).map(|k| (r + (k * s_i) as usize, CInstr::Jump(Dir::Fwd, s))));
    out.push((r + (p * s_i) as usize, CInstr::Jump(Dir::Bwd, (r as i64 - l) as usize)));
    out
}

/// [`construct_inseq_with`] with least-eligible selection.
pub fn construct_inseq(p: &ThreadSpec, fwd: &CounterSet, bwd: &CounterSet) -> CInSeq {
    construct_inseq_with(p, fwd, bwd, Selection::Least)
}

/// A sequence with left behavior `p` whose forward counters lie in `fwd` and
/// backward counters in `bwd`.
pub fn construct_inseq_with(p: &ThreadSpec, fwd: &CounterSet, bwd: &CounterSet, selection: Selection) -> CInSeq {
    let mut sel = Selector::new(selection);
    let n = p.len();
    let s = sel.pick(fwd, 4);
    let start = |state: usize| state * s * (s - 1) + 1;
    let mut z = n * s * (s - 1);
    let mut placed: BTreeMap<usize, CInstr> = BTreeMap::new();
    for (i, state) in p.states().iter().enumerate() {
        for r in 0..s {
            let c = (i * s + r) * (s - 1) + 1;
            match state {
                StateDef::Halt => {
                    placed.insert(c, CInstr::Halt);
                }
                StateDef::Dead => {
                    placed.insert(c, CInstr::Jump(Dir::Bwd, sel.pick(bwd, c)));
                }
                StateDef::Test { action, yes, no } => {
                    placed.insert(c, a_test(action));
                    for (from, to) in [(c + 1, *yes), (c + 2, *no)] {
                        placed.extend(connect_with(from, start(to), z, s, fwd, bwd, &mut sel));
                        z = *placed.keys().next_back().expect("non-empty");
                    }
                }
            }
        }
    }
    let last = placed.keys().next_back().copied().unwrap_or(0).max(z.saturating_sub(1)).max(1);
    let instrs = (1..=last).map(|q| placed.remove(&q).unwrap_or(CInstr::Halt)).collect();
    CInSeq::new(instrs).expect("non-empty, positive counters")
}

/// `(g(m))_{d+1}`: bit `d` of `m`.
fn reply(m: usize, d: usize) -> bool {
    (m >> d) & 1 == 1
}

/// `P^l` for `1 ≤ l < 2^depth` over leaves `Q_m^d`. State 0 is `D`;
/// `leaf` is the index of every `Q_m^0` and `off(m)` the branch that leaves
/// the reply path of `Q_m^d`.
fn tree_family(
    action: &Action,
    depth: usize,
    mut states: Vec<StateDef>,
    leaf: usize,
    off: impl Fn(usize) -> usize,
) -> ThreadSpec {
    let leaves = 1usize << depth;
    let base = states.len().max(leaves);
    states.resize(base, StateDef::Dead);
    let q = |m: usize, d: usize| if d == 0 { leaf } else { base + m * depth + d - 1 };
    states.resize(base + leaves * depth, StateDef::Dead);
    let test = |yes, no| StateDef::Test { action: action.clone(), yes, no };
    for l in 1..leaves {
        states[l] = if l < leaves / 2 {
            test(2 * l, 2 * l + 1)
        } else {
            let m = 2 * l - leaves;
            test(q(m, depth), q(m + 1, depth))
        };
    }
    for m in 0..leaves {
        for d in 0..depth {
            states[q(m, d + 1)] = if reply(m, d) { test(off(m), q(m, d)) } else { test(q(m, d), off(m)) };
        }
    }
    ThreadSpec::new(states, 1).expect("indices in range")
}

/// A thread over `a` alone with the a+n-property.
pub fn gen_a_plus_n_thread(action: &Action, n: usize) -> ThreadSpec {
    assert!(n >= 1, "n must be positive");
    // State 0 is D; the unused slot 2^n holds a∘D.
    let leaves = 1usize << n;
    let mut states = vec![StateDef::Dead; leaves + 1];
    states[leaves] = StateDef::Test { action: action.clone(), yes: 0, no: 0 };
    tree_family(action, n, states, leaves, |_| 0)
}

/// A thread over `a` alone with the a+2n-property whose deepest states
/// re-enter the n-residuals `P^{2^n + (m mod 2^n)}`.
pub fn gen_one_dir_thread(action: &Action, n: usize) -> ThreadSpec {
    assert!(n >= 1, "n must be positive");
    let half = 1usize << n;
    tree_family(action, 2 * n, vec![StateDef::Dead], 0, |m| half + m % half)
}

/// `node_1;…;node_{2^n-1}` with `node_i = +/a;/#(3i-1);/#(3i+1)`.
pub fn gen_c_tree(action: &Action, n: usize) -> CInSeq {
    assert!(n >= 1, "n must be positive");
    let instrs = (1..1usize << n)
        .flat_map(|i| [a_test(action), CInstr::Jump(Dir::Fwd, 3 * i - 1), CInstr::Jump(Dir::Fwd, 3 * i + 1)])
        .collect();
    CInSeq::new(instrs).expect("non-empty")
}

/// `node_1;…;node_{2^n-1}` with `node_i = /Li;+/a;/G(2i);/G(2i+1)`.
pub fn gen_cg_tree(action: &Action, n: usize) -> CgInSeq {
    assert!(n >= 1, "n must be positive");
    let instrs = (1..1usize << n)
        .flat_map(|i| {
            [
                CgInstr::Label(Dir::Fwd, i),
                CgInstr::Pos(Dir::Fwd, action.clone()),
                CgInstr::Goto(Dir::Fwd, 2 * i),
                CgInstr::Goto(Dir::Fwd, 2 * i + 1),
            ]
        })
        .collect();
    CgInSeq::new(instrs).expect("non-empty")
}

/// Forward and backward jump counters used by `x`.
pub fn jump_counters(x: &CInSeq) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let mut fwd = BTreeSet::new();
    let mut bwd = BTreeSet::new();
    for u in x.instrs() {
        match u {
            CInstr::Jump(Dir::Fwd, k) => {
                fwd.insert(*k);
            }
            CInstr::Jump(Dir::Bwd, k) => {
                bwd.insert(*k);
            }
            _ => {}
        }
    }
    (fwd, bwd)
}
