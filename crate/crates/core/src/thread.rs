//! Regular threads as finite linear recursive specifications.
//!
//! A [`ThreadSpec`] is a list of states, each `S` (halt), `D` (inaction) or a
//! postconditional test `P ⊴a⊵ Q`. Action prefix `a∘P` is the test with equal
//! branches. Every constructor trims unreachable states and renumbers the
//! remaining ones breadth-first from the entry (yes before no), so the entry is
//! always state 0.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::text::ParseError;

/// A basic action name matching `[a-z][a-z0-9_]*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action(String);

impl Action {
    pub fn new(name: &str) -> Result<Self, ThreadError> {
        if Self::is_valid(name) {
            Ok(Action(name.to_string()))
        } else {
            Err(ThreadError::BadAction(name.to_string()))
        }
    }

    pub fn is_valid(name: &str) -> bool {
        let mut chars = name.chars();
        match chars.next() {
            Some(c) if c.is_ascii_lowercase() => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Action {
    type Err = ThreadError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Action::new(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ThreadError {
    #[error("invalid action name `{0}`")]
    BadAction(String),
    #[error("state index {index} out of range for {len} states")]
    BadIndex { index: usize, len: usize },
    #[error("a thread specification needs at least one state")]
    Empty,
}

/// One equation of a linear recursive specification.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StateDef {
    Halt,
    Dead,
    Test { action: Action, yes: usize, no: usize },
}

/// A finite linear recursive specification with entry state 0 after trimming.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ThreadSpec {
    states: Vec<StateDef>,
}

impl ThreadSpec {
    /// Validates indices, then trims to the states reachable from `entry`.
    pub fn new(states: Vec<StateDef>, entry: usize) -> Result<Self, ThreadError> {
        let len = states.len();
        if len == 0 {
            return Err(ThreadError::Empty);
        }
        let check = |index: usize| {
            if index < len {
                Ok(())
            } else {
                Err(ThreadError::BadIndex { index, len })
            }
        };
        check(entry)?;
        for st in &states {
            if let StateDef::Test { yes, no, .. } = st {
                check(*yes)?;
                check(*no)?;
            }
        }
        Ok(Self::trimmed(&states, entry))
    }

    fn trimmed(states: &[StateDef], entry: usize) -> Self {
        let mut order = vec![entry];
        let mut index: HashMap<usize, usize> = HashMap::from([(entry, 0)]);
        let mut head = 0;
        while head < order.len() {
            if let StateDef::Test { yes, no, .. } = &states[order[head]] {
                for next in [*yes, *no] {
                    if let std::collections::hash_map::Entry::Vacant(e) = index.entry(next) {
                        e.insert(order.len());
                        order.push(next);
                    }
                }
            }
            head += 1;
        }
        let states = order
            .iter()
            .map(|&old| match &states[old] {
                StateDef::Test { action, yes, no } => StateDef::Test {
                    action: action.clone(),
                    yes: index[yes],
                    no: index[no],
                },
                other => other.clone(),
            })
            .collect();
        ThreadSpec { states }
    }

    pub fn halt() -> Self {
        ThreadSpec { states: vec![StateDef::Halt] }
    }

    pub fn dead() -> Self {
        ThreadSpec { states: vec![StateDef::Dead] }
    }

    /// `yes ⊴a⊵ no`.
    pub fn test(action: Action, yes: &ThreadSpec, no: &ThreadSpec) -> Self {
        let off_yes = 1;
        let off_no = 1 + yes.states.len();
        let mut states = vec![StateDef::Test { action, yes: off_yes, no: off_no }];
        states.extend(yes.states.iter().map(|s| s.shifted(off_yes)));
        states.extend(no.states.iter().map(|s| s.shifted(off_no)));
        Self::trimmed(&states, 0)
    }

    /// `a∘tail`.
    pub fn prefix(action: Action, tail: &ThreadSpec) -> Self {
        let mut states = vec![StateDef::Test { action, yes: 1, no: 1 }];
        states.extend(tail.states.iter().map(|s| s.shifted(1)));
        Self::trimmed(&states, 0)
    }

    /// The thread `a∘a∘…` that never terminates.
    pub fn action_loop(action: Action) -> Self {
        ThreadSpec { states: vec![StateDef::Test { action, yes: 0, no: 0 }] }
    }

    pub fn states(&self) -> &[StateDef] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entry(&self) -> usize {
        0
    }

    /// The residual thread rooted at `state`.
    pub fn at(&self, state: usize) -> ThreadSpec {
        Self::trimmed(&self.states, state)
    }

    /// π_n: behavior beyond depth `n` replaced by `D`.
    pub fn approximate(&self, n: usize) -> ThreadSpec {
        let mut out: Vec<StateDef> = Vec::new();
        let mut memo: HashMap<(usize, usize), usize> = HashMap::new();
        let mut dead = None;
        let root = self.approx_state(0, n, &mut out, &mut memo, &mut dead);
        Self::trimmed(&out, root)
    }

    fn approx_state(
        &self,
        state: usize,
        depth: usize,
        out: &mut Vec<StateDef>,
        memo: &mut HashMap<(usize, usize), usize>,
        dead: &mut Option<usize>,
    ) -> usize {
        let def = &self.states[state];
        if depth == 0 || *def == StateDef::Dead {
            return *dead.get_or_insert_with(|| {
                out.push(StateDef::Dead);
                out.len() - 1
            });
        }
        if let Some(&i) = memo.get(&(state, depth)) {
            return i;
        }
        let made = match def {
            StateDef::Test { action, yes, no } => {
                let y = self.approx_state(*yes, depth - 1, out, memo, dead);
                let n = self.approx_state(*no, depth - 1, out, memo, dead);
                StateDef::Test { action: action.clone(), yes: y, no: n }
            }
            other => other.clone(),
        };
        out.push(made);
        let i = out.len() - 1;
        memo.insert((state, depth), i);
        i
    }

    /// True iff no state reachable from the entry reaches itself.
    pub fn is_finite(&self) -> bool {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut mark = vec![0u8; self.states.len()];
        let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
        mark[0] = 1;
        while let Some(&mut (s, ref mut child)) = stack.last_mut() {
            let succ = match &self.states[s] {
                StateDef::Test { yes, no, .. } => [Some(*yes), Some(*no)],
                _ => [None, None],
            };
            if *child < 2 {
                let c = succ[*child];
                *child += 1;
                if let Some(t) = c {
                    match mark[t] {
                        1 => return false,
                        0 => {
                            mark[t] = 1;
                            stack.push((t, 0));
                        }
                        _ => {}
                    }
                }
            } else {
                mark[s] = 2;
                stack.pop();
            }
        }
        true
    }

    /// Res(P): every state reachable from the entry, including the entry.
    pub fn residuals(&self) -> HashSet<usize> {
        (0..self.states.len()).collect()
    }

    /// The threads reached by exactly `n` replies, with multiplicity.
    pub fn n_residuals(&self, n: usize) -> Vec<ThreadSpec> {
        let mut level = vec![0usize];
        for _ in 0..n {
            level = level
                .iter()
                .flat_map(|&s| match &self.states[s] {
                    StateDef::Test { yes, no, .. } => vec![*yes, *no],
                    _ => Vec::new(),
                })
                .collect();
        }
        level.into_iter().map(|s| self.at(s)).collect()
    }

    /// Canonical minimal specification bisimilar to `self`.
    pub fn minimize(&self) -> ThreadSpec {
        let blocks = refine(&self.states);
        let count = blocks.iter().max().map_or(0, |m| m + 1);
        let mut rep: Vec<Option<usize>> = vec![None; count];
        for (s, &b) in blocks.iter().enumerate() {
            rep[b].get_or_insert(s);
        }
        let quotient: Vec<StateDef> = rep
            .iter()
            .map(|r| match &self.states[r.expect("every block has a member")] {
                StateDef::Test { action, yes, no } => StateDef::Test {
                    action: action.clone(),
                    yes: blocks[*yes],
                    no: blocks[*no],
                },
                other => other.clone(),
            })
            .collect();
        Self::trimmed(&quotient, blocks[0])
    }

    pub fn bisimilar(&self, other: &ThreadSpec) -> bool {
        let off = self.states.len();
        let mut all = self.states.clone();
        all.extend(other.states.iter().map(|s| s.shifted(off)));
        let blocks = refine(&all);
        blocks[0] == blocks[off]
    }

    /// Shortest reply sequence after which the two threads differ, if any.
    pub fn distinguish(&self, other: &ThreadSpec) -> Option<Distinction> {
        let mut prev: HashMap<(usize, usize), Option<((usize, usize), bool)>> = HashMap::new();
        let mut queue = VecDeque::from([(0usize, 0usize)]);
        prev.insert((0, 0), None);
        while let Some((a, b)) = queue.pop_front() {
            let (sa, sb) = (&self.states[a], &other.states[b]);
            let next = match (sa, sb) {
                (StateDef::Halt, StateDef::Halt) | (StateDef::Dead, StateDef::Dead) => None,
                (
                    StateDef::Test { action: x, yes: ya, no: na },
                    StateDef::Test { action: y, yes: yb, no: nb },
                ) if x == y => Some([((*ya, *yb), true), ((*na, *nb), false)]),
                _ => {
                    let mut replies = Vec::new();
                    let mut cur = (a, b);
                    while let Some(Some((p, reply))) = prev.get(&cur) {
                        let action = match &self.states[p.0] {
                            StateDef::Test { action, .. } => action.clone(),
                            _ => unreachable!("only tests have successors"),
                        };
                        replies.push((action, *reply));
                        cur = *p;
                    }
                    replies.reverse();
                    return Some(Distinction {
                        replies,
                        left: sa.head(),
                        right: sb.head(),
                    });
                }
            };
            for (pair, reply) in next.into_iter().flatten() {
                if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(pair) {
                    e.insert(Some(((a, b), reply)));
                    queue.push_back(pair);
                }
            }
        }
        None
    }

    /// True iff π_n(P) = aⁿ∘D, the 2ⁿ n-residuals are pairwise distinct, and
    /// none of them equals an m-residual for any m < n.
    pub fn has_a_plus_n_property(&self, action: &Action, n: usize) -> bool {
        let target = action_power(action, n, &ThreadSpec::dead());
        if !self.approximate(n).bisimilar(&target) {
            return false;
        }
        let deepest = self.n_residuals(n);
        if deepest.len() != 1 << n {
            return false;
        }
        for (i, p) in deepest.iter().enumerate() {
            if deepest[i + 1..].iter().any(|q| p.bisimilar(q)) {
                return false;
            }
        }
        (0..n).all(|m| {
            self.n_residuals(m)
                .iter()
                .all(|q| deepest.iter().all(|p| !p.bisimilar(q)))
        })
    }
}

/// `aⁿ∘tail`.
pub fn action_power(action: &Action, n: usize, tail: &ThreadSpec) -> ThreadSpec {
    (0..n).fold(tail.clone(), |acc, _| ThreadSpec::prefix(action.clone(), &acc))
}

/// Witness that two threads are not bisimilar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distinction {
    /// Actions performed and replies received before the threads diverge.
    pub replies: Vec<(Action, bool)>,
    pub left: String,
    pub right: String,
}

impl StateDef {
    fn shifted(&self, off: usize) -> StateDef {
        match self {
            StateDef::Test { action, yes, no } => StateDef::Test {
                action: action.clone(),
                yes: yes + off,
                no: no + off,
            },
            other => other.clone(),
        }
    }

    fn head(&self) -> String {
        match self {
            StateDef::Halt => "S".into(),
            StateDef::Dead => "D".into(),
            StateDef::Test { action, .. } => action.to_string(),
        }
    }
}

/// Coarsest bisimulation partition; returns a block id per state.
fn refine(states: &[StateDef]) -> Vec<usize> {
    let mut ids: HashMap<(u8, Option<&Action>), usize> = HashMap::new();
    let mut blocks: Vec<usize> = states
        .iter()
        .map(|s| {
            let key = match s {
                StateDef::Halt => (0, None),
                StateDef::Dead => (1, None),
                StateDef::Test { action, .. } => (2, Some(action)),
            };
            let fresh = ids.len();
            *ids.entry(key).or_insert(fresh)
        })
        .collect();
    let mut count = ids.len();
    loop {
        let mut sig: HashMap<(usize, usize, usize), usize> = HashMap::new();
        let next: Vec<usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let key = match s {
                    StateDef::Test { yes, no, .. } => (blocks[i], blocks[*yes], blocks[*no]),
                    _ => (blocks[i], usize::MAX, usize::MAX),
                };
                let fresh = sig.len();
                *sig.entry(key).or_insert(fresh)
            })
            .collect();
        let new_count = sig.len();
        blocks = next;
        if new_count == count {
            return blocks;
        }
        count = new_count;
    }
}

impl fmt::Display for ThreadSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.states.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            match s {
                StateDef::Halt => write!(f, "P{i} = S")?,
                StateDef::Dead => write!(f, "P{i} = D")?,
                StateDef::Test { action, yes, no } if yes == no => {
                    write!(f, "P{i} = {action} . P{yes}")?
                }
                StateDef::Test { action, yes, no } => {
                    write!(f, "P{i} = {action} ? P{yes} : P{no}")?
                }
            }
        }
        Ok(())
    }
}

impl FromStr for ThreadSpec {
    type Err = ParseError;

    fn from_str(src: &str) -> Result<Self, Self::Err> {
        enum Raw {
            Halt,
            Dead,
            Test(Action, (usize, usize, usize), (usize, usize, usize)),
        }
        let mut defs: Vec<(usize, Raw)> = Vec::new();
        let mut seen: HashMap<usize, usize> = HashMap::new();
        for item in crate::text::split_items(src, &[';', '\n']) {
            let body = item.text.trim();
            if body.is_empty() {
                continue;
            }
            let at = item.locate(src, body);
            let (lhs, rhs) = body
                .split_once('=')
                .ok_or_else(|| at.error("expected `P<i> = <definition>`"))?;
            let name = parse_state_name(lhs.trim()).ok_or_else(|| at.error("bad state name"))?;
            if seen.insert(name, defs.len()).is_some() {
                return Err(at.error(format!("state P{name} defined twice")));
            }
            let rhs = rhs.trim();
            let here = (name, at.line, at.column);
            let raw = match rhs {
                "S" => Raw::Halt,
                "D" => Raw::Dead,
                _ => {
                    if let Some((a, rest)) = rhs.split_once('?') {
                        let (y, n) = rest
                            .split_once(':')
                            .ok_or_else(|| at.error("expected `a ? Pj : Pk`"))?;
                        let action = Action::new(a.trim()).map_err(|e| at.error(e.to_string()))?;
                        let y = parse_state_name(y.trim()).ok_or_else(|| at.error("bad state name"))?;
                        let n = parse_state_name(n.trim()).ok_or_else(|| at.error("bad state name"))?;
                        Raw::Test(action, (y, here.1, here.2), (n, here.1, here.2))
                    } else if let Some((a, rest)) = rhs.split_once('.') {
                        let action = Action::new(a.trim()).map_err(|e| at.error(e.to_string()))?;
                        let t = parse_state_name(rest.trim()).ok_or_else(|| at.error("bad state name"))?;
                        Raw::Test(action, (t, here.1, here.2), (t, here.1, here.2))
                    } else {
                        return Err(at.error(format!("unrecognized definition `{rhs}`")));
                    }
                }
            };
            defs.push((name, raw));
        }
        let entry = *seen
            .get(&0)
            .ok_or_else(|| ParseError::new(1, 1, "entry state P0 is not defined"))?;
        let resolve = |(name, line, column): (usize, usize, usize)| {
            seen.get(&name)
                .copied()
                .ok_or_else(|| ParseError::new(line, column, format!("state P{name} is not defined")))
        };
        let mut states = Vec::with_capacity(defs.len());
        for (_, raw) in defs {
            states.push(match raw {
                Raw::Halt => StateDef::Halt,
                Raw::Dead => StateDef::Dead,
                Raw::Test(action, y, n) => StateDef::Test { action, yes: resolve(y)?, no: resolve(n)? },
            });
        }
        Ok(ThreadSpec::trimmed(&states, entry))
    }
}

fn parse_state_name(s: &str) -> Option<usize> {
    let digits = s.strip_prefix('P')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Action {
        Action::new("a").unwrap()
    }

    fn spec(s: &str) -> ThreadSpec {
        s.parse().unwrap()
    }

    #[test]
    fn action_names() {
        assert!(Action::new("a_1").is_ok());
        assert!(Action::new("1a").is_err());
        assert!(Action::new("").is_err());
        assert!(Action::new("A").is_err());
    }

    #[test]
    fn approximation_of_loop() {
        let p = ThreadSpec::action_loop(a());
        assert_eq!(p.approximate(0), ThreadSpec::dead());
        let two = action_power(&a(), 2, &ThreadSpec::dead());
        assert_eq!(p.approximate(2), two);
        assert!(p.approximate(2).is_finite());
    }

    #[test]
    fn approximation_cuts_children() {
        let p = ThreadSpec::test(Action::new("b").unwrap(), &ThreadSpec::halt(), &ThreadSpec::dead());
        let expect = ThreadSpec::prefix(Action::new("b").unwrap(), &ThreadSpec::dead());
        assert!(p.approximate(1).bisimilar(&expect));
    }

    #[test]
    fn bisimilarity_examples() {
        assert!(ThreadSpec::dead().bisimilar(&ThreadSpec::dead()));
        let one = ThreadSpec::action_loop(a());
        let two = spec("P0 = a . P1; P1 = a . P0");
        assert!(one.bisimilar(&two));
        let ad = ThreadSpec::prefix(a(), &ThreadSpec::dead());
        let as_ = ThreadSpec::prefix(a(), &ThreadSpec::halt());
        assert!(!ad.bisimilar(&as_));
    }

    #[test]
    fn minimize_examples() {
        let two = spec("P0 = a . P1; P1 = a . P0");
        assert_eq!(two.minimize(), ThreadSpec::action_loop(a()));
        assert_eq!(ThreadSpec::dead().minimize().len(), 1);
        let unreachable = ThreadSpec::new(vec![StateDef::Halt, StateDef::Dead], 0).unwrap();
        assert_eq!(unreachable.len(), 1);
    }

    #[test]
    fn residual_examples() {
        assert_eq!(ThreadSpec::dead().residuals().len(), 1);
        assert_eq!(ThreadSpec::action_loop(a()).residuals().len(), 1);
        let t = ThreadSpec::test(a(), &ThreadSpec::halt(), &ThreadSpec::dead());
        assert_eq!(t.residuals().len(), 3);
        let r = t.n_residuals(1);
        assert_eq!(r, vec![ThreadSpec::halt(), ThreadSpec::dead()]);
        assert_eq!(t.n_residuals(0), vec![t.clone()]);
        assert!(t.n_residuals(2).is_empty());
    }

    #[test]
    fn a_plus_n_negative_cases() {
        let ad = ThreadSpec::prefix(a(), &ThreadSpec::dead());
        assert!(!ad.has_a_plus_n_property(&a(), 1));
        assert!(!ThreadSpec::dead().has_a_plus_n_property(&a(), 1));
    }

    #[test]
    fn action_power_examples() {
        let p = action_power(&a(), 3, &ThreadSpec::halt());
        assert_eq!(p.to_string(), "P0 = a . P1\nP1 = a . P2\nP2 = a . P3\nP3 = S");
        let q = action_power(&a(), 5, &ThreadSpec::dead()).approximate(2);
        assert_eq!(q, action_power(&a(), 2, &ThreadSpec::dead()));
    }

    #[test]
    fn text_round_trip() {
        let s = spec("P0 = a ? P1 : P2\nP1 = S\nP2 = b . P0");
        assert_eq!(s.to_string().parse::<ThreadSpec>().unwrap(), s);
        assert!("P1 = S".parse::<ThreadSpec>().is_err());
        assert!("P0 = a ? P3 : P0".parse::<ThreadSpec>().is_err());
        let err = "P0 = S\nP1 = ?".parse::<ThreadSpec>().unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn distinguishing_trace() {
        let x = spec("P0 = a ? P1 : P2; P1 = S; P2 = D");
        let y = spec("P0 = a ? P1 : P2; P1 = S; P2 = S");
        let d = x.distinguish(&y).unwrap();
        assert_eq!(d.replies, vec![(a(), false)]);
        assert_eq!((d.left.as_str(), d.right.as_str()), ("D", "S"));
        assert!(x.distinguish(&x.clone()).is_none());
    }
}
