//! Position-level execution shared by every formalism.
//!
//! A [`Machine`] describes one execution step at each integer position. Thread
//! extraction resolves chains of control transfers (jumps, labels, gotos) with
//! cycle detection, so a transfer loop that never yields an action becomes `D`.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::thread::{Action, StateDef, ThreadSpec};

/// What a single position does when control arrives there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Transition {
    Halt,
    Dead,
    /// Continue at another position without performing an action.
    Transfer(i64),
    /// Perform `action`, then continue at `yes` or `no` depending on the reply.
    Emit { action: Action, yes: i64, no: i64 },
}

pub trait Machine {
    /// Number of in-range positions; positions are `1..=len`.
    fn len(&self) -> usize;

    /// The step taken at an in-range position.
    fn step(&self, pos: i64) -> Transition;

    fn in_range(&self, pos: i64) -> bool {
        pos >= 1 && pos <= self.len() as i64
    }

    fn transition(&self, pos: i64) -> Transition {
        if self.in_range(pos) {
            self.step(pos)
        } else {
            Transition::Dead
        }
    }

    fn successors(&self, pos: i64) -> Vec<i64> {
        if !self.in_range(pos) {
            return Vec::new();
        }
        match self.step(pos) {
            Transition::Halt | Transition::Dead => Vec::new(),
            Transition::Transfer(t) => vec![t],
            Transition::Emit { yes, no, .. } if yes == no => vec![yes],
            Transition::Emit { yes, no, .. } => vec![yes, no],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Resolved {
    Halt,
    Dead,
    Emit(i64),
}

fn resolve<M: Machine + ?Sized>(m: &M, start: i64, memo: &mut HashMap<i64, Resolved>) -> Resolved {
    let mut path = Vec::new();
    let mut on_path = HashSet::new();
    let mut pos = start;
    let result = loop {
        if let Some(&r) = memo.get(&pos) {
            break r;
        }
        if !on_path.insert(pos) {
            break Resolved::Dead;
        }
        path.push(pos);
        match m.transition(pos) {
            Transition::Halt => break Resolved::Halt,
            Transition::Dead => break Resolved::Dead,
            Transition::Emit { .. } => break Resolved::Emit(pos),
            Transition::Transfer(t) => pos = t,
        }
    };
    for p in path {
        memo.insert(p, result);
    }
    result
}

/// The thread produced by starting execution at `start`.
pub fn behavior_at<M: Machine + ?Sized>(m: &M, start: i64) -> ThreadSpec {
    let mut memo = HashMap::new();
    let mut index: HashMap<Resolved, usize> = HashMap::new();
    let mut states: Vec<Option<StateDef>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |r: Resolved, states: &mut Vec<Option<StateDef>>, queue: &mut VecDeque<Resolved>| {
        *index.entry(r).or_insert_with(|| {
            states.push(match r {
                Resolved::Halt => Some(StateDef::Halt),
                Resolved::Dead => Some(StateDef::Dead),
                Resolved::Emit(_) => {
                    queue.push_back(r);
                    None
                }
            });
            states.len() - 1
        })
    };
    let root = resolve(m, start, &mut memo);
    let entry = intern(root, &mut states, &mut queue);
    while let Some(r) = queue.pop_front() {
        let Resolved::Emit(pos) = r else { unreachable!() };
        let Transition::Emit { action, yes, no } = m.transition(pos) else { unreachable!() };
        let y = resolve(m, yes, &mut memo);
        let n = resolve(m, no, &mut memo);
        let y = intern(y, &mut states, &mut queue);
        let n = intern(n, &mut states, &mut queue);
        let me = intern(r, &mut states, &mut queue);
        states[me] = Some(StateDef::Test { action, yes: y, no: n });
    }
    let states = states.into_iter().map(|s| s.expect("every emit state is filled")).collect();
    ThreadSpec::new(states, entry).expect("extraction builds valid indices")
}

/// The accessibility relation: one execution step from each in-range position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionGraph {
    pub len: usize,
    pub edges: BTreeSet<(i64, i64)>,
}

impl PositionGraph {
    pub fn of<M: Machine + ?Sized>(m: &M) -> Self {
        let edges = (1..=m.len() as i64)
            .flat_map(|i| m.successors(i).into_iter().map(move |j| (i, j)))
            .collect();
        PositionGraph { len: m.len(), edges }
    }

    pub fn in_range(&self, pos: i64) -> bool {
        pos >= 1 && pos <= self.len as i64
    }
}

/// Positions reachable from `start`, including itself and any out-of-range
/// positions that control can reach.
pub fn reachable<M: Machine + ?Sized>(m: &M, start: i64) -> BTreeSet<i64> {
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(p) = stack.pop() {
        for q in m.successors(p) {
            if seen.insert(q) {
                stack.push(q);
            }
        }
    }
    seen
}

/// In-range positions with a step leading out of range.
pub fn exits<M: Machine + ?Sized>(m: &M) -> BTreeSet<i64> {
    (1..=m.len() as i64)
        .filter(|&i| m.successors(i).iter().any(|&j| !m.in_range(j)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Table(Vec<Transition>);

    impl Machine for Table {
        fn len(&self) -> usize {
            self.0.len()
        }
        fn step(&self, pos: i64) -> Transition {
            self.0[pos as usize - 1].clone()
        }
    }

    #[test]
    fn transfer_cycle_is_dead() {
        let m = Table(vec![Transition::Transfer(2), Transition::Transfer(1)]);
        assert_eq!(behavior_at(&m, 1), ThreadSpec::dead());
        assert_eq!(behavior_at(&m, 7), ThreadSpec::dead());
    }

    #[test]
    fn emit_loop() {
        let a = Action::new("a").unwrap();
        let m = Table(vec![
            Transition::Emit { action: a.clone(), yes: 2, no: 2 },
            Transition::Transfer(1),
        ]);
        assert_eq!(behavior_at(&m, 2), ThreadSpec::action_loop(a));
        assert_eq!(reachable(&m, 1), BTreeSet::from([1, 2]));
        assert!(exits(&m).is_empty());
    }
}
