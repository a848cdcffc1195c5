//! Random program generators and independent oracles shared by the
//! integration tests.

#![allow(dead_code)]

use inseq::pga::PgaExpr;
use inseq::{Action, CInSeq, CInstr, CgInSeq, CgInstr, Dir, PgaInstr, PgaTerm, StateDef, ThreadSpec};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn action(i: usize) -> Action {
    Action::new(["a", "b", "c"][i]).unwrap()
}

fn dir(rng: &mut impl Rng) -> Dir {
    if rng.gen() {
        Dir::Fwd
    } else {
        Dir::Bwd
    }
}

pub fn rand_c_instr(rng: &mut impl Rng, actions: usize, max_counter: usize) -> CInstr {
    let a = action(rng.gen_range(0..actions));
    match rng.gen_range(0..10) {
        0 | 1 => CInstr::Basic(dir(rng), a),
        2 | 3 => CInstr::Pos(dir(rng), a),
        4 => CInstr::Neg(dir(rng), a),
        5..=7 => CInstr::Jump(dir(rng), rng.gen_range(1..=max_counter)),
        8 => CInstr::Abort,
        _ => CInstr::Halt,
    }
}

/// Length `1..=max_len`, up to three actions, counters up to `max_counter`.
pub fn rand_c(rng: &mut impl Rng, max_len: usize, max_counter: usize) -> CInSeq {
    let len = rng.gen_range(1..=max_len);
    CInSeq::new((0..len).map(|_| rand_c_instr(rng, 3, max_counter)).collect()).unwrap()
}

pub fn rand_cg_instr(rng: &mut impl Rng, actions: usize, max_label: usize) -> CgInstr {
    let a = action(rng.gen_range(0..actions));
    match rng.gen_range(0..12) {
        0 | 1 => CgInstr::Basic(dir(rng), a),
        2 | 3 => CgInstr::Pos(dir(rng), a),
        4 => CgInstr::Neg(dir(rng), a),
        5..=7 => CgInstr::Label(dir(rng), rng.gen_range(0..=max_label)),
        8..=10 => CgInstr::Goto(dir(rng), rng.gen_range(0..=max_label)),
        _ => {
            if rng.gen() {
                CgInstr::Abort
            } else {
                CgInstr::Halt
            }
        }
    }
}

pub fn rand_cg(rng: &mut impl Rng, max_len: usize, max_label: usize) -> CgInSeq {
    let len = rng.gen_range(1..=max_len);
    CgInSeq::new((0..len).map(|_| rand_cg_instr(rng, 3, max_label)).collect()).unwrap()
}

pub fn rand_pga_instr(rng: &mut impl Rng, max_counter: usize) -> PgaInstr {
    let a = action(rng.gen_range(0..3));
    match rng.gen_range(0..9) {
        0 | 1 => PgaInstr::Basic(a),
        2 | 3 => PgaInstr::Pos(a),
        4 => PgaInstr::Neg(a),
        5..=7 => PgaInstr::Jump(rng.gen_range(0..=max_counter)),
        _ => PgaInstr::Halt,
    }
}

/// Prefix up to 8 instructions, repeating part up to 6 (possibly none).
pub fn rand_pga(rng: &mut impl Rng) -> PgaTerm {
    loop {
        let n = rng.gen_range(0..=8);
        let m = if rng.gen_range(0..4) == 0 { 0 } else { rng.gen_range(1..=6) };
        let prefix = (0..n).map(|_| rand_pga_instr(rng, 6)).collect();
        let repeat = (0..m).map(|_| rand_pga_instr(rng, 6)).collect();
        if let Ok(t) = PgaTerm::new(prefix, repeat) {
            return t;
        }
    }
}

/// A nested parse tree of bounded depth.
pub fn rand_pga_expr(rng: &mut impl Rng, depth: usize) -> PgaExpr {
    if depth == 0 || rng.gen_range(0..3) == 0 {
        return PgaExpr::Instr(rand_pga_instr(rng, 5));
    }
    if rng.gen_range(0..3) == 0 {
        PgaExpr::Repeat(Box::new(rand_pga_expr(rng, depth - 1)))
    } else {
        let parts = rng.gen_range(2..=4);
        PgaExpr::Concat((0..parts).map(|_| rand_pga_expr(rng, depth - 1)).collect())
    }
}

/// A regular thread with up to `max_states` states over two actions.
pub fn rand_spec(rng: &mut impl Rng, max_states: usize) -> ThreadSpec {
    let n = rng.gen_range(1..=max_states);
    let states = (0..n)
        .map(|_| match rng.gen_range(0..6) {
            0 => StateDef::Halt,
            1 => StateDef::Dead,
            _ => StateDef::Test { action: action(rng.gen_range(0..2)), yes: rng.gen_range(0..n), no: rng.gen_range(0..n) },
        })
        .collect();
    ThreadSpec::new(states, 0).unwrap()
}

/// A finite thread: every test points to a later state.
pub fn rand_finite_spec(rng: &mut impl Rng, max_states: usize) -> ThreadSpec {
    let n = rng.gen_range(1..=max_states);
    let states = (0..n)
        .map(|i| {
            if i + 1 == n || rng.gen_range(0..4) == 0 {
                if rng.gen() {
                    StateDef::Halt
                } else {
                    StateDef::Dead
                }
            } else {
                StateDef::Test {
                    action: action(rng.gen_range(0..2)),
                    yes: rng.gen_range(i + 1..n),
                    no: rng.gen_range(i + 1..n),
                }
            }
        })
        .collect();
    ThreadSpec::new(states, 0).unwrap()
}

/// Proptest strategy wrapping a seeded generator.
pub fn seeded<T: std::fmt::Debug>(f: fn(&mut ChaCha8Rng) -> T) -> impl Strategy<Value = T> {
    any::<u64>().prop_map(move |seed| f(&mut rng(seed)))
}

/// A finite behavior tree: the projection of a thread to a given depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tree {
    S,
    D,
    Node(String, Box<Tree>, Box<Tree>),
}

/// Projection of a thread spec to `depth` actions, computed directly from the
/// equations.
pub fn spec_tree(p: &ThreadSpec, depth: usize) -> Tree {
    fn go(states: &[StateDef], s: usize, depth: usize) -> Tree {
        match &states[s] {
            StateDef::Halt => Tree::S,
            StateDef::Dead => Tree::D,
            _ if depth == 0 => Tree::D,
            StateDef::Test { action, yes, no } => Tree::Node(
                action.name().to_string(),
                Box::new(go(states, *yes, depth - 1)),
                Box::new(go(states, *no, depth - 1)),
            ),
        }
    }
    go(p.states(), p.entry(), depth)
}

/// Projection of the C extraction equations at position `i`, unrolled to
/// `depth` actions. A run of more than `len` consecutive jumps revisits a
/// position and never performs an action.
pub fn c_tree(x: &[CInstr], i: i64, depth: usize) -> Tree {
    let len = x.len() as i64;
    let mut i = i;
    let mut jumps = 0;
    loop {
        if i < 1 || i > len {
            return Tree::D;
        }
        match &x[(i - 1) as usize] {
            CInstr::Jump(d, k) => {
                jumps += 1;
                if jumps > len {
                    return Tree::D;
                }
                i += d.sign() * *k as i64;
            }
            CInstr::Abort => return Tree::D,
            CInstr::Halt => return Tree::S,
            _ if depth == 0 => return Tree::D,
            CInstr::Basic(d, a) => {
                let next = c_tree(x, i + d.sign(), depth - 1);
                return Tree::Node(a.name().to_string(), Box::new(next.clone()), Box::new(next));
            }
            CInstr::Pos(d, a) => {
                let s = d.sign();
                return Tree::Node(
                    a.name().to_string(),
                    Box::new(c_tree(x, i + s, depth - 1)),
                    Box::new(c_tree(x, i + 2 * s, depth - 1)),
                );
            }
            CInstr::Neg(d, a) => {
                let s = d.sign();
                return Tree::Node(
                    a.name().to_string(),
                    Box::new(c_tree(x, i + 2 * s, depth - 1)),
                    Box::new(c_tree(x, i + s, depth - 1)),
                );
            }
        }
    }
}

/// First `n` instructions of the instruction stream denoted by a nested
/// expression; `X^ω` repeats forever and absorbs whatever follows it.
pub fn expr_stream(e: &PgaExpr, n: usize) -> (Vec<PgaInstr>, bool) {
    match e {
        PgaExpr::Instr(u) => (vec![u.clone()], false),
        PgaExpr::Concat(parts) => {
            let mut out = Vec::new();
            for p in parts {
                let (s, infinite) = expr_stream(p, n);
                out.extend(s);
                if infinite || out.len() >= n {
                    out.truncate(n);
                    return (out, infinite);
                }
            }
            (out, false)
        }
        PgaExpr::Repeat(inner) => {
            let (s, infinite) = expr_stream(inner, n);
            if infinite {
                return (s, true);
            }
            (s.iter().cycle().take(n.max(s.len())).cloned().collect(), true)
        }
    }
}

/// Projection of the PGA extraction equations on a finite instruction list,
/// with control leaving the list giving `D`.
pub fn pga_tree(x: &[PgaInstr], depth: usize) -> Tree {
    fn go(x: &[PgaInstr], mut p: usize, depth: usize) -> Tree {
        loop {
            let Some(u) = x.get(p) else { return Tree::D };
            match u {
                PgaInstr::Jump(0) => return Tree::D,
                PgaInstr::Jump(k) => p += k,
                PgaInstr::Halt => return Tree::S,
                _ if depth == 0 => return Tree::D,
                PgaInstr::Basic(a) => {
                    let t = go(x, p + 1, depth - 1);
                    return Tree::Node(a.name().to_string(), Box::new(t.clone()), Box::new(t));
                }
                PgaInstr::Pos(a) => {
                    return Tree::Node(a.name().to_string(), Box::new(go(x, p + 1, depth - 1)), Box::new(go(x, p + 2, depth - 1)))
                }
                PgaInstr::Neg(a) => {
                    return Tree::Node(a.name().to_string(), Box::new(go(x, p + 2, depth - 1)), Box::new(go(x, p + 1, depth - 1)))
                }
            }
        }
    }
    go(x, 0, depth)
}

/// Flattens `X;Y^ω` into its first `n` instructions.
pub fn term_stream(t: &PgaTerm, n: usize) -> Vec<PgaInstr> {
    let mut out = t.prefix().to_vec();
    if !t.repeat().is_empty() {
        out.extend(t.repeat().iter().cycle().take(n).cloned());
    }
    out
}

/// No jump with a positive counter targets a jump, and jumps into or inside
/// the repeating part use the least counter reaching their target.
pub fn chain_free(t: &PgaTerm) -> bool {
    let (n, m) = (t.prefix().len(), t.repeat().len());
    let at = |p: usize| -> Option<&PgaInstr> {
        if p < n {
            t.prefix().get(p)
        } else if m > 0 {
            t.repeat().get((p - n) % m)
        } else {
            None
        }
    };
    (0..n + m).all(|p| match at(p) {
        Some(PgaInstr::Jump(k)) if *k > 0 => {
            let q = p + k;
            let target_is_jump = matches!(at(q), Some(PgaInstr::Jump(_)));
            let minimal = m == 0 || if p >= n { *k < m } else { q < n + m };
            !target_is_jump && minimal
        }
        _ => true,
    })
}
