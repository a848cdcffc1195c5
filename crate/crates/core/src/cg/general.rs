//! Homomorphisms between the standard semantics and the semantics in which a
//! goto accepts labels of either direction.

use super::rel::{block, rel_k};
use super::{CgInSeq, CgInstr};
use crate::c::Dir;

/// Output length per input instruction of [`from_general_uniform`].
pub const UNIFORM_FACTOR: usize = 16;

/// Makes label numbers even for forward and odd for backward instructions,
/// so `general_behavior_at(i, f(X))` equals `behavior_at(i, X)`.
pub fn to_directional(x: &CgInSeq) -> CgInSeq {
    x.relabel(|p, l| match x.inst(p as i64).and_then(CgInstr::dir) {
        Some(Dir::Fwd) => 2 * l,
        _ => 2 * l + 1,
    })
}

/// Output of [`from_general`] together with a position witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralTranslation {
    pub program: CgInSeq,
    /// `witness[i]` is a position of `program` whose standard behavior equals
    /// the general behavior of the input at `i`, for `i` in `0..=len + 1`.
    pub witness: Vec<i64>,
}

impl GeneralTranslation {
    pub fn position(&self, i: i64) -> i64 {
        match usize::try_from(i) {
            Ok(i) if i < self.witness.len() => self.witness[i],
            _ => 0,
        }
    }
}

/// Label `l > 2` mimicking a label that accepts gotos from both directions.
fn both_ways(u: &CgInstr) -> Option<Vec<CgInstr>> {
    match u {
        CgInstr::Label(Dir::Fwd, l) if *l > 2 => {
            Some(vec![CgInstr::Goto(Dir::Fwd, *l), CgInstr::Label(Dir::Bwd, *l), CgInstr::Label(Dir::Fwd, *l)])
        }
        CgInstr::Label(Dir::Bwd, l) if *l > 2 => {
            Some(vec![CgInstr::Label(Dir::Bwd, *l), CgInstr::Label(Dir::Fwd, *l), CgInstr::Goto(Dir::Bwd, *l)])
        }
        _ => None,
    }
}

/// `φ ∘ rel_2 ∘ free⟨0,1,2⟩`.
pub fn from_general(x: &CgInSeq) -> GeneralTranslation {
    let freed = x.free_seq(&[0, 1, 2]);
    let rel = rel_k(&freed, 2).expect("k = 2");
    let program = rel.expand(|u| both_ways(u).unwrap_or_else(|| vec![u.clone()]));
    let mut witness = vec![0];
    let mut start = 1i64;
    for u in freed.instrs() {
        witness.push(start);
        start += block(u, 2, |v| both_ways(v).unwrap_or_else(|| vec![v.clone()])).len() as i64;
    }
    witness.push(0);
    GeneralTranslation { program, witness }
}

/// Like [`from_general`] but every embedded instruction is padded to three
/// instructions, giving blocks of [`UNIFORM_FACTOR`] instructions. Forward
/// steps are continued by the gadget gotos that follow them.
pub fn from_general_uniform(x: &CgInSeq) -> CgInSeq {
    let freed = x.free_seq(&[0, 1, 2]);
    freed.expand(|u| {
        block(u, 2, |v| {
            both_ways(v).unwrap_or_else(|| {
                if v.is_backward() {
                    vec![CgInstr::Goto(Dir::Bwd, 2), CgInstr::Goto(Dir::Bwd, 1), v.clone()]
                } else {
                    vec![v.clone(), CgInstr::Goto(Dir::Fwd, 1), CgInstr::Goto(Dir::Fwd, 2)]
                }
            })
        })
    })
}
