//! Emulating relative jumps with labels: each instruction is embedded in a
//! block of `4k + 6` instructions whose gadget labels `0..=k` make a goto
//! numbered `l ≤ k` land `l` blocks away.

use super::{CgError, CgInSeq, CgInstr};
use crate::c::Dir;

pub fn rel_block_len(k: usize) -> usize {
    4 * k + 6
}

fn fl(l: usize) -> CgInstr {
    CgInstr::Label(Dir::Fwd, l)
}
fn bl(l: usize) -> CgInstr {
    CgInstr::Label(Dir::Bwd, l)
}
fn fg(l: usize) -> CgInstr {
    CgInstr::Goto(Dir::Fwd, l)
}
fn bg(l: usize) -> CgInstr {
    CgInstr::Goto(Dir::Bwd, l)
}

/// Labels numbered at most `k` become single-step gotos.
fn phi(u: &CgInstr, k: usize) -> CgInstr {
    match u {
        CgInstr::Label(d, l) if *l <= k => CgInstr::Goto(*d, 1),
        other => other.clone(),
    }
}

fn left(k: usize) -> Vec<CgInstr> {
    let mut out = vec![fl(1), fg(0), bl(0)];
    for l in 2..=k {
        out.push(fl(l));
        out.push(fg(l - 1));
    }
    out
}

fn right(k: usize) -> Vec<CgInstr> {
    let mut out = Vec::new();
    for l in (2..=k).rev() {
        out.push(bg(l - 1));
        out.push(bl(l));
    }
    out.extend([fl(0), bg(0), bl(1)]);
    out
}

/// Builds the block for `u` with its embedded instruction expanded by `mid`.
pub(crate) fn block(u: &CgInstr, k: usize, mid: impl Fn(&CgInstr) -> Vec<CgInstr>) -> Vec<CgInstr> {
    let v = phi(u, k);
    let mut out = left(k);
    if u.is_backward() {
        out.extend([bg(2), bg(1)]);
        out.extend(mid(&v));
        out.push(bl(0));
    } else {
        out.push(fl(0));
        out.extend(mid(&v));
        out.extend([fg(1), fg(2)]);
    }
    out.extend(right(k));
    out
}

pub fn rel_k(x: &CgInSeq, k: usize) -> Result<CgInSeq, CgError> {
    if k < 2 {
        return Err(CgError::BadK(k));
    }
    Ok(x.expand(|u| block(u, k, |v| vec![v.clone()])))
}
