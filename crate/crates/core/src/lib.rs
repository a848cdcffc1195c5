//! Instruction sequence algebras PGA, C and Cg.
//!
//! Programs in each formalism are parsed from text, their behavior is extracted
//! as a regular thread ([`thread::ThreadSpec`]), and behaviors are compared by
//! bisimulation. The crate also provides the normal forms, endomorphisms and
//! cross-formalism translations between the three formalisms.

pub mod c;
pub mod cg;
pub mod expressiveness;
pub mod machine;
pub mod pga;
pub mod text;
pub mod thread;
pub mod translate;

pub use c::{CInSeq, CInstr, Dir};
pub use cg::{CgInSeq, CgInstr};
pub use pga::{PgaInstr, PgaTerm};
pub use text::ParseError;
pub use thread::{Action, StateDef, ThreadSpec};
