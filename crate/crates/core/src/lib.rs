//! Closed-form geometry of spherically symmetric Finsler metrics
//! `F = |y| φ(|x|², ⟨x,y⟩/|y|, ⟨a,x⟩, ⟨a,y⟩/|y|)` together with independent
//! automatic-differentiation references for every tensor.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// Negated comparisons reject NaN on purpose; index loops mirror the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

// `Float` supplies the float methods unless std is linked somewhere in the
// build, which is why its imports carry `allow(unused_imports)`.
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cartan;
pub mod error;
mod expansion;
pub mod invariants;
pub mod landsberg;
pub mod linalg;
pub mod metric;
pub mod phi;
pub mod spray;
pub mod taylor;
pub mod tensor;

pub use error::{Error, Result};
pub use invariants::{compute_invariants, realize_invariants, EvalPoint, InvariantPoint, Invariants};
pub use phi::{catalog, fd_self_check, phi_jet, DerivativeMode, ModelKind, PhiJet, PhiModel};
pub use tensor::{AntiSym2, SymTensor2, SymTensor3};
