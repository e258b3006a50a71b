//! Finite cycle sets, permutation braces, endocabling deformations and a
//! finite-domain search for cycle-set tables.
//!
//! Elements are 0-indexed. Permutations compose right to left:
//! `(p ∘ q)(x) = p(q(x))`. For a cycle set, `sigma_x` is row `x` of the table
//! and `lambda_x = sigma_x^-1`, so `x * y = lambda_x^-1(y)`.

pub mod arith;
pub mod brace;
pub mod cycleset;
pub mod endocable;
pub mod error;
pub mod par;
pub mod perm;
pub mod report;
pub mod search;

pub use brace::{Brace, BraceSubset, SubsetKind};
pub use cycleset::{CycleSet, CycleSetHom, IsoInvariant, Mpl};
pub use endocable::LambdaEndo;
pub use error::{Error, Result};
pub use perm::{AffineMap, PermGroup, Permutation};
pub use report::Report;
