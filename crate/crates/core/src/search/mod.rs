//! Constraint models for cycle-set tables, a native backtracking solver and
//! the exhaustive enumeration and theorem-verification drivers built on it.

pub mod enumerate;
pub mod model;
pub mod solver;
pub mod theorem;

pub use enumerate::enumerate_cyclesets;
pub use model::{appendix_model, build_model, Diagonal, ModelSpec, SearchModel, MAX_N};
pub use solver::{solve, solve_with, Budget, Mode, SearchOutcome, SolveOptions, Stats, Status};
pub use theorem::{verify_theorem, wlog_relabel_check, Theorem, TheoremOptions, TheoremOutcome};
