//! Exact solver for small bounded integer programs: a bounded-variable
//! simplex for the relaxation and best-first branch and bound on top.
//!
//! Every run is deterministic. Open nodes are taken lowest bound first,
//! newest first among equal bounds. Branching picks the variable whose
//! fractional part is closest to one half (lowest index on ties) and explores
//! the floor child first.

mod bnb;
mod lp_format;
mod model;
mod simplex;

pub use bnb::{lp_bound, lp_solution, solve, solve_with_bound, Limits, Solution, Status};
pub use lp_format::{read_lp, write_lp};
pub use model::{Constraint, Model, Sense, Variable};
