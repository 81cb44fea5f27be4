//! Symbolic-numeric solution of second-kind Volterra integral equations with
//! separable kernels.
//!
//! An equation `y(t) = phi(t) + f(t) * int_a^t k(s, y(s)) ds` is parsed from a small
//! text DSL, rewritten into a polynomial system by introducing auxiliary
//! variables, and solved by Picard iteration over truncated power series in
//! `t - a`. An independent trapezoid-rule solver is included for cross-checks.

pub mod coeff;
pub mod expr;
pub mod oracle;
pub mod picard;
pub mod poly;
pub mod polynomialize;
pub mod series;

pub use coeff::{Backend, CoeffError, Coefficient, Func};
pub use expr::{Equation, Expr, KernelTerm, Var};
pub use picard::{IterationState, SolveMode, SolveReport};
pub use poly::{Polynomial, SysVar};
pub use polynomialize::{assemble, AugmentedSystem, AuxVariable, PolyConfig, PolyError, PolyRule};
pub use series::Series;
