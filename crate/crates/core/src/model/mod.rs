//! Structural equation models over finite ranges.

mod causal;
mod expr;
mod graph;
mod query;
mod signature;
mod value;

pub use causal::{Assignment, CausalModel, Context, Intervention};
pub use expr::Expr;
pub use graph::{DependencyGraph, GraphMode};
pub use query::{CausalQuery, CompiledFormula, Formula};
pub use signature::Signature;
pub use value::{Range, Value};

/// Type-checks one equation against the full signature without building a model.
pub(crate) fn check_equation(
    sig: &Signature,
    target: usize,
    e: &Expr,
) -> Result<(), crate::ValidationError> {
    expr::compile_equation(sig, target, e).map(|_| ())
}
