//! The net language: expression trees over `ε`, their parser and printer,
//! normalization, growth analysis, derivatives and evaluation.

pub mod diff;
pub mod dominance;
pub mod eval;
pub mod expr;
pub mod growth;
pub mod limit;
pub mod normal;
pub mod parse;
pub mod print;
pub mod schedule;

pub use diff::{derive, derive_n, DiffError};
pub use eval::{eval, eval_big, eval_f64, Env, EvalError, Scalar};
pub use expr::{q, qr, BinaryOp, ConvolveNode, Expr, HybridNet, PrimitiveNode, UnaryOp, Var};
pub use growth::{fragment_terms, growth_key, magnitude, Growth, GrowthKey, Mag};
pub use normal::{instantiate, normalize, substitute, substitute_var};
pub use parse::{parse, parse_with, ParseError, ParseOptions};
pub use limit::{limit_at_zero, ExtLimit, Side};
pub use schedule::{SamplingSchedule, ScheduleError};
pub use dominance::{compare_nets, dominant_term, Dominant, Rel};
