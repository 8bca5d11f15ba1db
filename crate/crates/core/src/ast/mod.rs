//! Abstract syntax shared by every other module.

pub mod context;
pub mod evalctx;
pub mod expr;
pub mod names;
pub mod print;
pub mod term;
pub mod types;

pub use context::{ctx_translate, Context, TargetContext, TypingContext};
pub use evalctx::EvalContext;
pub use expr::{format_int, format_real, Expr, RealLit};
pub use names::{Label, Name};
pub use print::{print_source, print_target};
pub use term::{PrimOp, Term};
pub use types::{type_translate, BaseType, SourceType, TargetBase, TargetType};
