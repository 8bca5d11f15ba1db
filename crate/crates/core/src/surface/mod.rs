//! The ML-like surface language: lexing, parsing, desugaring and the
//! prelude of primitives.

pub mod desugar;
pub mod lexer;
pub mod parser;
pub mod prelude;
pub mod syntax;

use alloc::string::String;

pub use desugar::{desugar, desugar_expr, desugar_program, desugar_type, Aliases, DesugarError, DesugaredProgram, ValDecl};
pub use lexer::Pos;
pub use parser::{parse_program, parse_surface_expr, parse_surface_type, parse_target};
pub use prelude::{load_prelude, Prelude};
pub use syntax::{Decl, Program, SurfaceExpr, SurfaceExprKind, SurfaceType};

use crate::ast::{Expr, SourceType};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

impl ParseError {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        ParseError { pos, message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SurfaceError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Desugar(#[from] DesugarError),
}

impl SurfaceError {
    pub fn pos(&self) -> Pos {
        match self {
            SurfaceError::Parse(e) => e.pos,
            SurfaceError::Desugar(DesugarError::UnknownTypeAlias { pos, .. })
            | SurfaceError::Desugar(DesugarError::DuplicateDeclaration { pos, .. }) => *pos,
        }
    }
}

/// Parses and desugars a standalone expression, with prelude names resolved
/// to primitives when `prelude` is set.
pub fn read_expr(src: &str, prelude: bool) -> Result<Expr, SurfaceError> {
    let e = parse_surface_expr(src)?;
    Ok(desugar_expr(&e, &Aliases::new(), &[], prelude)?)
}

pub fn read_type(src: &str) -> Result<SourceType, SurfaceError> {
    let t = parse_surface_type(src)?;
    Ok(desugar_type(&t, &Aliases::new())?)
}

pub fn read_program(src: &str, prelude: bool) -> Result<DesugaredProgram, SurfaceError> {
    let p = parse_program(src)?;
    Ok(desugar_program(&p, prelude)?)
}
