//! Whole-program elaboration.

use alloc::vec::Vec;
use core::fmt;

use super::check::Elaborator;
use super::derivation::ElabDerivation;
use super::error::TypeError;
use crate::ast::{Expr, Name, SourceType, Term, TypingContext};
use crate::surface::{DesugaredProgram, Pos};

#[derive(Clone, Debug, PartialEq)]
pub struct ElaboratedDecl {
    pub name: Name,
    pub ty: SourceType,
    pub target: Term,
    pub derivation: ElabDerivation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElaboratedProgram {
    /// `let x1 = M1 in ... let xn = Mn in xn`, or `()` when empty.
    pub target: Term,
    pub decls: Vec<ElaboratedDecl>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProgramError {
    pub name: Name,
    pub pos: Pos,
    pub error: TypeError,
}

impl fmt::Display for ProgramError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: error: {}", self.pos, self.error)
    }
}

impl core::error::Error for ProgramError {}

/// Elaborates each declaration by synthesis, with the earlier ones in
/// context.
pub fn elaborate_program(p: &DesugaredProgram) -> Result<ElaboratedProgram, ProgramError> {
    let mut ctx = TypingContext::new();
    let mut decls = Vec::new();
    for d in &p.decls {
        let der = Elaborator::new().synth(&ctx, &d.expr).map_err(|error| ProgramError {
            name: d.name.clone(),
            pos: d.pos,
            error,
        })?;
        ctx.push(d.name.clone(), der.ty.clone());
        decls.push(ElaboratedDecl { name: d.name.clone(), ty: der.ty.clone(), target: der.target.clone(), derivation: der });
    }
    let target = match decls.last() {
        None => Term::Unit,
        Some(last) => decls
            .iter()
            .rev()
            .fold(Term::var(last.name.clone()), |acc, d| Term::let_(d.name.clone(), d.target.clone(), acc)),
    };
    Ok(ElaboratedProgram { target, decls })
}

/// Synthesizes a closed expression.
pub fn elaborate_expr(e: &Expr) -> Result<ElabDerivation, TypeError> {
    Elaborator::new().synth(&TypingContext::new(), e)
}
