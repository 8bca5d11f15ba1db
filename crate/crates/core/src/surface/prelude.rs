//! Curried primitives with intersection types.
//!
//! Each primitive is a source value `Prim(name)` whose elaboration is a
//! fixed closed target term built from saturated target primitives.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::ast::{Expr, PrimOp, SourceType, Term, TypingContext};
use crate::target::delta;

pub const NAMES: [&str; 7] = ["add", "sub", "mul", "div", "toString", "cat", "print"];

#[derive(Clone, Debug, PartialEq)]
pub struct PrimEntry {
    pub name: &'static str,
    pub ty: SourceType,
    pub target: Term,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prelude {
    pub entries: Vec<PrimEntry>,
}

impl Prelude {
    pub fn get(&self, name: &str) -> Option<&PrimEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// The primitives as context bindings, for display.
    pub fn typing_context(&self) -> TypingContext {
        TypingContext::from_entries(self.entries.iter().map(|e| (String::from(e.name), e.ty.clone())).collect())
    }
}

pub fn is_prim(name: &str) -> bool {
    NAMES.contains(&name)
}

pub fn arity(name: &str) -> Option<usize> {
    match name {
        "add" | "sub" | "mul" | "div" | "cat" => Some(2),
        "toString" | "print" => Some(1),
        _ => None,
    }
}

fn binop_type(elem: SourceType) -> SourceType {
    SourceType::arrow(elem.clone(), SourceType::arrow(elem.clone(), elem))
}

fn curried(op: PrimOp) -> Term {
    match op.arity() {
        1 => Term::lam("a", Term::PrimApp(op, vec![Term::var("a")])),
        _ => Term::lam("a", Term::lam("b", Term::PrimApp(op, vec![Term::var("a"), Term::var("b")]))),
    }
}

fn int_real_ops(name: &str) -> Option<(PrimOp, PrimOp)> {
    Some(match name {
        "add" => (PrimOp::AddI, PrimOp::AddR),
        "sub" => (PrimOp::SubI, PrimOp::SubR),
        "mul" => (PrimOp::MulI, PrimOp::MulR),
        "div" => (PrimOp::DivI, PrimOp::DivR),
        _ => return None,
    })
}

/// Type of a primitive.
pub fn prim_type(name: &str) -> Option<SourceType> {
    let (int, real, string) = (SourceType::int(), SourceType::real(), SourceType::string());
    Some(match name {
        "add" | "sub" | "mul" | "div" => SourceType::intersect(binop_type(int), binop_type(real)),
        "toString" => SourceType::intersect(
            SourceType::intersect(SourceType::arrow(int, string.clone()), SourceType::arrow(real, string.clone())),
            SourceType::arrow(string.clone(), string),
        ),
        "cat" => binop_type(string),
        "print" => SourceType::arrow(string, SourceType::Base(crate::ast::BaseType::Unit)),
        _ => return None,
    })
}

/// Elaboration of a primitive, a closed target value of the translated type.
pub fn prim_target(name: &str) -> Option<Term> {
    if let Some((i, r)) = int_real_ops(name) {
        return Some(Term::pair(curried(i), curried(r)));
    }
    Some(match name {
        "toString" => Term::pair(
            Term::pair(curried(PrimOp::IntToString), curried(PrimOp::RealToString)),
            Term::lam("a", Term::var("a")),
        ),
        "cat" => curried(PrimOp::Cat),
        "print" => curried(PrimOp::Print),
        _ => return None,
    })
}

pub fn load_prelude() -> Prelude {
    let entries = NAMES
        .iter()
        .map(|&name| PrimEntry {
            name,
            ty: prim_type(name).expect("prelude name"),
            target: prim_target(name).expect("prelude name"),
        })
        .collect();
    Prelude { entries }
}

fn to_term(e: &Expr) -> Option<Term> {
    Some(match e {
        Expr::Int(n) => Term::Int(n.clone()),
        Expr::Real(r) => Term::Real(r.clone()),
        Expr::Str(s) => Term::Str(s.clone()),
        _ => return None,
    })
}

fn to_expr(t: Term) -> Expr {
    match t {
        Term::Int(n) => Expr::Int(n),
        Term::Real(r) => Expr::Real(r),
        Term::Str(s) => Expr::Str(s),
        _ => Expr::Unit,
    }
}

/// Source δ-rule for a saturated primitive applied to literal values.
///
/// `None` means no rule applies; `Some(Err)` is a primitive failure such as
/// integer division by zero.
pub fn source_delta(name: &str, args: &[Expr]) -> Option<Result<(Expr, Option<String>), String>> {
    if arity(name)? != args.len() {
        return None;
    }
    let terms: Vec<Term> = args.iter().map(to_term).collect::<Option<_>>()?;
    let op = if let Some((i, r)) = int_real_ops(name) {
        match (&terms[0], &terms[1]) {
            (Term::Int(_), Term::Int(_)) => i,
            (Term::Real(_), Term::Real(_)) => r,
            _ => return None,
        }
    } else {
        match (name, &terms[0]) {
            ("toString", Term::Int(_)) => PrimOp::IntToString,
            ("toString", Term::Real(_)) => PrimOp::RealToString,
            ("toString", Term::Str(_)) => return Some(Ok((args[0].clone(), None))),
            ("cat", _) => PrimOp::Cat,
            ("print", _) => PrimOp::Print,
            _ => return None,
        }
    };
    match delta(op, &terms) {
        Ok((t, out)) => Some(Ok((to_expr(t), out))),
        Err(msg) if msg.contains("ill-typed") => None,
        Err(msg) => Some(Err(msg)),
    }
}
