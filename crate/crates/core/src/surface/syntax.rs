//! Parse trees for the surface language.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;

use super::lexer::Pos;
use crate::ast::{BaseType, Label, Name, RealLit};

#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceType {
    Top,
    Base(BaseType),
    Named(String, Pos),
    Arrow(Box<SurfaceType>, Box<SurfaceType>),
    Intersect(Box<SurfaceType>, Box<SurfaceType>),
    Union(Box<SurfaceType>, Box<SurfaceType>),
    /// `{l1:A1, ..., ln:An}`, n ≥ 1.
    Record(Vec<(Label, SurfaceType)>),
    List(Box<SurfaceType>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceExpr {
    pub kind: SurfaceExprKind,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceExprKind {
    Var(Name),
    Unit,
    Lam(Name, Box<SurfaceExpr>),
    App(Box<SurfaceExpr>, Box<SurfaceExpr>),
    Fix(Name, Box<SurfaceExpr>),
    Merge(Box<SurfaceExpr>, Box<SurfaceExpr>),
    Int(BigInt),
    Real(RealLit),
    Str(String),
    /// `{l1=e1, ..., ln=en}`, n ≥ 1.
    Record(Vec<(Label, SurfaceExpr)>),
    Field(Box<SurfaceExpr>, Label),
    Let(Name, Box<SurfaceExpr>, Box<SurfaceExpr>),
    Anno(Box<SurfaceExpr>, SurfaceType),
    Nil,
    Cons(Box<SurfaceExpr>, Box<SurfaceExpr>),
    ListCase {
        scrut: Box<SurfaceExpr>,
        nil: Box<SurfaceExpr>,
        head: Name,
        tail: Name,
        cons: Box<SurfaceExpr>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decl {
    Val { name: Name, ty: Option<SurfaceType>, body: SurfaceExpr, pos: Pos },
    Type { name: Name, ty: SurfaceType, pos: Pos },
}

impl Decl {
    pub fn name(&self) -> &str {
        match self {
            Decl::Val { name, .. } | Decl::Type { name, .. } => name,
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            Decl::Val { pos, .. } | Decl::Type { pos, .. } => *pos,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Program {
    pub decls: Vec<Decl>,
}
