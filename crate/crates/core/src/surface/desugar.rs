//! Parse trees to core expressions.
//!
//! Multi-field records become left-nested intersections and merges of
//! single-field records, aliases are expanded, annotations become `Anno`
//! nodes and free prelude names become `Prim` nodes.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::lexer::Pos;
use super::prelude::is_prim;
use super::syntax::{Decl, Program, SurfaceExpr, SurfaceExprKind as K, SurfaceType};
use crate::ast::{Expr, Name, SourceType};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DesugarError {
    #[error("{pos}: unknown type {name}")]
    UnknownTypeAlias { name: String, pos: Pos },
    #[error("{pos}: {name} is already declared")]
    DuplicateDeclaration { name: String, pos: Pos },
}

#[derive(Clone, Debug, Default)]
pub struct Aliases {
    map: BTreeMap<Name, SourceType>,
}

impl Aliases {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&SourceType> {
        self.map.get(name)
    }
}

pub fn desugar_type(t: &SurfaceType, aliases: &Aliases) -> Result<SourceType, DesugarError> {
    let go = |t: &SurfaceType| desugar_type(t, aliases);
    Ok(match t {
        SurfaceType::Top => SourceType::Top,
        SurfaceType::Base(b) => SourceType::Base(*b),
        SurfaceType::Named(n, pos) => aliases
            .get(n)
            .cloned()
            .ok_or_else(|| DesugarError::UnknownTypeAlias { name: n.clone(), pos: *pos })?,
        SurfaceType::Arrow(a, b) => SourceType::arrow(go(a)?, go(b)?),
        SurfaceType::Intersect(a, b) => SourceType::intersect(go(a)?, go(b)?),
        SurfaceType::Union(a, b) => SourceType::union(go(a)?, go(b)?),
        SurfaceType::List(a) => SourceType::list(go(a)?),
        SurfaceType::Record(fields) => {
            let mut it = fields.iter();
            let (l, a) = it.next().expect("records have a field");
            let mut acc = SourceType::record(l.clone(), go(a)?);
            for (l, a) in it {
                acc = SourceType::intersect(acc, SourceType::record(l.clone(), go(a)?));
            }
            acc
        }
    })
}

struct Scope<'a> {
    aliases: &'a Aliases,
    bound: Vec<Name>,
    prelude: bool,
}

impl Scope<'_> {
    fn under<T>(&mut self, x: &Name, f: impl FnOnce(&mut Self) -> T) -> T {
        self.bound.push(x.clone());
        let r = f(self);
        self.bound.pop();
        r
    }

    fn expr(&mut self, e: &SurfaceExpr) -> Result<Expr, DesugarError> {
        Ok(match &e.kind {
            K::Var(x) => {
                if self.prelude && is_prim(x) && !self.bound.contains(x) {
                    Expr::Prim(x.clone())
                } else {
                    Expr::Var(x.clone())
                }
            }
            K::Unit => Expr::Unit,
            K::Int(n) => Expr::Int(n.clone()),
            K::Real(r) => Expr::Real(r.clone()),
            K::Str(s) => Expr::Str(s.clone()),
            K::Nil => Expr::Nil,
            K::Lam(x, b) => Expr::lam(x.clone(), self.under(x, |s| s.expr(b))?),
            K::Fix(x, b) => Expr::fix(x.clone(), self.under(x, |s| s.expr(b))?),
            K::App(f, a) => Expr::app(self.expr(f)?, self.expr(a)?),
            K::Merge(a, b) => Expr::merge(self.expr(a)?, self.expr(b)?),
            K::Field(r, l) => Expr::field(self.expr(r)?, l.clone()),
            K::Let(x, a, b) => {
                let a = self.expr(a)?;
                Expr::let_(x.clone(), a, self.under(x, |s| s.expr(b))?)
            }
            K::Anno(a, t) => Expr::anno(self.expr(a)?, desugar_type(t, self.aliases)?),
            K::Cons(h, t) => Expr::cons(self.expr(h)?, self.expr(t)?),
            K::ListCase { scrut, nil, head, tail, cons } => {
                let scrut = self.expr(scrut)?;
                let nil = self.expr(nil)?;
                let cons = self.under(head, |s| s.under(tail, |s| s.expr(cons)))?;
                Expr::ListCase {
                    scrut: Box::new(scrut),
                    nil: Box::new(nil),
                    head: head.clone(),
                    tail: tail.clone(),
                    cons: Box::new(cons),
                }
            }
            K::Record(fields) => {
                let mut it = fields.iter();
                let (l, a) = it.next().expect("records have a field");
                let mut acc = Expr::record(l.clone(), self.expr(a)?);
                for (l, a) in it {
                    acc = Expr::merge(acc, Expr::record(l.clone(), self.expr(a)?));
                }
                acc
            }
        })
    }
}

/// Desugars a standalone expression in which `bound` names are in scope.
pub fn desugar_expr(e: &SurfaceExpr, aliases: &Aliases, bound: &[Name], prelude: bool) -> Result<Expr, DesugarError> {
    Scope { aliases, bound: bound.to_vec(), prelude }.expr(e)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValDecl {
    pub name: Name,
    pub expr: Expr,
    pub pos: Pos,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DesugaredProgram {
    pub decls: Vec<ValDecl>,
}

impl DesugaredProgram {
    /// `let x1 = e1 in ... let xn = en in xn end ... end`, or `()` when empty.
    pub fn to_expr(&self) -> Expr {
        let Some(last) = self.decls.last() else {
            return Expr::Unit;
        };
        let mut acc = Expr::var(last.name.clone());
        for d in self.decls.iter().rev() {
            acc = Expr::let_(d.name.clone(), d.expr.clone(), acc);
        }
        acc
    }
}

pub fn desugar_program(p: &Program, prelude: bool) -> Result<DesugaredProgram, DesugarError> {
    let mut aliases = Aliases::new();
    let mut bound: Vec<Name> = Vec::new();
    let mut decls = Vec::new();
    for d in &p.decls {
        match d {
            Decl::Type { name, ty, pos } => {
                if aliases.map.contains_key(name) {
                    return Err(DesugarError::DuplicateDeclaration { name: name.clone(), pos: *pos });
                }
                let t = desugar_type(ty, &aliases)?;
                aliases.map.insert(name.clone(), t);
            }
            Decl::Val { name, ty, body, pos } => {
                if name != "_" && bound.contains(name) {
                    return Err(DesugarError::DuplicateDeclaration { name: name.clone(), pos: *pos });
                }
                let mut e = desugar_expr(body, &aliases, &bound, prelude)?;
                if let Some(t) = ty {
                    e = Expr::anno(e, desugar_type(t, &aliases)?);
                }
                bound.push(name.clone());
                decls.push(ValDecl { name: name.clone(), expr: e, pos: *pos });
            }
        }
    }
    Ok(DesugaredProgram { decls })
}

/// The whole program as one closed expression.
pub fn desugar(p: &Program) -> Result<Expr, DesugarError> {
    Ok(desugar_program(p, true)?.to_expr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parser::{parse_program, parse_surface_expr, parse_surface_type};
    use alloc::string::ToString;

    fn ty(s: &str) -> SourceType {
        desugar_type(&parse_surface_type(s).unwrap(), &Aliases::new()).unwrap()
    }

    fn ex(s: &str) -> Expr {
        desugar_expr(&parse_surface_expr(s).unwrap(), &Aliases::new(), &[], true).unwrap()
    }

    #[test]
    fn records_become_intersections_and_merges() {
        assert_eq!(ty("{x:int, y:int}").to_string(), "{x : int} & {y : int}");
        assert_eq!(ex("{x=1, y=2}").to_string(), "{x = 1} ,, {y = 2}");
        assert_eq!(ex("{x=1}"), Expr::record("x", Expr::int(1)));
    }

    #[test]
    fn prelude_names_unless_shadowed() {
        assert_eq!(ex("add"), Expr::Prim("add".into()));
        assert_eq!(ex("fn add => add"), Expr::lam("add", Expr::var("add")));
    }

    #[test]
    fn aliases_and_duplicates() {
        let p = parse_program("type t = int \\/ real\nval x : t = 1").unwrap();
        let d = desugar_program(&p, true).unwrap();
        assert_eq!(d.decls[0].expr.to_string(), "(1 : int \\/ real)");
        let p = parse_program("val x : u = 1").unwrap();
        assert!(matches!(desugar_program(&p, true), Err(DesugarError::UnknownTypeAlias { .. })));
        let p = parse_program("val x = 1 val x = 2").unwrap();
        assert!(matches!(desugar_program(&p, true), Err(DesugarError::DuplicateDeclaration { .. })));
        let p = parse_program("val _ = 1 val _ = 2").unwrap();
        assert!(desugar_program(&p, true).is_ok());
    }

    #[test]
    fn program_nests_lets() {
        let p = parse_program("val a = 1 val b = a").unwrap();
        assert_eq!(desugar(&p).unwrap().to_string(), "let a = 1 in let b = a in b end end");
        assert_eq!(desugar(&Program::default()).unwrap(), Expr::Unit);
    }
}
