//! One-hole evaluation contexts `E ::= [] | E e | v E | E,,e | e,,E` plus
//! frames for the surface extensions.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use core::fmt;

use super::expr::Expr;
use super::names::{Label, Name};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EvalContext {
    Hole,
    AppFun(Box<EvalContext>, Expr),
    AppArg(Expr, Box<EvalContext>),
    MergeL(Box<EvalContext>, Expr),
    MergeR(Expr, Box<EvalContext>),
    LetBound(Name, Box<EvalContext>, Expr),
    Record(Label, Box<EvalContext>),
    Field(Box<EvalContext>, Label),
    ConsHead(Box<EvalContext>, Expr),
    ConsTail(Expr, Box<EvalContext>),
    ListCase {
        inner: Box<EvalContext>,
        nil: Expr,
        head: Name,
        tail: Name,
        cons: Expr,
    },
}

/// Name used to display the hole.
pub const HOLE: &str = "[]";

impl EvalContext {
    pub fn plug(&self, e: Expr) -> Expr {
        match self {
            EvalContext::Hole => e,
            EvalContext::AppFun(c, a) => Expr::app(c.plug(e), a.clone()),
            EvalContext::AppArg(v, c) => Expr::app(v.clone(), c.plug(e)),
            EvalContext::MergeL(c, b) => Expr::merge(c.plug(e), b.clone()),
            EvalContext::MergeR(a, c) => Expr::merge(a.clone(), c.plug(e)),
            EvalContext::LetBound(x, c, body) => Expr::let_(x.clone(), c.plug(e), body.clone()),
            EvalContext::Record(l, c) => Expr::record(l.clone(), c.plug(e)),
            EvalContext::Field(c, l) => Expr::field(c.plug(e), l.clone()),
            EvalContext::ConsHead(c, t) => Expr::cons(c.plug(e), t.clone()),
            EvalContext::ConsTail(h, c) => Expr::cons(h.clone(), c.plug(e)),
            EvalContext::ListCase { inner, nil, head, tail, cons } => Expr::ListCase {
                scrut: Box::new(inner.plug(e)),
                nil: Box::new(nil.clone()),
                head: head.clone(),
                tail: tail.clone(),
                cons: Box::new(cons.clone()),
            },
        }
    }

    /// `self[inner[-]]`.
    pub fn compose(&self, inner: &EvalContext) -> EvalContext {
        let wrap = |c: &EvalContext| Box::new(c.compose(inner));
        match self {
            EvalContext::Hole => inner.clone(),
            EvalContext::AppFun(c, a) => EvalContext::AppFun(wrap(c), a.clone()),
            EvalContext::AppArg(v, c) => EvalContext::AppArg(v.clone(), wrap(c)),
            EvalContext::MergeL(c, b) => EvalContext::MergeL(wrap(c), b.clone()),
            EvalContext::MergeR(a, c) => EvalContext::MergeR(a.clone(), wrap(c)),
            EvalContext::LetBound(x, c, b) => EvalContext::LetBound(x.clone(), wrap(c), b.clone()),
            EvalContext::Record(l, c) => EvalContext::Record(l.clone(), wrap(c)),
            EvalContext::Field(c, l) => EvalContext::Field(wrap(c), l.clone()),
            EvalContext::ConsHead(c, t) => EvalContext::ConsHead(wrap(c), t.clone()),
            EvalContext::ConsTail(h, c) => EvalContext::ConsTail(h.clone(), wrap(c)),
            EvalContext::ListCase { inner: c, nil, head, tail, cons } => EvalContext::ListCase {
                inner: wrap(c),
                nil: nil.clone(),
                head: head.clone(),
                tail: tail.clone(),
                cons: cons.clone(),
            },
        }
    }

    /// Whether every `v E` frame really has a value on its left and every
    /// frame is one the step relation may look through.
    pub fn is_well_formed(&self) -> bool {
        match self {
            EvalContext::Hole => true,
            EvalContext::AppArg(v, c) | EvalContext::ConsTail(v, c) => v.is_value() && c.is_well_formed(),
            EvalContext::AppFun(c, _)
            | EvalContext::MergeL(c, _)
            | EvalContext::MergeR(_, c)
            | EvalContext::LetBound(_, c, _)
            | EvalContext::Record(_, c)
            | EvalContext::Field(c, _)
            | EvalContext::ConsHead(c, _)
            | EvalContext::ListCase { inner: c, .. } => c.is_well_formed(),
        }
    }

    /// Free variables of the context's non-hole parts. The hole is never
    /// under a binder.
    pub fn free_vars(&self) -> BTreeSet<Name> {
        self.plug(Expr::Unit).free_vars()
    }

    /// Substitution `[v/x]E`; the hole is not under any binder, so this is
    /// substitution into each side expression.
    pub fn subst(&self, x: &str, v: &Expr) -> EvalContext {
        let go = |c: &EvalContext| Box::new(c.subst(x, v));
        match self {
            EvalContext::Hole => EvalContext::Hole,
            EvalContext::AppFun(c, a) => EvalContext::AppFun(go(c), a.subst(x, v)),
            EvalContext::AppArg(f, c) => EvalContext::AppArg(f.subst(x, v), go(c)),
            EvalContext::MergeL(c, b) => EvalContext::MergeL(go(c), b.subst(x, v)),
            EvalContext::MergeR(a, c) => EvalContext::MergeR(a.subst(x, v), go(c)),
            EvalContext::LetBound(y, c, body) => {
                // substitute through a let whose bound part is the hole
                let probe = Expr::let_(y.clone(), Expr::Unit, body.clone()).subst(x, v);
                match probe {
                    Expr::Let(y2, _, body2) => EvalContext::LetBound(y2, go(c), *body2),
                    _ => unreachable!(),
                }
            }
            EvalContext::Record(l, c) => EvalContext::Record(l.clone(), go(c)),
            EvalContext::Field(c, l) => EvalContext::Field(go(c), l.clone()),
            EvalContext::ConsHead(c, t) => EvalContext::ConsHead(go(c), t.subst(x, v)),
            EvalContext::ConsTail(h, c) => EvalContext::ConsTail(h.subst(x, v), go(c)),
            EvalContext::ListCase { inner, nil, head, tail, cons } => {
                let probe = Expr::ListCase {
                    scrut: Box::new(Expr::Unit),
                    nil: Box::new(nil.clone()),
                    head: head.clone(),
                    tail: tail.clone(),
                    cons: Box::new(cons.clone()),
                }
                .subst(x, v);
                match probe {
                    Expr::ListCase { nil, head, tail, cons, .. } => EvalContext::ListCase {
                        inner: go(inner),
                        nil: *nil,
                        head,
                        tail,
                        cons: *cons,
                    },
                    _ => unreachable!(),
                }
            }
        }
    }

    /// Depth of the hole.
    pub fn depth(&self) -> usize {
        match self {
            EvalContext::Hole => 0,
            EvalContext::AppFun(c, _)
            | EvalContext::AppArg(_, c)
            | EvalContext::MergeL(c, _)
            | EvalContext::MergeR(_, c)
            | EvalContext::LetBound(_, c, _)
            | EvalContext::Record(_, c)
            | EvalContext::Field(c, _)
            | EvalContext::ConsHead(c, _)
            | EvalContext::ConsTail(_, c)
            | EvalContext::ListCase { inner: c, .. } => 1 + c.depth(),
        }
    }

    /// Finds `E` with `E[x] = e`, the hole in evaluation position and `x`
    /// not free in `E`. `is_value` decides which left neighbours count as
    /// values.
    pub fn locate(e: &Expr, x: &str, is_value: &dyn Fn(&Expr) -> bool) -> Option<EvalContext> {
        let free = |e: &Expr| e.occurs_free(x);
        let go = |e: &Expr| EvalContext::locate(e, x, is_value).map(Box::new);
        match e {
            Expr::Var(y) if y == x => Some(EvalContext::Hole),
            Expr::App(f, a) if free(f) && !free(a) => Some(EvalContext::AppFun(go(f)?, (**a).clone())),
            Expr::App(f, a) if free(a) && !free(f) && is_value(f) => Some(EvalContext::AppArg((**f).clone(), go(a)?)),
            Expr::Merge(a, b) if free(a) && !free(b) => Some(EvalContext::MergeL(go(a)?, (**b).clone())),
            Expr::Merge(a, b) if free(b) && !free(a) => Some(EvalContext::MergeR((**a).clone(), go(b)?)),
            Expr::Let(y, b, body) if free(b) && (y == x || !free(body)) => {
                Some(EvalContext::LetBound(y.clone(), go(b)?, (**body).clone()))
            }
            Expr::Record(l, a) => Some(EvalContext::Record(l.clone(), go(a)?)),
            Expr::Field(a, l) => Some(EvalContext::Field(go(a)?, l.clone())),
            Expr::Cons(h, t) if free(h) && !free(t) => Some(EvalContext::ConsHead(go(h)?, (**t).clone())),
            Expr::Cons(h, t) if free(t) && !free(h) && is_value(h) => Some(EvalContext::ConsTail((**h).clone(), go(t)?)),
            Expr::ListCase { scrut, nil, head, tail, cons }
                if free(scrut) && !free(nil) && (head == x || tail == x || !free(cons)) =>
            {
                Some(EvalContext::ListCase {
                    inner: go(scrut)?,
                    nil: (**nil).clone(),
                    head: head.clone(),
                    tail: tail.clone(),
                    cons: (**cons).clone(),
                })
            }
            _ => None,
        }
    }

    pub fn alpha_eq(&self, other: &EvalContext) -> bool {
        let probe = Expr::var(String::from(HOLE));
        self.plug(probe.clone()).alpha_eq(&other.plug(probe))
    }
}

impl fmt::Display for EvalContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.plug(Expr::var(HOLE)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn plug_examples() {
        let e = EvalContext::AppFun(Box::new(EvalContext::Hole), Expr::Unit);
        let id = Expr::lam("x", Expr::var("x"));
        assert_eq!(e.plug(id.clone()), Expr::app(id.clone(), Expr::Unit));
        assert_eq!(EvalContext::Hole.plug(id.clone()), id);
        assert_eq!(e.to_string(), "[] ()");
    }

    #[test]
    fn compose_matches_nested_plug() {
        let outer = EvalContext::MergeL(Box::new(EvalContext::Hole), Expr::Unit);
        let inner = EvalContext::AppFun(Box::new(EvalContext::Hole), Expr::var("y"));
        let e = Expr::var("z");
        assert_eq!(outer.compose(&inner).plug(e.clone()), outer.plug(inner.plug(e)));
    }
}
