//! Source expressions: the core merge calculus plus surface extensions.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::hash::{Hash, Hasher};

use num_bigint::BigInt;

use super::names::{fresh_name, Label, Name};
use super::types::SourceType;

/// A real literal keeps the text it was written with so that printing can
/// echo it; equality and hashing use only the numeric value.
#[derive(Clone, Debug)]
pub struct RealLit {
    pub text: String,
    pub value: f64,
}

impl RealLit {
    pub fn new(text: impl Into<String>, value: f64) -> Self {
        RealLit { text: text.into(), value }
    }

    /// Builds a literal for a computed value, using the shortest text that
    /// round-trips.
    pub fn from_value(value: f64) -> Self {
        RealLit { text: format_real(value), value }
    }
}

impl PartialEq for RealLit {
    fn eq(&self, other: &Self) -> bool {
        self.value.to_bits() == other.value.to_bits()
    }
}

impl Eq for RealLit {}

impl Hash for RealLit {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.value.to_bits().hash(state);
    }
}

/// Shortest round-tripping decimal, with `~` as the minus sign.
pub fn format_real(value: f64) -> String {
    let text = alloc::format!("{:?}", value);
    match text.strip_prefix('-') {
        Some(rest) => alloc::format!("~{}", rest),
        None => text,
    }
}

/// Decimal integer text with `~` as the minus sign.
pub fn format_int(value: &BigInt) -> String {
    let text = alloc::format!("{}", value);
    match text.strip_prefix('-') {
        Some(rest) => alloc::format!("~{}", rest),
        None => text,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(Name),
    Unit,
    Lam(Name, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    Fix(Name, Box<Expr>),
    Merge(Box<Expr>, Box<Expr>),
    Int(BigInt),
    Real(RealLit),
    Str(String),
    Record(Label, Box<Expr>),
    Field(Box<Expr>, Label),
    Let(Name, Box<Expr>, Box<Expr>),
    Anno(Box<Expr>, SourceType),
    Nil,
    Cons(Box<Expr>, Box<Expr>),
    ListCase {
        scrut: Box<Expr>,
        nil: Box<Expr>,
        head: Name,
        tail: Name,
        cons: Box<Expr>,
    },
    Prim(Name),
}

impl Expr {
    pub fn var(name: impl Into<Name>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn lam(name: impl Into<Name>, body: Expr) -> Expr {
        Expr::Lam(name.into(), Box::new(body))
    }

    pub fn app(f: Expr, a: Expr) -> Expr {
        Expr::App(Box::new(f), Box::new(a))
    }

    pub fn fix(name: impl Into<Name>, body: Expr) -> Expr {
        Expr::Fix(name.into(), Box::new(body))
    }

    pub fn merge(a: Expr, b: Expr) -> Expr {
        Expr::Merge(Box::new(a), Box::new(b))
    }

    pub fn int(n: i64) -> Expr {
        Expr::Int(BigInt::from(n))
    }

    pub fn record(label: impl Into<Label>, payload: Expr) -> Expr {
        Expr::Record(label.into(), Box::new(payload))
    }

    pub fn field(subject: Expr, label: impl Into<Label>) -> Expr {
        Expr::Field(Box::new(subject), label.into())
    }

    pub fn let_(name: impl Into<Name>, bound: Expr, body: Expr) -> Expr {
        Expr::Let(name.into(), Box::new(bound), Box::new(body))
    }

    pub fn anno(e: Expr, ty: SourceType) -> Expr {
        Expr::Anno(Box::new(e), ty)
    }

    pub fn cons(h: Expr, t: Expr) -> Expr {
        Expr::Cons(Box::new(h), Box::new(t))
    }

    /// `x | () | λx.e | v1,,v2`, literals, records of values, nil, cons of
    /// values, primitives and primitives partially applied to a value.
    pub fn is_value(&self) -> bool {
        match self {
            Expr::Var(_)
            | Expr::Unit
            | Expr::Lam(..)
            | Expr::Int(_)
            | Expr::Real(_)
            | Expr::Str(_)
            | Expr::Nil
            | Expr::Prim(_) => true,
            Expr::Merge(a, b) | Expr::Cons(a, b) => a.is_value() && b.is_value(),
            Expr::Record(_, a) => a.is_value(),
            Expr::App(f, a) => match &**f {
                Expr::Prim(p) => crate::surface::prelude::arity(p) == Some(2) && a.is_value(),
                _ => false,
            },
            _ => false,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Expr::Unit | Expr::Int(_) | Expr::Real(_) | Expr::Str(_))
    }

    /// Number of leaves plus binders; application and merge nodes are free.
    pub fn size(&self) -> usize {
        match self {
            Expr::Var(_)
            | Expr::Unit
            | Expr::Int(_)
            | Expr::Real(_)
            | Expr::Str(_)
            | Expr::Nil
            | Expr::Prim(_) => 1,
            Expr::Lam(_, b) | Expr::Fix(_, b) => 1 + b.size(),
            Expr::App(a, b) | Expr::Merge(a, b) | Expr::Cons(a, b) => a.size() + b.size(),
            Expr::Record(_, a) | Expr::Field(a, _) | Expr::Anno(a, _) => 1 + a.size(),
            Expr::Let(_, a, b) => 1 + a.size() + b.size(),
            Expr::ListCase { scrut, nil, cons, .. } => 2 + scrut.size() + nil.size() + cons.size(),
        }
    }

    /// True for terms built only from `()`, variables, λ, application, fix
    /// and merge.
    pub fn is_core(&self) -> bool {
        match self {
            Expr::Var(_) | Expr::Unit => true,
            Expr::Lam(_, b) | Expr::Fix(_, b) => b.is_core(),
            Expr::App(a, b) | Expr::Merge(a, b) => a.is_core() && b.is_core(),
            _ => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Expr::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Expr::Unit
            | Expr::Int(_)
            | Expr::Real(_)
            | Expr::Str(_)
            | Expr::Nil
            | Expr::Prim(_) => {}
            Expr::Lam(x, b) | Expr::Fix(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            Expr::App(a, b) | Expr::Merge(a, b) | Expr::Cons(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Expr::Record(_, a) | Expr::Field(a, _) | Expr::Anno(a, _) => a.collect_free(bound, out),
            Expr::Let(x, a, b) => {
                a.collect_free(bound, out);
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            Expr::ListCase { scrut, nil, head, tail, cons } => {
                scrut.collect_free(bound, out);
                nil.collect_free(bound, out);
                bound.push(head.clone());
                bound.push(tail.clone());
                cons.collect_free(bound, out);
                bound.pop();
                bound.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn occurs_free(&self, x: &str) -> bool {
        self.free_vars().contains(x)
    }

    /// Every name appearing anywhere in the term, bound or free.
    pub fn all_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Expr::Var(x) => {
                out.insert(x.clone());
            }
            Expr::Unit
            | Expr::Int(_)
            | Expr::Real(_)
            | Expr::Str(_)
            | Expr::Nil
            | Expr::Prim(_) => {}
            Expr::Lam(x, b) | Expr::Fix(x, b) => {
                out.insert(x.clone());
                b.all_names(out);
            }
            Expr::App(a, b) | Expr::Merge(a, b) | Expr::Cons(a, b) => {
                a.all_names(out);
                b.all_names(out);
            }
            Expr::Record(_, a) | Expr::Field(a, _) | Expr::Anno(a, _) => a.all_names(out),
            Expr::Let(x, a, b) => {
                out.insert(x.clone());
                a.all_names(out);
                b.all_names(out);
            }
            Expr::ListCase { scrut, nil, head, tail, cons } => {
                out.insert(head.clone());
                out.insert(tail.clone());
                scrut.all_names(out);
                nil.all_names(out);
                cons.all_names(out);
            }
        }
    }

    /// Capture-avoiding substitution `[v/x]self`.
    pub fn subst(&self, x: &str, v: &Expr) -> Expr {
        let fv = v.free_vars();
        self.subst_with(x, v, &fv)
    }

    fn subst_with(&self, x: &str, v: &Expr, fv: &BTreeSet<Name>) -> Expr {
        match self {
            Expr::Var(y) => {
                if y == x {
                    v.clone()
                } else {
                    self.clone()
                }
            }
            Expr::Unit
            | Expr::Int(_)
            | Expr::Real(_)
            | Expr::Str(_)
            | Expr::Nil
            | Expr::Prim(_) => self.clone(),
            Expr::Lam(y, b) => {
                let (y, b) = subst_under(y, b, x, v, fv);
                Expr::Lam(y, Box::new(b))
            }
            Expr::Fix(y, b) => {
                let (y, b) = subst_under(y, b, x, v, fv);
                Expr::Fix(y, Box::new(b))
            }
            Expr::App(a, b) => Expr::app(a.subst_with(x, v, fv), b.subst_with(x, v, fv)),
            Expr::Merge(a, b) => Expr::merge(a.subst_with(x, v, fv), b.subst_with(x, v, fv)),
            Expr::Cons(a, b) => Expr::cons(a.subst_with(x, v, fv), b.subst_with(x, v, fv)),
            Expr::Record(l, a) => Expr::Record(l.clone(), Box::new(a.subst_with(x, v, fv))),
            Expr::Field(a, l) => Expr::Field(Box::new(a.subst_with(x, v, fv)), l.clone()),
            Expr::Anno(a, t) => Expr::Anno(Box::new(a.subst_with(x, v, fv)), t.clone()),
            Expr::Let(y, a, b) => {
                let a = a.subst_with(x, v, fv);
                let (y, b) = subst_under(y, b, x, v, fv);
                Expr::Let(y, Box::new(a), Box::new(b))
            }
            Expr::ListCase { scrut, nil, head, tail, cons } => {
                let scrut = scrut.subst_with(x, v, fv);
                let nil = nil.subst_with(x, v, fv);
                if head == x || tail == x {
                    return Expr::ListCase {
                        scrut: Box::new(scrut),
                        nil: Box::new(nil),
                        head: head.clone(),
                        tail: tail.clone(),
                        cons: cons.clone(),
                    };
                }
                let mut cons = (**cons).clone();
                let mut head = head.clone();
                let mut tail = tail.clone();
                if cons.occurs_free(x) {
                    if fv.contains(&head) || fv.contains(&tail) {
                        let mut avoid = cons.free_vars();
                        avoid.extend(fv.iter().cloned());
                        avoid.insert(x.into());
                        avoid.insert(head.clone());
                        avoid.insert(tail.clone());
                        let new_head = fresh_name(&head, |n| avoid.contains(n));
                        avoid.insert(new_head.clone());
                        let new_tail = fresh_name(&tail, |n| avoid.contains(n));
                        // tail is the inner binder, so rename it first
                        cons = cons.subst(&tail, &Expr::Var(new_tail.clone()));
                        cons = cons.subst(&head, &Expr::Var(new_head.clone()));
                        head = new_head;
                        tail = new_tail;
                    }
                    cons = cons.subst_with(x, v, fv);
                }
                Expr::ListCase {
                    scrut: Box::new(scrut),
                    nil: Box::new(nil),
                    head,
                    tail,
                    cons: Box::new(cons),
                }
            }
        }
    }

    /// α-equivalence.
    pub fn alpha_eq(&self, other: &Expr) -> bool {
        self == other || alpha(self, other, &mut Vec::new())
    }
}

fn subst_under(y: &Name, body: &Expr, x: &str, v: &Expr, fv: &BTreeSet<Name>) -> (Name, Expr) {
    if y == x || !body.occurs_free(x) {
        return (y.clone(), body.clone());
    }
    if fv.contains(y) {
        let mut avoid = body.free_vars();
        avoid.extend(fv.iter().cloned());
        avoid.insert(x.into());
        let new = fresh_name(y, |n| avoid.contains(n));
        let renamed = body.subst(y, &Expr::Var(new.clone()));
        (new, renamed.subst_with(x, v, fv))
    } else {
        (y.clone(), body.subst_with(x, v, fv))
    }
}

// Binder environment: pairs of names bound at the same depth on each side.
fn lookup(env: &[(Name, Name)], a: &str, b: &str) -> bool {
    for (l, r) in env.iter().rev() {
        if l == a || r == b {
            return l == a && r == b;
        }
    }
    a == b
}

fn alpha(a: &Expr, b: &Expr, env: &mut Vec<(Name, Name)>) -> bool {
    match (a, b) {
        (Expr::Var(x), Expr::Var(y)) => lookup(env, x, y),
        (Expr::Unit, Expr::Unit) | (Expr::Nil, Expr::Nil) => true,
        (Expr::Int(x), Expr::Int(y)) => x == y,
        (Expr::Real(x), Expr::Real(y)) => x == y,
        (Expr::Str(x), Expr::Str(y)) => x == y,
        (Expr::Prim(x), Expr::Prim(y)) => x == y,
        (Expr::Lam(x, e1), Expr::Lam(y, e2)) | (Expr::Fix(x, e1), Expr::Fix(y, e2)) => {
            if core::mem::discriminant(a) != core::mem::discriminant(b) {
                return false;
            }
            env.push((x.clone(), y.clone()));
            let r = alpha(e1, e2, env);
            env.pop();
            r
        }
        (Expr::App(a1, a2), Expr::App(b1, b2))
        | (Expr::Merge(a1, a2), Expr::Merge(b1, b2))
        | (Expr::Cons(a1, a2), Expr::Cons(b1, b2)) => {
            core::mem::discriminant(a) == core::mem::discriminant(b)
                && alpha(a1, b1, env)
                && alpha(a2, b2, env)
        }
        (Expr::Record(l1, e1), Expr::Record(l2, e2)) => l1 == l2 && alpha(e1, e2, env),
        (Expr::Field(e1, l1), Expr::Field(e2, l2)) => l1 == l2 && alpha(e1, e2, env),
        (Expr::Anno(e1, t1), Expr::Anno(e2, t2)) => t1 == t2 && alpha(e1, e2, env),
        (Expr::Let(x, a1, b1), Expr::Let(y, a2, b2)) => {
            if !alpha(a1, a2, env) {
                return false;
            }
            env.push((x.clone(), y.clone()));
            let r = alpha(b1, b2, env);
            env.pop();
            r
        }
        (
            Expr::ListCase { scrut: s1, nil: n1, head: h1, tail: t1, cons: c1 },
            Expr::ListCase { scrut: s2, nil: n2, head: h2, tail: t2, cons: c2 },
        ) => {
            if !alpha(s1, s2, env) || !alpha(n1, n2, env) {
                return false;
            }
            env.push((h1.clone(), h2.clone()));
            env.push((t1.clone(), t2.clone()));
            let r = alpha(c1, c2, env);
            env.pop();
            env.pop();
            r
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(x: &str) -> Expr {
        Expr::lam(x, Expr::var(x))
    }

    #[test]
    fn values() {
        assert!(id("x").is_value());
        assert!(Expr::merge(id("x"), Expr::Unit).is_value());
        assert!(!Expr::app(id("x"), Expr::Unit).is_value());
    }

    #[test]
    fn alpha_equivalence() {
        assert!(id("x").alpha_eq(&id("y")));
        let k = Expr::lam("x", Expr::lam("y", Expr::var("x")));
        let k2 = Expr::lam("a", Expr::lam("b", Expr::var("b")));
        assert!(!k.alpha_eq(&k2));
        assert!(Expr::var("x").alpha_eq(&Expr::var("x")));
        assert!(!Expr::var("x").alpha_eq(&Expr::var("y")));
        // λx.λx.x vs λx.λy.x: the inner x is shadowed on the left.
        let a = Expr::lam("x", Expr::lam("x", Expr::var("x")));
        let b = Expr::lam("x", Expr::lam("y", Expr::var("x")));
        assert!(!a.alpha_eq(&b));
    }

    #[test]
    fn substitution_avoids_capture() {
        // [y/x](λy.x) must not become λy.y
        let e = Expr::lam("y", Expr::var("x"));
        let r = e.subst("x", &Expr::var("y"));
        assert!(r.alpha_eq(&Expr::lam("z", Expr::var("y"))));
        // shadowing binder leaves the body alone
        let e = Expr::lam("x", Expr::var("x"));
        assert_eq!(e.subst("x", &Expr::Unit), e);
    }

    #[test]
    fn sizes() {
        assert_eq!(Expr::Unit.size(), 1);
        assert_eq!(id("x").size(), 2);
        assert_eq!(Expr::merge(Expr::Unit, Expr::Unit).size(), 2);
    }

    #[test]
    fn real_text_is_preserved_but_ignored_by_equality() {
        let a = RealLit::new("2.50", 2.5);
        let b = RealLit::from_value(2.5);
        assert_eq!(a, b);
        assert_eq!(b.text, "2.5");
        assert_eq!(format_real(150.0), "150.0");
        assert_eq!(format_real(-0.5), "~0.5");
    }
}
