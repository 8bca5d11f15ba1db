//! Target terms: call-by-value λ-calculus with products, sums and extensions.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;

use super::expr::RealLit;
use super::names::{fresh_name, Label, Name};
use super::types::{TargetBase, TargetType};

/// Saturated primitive operations of the target language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrimOp {
    AddI,
    AddR,
    SubI,
    SubR,
    MulI,
    MulR,
    DivI,
    DivR,
    IntToString,
    RealToString,
    Cat,
    Print,
}

impl PrimOp {
    pub const ALL: [PrimOp; 12] = [
        PrimOp::AddI,
        PrimOp::AddR,
        PrimOp::SubI,
        PrimOp::SubR,
        PrimOp::MulI,
        PrimOp::MulR,
        PrimOp::DivI,
        PrimOp::DivR,
        PrimOp::IntToString,
        PrimOp::RealToString,
        PrimOp::Cat,
        PrimOp::Print,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrimOp::AddI => "addi",
            PrimOp::AddR => "addr",
            PrimOp::SubI => "subi",
            PrimOp::SubR => "subr",
            PrimOp::MulI => "muli",
            PrimOp::MulR => "mulr",
            PrimOp::DivI => "divi",
            PrimOp::DivR => "divr",
            PrimOp::IntToString => "itos",
            PrimOp::RealToString => "rtos",
            PrimOp::Cat => "cat",
            PrimOp::Print => "print",
        }
    }

    pub fn from_name(name: &str) -> Option<PrimOp> {
        PrimOp::ALL.iter().copied().find(|op| op.name() == name)
    }

    /// Argument types and result type.
    pub fn signature(self) -> (Vec<TargetType>, TargetType) {
        let int = TargetType::Base(TargetBase::Int);
        let real = TargetType::Base(TargetBase::Real);
        let string = TargetType::Base(TargetBase::Str);
        match self {
            PrimOp::AddI | PrimOp::SubI | PrimOp::MulI | PrimOp::DivI => {
                (alloc::vec![int.clone(), int.clone()], int)
            }
            PrimOp::AddR | PrimOp::SubR | PrimOp::MulR | PrimOp::DivR => {
                (alloc::vec![real.clone(), real.clone()], real)
            }
            PrimOp::IntToString => (alloc::vec![int], string),
            PrimOp::RealToString => (alloc::vec![real], string),
            PrimOp::Cat => (alloc::vec![string.clone(), string.clone()], string),
            PrimOp::Print => (alloc::vec![string], TargetType::Unit),
        }
    }

    pub fn arity(self) -> usize {
        self.signature().0.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Name),
    Unit,
    Lam(Name, Box<Term>),
    App(Box<Term>, Box<Term>),
    Fix(Name, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Proj(u8, Box<Term>),
    Inj(u8, Box<Term>),
    Case {
        scrut: Box<Term>,
        left: Name,
        left_arm: Box<Term>,
        right: Name,
        right_arm: Box<Term>,
    },
    Int(BigInt),
    Real(RealLit),
    Str(String),
    Record(Label, Box<Term>),
    Field(Box<Term>, Label),
    Let(Name, Box<Term>, Box<Term>),
    Nil,
    Cons(Box<Term>, Box<Term>),
    ListCase {
        scrut: Box<Term>,
        nil: Box<Term>,
        head: Name,
        tail: Name,
        cons: Box<Term>,
    },
    PrimApp(PrimOp, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<Name>) -> Term {
        Term::Var(name.into())
    }

    pub fn lam(name: impl Into<Name>, body: Term) -> Term {
        Term::Lam(name.into(), Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn fix(name: impl Into<Name>, body: Term) -> Term {
        Term::Fix(name.into(), Box::new(body))
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }

    pub fn proj(k: u8, t: Term) -> Term {
        Term::Proj(k, Box::new(t))
    }

    pub fn inj(k: u8, t: Term) -> Term {
        Term::Inj(k, Box::new(t))
    }

    pub fn case(
        scrut: Term,
        left: impl Into<Name>,
        left_arm: Term,
        right: impl Into<Name>,
        right_arm: Term,
    ) -> Term {
        Term::Case {
            scrut: Box::new(scrut),
            left: left.into(),
            left_arm: Box::new(left_arm),
            right: right.into(),
            right_arm: Box::new(right_arm),
        }
    }

    pub fn int(n: i64) -> Term {
        Term::Int(BigInt::from(n))
    }

    pub fn let_(name: impl Into<Name>, bound: Term, body: Term) -> Term {
        Term::Let(name.into(), Box::new(bound), Box::new(body))
    }

    pub fn cons(h: Term, t: Term) -> Term {
        Term::Cons(Box::new(h), Box::new(t))
    }

    /// `x | () | λx.M | ⟨W1,W2⟩ | inj_k W` plus literals, records, nil and
    /// cons of values.
    pub fn is_value(&self) -> bool {
        match self {
            Term::Var(_)
            | Term::Unit
            | Term::Lam(..)
            | Term::Int(_)
            | Term::Real(_)
            | Term::Str(_)
            | Term::Nil => true,
            Term::Pair(a, b) | Term::Cons(a, b) => a.is_value() && b.is_value(),
            Term::Inj(_, a) | Term::Record(_, a) => a.is_value(),
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
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::Unit | Term::Int(_) | Term::Real(_) | Term::Str(_) | Term::Nil => {}
            Term::Lam(x, b) | Term::Fix(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            Term::App(a, b) | Term::Pair(a, b) | Term::Cons(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Term::Proj(_, a) | Term::Inj(_, a) | Term::Record(_, a) | Term::Field(a, _) => {
                a.collect_free(bound, out)
            }
            Term::Case { scrut, left, left_arm, right, right_arm } => {
                scrut.collect_free(bound, out);
                bound.push(left.clone());
                left_arm.collect_free(bound, out);
                bound.pop();
                bound.push(right.clone());
                right_arm.collect_free(bound, out);
                bound.pop();
            }
            Term::Let(x, a, b) => {
                a.collect_free(bound, out);
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            Term::ListCase { scrut, nil, head, tail, cons } => {
                scrut.collect_free(bound, out);
                nil.collect_free(bound, out);
                bound.push(head.clone());
                bound.push(tail.clone());
                cons.collect_free(bound, out);
                bound.pop();
                bound.pop();
            }
            Term::PrimApp(_, args) => {
                for a in args {
                    a.collect_free(bound, out);
                }
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn occurs_free(&self, x: &str) -> bool {
        self.free_vars().contains(x)
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Unit | Term::Int(_) | Term::Real(_) | Term::Str(_) | Term::Nil => 1,
            Term::Lam(_, b) | Term::Fix(_, b) => 1 + b.size(),
            Term::App(a, b) | Term::Pair(a, b) | Term::Cons(a, b) | Term::Let(_, a, b) => {
                1 + a.size() + b.size()
            }
            Term::Proj(_, a) | Term::Inj(_, a) | Term::Record(_, a) | Term::Field(a, _) => {
                1 + a.size()
            }
            Term::Case { scrut, left_arm, right_arm, .. } => {
                1 + scrut.size() + left_arm.size() + right_arm.size()
            }
            Term::ListCase { scrut, nil, cons, .. } => 1 + scrut.size() + nil.size() + cons.size(),
            Term::PrimApp(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Capture-avoiding substitution `[w/x]self`.
    pub fn subst(&self, x: &str, w: &Term) -> Term {
        let fv = w.free_vars();
        self.subst_with(x, w, &fv)
    }

    fn subst_with(&self, x: &str, w: &Term, fv: &BTreeSet<Name>) -> Term {
        let go = |t: &Term| t.subst_with(x, w, fv);
        match self {
            Term::Var(y) => {
                if y == x {
                    w.clone()
                } else {
                    self.clone()
                }
            }
            Term::Unit | Term::Int(_) | Term::Real(_) | Term::Str(_) | Term::Nil => self.clone(),
            Term::Lam(y, b) => {
                let (y, b) = subst_under(y, b, x, w, fv);
                Term::Lam(y, Box::new(b))
            }
            Term::Fix(y, b) => {
                let (y, b) = subst_under(y, b, x, w, fv);
                Term::Fix(y, Box::new(b))
            }
            Term::App(a, b) => Term::app(go(a), go(b)),
            Term::Pair(a, b) => Term::pair(go(a), go(b)),
            Term::Cons(a, b) => Term::cons(go(a), go(b)),
            Term::Proj(k, a) => Term::proj(*k, go(a)),
            Term::Inj(k, a) => Term::inj(*k, go(a)),
            Term::Record(l, a) => Term::Record(l.clone(), Box::new(go(a))),
            Term::Field(a, l) => Term::Field(Box::new(go(a)), l.clone()),
            Term::Case { scrut, left, left_arm, right, right_arm } => {
                let (left, left_arm) = subst_under(left, left_arm, x, w, fv);
                let (right, right_arm) = subst_under(right, right_arm, x, w, fv);
                Term::case(go(scrut), left, left_arm, right, right_arm)
            }
            Term::Let(y, a, b) => {
                let a = go(a);
                let (y, b) = subst_under(y, b, x, w, fv);
                Term::Let(y, Box::new(a), Box::new(b))
            }
            Term::ListCase { scrut, nil, head, tail, cons } => {
                let scrut = go(scrut);
                let nil = go(nil);
                let mut head = head.clone();
                let mut tail = tail.clone();
                let mut cons = (**cons).clone();
                if head != x && tail != x && cons.occurs_free(x) {
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
                        cons = cons.subst(&tail, &Term::Var(new_tail.clone()));
                        cons = cons.subst(&head, &Term::Var(new_head.clone()));
                        head = new_head;
                        tail = new_tail;
                    }
                    cons = cons.subst_with(x, w, fv);
                }
                Term::ListCase {
                    scrut: Box::new(scrut),
                    nil: Box::new(nil),
                    head,
                    tail,
                    cons: Box::new(cons),
                }
            }
            Term::PrimApp(op, args) => Term::PrimApp(*op, args.iter().map(go).collect()),
        }
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        self == other || alpha(self, other, &mut Vec::new())
    }
}

fn subst_under(y: &Name, body: &Term, x: &str, w: &Term, fv: &BTreeSet<Name>) -> (Name, Term) {
    if y == x || !body.occurs_free(x) {
        return (y.clone(), body.clone());
    }
    if fv.contains(y) {
        let mut avoid = body.free_vars();
        avoid.extend(fv.iter().cloned());
        avoid.insert(x.into());
        let new = fresh_name(y, |n| avoid.contains(n));
        let renamed = body.subst(y, &Term::Var(new.clone()));
        (new, renamed.subst_with(x, w, fv))
    } else {
        (y.clone(), body.subst_with(x, w, fv))
    }
}

fn lookup(env: &[(Name, Name)], a: &str, b: &str) -> bool {
    for (l, r) in env.iter().rev() {
        if l == a || r == b {
            return l == a && r == b;
        }
    }
    a == b
}

fn under(env: &mut Vec<(Name, Name)>, x: &Name, y: &Name, a: &Term, b: &Term) -> bool {
    env.push((x.clone(), y.clone()));
    let r = alpha(a, b, env);
    env.pop();
    r
}

fn alpha(a: &Term, b: &Term, env: &mut Vec<(Name, Name)>) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => lookup(env, x, y),
        (Term::Unit, Term::Unit) | (Term::Nil, Term::Nil) => true,
        (Term::Int(x), Term::Int(y)) => x == y,
        (Term::Real(x), Term::Real(y)) => x == y,
        (Term::Str(x), Term::Str(y)) => x == y,
        (Term::Lam(x, e1), Term::Lam(y, e2)) | (Term::Fix(x, e1), Term::Fix(y, e2)) => {
            core::mem::discriminant(a) == core::mem::discriminant(b) && under(env, x, y, e1, e2)
        }
        (Term::App(a1, a2), Term::App(b1, b2))
        | (Term::Pair(a1, a2), Term::Pair(b1, b2))
        | (Term::Cons(a1, a2), Term::Cons(b1, b2)) => {
            core::mem::discriminant(a) == core::mem::discriminant(b)
                && alpha(a1, b1, env)
                && alpha(a2, b2, env)
        }
        (Term::Proj(j, e1), Term::Proj(k, e2)) | (Term::Inj(j, e1), Term::Inj(k, e2)) => {
            core::mem::discriminant(a) == core::mem::discriminant(b)
                && j == k
                && alpha(e1, e2, env)
        }
        (Term::Record(l1, e1), Term::Record(l2, e2)) => l1 == l2 && alpha(e1, e2, env),
        (Term::Field(e1, l1), Term::Field(e2, l2)) => l1 == l2 && alpha(e1, e2, env),
        (
            Term::Case { scrut: s1, left: x1, left_arm: l1, right: y1, right_arm: r1 },
            Term::Case { scrut: s2, left: x2, left_arm: l2, right: y2, right_arm: r2 },
        ) => alpha(s1, s2, env) && under(env, x1, x2, l1, l2) && under(env, y1, y2, r1, r2),
        (Term::Let(x, a1, b1), Term::Let(y, a2, b2)) => {
            alpha(a1, a2, env) && under(env, x, y, b1, b2)
        }
        (
            Term::ListCase { scrut: s1, nil: n1, head: h1, tail: t1, cons: c1 },
            Term::ListCase { scrut: s2, nil: n2, head: h2, tail: t2, cons: c2 },
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
        (Term::PrimApp(o1, a1), Term::PrimApp(o2, a2)) => {
            o1 == o2 && a1.len() == a2.len() && a1.iter().zip(a2).all(|(x, y)| alpha(x, y, env))
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        assert!(Term::pair(Term::Unit, Term::lam("x", Term::var("x"))).is_value());
        assert!(Term::inj(1, Term::Unit).is_value());
        assert!(!Term::proj(1, Term::pair(Term::Unit, Term::Unit)).is_value());
        assert!(!Term::app(Term::lam("x", Term::var("x")), Term::Unit).is_value());
    }

    #[test]
    fn case_binders_are_alpha_renamable() {
        let a = Term::case(Term::var("s"), "x", Term::var("x"), "y", Term::Unit);
        let b = Term::case(Term::var("s"), "p", Term::var("p"), "q", Term::Unit);
        let c = Term::case(Term::var("s"), "p", Term::var("x"), "q", Term::Unit);
        assert!(a.alpha_eq(&b));
        assert!(!a.alpha_eq(&c));
    }

    #[test]
    fn substitution_avoids_capture() {
        let t = Term::lam("y", Term::pair(Term::var("x"), Term::var("y")));
        let r = t.subst("x", &Term::var("y"));
        let expected = Term::lam("z", Term::pair(Term::var("y"), Term::var("z")));
        assert!(r.alpha_eq(&expected));
    }

    #[test]
    fn prim_names_round_trip() {
        for op in PrimOp::ALL {
            assert_eq!(PrimOp::from_name(op.name()), Some(op));
        }
    }
}
