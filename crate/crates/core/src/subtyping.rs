//! The coercive subtyping judgment `A ≤ B ↪ e`.
//!
//! Rules are tried in a fixed order: `⊤R`, `∧R`, `∨L`, then the structural
//! rules (arrows, atoms, records, lists), then `∧L1`, `∧L2`, `∨R1`, `∨R2`.
//! A failed premise backtracks to the next applicable rule.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use crate::ast::{BaseType, Expr, SourceType};

/// Direct edges of the atomic subtyping order; the judgment uses their
/// reflexive-transitive closure.
pub const ATOM_ORDER: &[(BaseType, BaseType)] = &[(BaseType::Pos, BaseType::Nat), (BaseType::Nat, BaseType::Int)];

pub fn atom_le(a: BaseType, b: BaseType) -> bool {
    if a == b {
        return true;
    }
    ATOM_ORDER.iter().any(|&(lo, hi)| lo == a && atom_le(hi, b))
}

/// The rule at the root of a subtyping derivation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubRule {
    TopR,
    AndR,
    OrL,
    Arr,
    /// Atomic subtyping; `true` when both sides are the same atom.
    Atom(bool),
    Record,
    List,
    AndL(u8),
    OrR(u8),
}

impl SubRule {
    pub fn name(self) -> &'static str {
        match self {
            SubRule::TopR => "top-R",
            SubRule::AndR => "and-R",
            SubRule::OrL => "or-L",
            SubRule::Arr => "arr",
            SubRule::Atom(true) => "refl-atom",
            SubRule::Atom(false) => "atom",
            SubRule::Record => "record",
            SubRule::List => "list",
            SubRule::AndL(1) => "and-L1",
            SubRule::AndL(_) => "and-L2",
            SubRule::OrR(1) => "or-R1",
            SubRule::OrR(_) => "or-R2",
        }
    }
}

/// A derivation of `source ≤ target`. For `arr` the children are the
/// domain (contravariant) and codomain premises, in that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubDerivation {
    pub rule: SubRule,
    pub source: SourceType,
    pub target: SourceType,
    pub children: Vec<SubDerivation>,
}

impl SubDerivation {
    /// The coercion the derivation denotes, a closed source expression of
    /// type `source → target`.
    pub fn coercion(&self) -> Expr {
        let c = |i: usize| self.children[i].coercion();
        match self.rule {
            SubRule::TopR => Expr::lam("x", Expr::Unit),
            SubRule::AndR => Expr::merge(c(0), c(1)),
            SubRule::OrL => {
                let body = Expr::merge(Expr::app(c(0), Expr::var("y")), Expr::app(c(1), Expr::var("y")));
                Expr::lam("x", Expr::app(Expr::lam("y", body), Expr::var("x")))
            }
            SubRule::Arr => {
                let inner = Expr::app(Expr::var("f"), Expr::app(c(0), Expr::var("x")));
                Expr::lam("f", Expr::lam("x", Expr::app(c(1), inner)))
            }
            SubRule::Atom(_) => Expr::lam("x", Expr::var("x")),
            SubRule::Record => {
                let SourceType::Record(l, _) = &self.source else { unreachable!() };
                let payload = Expr::app(c(0), Expr::field(Expr::var("x"), l.clone()));
                Expr::lam("x", Expr::record(l.clone(), payload))
            }
            SubRule::List => {
                let cons_arm = Expr::cons(Expr::app(c(0), Expr::var("h")), Expr::app(Expr::var("m"), Expr::var("t")));
                let body = Expr::ListCase {
                    scrut: Box::new(Expr::var("l")),
                    nil: Box::new(Expr::Nil),
                    head: "h".into(),
                    tail: "t".into(),
                    cons: Box::new(cons_arm),
                };
                let ty = SourceType::arrow(self.source.clone(), self.target.clone());
                Expr::anno(Expr::fix("m", Expr::lam("l", body)), ty)
            }
            SubRule::AndL(_) | SubRule::OrR(_) => c(0),
        }
    }

    /// Rule names in pre-order.
    pub fn rule_trace(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<&'static str>) {
        out.push(self.rule.name());
        for c in &self.children {
            c.collect(out);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coercion {
    /// A closed source value of type `source → target`.
    pub expr: Expr,
    pub source: SourceType,
    pub target: SourceType,
    /// Rule names in pre-order.
    pub rule_trace: Vec<&'static str>,
    pub derivation: SubDerivation,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{0} is not a subtype of {1}")]
pub struct NotASubtype(pub SourceType, pub SourceType);

impl fmt::Display for Coercion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)
    }
}

pub fn subtype(a: &SourceType, b: &SourceType) -> Result<Coercion, NotASubtype> {
    match sub(a, b) {
        Some(d) => Ok(Coercion {
            expr: d.coercion(),
            source: a.clone(),
            target: b.clone(),
            rule_trace: d.rule_trace(),
            derivation: d,
        }),
        None => Err(NotASubtype(a.clone(), b.clone())),
    }
}

pub fn subtype_holds(a: &SourceType, b: &SourceType) -> bool {
    sub(a, b).is_some()
}

pub fn reflexivity_coercion(a: &SourceType) -> Coercion {
    subtype(a, a).expect("subtyping is reflexive")
}

fn node(rule: SubRule, a: &SourceType, b: &SourceType, children: Vec<SubDerivation>) -> SubDerivation {
    SubDerivation { rule, source: a.clone(), target: b.clone(), children }
}

fn sub(a: &SourceType, b: &SourceType) -> Option<SubDerivation> {
    use SourceType as T;

    if let T::Top = b {
        return Some(node(SubRule::TopR, a, b, Vec::new()));
    }
    if let T::Intersect(b1, b2) = b {
        if let (Some(d1), Some(d2)) = (sub(a, b1), sub(a, b2)) {
            return Some(node(SubRule::AndR, a, b, alloc::vec![d1, d2]));
        }
    }
    if let T::Union(a1, a2) = a {
        if let (Some(d1), Some(d2)) = (sub(a1, b), sub(a2, b)) {
            return Some(node(SubRule::OrL, a, b, alloc::vec![d1, d2]));
        }
    }
    let structural = match (a, b) {
        (T::Arrow(a1, a2), T::Arrow(b1, b2)) => match (sub(b1, a1), sub(a2, b2)) {
            (Some(d1), Some(d2)) => Some(node(SubRule::Arr, a, b, alloc::vec![d1, d2])),
            _ => None,
        },
        (T::Base(p), T::Base(q)) if atom_le(*p, *q) => Some(node(SubRule::Atom(p == q), a, b, Vec::new())),
        (T::Record(l1, a1), T::Record(l2, b1)) if l1 == l2 => {
            sub(a1, b1).map(|d| node(SubRule::Record, a, b, alloc::vec![d]))
        }
        (T::List(a1), T::List(b1)) => sub(a1, b1).map(|d| node(SubRule::List, a, b, alloc::vec![d])),
        _ => None,
    };
    if structural.is_some() {
        return structural;
    }
    if let T::Intersect(a1, a2) = a {
        for (k, ak) in [(1, a1), (2, a2)] {
            if let Some(d) = sub(ak, b) {
                return Some(node(SubRule::AndL(k), a, b, alloc::vec![d]));
            }
        }
    }
    if let T::Union(b1, b2) = b {
        for (k, bk) in [(1, b1), (2, b2)] {
            if let Some(d) = sub(a, bk) {
                return Some(node(SubRule::OrR(k), a, b, alloc::vec![d]));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn id() -> Expr {
        Expr::lam("x", Expr::var("x"))
    }

    fn top() -> SourceType {
        SourceType::Top
    }

    fn arr(a: SourceType, b: SourceType) -> SourceType {
        SourceType::arrow(a, b)
    }

    #[test]
    fn top_right_preempts_reflexivity() {
        let c = subtype(&arr(top(), top()), &top()).unwrap();
        assert!(c.expr.alpha_eq(&Expr::lam("z", Expr::Unit)));
        let c = reflexivity_coercion(&top());
        assert!(c.expr.alpha_eq(&Expr::lam("z", Expr::Unit)));
        assert_eq!(c.rule_trace, ["top-R"]);
    }

    #[test]
    fn arrow_contravariance_with_intersection() {
        let a = SourceType::int();
        let b = SourceType::real();
        let c = SourceType::string();
        let co = subtype(&arr(a.clone(), c.clone()), &arr(SourceType::intersect(a, b), c)).unwrap();
        let expected = Expr::lam(
            "f",
            Expr::lam(
                "x",
                Expr::app(id(), Expr::app(Expr::var("f"), Expr::app(id(), Expr::var("x")))),
            ),
        );
        assert!(co.expr.alpha_eq(&expected), "{}", co.expr);
        assert_eq!(co.rule_trace, ["arr", "and-L1", "refl-atom", "refl-atom"]);
    }

    #[test]
    fn and_right_is_a_merge() {
        let co = subtype(&top(), &SourceType::intersect(top(), top())).unwrap();
        assert_eq!(co.expr.to_string(), "(fn x => ()) ,, (fn x => ())");
        assert!(matches!(co.expr, Expr::Merge(..)));
    }

    #[test]
    fn or_left_shape() {
        let co = subtype(&SourceType::union(SourceType::int(), SourceType::real()), &top()).unwrap();
        // ⊤R fires first on a ⊤ goal
        assert_eq!(co.rule_trace, ["top-R"]);
        let u = SourceType::union(SourceType::Base(BaseType::Nat), SourceType::Base(BaseType::Pos));
        let co = subtype(&u, &SourceType::int()).unwrap();
        match &co.expr {
            Expr::Lam(x, body) => match &**body {
                Expr::App(f, arg) => {
                    assert!(matches!(**f, Expr::Lam(_, ref m) if matches!(**m, Expr::Merge(..))));
                    assert_eq!(**arg, Expr::var(x.clone()));
                }
                _ => panic!("unexpected body {}", body),
            },
            _ => panic!("not a lambda"),
        }
    }

    #[test]
    fn negative_cases() {
        assert!(subtype(&top(), &arr(top(), top())).is_err());
        assert!(subtype_holds(&top(), &top()));
        let nat = SourceType::Base(BaseType::Nat);
        let pos = SourceType::Base(BaseType::Pos);
        assert!(subtype_holds(&pos, &nat));
        assert!(subtype_holds(&pos, &SourceType::int()));
        assert!(!subtype_holds(&nat, &pos));
        assert!(!subtype_holds(&SourceType::int(), &SourceType::real()));
    }

    #[test]
    fn records_and_lists_are_covariant() {
        let r = |t| SourceType::record("x", t);
        assert!(subtype_holds(&r(SourceType::Base(BaseType::Nat)), &r(SourceType::int())));
        assert!(!subtype_holds(&r(SourceType::int()), &SourceType::record("y", SourceType::int())));
        let l = |t| SourceType::list(t);
        assert!(subtype_holds(&l(SourceType::Base(BaseType::Pos)), &l(SourceType::int())));
    }
}
