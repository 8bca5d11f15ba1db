//! The nondeterministic source step relation `e ⤳ e′`: candidate
//! enumeration and single-step validation.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::ast::{EvalContext, Expr};
use crate::surface::prelude::{arity, source_delta};

/// Rules that fire at the hole of an evaluation context.
pub const AXIOMS: [&str; 11] = [
    "beta",
    "fix",
    "unmerge-left",
    "unmerge-right",
    "split",
    "let",
    "anno-erase",
    "field",
    "lcase-nil",
    "lcase-cons",
    "delta",
];

/// Congruence rules, one per evaluation-context frame.
pub const CONGRUENCES: [&str; 10] =
    ["app1", "app2", "merge1", "merge2", "let1", "rec1", "field1", "cons1", "cons2", "lcase1"];

#[derive(Clone, Debug, PartialEq)]
pub struct SourceStep {
    pub from: Expr,
    pub to: Expr,
    /// The axiom applied at the redex.
    pub rule: &'static str,
    /// Position of the redex.
    pub context: EvalContext,
    /// Text printed by a `print` δ-step.
    pub output: Option<String>,
}

impl SourceStep {
    /// Name of the outermost rule: the congruence of the first frame, or the
    /// axiom when the redex is the whole term.
    pub fn outer_rule(&self) -> &'static str {
        match &self.context {
            EvalContext::Hole => self.rule,
            c => frame_rule(c),
        }
    }

    /// The same step under `outer`.
    pub fn lift(&self, outer: &EvalContext) -> SourceStep {
        SourceStep {
            from: outer.plug(self.from.clone()),
            to: outer.plug(self.to.clone()),
            rule: self.rule,
            context: outer.compose(&self.context),
            output: self.output.clone(),
        }
    }
}

impl fmt::Display for SourceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.to)
    }
}

fn frame_rule(c: &EvalContext) -> &'static str {
    match c {
        EvalContext::Hole => "hole",
        EvalContext::AppFun(..) => "app1",
        EvalContext::AppArg(..) => "app2",
        EvalContext::MergeL(..) => "merge1",
        EvalContext::MergeR(..) => "merge2",
        EvalContext::LetBound(..) => "let1",
        EvalContext::Record(..) => "rec1",
        EvalContext::Field(..) => "field1",
        EvalContext::ConsHead(..) => "cons1",
        EvalContext::ConsTail(..) => "cons2",
        EvalContext::ListCase { .. } => "lcase1",
    }
}

/// Every split of `e` into an evaluation context and the subterm at its
/// hole, outermost first.
pub fn decompose(e: &Expr) -> Vec<(EvalContext, Expr)> {
    let mut out = vec![(EvalContext::Hole, e.clone())];
    let mut under = |frame: &dyn Fn(EvalContext) -> EvalContext, inner: &Expr| {
        for (c, r) in decompose(inner) {
            out.push((frame(c), r));
        }
    };
    match e {
        Expr::App(f, a) => {
            under(&|c| EvalContext::AppFun(Box::new(c), (**a).clone()), f);
            if f.is_value() {
                under(&|c| EvalContext::AppArg((**f).clone(), Box::new(c)), a);
            }
        }
        Expr::Merge(a, b) => {
            under(&|c| EvalContext::MergeL(Box::new(c), (**b).clone()), a);
            under(&|c| EvalContext::MergeR((**a).clone(), Box::new(c)), b);
        }
        Expr::Let(x, a, b) => under(&|c| EvalContext::LetBound(x.clone(), Box::new(c), (**b).clone()), a),
        Expr::Record(l, a) => under(&|c| EvalContext::Record(l.clone(), Box::new(c)), a),
        Expr::Field(a, l) => under(&|c| EvalContext::Field(Box::new(c), l.clone()), a),
        Expr::Cons(h, t) => {
            under(&|c| EvalContext::ConsHead(Box::new(c), (**t).clone()), h);
            if h.is_value() {
                under(&|c| EvalContext::ConsTail((**h).clone(), Box::new(c)), t);
            }
        }
        Expr::ListCase { scrut, nil, head, tail, cons } => under(
            &|c| EvalContext::ListCase {
                inner: Box::new(c),
                nil: (**nil).clone(),
                head: head.clone(),
                tail: tail.clone(),
                cons: (**cons).clone(),
            },
            scrut,
        ),
        _ => {}
    }
    out
}

pub fn plug(c: &EvalContext, e: Expr) -> Expr {
    c.plug(e)
}

/// Result of an axiom at the root of `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct Contraction {
    pub rule: &'static str,
    pub to: Expr,
    pub output: Option<String>,
}

/// All axiom instances with `r` as the redex, split excluded.
pub fn contractions(r: &Expr) -> Vec<Contraction> {
    let one = |rule, to| vec![Contraction { rule, to, output: None }];
    match r {
        Expr::App(f, a) => {
            if let Expr::Lam(x, body) = &**f {
                if a.is_value() {
                    return one("beta", body.subst(x, a));
                }
            }
            delta_contraction(r).into_iter().collect()
        }
        Expr::Fix(x, body) => one("fix", body.subst(x, r)),
        Expr::Merge(a, b) => vec![
            Contraction { rule: "unmerge-left", to: (**a).clone(), output: None },
            Contraction { rule: "unmerge-right", to: (**b).clone(), output: None },
        ],
        Expr::Let(x, a, b) if a.is_value() => one("let", b.subst(x, a)),
        Expr::Anno(a, _) => one("anno-erase", (**a).clone()),
        Expr::Field(a, l) => match &**a {
            Expr::Record(k, v) if k == l && v.is_value() => one("field", (**v).clone()),
            _ => Vec::new(),
        },
        Expr::ListCase { scrut, nil, head, tail, cons } => match &**scrut {
            Expr::Nil => one("lcase-nil", (**nil).clone()),
            Expr::Cons(h, t) if h.is_value() && t.is_value() => {
                let fresh = crate::ast::names::fresh_name(tail, |n| h.occurs_free(n) || cons.occurs_free(n));
                // rename the tail binder first so the head cannot capture it
                let body = cons.subst(tail, &Expr::var(fresh.clone())).subst(head, h).subst(&fresh, t);
                one("lcase-cons", body)
            }
            _ => Vec::new(),
        },
        _ => Vec::new(),
    }
}

fn delta_contraction(r: &Expr) -> Option<Contraction> {
    let (name, args) = match r {
        Expr::App(f, a) => match &**f {
            Expr::Prim(p) if arity(p) == Some(1) => (p, vec![(**a).clone()]),
            Expr::App(g, a0) => match &**g {
                Expr::Prim(p) if arity(p) == Some(2) => (p, vec![(**a0).clone(), (**a).clone()]),
                _ => return None,
            },
            _ => return None,
        },
        _ => return None,
    };
    match source_delta(name, &args)? {
        Ok((to, output)) => Some(Contraction { rule: "delta", to, output }),
        Err(_) => None,
    }
}

/// One-step successors of `e`. `split` is offered only at the root.
pub fn source_step_candidates(e: &Expr, include_split: bool) -> Vec<SourceStep> {
    let mut out = Vec::new();
    for (c, r) in decompose(e) {
        for k in contractions(&r) {
            out.push(SourceStep { from: e.clone(), to: c.plug(k.to), rule: k.rule, context: c.clone(), output: k.output });
        }
    }
    if include_split {
        out.push(SourceStep {
            from: e.clone(),
            to: Expr::merge(e.clone(), e.clone()),
            rule: "split",
            context: EvalContext::Hole,
            output: None,
        });
    }
    out
}

fn axiom_holds(from: &Expr, to: &Expr, rule: &str) -> bool {
    if rule == "split" {
        return matches!(to, Expr::Merge(a, b) if a.alpha_eq(from) && b.alpha_eq(from));
    }
    contractions(from).iter().any(|k| k.rule == rule && k.to.alpha_eq(to))
}

/// `Some(rule)` when `(from, to)` goes through the frame at the root of
/// both, with the remaining parts unchanged.
fn congruence<'a>(from: &'a Expr, to: &'a Expr) -> Vec<(&'static str, &'a Expr, &'a Expr)> {
    let mut out = Vec::new();
    match (from, to) {
        (Expr::App(f, a), Expr::App(f2, a2)) => {
            if a.alpha_eq(a2) {
                out.push(("app1", &**f, &**f2));
            }
            if f.alpha_eq(f2) && f.is_value() {
                out.push(("app2", &**a, &**a2));
            }
        }
        (Expr::Merge(a, b), Expr::Merge(a2, b2)) => {
            if b.alpha_eq(b2) {
                out.push(("merge1", &**a, &**a2));
            }
            if a.alpha_eq(a2) {
                out.push(("merge2", &**b, &**b2));
            }
        }
        (Expr::Let(x, a, b), Expr::Let(x2, a2, b2)) => {
            if Expr::lam(x.clone(), (**b).clone()).alpha_eq(&Expr::lam(x2.clone(), (**b2).clone())) {
                out.push(("let1", &**a, &**a2));
            }
        }
        (Expr::Record(l, a), Expr::Record(l2, a2)) if l == l2 => out.push(("rec1", &**a, &**a2)),
        (Expr::Field(a, l), Expr::Field(a2, l2)) if l == l2 => out.push(("field1", &**a, &**a2)),
        (Expr::Cons(h, t), Expr::Cons(h2, t2)) => {
            if t.alpha_eq(t2) {
                out.push(("cons1", &**h, &**h2));
            }
            if h.alpha_eq(h2) && h.is_value() {
                out.push(("cons2", &**t, &**t2));
            }
        }
        (
            Expr::ListCase { scrut, nil, head, tail, cons },
            Expr::ListCase { scrut: s2, nil: n2, head: h2, tail: t2, cons: c2 },
        ) => {
            let arms = |n: &Expr, h: &str, t: &str, c: &Expr| {
                Expr::merge(n.clone(), Expr::lam(h, Expr::lam(t, c.clone())))
            };
            if arms(nil, head, tail, cons).alpha_eq(&arms(n2, h2, t2, c2)) {
                out.push(("lcase1", &**scrut, &**s2));
            }
        }
        _ => {}
    }
    out
}

fn step_holds(from: &Expr, to: &Expr, rule: Option<&str>) -> bool {
    let axioms_ok = match rule {
        Some(r) => axiom_holds(from, to, r),
        None => AXIOMS.iter().any(|r| axiom_holds(from, to, r)),
    };
    axioms_ok || congruence(from, to).into_iter().any(|(_, a, b)| step_holds(a, b, rule))
}

/// Whether `from ⤳ to` is an instance of `rule`. An axiom name may fire
/// under any evaluation context; a congruence name fixes the outermost
/// frame and allows any rule beneath it. `split` is accepted anywhere.
pub fn check_source_step(from: &Expr, to: &Expr, rule: &str) -> bool {
    if AXIOMS.contains(&rule) {
        return step_holds(from, to, Some(rule));
    }
    if CONGRUENCES.contains(&rule) {
        return congruence(from, to).into_iter().any(|(r, a, b)| r == rule && step_holds(a, b, None));
    }
    false
}

/// Brute-force completeness check: tries every axiom at every subterm
/// position, keeps the results the validator accepts, and reports one that
/// `source_step_candidates` misses. Split is excluded.
pub fn audit_candidates(e: &Expr) -> Result<(), String> {
    let found = source_step_candidates(e, false);
    for (to, rule) in rewrite_everywhere(e) {
        if rule == "split" || !check_source_step(e, &to, rule) {
            continue;
        }
        if !found.iter().any(|s| s.rule == rule && s.to.alpha_eq(&to)) {
            return Err(alloc::format!("{} ⤳ {} by {} is not a candidate", e, to, rule));
        }
    }
    Ok(())
}

// Rewrites one subterm anywhere, including under binders.
fn rewrite_everywhere(e: &Expr) -> Vec<(Expr, &'static str)> {
    let mut out: Vec<(Expr, &'static str)> = contractions(e).into_iter().map(|k| (k.to, k.rule)).collect();
    let mut inside = |sub: &Expr, rebuild: &dyn Fn(Expr) -> Expr| {
        for (s, r) in rewrite_everywhere(sub) {
            out.push((rebuild(s), r));
        }
    };
    match e {
        Expr::Lam(x, b) => inside(b, &|s| Expr::lam(x.clone(), s)),
        Expr::Fix(x, b) => inside(b, &|s| Expr::fix(x.clone(), s)),
        Expr::App(f, a) => {
            inside(f, &|s| Expr::app(s, (**a).clone()));
            inside(a, &|s| Expr::app((**f).clone(), s));
        }
        Expr::Merge(a, b) => {
            inside(a, &|s| Expr::merge(s, (**b).clone()));
            inside(b, &|s| Expr::merge((**a).clone(), s));
        }
        Expr::Record(l, a) => inside(a, &|s| Expr::record(l.clone(), s)),
        Expr::Field(a, l) => inside(a, &|s| Expr::field(s, l.clone())),
        Expr::Let(x, a, b) => {
            inside(a, &|s| Expr::let_(x.clone(), s, (**b).clone()));
            inside(b, &|s| Expr::let_(x.clone(), (**a).clone(), s));
        }
        Expr::Anno(a, t) => inside(a, &|s| Expr::anno(s, t.clone())),
        Expr::Cons(h, t) => {
            inside(h, &|s| Expr::cons(s, (**t).clone()));
            inside(t, &|s| Expr::cons((**h).clone(), s));
        }
        Expr::ListCase { scrut, nil, head, tail, cons } => {
            let mk = |s: Expr, n: Expr, c: Expr| Expr::ListCase {
                scrut: Box::new(s),
                nil: Box::new(n),
                head: head.clone(),
                tail: tail.clone(),
                cons: Box::new(c),
            };
            inside(scrut, &|s| mk(s, (**nil).clone(), (**cons).clone()));
            inside(nil, &|s| mk((**scrut).clone(), s, (**cons).clone()));
            inside(cons, &|s| mk((**scrut).clone(), (**nil).clone(), s));
        }
        _ => {}
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::read_expr;
    use alloc::string::ToString;

    fn ex(s: &str) -> Expr {
        read_expr(s, false).unwrap()
    }

    fn shown(e: &str, split: bool) -> Vec<String> {
        source_step_candidates(&ex(e), split).iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn unmerge_both_ways() {
        assert_eq!(shown("() ,, ()", false), ["unmerge-left: ()", "unmerge-right: ()"]);
    }

    #[test]
    fn beta_on_identity() {
        assert_eq!(shown("(fn x => x) ()", false), ["beta: ()"]);
    }

    #[test]
    fn split_only_on_request_and_at_root() {
        assert_eq!(shown("()", true), ["split: () ,, ()"]);
        assert!(shown("()", false).is_empty());
    }

    #[test]
    fn validator_examples() {
        assert!(check_source_step(&ex("(),,()"), &ex("()"), "unmerge-left"));
        assert!(check_source_step(&ex("()"), &ex("(),,()"), "split"));
        assert!(!check_source_step(&ex("()"), &ex("fn x => x"), "beta"));
    }

    #[test]
    fn split_inside_merge_is_valid() {
        assert!(check_source_step(&ex("() ,, (fn x => x)"), &ex("(() ,, ()) ,, (fn x => x)"), "split"));
        assert!(check_source_step(&ex("() ,, (fn x => x)"), &ex("(() ,, ()) ,, (fn x => x)"), "merge1"));
    }

    #[test]
    fn right_merge_steps_without_left_value() {
        let e = ex("((fn x => x) ()) ,, ((fn y => y) ())");
        let rules: Vec<_> = source_step_candidates(&e, false).iter().map(|s| s.outer_rule()).collect();
        assert!(rules.contains(&"merge2"));
    }

    #[test]
    fn application_argument_waits_for_value_head() {
        let e = ex("((fn x => x) ,, ()) ((fn y => y) ())");
        for s in source_step_candidates(&e, false) {
            assert!(check_source_step(&s.from, &s.to, s.outer_rule()));
            assert!(check_source_step(&s.from, &s.to, s.rule));
        }
    }

    #[test]
    fn decompose_then_plug() {
        let e = ex("(() ,, ()) ((fn x => x) ())");
        for (c, r) in decompose(&e) {
            assert_eq!(plug(&c, r), e);
        }
        assert!(decompose(&ex("(),,()")).contains(&(EvalContext::MergeL(Box::new(EvalContext::Hole), Expr::Unit), Expr::Unit)));
    }

    #[test]
    fn extension_rules() {
        let prelude = |s: &str| read_expr(s, true).unwrap();
        let e = prelude("add 1 2");
        let steps = source_step_candidates(&e, false);
        assert_eq!(steps[0].to_string(), "delta: 3");
        let e = prelude("let x = 1 in x end");
        assert_eq!(source_step_candidates(&e, false)[0].to_string(), "let: 1");
        let e = prelude("{a = 1}.a");
        assert_eq!(source_step_candidates(&e, false)[0].to_string(), "field: 1");
    }

    #[test]
    fn audit_small_terms() {
        for s in ["(fn x => x) ()", "() ,, (fn x => x ,, x) ()", "fix f => f", "(fn x => fn y => x) () ()"] {
            audit_candidates(&ex(s)).unwrap();
        }
    }
}
