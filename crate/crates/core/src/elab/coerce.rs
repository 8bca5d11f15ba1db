//! Typing derivations for coercions, read off the subtyping derivation.
//!
//! Applying the coercion of `A ≤ B` to an expression of type `A` yields a
//! derivation at `B` that never uses subsumption.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use super::derivation::{ElabDerivation, Rule};
use crate::ast::{EvalContext, Expr, SourceType, Term, TypingContext};
use crate::subtyping::{SubDerivation, SubRule};

pub(crate) fn node(
    rule: Rule,
    ctx: &TypingContext,
    subject: Expr,
    ty: SourceType,
    target: Term,
    children: Vec<ElabDerivation>,
) -> ElabDerivation {
    ElabDerivation { rule, ctx: ctx.clone(), subject, ty, target, children }
}

pub(crate) fn var_node(ctx: &TypingContext, x: &str, ty: &SourceType) -> ElabDerivation {
    node(Rule::Var, ctx, Expr::var(x), ty.clone(), Term::var(x), Vec::new())
}

pub(crate) fn and_elim(k: u8, d: ElabDerivation) -> ElabDerivation {
    let SourceType::Intersect(a1, a2) = &d.ty else { panic!("and_elim on {}", d.ty) };
    let ty = if k == 1 { (**a1).clone() } else { (**a2).clone() };
    node(Rule::AndElim(k), &d.ctx.clone(), d.subject.clone(), ty, Term::proj(k, d.target.clone()), vec![d])
}

pub(crate) fn or_intro(k: u8, d: ElabDerivation, ty: &SourceType) -> ElabDerivation {
    node(Rule::OrIntro(k), &d.ctx.clone(), d.subject.clone(), ty.clone(), Term::inj(k, d.target.clone()), vec![d])
}

pub(crate) fn arr_intro(ctx: &TypingContext, x: &str, body: ElabDerivation, dom: &SourceType) -> ElabDerivation {
    let ty = SourceType::arrow(dom.clone(), body.ty.clone());
    let subject = Expr::lam(x, body.subject.clone());
    let target = Term::lam(x, body.target.clone());
    node(Rule::ArrIntro, ctx, subject, ty, target, vec![body])
}

pub(crate) fn arr_elim(f: ElabDerivation, a: ElabDerivation) -> ElabDerivation {
    let SourceType::Arrow(_, cod) = &f.ty else { panic!("arr_elim on {}", f.ty) };
    let ty = (**cod).clone();
    let subject = Expr::app(f.subject.clone(), a.subject.clone());
    let target = Term::app(f.target.clone(), a.target.clone());
    node(Rule::ArrElim, &f.ctx.clone(), subject, ty, target, vec![f, a])
}

/// `merge_k` over `d`, with `other` as the unused branch.
pub(crate) fn merge(k: u8, d: ElabDerivation, other: &Expr) -> ElabDerivation {
    let subject = if k == 1 {
        Expr::merge(d.subject.clone(), other.clone())
    } else {
        Expr::merge(other.clone(), d.subject.clone())
    };
    node(Rule::Merge(k), &d.ctx.clone(), subject, d.ty.clone(), d.target.clone(), vec![d])
}

/// Derivation of `c e : B` where `c` is the coercion of `s` and `arg`
/// types `e : A`.
pub fn apply_coercion(s: &SubDerivation, arg: ElabDerivation) -> ElabDerivation {
    apply_with(s, arg, &|d| d)
}

// `wrap` turns a derivation of a component coercion into a derivation of
// the whole head, re-adding the merges of enclosing `and-R` steps.
fn apply_with(s: &SubDerivation, arg: ElabDerivation, wrap: &dyn Fn(ElabDerivation) -> ElabDerivation) -> ElabDerivation {
    match s.rule {
        SubRule::AndR => {
            let c1 = s.children[0].coercion();
            let c2 = s.children[1].coercion();
            let d1 = apply_with(&s.children[0], arg.clone(), &|d| wrap(merge(1, d, &c2)));
            let d2 = apply_with(&s.children[1], arg, &|d| wrap(merge(2, d, &c1)));
            let target = Term::pair(d1.target.clone(), d2.target.clone());
            node(Rule::AndIntro, &d1.ctx.clone(), d1.subject.clone(), s.target.clone(), target, vec![d1, d2])
        }
        SubRule::AndL(k) => apply_with(&s.children[0], and_elim(k, arg), wrap),
        SubRule::OrR(k) => {
            let d = apply_with(&s.children[0], arg, wrap);
            or_intro(k, d, &s.target)
        }
        _ => {
            let head = wrap(coercion_derivation(&arg.ctx, s));
            arr_elim(head, arg)
        }
    }
}

/// Derivation of `Γ ⊢ c : A → B` for a coercion that is a λ or an
/// annotated fixed point, that is, for every root rule except `and-R`,
/// `and-L` and `or-R`.
pub fn coercion_derivation(ctx: &TypingContext, s: &SubDerivation) -> ElabDerivation {
    let (a, b) = (&s.source, &s.target);
    match s.rule {
        SubRule::TopR => {
            let c1 = ctx.extend("x", a.clone());
            let body = node(Rule::TopIntro, &c1, Expr::Unit, SourceType::Top, Term::Unit, Vec::new());
            arr_intro(ctx, "x", body, a)
        }
        SubRule::Atom(same) => {
            let c1 = ctx.extend("x", a.clone());
            let mut body = var_node(&c1, "x", a);
            if !same {
                body = node(Rule::SubAtom, &c1, Expr::var("x"), b.clone(), Term::var("x"), vec![body]);
            }
            arr_intro(ctx, "x", body, a)
        }
        SubRule::Arr => {
            let c1 = ctx.extend("f", a.clone());
            let SourceType::Arrow(b1, _) = b else { unreachable!() };
            let c2 = c1.extend("x", (**b1).clone());
            let inner = apply_coercion(&s.children[0], var_node(&c2, "x", b1));
            let fapp = arr_elim(var_node(&c2, "f", a), inner);
            let outer = apply_coercion(&s.children[1], fapp);
            let lam_x = arr_intro(&c1, "x", outer, b1);
            arr_intro(ctx, "f", lam_x, a)
        }
        SubRule::Record => {
            let SourceType::Record(l, _) = a else { unreachable!() };
            let c1 = ctx.extend("x", a.clone());
            let vx = var_node(&c1, "x", a);
            let payload_ty = match a {
                SourceType::Record(_, p) => (**p).clone(),
                _ => unreachable!(),
            };
            let field = node(
                Rule::RecordElim,
                &c1,
                Expr::field(Expr::var("x"), l.clone()),
                payload_ty,
                Term::Field(Box::new(Term::var("x")), l.clone()),
                vec![vx],
            );
            let app = apply_coercion(&s.children[0], field);
            let rec = node(
                Rule::RecordIntro,
                &c1,
                Expr::record(l.clone(), app.subject.clone()),
                SourceType::record(l.clone(), app.ty.clone()),
                Term::Record(l.clone(), Box::new(app.target.clone())),
                vec![app],
            );
            arr_intro(ctx, "x", rec, a)
        }
        SubRule::OrL => {
            let SourceType::Union(a1, a2) = a else { unreachable!() };
            let c1 = ctx.extend("x", a.clone());
            let lam_y = match s.coercion() {
                Expr::Lam(_, body) => match *body {
                    Expr::App(f, _) => *f,
                    _ => unreachable!(),
                },
                _ => unreachable!(),
            };
            let Expr::Lam(_, ref branches) = lam_y else { unreachable!() };
            let Expr::Merge(ref m1, ref m2) = **branches else { unreachable!() };
            let mut arms = Vec::new();
            for (k, ak) in [(1u8, a1), (2u8, a2)] {
                let ck = c1.extend("x", (**ak).clone());
                let cy = ck.extend("y", (**ak).clone());
                let applied = apply_coercion(&s.children[k as usize - 1], var_node(&cy, "y", ak));
                let other = if k == 1 { (**m2).clone() } else { (**m1).clone() };
                let merged = merge(k, applied, &other);
                let lam = arr_intro(&ck, "y", merged, ak);
                arms.push(arr_elim(lam, var_node(&ck, "x", ak)));
            }
            let scrut = var_node(&c1, "x", a);
            let frame = EvalContext::AppArg(lam_y.clone(), Box::new(EvalContext::Hole));
            let target = Term::case(
                Term::var("x"),
                "x",
                arms[0].target.clone(),
                "x",
                arms[1].target.clone(),
            );
            let subject = Expr::app(lam_y, Expr::var("x"));
            let mut children = vec![scrut];
            children.extend(arms);
            let body = node(Rule::OrElim { frame, var: "x".into() }, &c1, subject, b.clone(), target, children);
            arr_intro(ctx, "x", body, a)
        }
        SubRule::List => {
            let (SourceType::List(a0), SourceType::List(_)) = (a, b) else { unreachable!() };
            let fun_ty = SourceType::arrow(a.clone(), b.clone());
            let c1 = ctx.extend("m", fun_ty.clone());
            let c2 = c1.extend("l", a.clone());
            let c3 = c2.extend("h", (**a0).clone()).extend("t", a.clone());
            let scrut = var_node(&c2, "l", a);
            let nil = node(Rule::NilIntro, &c2, Expr::Nil, b.clone(), Term::Nil, Vec::new());
            let head = apply_coercion(&s.children[0], var_node(&c3, "h", a0));
            let tail = arr_elim(var_node(&c3, "m", &fun_ty), var_node(&c3, "t", a));
            let cons = node(
                Rule::ConsIntro,
                &c3,
                Expr::cons(head.subject.clone(), tail.subject.clone()),
                b.clone(),
                Term::cons(head.target.clone(), tail.target.clone()),
                vec![head, tail],
            );
            let lcase_subject = Expr::ListCase {
                scrut: Box::new(Expr::var("l")),
                nil: Box::new(Expr::Nil),
                head: "h".into(),
                tail: "t".into(),
                cons: Box::new(cons.subject.clone()),
            };
            let lcase_target = Term::ListCase {
                scrut: Box::new(Term::var("l")),
                nil: Box::new(Term::Nil),
                head: "h".into(),
                tail: "t".into(),
                cons: Box::new(cons.target.clone()),
            };
            let lcase = node(Rule::ListElim, &c2, lcase_subject, b.clone(), lcase_target, vec![scrut, nil, cons]);
            let lam = arr_intro(&c1, "l", lcase, a);
            let fix = node(
                Rule::Fix,
                ctx,
                Expr::fix("m", lam.subject.clone()),
                fun_ty.clone(),
                Term::fix("m", lam.target.clone()),
                vec![lam],
            );
            node(
                Rule::Anno,
                ctx,
                Expr::anno(fix.subject.clone(), fun_ty.clone()),
                fun_ty,
                fix.target.clone(),
                vec![fix],
            )
        }
        SubRule::AndR | SubRule::AndL(_) | SubRule::OrR(_) => {
            panic!("{} coercions are not functions on their own", s.rule.name())
        }
    }
}

/// Whether `coercion_derivation` applies to the root rule.
pub fn has_function_derivation(s: &SubDerivation) -> bool {
    !matches!(s.rule, SubRule::AndR | SubRule::AndL(_) | SubRule::OrR(_))
}
