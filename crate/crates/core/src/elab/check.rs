//! The bidirectional elaborator.
//!
//! `check` and `synth` build elaboration derivations directly. Subsumption
//! is realized by applying a coercion at a mode switch, which changes the
//! subject of the derivation: the derivation types the coerced expression,
//! never the original one through a `sub` rule.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::coerce::{and_elim, apply_coercion, arr_elim, arr_intro, merge, node, or_intro, var_node};
use super::derivation::{ElabDerivation, Rule};
use super::error::{TypeError, TypeErrorKind as K};
use crate::ast::names::fresh_name;
use crate::ast::{BaseType, EvalContext, Expr, Name, SourceType, Term, TypingContext};
use crate::subtyping::{atom_le, subtype};
use crate::surface::prelude::{arity, prim_target, prim_type};

/// Recursion bound for `check` and `synth`.
pub const MAX_DEPTH: usize = 600;

type R = Result<ElabDerivation, TypeError>;

#[derive(Clone, Debug)]
pub struct Elaborator {
    /// Whether mode switches may insert coercions.
    coerce: bool,
    depth: usize,
    /// Context indices bound by `fix`. Such variables stand for a
    /// non-value, so they never count as values.
    fix_bound: Vec<usize>,
}

impl Default for Elaborator {
    fn default() -> Self {
        Self::new()
    }
}

/// Checks `e` against `a` under `ctx`.
pub fn check(ctx: &TypingContext, e: &Expr, a: &SourceType) -> Result<(Term, ElabDerivation), TypeError> {
    let d = Elaborator::new().check(ctx, e, a)?;
    Ok((d.target.clone(), d))
}

/// Synthesizes a type for `e` under `ctx`.
pub fn synth(ctx: &TypingContext, e: &Expr) -> Result<(SourceType, Term, ElabDerivation), TypeError> {
    let d = Elaborator::new().synth(ctx, e)?;
    Ok((d.ty.clone(), d.target.clone(), d))
}

/// What a union elimination should do with its arms.
#[derive(Clone, Copy)]
enum Goal<'a> {
    Check(&'a SourceType),
    Synth,
}

fn literal_type(e: &Expr) -> Option<SourceType> {
    Some(match e {
        Expr::Int(_) => SourceType::int(),
        Expr::Real(_) => SourceType::real(),
        Expr::Str(_) => SourceType::string(),
        _ => return None,
    })
}

fn literal_fits(e: &Expr, ty: &SourceType) -> bool {
    use num_traits::Signed;
    match (e, ty) {
        (Expr::Unit, SourceType::Base(BaseType::Unit)) => true,
        (Expr::Int(_), SourceType::Base(BaseType::Int)) => true,
        (Expr::Int(n), SourceType::Base(BaseType::Nat)) => !n.is_negative(),
        (Expr::Int(n), SourceType::Base(BaseType::Pos)) => n.is_positive(),
        (Expr::Real(_), SourceType::Base(BaseType::Real)) => true,
        (Expr::Str(_), SourceType::Base(BaseType::Str)) => true,
        _ => false,
    }
}

fn literal_target(e: &Expr) -> Term {
    match e {
        Expr::Int(n) => Term::Int(n.clone()),
        Expr::Real(r) => Term::Real(r.clone()),
        Expr::Str(s) => Term::Str(s.clone()),
        _ => Term::Unit,
    }
}

impl Elaborator {
    pub fn new() -> Self {
        Elaborator { coerce: true, depth: 0, fix_bound: Vec::new() }
    }

    /// An elaborator whose mode switches never insert coercions.
    pub fn without_coercions() -> Self {
        Elaborator { coerce: false, ..Self::new() }
    }

    pub fn check(&mut self, ctx: &TypingContext, e: &Expr, a: &SourceType) -> R {
        if self.depth >= MAX_DEPTH {
            return Err(TypeError::new(e, K::TooDeep));
        }
        self.depth += 1;
        let r = self.check_inner(ctx, e, a);
        self.depth -= 1;
        r
    }

    pub fn synth(&mut self, ctx: &TypingContext, e: &Expr) -> R {
        if self.depth >= MAX_DEPTH {
            return Err(TypeError::new(e, K::TooDeep));
        }
        self.depth += 1;
        let r = self.synth_inner(ctx, e);
        self.depth -= 1;
        r
    }

    fn is_fix_bound(&self, ctx: &TypingContext, x: &str) -> bool {
        ctx.position(x).is_some_and(|i| self.fix_bound.contains(&i))
    }

    /// A value that stays a value when `fix`-bound variables are unrolled.
    fn stable_value(&self, ctx: &TypingContext, e: &Expr) -> bool {
        match e {
            Expr::Var(x) => !self.is_fix_bound(ctx, x),
            Expr::Unit | Expr::Lam(..) | Expr::Int(_) | Expr::Real(_) | Expr::Str(_) | Expr::Nil | Expr::Prim(_) => {
                true
            }
            Expr::Merge(a, b) | Expr::Cons(a, b) => self.stable_value(ctx, a) && self.stable_value(ctx, b),
            Expr::Record(_, a) => self.stable_value(ctx, a),
            Expr::App(f, a) => {
                matches!(&**f, Expr::Prim(p) if arity(p) == Some(2)) && self.stable_value(ctx, a)
            }
            _ => false,
        }
    }

    fn fresh(&self, base: &str, ctx: &TypingContext, avoid: &[&Expr]) -> Name {
        let mut taken: BTreeSet<Name> = ctx.entries().iter().map(|(x, _)| x.clone()).collect();
        for e in avoid {
            e.all_names(&mut taken);
        }
        fresh_name(base, |n| taken.contains(n))
    }

    fn check_inner(&mut self, ctx: &TypingContext, e: &Expr, a: &SourceType) -> R {
        if let SourceType::Intersect(a1, a2) = a {
            let d1 = self.check(ctx, e, a1)?;
            let d2 = self.check(ctx, e, a2)?;
            return Ok(self.and_intro(ctx, d1, d2, a));
        }

        if let Expr::Merge(e1, e2) = e {
            return self.check_merge(ctx, e1, e2, a);
        }

        let mut pending: Option<TypeError> = None;
        if let SourceType::Top = a {
            match self.synth(ctx, e) {
                Ok(d) if d.ty == SourceType::Top => return Ok(d),
                Ok(_) | Err(_) if self.stable_value(ctx, e) => {
                    return Ok(node(Rule::TopIntro, ctx, e.clone(), SourceType::Top, Term::Unit, Vec::new()));
                }
                Ok(d) => {
                    let z = self.fresh("u", ctx, &[e]);
                    let cz = ctx.extend(z.clone(), d.ty.clone());
                    let body = node(Rule::TopIntro, &cz, Expr::var(z.clone()), SourceType::Top, Term::Unit, Vec::new());
                    return Ok(direct_node(ctx, EvalContext::Hole, z, d, body));
                }
                Err(err) => pending = Some(err),
            }
        }

        match (e, a) {
            (Expr::Lam(x, body), SourceType::Arrow(a1, b1)) => {
                let d = self.check(&ctx.extend(x.clone(), (**a1).clone()), body, b1)?;
                return Ok(arr_intro(ctx, x, d, a1));
            }
            (Expr::Fix(x, body), _) => {
                let cx = ctx.extend(x.clone(), a.clone());
                self.fix_bound.push(ctx.len());
                let r = self.check(&cx, body, a);
                self.fix_bound.pop();
                let d = r?;
                let subject = Expr::fix(x.clone(), d.subject.clone());
                let target = Term::fix(x.clone(), d.target.clone());
                return Ok(node(Rule::Fix, ctx, subject, a.clone(), target, vec![d]));
            }
            (Expr::Record(l, p), SourceType::Record(l2, b)) if l == l2 => {
                let d = self.check(ctx, p, b)?;
                return Ok(record_intro(ctx, l, d));
            }
            (Expr::Nil, SourceType::List(_)) => {
                return Ok(node(Rule::NilIntro, ctx, Expr::Nil, a.clone(), Term::Nil, Vec::new()));
            }
            (Expr::Cons(h, t), SourceType::List(b)) => {
                let dh = self.check(ctx, h, b)?;
                let dt = self.check(ctx, t, a)?;
                return Ok(cons_intro(ctx, dh, dt, a));
            }
            _ if literal_fits(e, a) => {
                return Ok(node(Rule::Lit, ctx, e.clone(), a.clone(), literal_target(e), Vec::new()));
            }
            _ => {}
        }

        if let SourceType::Union(a1, a2) = a {
            for (k, ak) in [(1u8, a1), (2u8, a2)] {
                match self.check(ctx, e, ak) {
                    Ok(d) => return Ok(or_intro(k, d, a)),
                    Err(err) => {
                        pending.get_or_insert(err);
                    }
                }
            }
        }

        match e {
            Expr::Let(y, bound, body) => {
                let d0 = self.synth(ctx, bound)?;
                if let SourceType::Union(..) = d0.ty {
                    let frame = EvalContext::LetBound(y.clone(), Box::new(EvalContext::Hole), (**body).clone());
                    return self.elim_union(ctx, frame, d0, Goal::Check(a));
                }
                let d1 = self.check(&ctx.extend(y.clone(), d0.ty.clone()), body, a)?;
                return Ok(let_node(ctx, y, d0, d1));
            }
            Expr::ListCase { .. } => return self.list_case(ctx, e, Goal::Check(a)),
            Expr::App(f, arg) => return self.app(ctx, f, arg, Goal::Check(a)),
            Expr::Field(r, l) => {
                if let Ok(d0) = self.synth(ctx, r) {
                    if let SourceType::Union(..) = d0.ty {
                        let frame = EvalContext::Field(Box::new(EvalContext::Hole), l.clone());
                        return self.elim_union(ctx, frame, d0, Goal::Check(a));
                    }
                }
            }
            _ => {}
        }

        match self.synth(ctx, e) {
            Ok(d) => self.articulate(d, a),
            Err(err) => Err(match (err.kind, pending) {
                (K::CannotSynthesize, Some(p)) => p,
                (kind, _) => TypeError { subject: err.subject, kind },
            }),
        }
    }

    fn and_intro(&self, ctx: &TypingContext, d1: ElabDerivation, d2: ElabDerivation, a: &SourceType) -> ElabDerivation {
        let target = Term::pair(d1.target.clone(), d2.target.clone());
        if d1.subject.alpha_eq(&d2.subject) {
            let subject = d1.subject.clone();
            return node(Rule::AndIntro, ctx, subject, a.clone(), target, vec![d1, d2]);
        }
        // The premises inserted different coercions; type their merge.
        let (s1, s2) = (d1.subject.clone(), d2.subject.clone());
        let m1 = merge(1, d1, &s2);
        let m2 = merge(2, d2, &s1);
        node(Rule::AndIntro, ctx, Expr::merge(s1, s2), a.clone(), target, vec![m1, m2])
    }

    fn check_merge(&mut self, ctx: &TypingContext, e1: &Expr, e2: &Expr, a: &SourceType) -> R {
        let saved = self.coerce;
        let phases: &[bool] = if saved { &[false, true] } else { &[false] };
        let mut errors = (None, None);
        for &phase in phases {
            self.coerce = phase;
            let r1 = self.check(ctx, e1, a);
            let r = match r1 {
                Ok(d) => Ok(merge(1, d, e2)),
                Err(err1) => match self.check(ctx, e2, a) {
                    Ok(d) => Ok(merge(2, d, e1)),
                    Err(err2) => Err((err1, err2)),
                },
            };
            match r {
                Ok(d) => {
                    self.coerce = saved;
                    return Ok(d);
                }
                Err((x, y)) => errors = (Some(x), Some(y)),
            }
        }
        self.coerce = saved;
        let (Some(x), Some(y)) = errors else { unreachable!() };
        Err(TypeError::new(&Expr::merge(e1.clone(), e2.clone()), K::MergeBranches(Box::new(x), Box::new(y))))
    }

    fn synth_inner(&mut self, ctx: &TypingContext, e: &Expr) -> R {
        match e {
            Expr::Var(x) => match ctx.lookup(x) {
                Some(t) => Ok(var_node(ctx, x, t)),
                None => Err(TypeError::new(e, K::Unbound(x.clone()))),
            },
            Expr::Prim(p) => match (prim_type(p), prim_target(p)) {
                (Some(t), Some(m)) => Ok(node(Rule::Prim, ctx, e.clone(), t, m, Vec::new())),
                _ => Err(TypeError::new(e, K::Unbound(p.clone()))),
            },
            Expr::Anno(inner, t) => {
                let d = self.check(ctx, inner, t)?;
                let target = d.target.clone();
                Ok(node(Rule::Anno, ctx, Expr::anno(d.subject.clone(), t.clone()), t.clone(), target, vec![d]))
            }
            Expr::Unit => Ok(node(Rule::TopIntro, ctx, Expr::Unit, SourceType::Top, Term::Unit, Vec::new())),
            Expr::Int(_) | Expr::Real(_) | Expr::Str(_) => {
                let t = literal_type(e).expect("literal");
                Ok(node(Rule::Lit, ctx, e.clone(), t, literal_target(e), Vec::new()))
            }
            Expr::Lam(..) | Expr::Nil => Err(TypeError::new(e, K::CannotSynthesize)),
            Expr::Fix(..) => Err(TypeError::new(e, K::FixNeedsAnnotation)),
            Expr::Merge(e1, e2) => match self.synth(ctx, e1) {
                Ok(d) => Ok(merge(1, d, e2)),
                Err(err1) => match self.synth(ctx, e2) {
                    Ok(d) => Ok(merge(2, d, e1)),
                    Err(err2) => Err(TypeError::new(e, K::MergeBranches(Box::new(err1), Box::new(err2)))),
                },
            },
            Expr::Record(l, p) => {
                let d = self.synth(ctx, p)?;
                Ok(record_intro(ctx, l, d))
            }
            Expr::Field(r, l) => {
                let d = self.synth(ctx, r)?;
                let found = d.ty.clone();
                match self.field_search(ctx, d, l) {
                    Some(r) => r,
                    None => Err(TypeError::new(e, K::NoField { label: l.clone(), found })),
                }
            }
            Expr::Let(y, bound, body) => {
                let d0 = self.synth(ctx, bound)?;
                if let SourceType::Union(..) = d0.ty {
                    let frame = EvalContext::LetBound(y.clone(), Box::new(EvalContext::Hole), (**body).clone());
                    return self.elim_union(ctx, frame, d0, Goal::Synth);
                }
                let d1 = self.synth(&ctx.extend(y.clone(), d0.ty.clone()), body)?;
                Ok(let_node(ctx, y, d0, d1))
            }
            Expr::Cons(h, t) => {
                let dh = self.synth(ctx, h)?;
                let ty = SourceType::list(dh.ty.clone());
                let dt = self.check(ctx, t, &ty)?;
                Ok(cons_intro(ctx, dh, dt, &ty))
            }
            Expr::ListCase { .. } => self.list_case(ctx, e, Goal::Synth),
            Expr::App(f, a) => self.app(ctx, f, a, Goal::Synth),
        }
    }

    /// `∧E`-search for a record type with label `l`; unions are eliminated
    /// around the projection.
    fn field_search(&mut self, ctx: &TypingContext, d: ElabDerivation, l: &str) -> Option<R> {
        match &d.ty {
            SourceType::Record(l2, p) if l2 == l => {
                let ty = (**p).clone();
                let subject = Expr::field(d.subject.clone(), l);
                let target = Term::Field(Box::new(d.target.clone()), l.into());
                Some(Ok(node(Rule::RecordElim, ctx, subject, ty, target, vec![d])))
            }
            SourceType::Intersect(..) => {
                if let Some(Ok(r)) = self.field_search(ctx, and_elim(1, d.clone()), l) {
                    return Some(Ok(r));
                }
                self.field_search(ctx, and_elim(2, d), l)
            }
            SourceType::Union(..) => {
                let frame = EvalContext::Field(Box::new(EvalContext::Hole), l.into());
                Some(self.elim_union(ctx, frame, d, Goal::Synth))
            }
            _ => None,
        }
    }

    /// Finds a list component of `d`'s type by `∧E`-search.
    fn list_search(d: ElabDerivation) -> Option<ElabDerivation> {
        match &d.ty {
            SourceType::List(_) => Some(d),
            SourceType::Intersect(..) => {
                Self::list_search(and_elim(1, d.clone())).or_else(|| Self::list_search(and_elim(2, d)))
            }
            _ => None,
        }
    }

    fn list_case(&mut self, ctx: &TypingContext, e: &Expr, goal: Goal<'_>) -> R {
        let Expr::ListCase { scrut, nil, head, tail, cons } = e else { unreachable!() };
        let d0 = self.synth(ctx, scrut)?;
        if let SourceType::Union(..) = d0.ty {
            let frame = EvalContext::ListCase {
                inner: Box::new(EvalContext::Hole),
                nil: (**nil).clone(),
                head: head.clone(),
                tail: tail.clone(),
                cons: (**cons).clone(),
            };
            return self.elim_union(ctx, frame, d0, goal);
        }
        let found = d0.ty.clone();
        let Some(d0) = Self::list_search(d0) else {
            return Err(TypeError::new(scrut, K::NotAList(found)));
        };
        let SourceType::List(elem) = d0.ty.clone() else { unreachable!() };
        let dn = match goal {
            Goal::Check(a) => self.check(ctx, nil, a)?,
            Goal::Synth => self.synth(ctx, nil)?,
        };
        let ty = dn.ty.clone();
        let cx = ctx.extend(head.clone(), (*elem).clone()).extend(tail.clone(), d0.ty.clone());
        let dc = self.check(&cx, cons, &ty)?;
        let subject = Expr::ListCase {
            scrut: Box::new(d0.subject.clone()),
            nil: Box::new(dn.subject.clone()),
            head: head.clone(),
            tail: tail.clone(),
            cons: Box::new(dc.subject.clone()),
        };
        let target = Term::ListCase {
            scrut: Box::new(d0.target.clone()),
            nil: Box::new(dn.target.clone()),
            head: head.clone(),
            tail: tail.clone(),
            cons: Box::new(dc.target.clone()),
        };
        Ok(node(Rule::ListElim, ctx, subject, ty, target, vec![d0, dn, dc]))
    }

    fn app(&mut self, ctx: &TypingContext, f: &Expr, arg: &Expr, goal: Goal<'_>) -> R {
        let mut first_err = None;
        let df = match self.synth(ctx, f) {
            Ok(df) => {
                match self.apply_search(ctx, df.clone(), arg, goal) {
                    Ok(d) => return Ok(d),
                    Err(err) => first_err = Some(err),
                }
                Some(df)
            }
            Err(err) => {
                if !matches!(err.kind, K::CannotSynthesize) {
                    first_err = Some(err);
                }
                None
            }
        };
        let da = match self.synth(ctx, arg) {
            Ok(da) => da,
            Err(err) => return Err(first_err.unwrap_or(err)),
        };
        if let SourceType::Union(..) = da.ty {
            if self.stable_value(ctx, f) {
                let frame = EvalContext::AppArg(f.clone(), Box::new(EvalContext::Hole));
                return self.elim_union(ctx, frame, da, goal);
            }
            if let Some(df) = df {
                let frame = EvalContext::AppFun(Box::new(EvalContext::Hole), arg.clone());
                return self.direct(ctx, frame, df, goal);
            }
        }
        let app = Expr::app(f.clone(), arg.clone());
        match goal {
            Goal::Check(a) => {
                let fty = SourceType::arrow(da.ty.clone(), a.clone());
                match self.check(ctx, f, &fty) {
                    Ok(dfun) => Ok(arr_elim(dfun, da)),
                    Err(err) => Err(first_err.unwrap_or(err)),
                }
            }
            Goal::Synth => match f {
                Expr::Lam(x, body) => {
                    let db = self.synth(&ctx.extend(x.clone(), da.ty.clone()), body)?;
                    let dfun = arr_intro(ctx, x, db, &da.ty);
                    Ok(arr_elim(dfun, da))
                }
                _ => Err(first_err.unwrap_or_else(|| TypeError::new(&app, K::CannotSynthesize))),
            },
        }
    }

    /// Searches the synthesized type of the head for an arrow whose domain
    /// accepts `arg`, left to right through intersections.
    fn apply_search(&mut self, ctx: &TypingContext, df: ElabDerivation, arg: &Expr, goal: Goal<'_>) -> R {
        match &df.ty {
            SourceType::Arrow(dom, _) => {
                let da = self.check(ctx, arg, dom)?;
                let d = arr_elim(df, da);
                match goal {
                    Goal::Check(a) => self.articulate(d, a),
                    Goal::Synth => Ok(d),
                }
            }
            SourceType::Intersect(..) => match self.apply_search(ctx, and_elim(1, df.clone()), arg, goal) {
                Ok(d) => Ok(d),
                Err(err) => self.apply_search(ctx, and_elim(2, df), arg, goal).map_err(|_| err),
            },
            SourceType::Union(..) => {
                let frame = EvalContext::AppFun(Box::new(EvalContext::Hole), arg.clone());
                self.elim_union(ctx, frame, df, goal)
            }
            t => Err(TypeError::new(&df.subject, K::NotAFunction(t.clone()))),
        }
    }

    /// Turns a synthesized derivation into one at `goal`.
    fn articulate(&self, d: ElabDerivation, goal: &SourceType) -> R {
        if d.ty == *goal {
            return Ok(d);
        }
        if let Some(p) = project(&d, goal) {
            return Ok(p);
        }
        if self.coerce {
            if let Ok(c) = subtype(&d.ty, goal) {
                return Ok(apply_coercion(&c.derivation, d));
            }
        }
        Err(TypeError::mismatch(&d.subject, goal, &d.ty))
    }

    /// `∨E` on `d0` in the hole of `frame`.
    fn elim_union(&mut self, ctx: &TypingContext, frame: EvalContext, d0: ElabDerivation, goal: Goal<'_>) -> R {
        let SourceType::Union(a1, a2) = d0.ty.clone() else { unreachable!() };
        let shape = frame.plug(d0.subject.clone());
        let y = self.fresh("y", ctx, &[&shape]);
        let plugged = frame.plug(Expr::var(y.clone()));
        let mut arms = Vec::new();
        for ak in [&a1, &a2] {
            let ck = ctx.extend(y.clone(), (**ak).clone());
            arms.push(match goal {
                Goal::Check(a) => self.check(&ck, &plugged, a)?,
                Goal::Synth => self.synth(&ck, &plugged)?,
            });
        }
        let mut d2 = arms.pop().expect("two arms");
        let mut d1 = arms.pop().expect("two arms");
        if d1.ty != d2.ty {
            let ty = SourceType::union(d1.ty.clone(), d2.ty.clone());
            d1 = or_intro(1, d1, &ty);
            d2 = or_intro(2, d2, &ty);
        }
        let ty = d1.ty.clone();
        if d1.subject.alpha_eq(&d2.subject) {
            let is_value = |e: &Expr| self.stable_value(&d1.ctx, e);
            if let Some(frame2) = EvalContext::locate(&d1.subject, &y, &is_value) {
                let subject = frame2.plug(d0.subject.clone());
                let target = Term::case(d0.target.clone(), y.clone(), d1.target.clone(), y.clone(), d2.target.clone());
                return Ok(node(Rule::OrElim { frame: frame2, var: y }, ctx, subject, ty, target, vec![d0, d1, d2]));
            }
        }
        // The arms differ, or the variable is not in evaluation position:
        // eliminate through `(λy. s1,,s2) e0` and let each arm pick its
        // branch of the merge.
        let (s1, s2) = (d1.subject.clone(), d2.subject.clone());
        let lam = Expr::lam(y.clone(), Expr::merge(s1.clone(), s2.clone()));
        let mut new_arms = Vec::new();
        for (k, dk, ak) in [(1u8, d1, &a1), (2u8, d2, &a2)] {
            let ck = ctx.extend(y.clone(), (**ak).clone());
            let weak = dk.weaken(ck.len(), &[(y.clone(), (**ak).clone())]);
            let other = if k == 1 { &s2 } else { &s1 };
            let m = merge(k, weak, other);
            let l = arr_intro(&ck, &y, m, ak);
            new_arms.push(arr_elim(l, var_node(&ck, &y, ak)));
        }
        let d2 = new_arms.pop().expect("two arms");
        let d1 = new_arms.pop().expect("two arms");
        let frame2 = EvalContext::AppArg(lam.clone(), Box::new(EvalContext::Hole));
        let subject = frame2.plug(d0.subject.clone());
        let target = Term::case(d0.target.clone(), y.clone(), d1.target.clone(), y.clone(), d2.target.clone());
        Ok(node(Rule::OrElim { frame: frame2, var: y }, ctx, subject, ty, target, vec![d0, d1, d2]))
    }

    /// The `direct` rule on `d0` in the hole of `frame`.
    fn direct(&mut self, ctx: &TypingContext, frame: EvalContext, d0: ElabDerivation, goal: Goal<'_>) -> R {
        let shape = frame.plug(d0.subject.clone());
        let z = self.fresh("z", ctx, &[&shape]);
        let plugged = frame.plug(Expr::var(z.clone()));
        let cz = ctx.extend(z.clone(), d0.ty.clone());
        let d1 = match goal {
            Goal::Check(a) => self.check(&cz, &plugged, a)?,
            Goal::Synth => self.synth(&cz, &plugged)?,
        };
        let is_value = |e: &Expr| self.stable_value(&cz, e);
        match EvalContext::locate(&d1.subject, &z, &is_value) {
            Some(frame2) => Ok(direct_node(ctx, frame2, z, d0, d1)),
            None => {
                let dom = d0.ty.clone();
                Ok(arr_elim(arr_intro(ctx, &z, d1, &dom), d0))
            }
        }
    }
}

/// `∧E`, `∨I` and atomic subsumption, without coercions.
fn project(d: &ElabDerivation, goal: &SourceType) -> Option<ElabDerivation> {
    if d.ty == *goal {
        return Some(d.clone());
    }
    if let (SourceType::Base(p), SourceType::Base(q)) = (&d.ty, goal) {
        if atom_le(*p, *q) {
            let sub = node(Rule::SubAtom, &d.ctx, d.subject.clone(), goal.clone(), d.target.clone(), vec![d.clone()]);
            return Some(sub);
        }
    }
    if let SourceType::Intersect(..) = d.ty {
        for k in [1, 2] {
            if let Some(p) = project(&and_elim(k, d.clone()), goal) {
                return Some(p);
            }
        }
    }
    if let SourceType::Union(g1, g2) = goal {
        for (k, gk) in [(1, g1), (2, g2)] {
            if let Some(p) = project(d, gk) {
                return Some(or_intro(k, p, goal));
            }
        }
    }
    None
}

fn direct_node(ctx: &TypingContext, frame: EvalContext, z: Name, d0: ElabDerivation, d1: ElabDerivation) -> ElabDerivation {
    let subject = frame.plug(d0.subject.clone());
    let ty = d1.ty.clone();
    let target = Term::app(Term::lam(z.clone(), d1.target.clone()), d0.target.clone());
    node(Rule::Direct { frame, var: z }, ctx, subject, ty, target, vec![d0, d1])
}

fn record_intro(ctx: &TypingContext, l: &str, d: ElabDerivation) -> ElabDerivation {
    let subject = Expr::record(l, d.subject.clone());
    let ty = SourceType::record(l, d.ty.clone());
    let target = Term::Record(l.into(), Box::new(d.target.clone()));
    node(Rule::RecordIntro, ctx, subject, ty, target, vec![d])
}

fn cons_intro(ctx: &TypingContext, dh: ElabDerivation, dt: ElabDerivation, ty: &SourceType) -> ElabDerivation {
    let subject = Expr::cons(dh.subject.clone(), dt.subject.clone());
    let target = Term::cons(dh.target.clone(), dt.target.clone());
    node(Rule::ConsIntro, ctx, subject, ty.clone(), target, vec![dh, dt])
}

fn let_node(ctx: &TypingContext, y: &str, d0: ElabDerivation, d1: ElabDerivation) -> ElabDerivation {
    let subject = Expr::let_(y, d0.subject.clone(), d1.subject.clone());
    let ty = d1.ty.clone();
    let target = Term::let_(y, d0.target.clone(), d1.target.clone());
    node(Rule::Let, ctx, subject, ty, target, vec![d0, d1])
}
