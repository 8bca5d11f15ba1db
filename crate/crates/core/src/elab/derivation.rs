//! Rule-labelled derivations of `Γ ⊢ e : A ↪ M`, a schema validator, and
//! the erase/reelaborate pair.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::ast::{EvalContext, Expr, Name, SourceType, Term, TypingContext};
use crate::subtyping::atom_le;
use crate::surface::prelude::{prim_target, prim_type};

/// One schema of the elaboration rules, plus the data a schema needs that
/// the subject does not determine.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Var,
    /// `merge_k`.
    Merge(u8),
    Fix,
    TopIntro,
    ArrIntro,
    ArrElim,
    AndIntro,
    /// `∧E_k`.
    AndElim(u8),
    /// `∨I_k`.
    OrIntro(u8),
    /// `Γ ⊢ e0 : A1∨A2` and `Γ, x:A_k ⊢ E[x] : C` give `Γ ⊢ E[e0] : C`.
    OrElim { frame: EvalContext, var: Name },
    /// `Γ ⊢ e0 : A` and `Γ, x:A ⊢ E[x] : C` give `Γ ⊢ E[e0] : C`.
    Direct { frame: EvalContext, var: Name },
    Let,
    Lit,
    Prim,
    Anno,
    /// Atomic subsumption along `pos ≤ nat ≤ int`; all three share one
    /// target type, so no coercion is needed.
    SubAtom,
    RecordIntro,
    RecordElim,
    NilIntro,
    ConsIntro,
    ListElim,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Var => "var",
            Rule::Merge(1) => "merge1",
            Rule::Merge(_) => "merge2",
            Rule::Fix => "fix",
            Rule::TopIntro => "topI",
            Rule::ArrIntro => "arrI",
            Rule::ArrElim => "arrE",
            Rule::AndIntro => "andI",
            Rule::AndElim(1) => "andE1",
            Rule::AndElim(_) => "andE2",
            Rule::OrIntro(1) => "orI1",
            Rule::OrIntro(_) => "orI2",
            Rule::OrElim { .. } => "orE",
            Rule::Direct { .. } => "direct",
            Rule::Let => "let",
            Rule::Lit => "lit",
            Rule::Prim => "prim",
            Rule::Anno => "anno",
            Rule::SubAtom => "sub-atom",
            Rule::RecordIntro => "recordI",
            Rule::RecordElim => "recordE",
            Rule::NilIntro => "nilI",
            Rule::ConsIntro => "consI",
            Rule::ListElim => "listE",
        }
    }

    /// Whether two rules are the same schema instance up to the names
    /// they bind.
    fn alpha_eq(&self, other: &Rule) -> bool {
        match (self, other) {
            (Rule::OrElim { frame: f1, var: v1 }, Rule::OrElim { frame: f2, var: v2 })
            | (Rule::Direct { frame: f1, var: v1 }, Rule::Direct { frame: f2, var: v2 }) => {
                v1 == v2 && f1.alpha_eq(f2)
            }
            _ => self == other,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Derivation<T> {
    pub rule: Rule,
    pub ctx: TypingContext,
    pub subject: Expr,
    pub ty: SourceType,
    pub target: T,
    pub children: Vec<Derivation<T>>,
}

/// `Γ ⊢ e : A ↪ M`.
pub type ElabDerivation = Derivation<Term>;
/// `Γ ⊢ e : A`, the same tree without targets.
pub type TypingDerivation = Derivation<()>;

impl<T> Derivation<T> {
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(Derivation::node_count).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(Derivation::depth).max().unwrap_or(0)
    }

    /// Rule names in pre-order.
    pub fn rules(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        self.collect_rules(&mut out);
        out
    }

    fn collect_rules(&self, out: &mut Vec<&'static str>) {
        out.push(self.rule.name());
        for c in &self.children {
            c.collect_rules(out);
        }
    }

    pub fn uses_rule(&self, name: &str) -> bool {
        self.rule.name() == name || self.children.iter().any(|c| c.uses_rule(name))
    }
}

impl<T: Clone> Derivation<T> {
    /// Inserts `entries` into every context at position `at`.
    pub fn weaken(&self, at: usize, entries: &[(Name, SourceType)]) -> Self {
        let mut all: Vec<(Name, SourceType)> = self.ctx.entries().to_vec();
        for (i, e) in entries.iter().enumerate() {
            all.insert(at + i, e.clone());
        }
        Derivation {
            rule: self.rule.clone(),
            ctx: TypingContext::from_entries(all),
            subject: self.subject.clone(),
            ty: self.ty.clone(),
            target: self.target.clone(),
            children: self.children.iter().map(|c| c.weaken(at, entries)).collect(),
        }
    }
}

/// Drops every target, keeping the tree shape.
pub fn erase(d: &ElabDerivation) -> TypingDerivation {
    Derivation {
        rule: d.rule.clone(),
        ctx: d.ctx.clone(),
        subject: d.subject.clone(),
        ty: d.ty.clone(),
        target: (),
        children: d.children.iter().map(erase).collect(),
    }
}

/// Reattaches targets bottom-up by the elaboration schemas.
pub fn reelaborate(t: &TypingDerivation) -> Result<ElabDerivation, DerivationError> {
    let children = t.children.iter().map(reelaborate).collect::<Result<Vec<_>, _>>()?;
    let targets: Vec<&Term> = children.iter().map(|c| &c.target).collect();
    let target = schema_target(&t.rule, &t.subject, &targets).map_err(|m| DerivationError::at(&[], m))?;
    Ok(Derivation {
        rule: t.rule.clone(),
        ctx: t.ctx.clone(),
        subject: t.subject.clone(),
        ty: t.ty.clone(),
        target,
        children,
    })
}

/// Node-for-node α-equality of two elaboration derivations.
pub fn derivation_alpha_eq(a: &ElabDerivation, b: &ElabDerivation) -> bool {
    a.rule.alpha_eq(&b.rule)
        && a.ctx == b.ctx
        && a.ty == b.ty
        && a.subject.alpha_eq(&b.subject)
        && a.target.alpha_eq(&b.target)
        && a.children.len() == b.children.len()
        && a.children.iter().zip(&b.children).all(|(x, y)| derivation_alpha_eq(x, y))
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("invalid derivation at node {path:?}: {message}")]
pub struct DerivationError {
    /// Child indices from the root.
    pub path: Vec<usize>,
    pub message: String,
}

impl DerivationError {
    fn at(path: &[usize], message: impl Into<String>) -> Self {
        DerivationError { path: path.to_vec(), message: message.into() }
    }
}

fn literal_target(e: &Expr) -> Option<Term> {
    Some(match e {
        Expr::Unit => Term::Unit,
        Expr::Int(n) => Term::Int(n.clone()),
        Expr::Real(r) => Term::Real(r.clone()),
        Expr::Str(s) => Term::Str(s.clone()),
        _ => return None,
    })
}

/// The target a node must have, given its rule, subject and the targets of
/// its children.
pub fn schema_target(rule: &Rule, subject: &Expr, c: &[&Term]) -> Result<Term, String> {
    let arity = match rule {
        Rule::Var | Rule::TopIntro | Rule::Lit | Rule::Prim | Rule::NilIntro => 0,
        Rule::Merge(_)
        | Rule::Fix
        | Rule::ArrIntro
        | Rule::AndElim(_)
        | Rule::OrIntro(_)
        | Rule::Anno
        | Rule::SubAtom
        | Rule::RecordIntro
        | Rule::RecordElim => 1,
        Rule::ArrElim | Rule::AndIntro | Rule::Direct { .. } | Rule::Let | Rule::ConsIntro => 2,
        Rule::OrElim { .. } | Rule::ListElim => 3,
    };
    if c.len() != arity {
        return Err(format!("{} needs {} premises, found {}", rule.name(), arity, c.len()));
    }
    let bad = || format!("{} does not apply to {}", rule.name(), subject);
    let t = |i: usize| c[i].clone();
    Ok(match rule {
        Rule::Var => match subject {
            Expr::Var(x) => Term::var(x.clone()),
            _ => return Err(bad()),
        },
        Rule::Merge(_) | Rule::Anno | Rule::SubAtom => t(0),
        Rule::Fix => match subject {
            Expr::Fix(x, _) => Term::fix(x.clone(), t(0)),
            _ => return Err(bad()),
        },
        Rule::TopIntro => Term::Unit,
        Rule::ArrIntro => match subject {
            Expr::Lam(x, _) => Term::lam(x.clone(), t(0)),
            _ => return Err(bad()),
        },
        Rule::ArrElim => Term::app(t(0), t(1)),
        Rule::AndIntro => Term::pair(t(0), t(1)),
        Rule::AndElim(k) => Term::proj(*k, t(0)),
        Rule::OrIntro(k) => Term::inj(*k, t(0)),
        Rule::OrElim { var, .. } => Term::case(t(0), var.clone(), t(1), var.clone(), t(2)),
        Rule::Direct { var, .. } => Term::app(Term::lam(var.clone(), t(1)), t(0)),
        Rule::Let => match subject {
            Expr::Let(y, _, _) => Term::let_(y.clone(), t(0), t(1)),
            _ => return Err(bad()),
        },
        Rule::Lit => literal_target(subject).ok_or_else(bad)?,
        Rule::Prim => match subject {
            Expr::Prim(p) => prim_target(p).ok_or_else(bad)?,
            _ => return Err(bad()),
        },
        Rule::RecordIntro => match subject {
            Expr::Record(l, _) => Term::Record(l.clone(), Box::new(t(0))),
            _ => return Err(bad()),
        },
        Rule::RecordElim => match subject {
            Expr::Field(_, l) => Term::Field(Box::new(t(0)), l.clone()),
            _ => return Err(bad()),
        },
        Rule::NilIntro => Term::Nil,
        Rule::ConsIntro => Term::cons(t(0), t(1)),
        Rule::ListElim => match subject {
            Expr::ListCase { head, tail, .. } => Term::ListCase {
                scrut: Box::new(t(0)),
                nil: Box::new(t(1)),
                head: head.clone(),
                tail: tail.clone(),
                cons: Box::new(t(2)),
            },
            _ => return Err(bad()),
        },
    })
}

fn literal_checks(e: &Expr, ty: &SourceType) -> bool {
    use crate::ast::BaseType as B;
    use num_traits::Signed;
    match (e, ty) {
        (Expr::Unit, SourceType::Base(B::Unit)) => true,
        (Expr::Int(_), SourceType::Base(B::Int)) => true,
        (Expr::Int(n), SourceType::Base(B::Nat)) => !n.is_negative(),
        (Expr::Int(n), SourceType::Base(B::Pos)) => n.is_positive(),
        (Expr::Real(_), SourceType::Base(B::Real)) => true,
        (Expr::Str(_), SourceType::Base(B::Str)) => true,
        _ => false,
    }
}

struct Checker {
    path: Vec<usize>,
}

/// Checks that every node of `d` instantiates its rule's schema, ignoring
/// targets.
pub fn validate_typing<T>(d: &Derivation<T>) -> Result<(), DerivationError> {
    let mut c = Checker { path: Vec::new() };
    c.node(d)
}

/// Checks the schema of every node, including targets.
pub fn validate(d: &ElabDerivation) -> Result<(), DerivationError> {
    validate_typing(d)?;
    check_targets(d, &mut Vec::new())
}

fn check_targets(d: &ElabDerivation, path: &mut Vec<usize>) -> Result<(), DerivationError> {
    for (i, c) in d.children.iter().enumerate() {
        path.push(i);
        check_targets(c, path)?;
        path.pop();
    }
    let targets: Vec<&Term> = d.children.iter().map(|c| &c.target).collect();
    let want = schema_target(&d.rule, &d.subject, &targets).map_err(|m| DerivationError::at(path, m))?;
    if !want.alpha_eq(&d.target) {
        return Err(DerivationError::at(path, format!("target {} should be {}", d.target, want)));
    }
    Ok(())
}

impl Checker {
    fn fail<T>(&self, message: impl Into<String>) -> Result<T, DerivationError> {
        Err(DerivationError::at(&self.path, message))
    }

    fn node<T>(&mut self, d: &Derivation<T>) -> Result<(), DerivationError> {
        self.schema(d)?;
        for (i, c) in d.children.iter().enumerate() {
            self.path.push(i);
            self.node(c)?;
            self.path.pop();
        }
        Ok(())
    }

    fn same_ctx<T>(&self, d: &Derivation<T>, c: &Derivation<T>) -> Result<(), DerivationError> {
        if c.ctx != d.ctx {
            return self.fail(format!("premise context {} differs from {}", c.ctx, d.ctx));
        }
        Ok(())
    }

    fn ext_ctx<T>(&self, d: &Derivation<T>, c: &Derivation<T>, x: &str, ty: &SourceType) -> Result<(), DerivationError> {
        if c.ctx != d.ctx.extend(x, ty.clone()) {
            return self.fail(format!("premise context {} should extend {} with {}:{}", c.ctx, d.ctx, x, ty));
        }
        Ok(())
    }

    fn subj<T>(&self, c: &Derivation<T>, e: &Expr) -> Result<(), DerivationError> {
        if !c.subject.alpha_eq(e) {
            return self.fail(format!("premise subject {} should be {}", c.subject, e));
        }
        Ok(())
    }

    fn ty_is<T>(&self, c: &Derivation<T>, ty: &SourceType) -> Result<(), DerivationError> {
        if c.ty != *ty {
            return self.fail(format!("premise type {} should be {}", c.ty, ty));
        }
        Ok(())
    }

    fn schema<T>(&mut self, d: &Derivation<T>) -> Result<(), DerivationError> {
        let ch = &d.children;
        let want = match &d.rule {
            Rule::Var | Rule::TopIntro | Rule::Lit | Rule::Prim | Rule::NilIntro => 0,
            Rule::OrElim { .. } | Rule::ListElim => 3,
            Rule::ArrElim | Rule::AndIntro | Rule::Direct { .. } | Rule::Let | Rule::ConsIntro => 2,
            _ => 1,
        };
        if ch.len() != want {
            return self.fail(format!("{} needs {} premises", d.rule.name(), want));
        }
        let mismatch = || format!("{} does not conclude {} : {}", d.rule.name(), d.subject, d.ty);
        match (&d.rule, &d.subject) {
            (Rule::Var, Expr::Var(x)) => {
                if d.ctx.lookup(x) != Some(&d.ty) {
                    return self.fail(format!("{} is not bound to {} in {}", x, d.ty, d.ctx));
                }
            }
            (Rule::Merge(k), Expr::Merge(a, b)) => {
                self.same_ctx(d, &ch[0])?;
                self.subj(&ch[0], if *k == 1 { a } else { b })?;
                self.ty_is(&ch[0], &d.ty)?;
            }
            (Rule::Fix, Expr::Fix(x, body)) => {
                self.ext_ctx(d, &ch[0], x, &d.ty)?;
                self.subj(&ch[0], body)?;
                self.ty_is(&ch[0], &d.ty)?;
            }
            (Rule::TopIntro, e) => {
                if !e.is_value() || d.ty != SourceType::Top {
                    return self.fail(mismatch());
                }
            }
            (Rule::ArrIntro, Expr::Lam(x, body)) => {
                let SourceType::Arrow(a, b) = &d.ty else { return self.fail(mismatch()) };
                self.ext_ctx(d, &ch[0], x, a)?;
                self.subj(&ch[0], body)?;
                self.ty_is(&ch[0], b)?;
            }
            (Rule::ArrElim, Expr::App(f, a)) => {
                self.same_ctx(d, &ch[0])?;
                self.same_ctx(d, &ch[1])?;
                self.subj(&ch[0], f)?;
                self.subj(&ch[1], a)?;
                self.ty_is(&ch[0], &SourceType::arrow(ch[1].ty.clone(), d.ty.clone()))?;
            }
            (Rule::AndIntro, e) => {
                let SourceType::Intersect(a, b) = &d.ty else { return self.fail(mismatch()) };
                for (c, t) in ch.iter().zip([a, b]) {
                    self.same_ctx(d, c)?;
                    self.subj(c, e)?;
                    self.ty_is(c, t)?;
                }
            }
            (Rule::AndElim(k), e) => {
                self.same_ctx(d, &ch[0])?;
                self.subj(&ch[0], e)?;
                match &ch[0].ty {
                    SourceType::Intersect(a, b) if **(if *k == 1 { a } else { b }) == d.ty => {}
                    _ => return self.fail(mismatch()),
                }
            }
            (Rule::OrIntro(k), e) => {
                self.same_ctx(d, &ch[0])?;
                self.subj(&ch[0], e)?;
                match &d.ty {
                    SourceType::Union(a, b) => self.ty_is(&ch[0], if *k == 1 { a } else { b })?,
                    _ => return self.fail(mismatch()),
                }
            }
            (Rule::OrElim { frame, var }, e) => {
                self.same_ctx(d, &ch[0])?;
                let SourceType::Union(a1, a2) = &ch[0].ty else {
                    return self.fail("the eliminated expression does not have a union type");
                };
                self.frame_ok(frame, var, e, &ch[0].subject)?;
                for (c, a) in ch[1..].iter().zip([a1, a2]) {
                    self.ext_ctx(d, c, var, a)?;
                    self.subj(c, &frame.plug(Expr::var(var.clone())))?;
                    self.ty_is(c, &d.ty)?;
                }
            }
            (Rule::Direct { frame, var }, e) => {
                self.same_ctx(d, &ch[0])?;
                self.frame_ok(frame, var, e, &ch[0].subject)?;
                self.ext_ctx(d, &ch[1], var, &ch[0].ty)?;
                self.subj(&ch[1], &frame.plug(Expr::var(var.clone())))?;
                self.ty_is(&ch[1], &d.ty)?;
            }
            (Rule::Let, Expr::Let(y, bound, body)) => {
                self.same_ctx(d, &ch[0])?;
                self.subj(&ch[0], bound)?;
                self.ext_ctx(d, &ch[1], y, &ch[0].ty)?;
                self.subj(&ch[1], body)?;
                self.ty_is(&ch[1], &d.ty)?;
            }
            (Rule::Lit, e) => {
                if !literal_checks(e, &d.ty) {
                    return self.fail(mismatch());
                }
            }
            (Rule::Prim, Expr::Prim(p)) => {
                if prim_type(p).as_ref() != Some(&d.ty) {
                    return self.fail(mismatch());
                }
            }
            (Rule::Anno, Expr::Anno(e, a)) => {
                if *a != d.ty {
                    return self.fail(mismatch());
                }
                self.same_ctx(d, &ch[0])?;
                self.subj(&ch[0], e)?;
                self.ty_is(&ch[0], a)?;
            }
            (Rule::SubAtom, e) => {
                self.same_ctx(d, &ch[0])?;
                self.subj(&ch[0], e)?;
                match (&ch[0].ty, &d.ty) {
                    (SourceType::Base(p), SourceType::Base(q)) if p != q && atom_le(*p, *q) => {}
                    _ => return self.fail(mismatch()),
                }
            }
            (Rule::RecordIntro, Expr::Record(l, e)) => {
                let SourceType::Record(l2, a) = &d.ty else { return self.fail(mismatch()) };
                if l != l2 {
                    return self.fail(mismatch());
                }
                self.same_ctx(d, &ch[0])?;
                self.subj(&ch[0], e)?;
                self.ty_is(&ch[0], a)?;
            }
            (Rule::RecordElim, Expr::Field(e, l)) => {
                self.same_ctx(d, &ch[0])?;
                self.subj(&ch[0], e)?;
                self.ty_is(&ch[0], &SourceType::record(l.clone(), d.ty.clone()))?;
            }
            (Rule::NilIntro, Expr::Nil) => {
                if !matches!(d.ty, SourceType::List(_)) {
                    return self.fail(mismatch());
                }
            }
            (Rule::ConsIntro, Expr::Cons(h, t)) => {
                let SourceType::List(a) = &d.ty else { return self.fail(mismatch()) };
                self.same_ctx(d, &ch[0])?;
                self.same_ctx(d, &ch[1])?;
                self.subj(&ch[0], h)?;
                self.subj(&ch[1], t)?;
                self.ty_is(&ch[0], a)?;
                self.ty_is(&ch[1], &d.ty)?;
            }
            (Rule::ListElim, Expr::ListCase { scrut, nil, head, tail, cons }) => {
                self.same_ctx(d, &ch[0])?;
                self.subj(&ch[0], scrut)?;
                let SourceType::List(a) = &ch[0].ty else {
                    return self.fail("list case on a non-list");
                };
                self.same_ctx(d, &ch[1])?;
                self.subj(&ch[1], nil)?;
                self.ty_is(&ch[1], &d.ty)?;
                let want = d.ctx.extend(head.clone(), (**a).clone()).extend(tail.clone(), ch[0].ty.clone());
                if ch[2].ctx != want {
                    return self.fail("cons arm context is wrong");
                }
                self.subj(&ch[2], cons)?;
                self.ty_is(&ch[2], &d.ty)?;
            }
            _ => return self.fail(mismatch()),
        }
        Ok(())
    }

    fn frame_ok(&self, frame: &EvalContext, var: &str, e: &Expr, e0: &Expr) -> Result<(), DerivationError> {
        if !frame.is_well_formed() {
            return self.fail(format!("{} is not an evaluation context", frame));
        }
        if frame.free_vars().contains(var) {
            return self.fail(format!("{} is captured by {}", var, frame));
        }
        if !frame.plug(e0.clone()).alpha_eq(e) {
            return self.fail(format!("{} is not {} with {} in the hole", e, frame, e0));
        }
        Ok(())
    }
}

impl<T: fmt::Display> fmt::Display for Derivation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_indented(f, 0)
    }
}

impl<T: fmt::Display> Derivation<T> {
    fn fmt_indented(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        for _ in 0..indent {
            f.write_str("  ")?;
        }
        writeln!(f, "[{}] {} ⊢ {} : {} ↪ {}", self.rule.name(), self.ctx, self.subject, self.ty, self.target)?;
        for c in &self.children {
            c.fmt_indented(f, indent + 1)?;
        }
        Ok(())
    }
}
