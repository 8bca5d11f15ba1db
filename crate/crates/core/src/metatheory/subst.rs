//! Substitution on derivation trees.

use alloc::collections::BTreeSet;
use alloc::format;

use super::{violation, MetaError};
use crate::ast::{Expr, Name, Term};
use crate::elab::{ElabDerivation, Rule};

/// From `Γ, x:A ⊢ e : B ↪ M` and `Γ ⊢ v : A ↪ W`, with `v` and `W` values,
/// derives `Γ ⊢ [v/x]e : B ↪ [W/x]M`.
pub fn subst_elab(d: &ElabDerivation, dv: &ElabDerivation) -> Result<ElabDerivation, MetaError> {
    if !dv.subject.is_value() {
        return Err(MetaError::NotAValue(dv.subject.clone()));
    }
    if !dv.target.is_value() {
        return violation(format!("target {} is not a value", dv.target));
    }
    subst_last(d, dv)
}

/// Substitution of a possibly non-value derivation, used to unroll `fix`.
/// Validity relies on the variable never standing where a value is
/// required, which the elaborator guarantees for `fix`-bound names.
pub fn subst_unrolled(d: &ElabDerivation, dv: &ElabDerivation) -> Result<ElabDerivation, MetaError> {
    subst_last(d, dv)
}

fn subst_last(d: &ElabDerivation, dv: &ElabDerivation) -> Result<ElabDerivation, MetaError> {
    let Some(p) = d.ctx.len().checked_sub(1) else {
        return violation("substitution into a closed derivation");
    };
    let (x, a) = &d.ctx.entries()[p];
    if dv.ctx.entries() != &d.ctx.entries()[..p] {
        return violation(format!("context {} does not match {}", dv.ctx, d.ctx));
    }
    if dv.ty != *a {
        return violation(format!("{} has type {}, expected {}", dv.subject, dv.ty, a));
    }
    let mut free: BTreeSet<Name> = dv.subject.free_vars();
    free.extend(dv.target.free_vars());
    let mut s = Subst { p, x: x.clone(), dv, free };
    s.go(d)
}

struct Subst<'a> {
    p: usize,
    x: Name,
    dv: &'a ElabDerivation,
    /// Free variables of the substituted value, which no binder may capture.
    free: BTreeSet<Name>,
}

impl Subst<'_> {
    fn go(&mut self, d: &ElabDerivation) -> Result<ElabDerivation, MetaError> {
        let refers = d.ctx.position(&self.x) == Some(self.p);
        let extra = &d.ctx.entries()[self.p + 1..];
        if refers && !self.free.is_empty() && extra.iter().any(|(y, _)| self.free.contains(y)) {
            return violation(format!("substitution for {} would be captured", self.x));
        }
        if refers && d.rule == Rule::Var && d.subject == Expr::var(self.x.clone()) {
            return Ok(self.dv.weaken(self.dv.ctx.len(), extra));
        }
        let ctx = d.ctx.remove_at(self.p);
        let children = d.children.iter().map(|c| self.go(c)).collect::<Result<_, _>>()?;
        if !refers {
            return Ok(ElabDerivation {
                rule: d.rule.clone(),
                ctx,
                subject: d.subject.clone(),
                ty: d.ty.clone(),
                target: d.target.clone(),
                children,
            });
        }
        let (v, w) = (&self.dv.subject, &self.dv.target);
        if !self.free.is_empty() && (binds_any(&d.subject, &self.free) || term_binds_any(&d.target, &self.free)) {
            return violation(format!("substitution for {} would rename a binder", self.x));
        }
        let rule = match &d.rule {
            Rule::OrElim { frame, var } => Rule::OrElim { frame: frame.subst(&self.x, v), var: var.clone() },
            Rule::Direct { frame, var } => Rule::Direct { frame: frame.subst(&self.x, v), var: var.clone() },
            r => r.clone(),
        };
        Ok(ElabDerivation {
            rule,
            ctx,
            subject: d.subject.subst(&self.x, v),
            ty: d.ty.clone(),
            target: d.target.subst(&self.x, w),
            children,
        })
    }
}

fn binds_any(e: &Expr, names: &BTreeSet<Name>) -> bool {
    names.iter().any(|n| binder_occurs(e, n))
}

fn binder_occurs(e: &Expr, n: &str) -> bool {
    match e {
        Expr::Lam(x, b) | Expr::Fix(x, b) => x == n || binder_occurs(b, n),
        Expr::Let(x, a, b) => x == n || binder_occurs(a, n) || binder_occurs(b, n),
        Expr::ListCase { scrut, nil, head, tail, cons } => {
            head == n || tail == n || binder_occurs(scrut, n) || binder_occurs(nil, n) || binder_occurs(cons, n)
        }
        Expr::App(a, b) | Expr::Merge(a, b) | Expr::Cons(a, b) => binder_occurs(a, n) || binder_occurs(b, n),
        Expr::Record(_, a) | Expr::Field(a, _) | Expr::Anno(a, _) => binder_occurs(a, n),
        _ => false,
    }
}

fn term_binds_any(t: &Term, names: &BTreeSet<Name>) -> bool {
    names.iter().any(|n| term_binder_occurs(t, n))
}

fn term_binder_occurs(t: &Term, n: &str) -> bool {
    match t {
        Term::Lam(x, b) | Term::Fix(x, b) => x == n || term_binder_occurs(b, n),
        Term::Let(x, a, b) => x == n || term_binder_occurs(a, n) || term_binder_occurs(b, n),
        Term::Case { scrut, left, left_arm, right, right_arm } => {
            left == n
                || right == n
                || term_binder_occurs(scrut, n)
                || term_binder_occurs(left_arm, n)
                || term_binder_occurs(right_arm, n)
        }
        Term::ListCase { scrut, nil, head, tail, cons } => {
            head == n
                || tail == n
                || term_binder_occurs(scrut, n)
                || term_binder_occurs(nil, n)
                || term_binder_occurs(cons, n)
        }
        Term::App(a, b) | Term::Pair(a, b) | Term::Cons(a, b) => term_binder_occurs(a, n) || term_binder_occurs(b, n),
        Term::Proj(_, a) | Term::Inj(_, a) | Term::Record(_, a) | Term::Field(a, _) => term_binder_occurs(a, n),
        Term::PrimApp(_, args) => args.iter().any(|a| term_binder_occurs(a, n)),
        _ => false,
    }
}
