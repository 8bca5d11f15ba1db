//! Inversion: a derivation whose target is an introduction form is, up to
//! merges and annotations, built by the matching introduction rule.

use alloc::vec::Vec;

use super::{root_step, violation, MetaError, StepTrace};
use crate::ast::{Expr, Name, SourceType, Term};
use crate::elab::coerce::merge;
use crate::elab::{ElabDerivation, Rule};

#[derive(Clone, Debug, PartialEq)]
pub struct SectInversion {
    pub left_trace: StepTrace,
    pub left: ElabDerivation,
    pub right_trace: StepTrace,
    pub right: ElabDerivation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArrInversion {
    /// Steps from the subject to `λvar.body.subject`.
    pub trace: StepTrace,
    pub var: Name,
    pub body: ElabDerivation,
}

/// Strips `merge_k` and annotation nodes, unmerging and erasing as it goes,
/// until `stop` accepts the root.
pub(crate) fn peel(d: &ElabDerivation, stop: impl Fn(&Rule) -> bool) -> Result<(StepTrace, ElabDerivation), MetaError> {
    let mut trace = Vec::new();
    let mut d = d;
    loop {
        if stop(&d.rule) {
            return Ok((trace, d.clone()));
        }
        let rule = match d.rule {
            Rule::Merge(1) => "unmerge-left",
            Rule::Merge(_) => "unmerge-right",
            Rule::Anno => "anno-erase",
            _ => return violation(alloc::format!("cannot invert {} at {}", d.rule.name(), d.subject)),
        };
        trace.push(root_step(&d.subject, rule)?);
        d = &d.children[0];
    }
}

/// Inversion for intersections: both components, each reached by unmerge
/// and annotation-erasure steps.
pub fn elab_sect_invert(d: &ElabDerivation) -> Result<SectInversion, MetaError> {
    if !matches!((&d.ty, &d.target), (SourceType::Intersect(..), Term::Pair(..))) {
        return violation(alloc::format!("{} ↪ {} is not an intersection pair", d.ty, d.target));
    }
    let (trace, node) = peel(d, |r| *r == Rule::AndIntro)?;
    let [left, right]: [ElabDerivation; 2] = node.children.try_into().expect("and-I has two premises");
    Ok(SectInversion { left_trace: trace.clone(), left, right_trace: trace, right })
}

/// Inversion for arrows: steps to a λ and the derivation of its body.
pub fn elab_arr_invert(d: &ElabDerivation) -> Result<ArrInversion, MetaError> {
    if !matches!((&d.ty, &d.target), (SourceType::Arrow(..), Term::Lam(..))) {
        return violation(alloc::format!("{} ↪ {} is not a function", d.ty, d.target));
    }
    let (trace, node) = peel(d, |r| *r == Rule::ArrIntro)?;
    let Expr::Lam(x, _) = &node.subject else { return violation("arr-I on a non-λ") };
    let var = x.clone();
    let body = node.children.into_iter().next().expect("arr-I has one premise");
    Ok(ArrInversion { trace, var, body })
}

/// Inversion for unions at an injection `inj_k M0`: the same subject typed
/// at `A_k` with target `M0`, keeping any `merge_k` wrappers.
pub fn elab_union_invert(d: &ElabDerivation) -> Result<ElabDerivation, MetaError> {
    if !matches!((&d.ty, &d.target), (SourceType::Union(..), Term::Inj(..))) {
        return violation(alloc::format!("{} ↪ {} is not a union injection", d.ty, d.target));
    }
    strip_injection(d)
}

fn strip_injection(d: &ElabDerivation) -> Result<ElabDerivation, MetaError> {
    match (&d.rule, &d.subject) {
        (Rule::OrIntro(_), _) => Ok(d.children[0].clone()),
        (Rule::Merge(k), Expr::Merge(a, b)) => {
            let inner = strip_injection(&d.children[0])?;
            let other: &Expr = if *k == 1 { b } else { a };
            Ok(merge(*k, inner, other))
        }
        _ => violation(alloc::format!("cannot invert {} at a union", d.rule.name())),
    }
}
