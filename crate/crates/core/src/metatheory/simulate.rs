//! Simulation of target steps by source steps, one case per typing rule.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::invert::{elab_arr_invert, elab_sect_invert, elab_union_invert, peel};
use super::subst::{subst_elab, subst_unrolled};
use super::{lift, root_step, violation, MetaError, StepTrace};
use crate::ast::{EvalContext, Expr, Term};
use crate::dynamics::{check_source_step, decompose, source_step_candidates, SourceStep};
use crate::elab::coerce::{and_elim, arr_elim, merge, node, or_intro};
use crate::elab::derivation::schema_target;
use crate::elab::{validate, ElabDerivation, Rule};
use crate::target::{target_eval, target_step, EvalOutcome, TargetStep};

/// One target step answered by source steps.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationCertificate {
    pub source_steps: StepTrace,
    pub derivation_after: ElabDerivation,
    pub target_before: Term,
    pub target_after: Term,
    pub target_rule: &'static str,
}

type Sim = Result<(StepTrace, ElabDerivation), MetaError>;

fn hole() -> Box<EvalContext> {
    Box::new(EvalContext::Hole)
}

/// Rebuilds a node from new premises, recomputing the target.
fn rebuild(d: &ElabDerivation, rule: Rule, subject: Expr, children: Vec<ElabDerivation>) -> Sim0 {
    let targets: Vec<&Term> = children.iter().map(|c| &c.target).collect();
    let target = schema_target(&rule, &subject, &targets).map_err(MetaError::InvariantViolation)?;
    Ok(node(rule, &d.ctx, subject, d.ty.clone(), target, children))
}

type Sim0 = Result<ElabDerivation, MetaError>;

fn merge_parts(e: &Expr) -> Result<(&Expr, &Expr), MetaError> {
    match e {
        Expr::Merge(a, b) => Ok((a, b)),
        _ => violation(format!("{} is not a merge", e)),
    }
}

/// The frame around branch `k` of the merge `e`.
fn side_frame(e: &Expr, k: u8) -> Result<EvalContext, MetaError> {
    let (a, b) = merge_parts(e)?;
    Ok(if k == 1 { EvalContext::MergeL(hole(), b.clone()) } else { EvalContext::MergeR(a.clone(), hole()) })
}

fn replace_side(e: &Expr, k: u8, new: Expr) -> Result<Expr, MetaError> {
    let (a, b) = merge_parts(e)?;
    Ok(if k == 1 { Expr::merge(new, b.clone()) } else { Expr::merge(a.clone(), new) })
}

fn other_side(e: &Expr, k: u8) -> Result<Expr, MetaError> {
    let (a, b) = merge_parts(e)?;
    Ok(if k == 1 { b.clone() } else { a.clone() })
}

/// For `∧I` over `a,,b` whose premises are `merge_1` and `merge_2` in
/// some order: the branch each premise types.
fn merge_form(d: &ElabDerivation) -> Option<[u8; 2]> {
    match (&d.subject, &d.children[0].rule, &d.children[1].rule) {
        (Expr::Merge(..), Rule::Merge(k1), Rule::Merge(k2)) if k1 != k2 => Some([*k1, *k2]),
        _ => None,
    }
}

/// `∧I` over `a,,b`, after premise `i` (a `merge_k`) changed its inner
/// derivation to `inner`.
fn and_intro_with(d: &ElabDerivation, sides: [u8; 2], i: usize, inner: ElabDerivation) -> Sim0 {
    let subject = replace_side(&d.subject, sides[i], inner.subject.clone())?;
    let mut children = Vec::new();
    for (j, &k) in sides.iter().enumerate() {
        let body = if j == i { inner.clone() } else { d.children[j].children[0].clone() };
        children.push(merge(k, body, &other_side(&subject, k)?));
    }
    rebuild(d, Rule::AndIntro, subject, children)
}

/// Steps the premise `i` of an `∧I` node with `f`, splitting first unless
/// the subject is already a merge of the two components.
fn and_intro_step(d: &ElabDerivation, i: usize, f: impl Fn(&ElabDerivation) -> Sim) -> Sim {
    if let Some(sides) = merge_form(d) {
        let (tr, inner) = f(&d.children[i].children[0])?;
        let tr = lift(tr, &side_frame(&d.subject, sides[i])?);
        return Ok((tr, and_intro_with(d, sides, i, inner)?));
    }
    let split = root_step(&d.subject, "split")?;
    let e2 = split.to.clone();
    let sides = [1, 2];
    let mut d2 = d.clone();
    d2.subject = e2.clone();
    for (j, &k) in sides.iter().enumerate() {
        d2.children[j] = merge(k, d.children[j].clone(), &d.subject);
    }
    let (tr, inner) = f(&d.children[i])?;
    let mut trace = vec![split];
    trace.extend(lift(tr, &side_frame(&e2, sides[i])?));
    Ok((trace, and_intro_with(&d2, sides, i, inner)?))
}

/// Steps the subject to a value with the same type and target.
pub fn value_mono(d: &ElabDerivation) -> Sim {
    if !d.target.is_value() {
        return violation(format!("target {} is not a value", d.target));
    }
    mono(d)
}

fn mono(d: &ElabDerivation) -> Sim {
    let ch = &d.children;
    match &d.rule {
        Rule::Var | Rule::TopIntro | Rule::ArrIntro | Rule::Lit | Rule::NilIntro | Rule::Prim => {
            Ok((Vec::new(), d.clone()))
        }
        Rule::Merge(k) => {
            let step = root_step(&d.subject, if *k == 1 { "unmerge-left" } else { "unmerge-right" })?;
            let (tr, dv) = mono(&ch[0])?;
            Ok((prepend(step, tr), dv))
        }
        Rule::Anno => {
            let step = root_step(&d.subject, "anno-erase")?;
            let (tr, dv) = mono(&ch[0])?;
            Ok((prepend(step, tr), dv))
        }
        Rule::AndIntro => {
            let (mut trace, d1) = and_intro_step(d, 0, mono)?;
            let (tr2, d2) = and_intro_step(&d1, 1, mono)?;
            trace.extend(tr2);
            Ok((trace, d2))
        }
        Rule::OrIntro(k) => {
            let (tr, dv) = mono(&ch[0])?;
            Ok((tr, or_intro(*k, dv, &d.ty)))
        }
        Rule::SubAtom => {
            let (tr, dv) = mono(&ch[0])?;
            let subject = dv.subject.clone();
            Ok((tr, rebuild(d, Rule::SubAtom, subject, vec![dv])?))
        }
        Rule::RecordIntro => {
            let Expr::Record(l, _) = &d.subject else { return violation("record-I on a non-record") };
            let (tr, dv) = mono(&ch[0])?;
            let subject = Expr::record(l.clone(), dv.subject.clone());
            let tr = lift(tr, &EvalContext::Record(l.clone(), hole()));
            Ok((tr, rebuild(d, Rule::RecordIntro, subject, vec![dv])?))
        }
        Rule::ConsIntro => {
            let (h, t) = (&ch[0], &ch[1]);
            let (mut trace, hv) = mono(h)?;
            trace = lift(trace, &EvalContext::ConsHead(hole(), t.subject.clone()));
            let (tr2, tv) = mono(t)?;
            trace.extend(lift(tr2, &EvalContext::ConsTail(hv.subject.clone(), hole())));
            let subject = Expr::cons(hv.subject.clone(), tv.subject.clone());
            Ok((trace, rebuild(d, Rule::ConsIntro, subject, vec![hv, tv])?))
        }
        r => violation(format!("{} cannot have a value target {}", r.name(), d.target)),
    }
}

fn prepend(step: SourceStep, mut trace: StepTrace) -> StepTrace {
    trace.insert(0, step);
    trace
}

/// Source steps matching the target step of `d.target`.
fn sim(d: &ElabDerivation) -> Sim {
    let ch = &d.children;
    match &d.rule {
        Rule::Var | Rule::TopIntro | Rule::ArrIntro | Rule::Lit | Rule::NilIntro => {
            violation(format!("{} has a value target", d.rule.name()))
        }
        Rule::Prim => violation("primitives are not simulated"),
        Rule::Fix => {
            let step = root_step(&d.subject, "fix")?;
            let d2 = subst_unrolled(&ch[0], d)?;
            Ok((vec![step], d2))
        }
        Rule::Merge(k) => {
            let step = root_step(&d.subject, if *k == 1 { "unmerge-left" } else { "unmerge-right" })?;
            let (tr, d2) = sim(&ch[0])?;
            Ok((prepend(step, tr), d2))
        }
        Rule::Anno => {
            let step = root_step(&d.subject, "anno-erase")?;
            let (tr, d2) = sim(&ch[0])?;
            Ok((prepend(step, tr), d2))
        }
        Rule::SubAtom => {
            let (tr, d2) = sim(&ch[0])?;
            let subject = d2.subject.clone();
            Ok((tr, rebuild(d, Rule::SubAtom, subject, vec![d2])?))
        }
        Rule::AndIntro => {
            let i = if ch[0].target.is_value() { 1 } else { 0 };
            and_intro_step(d, i, sim)
        }
        Rule::AndElim(k) => {
            if !ch[0].target.is_value() {
                let (tr, d0) = sim(&ch[0])?;
                return Ok((tr, and_elim(*k, d0)));
            }
            let inv = elab_sect_invert(&ch[0])?;
            Ok(if *k == 1 { (inv.left_trace, inv.left) } else { (inv.right_trace, inv.right) })
        }
        Rule::OrIntro(k) => {
            let (tr, d0) = sim(&ch[0])?;
            Ok((tr, or_intro(*k, d0, &d.ty)))
        }
        Rule::ArrElim => {
            let (f, a) = (&ch[0], &ch[1]);
            if !f.target.is_value() {
                let (tr, f2) = sim(f)?;
                return Ok((lift(tr, &EvalContext::AppFun(hole(), a.subject.clone())), arr_elim(f2, a.clone())));
            }
            if !a.target.is_value() {
                let (tr1, fv) = mono(f)?;
                let mut trace = lift(tr1, &EvalContext::AppFun(hole(), a.subject.clone()));
                let (tr2, a2) = sim(a)?;
                trace.extend(lift(tr2, &EvalContext::AppArg(fv.subject.clone(), hole())));
                return Ok((trace, arr_elim(fv, a2)));
            }
            let inv = elab_arr_invert(f)?;
            let mut trace = lift(inv.trace, &EvalContext::AppFun(hole(), a.subject.clone()));
            let lam = Expr::lam(inv.var.clone(), inv.body.subject.clone());
            let (tr2, av) = mono(a)?;
            trace.extend(lift(tr2, &EvalContext::AppArg(lam.clone(), hole())));
            let beta = root_step(&Expr::app(lam, av.subject.clone()), "beta")?;
            let d2 = subst_elab(&inv.body, &av)?;
            same_subject(&beta.to, &d2)?;
            trace.push(beta);
            Ok((trace, d2))
        }
        Rule::OrElim { frame, var } => {
            let d0 = &ch[0];
            if !d0.target.is_value() {
                let (tr, d0b) = sim(d0)?;
                let subject = frame.plug(d0b.subject.clone());
                let rule = Rule::OrElim { frame: frame.clone(), var: var.clone() };
                return Ok((lift(tr, frame), rebuild(d, rule, subject, vec![d0b, ch[1].clone(), ch[2].clone()])?));
            }
            let (tr, d0v) = mono(d0)?;
            let Term::Inj(k, _) = &d0v.target else { return violation("case on a non-injection") };
            let dk = elab_union_invert(&d0v)?;
            let d2 = subst_elab(&ch[*k as usize], &dk)?;
            Ok((lift(tr, frame), d2))
        }
        Rule::Direct { frame, .. } => {
            let d0 = &ch[0];
            if !d0.target.is_value() {
                let (tr, d0b) = sim(d0)?;
                let subject = frame.plug(d0b.subject.clone());
                return Ok((lift(tr, frame), rebuild(d, d.rule.clone(), subject, vec![d0b, ch[1].clone()])?));
            }
            let (tr, d0v) = mono(d0)?;
            let d2 = subst_elab(&ch[1], &d0v)?;
            Ok((lift(tr, frame), d2))
        }
        Rule::Let => {
            let Expr::Let(y, _, body) = &d.subject else { return violation("let on a non-let") };
            let frame = EvalContext::LetBound(y.clone(), hole(), (**body).clone());
            let d0 = &ch[0];
            if !d0.target.is_value() {
                let (tr, d0b) = sim(d0)?;
                let subject = frame.plug(d0b.subject.clone());
                return Ok((lift(tr, &frame), rebuild(d, Rule::Let, subject, vec![d0b, ch[1].clone()])?));
            }
            let (tr, d0v) = mono(d0)?;
            let mut trace = lift(tr, &frame);
            let step = root_step(&frame.plug(d0v.subject.clone()), "let")?;
            let d2 = subst_elab(&ch[1], &d0v)?;
            same_subject(&step.to, &d2)?;
            trace.push(step);
            Ok((trace, d2))
        }
        Rule::RecordIntro => {
            let Expr::Record(l, _) = &d.subject else { return violation("record-I on a non-record") };
            let (tr, d0) = sim(&ch[0])?;
            let subject = Expr::record(l.clone(), d0.subject.clone());
            Ok((lift(tr, &EvalContext::Record(l.clone(), hole())), rebuild(d, Rule::RecordIntro, subject, vec![d0])?))
        }
        Rule::RecordElim => {
            let Expr::Field(_, l) = &d.subject else { return violation("record-E on a non-projection") };
            let frame = EvalContext::Field(hole(), l.clone());
            if !ch[0].target.is_value() {
                let (tr, d0) = sim(&ch[0])?;
                let subject = Expr::field(d0.subject.clone(), l.clone());
                return Ok((lift(tr, &frame), rebuild(d, Rule::RecordElim, subject, vec![d0])?));
            }
            let (tr, rec) = peel(&ch[0], |r| *r == Rule::RecordIntro)?;
            let mut trace = lift(tr, &frame);
            let (tr2, pv) = mono(&rec.children[0])?;
            let inner = EvalContext::Field(Box::new(EvalContext::Record(l.clone(), hole())), l.clone());
            trace.extend(lift(tr2, &inner));
            let step = root_step(&inner.plug(pv.subject.clone()), "field")?;
            same_subject(&step.to, &pv)?;
            trace.push(step);
            Ok((trace, pv))
        }
        Rule::ConsIntro => {
            let (h, t) = (&ch[0], &ch[1]);
            if !h.target.is_value() {
                let (tr, h2) = sim(h)?;
                let subject = Expr::cons(h2.subject.clone(), t.subject.clone());
                let tr = lift(tr, &EvalContext::ConsHead(hole(), t.subject.clone()));
                return Ok((tr, rebuild(d, Rule::ConsIntro, subject, vec![h2, t.clone()])?));
            }
            let (tr1, hv) = mono(h)?;
            let mut trace = lift(tr1, &EvalContext::ConsHead(hole(), t.subject.clone()));
            let (tr2, t2) = sim(t)?;
            trace.extend(lift(tr2, &EvalContext::ConsTail(hv.subject.clone(), hole())));
            let subject = Expr::cons(hv.subject.clone(), t2.subject.clone());
            Ok((trace, rebuild(d, Rule::ConsIntro, subject, vec![hv, t2])?))
        }
        Rule::ListElim => sim_list_case(d),
    }
}

fn same_subject(e: &Expr, d: &ElabDerivation) -> Result<(), MetaError> {
    if !e.alpha_eq(&d.subject) {
        return violation(format!("source step reached {} but the derivation types {}", e, d.subject));
    }
    Ok(())
}

fn sim_list_case(d: &ElabDerivation) -> Sim {
    let Expr::ListCase { nil, head, tail, cons, .. } = &d.subject else {
        return violation("list-E on a non-case");
    };
    let ch = &d.children;
    let frame = EvalContext::ListCase {
        inner: hole(),
        nil: (**nil).clone(),
        head: head.clone(),
        tail: tail.clone(),
        cons: (**cons).clone(),
    };
    if !ch[0].target.is_value() {
        let (tr, d0) = sim(&ch[0])?;
        let subject = frame.plug(d0.subject.clone());
        return Ok((lift(tr, &frame), rebuild(d, Rule::ListElim, subject, vec![d0, ch[1].clone(), ch[2].clone()])?));
    }
    let (tr, scrut) = peel(&ch[0], |r| matches!(r, Rule::NilIntro | Rule::ConsIntro))?;
    let mut trace = lift(tr, &frame);
    if scrut.rule == Rule::NilIntro {
        let step = root_step(&frame.plug(Expr::Nil), "lcase-nil")?;
        trace.push(step);
        return Ok((trace, ch[1].clone()));
    }
    let (h, t) = (&scrut.children[0], &scrut.children[1]);
    let (tr1, hv) = mono(h)?;
    trace.extend(lift(tr1, &frame.compose(&EvalContext::ConsHead(hole(), t.subject.clone()))));
    let (tr2, tv) = mono(t)?;
    trace.extend(lift(tr2, &frame.compose(&EvalContext::ConsTail(hv.subject.clone(), hole()))));
    let step = root_step(&frame.plug(Expr::cons(hv.subject.clone(), tv.subject.clone())), "lcase-cons")?;
    let at = hv.ctx.len();
    let tv_wide = tv.weaken(at, &ch[2].ctx.entries()[at..at + 1]);
    let d2 = subst_elab(&subst_elab(&ch[2], &tv_wide)?, &hv)?;
    same_subject(&step.to, &d2)?;
    trace.push(step);
    Ok((trace, d2))
}

/// Answers the target step of `d.target` with source steps and a
/// derivation for the result.
pub fn simulate(d: &ElabDerivation) -> Result<SimulationCertificate, MetaError> {
    let (next, rule) = match target_step(&d.target) {
        TargetStep::Stepped { next, rule, .. } => (next, rule),
        TargetStep::Value => return violation("the target is already a value"),
        TargetStep::Stuck(why) => return violation(format!("well-typed target is stuck: {}", why)),
    };
    let (source_steps, after) = sim(d)?;
    if !after.target.alpha_eq(&next) {
        return violation(format!("simulation reached {} but the target stepped to {}", after.target, next));
    }
    Ok(SimulationCertificate {
        source_steps,
        derivation_after: after,
        target_before: d.target.clone(),
        target_after: next,
        target_rule: rule,
    })
}

/// Independent check of a certificate for a derivation with subject
/// `start`.
pub fn check_certificate(start: &Expr, c: &SimulationCertificate) -> Result<(), String> {
    check_trace(start, &c.source_steps, &c.derivation_after.subject)?;
    validate(&c.derivation_after).map_err(|e| format!("{}", e))?;
    if !c.derivation_after.target.alpha_eq(&c.target_after) {
        return Err(format!("derivation target {} is not {}", c.derivation_after.target, c.target_after));
    }
    Ok(())
}

fn check_trace(start: &Expr, trace: &[SourceStep], end: &Expr) -> Result<(), String> {
    let mut cur = start;
    for s in trace {
        if !s.from.alpha_eq(cur) {
            return Err(format!("step starts at {} but the trace is at {}", s.from, cur));
        }
        if !check_source_step(&s.from, &s.to, s.rule) {
            return Err(format!("{} ⤳ {} is not a {} step", s.from, s.to, s.rule));
        }
        cur = &s.to;
    }
    if !cur.alpha_eq(end) {
        return Err(format!("trace ends at {} but the derivation types {}", cur, end));
    }
    Ok(())
}

/// Whether the candidate enumerator finds `s` at its position, offering
/// split at that position.
pub fn step_is_candidate(s: &SourceStep) -> bool {
    decompose(&s.from).into_iter().any(|(c, r)| {
        c == s.context
            && source_step_candidates(&r, true)
                .iter()
                .any(|k| k.rule == s.rule && c.plug(k.to.clone()).alpha_eq(&s.to))
    })
}

/// One target step with the term it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetRecord {
    pub rule: &'static str,
    pub before: Term,
    pub after: Term,
    pub source_steps: StepTrace,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StarOutcome {
    pub value: Expr,
    pub derivation: ElabDerivation,
    pub target: Term,
    pub steps: Vec<TargetRecord>,
    /// Steps of the final appeal to value monotonicity.
    pub final_steps: StepTrace,
}

impl StarOutcome {
    /// Every source step, in order.
    pub fn trace(&self) -> StepTrace {
        let mut out: StepTrace = self.steps.iter().flat_map(|r| r.source_steps.iter().cloned()).collect();
        out.extend(self.final_steps.iter().cloned());
        out
    }
}

/// Runs the target to a value, simulating and checking every step, then
/// steps the source to a value.
pub fn simulate_star(d: &ElabDerivation, budget: usize) -> Result<StarOutcome, MetaError> {
    // the target is deterministic, so a run that cannot finish is found
    // without simulating it
    if let EvalOutcome::OutOfFuel { .. } = target_eval(&d.target, budget) {
        return Err(MetaError::Timeout(budget));
    }
    let mut cur = d.clone();
    let mut steps = Vec::new();
    while !cur.target.is_value() {
        if steps.len() >= budget {
            return Err(MetaError::Timeout(budget));
        }
        let cert = simulate(&cur)?;
        check_certificate(&cur.subject, &cert).map_err(MetaError::InvariantViolation)?;
        steps.push(TargetRecord {
            rule: cert.target_rule,
            before: cert.target_before,
            after: cert.target_after,
            source_steps: cert.source_steps,
        });
        cur = cert.derivation_after;
    }
    let (final_steps, dv) = value_mono(&cur)?;
    check_trace(&cur.subject, &final_steps, &dv.subject).map_err(MetaError::InvariantViolation)?;
    validate(&dv).map_err(|e| MetaError::InvariantViolation(format!("{}", e)))?;
    if !dv.subject.is_value() {
        return violation(format!("{} is not a value", dv.subject));
    }
    Ok(StarOutcome { value: dv.subject.clone(), target: dv.target.clone(), derivation: dv, steps, final_steps })
}
