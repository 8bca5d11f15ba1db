use icc_core::ast::{EvalContext, Expr};
use icc_core::dynamics::{audit_candidates, check_source_step, decompose, plug, source_step_candidates, SourceStep};
use icc_core::metatheory::{enumerate_core_terms, generate_random};
use icc_core::surface::read_expr;
use proptest::prelude::*;

fn expr(s: &str) -> Expr {
    read_expr(s, false).unwrap()
}

fn steps(s: &str, split: bool) -> Vec<String> {
    source_step_candidates(&expr(s), split).iter().map(|s| s.to_string()).collect()
}

#[test]
fn validator_examples() {
    assert!(check_source_step(&expr("(),,()"), &expr("()"), "unmerge-left"));
    assert!(check_source_step(&expr("()"), &expr("(),,()"), "split"));
    assert!(!check_source_step(&expr("()"), &expr("fn x => x"), "beta"));
    assert!(!check_source_step(&expr("()"), &expr("()"), "no-such-rule"));
}

#[test]
fn validator_accepts_axioms_in_context_and_congruences() {
    let from = expr("((fn x => x) ()) ,, ()");
    let to = expr("() ,, ()");
    assert!(check_source_step(&from, &to, "beta"));
    assert!(check_source_step(&from, &to, "merge1"));
    assert!(!check_source_step(&from, &to, "merge2"));
    assert!(check_source_step(&expr("fn x => x"), &expr("(fn x => x) ,, fn x => x"), "split"));
}

#[test]
fn contexts_plug_and_decompose() {
    let c = EvalContext::AppFun(Box::new(EvalContext::Hole), Expr::Unit);
    assert!(plug(&c, expr("fn x => x")).alpha_eq(&expr("(fn x => x) ()")));
    assert!(decompose(&expr("(),,()")).contains(&(EvalContext::MergeL(Box::new(EvalContext::Hole), Expr::Unit), Expr::Unit)));
    let e = expr("(fn x => x) ()");
    assert_eq!(plug(&EvalContext::Hole, e.clone()), e);
}

#[test]
fn candidate_examples() {
    assert_eq!(steps("(fn x => x) ()", false), vec!["beta: ()"]);
    assert_eq!(steps("() ,, fn x => x", false), vec!["unmerge-left: ()", "unmerge-right: fn x => x"]);
    assert_eq!(steps("()", false), Vec::<String>::new());
    assert_eq!(steps("()", true), vec!["split: () ,, ()"]);
    assert_eq!(steps("fix f => f", false), vec!["fix: fix f => f"]);
    assert_eq!(steps("let y = () in y end", false), vec!["let: ()"]);
}

#[test]
fn beta_requires_a_value() {
    let s = steps("(fn x => x) ((fn y => y) ())", false);
    assert_eq!(s, vec!["beta: (fn x => x) ()"]);
}

#[test]
fn extension_rules_step() {
    assert_eq!(steps("{a = ()}.a", false), vec!["field: ()"]);
    assert_eq!(steps("lcase nil of nil => () | cons h t => h", false), vec!["lcase-nil: ()"]);
    assert_eq!(steps("lcase cons () nil of nil => () | cons h t => h", false), vec!["lcase-cons: ()"]);
    let p = read_expr("add 1 2", true).unwrap();
    assert!(source_step_candidates(&p, false).iter().any(|s| s.rule == "delta"));
}

#[test]
fn split_is_offered_only_at_the_root() {
    for s in source_step_candidates(&expr("(fn x => x) ()"), true) {
        if s.rule == "split" {
            assert_eq!(s.context, EvalContext::Hole);
        }
    }
}

#[test]
fn candidates_are_sound_on_enumerated_terms() {
    for e in enumerate_core_terms(5) {
        for s in source_step_candidates(&e, true) {
            assert!(s.from.alpha_eq(&e));
            assert!(check_source_step(&s.from, &s.to, s.rule), "{} by {}", e, s);
            assert!(check_source_step(&s.from, &s.to, s.outer_rule()), "{} by {}", e, s);
        }
    }
}

#[test]
fn candidates_are_complete_on_enumerated_terms() {
    for e in enumerate_core_terms(6) {
        audit_candidates(&e).unwrap();
    }
}

#[test]
fn no_steps_under_binders() {
    assert!(source_step_candidates(&expr("fn x => (x ,, ())"), false).is_empty());
    assert!(source_step_candidates(&expr("fn x => (fn y => y) ()"), false).is_empty());
}

fn small_value(k: u8) -> Expr {
    match k % 3 {
        0 => Expr::Unit,
        1 => expr("fn v => v"),
        _ => expr("() ,, fn v => ()"),
    }
}

/// A random evaluation context of `depth` frames.
fn random_context(seed: u64, depth: usize) -> EvalContext {
    let mut c = EvalContext::Hole;
    for i in 0..depth {
        let pick = (seed >> (3 * i)) & 7;
        let other = generate_random(seed.rotate_left(i as u32 * 7), 1 + (pick as usize % 3), &[]);
        c = match pick % 5 {
            0 => EvalContext::AppFun(Box::new(c), other),
            1 => EvalContext::AppArg(small_value(pick as u8), Box::new(c)),
            2 => EvalContext::MergeL(Box::new(c), other),
            3 => EvalContext::MergeR(other, Box::new(c)),
            _ => EvalContext::LetBound("z".into(), Box::new(c), Expr::var("z")),
        };
    }
    c
}

/// Follows the first non-split candidate up to `n` times.
fn run(e: &Expr, n: usize) -> Vec<SourceStep> {
    let mut out = Vec::new();
    let mut cur = e.clone();
    for _ in 0..n {
        let Some(s) = source_step_candidates(&cur, false).into_iter().next() else { break };
        cur = s.to.clone();
        out.push(s);
    }
    out
}

proptest! {
    #[test]
    fn steps_lift_through_contexts(seed in any::<u64>(), size in 1usize..=8, depth in 0usize..=4, cseed in any::<u64>()) {
        let e = generate_random(seed, size, &[]);
        let c = random_context(cseed, depth);
        for s in run(&e, 8) {
            let lifted = s.lift(&c);
            prop_assert!(check_source_step(&lifted.from, &lifted.to, lifted.rule), "{} in {}", s, c);
            prop_assert!(check_source_step(&lifted.from, &lifted.to, lifted.outer_rule()), "{} in {}", s, c);
        }
    }

    #[test]
    fn random_candidates_are_sound(seed in any::<u64>(), size in 1usize..=10) {
        let e = generate_random(seed, size, &[]);
        for s in source_step_candidates(&e, true) {
            prop_assert!(check_source_step(&s.from, &s.to, s.rule), "{} by {}", e, s);
        }
    }

    #[test]
    fn random_candidates_are_complete(seed in any::<u64>(), size in 7usize..=9) {
        let e = generate_random(seed, size, &[]);
        prop_assert!(audit_candidates(&e).is_ok());
    }
}
