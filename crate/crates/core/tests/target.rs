use icc_core::ast::{type_translate, Term, TypingContext};
use icc_core::elab::Elaborator;
use icc_core::metatheory::{generate_random, generate_random_type};
use icc_core::surface::{parse_target, read_type};
use icc_core::target::{
    applicable_rules, target_eval, target_step, target_typecheck_against, target_typecheck_synth, EvalOutcome,
    TargetStep,
};
use proptest::prelude::*;

fn term(s: &str) -> Term {
    parse_target(s).unwrap()
}

fn stepped(s: &str) -> (Term, &'static str) {
    match target_step(&term(s)) {
        TargetStep::Stepped { next, rule, .. } => (next, rule),
        r => panic!("{} did not step: {:?}", s, r),
    }
}

#[test]
fn typechecking_examples() {
    let t = |s: &str| type_translate(&read_type(s).unwrap());
    let ctx = Default::default();
    target_typecheck_against(&ctx, &term("<(), fn x => x>"), &t("unit & (unit -> unit)")).unwrap();
    assert!(target_typecheck_synth(&ctx, &term("proj1 ()")).is_err());
    target_typecheck_against(&ctx, &term("<1, 0>"), &t("pos & nat")).unwrap();
}

#[test]
fn step_examples() {
    assert_eq!(stepped("proj1 <(), fn x => x>"), (Term::Unit, "proj"));
    assert_eq!(stepped("case inj1 () of inj1 x => x | inj2 y => y"), (Term::Unit, "case-inj"));
    let (next, rule) = stepped("fix f => f");
    assert!(next.alpha_eq(&term("fix f => f")));
    assert_eq!(rule, "fix");
}

#[test]
fn pairs_evaluate_left_to_right() {
    let (next, _) = stepped("<(fn x => x) (), (fn y => y) ()>");
    assert_eq!(next, term("<(), (fn y => y) ()>"));
    let (next, _) = stepped("<(), (fn y => y) ()>");
    assert_eq!(next, term("<(), ()>"));
}

#[test]
fn eval_examples() {
    match target_eval(&term("(fn x => x) ()"), 100) {
        EvalOutcome::Value { value, steps, .. } => assert_eq!((value, steps), (Term::Unit, 1)),
        r => panic!("{:?}", r),
    }
    assert!(matches!(target_eval(&term("fix f => f"), 10), EvalOutcome::OutOfFuel { steps: 10, .. }));
    assert!(matches!(target_eval(&term("proj1 ()"), 10), EvalOutcome::Stuck { .. }));
}

#[test]
fn integer_division_by_zero_is_stuck() {
    let m = term("@divi(1, 0)");
    assert!(matches!(target_step(&m), TargetStep::Stuck(r) if r == "div-by-zero"));
}

#[test]
fn integers_are_exact() {
    let m = term("@muli(123456789012345678901234567890, 10)");
    let v = target_eval(&m, 5).value().cloned().unwrap();
    assert_eq!(v.to_string(), "1234567890123456789012345678900");
}

#[test]
fn values_do_not_step() {
    for s in ["()", "fn x => x", "<(), ()>", "inj2 (fn x => x)", "1", "\"s\"", "nil", "{a = ()}"] {
        assert_eq!(target_step(&term(s)), TargetStep::Value, "{}", s);
        assert!(applicable_rules(&term(s)).is_empty());
    }
}

/// Closed target terms over unit, variables, λ, fix, application, pairs,
/// projections, injections and case, by size.
fn enumerate(size: usize, scope: usize) -> Vec<Term> {
    let x = |i: usize| format!("x{}", i);
    let mut out = Vec::new();
    if size == 1 {
        out.push(Term::Unit);
        out.extend((0..scope).map(|i| Term::var(x(i))));
        return out;
    }
    for b in enumerate(size - 1, scope + 1) {
        out.push(Term::lam(x(scope), b.clone()));
        out.push(Term::fix(x(scope), b));
    }
    for b in enumerate(size - 1, scope) {
        out.push(Term::proj(1, b.clone()));
        out.push(Term::proj(2, b.clone()));
        out.push(Term::inj(1, b.clone()));
        out.push(Term::inj(2, b));
    }
    for l in 1..size - 1 {
        for a in enumerate(l, scope) {
            for b in enumerate(size - 1 - l, scope) {
                out.push(Term::app(a.clone(), b.clone()));
                out.push(Term::pair(a.clone(), b));
            }
        }
    }
    for s in 1..size {
        for l in 1..size - s {
            let r = size - s - l;
            if r == 0 {
                continue;
            }
            for m in enumerate(s, scope) {
                for a in enumerate(l, scope + 1) {
                    for b in enumerate(r, scope + 1) {
                        out.push(Term::case(m.clone(), x(scope), a.clone(), x(scope), b));
                    }
                }
            }
        }
    }
    out
}

#[test]
fn rule_overlap_audit_up_to_size_six() {
    let mut n = 0;
    for size in 1..=6 {
        for m in enumerate(size, 0) {
            n += 1;
            let rules = applicable_rules(&m);
            assert!(rules.len() <= 1, "{}: {:?}", m, rules);
            match target_step(&m) {
                TargetStep::Stepped { .. } => assert_eq!(rules.len(), 1, "{}", m),
                TargetStep::Value | TargetStep::Stuck(_) => assert!(rules.is_empty(), "{}: {:?}", m, rules),
            }
        }
    }
    assert!(n > 10_000, "{}", n);
}

proptest! {
    #[test]
    fn elaborated_targets_are_safe(seed in any::<u64>(), size in 1usize..=9) {
        let e = generate_random(seed, size, &[]);
        let a = generate_random_type(seed.rotate_left(9), 3);
        let Ok(d) = Elaborator::new().check(&TypingContext::new(), &e, &a) else { return Ok(()) };
        let t = type_translate(&a);
        let mut m = d.target;
        for _ in 0..200 {
            prop_assert!(applicable_rules(&m).len() <= 1);
            match target_step(&m) {
                TargetStep::Value => break,
                TargetStep::Stuck(why) => prop_assert!(false, "{} is stuck: {}", m, why),
                TargetStep::Stepped { next, .. } => {
                    prop_assert!(target_typecheck_against(&Default::default(), &next, &t).is_ok(), "{}", next);
                    m = next;
                }
            }
        }
    }
}
