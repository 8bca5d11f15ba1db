use icc_core::ast::{Expr, SourceType, Term, TypingContext};
use icc_core::dynamics::check_source_step;
use icc_core::elab::{validate, ElabDerivation, Elaborator};
use icc_core::metatheory::{
    check_certificate, enumerate_core_terms, fuzz, generate_random, generate_random_type, simulate, simulate_star,
    step_is_candidate, subst_elab, value_mono, FuzzConfig, MetaError, StarOutcome,
};
use icc_core::surface::{read_expr, read_type};
use proptest::prelude::*;

fn expr(s: &str) -> Expr {
    read_expr(s, false).unwrap()
}

fn der_in(ctx: &TypingContext, e: &str, a: &str) -> ElabDerivation {
    Elaborator::new().check(ctx, &expr(e), &read_type(a).unwrap()).unwrap()
}

fn der(e: &str, a: &str) -> ElabDerivation {
    der_in(&TypingContext::new(), e, a)
}

fn rules(o: &StarOutcome) -> Vec<&'static str> {
    o.trace().iter().map(|s| s.rule).collect()
}

/// Every invariant a finished simulation must satisfy.
fn check_star(d: &ElabDerivation, o: &StarOutcome) -> Result<(), String> {
    let mut cur = d.subject.clone();
    for s in o.trace() {
        if !s.from.alpha_eq(&cur) {
            return Err(format!("trace breaks at {}", s.from));
        }
        if !check_source_step(&s.from, &s.to, s.rule) {
            return Err(format!("invalid step {}", s));
        }
        if !step_is_candidate(&s) {
            return Err(format!("{} is not a candidate of {}", s, s.from));
        }
        cur = s.to;
    }
    if !cur.alpha_eq(&o.value) || !o.value.is_value() || !o.target.is_value() {
        return Err(format!("ends at {}", cur));
    }
    validate(&o.derivation).map_err(|e| e.to_string())?;
    if o.derivation.ty != d.ty || o.derivation.target != o.target {
        return Err("final derivation changed type or target".into());
    }
    Ok(())
}

#[test]
fn value_mono_examples() {
    let (trace, dv) = value_mono(&der("fn x => x", "top -> top")).unwrap();
    assert!(trace.is_empty());
    assert!(dv.subject.alpha_eq(&expr("fn x => x")));

    let (trace, dv) = value_mono(&der("()", "top & top")).unwrap();
    assert_eq!(trace.iter().map(|s| s.rule).collect::<Vec<_>>(), vec!["split"]);
    assert_eq!(dv.subject, expr("() ,, ()"));
    assert!(dv.subject.is_value());

    let d = der("() ,, ()", "top");
    assert_eq!(d.target, Term::Unit);
    let (trace, dv) = value_mono(&d).unwrap();
    assert_eq!(trace.iter().map(|s| s.rule).collect::<Vec<_>>(), vec!["unmerge-left"]);
    assert_eq!(dv.subject, Expr::Unit);
}

#[test]
fn simulate_unmerges_then_reduces() {
    let d = der("((fn x => x) ,, ()) ()", "top");
    assert!(d.target.alpha_eq(&icc_core::surface::parse_target("(fn x => x) ()").unwrap()));
    let c = simulate(&d).unwrap();
    check_certificate(&d.subject, &c).unwrap();
    assert_eq!(c.target_after, Term::Unit);
    let steps: Vec<_> = c.source_steps.iter().map(|s| (s.outer_rule(), s.rule)).collect();
    assert_eq!(steps, vec![("app1", "unmerge-left"), ("beta", "beta")]);
    assert_eq!(c.derivation_after.subject, Expr::Unit);

    let o = simulate_star(&d, 10).unwrap();
    assert_eq!(o.value, Expr::Unit);
    assert_eq!(o.target, Term::Unit);
    check_star(&d, &o).unwrap();
}

#[test]
fn simulate_projection_uses_intersection_inversion() {
    let d = der("((fn x => x) ,, () : (top -> top) & top) ()", "top");
    let o = simulate_star(&d, 10).unwrap();
    check_star(&d, &o).unwrap();
    assert!(o.steps.iter().any(|r| r.rule == "proj"), "{:?}", o.steps);
}

#[test]
fn simulate_star_examples() {
    let d = der("()", "top");
    let o = simulate_star(&d, 10).unwrap();
    assert!(o.trace().is_empty() && o.steps.is_empty());
    assert!(matches!(simulate_star(&der("fix x => x", "top"), 50), Err(MetaError::Timeout(50))));
}

#[test]
fn unions_simulate_through_case() {
    let d = der("(fn x => x) (() : top \\/ top)", "top \\/ top");
    let o = simulate_star(&d, 50).unwrap();
    check_star(&d, &o).unwrap();
    assert!(o.steps.iter().any(|r| r.rule == "case-inj"));
}

#[test]
fn intersections_simulate_through_split() {
    let d = der("(fn f => f ()) ((fn x => x) ,, () : (top -> top) & top)", "top");
    let o = simulate_star(&d, 50).unwrap();
    check_star(&d, &o).unwrap();
    let d = der("(fn x => x) ,, (fn x => fn y => fn z => (x z) (y z))", "(top -> top) & ((top -> top -> top) -> (top -> top) -> top -> top)");
    let o = simulate_star(&d, 10).unwrap();
    assert!(o.trace().is_empty());
    assert!(o.value.alpha_eq(&d.subject));
}

#[test]
fn fixed_points_unroll() {
    let d = der("(fix f => fn x => x) ()", "top");
    let o = simulate_star(&d, 20).unwrap();
    check_star(&d, &o).unwrap();
    assert!(rules(&o).contains(&"fix"));
}

#[test]
fn substitution_agrees_with_target_substitution() {
    let ctx = TypingContext::new().extend("x", read_type("top -> top").unwrap());
    let d = der_in(&ctx, "(fn y => x y) ,, x", "(top -> top) & (top -> top)");
    let dv = der("fn z => z", "top -> top");
    let out = subst_elab(&d, &dv).unwrap();
    validate(&out).unwrap();
    assert!(out.target.alpha_eq(&d.target.subst("x", &dv.target)));
    assert!(out.subject.alpha_eq(&d.subject.subst("x", &dv.subject)));
}

#[test]
fn small_programs_simulate() {
    let types: Vec<SourceType> = ["top", "top -> top", "top & top", "top \\/ top", "(top -> top) & top"]
        .iter()
        .map(|s| read_type(s).unwrap())
        .collect();
    let mut simulated = 0;
    for e in enumerate_core_terms(4) {
        for a in &types {
            let Ok(d) = Elaborator::new().check(&TypingContext::new(), &e, a) else { continue };
            match simulate_star(&d, 100) {
                Ok(o) => {
                    check_star(&d, &o).unwrap_or_else(|m| panic!("{} <= {}: {}", e, a, m));
                    simulated += 1;
                }
                Err(MetaError::Timeout(_)) => {}
                Err(err) => panic!("{} <= {}: {}", e, a, err),
            }
        }
    }
    assert!(simulated > 200, "{}", simulated);
}

#[test]
fn fuzz_reports_are_reproducible() {
    let cfg = FuzzConfig { sizes: 1..=4, count: 30, seed: 7, max_steps: 200 };
    let a = fuzz(&cfg);
    let b = fuzz(&cfg);
    assert_eq!(a.to_string(), b.to_string());
    assert!(a.failures.is_empty(), "{}", a);
    assert_eq!(a.cases, 120);
    assert_eq!(a.elaborated, a.sound);
}

proptest! {
    #[test]
    fn random_programs_simulate(seed in any::<u64>(), size in 1usize..=8) {
        let e = generate_random(seed, size, &[]);
        let a = generate_random_type(seed.rotate_left(23), 3);
        let Ok(d) = Elaborator::new().check(&TypingContext::new(), &e, &a) else { return Ok(()) };
        match simulate_star(&d, 200) {
            Ok(o) => check_star(&d, &o).map_err(TestCaseError::fail)?,
            Err(MetaError::Timeout(_)) => {}
            Err(err) => prop_assert!(false, "{} <= {}: {}", e, a, err),
        }
    }

    #[test]
    fn random_substitution_of_values(seed in any::<u64>(), size in 1usize..=7) {
        let e = generate_random(seed, size, &["x".into()]);
        let a = generate_random_type(seed.rotate_left(5), 3);
        let ctx = TypingContext::new().extend("x", read_type("top -> top").unwrap());
        let Ok(d) = Elaborator::new().check(&ctx, &e, &a) else { return Ok(()) };
        let dv = der("fn z => z", "top -> top");
        let out = subst_elab(&d, &dv).map_err(|err| TestCaseError::fail(err.to_string()))?;
        prop_assert!(validate(&out).is_ok());
        prop_assert!(out.target.alpha_eq(&d.target.subst("x", &dv.target)));
    }
}
