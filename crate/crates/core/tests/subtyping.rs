use icc_core::ast::{type_translate, BaseType, Expr, SourceType, TypingContext};
use icc_core::elab::{apply_coercion, validate, Elaborator};
use icc_core::metatheory::{enumerate_core_types, generate_random_type};
use icc_core::subtyping::{reflexivity_coercion, subtype, subtype_holds};
use icc_core::surface::{read_expr, read_type};
use icc_core::target::target_typecheck_against;
use proptest::prelude::*;

fn ty(s: &str) -> SourceType {
    read_type(s).unwrap()
}

fn coercion(a: &str, b: &str) -> Expr {
    subtype(&ty(a), &ty(b)).unwrap().expr
}

fn assert_coercion(a: &str, b: &str, want: &str) {
    let got = coercion(a, b);
    assert!(got.alpha_eq(&read_expr(want, false).unwrap()), "{} <= {}: {}", a, b, got);
}

fn atoms() -> Vec<SourceType> {
    let mut atoms = vec![SourceType::Top];
    atoms.extend(BaseType::ALL.iter().map(|b| SourceType::Base(*b)));
    atoms
}

/// The coercion as a derivation of `x : A ⊢ c x : B`, built from the
/// subtyping derivation.
fn coercion_types(a: &SourceType, b: &SourceType) -> Result<(), String> {
    let c = subtype(a, b).map_err(|e| e.to_string())?;
    let cx = TypingContext::new().extend("x", a.clone());
    let dx = Elaborator::new().synth(&cx, &Expr::var("x")).map_err(|e| e.to_string())?;
    let d = apply_coercion(&c.derivation, dx);
    validate(&d).map_err(|e| format!("{}: {}", c, e))?;
    if &d.ty != b {
        return Err(format!("{} has type {}", c, d.ty));
    }
    target_typecheck_against(&cx.translate(), &d.target, &type_translate(b)).map_err(|e| e.to_string())
}

/// The coercion checked against `A → B` by the elaborator.
fn coercion_checks(a: &SourceType, b: &SourceType) -> Result<(), String> {
    let c = subtype(a, b).map_err(|e| e.to_string())?;
    let fun = SourceType::arrow(a.clone(), b.clone());
    let d = Elaborator::new().check(&TypingContext::new(), &c.expr, &fun).map_err(|e| format!("{}: {}", c, e))?;
    validate(&d).map_err(|e| e.to_string())?;
    target_typecheck_against(&Default::default(), &d.target, &type_translate(&fun)).map_err(|e| e.to_string())
}

#[test]
fn arrow_contravariance() {
    assert_coercion("top -> top", "(top & top) -> top", "fn f => fn x => (fn x => ()) (f ((fn x => ()) x))");
    assert_coercion("int -> int", "(int & real) -> int", "fn f => fn x => (fn x => x) (f ((fn x => x) x))");
}

#[test]
fn top_and_intersection_rules() {
    assert_coercion("top -> top", "top", "fn x => ()");
    assert_coercion("top", "top & top", "(fn x => ()) ,, (fn x => ())");
    assert!(subtype(&ty("top"), &ty("top -> top")).is_err());
}

#[test]
fn atomic_chain() {
    assert!(subtype_holds(&ty("top"), &ty("top")));
    assert!(subtype_holds(&ty("pos"), &ty("nat")));
    assert!(subtype_holds(&ty("pos"), &ty("int")));
    assert!(!subtype_holds(&ty("nat"), &ty("pos")));
    assert!(!subtype_holds(&ty("int"), &ty("real")));
}

#[test]
fn reflexivity_coercion_examples() {
    let top = reflexivity_coercion(&SourceType::Top).expr;
    assert!(top.alpha_eq(&read_expr("fn x => ()", false).unwrap()));
    let arrow = reflexivity_coercion(&ty("top -> top")).expr;
    assert!(arrow.alpha_eq(&read_expr("fn f => fn x => (fn x => ()) (f ((fn x => ()) x))", false).unwrap()));
    let int = reflexivity_coercion(&SourceType::int()).expr;
    assert!(int.alpha_eq(&read_expr("fn x => x", false).unwrap()));
}

#[test]
fn records_and_lists_are_covariant() {
    assert!(subtype_holds(&ty("{a : pos}"), &ty("{a : int}")));
    assert!(!subtype_holds(&ty("{a : int}"), &ty("{b : int}")));
    assert!(subtype_holds(&ty("list pos"), &ty("list int")));
    assert!(!subtype_holds(&ty("list int"), &ty("list pos")));
    coercion_checks(&ty("list pos"), &ty("list int")).unwrap();
    coercion_checks(&ty("{a : pos} & {b : string}"), &ty("{b : string}")).unwrap();
}

/// `fn x => (fn y => _ ,, _) x`
fn is_union_left_shape(e: &Expr) -> bool {
    let Expr::Lam(x, body) = e else { return false };
    let Expr::App(f, arg) = &**body else { return false };
    matches!(&**arg, Expr::Var(v) if v == x) && matches!(&**f, Expr::Lam(_, inner) if matches!(&**inner, Expr::Merge(..)))
}

#[test]
fn union_left_coercions_are_eta_expanded() {
    let mut seen = 0;
    for a in enumerate_core_types(4, &atoms()) {
        for b in enumerate_core_types(3, &atoms()) {
            if let Ok(c) = subtype(&a, &b) {
                if c.rule_trace.first() == Some(&"or-L") {
                    seen += 1;
                    assert!(is_union_left_shape(&c.expr), "{} <= {}: {}", a, b, c);
                }
            }
        }
    }
    assert!(seen > 0);
}

#[test]
fn reflexivity_up_to_size_five() {
    for a in enumerate_core_types(5, &atoms()) {
        assert!(subtype_holds(&a, &a), "{}", a);
    }
}

#[test]
fn transitivity_up_to_size_four() {
    let types = enumerate_core_types(4, &atoms());
    let le: Vec<Vec<bool>> = types.iter().map(|a| types.iter().map(|b| subtype_holds(a, b)).collect()).collect();
    for i in 0..types.len() {
        for j in (0..types.len()).filter(|&j| le[i][j]) {
            for k in (0..types.len()).filter(|&k| le[j][k]) {
                assert!(le[i][k], "{} <= {} <= {}", types[i], types[j], types[k]);
            }
        }
    }
}

#[test]
fn coercions_check_up_to_size_four() {
    let types = enumerate_core_types(4, &atoms());
    for a in &types {
        for b in &types {
            if subtype_holds(a, b) {
                coercion_types(a, b).unwrap();
                coercion_checks(a, b).unwrap();
            }
        }
    }
}

proptest! {
    #[test]
    fn random_reflexivity(seed in any::<u64>(), size in 1usize..=9) {
        let a = generate_random_type(seed, size);
        prop_assert!(subtype_holds(&a, &a));
        coercion_types(&a, &a).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn intersections_are_lower_bounds(s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = generate_random_type(s1, 5);
        let b = generate_random_type(s2, 5);
        let both = SourceType::intersect(a.clone(), b.clone());
        prop_assert!(subtype_holds(&both, &a));
        prop_assert!(subtype_holds(&both, &b));
        coercion_types(&both, &b).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn unions_are_upper_bounds(s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = generate_random_type(s1, 5);
        let b = generate_random_type(s2, 5);
        let either = SourceType::union(a.clone(), b.clone());
        prop_assert!(subtype_holds(&a, &either));
        prop_assert!(subtype_holds(&b, &either));
        coercion_types(&b, &either).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn random_transitivity(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (a, b, c) = (generate_random_type(s1, 5), generate_random_type(s2, 5), generate_random_type(s3, 5));
        if subtype_holds(&a, &b) && subtype_holds(&b, &c) {
            prop_assert!(subtype_holds(&a, &c));
        }
    }
}
