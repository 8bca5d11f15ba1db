//! One pass/fail line per acceptance criterion.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use icc_core::ast::{type_translate, BaseType, Expr, SourceType, TypingContext};
use icc_core::dynamics::check_source_step;
use icc_core::elab::{apply_coercion, coercion_derivation, has_function_derivation, derivation_alpha_eq, erase, reelaborate, validate, ElabDerivation, Elaborator};
use icc_core::metatheory::{
    enumerate_core_terms, enumerate_core_types, generate_random, generate_random_type, simulate_star, MetaError,
    StarOutcome,
};
use icc_core::subtyping::subtype;
use icc_core::surface::{parse_target, read_expr, read_type};
use icc_core::target::{applicable_rules, target_step, target_typecheck_against, TargetStep};

type Verdict = Result<String, String>;

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn run_example(stem: &str, expected: &str) -> Verdict {
    let t = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_icc"))
        .arg("run")
        .arg(example(&format!("{}.icc", stem)))
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let stdout = String::from_utf8_lossy(&out.stdout);
    if !out.status.success() {
        return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    if stdout != expected {
        return Err(format!("printed {:?}", stdout));
    }
    let golden = std::fs::read_to_string(example(&format!("{}.out", stem))).map_err(|e| e.to_string())?;
    if stdout != golden {
        return Err("output differs from the golden file".into());
    }
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("took {:?}", elapsed));
    }
    Ok(format!("exact output in {:?}", elapsed))
}

fn check_closed(e: &str, a: &str) -> Result<ElabDerivation, String> {
    let e = read_expr(e, false).map_err(|x| x.to_string())?;
    let a = read_type(a).map_err(|x| x.to_string())?;
    Elaborator::new().check(&TypingContext::new(), &e, &a).map_err(|x| x.to_string())
}

fn elaborates_to(e: &str, a: &str, m: &str) -> Result<(), String> {
    let d = check_closed(e, a)?;
    let want = parse_target(m).map_err(|x| x.to_string())?;
    if d.target.alpha_eq(&want) {
        Ok(())
    } else {
        Err(format!("{} <= {} elaborated to {}, not {}", e, a, d.target, m))
    }
}

fn coherence() -> Verdict {
    elaborates_to("0,,1", "nat", "0")?;
    elaborates_to("0,,1", "pos & nat", "<1, 0>")?;
    elaborates_to("1,,0", "pos & nat", "<1, 1>")?;
    Ok("3 of 3 targets match".into())
}

fn inhabitation() -> Verdict {
    elaborates_to(
        "(fn x => x) ,, (fn x => fn y => fn z => (x z) (y z))",
        "(top -> top) & ((top -> top -> top) -> (top -> top) -> top -> top)",
        "<fn x => x, fn x => fn y => fn z => (x z) (y z)>",
    )?;
    Ok("I,,S elaborates to <I, S>".into())
}

const FUZZ_SIZES: std::ops::RangeInclusive<usize> = 6..=9;
const FUZZ_PER_SIZE: usize = 300;

/// Elaborations of (6), kept for (7) and (10).
struct Corpus {
    derivations: Vec<(ElabDerivation, SourceType)>,
}

fn soundness(corpus: &mut Corpus) -> Verdict {
    let terms = enumerate_core_terms(5);
    let types = enumerate_core_types(3, &[SourceType::Top]);
    let mut cases: Vec<_> = terms.iter().flat_map(|e| types.iter().map(move |a| (e.clone(), a.clone()))).collect();
    let exhaustive = cases.len();
    for size in FUZZ_SIZES {
        for i in 0..FUZZ_PER_SIZE {
            let s = 0xACCE_97ED ^ ((size as u64) << 32) ^ i as u64;
            cases.push((generate_random(s, size, &[]), generate_random_type(s.rotate_left(17), 3)));
        }
    }
    let fuzzed = cases.len() - exhaustive;
    for (e, a) in &cases {
        let Ok(d) = Elaborator::new().check(&TypingContext::new(), e, a) else { continue };
        target_typecheck_against(&Default::default(), &d.target, &type_translate(a))
            .map_err(|err| format!("{} <= {}: {}", e, a, err))?;
        corpus.derivations.push((d, a.clone()));
    }
    Ok(format!(
        "{} exhaustive + {} fuzzed cases, {} elaborations typecheck",
        exhaustive,
        fuzzed,
        corpus.derivations.len()
    ))
}

const BUDGET: usize = 500;

fn check_outcome(d: &ElabDerivation, a: &SourceType, o: &StarOutcome) -> Result<(), String> {
    let mut cur = d.subject.clone();
    for s in o.trace() {
        if !s.from.alpha_eq(&cur) || !check_source_step(&s.from, &s.to, s.rule) {
            return Err(format!("bad step {}: {} ⤳ {}", s.rule, s.from, s.to));
        }
        cur = s.to;
    }
    if !cur.alpha_eq(&o.value) || !o.value.is_value() {
        return Err(format!("trace ends at {}, not at a value", cur));
    }
    validate(&o.derivation).map_err(|e| e.to_string())?;
    if &o.derivation.ty != a || !o.derivation.target.is_value() {
        return Err(format!("final derivation types {} at {}", o.value, o.derivation.ty));
    }
    Ok(())
}

fn consistency(corpus: &Corpus, traces: &mut Vec<StarOutcome>) -> Verdict {
    let mut timeouts = 0;
    let mut source_steps = 0;
    for (d, a) in &corpus.derivations {
        match simulate_star(d, BUDGET) {
            Ok(o) => {
                check_outcome(d, a, &o).map_err(|e| format!("{} <= {}: {}", d.subject, a, e))?;
                source_steps += o.trace().len();
                traces.push(o);
            }
            Err(MetaError::Timeout(_)) => timeouts += 1,
            Err(e) => return Err(format!("{} <= {}: {}", d.subject, a, e)),
        }
    }
    if traces.len() < 200 {
        return Err(format!("only {} programs reached a value", traces.len()));
    }
    Ok(format!(
        "{} programs simulated to values ({} source steps), {} beyond {} steps",
        traces.len(),
        source_steps,
        timeouts,
        BUDGET
    ))
}

fn determinism(traces: &[StarOutcome]) -> Verdict {
    let mut terms = 0;
    for o in traces {
        for r in &o.steps {
            terms += 1;
            let rules = applicable_rules(&r.before);
            if rules.len() > 1 {
                return Err(format!("{} rules apply to {}: {:?}", rules.len(), r.before, rules));
            }
            if let TargetStep::Stuck(why) = target_step(&r.before) {
                return Err(format!("stuck at {}: {}", r.before, why));
            }
        }
        terms += 1;
        if !applicable_rules(&o.target).is_empty() {
            return Err(format!("a rule applies to the value {}", o.target));
        }
    }
    Ok(format!("{} terms audited", terms))
}

fn subtyping() -> Verdict {
    let mut atoms = vec![SourceType::Top];
    atoms.extend(BaseType::ALL.iter().map(|b| SourceType::Base(*b)));
    let types = enumerate_core_types(4, &atoms);
    let n = types.len();
    for a in &types {
        subtype(a, a).map_err(|e| format!("reflexivity: {}", e))?;
    }
    let le: Vec<Vec<bool>> = types.iter().map(|a| types.iter().map(|b| subtype(a, b).is_ok()).collect()).collect();
    let mut chains = 0;
    for i in 0..n {
        for j in 0..n {
            if !le[i][j] {
                continue;
            }
            for k in 0..n {
                if le[j][k] {
                    chains += 1;
                    if !le[i][k] {
                        return Err(format!("transitivity: {} ≤ {} ≤ {}", types[i], types[j], types[k]));
                    }
                }
            }
        }
    }
    let ctx = TypingContext::new();
    let mut coercions = 0;
    for (i, a) in types.iter().enumerate() {
        for (j, b) in types.iter().enumerate() {
            if !le[i][j] {
                continue;
            }
            let c = subtype(a, b).map_err(|e| e.to_string())?;
            let fun = SourceType::arrow(a.clone(), b.clone());
            let d = if has_function_derivation(&c.derivation) {
                coercion_derivation(&ctx, &c.derivation)
            } else {
                let cx = ctx.extend("x", a.clone());
                let dx = Elaborator::new().synth(&cx, &Expr::var("x")).map_err(|e| e.to_string())?;
                apply_coercion(&c.derivation, dx)
            };
            validate(&d).map_err(|e| format!("coercion {} for {} ≤ {}: {}", c, a, b, e))?;
            let checked = Elaborator::new()
                .check(&ctx, &c.expr, &fun)
                .map_err(|e| format!("coercion {} does not check against {}: {}", c, fun, e))?;
            target_typecheck_against(&Default::default(), &checked.target, &type_translate(&fun))
                .map_err(|e| format!("coercion {}: {}", c, e))?;
            coercions += 1;
        }
    }
    Ok(format!("{} types, {} chains, {} coercions check", n, chains, coercions))
}

fn round_trip(corpus: &Corpus) -> Verdict {
    for (d, _) in &corpus.derivations {
        let again = reelaborate(&erase(d)).map_err(|e| format!("{}: {}", d.subject, e))?;
        if !derivation_alpha_eq(&again, d) {
            return Err(format!("{} reelaborates differently", d.subject));
        }
    }
    Ok(format!("{} derivations", corpus.derivations.len()))
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Verdict) -> (Verdict, Duration) {
    let t = Instant::now();
    let v = f();
    let elapsed = t.elapsed();
    match (v, limit) {
        (Ok(_), Some(l)) if elapsed >= l => (Err(format!("took {:?}, limit {:?}", elapsed, l)), elapsed),
        (v, _) => (v, elapsed),
    }
}

fn criteria() -> Vec<(usize, &'static str, Verdict, Duration)> {
    let mut out = Vec::new();
    let mut push = |n, name, (v, t)| out.push((n, name, v, t));
    push(1, "overloading demo", timed(None, || run_example("overload", "150.0; 81; 0.25\n")));
    push(
        2,
        "records demo",
        timed(None, || {
            run_example(
                "record",
                "get_xy rec1 = (1,11)\nget_xy rec2 = (2,22) (extra = 100)\nget_xy rec3 = (3,33) (other = a string)\n",
            )
        }),
    );
    push(3, "heterogeneous data demo", timed(None, || run_example("dyn", "1::2::what::3.14159::4::why::nil\n")));
    push(4, "coherence examples", timed(None, coherence));
    push(5, "inhabitation of (A -> A) & D", timed(None, inhabitation));
    let mut corpus = Corpus { derivations: Vec::new() };
    push(6, "elaboration soundness", timed(Some(Duration::from_secs(120)), || soundness(&mut corpus)));
    let mut traces = Vec::new();
    push(7, "consistency", timed(Some(Duration::from_secs(120)), || consistency(&corpus, &mut traces)));
    push(8, "target determinism and safety", timed(None, || determinism(&traces)));
    push(9, "subtyping metatheory", timed(Some(Duration::from_secs(60)), subtyping));
    push(10, "erase/reelaborate round trip", timed(None, || round_trip(&corpus)));
    out
}

fn main() {
    let results = std::thread::Builder::new()
        .stack_size(1 << 30)
        .spawn(criteria)
        .expect("worker thread")
        .join()
        .expect("acceptance run panicked");
    let mut failed = 0;
    for (n, name, v, t) in &results {
        match v {
            Ok(msg) => println!("criterion {:>2} PASS {}: {} [{:.2?}]", n, name, msg, t),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL {}: {} [{:.2?}]", n, name, msg, t)
            }
        }
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
