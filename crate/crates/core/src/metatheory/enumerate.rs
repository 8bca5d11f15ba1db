//! Exhaustive and random generation of core terms and types.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ast::{Expr, Name, SourceType};

/// Binder name at depth `i`. Naming binders by depth makes α-equivalent
/// terms syntactically equal.
pub fn binder(i: usize) -> Name {
    format!("x{}", i)
}

/// All closed core terms over `()`, variables, λ, application, fix and
/// merge with size at most `max_size`, smallest first.
pub fn enumerate_core_terms(max_size: usize) -> Vec<Expr> {
    let mut memo = BTreeMap::new();
    (1..=max_size).flat_map(|s| terms(s, 0, &mut memo)).collect()
}

fn terms(size: usize, depth: usize, memo: &mut BTreeMap<(usize, usize), Vec<Expr>>) -> Vec<Expr> {
    if let Some(v) = memo.get(&(size, depth)) {
        return v.clone();
    }
    let mut out = Vec::new();
    if size == 1 {
        out.push(Expr::Unit);
        out.extend((0..depth).map(|i| Expr::var(binder(i))));
    } else {
        for body in terms(size - 1, depth + 1, memo) {
            out.push(Expr::lam(binder(depth), body.clone()));
            out.push(Expr::fix(binder(depth), body));
        }
        for s1 in 1..size {
            let left = terms(s1, depth, memo);
            let right = terms(size - s1, depth, memo);
            for a in &left {
                for b in &right {
                    out.push(Expr::app(a.clone(), b.clone()));
                    out.push(Expr::merge(a.clone(), b.clone()));
                }
            }
        }
    }
    memo.insert((size, depth), out.clone());
    out
}

/// All types of size at most `max_size` built from `atoms` with `→`, `∧`
/// and `∨`, smallest first.
pub fn enumerate_core_types(max_size: usize, atoms: &[SourceType]) -> Vec<SourceType> {
    let mut by_size: Vec<Vec<SourceType>> = vec_of_empty(max_size + 1);
    for s in 1..=max_size {
        let mut here = Vec::new();
        if s == 1 {
            here.extend(atoms.iter().cloned());
        }
        for s1 in 1..s.saturating_sub(1) {
            let s2 = s - 1 - s1;
            for a in &by_size[s1] {
                for b in &by_size[s2] {
                    here.push(SourceType::arrow(a.clone(), b.clone()));
                    here.push(SourceType::intersect(a.clone(), b.clone()));
                    here.push(SourceType::union(a.clone(), b.clone()));
                }
            }
        }
        by_size[s] = here;
    }
    by_size.into_iter().flatten().collect()
}

fn vec_of_empty<T>(n: usize) -> Vec<Vec<T>> {
    (0..n).map(|_| Vec::new()).collect()
}

/// A core term of exactly `size` whose free variables are among `ctx`,
/// determined by `seed`.
pub fn generate_random(seed: u64, size: usize, ctx: &[Name]) -> Expr {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scope: Vec<Name> = ctx.to_vec();
    random_term(&mut rng, size.max(1), &mut scope)
}

fn random_term(rng: &mut ChaCha8Rng, size: usize, scope: &mut Vec<Name>) -> Expr {
    if size == 1 {
        let k = rng.gen_range(0..=scope.len());
        return if k == scope.len() { Expr::Unit } else { Expr::var(scope[k].clone()) };
    }
    let choice = if size == 2 { rng.gen_range(0..2) } else { rng.gen_range(0..5) };
    match choice {
        0 | 1 => {
            let x = fresh_binder(scope);
            scope.push(x.clone());
            let body = random_term(rng, size - 1, scope);
            scope.pop();
            // fixed points are rarer than functions
            if choice == 1 && rng.gen_bool(0.3) {
                Expr::fix(x, body)
            } else {
                Expr::lam(x, body)
            }
        }
        c => {
            let s1 = rng.gen_range(1..size);
            let a = random_term(rng, s1, scope);
            let b = random_term(rng, size - s1, scope);
            if c == 4 {
                Expr::merge(a, b)
            } else {
                Expr::app(a, b)
            }
        }
    }
}

fn fresh_binder(scope: &[Name]) -> Name {
    let mut i = scope.len();
    loop {
        let x: String = binder(i);
        if !scope.contains(&x) {
            return x;
        }
        i += 1;
    }
}

/// A uniformly chosen core type over `⊤` of size at most `max_size`.
pub fn generate_random_type(seed: u64, max_size: usize) -> SourceType {
    let all = enumerate_core_types(max_size, &[SourceType::Top]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    all[rng.gen_range(0..all.len())].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use alloc::string::ToString;

    #[test]
    fn small_terms() {
        let shown: Vec<String> = enumerate_core_terms(2).iter().map(|e| e.to_string()).collect();
        for want in ["()", "fn x0 => ()", "fn x0 => x0", "() ,, ()", "fix x0 => x0"] {
            assert!(shown.iter().any(|s| s == want), "{} missing from {:?}", want, shown);
        }
    }

    #[test]
    fn closed_and_distinct_up_to_alpha() {
        let all = enumerate_core_terms(5);
        assert!(all.iter().all(Expr::is_closed));
        let set: BTreeSet<String> = all.iter().map(|e| e.to_string()).collect();
        assert_eq!(set.len(), all.len());
        for (i, a) in all.iter().enumerate().take(200) {
            for b in &all[i + 1..] {
                assert!(!a.alpha_eq(b));
            }
        }
    }

    #[test]
    fn type_counts() {
        let top = [SourceType::Top];
        assert_eq!(enumerate_core_types(1, &top).len(), 1);
        assert_eq!(enumerate_core_types(3, &top).len(), 4);
        assert_eq!(enumerate_core_types(5, &top).len(), 4 + 2 * 3 * 3);
    }

    #[test]
    fn random_is_deterministic_and_closed() {
        assert_eq!(generate_random(42, 5, &[]), generate_random(42, 5, &[]));
        for seed in 0..200 {
            let e = generate_random(seed, 7, &[]);
            assert!(e.is_closed());
            assert_eq!(e.size(), 7);
        }
    }
}
