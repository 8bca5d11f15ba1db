//! Variable names and deterministic fresh-name generation.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;

pub type Name = String;
pub type Label = String;

/// Strips a trailing `'N` suffix so that repeated freshening of `x` yields
/// `x'1`, `x'2`, ... instead of `x'1'1`.
fn stem(name: &str) -> &str {
    if let Some(idx) = name.rfind('\'') {
        let tail = &name[idx + 1..];
        if !tail.is_empty() && tail.bytes().all(|b| b.is_ascii_digit()) {
            return &name[..idx];
        }
    }
    name
}

/// Returns the first name of the form `base'N` (N ≥ 1) rejected by `taken`.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> Name {
    let stem = stem(base);
    let mut n = 1u64;
    loop {
        let candidate = format!("{}'{}", stem, n);
        if !taken(&candidate) {
            return candidate;
        }
        n += 1;
    }
}

/// A counter-based supply that never repeats and avoids a fixed set of names.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    avoid: BTreeSet<Name>,
    counter: u64,
}

impl NameSupply {
    pub fn new(avoid: BTreeSet<Name>) -> Self {
        NameSupply { avoid, counter: 0 }
    }

    pub fn avoid(&mut self, name: &str) {
        self.avoid.insert(name.into());
    }

    pub fn fresh(&mut self, base: &str) -> Name {
        let stem = stem(base);
        loop {
            self.counter += 1;
            let candidate = format!("{}'{}", stem, self.counter);
            if !self.avoid.contains(&candidate) {
                self.avoid.insert(candidate.clone());
                return candidate;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_skips_taken_names() {
        let name = fresh_name("x", |n| n == "x'1");
        assert_eq!(name, "x'2");
        assert_eq!(fresh_name("x'7", |_| false), "x'1");
    }

    #[test]
    fn supply_never_repeats() {
        let mut s = NameSupply::new(BTreeSet::new());
        let a = s.fresh("t");
        let b = s.fresh("t");
        assert_ne!(a, b);
    }
}
