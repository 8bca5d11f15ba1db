//! Typing contexts. Lookup returns the rightmost binding.

use alloc::vec::Vec;
use core::fmt;

use super::names::Name;
use super::types::{type_translate, SourceType, TargetType};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Context<T> {
    entries: Vec<(Name, T)>,
}

impl<T> Default for Context<T> {
    fn default() -> Self {
        Context { entries: Vec::new() }
    }
}

pub type TypingContext = Context<SourceType>;
pub type TargetContext = Context<TargetType>;

impl<T: Clone> Context<T> {
    pub fn new() -> Self {
        Context { entries: Vec::new() }
    }

    pub fn from_entries(entries: Vec<(Name, T)>) -> Self {
        Context { entries }
    }

    pub fn entries(&self) -> &[(Name, T)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, x: &str) -> Option<&T> {
        self.entries.iter().rev().find(|(n, _)| n == x).map(|(_, t)| t)
    }

    /// Index of the binding that `lookup` would return.
    pub fn position(&self, x: &str) -> Option<usize> {
        self.entries.iter().rposition(|(n, _)| n == x)
    }

    pub fn extend(&self, x: impl Into<Name>, ty: T) -> Self {
        let mut entries = self.entries.clone();
        entries.push((x.into(), ty));
        Context { entries }
    }

    pub fn push(&mut self, x: impl Into<Name>, ty: T) {
        self.entries.push((x.into(), ty));
    }

    pub fn pop(&mut self) {
        self.entries.pop();
    }

    pub fn is_prefix_of(&self, other: &Self) -> bool
    where
        T: PartialEq,
    {
        other.entries.len() >= self.entries.len() && other.entries[..self.entries.len()] == self.entries[..]
    }

    pub fn remove_at(&self, idx: usize) -> Self {
        let mut entries = self.entries.clone();
        entries.remove(idx);
        Context { entries }
    }
}

impl TypingContext {
    /// Pointwise type translation.
    pub fn translate(&self) -> TargetContext {
        Context {
            entries: self.entries.iter().map(|(x, a)| (x.clone(), type_translate(a))).collect(),
        }
    }
}

pub fn ctx_translate(ctx: &TypingContext) -> TargetContext {
    ctx.translate()
}

impl<T: fmt::Display> fmt::Display for Context<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("·");
        }
        for (i, (x, t)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", x, t)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn rightmost_wins() {
        let ctx = TypingContext::new()
            .extend("x", SourceType::Top)
            .extend("x", SourceType::int());
        assert_eq!(ctx.lookup("x"), Some(&SourceType::int()));
        assert_eq!(ctx.position("x"), Some(1));
    }

    #[test]
    fn translation_is_pointwise() {
        let ctx = TypingContext::new()
            .extend("x", SourceType::Top)
            .extend("y", SourceType::union(SourceType::Top, SourceType::Top));
        assert_eq!(ctx.translate().to_string(), "x:unit, y:unit + unit");
        assert_eq!(TypingContext::new().translate().to_string(), "·");
        let f = TypingContext::new().extend(
            "f",
            SourceType::intersect(SourceType::arrow(SourceType::Top, SourceType::Top), SourceType::Top),
        );
        assert_eq!(f.translate().to_string(), "f:(unit -> unit) * unit");
    }
}
