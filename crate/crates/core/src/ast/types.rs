//! Source and target type grammars and the translation between them.

use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

/// Atomic base types of the source language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BaseType {
    Unit,
    Int,
    Real,
    Str,
    Nat,
    Pos,
}

impl BaseType {
    pub const ALL: [BaseType; 6] = [
        BaseType::Unit,
        BaseType::Int,
        BaseType::Real,
        BaseType::Str,
        BaseType::Nat,
        BaseType::Pos,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaseType::Unit => "unit",
            BaseType::Int => "int",
            BaseType::Real => "real",
            BaseType::Str => "string",
            BaseType::Nat => "nat",
            BaseType::Pos => "pos",
        }
    }

    pub fn from_name(name: &str) -> Option<BaseType> {
        BaseType::ALL.iter().copied().find(|b| b.name() == name)
    }
}

/// Source types: `⊤ | A → B | A ∧ B | A ∨ B` plus base types, single-field
/// records and lists.
///
/// Equality is purely syntactic: `A ∧ B` and `B ∧ A` are different types.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SourceType {
    Top,
    Arrow(Box<SourceType>, Box<SourceType>),
    Intersect(Box<SourceType>, Box<SourceType>),
    Union(Box<SourceType>, Box<SourceType>),
    Base(BaseType),
    Record(String, Box<SourceType>),
    List(Box<SourceType>),
}

impl SourceType {
    pub fn arrow(a: SourceType, b: SourceType) -> SourceType {
        SourceType::Arrow(Box::new(a), Box::new(b))
    }

    pub fn intersect(a: SourceType, b: SourceType) -> SourceType {
        SourceType::Intersect(Box::new(a), Box::new(b))
    }

    pub fn union(a: SourceType, b: SourceType) -> SourceType {
        SourceType::Union(Box::new(a), Box::new(b))
    }

    pub fn record(label: impl Into<String>, payload: SourceType) -> SourceType {
        SourceType::Record(label.into(), Box::new(payload))
    }

    pub fn list(elem: SourceType) -> SourceType {
        SourceType::List(Box::new(elem))
    }

    pub fn int() -> SourceType {
        SourceType::Base(BaseType::Int)
    }

    pub fn real() -> SourceType {
        SourceType::Base(BaseType::Real)
    }

    pub fn string() -> SourceType {
        SourceType::Base(BaseType::Str)
    }

    /// Number of type constructors, counting every node once.
    pub fn size(&self) -> usize {
        match self {
            SourceType::Top | SourceType::Base(_) => 1,
            SourceType::Arrow(a, b) | SourceType::Intersect(a, b) | SourceType::Union(a, b) => {
                1 + a.size() + b.size()
            }
            SourceType::Record(_, a) | SourceType::List(a) => 1 + a.size(),
        }
    }

    /// True for types built only from `⊤`, `→`, `∧` and `∨`.
    pub fn is_core(&self) -> bool {
        match self {
            SourceType::Top => true,
            SourceType::Arrow(a, b) | SourceType::Intersect(a, b) | SourceType::Union(a, b) => {
                a.is_core() && b.is_core()
            }
            _ => false,
        }
    }
}

/// Base types that survive translation. `nat` and `pos` collapse to `int`,
/// source `unit` becomes the target's own unit type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TargetBase {
    Int,
    Real,
    Str,
}

impl TargetBase {
    pub fn name(self) -> &'static str {
        match self {
            TargetBase::Int => "int",
            TargetBase::Real => "real",
            TargetBase::Str => "string",
        }
    }
}

/// Target types: `unit | T → T | T ∗ T | T + T` plus bases, records, lists.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TargetType {
    Unit,
    Arrow(Box<TargetType>, Box<TargetType>),
    Product(Box<TargetType>, Box<TargetType>),
    Sum(Box<TargetType>, Box<TargetType>),
    Base(TargetBase),
    Record(String, Box<TargetType>),
    List(Box<TargetType>),
}

impl TargetType {
    pub fn arrow(a: TargetType, b: TargetType) -> TargetType {
        TargetType::Arrow(Box::new(a), Box::new(b))
    }

    pub fn product(a: TargetType, b: TargetType) -> TargetType {
        TargetType::Product(Box::new(a), Box::new(b))
    }

    pub fn sum(a: TargetType, b: TargetType) -> TargetType {
        TargetType::Sum(Box::new(a), Box::new(b))
    }
}

/// The type translation `|A|`: intersections become products, unions become
/// sums, everything else is translated homomorphically.
pub fn type_translate(ty: &SourceType) -> TargetType {
    match ty {
        SourceType::Top => TargetType::Unit,
        SourceType::Arrow(a, b) => TargetType::arrow(type_translate(a), type_translate(b)),
        SourceType::Intersect(a, b) => TargetType::product(type_translate(a), type_translate(b)),
        SourceType::Union(a, b) => TargetType::sum(type_translate(a), type_translate(b)),
        SourceType::Base(base) => match base {
            BaseType::Unit => TargetType::Unit,
            BaseType::Int | BaseType::Nat | BaseType::Pos => TargetType::Base(TargetBase::Int),
            BaseType::Real => TargetType::Base(TargetBase::Real),
            BaseType::Str => TargetType::Base(TargetBase::Str),
        },
        SourceType::Record(label, a) => {
            TargetType::Record(label.clone(), Box::new(type_translate(a)))
        }
        SourceType::List(a) => TargetType::List(Box::new(type_translate(a))),
    }
}

// Printing precedence: arrows bind loosest, then unions, then intersections.
const PREC_ARROW: u8 = 0;
const PREC_UNION: u8 = 1;
const PREC_INTER: u8 = 2;
const PREC_ATOM: u8 = 3;

fn fmt_source(ty: &SourceType, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let (own, parens) = match ty {
        SourceType::Arrow(..) => (PREC_ARROW, prec > PREC_ARROW),
        SourceType::Union(..) => (PREC_UNION, prec > PREC_UNION),
        SourceType::Intersect(..) => (PREC_INTER, prec > PREC_INTER),
        SourceType::List(..) => (PREC_ATOM, prec > PREC_INTER),
        _ => (PREC_ATOM, false),
    };
    if parens {
        f.write_str("(")?;
    }
    match ty {
        SourceType::Top => f.write_str("top")?,
        SourceType::Base(b) => f.write_str(b.name())?,
        SourceType::Arrow(a, b) => {
            fmt_source(a, own + 1, f)?;
            f.write_str(" -> ")?;
            fmt_source(b, own, f)?;
        }
        SourceType::Union(a, b) => {
            fmt_source(a, own, f)?;
            f.write_str(" \\/ ")?;
            fmt_source(b, own + 1, f)?;
        }
        SourceType::Intersect(a, b) => {
            fmt_source(a, own, f)?;
            f.write_str(" & ")?;
            fmt_source(b, own + 1, f)?;
        }
        SourceType::Record(l, a) => {
            write!(f, "{{{} : ", l)?;
            fmt_source(a, PREC_ARROW, f)?;
            f.write_str("}")?;
        }
        SourceType::List(a) => {
            f.write_str("list ")?;
            fmt_source(a, PREC_ATOM, f)?;
        }
    }
    if parens {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for SourceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_source(self, PREC_ARROW, f)
    }
}

fn fmt_target(ty: &TargetType, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let (own, parens) = match ty {
        TargetType::Arrow(..) => (PREC_ARROW, prec > PREC_ARROW),
        TargetType::Sum(..) => (PREC_UNION, prec > PREC_UNION),
        TargetType::Product(..) => (PREC_INTER, prec > PREC_INTER),
        TargetType::List(..) => (PREC_ATOM, prec > PREC_INTER),
        _ => (PREC_ATOM, false),
    };
    if parens {
        f.write_str("(")?;
    }
    match ty {
        TargetType::Unit => f.write_str("unit")?,
        TargetType::Base(b) => f.write_str(b.name())?,
        TargetType::Arrow(a, b) => {
            fmt_target(a, own + 1, f)?;
            f.write_str(" -> ")?;
            fmt_target(b, own, f)?;
        }
        TargetType::Sum(a, b) => {
            fmt_target(a, own, f)?;
            f.write_str(" + ")?;
            fmt_target(b, own + 1, f)?;
        }
        TargetType::Product(a, b) => {
            fmt_target(a, own, f)?;
            f.write_str(" * ")?;
            fmt_target(b, own + 1, f)?;
        }
        TargetType::Record(l, a) => {
            write!(f, "{{{} : ", l)?;
            fmt_target(a, PREC_ARROW, f)?;
            f.write_str("}")?;
        }
        TargetType::List(a) => {
            f.write_str("list ")?;
            fmt_target(a, PREC_ATOM, f)?;
        }
    }
    if parens {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for TargetType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_target(self, PREC_ARROW, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn translate_top_is_unit() {
        assert_eq!(type_translate(&SourceType::Top), TargetType::Unit);
    }

    #[test]
    fn translate_intersection_of_top_and_arrow() {
        let ty = SourceType::intersect(
            SourceType::Top,
            SourceType::arrow(SourceType::Top, SourceType::Top),
        );
        let expected = TargetType::product(
            TargetType::Unit,
            TargetType::arrow(TargetType::Unit, TargetType::Unit),
        );
        assert_eq!(type_translate(&ty), expected);
        assert_eq!(type_translate(&ty).to_string(), "unit * (unit -> unit)");
    }

    #[test]
    fn translate_union_and_refinements() {
        let ty = SourceType::union(SourceType::Top, SourceType::Top);
        assert_eq!(type_translate(&ty).to_string(), "unit + unit");
        assert_eq!(
            type_translate(&SourceType::Base(BaseType::Nat)),
            TargetType::Base(TargetBase::Int)
        );
        assert_eq!(
            type_translate(&SourceType::Base(BaseType::Pos)),
            TargetType::Base(TargetBase::Int)
        );
    }

    #[test]
    fn printing_respects_precedence() {
        let a = SourceType::union(
            SourceType::intersect(SourceType::int(), SourceType::real()),
            SourceType::string(),
        );
        assert_eq!(a.to_string(), "int & real \\/ string");
        let b = SourceType::intersect(
            SourceType::arrow(SourceType::int(), SourceType::int()),
            SourceType::arrow(SourceType::real(), SourceType::real()),
        );
        assert_eq!(b.to_string(), "(int -> int) & (real -> real)");
        let c = SourceType::arrow(
            SourceType::arrow(SourceType::Top, SourceType::Top),
            SourceType::Top,
        );
        assert_eq!(c.to_string(), "(top -> top) -> top");
        let d = SourceType::intersect(
            SourceType::Top,
            SourceType::intersect(SourceType::Top, SourceType::Top),
        );
        assert_eq!(d.to_string(), "top & (top & top)");
    }
}
