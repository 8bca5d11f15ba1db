//! Type errors reported by the elaborator.

use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

use crate::ast::{Expr, Label, Name, SourceType};

#[derive(Clone, Debug, PartialEq)]
pub enum TypeErrorKind {
    Mismatch { expected: SourceType, found: SourceType },
    CannotSynthesize,
    FixNeedsAnnotation,
    Unbound(Name),
    NotAFunction(SourceType),
    NoField { label: Label, found: SourceType },
    NotAList(SourceType),
    /// Neither branch of a merge checks; the failure of each branch.
    MergeBranches(Box<TypeError>, Box<TypeError>),
    TooDeep,
    Other(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TypeError {
    pub subject: Expr,
    pub kind: TypeErrorKind,
}

impl TypeError {
    pub fn new(subject: &Expr, kind: TypeErrorKind) -> Self {
        TypeError { subject: subject.clone(), kind }
    }

    pub fn mismatch(subject: &Expr, expected: &SourceType, found: &SourceType) -> Self {
        Self::new(subject, TypeErrorKind::Mismatch { expected: expected.clone(), found: found.clone() })
    }

    fn fmt_indented(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        match &self.kind {
            TypeErrorKind::Mismatch { expected, found } => write!(f, "expected {}, inferred {}", expected, found),
            TypeErrorKind::CannotSynthesize => write!(f, "cannot synthesize a type for {}", self.subject),
            TypeErrorKind::FixNeedsAnnotation => write!(f, "fix needs annotation"),
            TypeErrorKind::Unbound(x) => write!(f, "unbound variable {}", x),
            TypeErrorKind::NotAFunction(t) => write!(f, "{} is applied but has type {}", self.subject, t),
            TypeErrorKind::NoField { label, found } => write!(f, "no field {} in type {}", label, found),
            TypeErrorKind::NotAList(t) => write!(f, "expected a list, inferred {}", t),
            TypeErrorKind::MergeBranches(a, b) => {
                write!(f, "no branch of the merge checks")?;
                for e in [a, b] {
                    writeln!(f)?;
                    for _ in 0..=indent {
                        f.write_str("  ")?;
                    }
                    e.fmt_indented(f, indent + 1)?;
                }
                Ok(())
            }
            TypeErrorKind::TooDeep => write!(f, "expression nests too deeply"),
            TypeErrorKind::Other(m) => f.write_str(m),
        }
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_indented(f, 0)
    }
}

impl core::error::Error for TypeError {}
