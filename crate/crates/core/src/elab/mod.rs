//! Bidirectional elaboration into the target language, with explicit
//! derivations and their validator.

pub mod check;
pub mod coerce;
pub mod derivation;
pub mod error;
pub mod normalize;
pub mod program;

pub use check::{check, synth, Elaborator};
pub use coerce::{apply_coercion, coercion_derivation, has_function_derivation};
pub use derivation::{
    derivation_alpha_eq, erase, reelaborate, validate, validate_typing, Derivation, DerivationError, ElabDerivation,
    Rule, TypingDerivation,
};
pub use error::{TypeError, TypeErrorKind};
pub use normalize::let_normalize;
pub use program::{elaborate_expr, elaborate_program, ElaboratedDecl, ElaboratedProgram, ProgramError};
