//! Executable forms of the inversion, substitution and value lemmas, and a
//! simulation that answers every target step with checked source steps.

pub mod enumerate;
pub mod fuzz;
pub mod invert;
pub mod simulate;
pub mod subst;

use alloc::string::String;
use alloc::vec::Vec;

use crate::ast::{EvalContext, Expr};
use crate::dynamics::{contractions, SourceStep};

pub use enumerate::{enumerate_core_terms, enumerate_core_types, generate_random, generate_random_type};
pub use fuzz::{fuzz, FuzzConfig, FuzzReport};
pub use invert::{elab_arr_invert, elab_sect_invert, elab_union_invert, ArrInversion, SectInversion};
pub use simulate::{
    check_certificate, simulate, simulate_star, step_is_candidate, value_mono, SimulationCertificate, StarOutcome,
    TargetRecord,
};
pub use subst::{subst_elab, subst_unrolled};

pub type StepTrace = Vec<SourceStep>;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum MetaError {
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("not a value: {0}")]
    NotAValue(Expr),
    #[error("no value within {0} steps")]
    Timeout(usize),
}

pub(crate) fn violation<T>(msg: impl Into<String>) -> Result<T, MetaError> {
    Err(MetaError::InvariantViolation(msg.into()))
}

/// The step of `rule` at the root of `e`.
pub(crate) fn root_step(e: &Expr, rule: &'static str) -> Result<SourceStep, MetaError> {
    let to = if rule == "split" {
        Expr::merge(e.clone(), e.clone())
    } else {
        match contractions(e).into_iter().find(|k| k.rule == rule) {
            Some(k) => k.to,
            None => return violation(alloc::format!("{} does not apply to {}", rule, e)),
        }
    };
    Ok(SourceStep { from: e.clone(), to, rule, context: EvalContext::Hole, output: None })
}

pub(crate) fn lift(trace: StepTrace, c: &EvalContext) -> StepTrace {
    if *c == EvalContext::Hole {
        return trace;
    }
    trace.iter().map(|s| s.lift(c)).collect()
}
