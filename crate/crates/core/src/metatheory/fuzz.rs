//! Seeded fuzzing of elaboration soundness and consistency.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::RangeInclusive;

use super::enumerate::{generate_random, generate_random_type};
use super::{simulate_star, MetaError};
use crate::ast::{type_translate, TypingContext};
use crate::elab::{validate, Elaborator};
use crate::target::target_typecheck_against;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzConfig {
    pub sizes: RangeInclusive<usize>,
    /// Cases per size.
    pub count: usize,
    pub seed: u64,
    /// Target step budget for each simulation.
    pub max_steps: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FuzzReport {
    pub cases: usize,
    pub elaborated: usize,
    pub sound: usize,
    pub simulated: usize,
    pub timeouts: usize,
    pub failures: Vec<String>,
}

impl fmt::Display for FuzzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cases = {}", self.cases)?;
        writeln!(f, "elaborated = {}", self.elaborated)?;
        writeln!(f, "sound = {}", self.sound)?;
        writeln!(f, "simulated = {}", self.simulated)?;
        writeln!(f, "timeouts = {}", self.timeouts)?;
        writeln!(f, "failures = {}", self.failures.len())?;
        for m in &self.failures {
            writeln!(f, "failure: {}", m)?;
        }
        Ok(())
    }
}

/// Mixes the campaign seed with a case number.
fn case_seed(seed: u64, size: usize, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((size as u64) << 32) ^ i as u64
}

/// For each size and case: a random closed core term is checked against a
/// random core type of size at most 3; successes are validated,
/// typechecked in the target and simulated to a value.
pub fn fuzz(cfg: &FuzzConfig) -> FuzzReport {
    let mut r = FuzzReport::default();
    for size in cfg.sizes.clone() {
        for i in 0..cfg.count {
            let s = case_seed(cfg.seed, size, i);
            let e = generate_random(s, size, &[]);
            let a = generate_random_type(s.rotate_left(17), 3);
            r.cases += 1;
            let Ok(d) = Elaborator::new().check(&TypingContext::new(), &e, &a) else { continue };
            r.elaborated += 1;
            let case = format!("{} <= {}", e, a);
            if let Err(err) = validate(&d) {
                r.failures.push(format!("{}: {}", case, err));
                continue;
            }
            if let Err(err) = target_typecheck_against(&Default::default(), &d.target, &type_translate(&a)) {
                r.failures.push(format!("{}: {}", case, err));
                continue;
            }
            r.sound += 1;
            match simulate_star(&d, cfg.max_steps) {
                Ok(_) => r.simulated += 1,
                Err(MetaError::Timeout(_)) => r.timeouts += 1,
                Err(err) => r.failures.push(format!("{}: {}", case, err)),
            }
        }
    }
    r
}
