//! Truncated 3-adic arithmetic.
//!
//! Values carry a relative precision (number of known unit digits); sums lose
//! precision through cancellation, products keep the smaller relative
//! precision. There is no floating-point fallback anywhere.

mod hensel;
mod number;
mod reconstruct;

pub use hensel::{hensel_root, newton_cap, poly_eval, poly_derivative};
pub use number::{val_rational, PadicNumber, Valuation, MAX_PRECISION, PRIME};
pub(crate) use number::POW3;
pub use reconstruct::rational_reconstruct;

use std::sync::atomic::{AtomicU32, Ordering};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("inversion of a value that is zero to precision")]
    InversionOfZero,
    #[error("Hensel precondition violated: v(f(seed)) = {value}, v(f'(seed)) = {derivative}")]
    HenselPreconditionViolated { value: String, derivative: String },
    #[error("Newton iteration did not converge within {0} steps")]
    NonConvergence(u32),
}

/// Working precision knobs shared by every approximate computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub working_precision: u32,
    pub min_acceptable: u32,
}

impl PrecisionPolicy {
    pub fn new(working_precision: u32, min_acceptable: u32) -> Option<Self> {
        if min_acceptable >= 1
            && working_precision >= min_acceptable
            && working_precision <= MAX_PRECISION
        {
            Some(PrecisionPolicy {
                working_precision,
                min_acceptable,
            })
        } else {
            None
        }
    }
}

static DEFAULT_WORKING: AtomicU32 = AtomicU32::new(40);

/// Sets the working precision used by [`PrecisionPolicy::default`] from now
/// on. Returns false, changing nothing, when `p` is out of range.
pub fn set_default_working_precision(p: u32) -> bool {
    if p < 20 || p > MAX_PRECISION {
        return false;
    }
    DEFAULT_WORKING.store(p, Ordering::Relaxed);
    true
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            working_precision: DEFAULT_WORKING.load(Ordering::Relaxed),
            min_acceptable: 20,
        }
    }
}
