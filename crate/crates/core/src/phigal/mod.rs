//! Filtered (phi, Gal(K/Q3))-modules of rank 2 and their classification.

mod conditions;
mod iso;
mod label;
mod module;
mod serial;
mod table;
mod twist;

pub use conditions::{
    check_conditions, descent_basis, is_admissible, stable_lines, t_hodge, t_newton, weil_traces,
    check_conditions_window, AdmissibilityReport, ConditionsReport, LineCheck, StableLine, WeilTrace,
    DEFAULT_WEIL_WINDOW,
};
pub use iso::{classify, classify_unfiltered, conjugate, is_isomorphic, unfiltered_isomorphism};
pub use label::{canonical_base, canonical_module, membership_check, ClassLabel, Kind, MembershipSet};
pub use module::{k0_in_field, FilteredModule, PhiGalModule, ProjParam};
pub use serial::{ModuleFile, MODULE_SCHEMA};
pub use table::{verify_rows, verify_table, verify_table1, RowReport, TableConfig, TableReport, TABLE_SCHEMA};
pub use twist::{ramified_partner, twist_ramified, twist_unramified};

use thiserror::Error;

use crate::local_fields::LocalFieldError;
use crate::semilinear::SemilinearError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhiGalError {
    #[error("invalid label: {0}")]
    InvalidLabel(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("Galois descent failed: fixed space has dimension {0}, expected 2")]
    DescentFailure(usize),
    #[error("module does not satisfy the classification hypotheses: {0}")]
    Unclassifiable(String),
    #[error("element lives in {found}, expected {expected}")]
    WrongField { expected: String, found: String },
    #[error("no catalog field for the twist of {0}")]
    CatalogMiss(String),
    #[error("stable lines form a positive-dimensional family")]
    InfiniteStableFamily,
    #[error("malformed module file: {0}")]
    Parse(String),
    #[error(transparent)]
    LocalField(#[from] LocalFieldError),
    #[error(transparent)]
    Semilinear(#[from] SemilinearError),
}

#[cfg(test)]
mod tests;
