//! Finite extensions of Q3 as two-stage towers, their Galois groups, and the field catalog.

mod catalog;
mod galois;
mod qp2;
mod roots;
mod tower;

pub use catalog::{
    catalog, catalog_fields, install_catalog, shipped_catalog_text, CatalogEntry, FieldCatalog, RowInfo};
pub use galois::{
    format_word, parse_relation, parse_word, Automorphism, GaloisGroup, GeneratorSpec,
    GroupElement, Pin, Presentation, Relation, RelationCheck, Word,
};
pub use qp2::Qp2;
pub use roots::{find_roots_in_field, int_poly, poly_derivative, poly_eval};
pub use tower::{FieldElement, TowerField};

use thiserror::Error;

use crate::padic::PadicError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalFieldError {
    #[error("unknown field label: {0}")]
    UnknownLabel(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("relation violated: {0}")]
    RelationViolation(String),
    #[error("field is not Galois: {found} automorphisms found, {expected} expected")]
    NotGalois { found: usize, expected: usize },
    #[error("elements live in different fields")]
    FieldMismatch,
    #[error("inversion of zero")]
    InversionOfZero,
    #[error("no catalog fields with ramification index {0}")]
    UnsupportedIndex(u32),
    #[error("catalog line {line}: {message}")]
    CatalogParse { line: usize, message: String },
    #[error(transparent)]
    Padic(#[from] PadicError),
}
