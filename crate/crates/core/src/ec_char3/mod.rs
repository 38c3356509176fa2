//! Elliptic curves over F3 and F9: point counts, automorphisms, twists and
//! Galois pairs.

mod aut;
mod curve;
mod pair;

pub use aut::{automorphism_group, automorphism_group_over, AutGroup, Shape, Substitution};
pub use curve::{BaseField, CurveF3q};
pub use pair::{
    galois_pair_verify, search_minimal_pairs, verify_table2, AutReading, GaloisPair, PairRow,
    PairSearch, Table2Report, Verdict,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EcError {
    #[error("singular curve: {0}")]
    Singular(String),
    #[error("coefficient {0} is not in {1}")]
    NotInBaseField(String, BaseField),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("cannot parse curve: {0}")]
    Parse(String),
}
