//! Kochen–Specker colorability over exact rays.
//!
//! Rays live in Q(√2)³, orthogonality is decided exactly, and the search
//! produces a [`Certificate`] that can be checked independently.

mod brute;
mod certificate;
mod graph;
mod parse;
mod peres;
mod quad;
mod ray;
mod search;

pub use brute::{brute_force_oracle, count_valid, BRUTE_FORCE_MAX_RAYS};
pub use certificate::{input_digest, verify_certificate, Certificate, Method, Verdict, TOOL_VERSION};
pub use graph::OrthoGraph;
pub use parse::{parse_coord, parse_rays, write_rays, RayLine};
pub use peres::{peres33, PERES33_DATA};
pub use quad::QuadRat;
pub use ray::Ray3;
pub use search::{is_valid_assignment, search, SearchMode};

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KsError {
    #[error("zero vector has no direction")]
    ZeroRay,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate rays at input positions {0} and {1}")]
    DuplicateRay(usize, usize),
    #[error("projector rule needs basis size 3, got {0}")]
    UnsupportedBasis(usize),
    #[error("brute force limited to {max} rays, got {got}")]
    TooManyRays { got: usize, max: usize },
    #[error("certificate input digest does not match the graph")]
    DigestMismatch,
    #[error("malformed certificate: {0}")]
    BadCertificate(String),
}

/// Which {0,1} valuations count as valid on an orthogonality graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ValueRule {
    /// Each orthogonal triad takes the values 1,0,1 in some order; no
    /// orthogonal pair is 0,0.
    OneZeroPerTriad,
    /// Each orthogonal basis has exactly one ray valued 1; no orthogonal
    /// pair is 1,1.
    OneOnePerBasis { basis_size: usize },
}

impl ValueRule {
    pub const PROJECTOR: ValueRule = ValueRule::OneOnePerBasis { basis_size: 3 };

    pub fn validate(self) -> Result<Self, KsError> {
        match self {
            ValueRule::OneOnePerBasis { basis_size } if basis_size != 3 => {
                Err(KsError::UnsupportedBasis(basis_size))
            }
            r => Ok(r),
        }
    }

    /// The value that appears exactly once per triad.
    pub(crate) fn marked(self) -> u8 {
        match self {
            ValueRule::OneZeroPerTriad => 0,
            ValueRule::OneOnePerBasis { .. } => 1,
        }
    }

    pub fn dual(self) -> ValueRule {
        match self {
            ValueRule::OneZeroPerTriad => ValueRule::PROJECTOR,
            ValueRule::OneOnePerBasis { .. } => ValueRule::OneZeroPerTriad,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ValueRule::OneZeroPerTriad => "101",
            ValueRule::OneOnePerBasis { .. } => "projector",
        }
    }

    pub fn from_name(s: &str) -> Option<ValueRule> {
        match s {
            "101" => Some(ValueRule::OneZeroPerTriad),
            "projector" => Some(ValueRule::PROJECTOR),
            _ => None,
        }
    }
}

impl fmt::Display for ValueRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
