//! Dense complex linear algebra for one or two spin-½ / spin-1 particles.
//!
//! Matrices are in the S_z eigenbasis ordered m = s, s−1, …, −s. Two-particle
//! operators act on the tensor product with particle 1 as the slow index.

mod born;
mod operator;
mod rotation;
mod spin;
mod states;
mod suite;

pub use born::{born_joint, born_single, spectral_projectors, JointDistribution, SpectralTerm};
pub use operator::{Operator, StateVector, C64};
pub use rotation::{random_rotation_vector, rotation_matrix, triple_from_rotation};
pub use spin::{
    component_along, embed, mixed_triple_operator, pauli_along, rotation_unitary, spin_operators,
    squared_component, total_spin_squared, triple_operator, verify_eigenrelation,
};
pub use states::{ks_state, product_state, singlet_state, spin_basis};
pub use suite::{run_identity_suite, IdentityCheck, SuiteConfig, SuiteReport};

use thiserror::Error;

/// Tolerance for identities that hold by construction.
pub const EXACT_TOL: f64 = 1e-12;
/// Tolerance for chained computations (exponentials, rotations).
pub const CHAINED_TOL: f64 = 1e-10;
/// Eigenvalues closer than this are treated as one degenerate level.
pub const EIGEN_CLUSTER_TOL: f64 = 1e-9;
/// Orthogonality tolerance for numeric direction triples.
pub const ORTHO_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum QuantumError {
    #[error("direction has norm {0}, expected 1")]
    NotUnit(f64),
    #[error("directions are not mutually orthogonal (max |dot| = {0:e})")]
    NotOrthogonal(f64),
    #[error("operator is not hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("state has norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("party must be 1 or 2, got {0}")]
    BadParty(u8),
    #[error("eigen-decomposition failed: {0}")]
    Eigen(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpinKind {
    Half,
    One,
}

impl SpinKind {
    pub fn dim(self) -> usize {
        match self {
            SpinKind::Half => 2,
            SpinKind::One => 3,
        }
    }

    /// The spin quantum number s.
    pub fn s(self) -> f64 {
        match self {
            SpinKind::Half => 0.5,
            SpinKind::One => 1.0,
        }
    }
}

/// Which particle of a pair an operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Party {
    First,
    Second,
}

impl Party {
    pub fn from_index(i: u8) -> Result<Party, QuantumError> {
        match i {
            1 => Ok(Party::First),
            2 => Ok(Party::Second),
            other => Err(QuantumError::BadParty(other)),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Party::First => 1,
            Party::Second => 2,
        }
    }

    pub fn other(self) -> Party {
        match self {
            Party::First => Party::Second,
            Party::Second => Party::First,
        }
    }
}

/// A unit vector in ordinary space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealDirection([f64; 3]);

impl RealDirection {
    /// Accepts only vectors of unit norm (within 1e-12).
    pub fn new(v: [f64; 3]) -> Result<Self, QuantumError> {
        let n = norm3(v);
        if (n - 1.0).abs() > EXACT_TOL {
            return Err(QuantumError::NotUnit(n));
        }
        Ok(RealDirection(v))
    }

    /// Scales `v` to unit length.
    pub fn normalized(v: [f64; 3]) -> Result<Self, QuantumError> {
        let n = norm3(v);
        if n == 0.0 || !n.is_finite() {
            return Err(QuantumError::NotUnit(n));
        }
        Ok(RealDirection([v[0] / n, v[1] / n, v[2] / n]))
    }

    pub fn x() -> Self {
        RealDirection([1.0, 0.0, 0.0])
    }

    pub fn y() -> Self {
        RealDirection([0.0, 1.0, 0.0])
    }

    pub fn z() -> Self {
        RealDirection([0.0, 0.0, 1.0])
    }

    /// Unit vector in the x–z plane at `deg` degrees from z towards x.
    pub fn in_xz_plane(deg: f64) -> Self {
        let t = deg.to_radians();
        RealDirection([t.sin(), 0.0, t.cos()])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, other: &RealDirection) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}
