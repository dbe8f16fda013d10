//! Finite deterministic hidden-variable models.
//!
//! A model is a weighted finite set of hidden states λ together with total
//! response tables: the outcome of each setting measured alone, and the
//! outcome pair of every cross-side setting pair measured together. All
//! "almost everywhere" statements become statements about the λ with
//! positive weight.

mod audit;
mod flips;
mod model;
mod random;
mod synth;

pub use audit::{
    BellReport, DecompositionReport, FlipReport, FlipWitness, LReport, OiReport, PiReport, PiViolation,
    ProductCounterexample,
};
pub use flips::{find_context_flips, ContextFlips, FlipCell};
pub use model::{
    validate, Defect, DefectKind, HvModel, LambdaSet, ModelFile, Observable, ObservableForm, Outcome, Setting,
    SettingDoc, WeightDoc,
};
pub use random::{random_model, RandomModelSpec};
pub use synth::{
    born_correlation, faithfulness_deviation, quantum_chsh, synthesize_model, MAX_ALPHABET, MAX_CONTEXT_PAIRS,
    MAX_LAMBDAS,
};

use thiserror::Error;

use crate::quantum::QuantumError;

#[derive(Debug, Error)]
pub enum HvError {
    #[error("unknown setting `{0}`")]
    UnknownSetting(String),
    #[error("setting `{setting}` is on side {actual}, not side {expected}")]
    WrongSide { setting: String, expected: u8, actual: u8 },
    #[error("settings `{0}` and `{1}` are on the same side")]
    SameSide(String, String),
    #[error("setting `{0}` does not have a binary ±1 alphabet")]
    NonBinary(String),
    #[error("setting `{0}` has no observable")]
    NoObservable(String),
    #[error("outcome {outcome} is not in the alphabet of `{setting}`")]
    NotInAlphabet { setting: String, outcome: Outcome },
    #[error("menu cap exceeded: {0}")]
    MenuCap(String),
    #[error("invalid model: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Defect>),
    #[error("malformed model document: {0}")]
    Json(String),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}
