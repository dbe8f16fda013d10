//! Verification toolkit for contextuality and nonlocality arguments.
//!
//! * [`quantum`]: spin operators, the two-particle singlet states and their
//!   eigen-identities.
//! * [`ks`]: exact Kochen–Specker colorability search with certificates.
//! * [`hv`]: finite deterministic hidden-variable models and locality audits.
//! * [`counterfactual`]: possible-worlds evaluation of counterfactuals over
//!   those models.

pub mod ks;
pub mod quantum;
pub mod hv;
pub mod counterfactual;
