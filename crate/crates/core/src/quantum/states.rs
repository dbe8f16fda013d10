use nalgebra::DVector;

use super::operator::{StateVector, C64};
use super::SpinKind;

/// Basis index of magnetic quantum number `m` (m = s at index 0).
fn index_of(kind: SpinKind, m: f64) -> usize {
    let i = kind.s() - m;
    assert!(i >= 0.0 && i.fract() == 0.0 && (i as usize) < kind.dim(), "m = {m} out of range");
    i as usize
}

/// `|m⟩` for one particle.
pub fn spin_basis(kind: SpinKind, m: f64) -> StateVector {
    StateVector::basis(kind.dim(), index_of(kind, m))
}

/// `|m1⟩₁ ⊗ |m2⟩₂`.
pub fn product_state(kind: SpinKind, m1: f64, m2: f64) -> StateVector {
    spin_basis(kind, m1).tensor(&spin_basis(kind, m2))
}

fn combine(kind: SpinKind, terms: &[(f64, f64, f64)]) -> StateVector {
    let d = kind.dim();
    let mut v = DVector::<C64>::zeros(d * d);
    for &(c, m1, m2) in terms {
        v[index_of(kind, m1) * d + index_of(kind, m2)] += C64::new(c, 0.0);
    }
    StateVector::new(v).expect("coefficients are normalized")
}

/// `(1/√3)[|1⟩|−1⟩ − |0⟩|0⟩ + |−1⟩|1⟩]`, the total-spin-zero state of two
/// spin-1 particles.
pub fn ks_state() -> StateVector {
    let c = 1.0 / 3f64.sqrt();
    combine(SpinKind::One, &[(c, 1.0, -1.0), (-c, 0.0, 0.0), (c, -1.0, 1.0)])
}

/// `(1/√2)(|+⟩|−⟩ − |−⟩|+⟩)`.
pub fn singlet_state() -> StateVector {
    let c = std::f64::consts::FRAC_1_SQRT_2;
    combine(SpinKind::Half, &[(c, 0.5, -0.5), (-c, -0.5, 0.5)])
}
