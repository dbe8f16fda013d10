use nalgebra::DMatrix;

use super::operator::{Operator, StateVector, C64};
use super::{Party, QuantumError, RealDirection, SpinKind, ORTHO_TOL};

/// `(S_x, S_y, S_z)` in units of ħ, built from the ladder operators.
pub fn spin_operators(kind: SpinKind) -> (Operator, Operator, Operator) {
    let d = kind.dim();
    let s = kind.s();
    let m = |i: usize| s - i as f64;
    // S+ |m⟩ = sqrt(s(s+1) − m(m+1)) |m+1⟩; index i holds m = s − i.
    let mut raise = DMatrix::<C64>::zeros(d, d);
    for i in 1..d {
        let mi = m(i);
        raise[(i - 1, i)] = C64::new((s * (s + 1.0) - mi * (mi + 1.0)).sqrt(), 0.0);
    }
    let lower = raise.adjoint();
    let sx = (&raise + &lower) * C64::new(0.5, 0.0);
    let sy = (&raise - &lower) * C64::new(0.0, -0.5);
    let sz = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |i, _| C64::new(m(i), 0.0)));
    (
        Operator::from_matrix(sx),
        Operator::from_matrix(sy),
        Operator::from_matrix(sz),
    )
}

/// `n·S`.
pub fn component_along(kind: SpinKind, n: &RealDirection) -> Operator {
    let (sx, sy, sz) = spin_operators(kind);
    let [a, b, c] = n.components();
    &(&sx.scale(a) + &sy.scale(b)) + &sz.scale(c)
}

/// `σ·n = 2 n·S` for a spin-½ particle; eigenvalues ±1.
pub fn pauli_along(n: &RealDirection) -> Operator {
    component_along(SpinKind::Half, n).scale(2.0)
}

/// `(n·S)²`.
pub fn squared_component(kind: SpinKind, n: &RealDirection) -> Operator {
    component_along(kind, n).square()
}

/// Places `op` at position `at` of the product space over `kinds`.
pub fn embed(op: &Operator, at: usize, kinds: &[SpinKind]) -> Operator {
    assert_eq!(op.dim(), kinds[at].dim(), "operator does not fit the slot");
    kinds.iter().enumerate().fold(Operator::identity(1), |acc, (p, k)| {
        if p == at {
            acc.tensor(op)
        } else {
            acc.tensor(&Operator::identity(k.dim()))
        }
    })
}

fn embed_pair(op: &Operator, party: Party, kind: SpinKind) -> Operator {
    let at = match party {
        Party::First => 0,
        Party::Second => 1,
    };
    embed(op, at, &[kind, kind])
}

/// Components of the total spin `Σ_p S^(p)` on the product space.
fn total_components(kinds: &[SpinKind]) -> [Operator; 3] {
    let dim: usize = kinds.iter().map(|k| k.dim()).product();
    let mut tot = [Operator::zeros(dim), Operator::zeros(dim), Operator::zeros(dim)];
    for (p, &k) in kinds.iter().enumerate() {
        let (sx, sy, sz) = spin_operators(k);
        for (t, s) in tot.iter_mut().zip([sx, sy, sz]) {
            *t = &*t + &embed(&s, p, kinds);
        }
    }
    tot
}

/// `[S^(1) + S^(2) + …]²`.
pub fn total_spin_squared(kinds: &[SpinKind]) -> Operator {
    let [x, y, z] = total_components(kinds);
    &(&x.square() + &y.square()) + &z.square()
}

/// `exp(−i ω·S_total)` from the spectral decomposition of the hermitian
/// generator `ω·S_total`, as `cos(G) − i sin(G)`.
pub fn rotation_unitary(omega: [f64; 3], kinds: &[SpinKind]) -> Operator {
    let [x, y, z] = total_components(kinds);
    let gen = &(&x.scale(omega[0]) + &y.scale(omega[1])) + &z.scale(omega[2]);
    let cos = gen.hermitian_function(f64::cos).expect("generator is hermitian");
    let sin = gen.hermitian_function(f64::sin).expect("generator is hermitian");
    &cos - &sin.scale_c(C64::new(0.0, 1.0))
}

/// `Σ_t [S_{n_t}]²` for two spin-1 particles, term `t` acting on `parties[t]`.
pub fn triple_operator(dirs: [&RealDirection; 3], parties: [Party; 3]) -> Result<Operator, QuantumError> {
    check_orthogonal(dirs)?;
    let kind = SpinKind::One;
    let mut acc = Operator::zeros(kind.dim() * kind.dim());
    for (n, p) in dirs.into_iter().zip(parties) {
        acc = &acc + &embed_pair(&squared_component(kind, n), p, kind);
    }
    Ok(acc)
}

/// `1⊗[S_i]² + 1⊗[S_j]² + [S_k]²⊗1` when `party_of_k` is 1, and the
/// particle-swapped operator when it is 2.
pub fn mixed_triple_operator(
    i: &RealDirection,
    j: &RealDirection,
    k: &RealDirection,
    party_of_k: u8,
) -> Result<Operator, QuantumError> {
    let pk = Party::from_index(party_of_k)?;
    let pij = pk.other();
    triple_operator([i, j, k], [pij, pij, pk])
}

fn check_orthogonal(dirs: [&RealDirection; 3]) -> Result<(), QuantumError> {
    let worst = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(a, b)| dirs[a].dot(dirs[b]).abs())
        .fold(0.0, f64::max);
    if worst > ORTHO_TOL {
        return Err(QuantumError::NotOrthogonal(worst));
    }
    Ok(())
}

/// `‖A s − value·s‖`.
pub fn verify_eigenrelation(a: &Operator, s: &StateVector, value: f64) -> Result<f64, QuantumError> {
    if a.dim() != s.dim() {
        return Err(QuantumError::DimensionMismatch(a.dim(), s.dim()));
    }
    let v = s.amplitudes();
    Ok((a.apply(v) - v * C64::new(value, 0.0)).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::EXACT_TOL;

    /// Characteristic polynomial coefficients of a 3×3 matrix,
    /// `λ³ + c2 λ² + c1 λ + c0`, by Faddeev–LeVerrier.
    fn charpoly3(a: &Operator) -> [C64; 3] {
        let i = Operator::identity(3);
        let m1 = i.clone();
        let c2 = -(a * &m1).trace();
        let m2 = &(a * &m1) + &i.scale_c(c2);
        let c1 = -(a * &m2).trace() / C64::new(2.0, 0.0);
        let m3 = &(a * &m2) + &i.scale_c(c1);
        let c0 = -(a * &m3).trace() / C64::new(3.0, 0.0);
        [c2, c1, c0]
    }

    #[test]
    fn commutation_relations() {
        for kind in [SpinKind::Half, SpinKind::One] {
            let (sx, sy, sz) = spin_operators(kind);
            let lhs = sx.commutator(&sy);
            let rhs = sz.scale_c(C64::new(0.0, 1.0));
            assert!(lhs.max_abs_diff(&rhs) < EXACT_TOL);
            let casimir = &(&sx.square() + &sy.square()) + &sz.square();
            let s = kind.s();
            assert!(casimir.max_abs_diff(&Operator::identity(kind.dim()).scale(s * (s + 1.0))) < EXACT_TOL);
        }
        let (sx, sy, _) = spin_operators(SpinKind::One);
        assert!(sx.square().commutator(&sy.square()).max_abs() < EXACT_TOL);
    }

    #[test]
    fn spin_one_sum_of_squares_is_two() {
        let (sx, sy, sz) = spin_operators(SpinKind::One);
        let sum = &(&sx.square() + &sy.square()) + &sz.square();
        assert!(sum.max_abs_diff(&Operator::identity(3).scale(2.0)) < EXACT_TOL);
        assert_eq!(sz.eigenvalues().unwrap(), vec![1.0, 0.0, -1.0]);
    }

    #[test]
    fn half_eigenvalues() {
        let (sx, sy, sz) = spin_operators(SpinKind::Half);
        for s in [sx, sy, sz] {
            let ev = s.eigenvalues().unwrap();
            assert!((ev[0] - 0.5).abs() < EXACT_TOL && (ev[1] + 0.5).abs() < EXACT_TOL);
        }
    }

    #[test]
    fn axis_component_is_sz() {
        let (_, _, sz) = spin_operators(SpinKind::Half);
        assert!(component_along(SpinKind::Half, &RealDirection::z()).max_abs_diff(&sz) < EXACT_TOL);
    }

    #[test]
    fn squared_x_charpoly() {
        // λ(λ−1)² = λ³ − 2λ² + λ
        let a = squared_component(SpinKind::One, &RealDirection::x());
        let [c2, c1, c0] = charpoly3(&a);
        assert!((c2 - C64::new(-2.0, 0.0)).norm() < EXACT_TOL);
        assert!((c1 - C64::new(1.0, 0.0)).norm() < EXACT_TOL);
        assert!(c0.norm() < EXACT_TOL);
        let ev = a.eigenvalues().unwrap();
        for (got, want) in ev.iter().zip([1.0, 1.0, 0.0]) {
            assert!((got - want).abs() < EXACT_TOL);
        }
    }

    #[test]
    fn diagonal_half_component() {
        let n = RealDirection::normalized([1.0, 1.0, 0.0]).unwrap();
        let a = component_along(SpinKind::Half, &n);
        // 2×2 hermitian [[p, q],[q*, -p]] has eigenvalues ±sqrt(p² + |q|²)
        let m = a.matrix();
        let lam = (m[(0, 0)].re.powi(2) + m[(0, 1)].norm_sqr()).sqrt();
        assert!((lam - 0.5).abs() < EXACT_TOL);
        let (sx, sy, _) = spin_operators(SpinKind::Half);
        let expect = (&sx + &sy).scale(std::f64::consts::FRAC_1_SQRT_2);
        assert!(a.max_abs_diff(&expect) < EXACT_TOL);
        assert!(a.is_hermitian());
    }

    #[test]
    fn non_unit_direction_rejected() {
        assert!(matches!(RealDirection::new([1.0, 1.0, 0.0]), Err(QuantumError::NotUnit(_))));
    }

    /// `exp(−iG)` by its power series, independent of any eigensolver.
    fn taylor_exp(g: &Operator) -> Operator {
        let mut acc = Operator::identity(g.dim());
        let mut term = Operator::identity(g.dim());
        for k in 1..80 {
            term = (&term * g).scale_c(C64::new(0.0, -1.0 / k as f64));
            acc = &acc + &term;
        }
        acc
    }

    #[test]
    fn unitary_matches_power_series_on_degenerate_generator() {
        // the two-particle generator has eigenvalues ±2θ, ±θ (twice), 0 (three times)
        let pair = [SpinKind::One, SpinKind::One];
        for w in [
            [1.3135188203589574, -1.755494917458472, -0.055834980963571784],
            [0.6738687947882681, -0.10531641793713502, 0.40419228022280557],
            [0.0, 0.0, 3.0],
            [0.4, 0.4, 0.4],
        ] {
            let [x, y, z] = total_components(&pair);
            let g = &(&x.scale(w[0]) + &y.scale(w[1])) + &z.scale(w[2]);
            let u = rotation_unitary(w, &pair);
            assert!(u.max_abs_diff(&taylor_exp(&g)) < 1e-12, "{w:?}");
        }
    }

    #[test]
    fn zero_rotation_is_identity() {
        let u = rotation_unitary([0.0; 3], &[SpinKind::One, SpinKind::One]);
        assert!(u.max_abs_diff(&Operator::identity(9)) < EXACT_TOL);
    }

    #[test]
    fn non_orthogonal_triple_rejected() {
        let d = RealDirection::normalized([1.0, 1.0, 0.0]).unwrap();
        let r = mixed_triple_operator(&RealDirection::x(), &d, &RealDirection::z(), 1);
        assert!(matches!(r, Err(QuantumError::NotOrthogonal(_))));
        let r = mixed_triple_operator(&RealDirection::x(), &RealDirection::y(), &RealDirection::z(), 3);
        assert!(matches!(r, Err(QuantumError::BadParty(3))));
    }
}
