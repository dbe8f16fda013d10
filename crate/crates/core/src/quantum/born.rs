use nalgebra::DMatrix;

use super::operator::{Operator, StateVector, C64};
use super::{Party, QuantumError, EIGEN_CLUSTER_TOL};

/// One eigenvalue of a hermitian operator with the projector onto its
/// (possibly degenerate) eigenspace.
#[derive(Clone, Debug)]
pub struct SpectralTerm {
    pub value: f64,
    pub projector: Operator,
}

/// Spectral decomposition, eigenvalues descending, levels within 1e-9
/// merged into one projector.
pub fn spectral_projectors(op: &Operator) -> Result<Vec<SpectralTerm>, QuantumError> {
    let (values, vecs) = op.hermitian_eigen()?;
    let mut terms: Vec<(Vec<f64>, DMatrix<C64>)> = Vec::new();
    for (i, &lam) in values.iter().enumerate() {
        let col = vecs.column(i);
        let proj = col * col.adjoint();
        match terms.last_mut() {
            Some((vals, p)) if (vals[0] - lam).abs() <= EIGEN_CLUSTER_TOL => {
                vals.push(lam);
                *p += proj;
            }
            _ => terms.push((vec![lam], proj)),
        }
    }
    Ok(terms
        .into_iter()
        .map(|(vals, p)| SpectralTerm {
            value: vals.iter().sum::<f64>() / vals.len() as f64,
            projector: Operator::from_matrix(p),
        })
        .collect())
}

/// Born-rule distribution over eigenvalue pairs of `A ⊗ 1` and `1 ⊗ B`.
#[derive(Clone, Debug)]
pub struct JointDistribution {
    pub values_a: Vec<f64>,
    pub values_b: Vec<f64>,
    /// `probs[i][j]` is the probability of `(values_a[i], values_b[j])`.
    pub probs: Vec<Vec<f64>>,
}

impl JointDistribution {
    pub fn total(&self) -> f64 {
        self.probs.iter().flatten().sum()
    }

    pub fn marginal_a(&self) -> Vec<f64> {
        self.probs.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn marginal_b(&self) -> Vec<f64> {
        (0..self.values_b.len())
            .map(|j| self.probs.iter().map(|row| row[j]).sum())
            .collect()
    }

    /// Probability of the pair of eigenvalues closest to `(a, b)`.
    pub fn prob(&self, a: f64, b: f64) -> f64 {
        let find = |vals: &[f64], x: f64| vals.iter().position(|v| (v - x).abs() <= EIGEN_CLUSTER_TOL);
        match (find(&self.values_a, a), find(&self.values_b, b)) {
            (Some(i), Some(j)) => self.probs[i][j],
            _ => 0.0,
        }
    }

    /// `Σ p(a,b)·a·b`.
    pub fn correlation(&self) -> f64 {
        let mut e = 0.0;
        for (i, a) in self.values_a.iter().enumerate() {
            for (j, b) in self.values_b.iter().enumerate() {
                e += self.probs[i][j] * a * b;
            }
        }
        e
    }
}

fn probability(state: &StateVector, p: &Operator) -> f64 {
    // rounding can push an exact zero slightly negative
    state.expectation(p).re.max(0.0)
}

pub fn born_joint(state: &StateVector, a: &Operator, b: &Operator) -> Result<JointDistribution, QuantumError> {
    if a.dim() * b.dim() != state.dim() {
        return Err(QuantumError::DimensionMismatch(a.dim() * b.dim(), state.dim()));
    }
    let ta = spectral_projectors(a)?;
    let tb = spectral_projectors(b)?;
    let probs = ta
        .iter()
        .map(|pa| {
            tb.iter()
                .map(|pb| probability(state, &pa.projector.tensor(&pb.projector)))
                .collect()
        })
        .collect();
    Ok(JointDistribution {
        values_a: ta.iter().map(|t| t.value).collect(),
        values_b: tb.iter().map(|t| t.value).collect(),
        probs,
    })
}

/// Born distribution of `obs` measured alone on one particle of a pair.
pub fn born_single(state: &StateVector, obs: &Operator, party: Party) -> Result<Vec<(f64, f64)>, QuantumError> {
    let d = obs.dim();
    if !state.dim().is_multiple_of(d) {
        return Err(QuantumError::DimensionMismatch(d, state.dim()));
    }
    let other = Operator::identity(state.dim() / d);
    spectral_projectors(obs)?
        .into_iter()
        .map(|t| {
            let full = match party {
                Party::First => t.projector.tensor(&other),
                Party::Second => other.tensor(&t.projector),
            };
            Ok((t.value, probability(state, &full)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{
        ks_state, pauli_along, singlet_state, spin_operators, squared_component, RealDirection, SpinKind,
        EXACT_TOL,
    };

    #[test]
    fn ks_sz_pairs_are_thirds() {
        let (_, _, sz) = spin_operators(SpinKind::One);
        let d = born_joint(&ks_state(), &sz, &sz).unwrap();
        assert_eq!(d.values_a.len(), 3);
        for (a, b) in [(1.0, -1.0), (0.0, 0.0), (-1.0, 1.0)] {
            assert!((d.prob(a, b) - 1.0 / 3.0).abs() < EXACT_TOL);
        }
        assert!(d.prob(1.0, 1.0) < EXACT_TOL);
        assert!((d.total() - 1.0).abs() < EXACT_TOL);
    }

    #[test]
    fn ks_squares_perfectly_correlated() {
        let n = RealDirection::normalized([0.3, -0.4, 0.5]).unwrap();
        let s2 = squared_component(SpinKind::One, &n);
        let d = born_joint(&ks_state(), &s2, &s2).unwrap();
        // degenerate eigenvalue 1 merged: two levels
        assert_eq!(d.values_a.len(), 2);
        assert!(d.prob(1.0, 0.0) < EXACT_TOL && d.prob(0.0, 1.0) < EXACT_TOL);
        assert!((d.prob(0.0, 0.0) - 1.0 / 3.0).abs() < EXACT_TOL);
        assert!((d.prob(1.0, 1.0) - 2.0 / 3.0).abs() < EXACT_TOL);
    }

    #[test]
    fn singlet_same_axis_anticorrelated() {
        let n = RealDirection::normalized([1.0, 2.0, -0.5]).unwrap();
        let p = pauli_along(&n);
        let d = born_joint(&singlet_state(), &p, &p).unwrap();
        assert!(d.prob(1.0, 1.0) < EXACT_TOL);
        assert!(d.prob(-1.0, -1.0) < EXACT_TOL);
        assert!((d.correlation() + 1.0).abs() < EXACT_TOL);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = Operator::identity(2).matrix().clone();
        m[(0, 1)] = C64::new(1.0, 0.0);
        let bad = Operator::from_matrix(m);
        let r = born_joint(&singlet_state(), &bad, &Operator::identity(2));
        assert!(matches!(r, Err(QuantumError::NotHermitian(_))));
    }

    #[test]
    fn marginals_match_single_born() {
        let k = RealDirection::z();
        let l = RealDirection::normalized([1.0, 1.0, 1.0]).unwrap();
        let a = squared_component(SpinKind::One, &k);
        let b = squared_component(SpinKind::One, &l);
        let d = born_joint(&ks_state(), &a, &b).unwrap();
        let sa = born_single(&ks_state(), &a, Party::First).unwrap();
        for ((v, p), m) in sa.iter().zip(d.marginal_a()) {
            assert!((p - m).abs() < EXACT_TOL, "value {v}");
        }
        let sb = born_single(&ks_state(), &b, Party::Second).unwrap();
        for ((_, p), m) in sb.iter().zip(d.marginal_b()) {
            assert!((p - m).abs() < EXACT_TOL);
        }
    }
}
