use std::ops::{Add, Mul, Sub};

use nalgebra::{Complex, DMatrix, DVector};

use super::{QuantumError, EXACT_TOL};

pub type C64 = Complex<f64>;

/// A square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    m: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(m: DMatrix<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "operators are square");
        Operator { m }
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Self {
        Operator::from_matrix(DMatrix::from_row_iterator(
            dim,
            dim,
            entries.iter().map(|&x| C64::new(x, 0.0)),
        ))
    }

    pub fn identity(dim: usize) -> Self {
        Operator::from_matrix(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Operator::from_matrix(DMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn dagger(&self) -> Operator {
        Operator::from_matrix(self.m.adjoint())
    }

    pub fn scale(&self, k: f64) -> Operator {
        Operator::from_matrix(self.m.map(|z| z * k))
    }

    pub fn scale_c(&self, k: C64) -> Operator {
        Operator::from_matrix(self.m.map(|z| z * k))
    }

    /// Kronecker product, `self` on the slow index.
    pub fn tensor(&self, other: &Operator) -> Operator {
        Operator::from_matrix(self.m.kronecker(&other.m))
    }

    pub fn square(&self) -> Operator {
        self * self
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        (&self.m - &other.m).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= EXACT_TOL
    }

    pub fn ensure_hermitian(&self) -> Result<(), QuantumError> {
        let dev = self.hermitian_deviation();
        if dev > EXACT_TOL {
            return Err(QuantumError::NotHermitian(dev));
        }
        Ok(())
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.m * v
    }

    /// Eigenvalues of a hermitian operator, descending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>, QuantumError> {
        Ok(self.hermitian_eigen()?.0)
    }

    /// Eigenvalues descending with orthonormal eigenvectors as columns.
    /// Solved with faer: nalgebra's symmetric solvers, real and complex,
    /// return inaccurate vectors on some highly degenerate spectra.
    pub(crate) fn hermitian_eigen(&self) -> Result<(Vec<f64>, DMatrix<C64>), QuantumError> {
        self.ensure_hermitian()?;
        let n = self.dim();
        let a = faer::Mat::<faer::c64>::from_fn(n, n, |r, c| {
            let z = self.m[(r, c)];
            faer::c64::new(z.re, z.im)
        });
        let eig = a
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|e| QuantumError::Eigen(format!("{e:?}")))?;
        let (s, u) = (eig.S(), eig.U());
        // faer returns ascending values
        let order: Vec<usize> = (0..n).rev().collect();
        let values = order.iter().map(|&i| s[i].re).collect();
        let vectors = DMatrix::from_fn(n, n, |r, c| {
            let z = u[(r, order[c])];
            C64::new(z.re, z.im)
        });
        Ok((values, vectors))
    }

    /// `f(A)` for a hermitian `A` and a real function `f`.
    pub fn hermitian_function(&self, f: impl Fn(f64) -> f64) -> Result<Operator, QuantumError> {
        let (values, vecs) = self.hermitian_eigen()?;
        let weighted = DMatrix::from_fn(vecs.nrows(), vecs.ncols(), |r, c| vecs[(r, c)] * f(values[c]));
        Ok(Operator::from_matrix(weighted * vecs.adjoint()))
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator::from_matrix(&self.m + &rhs.m)
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator::from_matrix(&self.m - &rhs.m)
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator::from_matrix(&self.m * &rhs.m)
    }
}

impl Add for Operator {
    type Output = Operator;
    fn add(self, rhs: Operator) -> Operator {
        &self + &rhs
    }
}

impl Sub for Operator {
    type Output = Operator;
    fn sub(self, rhs: Operator) -> Operator {
        &self - &rhs
    }
}

impl Mul for Operator {
    type Output = Operator;
    fn mul(self, rhs: Operator) -> Operator {
        &self * &rhs
    }
}

/// A normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    v: DVector<C64>,
}

impl StateVector {
    /// Accepts amplitudes of unit norm (within 1e-12).
    pub fn new(v: DVector<C64>) -> Result<Self, QuantumError> {
        let n = v.norm();
        if (n - 1.0).abs() > EXACT_TOL {
            return Err(QuantumError::NotNormalized(n));
        }
        Ok(StateVector { v })
    }

    pub fn normalized(v: DVector<C64>) -> Result<Self, QuantumError> {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(QuantumError::NotNormalized(n));
        }
        Ok(StateVector { v: v / C64::new(n, 0.0) })
    }

    pub fn basis(dim: usize, idx: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[idx] = C64::new(1.0, 0.0);
        StateVector { v }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.v
    }

    pub fn amplitude(&self, idx: usize) -> C64 {
        self.v[idx]
    }

    pub fn norm(&self) -> f64 {
        self.v.norm()
    }

    /// ‖self − other‖, no phase alignment.
    pub fn distance(&self, other: &StateVector) -> f64 {
        (&self.v - &other.v).norm()
    }

    /// Applies a unitary; the result is renormalization-free.
    pub fn evolve(&self, u: &Operator) -> Result<StateVector, QuantumError> {
        if u.dim() != self.dim() {
            return Err(QuantumError::DimensionMismatch(u.dim(), self.dim()));
        }
        Ok(StateVector { v: u.apply(&self.v) })
    }

    /// ⟨self|A|self⟩.
    pub fn expectation(&self, a: &Operator) -> C64 {
        self.v.dotc(&a.apply(&self.v))
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        StateVector {
            v: self.v.kronecker(&other.v),
        }
    }
}
