use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;

use super::quad::{denom_lcm_and_numer_gcd, QuadRat};
use super::KsError;

/// A direction in R³ with coordinates in Q(√2), stored as its canonical
/// projective representative.
///
/// Canonical form: divide through by the first nonzero coordinate, then
/// scale by the positive rational that clears every denominator and leaves
/// the integer coefficients with gcd 1. The first nonzero coordinate ends
/// up a positive integer, and two inputs spanning the same line produce
/// identical coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Ray3 {
    coords: [QuadRat; 3],
}

impl Ray3 {
    pub fn canonicalize(raw: [QuadRat; 3]) -> Result<Ray3, KsError> {
        let pivot = raw
            .iter()
            .find(|c| !c.is_zero())
            .ok_or(KsError::ZeroRay)?
            .clone();
        let inv = pivot.recip().expect("pivot is nonzero");
        let normed: [QuadRat; 3] = [&raw[0] * &inv, &raw[1] * &inv, &raw[2] * &inv];
        let (lcm, _) = denom_lcm_and_numer_gcd(&normed);
        let lcm = BigRational::from_integer(lcm);
        let cleared: Vec<QuadRat> = normed.iter().map(|c| c.scale(&lcm)).collect();
        let (_, content) = denom_lcm_and_numer_gcd(&cleared);
        let k = BigRational::new(1.into(), content);
        let coords = [cleared[0].scale(&k), cleared[1].scale(&k), cleared[2].scale(&k)];
        Ok(Ray3 { coords })
    }

    pub fn from_ints(x: i64, y: i64, z: i64) -> Result<Ray3, KsError> {
        Ray3::canonicalize([x.into(), y.into(), z.into()])
    }

    pub fn coords(&self) -> &[QuadRat; 3] {
        &self.coords
    }

    /// Exact dot product of the canonical representatives.
    pub fn inner(&self, other: &Ray3) -> QuadRat {
        let mut acc = QuadRat::zero();
        for (x, y) in self.coords.iter().zip(other.coords.iter()) {
            acc = &acc + &(x * y);
        }
        acc
    }

    pub fn is_orthogonal(&self, other: &Ray3) -> bool {
        self.inner(other).is_zero()
    }

    /// Unit vector in f64, for handing directions to the numeric side.
    pub fn to_unit_f64(&self) -> [f64; 3] {
        let v = self.coords.each_ref().map(QuadRat::to_f64);
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / n, v[1] / n, v[2] / n]
    }
}

/// Lexicographic by exact numeric value of the coordinates.
impl Ord for Ray3 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coords.iter().cmp(other.coords.iter())
    }
}

impl PartialOrd for Ray3 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ray3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.coords[0], self.coords[1], self.coords[2])
    }
}
