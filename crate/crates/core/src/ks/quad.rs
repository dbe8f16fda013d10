//! Exact arithmetic in the quadratic field Q(sqrt 2).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// The number `a + b·√2` with rational `a` and `b`.
///
/// `BigRational` keeps both parts in lowest terms with a positive
/// denominator, so structural equality is field equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadRat {
    a: BigRational,
    b: BigRational,
}

impl QuadRat {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QuadRat { a, b }
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        QuadRat {
            a: BigRational::from_integer(a.into()),
            b: BigRational::from_integer(b.into()),
        }
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn sqrt2() -> Self {
        Self::from_ints(0, 1)
    }

    /// Rational part.
    pub fn rational(&self) -> &BigRational {
        &self.a
    }

    /// Coefficient of √2.
    pub fn surd(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Field conjugate `a − b·√2`.
    pub fn conjugate(&self) -> Self {
        QuadRat {
            a: self.a.clone(),
            b: -self.b.clone(),
        }
    }

    /// Field norm `a² − 2b²`, a rational.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - BigRational::from_integer(2.into()) * &self.b * &self.b
    }

    /// Exact sign in {-1, 0, 1}.
    ///
    /// When the parts disagree in sign, the larger of `a²` and `2b²` wins.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sa == 0 {
            return sb;
        }
        if sb == 0 || sa == sb {
            return sa;
        }
        let a2 = &self.a * &self.a;
        let b2 = BigRational::from_integer(2.into()) * &self.b * &self.b;
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            // a² = 2b² has no rational solution with b ≠ 0
            Ordering::Equal => unreachable!("sqrt 2 is irrational"),
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(QuadRat {
            a: &self.a / &n,
            b: -(&self.b / &n),
        })
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        rhs.recip().map(|r| self * &r)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        QuadRat {
            a: &self.a * k,
            b: &self.b * k,
        }
    }

    /// Nearest `f64`.
    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.a) + rat_to_f64(&self.b) * std::f64::consts::SQRT_2
    }
}

fn sign_of(r: &BigRational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

fn rat_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

impl Ord for QuadRat {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl PartialOrd for QuadRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a QuadRat> for &'a QuadRat {
    type Output = QuadRat;
    fn add(self, rhs: &QuadRat) -> QuadRat {
        QuadRat {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
}

impl<'a> Sub<&'a QuadRat> for &'a QuadRat {
    type Output = QuadRat;
    fn sub(self, rhs: &QuadRat) -> QuadRat {
        QuadRat {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        }
    }
}

impl<'a> Mul<&'a QuadRat> for &'a QuadRat {
    type Output = QuadRat;
    fn mul(self, rhs: &QuadRat) -> QuadRat {
        let two = BigRational::from_integer(2.into());
        QuadRat {
            a: &self.a * &rhs.a + two * &self.b * &rhs.b,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }
}

impl Neg for &QuadRat {
    type Output = QuadRat;
    fn neg(self) -> QuadRat {
        QuadRat {
            a: -self.a.clone(),
            b: -self.b.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QuadRat> for QuadRat {
            type Output = QuadRat;
            fn $m(self, rhs: QuadRat) -> QuadRat {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QuadRat {
    type Output = QuadRat;
    fn neg(self) -> QuadRat {
        -&self
    }
}

impl From<i64> for QuadRat {
    fn from(v: i64) -> Self {
        QuadRat::from_ints(v, 0)
    }
}

fn fmt_rat(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// Renders in the ray-file grammar: `3`, `-1/2`, `r2`, `-3/4r2`, `1+r2`.
impl fmt::Display for QuadRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let has_a = !self.a.is_zero();
        let has_b = !self.b.is_zero();
        if !has_a && !has_b {
            return write!(f, "0");
        }
        if has_a {
            fmt_rat(&self.a, f)?;
        }
        if has_b {
            let mag = self.b.abs();
            if self.b.is_negative() {
                write!(f, "-")?;
            } else if has_a {
                write!(f, "+")?;
            }
            if !mag.is_one() {
                fmt_rat(&mag, f)?;
            }
            write!(f, "r2")?;
        }
        Ok(())
    }
}

/// Least common multiple of all denominators, and gcd of all numerators,
/// over the rational and surd parts of `xs`.
pub(crate) fn denom_lcm_and_numer_gcd(xs: &[QuadRat]) -> (BigInt, BigInt) {
    use num_integer::Integer;
    let mut lcm = BigInt::one();
    let mut gcd = BigInt::zero();
    for x in xs {
        for part in [&x.a, &x.b] {
            lcm = lcm.lcm(part.denom());
            gcd = gcd.gcd(part.numer());
        }
    }
    (lcm, gcd)
}
