//! Exact rational scalars and small exact determinants.
//!
//! Every geometric quantity in this crate is a [`Rational`]: an arbitrary
//! precision fraction kept in lowest terms with a positive denominator. There
//! is no floating point anywhere on the decision path, which is what lets the
//! symbolic perturbation layer rely on exact equality tests.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// An exact rational number in canonical form (reduced, positive denominator).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

/// Sign of an exact quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn from_ordering(ord: Ordering) -> Sign {
        match ord {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }

    pub fn of_bigint(v: &BigInt) -> Sign {
        Sign::from_ordering(v.cmp(&BigInt::zero()))
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }
}

impl Rational {
    pub fn zero() -> Rational {
        Rational(BigRational::zero())
    }

    pub fn one() -> Rational {
        Rational(BigRational::one())
    }

    pub fn from_integer(v: impl Into<BigInt>) -> Rational {
        Rational(BigRational::from_integer(v.into()))
    }

    /// `numer / denom`, or `None` when `denom` is zero.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Option<Rational> {
        let denom = denom.into();
        if denom.is_zero() {
            return None;
        }
        Some(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn sign(&self) -> Sign {
        Sign::of_bigint(self.0.numer())
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    /// Largest integer not greater than `self`.
    pub fn floor(&self) -> BigInt {
        self.0.numer().div_floor(self.0.denom())
    }

    /// Nearest `f64`; for reporting and statistics only, never for decisions.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn recip(&self) -> Rational {
        Rational(self.0.recip())
    }

    pub fn pow(&self, exp: u32) -> Rational {
        Rational(num_traits::pow(self.0.clone(), exp as usize))
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(v: BigRational) -> Self {
        Rational(v)
    }
}

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Self {
        Rational::from_integer(v)
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_integer(v)
    }
}

impl From<i32> for Rational {
    fn from(v: i32) -> Self {
        Rational::from_integer(v)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign<Rational> for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// Error from [`parse_exact`], naming the offending token.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational `{token}`: {reason}")]
pub struct ParseRationalError {
    pub token: String,
    pub reason: &'static str,
}

/// Parses an optionally signed integer, fraction `p/q` or finite decimal
/// `d.ddd` into the exact rational it denotes.
///
/// Decimals are exact (`"0.1"` is 1/10). Exponent notation and the special
/// float spellings are rejected rather than rounded.
pub fn parse_exact(text: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason| ParseRationalError {
        token: text.to_string(),
        reason,
    };
    let (negative, body) = match text.as_bytes().first() {
        Some(b'-') => (true, &text[1..]),
        Some(b'+') => (false, &text[1..]),
        Some(_) => (false, text),
        None => return Err(err("empty")),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());

    let value = if let Some((num, den)) = body.split_once('/') {
        if !digits(num) || !digits(den) {
            return Err(err("expected digits on both sides of '/'"));
        }
        let num: BigInt = num.parse().map_err(|_| err("bad numerator"))?;
        let den: BigInt = den.parse().map_err(|_| err("bad denominator"))?;
        Rational::new(num, den).ok_or_else(|| err("zero denominator"))?
    } else if let Some((int, frac)) = body.split_once('.') {
        if int.is_empty() && frac.is_empty() {
            return Err(err("no digits"));
        }
        if (!int.is_empty() && !digits(int)) || (!frac.is_empty() && !digits(frac)) {
            return Err(err("expected a finite decimal"));
        }
        let mut all = String::with_capacity(int.len() + frac.len());
        all.push_str(int);
        all.push_str(frac);
        let num: BigInt = all.parse().map_err(|_| err("bad decimal"))?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        Rational::new(num, den).expect("power of ten is nonzero")
    } else {
        if !digits(body) {
            return Err(err("expected an integer, fraction or decimal"));
        }
        Rational::from_integer(body.parse::<BigInt>().map_err(|_| err("bad integer"))?)
    };
    Ok(if negative { -value } else { value })
}

impl FromStr for Rational {
    type Err = ParseRationalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_exact(s)
    }
}

/// Exact determinant of a small square matrix by cofactor expansion.
///
/// Intended for n <= 4; cost grows as n!.
pub fn det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    debug_assert!(m.iter().all(|row| row.len() == n));
    let cols: Vec<usize> = (0..n).collect();
    det_minor(m, 0, &cols)
}

fn det_minor(m: &[Vec<Rational>], row: usize, cols: &[usize]) -> Rational {
    match cols.len() {
        0 => Rational::one(),
        1 => m[row][cols[0]].clone(),
        2 => &m[row][cols[0]] * &m[row + 1][cols[1]] - &m[row][cols[1]] * &m[row + 1][cols[0]],
        _ => {
            let mut acc = Rational::zero();
            for (k, &c) in cols.iter().enumerate() {
                let entry = &m[row][c];
                if entry.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let term = entry * det_minor(m, row + 1, &rest);
                if k % 2 == 0 {
                    acc += term;
                } else {
                    acc -= &term;
                }
            }
            acc
        }
    }
}

/// Exact sign of a 3×3 determinant.
pub fn det3_sign(m: &[[Rational; 3]; 3]) -> Sign {
    let rows: Vec<Vec<Rational>> = m.iter().map(|r| r.to_vec()).collect();
    det(&rows).sign()
}

/// Exact sign of a 4×4 determinant.
pub fn det4_sign(m: &[[Rational; 4]; 4]) -> Sign {
    let rows: Vec<Vec<Rational>> = m.iter().map(|r| r.to_vec()).collect();
    det(&rows).sign()
}

/// The determinant with rows `(a, 1), (b, 1), (c, 1)`: twice the signed area
/// of triangle `abc`, positive when counterclockwise.
pub fn orient2d_value(a: [&Rational; 2], b: [&Rational; 2], c: [&Rational; 2]) -> Rational {
    let bx = b[0] - a[0];
    let by = b[1] - a[1];
    let cx = c[0] - a[0];
    let cy = c[1] - a[1];
    bx * cy - by * cx
}

/// The determinant with rows `(a, 1), (b, 1), (c, 1), (d, 1)`.
pub fn orient3d_value(
    a: [&Rational; 3],
    b: [&Rational; 3],
    c: [&Rational; 3],
    d: [&Rational; 3],
) -> Rational {
    let u: [Rational; 3] = std::array::from_fn(|i| b[i] - a[i]);
    let v: [Rational; 3] = std::array::from_fn(|i| c[i] - a[i]);
    let w: [Rational; 3] = std::array::from_fn(|i| d[i] - a[i]);
    let cross = [
        &v[1] * &w[2] - &v[2] * &w[1],
        &v[2] * &w[0] - &v[0] * &w[2],
        &v[0] * &w[1] - &v[1] * &w[0],
    ];
    // Row reduction against `a` leaves -det[u; v; w].
    -(&u[0] * &cross[0] + &u[1] * &cross[1] + &u[2] * &cross[2])
}
