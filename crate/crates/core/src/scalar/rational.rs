use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{Modulus, Ring, Trunc};
use crate::error::{Error, Result};

/// An exact rational number, the model for elements of F.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        Rational(BigRational::new(num, den))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Exact square root in the rationals, if one exists.
    pub fn sqrt(&self) -> Option<Self> {
        if self.0.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &(&n * &n) == self.numer() && &(&d * &d) == self.denom() {
            Some(Rational(BigRational::new(n, d)))
        } else {
            None
        }
    }

    pub fn pow(&self, e: i32) -> Self {
        Rational(num_traits::Pow::pow(&self.0, e))
    }
}

impl Ring for Rational {
    fn from_i64_like(&self, n: i64) -> Self {
        Rational::from_integer(n)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn is_unit(&self) -> bool {
        !self.0.is_zero()
    }

    fn inv(&self) -> Option<Self> {
        if self.0.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        Rational(self.0 / rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| BigInt::from_str(t.trim()).map_err(|_| Error::Parse(format!("bad rational '{s}'")));
        match s.split_once('/') {
            Some((n, d)) => {
                let d = parse(d)?;
                if d.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in '{s}'")));
                }
                Ok(Rational(BigRational::new(parse(n)?, d)))
            }
            None => Ok(Rational(BigRational::from_integer(parse(s)?))),
        }
    }
}

/// A p-adic valuation value: an integer or +infinity (for zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// An odd prime, the residual characteristic of F.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p.is_multiple_of(2) {
            return Err(Error::InvalidPrime(p));
        }
        let mut d = 3;
        while d * d <= p {
            if p.is_multiple_of(d) {
                return Err(Error::InvalidPrime(p));
            }
            d += 2;
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn big(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `p^k` as a rational, for any integer `k`.
    pub fn power(self, k: i64) -> Rational {
        let base = Rational::from_integer(self.0 as i64);
        base.pow(k as i32)
    }

    fn val_int(self, n: &BigInt) -> i64 {
        debug_assert!(!n.is_zero());
        let p = self.big();
        let mut n = n.clone();
        let mut v = 0;
        loop {
            let (q, r) = n.div_rem(&p);
            if !r.is_zero() {
                return v;
            }
            n = q;
            v += 1;
        }
    }

    /// The p-adic valuation.
    pub fn val(self, x: &Rational) -> Valuation {
        if x.0.is_zero() {
            Valuation::Infinite
        } else {
            Valuation::Finite(self.val_int(x.numer()) - self.val_int(x.denom()))
        }
    }

    pub fn is_integral(self, x: &Rational) -> bool {
        self.val(x) >= Valuation::Finite(0)
    }

    /// The ring homomorphism `Z_(p) -> Z/p^N`.
    pub fn reduce(self, x: &Rational, modulus: Modulus) -> Result<Trunc> {
        debug_assert_eq!(modulus.p(), self.0);
        if !self.is_integral(x) {
            return Err(Error::NotIntegral { value: x.to_string(), p: self.0 });
        }
        let pn = BigInt::from(modulus.pn());
        let num = x.numer().mod_floor(&pn).to_u64().expect("residue fits");
        let den = x.denom().mod_floor(&pn).to_u64().expect("residue fits");
        let num = Trunc::new(num, modulus);
        let den = Trunc::new(den, modulus);
        Ok(num * den.inv().expect("denominator prime to p"))
    }

    /// The canonical representative of `x` modulo `p^e Z_(p)`: a rational
    /// `c / p^s` with `0 <= c < p^(e+s)`, or zero when `val(x) >= e`.
    pub fn residue_mod_power(self, x: &Rational, e: i64) -> Rational {
        let v = match self.val(x) {
            Valuation::Infinite => return Rational::zero(),
            Valuation::Finite(v) => v,
        };
        if v >= e {
            return Rational::zero();
        }
        let s = (-v).max(0);
        let shifted = x.clone() * self.power(s);
        let m = self.big().pow((e + s) as u32);
        let num = shifted.numer().mod_floor(&m);
        let den_inv = shifted.denom().mod_floor(&m).modinv(&m).expect("denominator is a p-adic unit");
        let c = (num * den_inv).mod_floor(&m);
        Rational::from_big(c, BigInt::one()) * self.power(-s)
    }

    /// The smallest positive integer that is a quadratic non-residue mod p.
    pub fn smallest_nonresidue(self) -> i64 {
        let p = self.0;
        (2..p).find(|&u| (1..p).all(|x| (x * x) % p != u)).expect("odd primes have non-residues") as i64
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(p3().val(&Rational::new(9, 2)), Valuation::Finite(2));
        assert_eq!(p3().val(&Rational::zero()), Valuation::Infinite);
        assert_eq!(p3().val(&Rational::new(2, 3)), Valuation::Finite(-1));
    }

    #[test]
    fn rejects_even_and_composite_primes() {
        assert_eq!(Prime::new(2), Err(Error::InvalidPrime(2)));
        assert_eq!(Prime::new(9), Err(Error::InvalidPrime(9)));
        assert!(Prime::new(7).is_ok());
    }

    #[test]
    fn reduce_examples() {
        let m = Modulus::new(p3(), 2).unwrap();
        assert_eq!(p3().reduce(&Rational::from_integer(10), m).unwrap().residue(), 1);
        let m1 = Modulus::new(p3(), 1).unwrap();
        assert_eq!(p3().reduce(&Rational::new(1, 2), m1).unwrap().residue(), 2);
        assert!(matches!(p3().reduce(&Rational::new(1, 3), m1), Err(Error::NotIntegral { .. })));
    }

    #[test]
    fn residue_mod_power_is_canonical() {
        let p = p3();
        let x = Rational::new(7, 2);
        let r = p.residue_mod_power(&x, 2);
        // 7/2 = 8 mod 9
        assert_eq!(r, Rational::from_integer(8));
        let y = Rational::new(5, 3);
        let r = p.residue_mod_power(&y, 1);
        // 5/3 = 2/3 + 1
        assert_eq!(r, Rational::new(5, 3));
        let r = p.residue_mod_power(&(y.clone() + Rational::from_integer(6)), 1);
        assert_eq!(r, Rational::new(5, 3));
        assert_eq!(p.residue_mod_power(&Rational::from_integer(27), 2), Rational::zero());
    }

    #[test]
    fn nonresidues() {
        assert_eq!(p3().smallest_nonresidue(), 2);
        assert_eq!(Prime::new(5).unwrap().smallest_nonresidue(), 2);
        assert_eq!(Prime::new(7).unwrap().smallest_nonresidue(), 3);
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(Rational::new(4, 9).sqrt(), Some(Rational::new(2, 3)));
        assert_eq!(Rational::new(2, 1).sqrt(), None);
        assert_eq!(Rational::new(-1, 1).sqrt(), None);
    }
}
