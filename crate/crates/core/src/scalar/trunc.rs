use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Prime, Ring};
use crate::error::{Error, Result};

/// The residue ring `Z/p^N`, a finite model of `o_F / p^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Modulus {
    p: u64,
    n: u32,
    pn: u64,
}

impl Modulus {
    pub fn new(prime: Prime, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precision { level: 0, precision: 0 });
        }
        let p = prime.get();
        let pn = (p as u128).checked_pow(n).unwrap_or(u128::MAX);
        if pn >= 1 << 31 {
            return Err(Error::ModulusTooLarge(pn));
        }
        Ok(Modulus { p, n, pn: pn as u64 })
    }

    pub fn p(self) -> u64 {
        self.p
    }

    pub fn prime(self) -> Prime {
        Prime::new(self.p).expect("validated at construction")
    }

    pub fn precision(self) -> u32 {
        self.n
    }

    pub fn pn(self) -> u64 {
        self.pn
    }

    pub fn elem(self, r: u64) -> Trunc {
        Trunc::new(r, self)
    }

    /// `p^k mod p^N`.
    pub fn pow_p(self, k: u32) -> Trunc {
        if k >= self.n {
            self.elem(0)
        } else {
            self.elem(self.p.pow(k))
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.n)
    }
}

/// A residue modulo `p^N`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Trunc {
    r: u64,
    m: Modulus,
}

impl Trunc {
    pub fn new(r: u64, m: Modulus) -> Self {
        Trunc { r: r % m.pn, m }
    }

    pub fn from_i64(v: i64, m: Modulus) -> Self {
        Trunc { r: v.rem_euclid(m.pn as i64) as u64, m }
    }

    pub fn residue(self) -> u64 {
        self.r
    }

    pub fn modulus(self) -> Modulus {
        self.m
    }

    /// Number of factors of p in the residue, capped at N (zero has valuation N).
    pub fn valuation(self) -> u32 {
        if self.r == 0 {
            return self.m.n;
        }
        let mut r = self.r;
        let mut v = 0;
        while r.is_multiple_of(self.m.p) {
            r /= self.m.p;
            v += 1;
        }
        v
    }

    /// `self / p^k` for a residue divisible by `p^k`, as an element mod p^N.
    pub fn div_p_pow(self, k: u32) -> Trunc {
        debug_assert!(self.valuation() >= k);
        if k == 0 {
            return self;
        }
        Trunc::new(self.r / self.m.p.pow(k), self.m)
    }

    /// Unit part `u` with `self = p^v u`, where `v = valuation()`; zero maps to one.
    pub fn unit_part(self) -> Trunc {
        if self.r == 0 {
            return self.one_like();
        }
        self.div_p_pow(self.valuation())
    }

    /// Reduction to a coarser precision.
    pub fn truncate(self, m: Modulus) -> Trunc {
        debug_assert_eq!(m.p, self.m.p);
        Trunc::new(self.r, m)
    }

    pub fn pow(self, mut e: u64) -> Trunc {
        let mut base = self;
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl Ring for Trunc {
    fn from_i64_like(&self, n: i64) -> Self {
        Trunc::from_i64(n, self.m)
    }

    fn is_zero(&self) -> bool {
        self.r == 0
    }

    fn is_unit(&self) -> bool {
        !self.r.is_multiple_of(self.m.p)
    }

    fn inv(&self) -> Option<Self> {
        if !self.is_unit() {
            return None;
        }
        let (mut old_r, mut r) = (self.r as i128, self.m.pn as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        debug_assert_eq!(old_r, 1);
        Some(Trunc::from_i64(old_s.rem_euclid(self.m.pn as i128) as i64, self.m))
    }
}

impl Add for Trunc {
    type Output = Trunc;
    fn add(self, rhs: Trunc) -> Trunc {
        debug_assert_eq!(self.m, rhs.m);
        Trunc { r: (self.r + rhs.r) % self.m.pn, m: self.m }
    }
}

impl Sub for Trunc {
    type Output = Trunc;
    fn sub(self, rhs: Trunc) -> Trunc {
        debug_assert_eq!(self.m, rhs.m);
        Trunc { r: (self.r + self.m.pn - rhs.r) % self.m.pn, m: self.m }
    }
}

impl Mul for Trunc {
    type Output = Trunc;
    fn mul(self, rhs: Trunc) -> Trunc {
        debug_assert_eq!(self.m, rhs.m);
        Trunc { r: (self.r * rhs.r) % self.m.pn, m: self.m }
    }
}

impl Neg for Trunc {
    type Output = Trunc;
    fn neg(self) -> Trunc {
        Trunc { r: (self.m.pn - self.r) % self.m.pn, m: self.m }
    }
}

impl fmt::Display for Trunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.r)
    }
}

impl fmt::Debug for Trunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.r, self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u64, n: u32) -> Modulus {
        Modulus::new(Prime::new(p).unwrap(), n).unwrap()
    }

    #[test]
    fn inverse_and_units() {
        let m9 = m(3, 2);
        for r in 0..9 {
            let x = m9.elem(r);
            match x.inv() {
                Some(y) => assert_eq!((x * y).residue(), 1),
                None => assert_eq!(r % 3, 0),
            }
        }
    }

    #[test]
    fn valuation_and_division() {
        let m27 = m(3, 3);
        assert_eq!(m27.elem(18).valuation(), 2);
        assert_eq!(m27.elem(0).valuation(), 3);
        assert_eq!(m27.elem(18).div_p_pow(2).residue(), 2);
        assert_eq!(m27.elem(18).unit_part().residue(), 2);
    }

    #[test]
    fn rejects_oversized_modulus() {
        assert!(matches!(Modulus::new(Prime::new(3).unwrap(), 40), Err(Error::ModulusTooLarge(_))));
    }
}
