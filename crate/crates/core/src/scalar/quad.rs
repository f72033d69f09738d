use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::{Modulus, Prime, Rational, Ring, Scalar, Trunc};
use crate::error::{Error, Result};

/// Which quadratic algebra E is over F.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Extension {
    /// E = F and tau is the identity.
    Split,
    /// E = F(sqrt u) with u a non-square unit.
    Inert(i64),
}

impl Extension {
    /// The unramified extension for `p`, using the smallest positive non-residue.
    pub fn inert(prime: Prime) -> Self {
        Extension::Inert(prime.smallest_nonresidue())
    }

    pub fn is_inert(self) -> bool {
        matches!(self, Extension::Inert(_))
    }

    /// Degree [E:F].
    pub fn degree(self) -> usize {
        match self {
            Extension::Split => 1,
            Extension::Inert(_) => 2,
        }
    }

    fn u(self) -> i64 {
        match self {
            Extension::Split => 0,
            Extension::Inert(u) => u,
        }
    }
}

impl fmt::Display for Extension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extension::Split => write!(f, "split"),
            Extension::Inert(u) => write!(f, "inert(u={u})"),
        }
    }
}

/// `a + b sqrt(u)` over a base ring; in the split case `b` is always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Quad<B> {
    a: B,
    b: B,
    ext: Extension,
}

impl<B: Ring> Quad<B> {
    pub fn new(a: B, b: B, ext: Extension) -> Self {
        assert!(ext.is_inert() || b.is_zero(), "split extension elements have no sqrt(u) component");
        Quad { a, b, ext }
    }

    pub fn from_base(a: B, ext: Extension) -> Self {
        let b = a.zero_like();
        Quad { a, b, ext }
    }

    /// sqrt(u); `None` for the split extension.
    pub fn generator(proto: &B, ext: Extension) -> Option<Self> {
        ext.is_inert().then(|| Quad { a: proto.zero_like(), b: proto.one_like(), ext })
    }

    pub fn re(&self) -> &B {
        &self.a
    }

    pub fn im(&self) -> &B {
        &self.b
    }

    pub fn ext(&self) -> Extension {
        self.ext
    }

    /// The norm `x tau(x) = a^2 - u b^2`, an element of F.
    pub fn norm(&self) -> B {
        let u = self.a.from_i64_like(self.ext.u());
        self.a.clone() * self.a.clone() - u * self.b.clone() * self.b.clone()
    }

    pub fn map<C: Ring>(&self, f: impl Fn(&B) -> C) -> Quad<C> {
        Quad { a: f(&self.a), b: f(&self.b), ext: self.ext }
    }
}

impl<B: Ring> Ring for Quad<B> {
    fn from_i64_like(&self, n: i64) -> Self {
        Quad::from_base(self.a.from_i64_like(n), self.ext)
    }

    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn is_unit(&self) -> bool {
        self.norm().is_unit()
    }

    fn inv(&self) -> Option<Self> {
        let n = self.norm().inv()?;
        Some(Quad { a: self.a.clone() * n.clone(), b: -(self.b.clone()) * n, ext: self.ext })
    }
}

impl<B: Ring> Scalar for Quad<B> {
    type Base = B;

    fn conj(&self) -> Self {
        Quad { a: self.a.clone(), b: -self.b.clone(), ext: self.ext }
    }

    fn from_base_like(&self, b: B) -> Self {
        Quad::from_base(b, self.ext)
    }

    fn as_base(&self) -> Option<B> {
        self.b.is_zero().then(|| self.a.clone())
    }

    fn extension(&self) -> Extension {
        self.ext
    }

    fn generator_like(&self) -> Option<Self> {
        Quad::generator(&self.a, self.ext)
    }
}

impl<B: Ring> Add for Quad<B> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.ext, rhs.ext);
        Quad { a: self.a + rhs.a, b: self.b + rhs.b, ext: self.ext }
    }
}

impl<B: Ring> Sub for Quad<B> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.ext, rhs.ext);
        Quad { a: self.a - rhs.a, b: self.b - rhs.b, ext: self.ext }
    }
}

impl<B: Ring> Mul for Quad<B> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.ext, rhs.ext);
        match self.ext {
            Extension::Split => {
                let b = self.b;
                Quad { a: self.a * rhs.a, b, ext: self.ext }
            }
            Extension::Inert(u) => {
                let u = self.a.from_i64_like(u);
                let a = self.a.clone() * rhs.a.clone() + u * self.b.clone() * rhs.b.clone();
                let b = self.a * rhs.b + self.b * rhs.a;
                Quad { a, b, ext: self.ext }
            }
        }
    }
}

impl<B: Ring> Neg for Quad<B> {
    type Output = Self;
    fn neg(self) -> Self {
        Quad { a: -self.a, b: -self.b, ext: self.ext }
    }
}

/// Canonical text form: `a`, `b*s`, `a+b*s` or `a-b*s`, with `s` the generator.
impl<B: Ring> fmt::Display for Quad<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let b = self.b.to_string();
        if self.a.is_zero() {
            return write!(f, "{b}*s");
        }
        match b.strip_prefix('-') {
            Some(mag) => write!(f, "{}-{}*s", self.a, mag),
            None => write!(f, "{}+{}*s", self.a, b),
        }
    }
}

impl<B: Ring> fmt::Debug for Quad<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Split canonical text into its rational `a` and `b` components.
fn parse_components(text: &str) -> Result<(Rational, Rational)> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty scalar".into()));
    }
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = s.as_bytes();
    for i in 1..bytes.len() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'/' && bytes[i - 1] != b'*' {
            terms.push(&s[start..i]);
            start = i;
        }
    }
    terms.push(&s[start..]);
    let mut a = Rational::zero();
    let mut b = Rational::zero();
    for term in terms {
        let term = term.strip_prefix('+').unwrap_or(term);
        if let Some(coef) = term.strip_suffix('s') {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let c = match coef {
                "" => Rational::one(),
                "-" => -Rational::one(),
                c => c.parse()?,
            };
            b = b + c;
        } else {
            a = a + term.parse()?;
        }
    }
    Ok((a, b))
}

impl Quad<Rational> {
    pub fn parse(text: &str, ext: Extension) -> Result<Self> {
        let (a, b) = parse_components(text)?;
        if !ext.is_inert() && !b.is_zero() {
            return Err(Error::Parse(format!("'{text}' has a sqrt(u) part over a split extension")));
        }
        Ok(Quad { a, b, ext })
    }

    pub fn rational(a: Rational, ext: Extension) -> Self {
        Quad::from_base(a, ext)
    }

    pub fn int(n: i64, ext: Extension) -> Self {
        Quad::from_base(Rational::from_integer(n), ext)
    }

    /// Reduction `o_E -> o_E / p^N`.
    pub fn reduce(&self, prime: Prime, modulus: Modulus) -> Result<Quad<Trunc>> {
        Ok(Quad { a: prime.reduce(&self.a, modulus)?, b: prime.reduce(&self.b, modulus)?, ext: self.ext })
    }
}

impl Quad<Trunc> {
    pub fn parse_mod(text: &str, ext: Extension, modulus: Modulus) -> Result<Self> {
        let (a, b) = parse_components(text)?;
        if !ext.is_inert() && !b.is_zero() {
            return Err(Error::Parse(format!("'{text}' has a sqrt(u) part over a split extension")));
        }
        let prime = modulus.prime();
        Ok(Quad { a: prime.reduce(&a, modulus)?, b: prime.reduce(&b, modulus)?, ext })
    }

    pub fn int_mod(n: i64, ext: Extension, modulus: Modulus) -> Self {
        Quad::from_base(Trunc::from_i64(n, modulus), ext)
    }

    /// Packed residues `(a, b)`, the canonical enumeration key of the element.
    pub fn key(&self) -> (u64, u64) {
        (self.a.residue(), self.b.residue())
    }

    /// Lift to the canonical integral representative.
    pub fn lift(&self) -> Quad<Rational> {
        Quad {
            a: Rational::from_integer(self.a.residue() as i64),
            b: Rational::from_integer(self.b.residue() as i64),
            ext: self.ext,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inert() -> Extension {
        Extension::inert(Prime::new(3).unwrap())
    }

    fn q(s: &str) -> Quad<Rational> {
        Quad::<Rational>::parse(s, inert()).unwrap()
    }

    #[test]
    fn tau_examples() {
        assert_eq!(q("s").conj(), q("-s"));
        assert_eq!(q("5").conj(), q("5"));
        assert_eq!(Quad::int(5, Extension::Split).conj(), Quad::int(5, Extension::Split));
        assert_eq!(q("1+2*s").conj(), q("1-2*s"));
    }

    #[test]
    fn canonical_text_roundtrip() {
        for s in ["0", "3", "-1/2", "s", "-s", "1/3+2*s", "1-2/5*s", "-7*s"] {
            let x = q(s);
            assert_eq!(q(&x.to_string()), x, "{s}");
        }
        assert_eq!(q("1-2*s").to_string(), "1-2*s");
        assert_eq!(q("-1/2*s").to_string(), "-1/2*s");
    }

    #[test]
    fn multiplication_uses_u() {
        // u = 2 for p = 3
        assert_eq!(q("s") * q("s"), q("2"));
        let x = q("1+2*s");
        assert_eq!(x.clone() * x.conj(), q("-7"));
        assert_eq!(x.clone() * x.inv().unwrap(), q("1"));
    }

    #[test]
    fn split_rejects_generator() {
        assert!(Quad::<Rational>::parse("1+s", Extension::Split).is_err());
    }
}
