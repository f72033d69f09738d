//! Exact scalars for the base field F and its extension E.
//!
//! F is modelled by the rationals with a fixed odd prime `p` (the uniformizer
//! is `p` itself); the residue rings `Z/p^N` model `o_F / p^N`. The extension
//! E is either F itself (split) or `F(sqrt u)` for a non-square unit `u`.

mod hensel;
mod quad;
mod rational;
mod trunc;

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};

pub use hensel::{hensel_sqrt_one_plus, sqrt_unit};
pub use quad::{Extension, Quad};
pub use rational::{Prime, Rational, Valuation};
pub use trunc::{Modulus, Trunc};

/// Commutative ring elements that carry their own context, so that
/// constants can be produced from any existing element.
pub trait Ring:
    Clone
    + PartialEq
    + Eq
    + Hash
    + Debug
    + Display
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64_like(&self, n: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// Units of the ring. In the residue rings this is "not divisible by p".
    fn is_unit(&self) -> bool;
    fn inv(&self) -> Option<Self>;

    fn zero_like(&self) -> Self {
        self.from_i64_like(0)
    }

    fn one_like(&self) -> Self {
        self.from_i64_like(1)
    }

    fn is_one(&self) -> bool {
        *self == self.one_like()
    }
}

/// Elements of E: a ring with the Galois involution tau over a base ring.
pub trait Scalar: Ring {
    type Base: Ring;

    /// The generator tau of Gal(E/F).
    fn conj(&self) -> Self;
    fn from_base_like(&self, b: Self::Base) -> Self;
    /// The F-component, when the element is tau-fixed.
    fn as_base(&self) -> Option<Self::Base>;
    fn extension(&self) -> Extension;
    /// sqrt(u) in the inert case.
    fn generator_like(&self) -> Option<Self>;
}
