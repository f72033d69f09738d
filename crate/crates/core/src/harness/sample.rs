//! Seeded samplers. Every draw comes from a ChaCha8 stream determined by
//! `(seed, check, target, index)` alone, so any single sample can be
//! regenerated without replaying the ones before it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cayley::{cayley_gu1, in_domain};
use crate::error::{Error, Result};
use crate::involution::theta_lie;
use crate::lattice::Lattice;
use crate::matrix::Matrix;
use crate::scalar::{Quad, Rational, Trunc};
use crate::space::{ExactSpace, GroupElem, LieElem, TruncSpace};

type Exact = Quad<Rational>;

const MAX_ATTEMPTS: usize = 256;

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3))
}

pub fn rng_for(seed: u64, check: &str, target: &str, index: u64) -> ChaCha8Rng {
    let tag = fnv1a(format!("{check}/{target}").as_bytes());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ tag);
    rng.set_stream(index);
    rng
}

/// `u p^v` with `u` a small rational and `v` in `valuations`; zero one time in five.
pub fn rational(rng: &mut ChaCha8Rng, p: u64, valuations: (i64, i64)) -> Rational {
    if rng.gen_range(0..5) == 0 {
        return Rational::zero();
    }
    let num = rng.gen_range(1..=9i64) * if rng.gen_bool(0.5) { 1 } else { -1 };
    let den = loop {
        let d = rng.gen_range(1..=6i64);
        if !(d as u64).is_multiple_of(p) {
            break d;
        }
    };
    let v = rng.gen_range(valuations.0..=valuations.1);
    Rational::new(num, den) * crate::scalar::Prime::new(p).expect("odd prime").power(v)
}

fn scalar(space: &ExactSpace, rng: &mut ChaCha8Rng, valuations: (i64, i64)) -> Exact {
    let p = space.prime().get();
    let re = rational(rng, p, valuations);
    let im = if space.ext().is_inert() { rational(rng, p, valuations) } else { Rational::zero() };
    Quad::new(re, im, space.ext())
}

pub fn matrix(space: &ExactSpace, rng: &mut ChaCha8Rng, valuations: (i64, i64)) -> Matrix<Exact> {
    let n = space.dim();
    let data = (0..n * n).map(|_| scalar(space, rng, valuations)).collect();
    Matrix::from_vec(n, n, data)
}

/// `A - A* + t/2` lies in gu(V) with `alpha = t`; any matrix in the general-linear model.
pub fn lie(
    space: &ExactSpace,
    rng: &mut ChaCha8Rng,
    valuations: (i64, i64),
    alpha: Option<Rational>,
) -> Result<LieElem<Exact>> {
    let a = matrix(space, rng, valuations);
    if space.is_general_linear() {
        return space.certify_lie(a);
    }
    let t = alpha.unwrap_or_else(|| rational(rng, space.prime().get(), valuations));
    let half = space.rational(t * Rational::new(1, 2));
    space.certify_lie((&a - &space.star(&a)).add_scalar(&half))
}

/// A Lie element in the Cayley domain `g1`, by rejection.
pub fn domain_lie(space: &ExactSpace, rng: &mut ChaCha8Rng, alpha: Option<Rational>) -> Result<LieElem<Exact>> {
    for _ in 0..MAX_ATTEMPTS {
        let x = lie(space, rng, (-1, 1), alpha.clone())?;
        if in_domain(space, &x) {
            return Ok(x);
        }
    }
    Err(Error::NotFound("no sample landed in the Cayley domain".into()))
}

pub fn group(space: &ExactSpace, rng: &mut ChaCha8Rng) -> Result<GroupElem<Exact>> {
    cayley_gu1(space, &domain_lie(space, rng, None)?)
}

/// `c(X)` for a theta-fixed `X = (Y + theta Y) / 2`, hence a theta-fixed group element.
pub fn theta_fixed_group(space: &ExactSpace, rng: &mut ChaCha8Rng) -> Result<GroupElem<Exact>> {
    let half = space.rational(Rational::new(1, 2));
    for _ in 0..MAX_ATTEMPTS {
        let y = lie(space, rng, (-1, 1), None)?;
        let sum = y.mat() + theta_lie(space, &y).mat();
        let x = space.certify_lie(sum.scale(&half))?;
        if in_domain(space, &x) {
            return cayley_gu1(space, &x);
        }
    }
    Err(Error::NotFound("no theta-fixed sample landed in the Cayley domain".into()))
}

/// `p^k sum c_i b_i` with coefficients in `[-p^2, p^2]`.
pub fn lattice_point(space: &ExactSpace, lattice: &Lattice, rng: &mut ChaCha8Rng, k: i64) -> Result<LieElem<Exact>> {
    let p = space.prime().get() as i64;
    let scale = space.prime().power(k);
    let n = space.dim();
    let mut v = vec![Rational::zero(); lattice.ambient_dim()];
    for b in lattice.basis() {
        let c = Rational::from_integer(rng.gen_range(-p * p..=p * p)) * scale.clone();
        for (vi, bi) in v.iter_mut().zip(b) {
            *vi = vi.clone() + c.clone() * bi.clone();
        }
    }
    space.certify_lie(Matrix::unflatten(n, n, space.ext(), &v))
}

/// A residue of GU(V) mod `p^N`: a uniformly random matrix when one certifies
/// within a few draws, otherwise the Cayley image of a random integral `X`.
pub fn residue_group(space: &TruncSpace, rng: &mut ChaCha8Rng) -> Result<GroupElem<Quad<Trunc>>> {
    let modulus = space.modulus();
    let n = space.dim();
    let coords = n * n * space.ext().degree();
    let draw = |rng: &mut ChaCha8Rng| -> Vec<Trunc> {
        (0..coords).map(|_| modulus.elem(rng.gen_range(0..modulus.pn()))).collect()
    };
    for _ in 0..64 {
        if let Ok(g) = space.certify_group(Matrix::unflatten(n, n, space.ext(), &draw(rng))) {
            return Ok(g);
        }
    }
    for _ in 0..MAX_ATTEMPTS {
        let a = Matrix::unflatten(n, n, space.ext(), &draw(rng));
        let x = if space.is_general_linear() { a.clone() } else { &a - &space.star(&a) };
        let Ok(x) = space.certify_lie(x) else { continue };
        if let Ok(g) = cayley_gu1(space, &x) {
            return Ok(g);
        }
    }
    Err(Error::NotFound("no residue group element sampled".into()))
}
