//! The similitude Cayley map `c(X) = (1 - X/(1+alpha)) (1+X)^-1` and the
//! structure of its fibers.
//!
//! Two domains appear. `gu1` needs `1 + alpha` and `1 + X` invertible; the
//! smaller domain `g1` also needs `1 + alpha - X` invertible and is the one
//! stable under theta. In the general-linear model `c(X) = 1 + X` on
//! `det(1 + X) != 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::involution::SEARCH_BUDGET;
use crate::matrix::Matrix;
use crate::modlin;
use crate::scalar::{sqrt_unit, Quad, Rational, Ring, Scalar, Trunc};
use crate::space::{ExactSpace, GroupElem, HermitianSpace, LieElem, TruncSpace};

/// Membership in `gu1`: `1 + alpha` a unit and `1 + X` invertible.
pub fn in_gu1<S: Scalar>(space: &HermitianSpace<S>, x: &LieElem<S>) -> bool {
    let one = space.base_one();
    (one.clone() + x.alpha().clone()).is_unit() && x.mat().add_scalar(&space.one()).is_invertible()
}

/// Membership in `g1`; over residue rings "nonzero" reads "unit".
pub fn in_domain<S: Scalar>(space: &HermitianSpace<S>, x: &LieElem<S>) -> bool {
    if space.is_general_linear() {
        return x.mat().add_scalar(&space.one()).is_invertible();
    }
    let one_alpha = space.scalar(space.base_one() + x.alpha().clone());
    in_gu1(space, x) && (-x.mat()).add_scalar(&one_alpha).is_invertible()
}

/// A Lie algebra element certified to lie in `g1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CayleyDomainElem<S: Scalar>(LieElem<S>);

impl<S: Scalar> CayleyDomainElem<S> {
    pub fn new(space: &HermitianSpace<S>, x: LieElem<S>) -> Result<Self> {
        if !in_domain(space, &x) {
            return Err(Error::Precondition(format!("{} lies outside the Cayley domain", x.mat())));
        }
        Ok(CayleyDomainElem(x))
    }

    pub fn lie(&self) -> &LieElem<S> {
        &self.0
    }

    pub fn into_lie(self) -> LieElem<S> {
        self.0
    }
}

/// `c(X)` on the domain `g1`.
pub fn cayley<S: Scalar>(space: &HermitianSpace<S>, x: &CayleyDomainElem<S>) -> Result<GroupElem<S>> {
    cayley_gu1(space, x.lie())
}

/// `c(X)` on the larger domain `gu1`, certified in GU(V).
pub fn cayley_gu1<S: Scalar>(space: &HermitianSpace<S>, x: &LieElem<S>) -> Result<GroupElem<S>> {
    let one_plus_x = x.mat().add_scalar(&space.one());
    if space.is_general_linear() {
        return space.certify_group(one_plus_x);
    }
    let lambda = (space.base_one() + x.alpha().clone())
        .inv()
        .ok_or_else(|| Error::Precondition("1 + alpha is not invertible".into()))?;
    let inv = one_plus_x.inverse().ok_or(Error::Singular)?;
    let num = (-&x.mat().scale(&space.scalar(lambda))).add_scalar(&space.one());
    space.certify_group(&num * &inv)
}

/// `X_lambda = (1 - g)(lambda + g)^-1`, with `alpha(X_lambda) = lambda^-1 - 1`.
/// In the general-linear model the only preimage is `g - 1`, and `lambda` must be 1.
pub fn x_lambda<S: Scalar>(space: &HermitianSpace<S>, g: &GroupElem<S>, lambda: &S::Base) -> Result<LieElem<S>> {
    if space.is_general_linear() {
        if !lambda.is_one() {
            return Err(Error::Precondition("the general-linear Cayley map only has lambda = 1".into()));
        }
        return space.certify_lie(g.mat().add_scalar(&-space.one()));
    }
    if lambda.clone() * lambda.clone() != *g.mu() {
        return Err(Error::Precondition(format!("lambda = {lambda} does not square to mu = {}", g.mu())));
    }
    let shifted = g.mat().add_scalar(&space.scalar(lambda.clone()));
    let inv = shifted.inverse().ok_or(Error::Singular)?;
    let one_minus_g = (-g.mat()).add_scalar(&space.one());
    let x = space.certify_lie(&one_minus_g * &inv)?;
    debug_assert_eq!(*x.alpha(), lambda.inv().expect("lambda is a unit") - space.base_one());
    Ok(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FiberCase {
    /// `mu != 1`; only one of `lambda + g`, `-lambda + g` contributes.
    UniqueLambda,
    /// `mu != 1`; both square roots contribute.
    TwoPreimages,
    /// `mu = 1`, `g != 1`, `1 + g` invertible (and every general-linear `g`).
    UniqueMu1,
    /// `g = 1`: 0 together with every `X` in `gu1` with `alpha(X) = -2`.
    InfiniteIdentity,
    /// Not in the image.
    Empty,
    /// Residue rings only: preimages arising from a root `lambda` with
    /// `lambda + g` not invertible, which has no counterpart over a field.
    Degenerate,
}

impl std::fmt::Display for FiberCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = serde_json::to_value(self).expect("unit enum serializes");
        f.write_str(s.as_str().expect("kebab-case string"))
    }
}

#[derive(Clone, Debug)]
pub struct Preimage<S: Scalar> {
    pub x: LieElem<S>,
    /// `(1 + alpha(x))^-1`, the square root of `mu(g)` the preimage belongs to.
    pub lambda: S::Base,
    /// Whether `x` also lies in the smaller domain `g1`.
    pub in_g1: bool,
}

#[derive(Clone, Debug)]
pub struct FiberResult<S: Scalar> {
    pub case: FiberCase,
    /// Preimages in `gu1`. For `InfiniteIdentity` over the rationals this is
    /// the representative 0 only; over residue rings it is the whole fiber.
    pub preimages: Vec<Preimage<S>>,
    /// The square roots of `mu(g)` that were examined.
    pub lambdas: Vec<S::Base>,
}

impl<S: Scalar> FiberResult<S> {
    /// Membership in the fiber of 1 beyond the representative: `X` in `gu1` with `alpha(X) = -2`.
    pub fn identity_predicate(space: &HermitianSpace<S>, x: &LieElem<S>) -> bool {
        let minus_two = space.base_one().from_i64_like(-2);
        x.mat().is_zero() || (in_gu1(space, x) && *x.alpha() == minus_two)
    }
}

fn preimage<S: Scalar>(space: &HermitianSpace<S>, x: LieElem<S>, lambda: S::Base) -> Preimage<S> {
    let in_g1 = in_domain(space, &x);
    Preimage { x, lambda, in_g1 }
}

fn general_linear_fiber<S: Scalar>(space: &HermitianSpace<S>, g: &GroupElem<S>) -> Result<FiberResult<S>> {
    let one = space.base_one();
    let x = space.certify_lie(g.mat().add_scalar(&(-space.one())))?;
    Ok(FiberResult { case: FiberCase::UniqueMu1, preimages: vec![preimage(space, x, one.clone())], lambdas: vec![one] })
}

/// The fiber of `c` over `g`, over the rationals. A multiplier that is not
/// the square of a rational has an empty fiber.
pub fn fiber(space: &ExactSpace, g: &GroupElem<Quad<Rational>>) -> Result<FiberResult<Quad<Rational>>> {
    if space.is_general_linear() {
        return general_linear_fiber(space, g);
    }
    let one = Rational::one();
    if g.is_identity() {
        return Ok(FiberResult {
            case: FiberCase::InfiniteIdentity,
            preimages: vec![preimage(space, space.lie_zero(), one.clone())],
            lambdas: vec![one],
        });
    }
    let Some(lambda) = g.mu().sqrt() else {
        return Ok(FiberResult { case: FiberCase::Empty, preimages: vec![], lambdas: vec![] });
    };
    if g.mu().is_one() {
        let preimages = match x_lambda(space, g, &one) {
            Ok(x) => vec![preimage(space, x, one.clone())],
            Err(Error::Singular) => vec![],
            Err(e) => return Err(e),
        };
        let case = if preimages.is_empty() { FiberCase::Empty } else { FiberCase::UniqueMu1 };
        return Ok(FiberResult { case, preimages, lambdas: vec![one] });
    }
    let lambdas = vec![lambda.clone(), -lambda];
    let mut preimages = Vec::new();
    for l in &lambdas {
        match x_lambda(space, g, l) {
            Ok(x) => preimages.push(preimage(space, x, l.clone())),
            Err(Error::Singular) => {}
            Err(e) => return Err(e),
        }
    }
    let case = match preimages.len() {
        0 => FiberCase::Empty,
        1 => FiberCase::UniqueLambda,
        _ => FiberCase::TwoPreimages,
    };
    Ok(FiberResult { case, preimages, lambdas })
}

/// The fiber of `c` over `g` modulo `p^N`, enumerated exactly: for each
/// square root `lambda` of `mu(g)` it solves `(lambda + g) X = 1 - g` with
/// `X + X* = lambda^-1 - 1` and keeps the `X` with `1 + X` invertible.
pub fn fiber_mod(space: &TruncSpace, g: &GroupElem<Quad<Trunc>>) -> Result<FiberResult<Quad<Trunc>>> {
    if space.is_general_linear() {
        return general_linear_fiber(space, g);
    }
    let Some(root) = sqrt_unit(*g.mu()) else {
        return Ok(FiberResult { case: FiberCase::Empty, preimages: vec![], lambdas: vec![] });
    };
    let mut lambdas = vec![root, -root];
    lambdas.sort_by_key(|l| l.residue());
    let mut preimages = Vec::new();
    let mut degenerate = false;
    let mut contributing = 0;
    for &lambda in &lambdas {
        let found = solve_fiber_mod(space, g, lambda)?;
        if found.is_empty() {
            continue;
        }
        contributing += 1;
        if !g.mat().add_scalar(&space.scalar(lambda)).is_invertible() {
            degenerate = true;
        }
        preimages.extend(found.into_iter().map(|x| preimage(space, x, lambda)));
    }
    preimages.sort_by_key(|p| p.x.mat().key());
    let case = if g.is_identity() {
        FiberCase::InfiniteIdentity
    } else if preimages.is_empty() {
        FiberCase::Empty
    } else if degenerate {
        FiberCase::Degenerate
    } else if g.mu().is_one() {
        FiberCase::UniqueMu1
    } else if contributing == 2 {
        FiberCase::TwoPreimages
    } else {
        FiberCase::UniqueLambda
    };
    Ok(FiberResult { case, preimages, lambdas })
}

fn solve_fiber_mod(space: &TruncSpace, g: &GroupElem<Quad<Trunc>>, lambda: Trunc) -> Result<Vec<LieElem<Quad<Trunc>>>> {
    let n = space.dim();
    let ext = space.ext();
    let modulus = space.modulus();
    let coords = n * n * ext.degree();
    let shifted = g.mat().add_scalar(&space.scalar(lambda));
    let zero = modulus.elem(0);
    let columns: Vec<Vec<Trunc>> = (0..coords)
        .map(|i| {
            let mut v = vec![zero; coords];
            v[i] = modulus.elem(1);
            let e = Matrix::unflatten(n, n, ext, &v);
            let mut col = (&shifted * &e).flatten();
            col.extend((&e + &space.star(&e)).flatten());
            col
        })
        .collect();
    let rows: Vec<Vec<Trunc>> = (0..columns[0].len()).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    let alpha = lambda.inv().expect("roots of units are units") - modulus.elem(1);
    let mut rhs = (-g.mat()).add_scalar(&space.one()).flatten();
    rhs.extend(space.identity().scale(&space.scalar(alpha)).flatten());
    let Some(sols) = modlin::solve_affine(&rows, coords, &rhs, modulus) else {
        return Ok(vec![]);
    };
    let mut out = Vec::new();
    for v in sols.enumerate(SEARCH_BUDGET)? {
        let x = space.certify_lie(Matrix::unflatten(n, n, ext, &v))?;
        if x.mat().add_scalar(&space.one()).is_invertible() {
            out.push(x);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Modulus, Prime};
    use crate::space::Family;

    fn sp2() -> ExactSpace {
        ExactSpace::standard(Family::Symplectic, 2, Prime::new(3).unwrap()).unwrap()
    }

    fn lie(space: &ExactSpace, text: &str) -> LieElem<Quad<Rational>> {
        space.certify_lie(space.parse_matrix(text).unwrap()).unwrap()
    }

    fn group(space: &ExactSpace, text: &str) -> GroupElem<Quad<Rational>> {
        space.certify_group(space.parse_matrix(text).unwrap()).unwrap()
    }

    #[test]
    fn domain_examples() {
        let sp = sp2();
        assert!(in_domain(&sp, &sp.lie_zero()));
        assert!(!in_domain(&sp, &lie(&sp, "-1 0; 0 -1")));
        assert!(!in_domain(&sp, &lie(&sp, "-1 0; 0 0")));
    }

    #[test]
    fn cayley_examples() {
        let sp = sp2();
        let x = CayleyDomainElem::new(&sp, lie(&sp, "1 1; 0 1")).unwrap();
        let g = cayley(&sp, &x).unwrap();
        assert_eq!(*g.mat(), sp.parse_matrix("1/3 -1/3; 0 1/3").unwrap());
        assert_eq!(*g.mu(), Rational::new(1, 9));
        let zero = CayleyDomainElem::new(&sp, sp.lie_zero()).unwrap();
        assert!(cayley(&sp, &zero).unwrap().is_identity());
        let n = CayleyDomainElem::new(&sp, lie(&sp, "0 1; 0 0")).unwrap();
        let g = cayley(&sp, &n).unwrap();
        assert_eq!(*g.mat(), sp.int_matrix(&[&[1, -2], &[0, 1]]));
        assert!(g.mu().is_one());
    }

    #[test]
    fn x_lambda_examples() {
        let sp = sp2();
        let g = group(&sp, "1/3 -1/3; 0 1/3");
        assert_eq!(*x_lambda(&sp, &g, &Rational::new(1, 3)).unwrap().mat(), sp.int_matrix(&[&[1, 1], &[0, 1]]));
        assert!(x_lambda(&sp, &sp.group_identity(), &Rational::one()).unwrap().mat().is_zero());
        let d = group(&sp, "4 0; 0 1");
        let plus = x_lambda(&sp, &d, &Rational::from_integer(2)).unwrap();
        let minus = x_lambda(&sp, &d, &Rational::from_integer(-2)).unwrap();
        assert_eq!(*plus.mat(), sp.parse_matrix("-1/2 0; 0 0").unwrap());
        assert_eq!(*minus.mat(), sp.parse_matrix("-3/2 0; 0 0").unwrap());
        for x in [plus, minus] {
            assert_eq!(cayley_gu1(&sp, &x).unwrap().mat(), d.mat());
        }
        assert!(x_lambda(&sp, &d, &Rational::from_integer(3)).is_err());
    }

    #[test]
    fn fiber_examples() {
        let sp = sp2();
        let g = group(&sp, "1/3 -1/3; 0 1/3");
        let f = fiber(&sp, &g).unwrap();
        assert_eq!(f.case, FiberCase::UniqueLambda);
        assert_eq!(f.preimages.len(), 1);
        assert_eq!(*f.preimages[0].x.mat(), sp.int_matrix(&[&[1, 1], &[0, 1]]));

        let f = fiber(&sp, &sp.group_identity()).unwrap();
        assert_eq!(f.case, FiberCase::InfiniteIdentity);
        assert!(f.preimages[0].x.mat().is_zero());

        let d = group(&sp, "4 0; 0 1");
        let f = fiber(&sp, &d).unwrap();
        assert_eq!(f.case, FiberCase::TwoPreimages);
        let mut got: Vec<_> = f.preimages.iter().map(|p| p.x.mat().clone()).collect();
        got.sort_by_key(|m| m.to_string());
        assert_eq!(got, vec![sp.parse_matrix("-1/2 0; 0 0").unwrap(), sp.parse_matrix("-3/2 0; 0 0").unwrap()]);

        let not_square = group(&sp, "2 0; 0 1");
        assert_eq!(fiber(&sp, &not_square).unwrap().case, FiberCase::Empty);
        let minus_one = group(&sp, "-1 0; 0 -1");
        assert_eq!(fiber(&sp, &minus_one).unwrap().case, FiberCase::Empty);
    }

    #[test]
    fn identity_fiber_predicate() {
        let sp = sp2();
        let x = lie(&sp, "-1 1; 0 -1");
        assert!(FiberResult::identity_predicate(&sp, &x) == in_gu1(&sp, &x));
        assert!(cayley_gu1(&sp, &lie(&sp, "-2 0; 0 0")).unwrap().is_identity());
    }

    #[test]
    fn truncated_fiber_round_trips() {
        let md = Modulus::new(Prime::new(3).unwrap(), 2).unwrap();
        let sp = TruncSpace::standard(Family::Symplectic, 2, md).unwrap();
        let g = sp.certify_group(sp.int_matrix(&[&[4, 0], &[0, 1]])).unwrap();
        let f = fiber_mod(&sp, &g).unwrap();
        assert!(!f.preimages.is_empty());
        for p in &f.preimages {
            assert_eq!(cayley_gu1(&sp, &p.x).unwrap().mat(), g.mat());
        }
        let one = fiber_mod(&sp, &sp.group_identity()).unwrap();
        assert_eq!(one.case, FiberCase::InfiniteIdentity);
        assert!(one.preimages.iter().all(|p| FiberResult::identity_predicate(&sp, &p.x)));
    }
}
