//! Epsilon-hermitian spaces, the adjoint anti-involution `a -> a*`, and
//! certified membership in GU(V) and gu(V).
//!
//! Vectors are columns and the form is `<u, v> = u^T J tau(v)`, linear in the
//! first variable. The adjoint is then `a* = tau(J^-1 a^T J)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Extension, Modulus, Prime, Quad, Rational, Ring, Scalar, Trunc};

/// The five standard families. `GeneralLinear` carries no form: its
/// anti-involution is the transpose and its Cayley map is `X -> 1 + X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Orthogonal,
    Symplectic,
    Hermitian,
    SkewHermitian,
    GeneralLinear,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::Orthogonal, Family::Symplectic, Family::Hermitian, Family::SkewHermitian, Family::GeneralLinear];

    pub fn needs_inert(self) -> bool {
        matches!(self, Family::Hermitian | Family::SkewHermitian)
    }

    pub fn sign(self) -> Sign {
        match self {
            Family::Symplectic | Family::SkewHermitian => Sign::Minus,
            _ => Sign::Plus,
        }
    }

    pub fn check_dim(self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        if self == Family::Symplectic && n % 2 == 1 {
            return Err(Error::Config(format!("symplectic spaces need even dimension, got {n}")));
        }
        Ok(())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Orthogonal => "orthogonal",
            Family::Symplectic => "symplectic",
            Family::Hermitian => "hermitian",
            Family::SkewHermitian => "skew-hermitian",
            Family::GeneralLinear => "general-linear",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "orthogonal" | "o" => Ok(Family::Orthogonal),
            "symplectic" | "sp" => Ok(Family::Symplectic),
            "hermitian" | "u" | "unitary" => Ok(Family::Hermitian),
            "skew-hermitian" | "skew" => Ok(Family::SkewHermitian),
            "general-linear" | "gl" => Ok(Family::GeneralLinear),
            _ => Err(Error::Config(format!("unknown family '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn apply<S: Ring>(self, s: S) -> S {
        match self {
            Sign::Plus => s,
            Sign::Minus => -s,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// A group element with its certified multiplier `mu(g)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElem<S: Scalar> {
    mat: Matrix<S>,
    mu: S::Base,
}

impl<S: Scalar> GroupElem<S> {
    pub fn mat(&self) -> &Matrix<S> {
        &self.mat
    }

    pub fn into_mat(self) -> Matrix<S> {
        self.mat
    }

    pub fn mu(&self) -> &S::Base {
        &self.mu
    }

    pub fn compose(&self, other: &GroupElem<S>) -> GroupElem<S> {
        GroupElem { mat: &self.mat * &other.mat, mu: self.mu.clone() * other.mu.clone() }
    }

    pub fn inverse(&self) -> GroupElem<S> {
        GroupElem {
            mat: self.mat.inverse().expect("certified elements are invertible"),
            mu: self.mu.inv().expect("multipliers are units"),
        }
    }

    /// Conjugation `self * g * self^-1`.
    pub fn conjugate(&self, g: &GroupElem<S>) -> GroupElem<S> {
        self.compose(g).compose(&self.inverse())
    }

    pub fn is_identity(&self) -> bool {
        self.mat.is_identity()
    }
}

/// A Lie algebra element with its certified `alpha(X)`, `X + X* = alpha`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LieElem<S: Scalar> {
    mat: Matrix<S>,
    alpha: S::Base,
}

impl<S: Scalar> LieElem<S> {
    pub fn mat(&self) -> &Matrix<S> {
        &self.mat
    }

    pub fn alpha(&self) -> &S::Base {
        &self.alpha
    }

    pub fn add(&self, other: &LieElem<S>) -> LieElem<S> {
        LieElem { mat: &self.mat + &other.mat, alpha: self.alpha.clone() + other.alpha.clone() }
    }

    /// Scaling by an element of F.
    pub fn scale(&self, c: &S::Base) -> LieElem<S> {
        let s = self.mat.proto().from_base_like(c.clone());
        LieElem { mat: self.mat.scale(&s), alpha: c.clone() * self.alpha.clone() }
    }
}

/// An epsilon-hermitian space (or the form-free general-linear model) with
/// its fixed anti-unitary involution `h: v -> H tau(v)`.
#[derive(Clone, Debug)]
pub struct HermitianSpace<S: Scalar> {
    family: Family,
    n: usize,
    prime: Prime,
    ext: Extension,
    sign: Sign,
    gram: Matrix<S>,
    gram_inv: Matrix<S>,
    h: Matrix<S>,
    h_inv: Matrix<S>,
}

impl<S: Scalar> HermitianSpace<S> {
    /// Accepts `gram` when it is invertible with `J = eps tau(J)^T`, and
    /// attaches the standard anti-unitary involution for `family`.
    pub fn validate(gram: Matrix<S>, sign: Sign, family: Family, prime: Prime) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::Dimension("Gram matrix must be square".into()));
        }
        let n = gram.rows();
        let gram_inv = gram.inverse().ok_or(Error::Singular)?;
        if family != Family::GeneralLinear {
            let twisted = gram.conj().transpose().map(|x| sign.apply(x.clone()));
            if twisted != gram {
                return Err(Error::SymmetryMismatch);
            }
        }
        let one = gram.proto().one_like();
        let candidates = [standard_h(family, n, &one), Matrix::identity(n, &one)];
        let space = HermitianSpace {
            family,
            n,
            prime,
            ext: one.extension(),
            sign,
            gram,
            gram_inv,
            h: candidates[1].clone(),
            h_inv: candidates[1].clone(),
        };
        for h in candidates {
            if let Ok(valid) = space.clone().with_anti_unitary(h) {
                return Ok(valid);
            }
        }
        Err(Error::NotFound("no standard anti-unitary involution for this Gram matrix".into()))
    }

    /// Replaces the fixed anti-unitary involution, after validating it.
    pub fn with_anti_unitary(mut self, h: Matrix<S>) -> Result<Self> {
        if h.rows() != self.n || !h.is_square() {
            return Err(Error::Dimension("anti-unitary matrix has the wrong size".into()));
        }
        if let Some((i, j)) = self.involution_defect(&h) {
            return Err(Error::NotInvolution(i, j));
        }
        if self.family != Family::GeneralLinear {
            let beta = self.proto().one_like().as_base().expect("one is tau-fixed");
            if let Some((i, j)) = self.anti_unitary_defect(&h, &beta) {
                return Err(Error::NotAntiUnitary(i, j));
            }
        }
        self.h_inv = h.inverse().ok_or(Error::Singular)?;
        self.h = h;
        Ok(self)
    }

    fn build_standard(family: Family, n: usize, prime: Prime, one: S) -> Result<Self> {
        family.check_dim(n)?;
        if family.needs_inert() != one.extension().is_inert() {
            return Err(Error::Config(format!(
                "family {family} requires a {} extension",
                if family.needs_inert() { "inert" } else { "split" }
            )));
        }
        let gram = standard_gram(family, n, &one);
        HermitianSpace::validate(gram, family.sign(), family, prime)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn ext(&self) -> Extension {
        self.ext
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn gram(&self) -> &Matrix<S> {
        &self.gram
    }

    /// Matrix `H` of the fixed anti-unitary involution `h(v) = H tau(v)`.
    pub fn h(&self) -> &Matrix<S> {
        &self.h
    }

    pub fn h_inv(&self) -> &Matrix<S> {
        &self.h_inv
    }

    pub fn proto(&self) -> &S {
        self.gram.proto()
    }

    pub fn one(&self) -> S {
        self.proto().one_like()
    }

    pub fn base_one(&self) -> S::Base {
        self.one().as_base().expect("one is tau-fixed")
    }

    pub fn scalar(&self, b: S::Base) -> S {
        self.proto().from_base_like(b)
    }

    pub fn identity(&self) -> Matrix<S> {
        Matrix::identity(self.n, self.proto())
    }

    pub fn zero(&self) -> Matrix<S> {
        Matrix::zeros(self.n, self.n, self.proto())
    }

    pub fn is_general_linear(&self) -> bool {
        self.family == Family::GeneralLinear
    }

    /// First entry `(i, j)` where `H tau(H) != 1`.
    pub(crate) fn involution_defect(&self, h: &Matrix<S>) -> Option<(usize, usize)> {
        first_difference(&(h * &h.conj()), &self.identity())
    }

    /// First basis pair where `<h e_i, h e_j> != beta <e_j, e_i>`, i.e. where
    /// `H^T J tau(H) != beta eps tau(J)`.
    pub(crate) fn anti_unitary_defect(&self, h: &Matrix<S>, beta: &S::Base) -> Option<(usize, usize)> {
        let lhs = &(&h.transpose() * &self.gram) * &h.conj();
        let rhs = self.gram.conj().map(|x| self.sign.apply(x.clone())).scale(&self.scalar(beta.clone()));
        first_difference(&lhs, &rhs)
    }

    /// `<u, v> = u^T J tau(v)`.
    pub fn inner(&self, u: &[S], v: &[S]) -> Result<S> {
        if self.is_general_linear() {
            return Err(Error::Precondition("the general-linear model carries no form".into()));
        }
        if u.len() != self.n || v.len() != self.n {
            return Err(Error::Dimension(format!(
                "vectors of length {} and {} in a space of dimension {}",
                u.len(),
                v.len(),
                self.n
            )));
        }
        let tv: Vec<S> = v.iter().map(Scalar::conj).collect();
        let jv = self.gram.apply(&tv);
        Ok(u.iter().zip(&jv).fold(self.proto().zero_like(), |acc, (a, b)| acc + a.clone() * b.clone()))
    }

    /// The adjoint `a* = tau(J^-1 a^T J)`; the transpose in the general-linear model.
    pub fn star(&self, a: &Matrix<S>) -> Matrix<S> {
        if self.is_general_linear() {
            return a.transpose();
        }
        (&(&self.gram_inv * &a.transpose()) * &self.gram).conj()
    }

    /// `mu(g)` with `g g* = mu`, certifying membership in GU(V). The
    /// general-linear model returns 1 for every invertible `g`.
    pub fn similitude_multiplier(&self, g: &Matrix<S>) -> Result<S::Base> {
        self.check_shape(g)?;
        if !g.is_invertible() {
            return Err(Error::Singular);
        }
        if self.is_general_linear() {
            return Ok(self.base_one());
        }
        match (g * &self.star(g)).base_scalar_value() {
            Some(mu) if mu.is_unit() => Ok(mu),
            _ => Err(Error::NotMember("GU(V)".into())),
        }
    }

    pub fn certify_group(&self, g: Matrix<S>) -> Result<GroupElem<S>> {
        let mu = self.similitude_multiplier(&g)?;
        Ok(GroupElem { mat: g, mu })
    }

    /// Certifies membership in U(V) (multiplier 1).
    pub fn certify_unitary(&self, g: Matrix<S>) -> Result<GroupElem<S>> {
        let elem = self.certify_group(g)?;
        if !elem.mu.is_one() {
            return Err(Error::NotMember("U(V)".into()));
        }
        Ok(elem)
    }

    /// `alpha(X)` with `X + X* = alpha`; zero certifies u(V). Every matrix is in
    /// the general-linear Lie algebra, where alpha is reported as 0.
    pub fn lie_alpha(&self, x: &Matrix<S>) -> Result<S::Base> {
        self.check_shape(x)?;
        if self.is_general_linear() {
            return Ok(self.base_one().zero_like());
        }
        (x + &self.star(x)).base_scalar_value().ok_or_else(|| Error::NotMember("gu(V)".into()))
    }

    pub fn certify_lie(&self, x: Matrix<S>) -> Result<LieElem<S>> {
        let alpha = self.lie_alpha(&x)?;
        Ok(LieElem { mat: x, alpha })
    }

    /// Certifies membership in u(V) (alpha = 0).
    pub fn certify_lie_unitary(&self, x: Matrix<S>) -> Result<LieElem<S>> {
        let elem = self.certify_lie(x)?;
        if !elem.alpha.is_zero() {
            return Err(Error::NotMember("u(V)".into()));
        }
        Ok(elem)
    }

    pub fn group_identity(&self) -> GroupElem<S> {
        GroupElem { mat: self.identity(), mu: self.base_one() }
    }

    pub fn lie_zero(&self) -> LieElem<S> {
        LieElem { mat: self.zero(), alpha: self.base_one().zero_like() }
    }

    /// `Ad(x) X = x X x^-1`, re-certified.
    pub fn ad(&self, x: &GroupElem<S>, y: &LieElem<S>) -> Result<LieElem<S>> {
        let m = &(x.mat() * y.mat()) * &x.inverse().mat;
        self.certify_lie(m)
    }

    fn check_shape(&self, m: &Matrix<S>) -> Result<()> {
        if m.rows() != self.n || m.cols() != self.n {
            return Err(Error::Dimension(format!(
                "{}x{} matrix in a space of dimension {}",
                m.rows(),
                m.cols(),
                self.n
            )));
        }
        Ok(())
    }

    /// Membership certificates built without re-checking, for callers that
    /// already hold the defining identity (e.g. truncated enumerations).
    pub(crate) fn group_elem_unchecked(&self, mat: Matrix<S>, mu: S::Base) -> GroupElem<S> {
        GroupElem { mat, mu }
    }

    pub(crate) fn lie_elem_unchecked(&self, mat: Matrix<S>, alpha: S::Base) -> LieElem<S> {
        LieElem { mat, alpha }
    }
}

fn first_difference<S: Ring>(a: &Matrix<S>, b: &Matrix<S>) -> Option<(usize, usize)> {
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if a.get(i, j) != b.get(i, j) {
                return Some((i, j));
            }
        }
    }
    None
}

fn standard_gram<S: Scalar>(family: Family, n: usize, one: &S) -> Matrix<S> {
    match family {
        Family::Orthogonal | Family::Hermitian | Family::GeneralLinear => Matrix::identity(n, one),
        Family::Symplectic => {
            let half = n / 2;
            let mut j = Matrix::zeros(n, n, one);
            for i in 0..half {
                j.set(i, half + i, one.clone());
                j.set(half + i, i, -one.clone());
            }
            j
        }
        Family::SkewHermitian => Matrix::scalar(n, one.generator_like().expect("inert extension")),
    }
}

/// `H = diag(1, .., 1, -1, .., -1)` for symplectic spaces, `H = 1` otherwise.
fn standard_h<S: Scalar>(family: Family, n: usize, one: &S) -> Matrix<S> {
    match family {
        Family::Symplectic => {
            let entries: Vec<S> = (0..n).map(|i| if i < n / 2 { one.clone() } else { -one.clone() }).collect();
            Matrix::diagonal(&entries)
        }
        _ => Matrix::identity(n, one),
    }
}

pub type ExactSpace = HermitianSpace<Quad<Rational>>;
pub type TruncSpace = HermitianSpace<Quad<Trunc>>;

impl HermitianSpace<Quad<Rational>> {
    /// The standard model over the rationals at the prime `p`.
    pub fn standard(family: Family, n: usize, prime: Prime) -> Result<Self> {
        let ext = if family.needs_inert() { Extension::inert(prime) } else { Extension::Split };
        Self::build_standard(family, n, prime, Quad::int(1, ext))
    }

    /// The same space over `o_E / p^N`; requires `J` and `H` to be integral
    /// with unit determinant.
    pub fn reduce(&self, modulus: Modulus) -> Result<HermitianSpace<Quad<Trunc>>> {
        let red = |m: &Matrix<Quad<Rational>>| m.try_map(|x| x.reduce(self.prime, modulus));
        let gram = red(&self.gram)?;
        let h = red(&self.h)?;
        let space = HermitianSpace {
            family: self.family,
            n: self.n,
            prime: self.prime,
            ext: self.ext,
            sign: self.sign,
            gram_inv: gram.inverse().ok_or(Error::Singular)?,
            gram,
            h_inv: h.inverse().ok_or(Error::Singular)?,
            h,
        };
        Ok(space)
    }

    pub fn parse_matrix(&self, text: &str) -> Result<Matrix<Quad<Rational>>> {
        let m = Matrix::<Quad<Rational>>::parse(text, self.ext)?;
        self.check_shape(&m)?;
        Ok(m)
    }

    pub fn int_matrix(&self, rows: &[&[i64]]) -> Matrix<Quad<Rational>> {
        Matrix::<Quad<Rational>>::from_ints(rows, self.ext)
    }

    pub fn rational(&self, r: Rational) -> Quad<Rational> {
        Quad::rational(r, self.ext)
    }
}

impl HermitianSpace<Quad<Trunc>> {
    /// The standard model over `o_E / p^N`.
    pub fn standard(family: Family, n: usize, modulus: Modulus) -> Result<Self> {
        let prime = modulus.prime();
        let ext = if family.needs_inert() { Extension::inert(prime) } else { Extension::Split };
        Self::build_standard(family, n, prime, Quad::<Trunc>::int_mod(1, ext, modulus))
    }

    pub fn modulus(&self) -> Modulus {
        self.proto().re().modulus()
    }

    pub fn parse_matrix(&self, text: &str) -> Result<Matrix<Quad<Trunc>>> {
        let m = Matrix::<Quad<Trunc>>::parse_mod(text, self.ext, self.modulus())?;
        self.check_shape(&m)?;
        Ok(m)
    }

    pub fn int_matrix(&self, rows: &[&[i64]]) -> Matrix<Quad<Trunc>> {
        Matrix::<Quad<Trunc>>::from_ints_mod(rows, self.ext, self.modulus())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    fn sp2() -> ExactSpace {
        ExactSpace::standard(Family::Symplectic, 2, p3()).unwrap()
    }

    fn herm(n: usize) -> ExactSpace {
        ExactSpace::standard(Family::Hermitian, n, p3()).unwrap()
    }

    #[test]
    fn validate_examples() {
        let split = Extension::Split;
        let i2 = Matrix::<Quad<Rational>>::from_ints(&[&[1, 0], &[0, 1]], split);
        let o = ExactSpace::validate(i2, Sign::Plus, Family::Orthogonal, p3()).unwrap();
        assert_eq!(o.family(), Family::Orthogonal);
        let j = Matrix::<Quad<Rational>>::from_ints(&[&[0, 1], &[-1, 0]], split);
        assert!(ExactSpace::validate(j, Sign::Minus, Family::Symplectic, p3()).is_ok());
        let bad = Matrix::<Quad<Rational>>::from_ints(&[&[0, 1], &[1, 0]], split);
        assert_eq!(
            ExactSpace::validate(bad, Sign::Minus, Family::Symplectic, p3()).unwrap_err(),
            Error::SymmetryMismatch
        );
        let singular = Matrix::<Quad<Rational>>::from_ints(&[&[1, 1], &[1, 1]], split);
        assert_eq!(ExactSpace::validate(singular, Sign::Plus, Family::Orthogonal, p3()).unwrap_err(), Error::Singular);
    }

    #[test]
    fn inner_examples() {
        let sp = sp2();
        let e1 = sp.int_matrix(&[&[1, 0]]).row(0).to_vec();
        let e2 = sp.int_matrix(&[&[0, 1]]).row(0).to_vec();
        assert_eq!(sp.inner(&e1, &e2).unwrap(), Quad::int(1, Extension::Split));
        assert_eq!(sp.inner(&e2, &e1).unwrap(), Quad::int(-1, Extension::Split));

        let h = herm(1);
        let ext = h.ext();
        let s = Quad::<Rational>::parse("s", ext).unwrap();
        let one = Quad::int(1, ext);
        assert_eq!(h.inner(std::slice::from_ref(&one), std::slice::from_ref(&one)).unwrap(), one);
        assert_eq!(h.inner(std::slice::from_ref(&s), std::slice::from_ref(&one)).unwrap(), s);
        assert_eq!(h.inner(std::slice::from_ref(&one), std::slice::from_ref(&s)).unwrap(), s.conj());
        assert!(h.inner(&[one.clone(), one.clone()], &[one]).is_err());
    }

    #[test]
    fn star_examples() {
        let sp = sp2();
        let a = sp.int_matrix(&[&[1, 2], &[3, 4]]);
        assert_eq!(sp.star(&a), sp.int_matrix(&[&[4, -2], &[-3, 1]]));
        assert_eq!(sp.star(&sp.identity()), sp.identity());
        let h = herm(2);
        let m = h.parse_matrix("s 0; 0 1").unwrap();
        assert_eq!(h.star(&m), h.parse_matrix("-s 0; 0 1").unwrap());
    }

    #[test]
    fn multiplier_examples() {
        let sp = sp2();
        let g = sp.int_matrix(&[&[1, 1], &[0, 1]]);
        assert_eq!(sp.similitude_multiplier(&g).unwrap(), Rational::one());
        let beta = Rational::new(5, 7);
        let d = sp.parse_matrix("1 0; 0 5/7").unwrap();
        assert_eq!(sp.similitude_multiplier(&d).unwrap(), beta);
        let h = herm(2);
        let g = h.int_matrix(&[&[1, 1], &[0, 1]]);
        assert_eq!(h.similitude_multiplier(&g).unwrap_err(), Error::NotMember("GU(V)".into()));
        let sing = sp.int_matrix(&[&[1, 1], &[1, 1]]);
        assert_eq!(sp.similitude_multiplier(&sing).unwrap_err(), Error::Singular);
    }

    #[test]
    fn alpha_examples() {
        let sp = sp2();
        assert_eq!(sp.lie_alpha(&sp.int_matrix(&[&[1, 1], &[0, 1]])).unwrap(), Rational::from_integer(2));
        assert_eq!(sp.lie_alpha(&sp.zero()).unwrap(), Rational::zero());
        assert_eq!(sp.lie_alpha(&sp.int_matrix(&[&[1, 2], &[3, 4]])).unwrap(), Rational::from_integer(5));
        let h = herm(2);
        assert!(h.lie_alpha(&h.int_matrix(&[&[1, 1], &[0, 1]])).is_err());
    }

    #[test]
    fn standard_models_validate() {
        for family in Family::ALL {
            let n = 2;
            let s = ExactSpace::standard(family, n, p3()).unwrap();
            assert_eq!(s.dim(), 2);
            let t = s.reduce(Modulus::new(p3(), 2).unwrap()).unwrap();
            assert_eq!(t.family(), family);
        }
        assert!(ExactSpace::standard(Family::Symplectic, 3, p3()).is_err());
    }

    #[test]
    fn rejects_bad_anti_unitary() {
        let sp = sp2();
        let err = sp.clone().with_anti_unitary(sp.identity()).unwrap_err();
        assert!(matches!(err, Error::NotAntiUnitary(_, _)));
    }
}
