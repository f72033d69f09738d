//! Anti-unitary maps, the involutions theta and iota, and the search for
//! theta-symmetric conjugators.
//!
//! A semilinear map is stored as its matrix `H` and acts by `v -> H tau(v)`.
//! For `g` in GU(V), `theta(g) = mu(g) H tau(g^-1) H^-1 = H tau(g*) H^-1`,
//! and `tau(g*) = J^-1 g^T J`, so theta is linear on matrices once restricted
//! to GU(V).

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::modlin;
use crate::scalar::{Quad, Ring, Scalar, Trunc};
use crate::space::{GroupElem, HermitianSpace, LieElem, TruncSpace};

/// What `validate_anti_unitary` requires of `H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AntiUnitaryMode {
    /// `<hv, hw> = <w, v>` and `h^2 = 1`.
    Involution,
    /// `<hv, hw> = beta <w, v>` for some `beta` in F.
    Similitude,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntiUnitaryMap<S: Scalar> {
    h: Matrix<S>,
    beta: S::Base,
}

impl<S: Scalar> AntiUnitaryMap<S> {
    pub fn matrix(&self) -> &Matrix<S> {
        &self.h
    }

    pub fn beta(&self) -> &S::Base {
        &self.beta
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        let tv: Vec<S> = v.iter().map(Scalar::conj).collect();
        self.h.apply(&tv)
    }

    /// The linear map `self o other`, i.e. `H1 tau(H2)`.
    pub fn compose(&self, other: &AntiUnitaryMap<S>) -> Matrix<S> {
        &self.h * &other.h.conj()
    }

    /// The linear map `h o h`.
    pub fn square(&self) -> Matrix<S> {
        self.compose(self)
    }
}

/// Checks that `v -> H tau(v)` is anti-unitary (an involution, or a
/// similitude with some factor beta). Failures name the first offending pair
/// of basis vectors.
pub fn validate_anti_unitary<S: Scalar>(
    space: &HermitianSpace<S>,
    h: &Matrix<S>,
    mode: AntiUnitaryMode,
) -> Result<AntiUnitaryMap<S>> {
    if !h.is_square() || h.rows() != space.dim() {
        return Err(Error::Dimension("anti-unitary matrix has the wrong size".into()));
    }
    if space.is_general_linear() {
        return Err(Error::Precondition("the general-linear model carries no form".into()));
    }
    let beta = match mode {
        AntiUnitaryMode::Involution => {
            if let Some((i, j)) = space.involution_defect(h) {
                return Err(Error::NotInvolution(i, j));
            }
            space.base_one()
        }
        AntiUnitaryMode::Similitude => similitude_factor(space, h)?,
    };
    if let Some((i, j)) = space.anti_unitary_defect(h, &beta) {
        return Err(Error::NotAntiUnitary(i, j));
    }
    Ok(AntiUnitaryMap { h: h.clone(), beta })
}

/// Reads beta off `H^T J tau(H) = beta eps tau(J)` at a unit entry of `J`.
fn similitude_factor<S: Scalar>(space: &HermitianSpace<S>, h: &Matrix<S>) -> Result<S::Base> {
    let lhs = &(&h.transpose() * space.gram()) * &h.conj();
    let rhs = space.gram().conj().map(|x| space.sign().apply(x.clone()));
    for i in 0..rhs.rows() {
        for j in 0..rhs.cols() {
            if let Some(inv) = rhs.get(i, j).inv() {
                let ratio = lhs.get(i, j).clone() * inv;
                return match ratio.as_base() {
                    Some(beta) if beta.is_unit() => Ok(beta),
                    _ => Err(Error::NotAntiUnitary(i, j)),
                };
            }
        }
    }
    Err(Error::NotAntiUnitary(0, 0))
}

/// `theta(g) = mu(g) H tau(g^-1) H^-1`, the transpose in the general-linear model.
pub fn theta_group<S: Scalar>(space: &HermitianSpace<S>, g: &GroupElem<S>) -> GroupElem<S> {
    let mat = theta_matrix(space, g.mat());
    space.group_elem_unchecked(mat, g.mu().clone())
}

/// theta on a matrix of GU(V), in its linear form `H J^-1 g^T J H^-1`.
pub fn theta_matrix<S: Scalar>(space: &HermitianSpace<S>, g: &Matrix<S>) -> Matrix<S> {
    if space.is_general_linear() {
        return g.transpose();
    }
    let tstar = space.star(g).conj();
    &(space.h() * &tstar) * space.h_inv()
}

/// `iota(g) = theta(g)^-1 = mu(g)^-1 H tau(g) H^-1`; the inverse transpose in
/// the general-linear model.
pub fn iota_group<S: Scalar>(space: &HermitianSpace<S>, g: &GroupElem<S>) -> GroupElem<S> {
    theta_group(space, g).inverse()
}

/// `theta X = alpha(X) - H tau(X) H^-1`; the transpose in the general-linear model.
pub fn theta_lie<S: Scalar>(space: &HermitianSpace<S>, x: &LieElem<S>) -> LieElem<S> {
    let mat = if space.is_general_linear() {
        x.mat().transpose()
    } else {
        let conj = &(space.h() * &x.mat().conj()) * space.h_inv();
        (-&conj).add_scalar(&space.scalar(x.alpha().clone()))
    };
    space.lie_elem_unchecked(mat, x.alpha().clone())
}

/// Where to look for a theta-symmetric conjugator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ConjugatorScope {
    /// Isometries only, as in the existence statement.
    Unitary,
    /// Any similitude.
    #[default]
    Similitude,
}

/// The first `x` in `candidates` with `theta(x) = x` and `x a x^-1 = theta(a)`.
/// Returns 1 whenever `a` is itself theta-fixed.
pub fn find_symmetric_conjugator<S, I>(
    space: &HermitianSpace<S>,
    a: &GroupElem<S>,
    candidates: I,
) -> Result<GroupElem<S>>
where
    S: Scalar,
    I: IntoIterator<Item = GroupElem<S>>,
{
    let ta = theta_group(space, a);
    if ta.mat() == a.mat() {
        return Ok(space.group_identity());
    }
    candidates
        .into_iter()
        .find(|x| is_symmetric_conjugator(space, a, &ta, x))
        .ok_or_else(|| Error::NotFound(format!("no theta-symmetric conjugator for {}", a.mat())))
}

fn is_symmetric_conjugator<S: Scalar>(
    space: &HermitianSpace<S>,
    a: &GroupElem<S>,
    ta: &GroupElem<S>,
    x: &GroupElem<S>,
) -> bool {
    theta_matrix(space, x.mat()) == *x.mat() && (x.mat() * a.mat()) == (ta.mat() * x.mat())
}

/// Checks both defining equations of a theta-symmetric conjugator.
pub fn verify_symmetric_conjugator<S: Scalar>(space: &HermitianSpace<S>, a: &GroupElem<S>, x: &GroupElem<S>) -> bool {
    is_symmetric_conjugator(space, a, &theta_group(space, a), x)
}

/// Default enumeration budget for solution sets mod p^N.
pub const SEARCH_BUDGET: u128 = 1 << 22;

/// The lexicographically least theta-symmetric conjugator of `a` modulo `p^N`.
///
/// Both conditions are linear in `x` once `x` lies in GU(V), so the candidate
/// set is the solution module of `x a = theta(a) x`, `theta(x) = x`; it is
/// enumerated and filtered to invertible similitudes (or isometries).
pub fn find_symmetric_conjugator_mod(
    space: &TruncSpace,
    a: &GroupElem<Quad<Trunc>>,
    scope: ConjugatorScope,
) -> Result<GroupElem<Quad<Trunc>>> {
    let ta = theta_group(space, a);
    if ta.mat() == a.mat() {
        return Ok(space.group_identity());
    }
    let mut best: Option<(Vec<u64>, GroupElem<Quad<Trunc>>)> = None;
    for x in symmetric_candidates(space, a, &ta)? {
        let Ok(elem) = space.certify_group(x) else { continue };
        if scope == ConjugatorScope::Unitary && !elem.mu().is_one() {
            continue;
        }
        let key = elem.mat().key();
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            best = Some((key, elem));
        }
    }
    best.map(|(_, x)| x)
        .ok_or_else(|| Error::NotFound(format!("no theta-symmetric conjugator for {} mod p^N", a.mat())))
}

/// All matrices `x` (not necessarily invertible) with `x a = theta(a) x` and
/// `H J^-1 x^T J H^-1 = x`.
fn symmetric_candidates(
    space: &TruncSpace,
    a: &GroupElem<Quad<Trunc>>,
    ta: &GroupElem<Quad<Trunc>>,
) -> Result<Vec<Matrix<Quad<Trunc>>>> {
    let n = space.dim();
    let ext = space.ext();
    let modulus = space.modulus();
    let proto = space.proto().re().zero_like();
    let coords = n * n * ext.degree();
    let basis: Vec<Matrix<Quad<Trunc>>> = (0..coords)
        .map(|i| {
            let mut v = vec![proto; coords];
            v[i] = proto.one_like();
            Matrix::unflatten(n, n, ext, &v)
        })
        .collect();
    let images: Vec<Vec<Trunc>> = basis
        .iter()
        .map(|e| {
            let comm = &(e * a.mat()) - &(ta.mat() * e);
            let sym = &theta_matrix(space, e) - e;
            let mut col = comm.flatten();
            col.extend(sym.flatten());
            col
        })
        .collect();
    let rows: Vec<Vec<Trunc>> = (0..images[0].len()).map(|i| images.iter().map(|col| col[i]).collect()).collect();
    let sols = modlin::solve_homogeneous(&rows, coords, modulus);
    Ok(sols.enumerate(SEARCH_BUDGET)?.into_iter().map(|v| Matrix::unflatten(n, n, ext, &v)).collect())
}

/// A factorisation `a = h1 h2` with `h1` an anti-unitary involution and `h2`
/// an anti-unitary similitude with `h2^2 = mu(a)`.
#[derive(Clone, Debug)]
pub struct Factorization<S: Scalar> {
    pub h1: AntiUnitaryMap<S>,
    pub h2: AntiUnitaryMap<S>,
    /// `h h1`, a theta-fixed isometry conjugating `a` to `theta(a)`.
    pub conjugator: GroupElem<S>,
}

/// Searches `a = h1 h2` with `h1 = y h` for `y` running over `unitaries`
/// (the identity is tried first). Every anti-unitary involution has this form.
pub fn factor_anti_unitary<S, I>(space: &HermitianSpace<S>, a: &GroupElem<S>, unitaries: I) -> Result<Factorization<S>>
where
    S: Scalar,
    I: IntoIterator<Item = GroupElem<S>>,
{
    if space.is_general_linear() {
        return Err(Error::Precondition("the general-linear model carries no form".into()));
    }
    let beta = a.mu().clone();
    let beta_one = space.identity().scale(&space.scalar(beta.clone()));
    let mut seen = HashSet::new();
    let first = std::iter::once(space.group_identity());
    for y in first.chain(unitaries) {
        if !seen.insert(y.mat().clone()) || !y.mu().is_one() {
            continue;
        }
        let h1 = y.mat() * space.h();
        let Ok(h1) = validate_anti_unitary(space, &h1, AntiUnitaryMode::Involution) else { continue };
        let h2 = h1.matrix() * &a.mat().conj();
        let Ok(h2) = validate_anti_unitary(space, &h2, AntiUnitaryMode::Similitude) else { continue };
        if *h2.beta() != beta || h2.square() != beta_one {
            continue;
        }
        let x = space.h() * &h1.matrix().conj();
        let conjugator = space.certify_unitary(x)?;
        return Ok(Factorization { h1, h2, conjugator });
    }
    Err(Error::NotFound(format!("no anti-unitary factorisation of {}", a.mat())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Modulus, Prime, Rational};
    use crate::space::{ExactSpace, Family};

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    fn sp2() -> ExactSpace {
        ExactSpace::standard(Family::Symplectic, 2, p3()).unwrap()
    }

    fn sp2_mod3() -> TruncSpace {
        TruncSpace::standard(Family::Symplectic, 2, Modulus::new(p3(), 1).unwrap()).unwrap()
    }

    /// All of GU(V) mod p^N in canonical order, by exhaustive residue scan.
    fn all_group(space: &TruncSpace) -> Vec<GroupElem<Quad<Trunc>>> {
        let md = space.modulus();
        let coords = space.dim() * space.dim() * space.ext().degree();
        let total = md.pn().pow(coords as u32);
        (0..total)
            .filter_map(|mut code| {
                let mut v = vec![md.elem(0); coords];
                for slot in v.iter_mut().rev() {
                    *slot = md.elem(code % md.pn());
                    code /= md.pn();
                }
                space.certify_group(Matrix::unflatten(space.dim(), space.dim(), space.ext(), &v)).ok()
            })
            .collect()
    }

    #[test]
    fn anti_unitary_examples() {
        let h = ExactSpace::standard(Family::Hermitian, 2, p3()).unwrap();
        assert!(validate_anti_unitary(&h, &h.identity(), AntiUnitaryMode::Involution).is_ok());
        let sp = sp2();
        let d = sp.int_matrix(&[&[1, 0], &[0, -1]]);
        assert!(validate_anti_unitary(&sp, &d, AntiUnitaryMode::Involution).is_ok());
        assert!(matches!(
            validate_anti_unitary(&sp, &sp.identity(), AntiUnitaryMode::Involution),
            Err(Error::NotAntiUnitary(_, _))
        ));
        let scaled = sp.int_matrix(&[&[2, 0], &[0, -1]]);
        let sim = validate_anti_unitary(&sp, &scaled, AntiUnitaryMode::Similitude).unwrap();
        assert_eq!(*sim.beta(), Rational::from_integer(2));
    }

    #[test]
    fn theta_examples() {
        let sp = sp2();
        let g = sp.certify_group(sp.int_matrix(&[&[1, 1], &[0, 1]])).unwrap();
        assert_eq!(theta_group(&sp, &g).mat(), g.mat());
        assert_eq!(*iota_group(&sp, &g).mat(), sp.int_matrix(&[&[1, -1], &[0, 1]]));
        let one = sp.group_identity();
        assert!(theta_group(&sp, &one).is_identity());

        let gl = ExactSpace::standard(Family::GeneralLinear, 2, p3()).unwrap();
        let g = gl.certify_group(gl.int_matrix(&[&[1, 2], &[3, 4]])).unwrap();
        assert_eq!(*theta_group(&gl, &g).mat(), gl.int_matrix(&[&[1, 3], &[2, 4]]));
    }

    #[test]
    fn theta_lie_examples() {
        let sp = sp2();
        let x = sp.certify_lie(sp.int_matrix(&[&[1, 1], &[0, 1]])).unwrap();
        assert_eq!(theta_lie(&sp, &x).mat(), x.mat());
        let z = sp.lie_zero();
        assert!(theta_lie(&sp, &z).mat().is_zero());
        let n = sp.certify_lie(sp.int_matrix(&[&[0, 1], &[0, 0]])).unwrap();
        assert_eq!(theta_lie(&sp, &n).mat(), n.mat());
    }

    #[test]
    fn conjugator_examples() {
        let sp = sp2_mod3();
        let a = sp.certify_group(sp.int_matrix(&[&[2, 0], &[0, 1]])).unwrap();
        let ta = theta_group(&sp, &a);
        assert_eq!(*ta.mat(), sp.int_matrix(&[&[1, 0], &[0, 2]]));
        let brute = find_symmetric_conjugator(&sp, &a, all_group(&sp)).unwrap();
        assert_eq!(*brute.mat(), sp.int_matrix(&[&[0, 1], &[1, 0]]));
        let fast = find_symmetric_conjugator_mod(&sp, &a, ConjugatorScope::Similitude).unwrap();
        assert_eq!(fast.mat(), brute.mat());

        let fixed = sp.certify_group(sp.int_matrix(&[&[1, 1], &[0, 1]])).unwrap();
        assert!(find_symmetric_conjugator_mod(&sp, &fixed, ConjugatorScope::Unitary).unwrap().is_identity());

        let gl = TruncSpace::standard(Family::GeneralLinear, 2, Modulus::new(p3(), 1).unwrap()).unwrap();
        let a = gl.certify_group(gl.int_matrix(&[&[1, 1], &[0, 1]])).unwrap();
        let x = find_symmetric_conjugator_mod(&gl, &a, ConjugatorScope::Similitude).unwrap();
        assert_eq!(*x.mat(), gl.int_matrix(&[&[0, 1], &[1, 0]]));
        assert_eq!(&(x.mat() * a.mat()) * &x.inverse().mat().clone(), a.mat().transpose());
    }

    #[test]
    fn modular_search_matches_brute_force() {
        for family in [Family::Symplectic, Family::Hermitian, Family::Orthogonal] {
            let md = Modulus::new(p3(), 1).unwrap();
            let space = TruncSpace::standard(family, 2, md).unwrap();
            let group = all_group(&space);
            for scope in [ConjugatorScope::Similitude, ConjugatorScope::Unitary] {
                let scoped: Vec<_> =
                    group.iter().filter(|g| scope == ConjugatorScope::Similitude || g.mu().is_one()).cloned().collect();
                for a in group.iter().step_by(7) {
                    let brute = find_symmetric_conjugator(&space, a, scoped.iter().cloned());
                    let fast = find_symmetric_conjugator_mod(&space, a, scope);
                    match (brute, fast) {
                        (Ok(b), Ok(f)) => assert_eq!(b.mat(), f.mat(), "{family} {}", a.mat()),
                        (Err(_), Err(_)) => {}
                        (b, f) => panic!("{family} {}: brute {b:?} fast {f:?}", a.mat()),
                    }
                }
            }
        }
    }

    #[test]
    fn factorization_of_identity_and_unipotent() {
        let sp = sp2_mod3();
        let one = sp.group_identity();
        let f = factor_anti_unitary(&sp, &one, std::iter::empty()).unwrap();
        assert_eq!(f.h1.matrix(), sp.h());
        assert_eq!(f.h2.matrix(), sp.h());

        let a = sp.certify_group(sp.int_matrix(&[&[1, 1], &[0, 1]])).unwrap();
        let unitaries: Vec<_> = all_group(&sp).into_iter().filter(|g| g.mu().is_one()).collect();
        let f = factor_anti_unitary(&sp, &a, unitaries).unwrap();
        assert_eq!(f.h1.compose(&f.h2), *a.mat());
        assert!(f.h1.square().is_identity());
        assert!(f.h2.square().is_identity());
        assert!(verify_symmetric_conjugator(&sp, &a, &f.conjugator));
    }
}
