use super::{integral_kernel, Lattice};
use crate::error::{Error, Result};
use crate::involution::theta_lie;
use crate::matrix::Matrix;
use crate::scalar::{Quad, Rational};
use crate::space::{ExactSpace, GroupElem, LieElem};

/// `L = o_E^n` in V, its stabiliser order `L^ = M_n(o_E)`, and the Lie
/// lattices `L. = L^ ∩ gu(V)` and `L.. = L^ ∩ u(V)`. V and End(V) are
/// flattened to coordinates over F.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardLattices {
    pub l: Lattice,
    pub l_hat: Lattice,
    pub l_dot: Lattice,
    pub l_ddot: Lattice,
}

impl StandardLattices {
    pub fn lie(&self, which: LieLattice) -> &Lattice {
        match which {
            LieLattice::Similitude => &self.l_dot,
            LieLattice::Isometry => &self.l_ddot,
        }
    }
}

/// Which Lie lattice plays the role of the fixed lattice in `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum LieLattice {
    /// `L. ⊂ gu(V)`.
    #[default]
    Similitude,
    /// `L.. ⊂ u(V)`.
    Isometry,
}

pub fn standard_lattices(space: &ExactSpace) -> Result<StandardLattices> {
    let prime = space.prime();
    let n = space.dim();
    let deg = space.ext().degree();
    let l = Lattice::standard(prime, n * deg);
    let h_image = l.map(n * deg, |v| {
        let col = Matrix::unflatten(n, 1, space.ext(), v);
        (space.h() * &col.conj()).flatten()
    });
    if h_image != l {
        return Err(Error::Precondition("h does not preserve the standard lattice".into()));
    }
    let l_hat = Lattice::standard(prime, n * n * deg);
    let (l_dot, l_ddot) = if space.is_general_linear() {
        (l_hat.clone(), l_hat.clone())
    } else {
        (lie_sublattice(space, &l_hat, false), lie_sublattice(space, &l_hat, true))
    };
    Ok(StandardLattices { l, l_hat, l_dot, l_ddot })
}

/// `L^ ∩ gu(V)` (or `∩ u(V)`) as the integral kernel of the linear
/// conditions `X + X* - (X + X*)_00 = 0` (or `X + X* = 0`).
fn lie_sublattice(space: &ExactSpace, l_hat: &Lattice, isometry: bool) -> Lattice {
    let n = space.dim();
    let ext = space.ext();
    let conditions: Vec<Vec<Rational>> = l_hat
        .basis()
        .iter()
        .map(|v| {
            let x = Matrix::unflatten(n, n, ext, v);
            let sum = &x + &space.star(&x);
            let cond = if isometry {
                sum
            } else {
                let corner = space.scalar(sum.get(0, 0).re().clone());
                sum.add_scalar(&-corner)
            };
            cond.flatten()
        })
        .collect();
    let rows = conditions[0].len();
    let kernel = integral_kernel(space.prime(), rows, conditions);
    let gens = kernel
        .into_iter()
        .map(|s| {
            (0..l_hat.ambient_dim())
                .map(|i| {
                    l_hat.basis().iter().zip(&s).fold(Rational::zero(), |acc, (b, si)| acc + b[i].clone() * si.clone())
                })
                .collect()
        })
        .collect();
    Lattice::span(space.prime(), l_hat.ambient_dim(), gens)
}

/// Basis matrices of a lattice in `End(V)`.
pub fn lie_basis(space: &ExactSpace, lattice: &Lattice) -> Vec<Matrix<Quad<Rational>>> {
    lattice.basis().iter().map(|v| Matrix::unflatten(space.dim(), space.dim(), space.ext(), v)).collect()
}

/// Basis elements of a lattice in `gu(V)`, certified.
pub fn lie_elements(space: &ExactSpace, lattice: &Lattice) -> Result<Vec<LieElem<Quad<Rational>>>> {
    lie_basis(space, lattice).into_iter().map(|m| space.certify_lie(m)).collect()
}

#[derive(Clone, Debug)]
pub enum Transform {
    Theta,
    Ad(GroupElem<Quad<Rational>>),
    /// Multiplication by `p^k`.
    Scale(i64),
}

pub fn transform_lattice(space: &ExactSpace, op: &Transform, lattice: &Lattice) -> Result<Lattice> {
    let dim = lattice.ambient_dim();
    let images: Vec<Vec<Rational>> = match op {
        Transform::Scale(k) => return Ok(lattice.scale(&space.prime().power(*k))),
        Transform::Theta => lie_elements(space, lattice)?.iter().map(|x| theta_lie(space, x).mat().flatten()).collect(),
        Transform::Ad(x) => {
            let inv = x.inverse();
            lie_basis(space, lattice).iter().map(|m| (&(x.mat() * m) * inv.mat()).flatten()).collect()
        }
    };
    Ok(Lattice::span(space.prime(), dim, images))
}

/// `L(x) = Ad(x^-1) L ∩ L`.
pub fn lattice_of_x(space: &ExactSpace, base: &Lattice, x: &GroupElem<Quad<Rational>>) -> Result<Lattice> {
    let moved = transform_lattice(space, &Transform::Ad(x.inverse()), base)?;
    Ok(moved.intersect(base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Prime;
    use crate::space::Family;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    #[test]
    fn symplectic_lattices() {
        let sp = ExactSpace::standard(Family::Symplectic, 2, p3()).unwrap();
        let std = standard_lattices(&sp).unwrap();
        assert_eq!(std.l_hat.rank(), 4);
        assert_eq!(std.l_dot, std.l_hat);
        assert_eq!(std.l_ddot.rank(), 3);
        for m in lie_basis(&sp, &std.l_ddot) {
            assert!(sp.certify_lie_unitary(m).is_ok());
        }
    }

    #[test]
    fn hermitian_rank_one() {
        let h = ExactSpace::standard(Family::Hermitian, 1, p3()).unwrap();
        let std = standard_lattices(&h).unwrap();
        assert_eq!(std.l_hat.rank(), 2);
        assert_eq!(std.l_dot, std.l_hat);
        let s = Quad::<Rational>::parse("s", h.ext()).unwrap();
        let expected = Lattice::span(p3(), 2, vec![Matrix::scalar(1, s).flatten()]);
        assert_eq!(std.l_ddot, expected);
    }

    #[test]
    fn lattice_of_x_examples() {
        let sp = ExactSpace::standard(Family::Symplectic, 2, p3()).unwrap();
        let base = standard_lattices(&sp).unwrap().l_dot;
        assert_eq!(lattice_of_x(&sp, &base, &sp.group_identity()).unwrap(), base);

        let d = sp.certify_group(sp.int_matrix(&[&[1, 0], &[0, 3]])).unwrap();
        let expected = Lattice::span(
            p3(),
            4,
            [[1, 0, 0, 0], [0, 3, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
                .iter()
                .map(|c| c.iter().map(|&v| Rational::from_integer(v)).collect())
                .collect(),
        );
        assert_eq!(lattice_of_x(&sp, &base, &d).unwrap(), expected);

        let w = sp.certify_group(sp.int_matrix(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(lattice_of_x(&sp, &base, &w).unwrap(), base);
    }

    #[test]
    fn transform_examples() {
        for family in crate::space::Family::ALL {
            let s = ExactSpace::standard(family, 2, p3()).unwrap();
            let std = standard_lattices(&s).unwrap();
            for l in [&std.l_dot, &std.l_ddot] {
                assert_eq!(transform_lattice(&s, &Transform::Theta, l).unwrap(), *l, "{family}");
                let scaled = transform_lattice(&s, &Transform::Scale(1), l).unwrap();
                assert!(l.contains(&scaled) && scaled != *l);
            }
        }
        let sp = ExactSpace::standard(Family::Symplectic, 2, p3()).unwrap();
        let base = standard_lattices(&sp).unwrap().l_dot;
        let d = sp.certify_group(sp.int_matrix(&[&[1, 0], &[0, 3]])).unwrap();
        let moved = transform_lattice(&sp, &Transform::Ad(d), &base).unwrap();
        // Ad(d) [[a,b],[c,d]] = [[a, b/3],[3c, d]]
        let expected = Lattice::span(
            p3(),
            4,
            vec![
                vec![Rational::one(), Rational::zero(), Rational::zero(), Rational::zero()],
                vec![Rational::zero(), Rational::new(1, 3), Rational::zero(), Rational::zero()],
                vec![Rational::zero(), Rational::zero(), Rational::from_integer(3), Rational::zero()],
                vec![Rational::zero(), Rational::zero(), Rational::zero(), Rational::one()],
            ],
        );
        assert_eq!(moved, expected);
    }
}
