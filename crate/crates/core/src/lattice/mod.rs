//! Lattices over the valuation ring `Z_(p)` inside `Q^m`, kept in a canonical
//! column-echelon normal form so that equality is structural.

mod level;
mod standard;

pub use level::{
    cayley_image, check_cayley_level, congruence_members, ensure_level, ImagePoint, LevelCheck, LevelVariant,
    LEVEL_BUDGET,
};
pub use standard::{
    lattice_of_x, lie_basis, lie_elements, standard_lattices, transform_lattice, LieLattice, StandardLattices,
    Transform,
};

use std::fmt;

use crate::scalar::{Prime, Rational, Ring};

/// An o_F-lattice given by basis columns in normal form: pivot rows strictly
/// increase, each pivot is a power of p, entries above a pivot vanish and
/// entries of earlier columns in a pivot row are reduced residues.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    prime: Prime,
    dim: usize,
    columns: Vec<Vec<Rational>>,
}

struct Echelon {
    /// `(pivot row, pivot valuation)` for each leading column.
    pivots: Vec<(usize, i64)>,
    columns: Vec<Vec<Rational>>,
}

/// Column echelon form over `Z_(p)` using unimodular column operations,
/// pivoting on the rows `0..rows`. Leading columns carry the pivots in order;
/// the remaining columns vanish on those rows.
fn echelon(prime: Prime, mut cols: Vec<Vec<Rational>>, rows: usize) -> Echelon {
    let mut pivots = Vec::new();
    let mut next = 0;
    for r in 0..rows {
        let best = (next..cols.len())
            .filter(|&j| !cols[j][r].is_zero())
            .min_by_key(|&j| prime.val(&cols[j][r]).finite().expect("nonzero"));
        let Some(j) = best else { continue };
        cols.swap(next, j);
        let v = prime.val(&cols[next][r]).finite().expect("nonzero");
        let unit = cols[next][r].clone() / prime.power(v);
        let unit_inv = Rational::one() / unit;
        for x in cols[next].iter_mut() {
            *x = x.clone() * unit_inv.clone();
        }
        let pivot = cols[next].clone();
        for col in cols.iter_mut().skip(next + 1) {
            if col[r].is_zero() {
                continue;
            }
            let f = col[r].clone() / prime.power(v);
            for (x, y) in col.iter_mut().zip(&pivot) {
                *x = x.clone() - f.clone() * y.clone();
            }
        }
        pivots.push((r, v));
        next += 1;
    }
    Echelon { pivots, columns: cols }
}

impl Lattice {
    /// The lattice spanned by `generators` (columns of length `dim`).
    pub fn span(prime: Prime, dim: usize, generators: Vec<Vec<Rational>>) -> Lattice {
        debug_assert!(generators.iter().all(|g| g.len() == dim));
        let Echelon { pivots, mut columns } = echelon(prime, generators, dim);
        columns.truncate(pivots.len());
        for (k, &(r, v)) in pivots.iter().enumerate() {
            let (earlier, rest) = columns.split_at_mut(k);
            let pivot = &rest[0];
            for col in earlier.iter_mut() {
                let rep = prime.residue_mod_power(&col[r], v);
                let q = (col[r].clone() - rep) / prime.power(v);
                if q.is_zero() {
                    continue;
                }
                for (x, y) in col.iter_mut().zip(pivot) {
                    *x = x.clone() - q.clone() * y.clone();
                }
            }
        }
        Lattice { prime, dim, columns }
    }

    /// The standard lattice `Z_(p)^dim`.
    pub fn standard(prime: Prime, dim: usize) -> Lattice {
        let cols = (0..dim).map(|j| (0..dim).map(|i| Rational::from_integer(i64::from(i == j))).collect()).collect();
        Lattice::span(prime, dim, cols)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.columns.len()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.columns
    }

    /// Image under a linear map given on vectors.
    pub fn map(&self, dim: usize, f: impl Fn(&[Rational]) -> Vec<Rational>) -> Lattice {
        Lattice::span(self.prime, dim, self.columns.iter().map(|c| f(c)).collect())
    }

    pub fn scale(&self, c: &Rational) -> Lattice {
        self.map(self.dim, |v| v.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        let mut cols = self.columns.clone();
        cols.extend(other.columns.iter().cloned());
        Lattice::span(self.prime, self.dim, cols)
    }

    pub fn contains(&self, other: &Lattice) -> bool {
        self.sum(other) == *self
    }

    pub fn contains_vector(&self, v: &[Rational]) -> bool {
        self.sum(&Lattice::span(self.prime, self.dim, vec![v.to_vec()])) == *self
    }

    pub fn intersect(&self, other: &Lattice) -> Lattice {
        let r1 = self.rank();
        let mut stacked = Vec::with_capacity(r1 + other.rank());
        for c in &self.columns {
            stacked.push(c.clone());
        }
        for c in &other.columns {
            stacked.push(c.iter().map(|x| -x.clone()).collect());
        }
        let kernel = integral_kernel(self.prime, self.dim, stacked);
        let gens = kernel
            .iter()
            .map(|s| {
                (0..self.dim)
                    .map(|i| {
                        self.columns
                            .iter()
                            .zip(&s[..r1])
                            .fold(Rational::zero(), |acc, (c, si)| acc + c[i].clone() * si.clone())
                    })
                    .collect()
            })
            .collect();
        Lattice::span(self.prime, self.dim, gens)
    }

    /// Sum of pivot valuations: for lattices of equal rank in the same
    /// subspace this is the log-index against the standard lattice.
    pub fn volume(&self) -> i64 {
        let e = echelon(self.prime, self.columns.clone(), self.dim);
        e.pivots.iter().map(|&(_, v)| v).sum()
    }
}

/// A `Z_(p)`-basis of `{ s in Z_(p)^k : sum s_j a_j = 0 }` for column vectors
/// `a_j` of length `rows`.
pub fn integral_kernel(prime: Prime, rows: usize, columns: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let k = columns.len();
    let augmented: Vec<Vec<Rational>> = columns
        .into_iter()
        .enumerate()
        .map(|(j, mut c)| {
            c.extend((0..k).map(|i| Rational::from_integer(i64::from(i == j))));
            c
        })
        .collect();
    let e = echelon(prime, augmented, rows);
    e.columns.into_iter().skip(e.pivots.len()).map(|c| c[rows..].to_vec()).collect()
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.dim)
            .map(|i| self.columns.iter().map(|c| c[i].to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
