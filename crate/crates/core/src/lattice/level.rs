use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{lie_elements, standard_lattices, Lattice, LieLattice};
use crate::cayley::cayley_gu1;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Modulus, Quad, Rational, Ring, Trunc};
use crate::space::{ExactSpace, GroupElem, LieElem, TruncSpace};

/// Default cap on the number of residues any level enumeration may visit.
pub const LEVEL_BUDGET: u128 = 1_000_000;

/// Requires `1 <= k < N`.
pub fn ensure_level(level: u32, modulus: Modulus) -> Result<()> {
    if level == 0 || level >= modulus.precision() {
        return Err(Error::Precision { level, precision: modulus.precision() });
    }
    Ok(())
}

/// Which congruence group is compared with the Cayley image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelVariant {
    /// `c(p^k L.) = (1 + p^k L^) ∩ GU(V)`.
    Similitude,
    /// `c(p^k L..) = (1 + p^k L^) ∩ U(V)`.
    Isometry,
}

impl LevelVariant {
    pub fn lattice(self) -> LieLattice {
        match self {
            LevelVariant::Similitude => LieLattice::Similitude,
            LevelVariant::Isometry => LieLattice::Isometry,
        }
    }
}

fn budget_check(p: u64, exponent: u64, budget: u128) -> Result<()> {
    let size = u128::from(p).checked_pow(exponent as u32).unwrap_or(u128::MAX);
    if exponent > 127 || size > budget {
        return Err(Error::Budget { size, budget });
    }
    Ok(())
}

/// Every residue `g = 1 + p^k Y` mod `p^N` in GU(V) (or U(V)), in canonical order.
pub fn congruence_members(
    space: &TruncSpace,
    level: u32,
    variant: LevelVariant,
) -> Result<Vec<GroupElem<Quad<Trunc>>>> {
    let modulus = space.modulus();
    ensure_level(level, modulus)?;
    let n = space.dim();
    let ext = space.ext();
    let coords = n * n * ext.degree();
    let digits = modulus.p().pow(modulus.precision() - level);
    budget_check(modulus.p(), u64::from(modulus.precision() - level) * coords as u64, LEVEL_BUDGET)?;
    let step = modulus.pow_p(level);
    let mut y = vec![0u64; coords];
    let mut out = Vec::new();
    loop {
        let v: Vec<Trunc> = y.iter().map(|&c| modulus.elem(c) * step).collect();
        let g = Matrix::unflatten(n, n, ext, &v).add_scalar(&space.one());
        if let Ok(elem) = space.certify_group(g) {
            if variant == LevelVariant::Similitude || elem.mu().is_one() {
                out.push(elem);
            }
        }
        if !odometer(&mut y, digits) {
            break;
        }
    }
    out.sort_by_key(|g| g.mat().key());
    Ok(out)
}

/// Advances `digits`-ary counter stored most significant first; false on wraparound.
fn odometer(counter: &mut [u64], base: u64) -> bool {
    for slot in counter.iter_mut().rev() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

/// A residue `X = p^l sum c_i b_i` of `p^l Λ` and its Cayley image.
#[derive(Clone, Debug)]
pub struct ImagePoint {
    pub coeffs: Vec<u64>,
    pub x: LieElem<Quad<Trunc>>,
    pub g: GroupElem<Quad<Trunc>>,
}

/// `X -> c(X)` over the distinct residues `X` of `p^l Λ` mod `p^N`, where
/// `Λ` is an integral lattice in gu(V). Sorted by the key of `X`.
pub fn cayley_image(exact: &ExactSpace, space: &TruncSpace, lattice: &Lattice, level: u32) -> Result<Vec<ImagePoint>> {
    let modulus = space.modulus();
    ensure_level(level, modulus)?;
    let prime = exact.prime();
    let n = space.dim();
    let ext = space.ext();
    let basis: Vec<Vec<Trunc>> = lattice
        .basis()
        .iter()
        .map(|v| v.iter().map(|x| prime.reduce(x, modulus)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let digits = modulus.p().pow(modulus.precision() - level);
    budget_check(modulus.p(), u64::from(modulus.precision() - level) * basis.len() as u64, LEVEL_BUDGET)?;
    let step = modulus.pow_p(level);
    let coords = lattice.ambient_dim();
    let mut counter = vec![0u64; basis.len()];
    let mut seen = BTreeMap::new();
    loop {
        let mut v = vec![modulus.elem(0); coords];
        for (b, &c) in basis.iter().zip(&counter) {
            let t = modulus.elem(c) * step;
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi = *vi + t * *bi;
            }
        }
        let m = Matrix::unflatten(n, n, ext, &v);
        let key = m.key();
        if let std::collections::btree_map::Entry::Vacant(e) = seen.entry(key) {
            let x = space.certify_lie(m)?;
            let g = cayley_gu1(space, &x)?;
            e.insert(ImagePoint { coeffs: counter.clone(), x, g });
        }
        if !odometer(&mut counter, digits) {
            break;
        }
    }
    Ok(seen.into_values().collect())
}

/// Outcome of comparing `c(p^k Λ)` with the level-k congruence group mod `p^N`.
#[derive(Clone, Debug, Serialize)]
pub struct LevelCheck {
    pub family: String,
    pub variant: LevelVariant,
    pub level: u32,
    pub precision: u32,
    pub domain_count: usize,
    pub image_count: usize,
    pub group_count: usize,
    pub set_equal: bool,
    pub injective: bool,
    pub alpha_integral: bool,
    pub mu_congruent: bool,
    /// First discrepancy, as canonical matrix text.
    pub counterexample: Option<String>,
}

impl LevelCheck {
    pub fn passed(&self) -> bool {
        self.set_equal && self.injective && self.alpha_integral && self.mu_congruent
    }
}

/// Verifies at precision `N` that the Cayley map is a bijection from
/// `p^k L.` onto `(1 + p^k L^) ∩ GU(V)` (or the isometry analogue), and the
/// bounds `alpha(X)` integral, `mu(g) = 1 mod p^k` on every element.
pub fn check_cayley_level(exact: &ExactSpace, level: u32, precision: u32, variant: LevelVariant) -> Result<LevelCheck> {
    let modulus = Modulus::new(exact.prime(), precision)?;
    ensure_level(level, modulus)?;
    let space = exact.reduce(modulus)?;
    let lattices = standard_lattices(exact)?;
    let lattice = lattices.lie(variant.lattice());
    let pairs = cayley_image(exact, &space, lattice, level)?;
    let members = congruence_members(&space, level, variant)?;

    let images: BTreeSet<Vec<u64>> = pairs.iter().map(|pt| pt.g.mat().key()).collect();
    let group: BTreeSet<Vec<u64>> = members.iter().map(|g| g.mat().key()).collect();
    let injective = images.len() == pairs.len();
    let set_equal = images == group;

    let mut counterexample = None;
    if !set_equal {
        let odd = images.symmetric_difference(&group).next().cloned();
        counterexample = odd.and_then(|k| {
            pairs.iter().map(|pt| &pt.g).chain(members.iter()).find(|g| g.mat().key() == k).map(|g| g.mat().to_string())
        });
    }

    // alpha is computed on the exact lattice point p^k sum c_i b_i, not on a residue lift
    let prime = exact.prime();
    let basis_alpha: Vec<Rational> = lie_elements(exact, lattice)?.into_iter().map(|b| b.alpha().clone()).collect();
    let exact_alpha = |coeffs: &[u64]| {
        coeffs
            .iter()
            .zip(&basis_alpha)
            .fold(Rational::zero(), |acc, (&c, a)| acc + Rational::from_integer(c as i64) * a.clone())
            * prime.power(i64::from(level))
    };
    let bad_alpha = pairs.iter().find(|pt| !prime.is_integral(&exact_alpha(&pt.coeffs)));
    let alpha_integral = bad_alpha.is_none();
    if let (Some(pt), None) = (bad_alpha, &counterexample) {
        counterexample = Some(pt.x.mat().to_string());
    }
    let congruent = |g: &GroupElem<Quad<Trunc>>| (*g.mu() - g.mu().one_like()).valuation() >= level;
    let mu_congruent = pairs.iter().all(|pt| congruent(&pt.g)) && members.iter().all(congruent);

    Ok(LevelCheck {
        family: exact.family().to_string(),
        variant,
        level,
        precision,
        domain_count: pairs.len(),
        image_count: images.len(),
        group_count: group.len(),
        set_equal,
        injective,
        alpha_integral,
        mu_congruent,
        counterexample,
    })
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
    fn congruence_counts() {
        let md = Modulus::new(p3(), 2).unwrap();
        let sp = TruncSpace::standard(Family::Symplectic, 2, md).unwrap();
        assert_eq!(congruence_members(&sp, 1, LevelVariant::Similitude).unwrap().len(), 81);
        let h = TruncSpace::standard(Family::Hermitian, 1, md).unwrap();
        let u1 = congruence_members(&h, 1, LevelVariant::Isometry).unwrap();
        assert_eq!(u1.len(), 3);
        assert!(u1.iter().all(|g| g.mat().get(0, 0).re().residue() == 1));
        assert!(matches!(congruence_members(&sp, 2, LevelVariant::Similitude), Err(Error::Precision { .. })));
    }

    #[test]
    fn level_bijection_small_cases() {
        let sp = ExactSpace::standard(Family::Symplectic, 2, p3()).unwrap();
        let check = check_cayley_level(&sp, 1, 2, LevelVariant::Similitude).unwrap();
        assert!(check.passed(), "{check:?}");
        assert_eq!((check.domain_count, check.group_count), (81, 81));
        let h = ExactSpace::standard(Family::Hermitian, 1, p3()).unwrap();
        let check = check_cayley_level(&h, 1, 2, LevelVariant::Isometry).unwrap();
        assert!(check.passed(), "{check:?}");
        assert_eq!((check.domain_count, check.group_count), (3, 3));
    }
}
