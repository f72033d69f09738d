//! Exhaustive class-inversion check for small classical groups over finite
//! fields. For a finite group, `iota` is dualizing iff `iota(g)` is conjugate
//! to `g^-1` for every `g`.
//!
//! Groups are enumerated inside the standard spaces reduced modulo `p`, so
//! `F_q` is `F_p` and the unitary families live over `F_{p^2}`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::involution::{find_symmetric_conjugator, iota_group};
use crate::matrix::Matrix;
use crate::scalar::{Extension, Modulus, Prime, Quad, Ring, Trunc};
use crate::space::{Family, GroupElem, Sign, TruncSpace};

type Elem = GroupElem<Quad<Trunc>>;

/// Cap on the number of matrices enumerated while building a table.
pub const ORDER_BUDGET: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FiniteFamily {
    Sp,
    Gsp,
    U,
    Gu,
    /// Split orthogonal group, Gram `diag(1, .., 1, -1)`.
    OPlus,
    /// Orthogonal group of the identity form.
    OMinus,
    /// Orthogonal group of the identity form in odd dimension.
    O,
    /// `GL_n` with the inverse transpose.
    Gl,
}

impl FiniteFamily {
    pub const ALL: [FiniteFamily; 8] = [
        FiniteFamily::Sp,
        FiniteFamily::Gsp,
        FiniteFamily::U,
        FiniteFamily::Gu,
        FiniteFamily::OPlus,
        FiniteFamily::OMinus,
        FiniteFamily::O,
        FiniteFamily::Gl,
    ];

    fn space_family(self) -> Family {
        match self {
            FiniteFamily::Sp | FiniteFamily::Gsp => Family::Symplectic,
            FiniteFamily::U | FiniteFamily::Gu => Family::Hermitian,
            FiniteFamily::OPlus | FiniteFamily::OMinus | FiniteFamily::O => Family::Orthogonal,
            FiniteFamily::Gl => Family::GeneralLinear,
        }
    }

    /// Whether the table keeps every similitude rather than only isometries.
    pub fn is_similitude(self) -> bool {
        matches!(self, FiniteFamily::Gsp | FiniteFamily::Gu | FiniteFamily::Gl)
    }

    /// Display name of the group for the given field order.
    pub fn group_name(self, n: usize, p: u64) -> String {
        let q = if self.space_family().needs_inert() { p * p } else { p };
        let head = match self {
            FiniteFamily::Sp => "Sp",
            FiniteFamily::Gsp => "GSp",
            FiniteFamily::U => "U",
            FiniteFamily::Gu => "GU",
            FiniteFamily::OPlus => "O+",
            FiniteFamily::OMinus => "O-",
            FiniteFamily::O => "O",
            FiniteFamily::Gl => "GL",
        };
        format!("{head}_{n}({q})")
    }
}

impl fmt::Display for FiniteFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FiniteFamily::Sp => "sp",
            FiniteFamily::Gsp => "gsp",
            FiniteFamily::U => "u",
            FiniteFamily::Gu => "gu",
            FiniteFamily::OPlus => "o+",
            FiniteFamily::OMinus => "o-",
            FiniteFamily::O => "o",
            FiniteFamily::Gl => "gl",
        };
        f.write_str(s)
    }
}

impl FromStr for FiniteFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "sp" => FiniteFamily::Sp,
            "gsp" => FiniteFamily::Gsp,
            "u" => FiniteFamily::U,
            "gu" => FiniteFamily::Gu,
            "o+" | "o-plus" | "oplus" => FiniteFamily::OPlus,
            "o-" | "o-minus" | "ominus" => FiniteFamily::OMinus,
            "o" => FiniteFamily::O,
            "gl" | "gl-transpose" => FiniteFamily::Gl,
            _ => return Err(Error::Parse(format!("unknown finite group family {s:?}"))),
        })
    }
}

fn finite_space(family: FiniteFamily, n: usize, modulus: Modulus) -> Result<TruncSpace> {
    match family {
        FiniteFamily::OPlus | FiniteFamily::OMinus if n % 2 == 1 => {
            Err(Error::Config(format!("{family} needs even dimension")))
        }
        FiniteFamily::O if n.is_multiple_of(2) => Err(Error::Config("o needs odd dimension".into())),
        FiniteFamily::OPlus => {
            let one = Quad::<Trunc>::int_mod(1, Extension::Split, modulus);
            let diag: Vec<_> = (0..n).map(|i| if i + 1 == n { -one.clone() } else { one.clone() }).collect();
            let gram = Matrix::diagonal(&diag);
            let space = TruncSpace::validate(gram, Sign::Plus, Family::Orthogonal, modulus.prime())?;
            Ok(space)
        }
        _ => TruncSpace::standard(family.space_family(), n, modulus),
    }
}

/// All elements of a finite classical group, indexed, with `iota` attached.
#[derive(Clone, Debug)]
pub struct FiniteGroupTable {
    family: FiniteFamily,
    n: usize,
    p: u64,
    space: TruncSpace,
    elements: Vec<Elem>,
    index: HashMap<Vec<u64>, usize>,
    iota: Vec<usize>,
    inverse: Vec<usize>,
}

/// Enumerates every `g` with `g g* = mu` (with `mu = 1` for isometry groups).
pub fn build_group(family: FiniteFamily, n: usize, p: u64) -> Result<FiniteGroupTable> {
    let prime = Prime::new(p)?;
    let modulus = Modulus::new(prime, 1)?;
    let space = finite_space(family, n, modulus)?;
    let ext = space.ext();
    let coords = n * n * ext.degree();
    let size = u128::from(p).checked_pow(coords as u32).unwrap_or(u128::MAX);
    if size > ORDER_BUDGET {
        return Err(Error::Budget { size, budget: ORDER_BUDGET });
    }
    let mut digits = vec![0u64; coords];
    let mut elements = Vec::new();
    loop {
        let v: Vec<Trunc> = digits.iter().map(|&d| modulus.elem(d)).collect();
        let m = Matrix::unflatten(n, n, ext, &v);
        if let Ok(g) = space.certify_group(m) {
            if family.is_similitude() || g.mu().is_one() {
                elements.push(g);
            }
        }
        if !advance(&mut digits, p) {
            break;
        }
    }
    elements.sort_by_key(|g| g.mat().key());
    let index: HashMap<Vec<u64>, usize> = elements.iter().enumerate().map(|(i, g)| (g.mat().key(), i)).collect();
    let lookup = |g: &Elem| -> Result<usize> {
        index.get(&g.mat().key()).copied().ok_or_else(|| Error::NotMember(format!("{} left the table", g.mat())))
    };
    let iota = elements.iter().map(|g| lookup(&iota_group(&space, g))).collect::<Result<Vec<_>>>()?;
    let inverse = elements.iter().map(|g| lookup(&g.inverse())).collect::<Result<Vec<_>>>()?;
    Ok(FiniteGroupTable { family, n, p, space, elements, index, iota, inverse })
}

fn advance(digits: &mut [u64], base: u64) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

impl FiniteGroupTable {
    pub fn family(&self) -> FiniteFamily {
        self.family
    }

    pub fn name(&self) -> String {
        self.family.group_name(self.n, self.p)
    }

    pub fn space(&self) -> &TruncSpace {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn index_of(&self, g: &Elem) -> Option<usize> {
        self.index.get(&g.mat().key()).copied()
    }

    pub fn iota(&self, i: usize) -> usize {
        self.iota[i]
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }

    fn product(&self, i: usize, j: usize) -> usize {
        let g = self.elements[i].compose(&self.elements[j]);
        self.index_of(&g).expect("table is closed under products")
    }

    /// A generating set chosen greedily in table order.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut inside = vec![false; self.order()];
        let identity = self.index_of(&self.space.group_identity()).expect("identity");
        inside[identity] = true;
        let mut count = 1;
        for i in 0..self.order() {
            if count == self.order() {
                break;
            }
            if inside[i] {
                continue;
            }
            gens.push(i);
            // recompute the closure from scratch under the enlarged set
            inside.iter_mut().for_each(|b| *b = false);
            inside[identity] = true;
            let mut queue = VecDeque::from([identity]);
            count = 1;
            while let Some(g) = queue.pop_front() {
                for &s in &gens {
                    let h = self.product(g, s);
                    if !inside[h] {
                        inside[h] = true;
                        count += 1;
                        queue.push_back(h);
                    }
                }
            }
        }
        gens
    }

    /// Checks `iota(g s) = iota(g) iota(s)` for every `g` and generator `s`,
    /// which together with bijectivity makes `iota` an automorphism.
    pub fn iota_is_automorphism(&self, gens: &[usize]) -> bool {
        let bijective = self.iota_is_involution();
        bijective
            && (0..self.order()).all(|g| {
                gens.iter().all(|&s| self.iota[self.product(g, s)] == self.product(self.iota[g], self.iota[s]))
            })
    }

    pub fn iota_is_involution(&self) -> bool {
        (0..self.order()).all(|g| self.iota[self.iota[g]] == g)
    }

    /// `(|mu(G)|, |ker mu|)`.
    pub fn multiplier_counts(&self) -> (usize, usize) {
        let mut image: Vec<u64> = self.elements.iter().map(|g| g.mu().residue()).collect();
        image.sort_unstable();
        image.dedup();
        let kernel = self.elements.iter().filter(|g| g.mu().is_one()).count();
        (image.len(), kernel)
    }
}

/// Conjugacy classes with least members as representatives.
#[derive(Clone, Debug)]
pub struct ClassMap {
    representatives: Vec<usize>,
    class_of: Vec<usize>,
    sizes: Vec<usize>,
}

impl ClassMap {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    pub fn size(&self, class: usize) -> usize {
        self.sizes[class]
    }

    /// The permutation of classes induced by an element map.
    pub fn induced(&self, map: impl Fn(usize) -> usize) -> Vec<usize> {
        self.representatives.iter().map(|&r| self.class_of[map(r)]).collect()
    }
}

pub fn conjugacy_classes(table: &FiniteGroupTable) -> ClassMap {
    conjugacy_classes_with(table, &table.generators())
}

fn conjugacy_classes_with(table: &FiniteGroupTable, gens: &[usize]) -> ClassMap {
    let conj: Vec<(usize, usize)> = gens.iter().map(|&s| (s, table.inverse(s))).collect();
    let mut class_of = vec![usize::MAX; table.order()];
    let mut representatives = Vec::new();
    let mut sizes = Vec::new();
    for start in 0..table.order() {
        if class_of[start] != usize::MAX {
            continue;
        }
        let class = representatives.len();
        representatives.push(start);
        class_of[start] = class;
        let mut size = 1;
        let mut queue = VecDeque::from([start]);
        while let Some(g) = queue.pop_front() {
            for &(s, si) in &conj {
                let h = table.product(table.product(s, g), si);
                if class_of[h] == usize::MAX {
                    class_of[h] = class;
                    size += 1;
                    queue.push_back(h);
                }
            }
        }
        sizes.push(size);
    }
    ClassMap { representatives, class_of, sizes }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassStatus {
    Pass,
    Finding,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassRow {
    pub representative: String,
    pub size: usize,
    pub iota_class: usize,
    pub inverse_class: usize,
    pub status: ClassStatus,
    /// A theta-fixed `x` in the table with `x a x^-1 = theta(a)`.
    pub conjugator: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub group: String,
    pub family: FiniteFamily,
    pub dim: usize,
    pub p: u64,
    pub order: usize,
    pub class_count: usize,
    pub iota_automorphism: bool,
    pub iota_involution: bool,
    pub multiplier_image: usize,
    pub isometry_order: usize,
    pub multiplier_index_ok: bool,
    pub permutation_equal: bool,
    pub rows: Vec<ClassRow>,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.iota_automorphism
            && self.iota_involution
            && self.multiplier_index_ok
            && self.permutation_equal
            && self.rows.iter().all(|r| matches!(r.status, ClassStatus::Pass))
    }

    pub fn passing_classes(&self) -> usize {
        self.rows.iter().filter(|r| matches!(r.status, ClassStatus::Pass)).count()
    }
}

pub fn verify_class_inversion(table: &FiniteGroupTable) -> DualityReport {
    let gens = table.generators();
    let classes = conjugacy_classes_with(table, &gens);
    let by_iota = classes.induced(|i| table.iota(i));
    let by_inverse = classes.induced(|i| table.inverse(i));
    let (multiplier_image, isometry_order) = table.multiplier_counts();
    let rows = classes
        .representatives()
        .iter()
        .enumerate()
        .map(|(c, &r)| {
            let a = &table.elements[r];
            let conjugator = find_symmetric_conjugator(table.space(), a, table.elements.iter().cloned())
                .ok()
                .map(|x| x.mat().to_string());
            let ok = by_iota[c] == by_inverse[c] && conjugator.is_some();
            ClassRow {
                representative: a.mat().to_string(),
                size: classes.size(c),
                iota_class: by_iota[c],
                inverse_class: by_inverse[c],
                status: if ok { ClassStatus::Pass } else { ClassStatus::Finding },
                conjugator,
            }
        })
        .collect();
    DualityReport {
        group: table.name(),
        family: table.family,
        dim: table.n,
        p: table.p,
        order: table.order(),
        class_count: classes.len(),
        iota_automorphism: table.iota_is_automorphism(&gens),
        iota_involution: table.iota_is_involution(),
        multiplier_image,
        isometry_order,
        multiplier_index_ok: multiplier_image * isometry_order == table.order(),
        permutation_equal: by_iota == by_inverse,
        rows,
    }
}

/// The default list of groups checked by the finite-duality suite.
pub const DEFAULT_TARGETS: [(FiniteFamily, usize, u64); 9] = [
    (FiniteFamily::Sp, 2, 3),
    (FiniteFamily::Sp, 2, 5),
    (FiniteFamily::Gsp, 2, 3),
    (FiniteFamily::U, 2, 3),
    (FiniteFamily::Gu, 2, 3),
    (FiniteFamily::OPlus, 2, 3),
    (FiniteFamily::OMinus, 2, 3),
    (FiniteFamily::Gl, 2, 3),
    (FiniteFamily::Gl, 3, 3),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert_eq!(build_group(FiniteFamily::Sp, 2, 3).unwrap().order(), 24);
        assert_eq!(build_group(FiniteFamily::Gsp, 2, 3).unwrap().order(), 48);
        assert_eq!(build_group(FiniteFamily::U, 2, 3).unwrap().order(), 96);
        assert_eq!(build_group(FiniteFamily::Gl, 2, 3).unwrap().order(), 48);
        assert_eq!(build_group(FiniteFamily::OPlus, 2, 3).unwrap().order(), 4);
        assert_eq!(build_group(FiniteFamily::OMinus, 2, 3).unwrap().order(), 8);
    }

    #[test]
    fn class_counts() {
        let sl2 = build_group(FiniteFamily::Sp, 2, 3).unwrap();
        assert_eq!(conjugacy_classes(&sl2).len(), 7);
        let gl2 = build_group(FiniteFamily::Gsp, 2, 3).unwrap();
        assert_eq!(conjugacy_classes(&gl2).len(), 8);
        let o1 = build_group(FiniteFamily::O, 1, 3).unwrap();
        assert_eq!((o1.order(), conjugacy_classes(&o1).len()), (2, 2));
    }

    #[test]
    fn small_groups_pass() {
        for (family, n, p) in [(FiniteFamily::Sp, 2, 3), (FiniteFamily::Gl, 2, 3), (FiniteFamily::U, 2, 3)] {
            let report = verify_class_inversion(&build_group(family, n, p).unwrap());
            assert!(report.passed(), "{report:?}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(build_group(FiniteFamily::Gl, 4, 5), Err(Error::Budget { .. })));
        assert!(build_group(FiniteFamily::O, 2, 3).is_err());
    }
}
