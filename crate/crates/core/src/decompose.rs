//! Partition of a coset `C = b c(p^l0 L)` into conjugate-theta-stable pieces,
//! computed with all group data reduced modulo `p^N`.
//!
//! The lattice `L(x) = Ad(x^-1) L ∩ L` of a residue `x` is computed from an
//! integral lift of `x`; since any lift lies in `GL_n(o_E)`, the result does
//! not depend on the lift. `K0` is the level-one congruence group and `K`
//! its stabiliser of `L`, so two theta-fixed residues share a `K`-coset iff
//! they agree modulo `p`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::involution::{find_symmetric_conjugator_mod, theta_group, theta_matrix, ConjugatorScope, SEARCH_BUDGET};
use crate::lattice::{cayley_image, ensure_level, standard_lattices, Lattice, LieLattice};
use crate::matrix::Matrix;
use crate::modlin;
use crate::scalar::{Modulus, Quad, Trunc};
use crate::space::{ExactSpace, GroupElem, TruncSpace};

type Elem = GroupElem<Quad<Trunc>>;
type Key = Vec<u64>;

/// The spaces and the fixed lattice `L` a decomposition runs against.
#[derive(Clone, Debug)]
pub struct DecompositionContext {
    exact: ExactSpace,
    space: TruncSpace,
    l_hat: Lattice,
    lattice: Lattice,
    scope: ConjugatorScope,
}

impl DecompositionContext {
    pub fn new(exact: ExactSpace, precision: u32, which: LieLattice, scope: ConjugatorScope) -> Result<Self> {
        let modulus = Modulus::new(exact.prime(), precision)?;
        let space = exact.reduce(modulus)?;
        let std = standard_lattices(&exact)?;
        let lattice = std.lie(which).clone();
        Ok(DecompositionContext { exact, space, l_hat: std.l_hat, lattice, scope })
    }

    pub fn exact(&self) -> &ExactSpace {
        &self.exact
    }

    pub fn space(&self) -> &TruncSpace {
        &self.space
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn precision(&self) -> u32 {
        self.space.modulus().precision()
    }

    /// `L(x)` for a residue `x` of an element of `GL_n(o_E)`.
    pub fn lattice_of_residue(&self, x: &Elem) -> Result<Lattice> {
        let lift = x.mat().lift();
        let inv = lift.inverse().ok_or(Error::Singular)?;
        let n = self.exact.dim();
        let ext = self.exact.ext();
        let moved = self.l_hat.map(self.l_hat.ambient_dim(), |v| {
            let m = Matrix::unflatten(n, n, ext, v);
            (&(&inv * &m) * &lift).flatten()
        });
        Ok(moved.intersect(&self.l_hat).intersect(&self.lattice))
    }

    /// Residues of `c(p^k Λ)`, as a key-indexed map.
    fn cayley_set(&self, lattice: &Lattice, level: u32) -> Result<BTreeMap<Key, Elem>> {
        let pts = cayley_image(&self.exact, &self.space, lattice, level)?;
        Ok(pts.into_iter().map(|pt| (pt.g.mat().key(), pt.g)).collect())
    }

    fn translate(&self, a: &Elem, set: &BTreeMap<Key, Elem>) -> BTreeMap<Key, Elem> {
        set.values()
            .map(|k| {
                let g = a.compose(k);
                (g.mat().key(), g)
            })
            .collect()
    }
}

/// The members of `b c(p^l0 L)` modulo `p^N`.
#[derive(Clone, Debug)]
pub struct CosetSet {
    base: Elem,
    level: u32,
    members: BTreeMap<Key, Elem>,
}

impl CosetSet {
    pub fn new(ctx: &DecompositionContext, base: Elem, level: u32) -> Result<Self> {
        ensure_level(level, ctx.space.modulus())?;
        let subgroup = ctx.cayley_set(&ctx.lattice, level)?;
        let members = ctx.translate(&base, &subgroup);
        Ok(CosetSet { base, level, members })
    }

    pub fn base(&self) -> &Elem {
        &self.base
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> impl Iterator<Item = &Elem> {
        self.members.values()
    }

    pub fn contains(&self, g: &Elem) -> bool {
        self.members.contains_key(&g.mat().key())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    /// Canonical text of the member whose neighborhood this is.
    pub a: String,
    pub x_a: String,
    /// The theta-fixed coset representative, absent for the single-piece case.
    pub d: Option<String>,
    pub level: u32,
}

/// A subset `S` with a witness `g` such that `theta(S) = g S g^-1`.
#[derive(Clone, Debug)]
pub struct Piece {
    members: BTreeMap<Key, Elem>,
    witness: Elem,
    provenance: Provenance,
}

impl Piece {
    pub fn members(&self) -> impl Iterator<Item = &Elem> {
        self.members.values()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn witness(&self) -> &Elem {
        &self.witness
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    fn keys(&self) -> BTreeSet<&Key> {
        self.members.keys().collect()
    }
}

/// `theta(S) = g S g^-1`, compared as residue sets.
pub fn verify_piece<'a>(space: &TruncSpace, members: impl IntoIterator<Item = &'a Elem>, g: &Elem) -> bool {
    let mut left = BTreeSet::new();
    let mut right = BTreeSet::new();
    for s in members {
        left.insert(theta_group(space, s).mat().key());
        right.insert(g.conjugate(s).mat().key());
    }
    left == right
}

fn check_symmetric(space: &TruncSpace, a: &Elem, x: &Elem) -> Result<()> {
    if theta_matrix(space, x.mat()) != *x.mat() {
        return Err(Error::Precondition(format!("{} is not theta-fixed", x.mat())));
    }
    if x.conjugate(a).mat() != theta_group(space, a).mat() {
        return Err(Error::Precondition(format!("{} does not conjugate a to theta(a)", x.mat())));
    }
    Ok(())
}

/// `a c(p^k L(x))` with witness `x a^-1`.
pub fn neighborhood(ctx: &DecompositionContext, a: &Elem, x: &Elem, level: u32) -> Result<Piece> {
    ensure_level(level, ctx.space.modulus())?;
    check_symmetric(&ctx.space, a, x)?;
    let lattice = ctx.lattice_of_residue(x)?;
    let subgroup = ctx.cayley_set(&lattice, level)?;
    Ok(Piece {
        members: ctx.translate(a, &subgroup),
        witness: x.compose(&a.inverse()),
        provenance: Provenance { a: a.mat().to_string(), x_a: x.mat().to_string(), d: None, level },
    })
}

/// `c(p^k L(x)) = x^-1 c(p^k L) x ∩ c(p^k L)` as residue sets.
pub fn check_subgroup_identity(ctx: &DecompositionContext, x: &Elem, level: u32) -> Result<bool> {
    let lhs = ctx.cayley_set(&ctx.lattice_of_residue(x)?, level)?;
    let full = ctx.cayley_set(&ctx.lattice, level)?;
    let inv = x.inverse();
    let conj: BTreeSet<Key> = full.values().map(|k| inv.conjugate(k).mat().key()).collect();
    let rhs: BTreeSet<&Key> = full.keys().filter(|k| conj.contains(*k)).collect();
    Ok(lhs.keys().collect::<BTreeSet<_>>() == rhs)
}

/// A `K`-coset of theta-fixed residues with its chosen level.
#[derive(Clone, Debug, Serialize)]
pub struct Bucket {
    pub d: String,
    pub level: u32,
    pub members: usize,
    pub lattice: String,
}

/// Run-time assertions of the construction.
#[derive(Clone, Debug, Default, Serialize)]
pub struct DecompositionChecks {
    pub partition: bool,
    pub witnesses: bool,
    pub nesting: bool,
    pub disjoint_or_nested: bool,
    pub lattice_by_coset: bool,
}

impl DecompositionChecks {
    pub fn all(&self) -> bool {
        self.partition && self.witnesses && self.nesting && self.disjoint_or_nested && self.lattice_by_coset
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub pieces: Vec<Piece>,
    pub buckets: Vec<Bucket>,
    pub neighborhoods: usize,
    pub checks: DecompositionChecks,
}

/// The least theta-fixed element of GU(V) congruent to `x` modulo `p`.
fn coset_representative(space: &TruncSpace, x: &Elem) -> Result<Elem> {
    let n = space.dim();
    let ext = space.ext();
    let modulus = space.modulus();
    let coords = n * n * ext.degree();
    let zero = modulus.elem(0);
    let top = modulus.pow_p(modulus.precision() - 1);
    let columns: Vec<Vec<Trunc>> = (0..coords)
        .map(|i| {
            let mut v = vec![zero; coords];
            v[i] = modulus.elem(1);
            let e = Matrix::unflatten(n, n, ext, &v);
            let mut col = (&theta_matrix(space, &e) - &e).flatten();
            col.extend(v.iter().map(|t| *t * top));
            col
        })
        .collect();
    let rows: Vec<Vec<Trunc>> = (0..columns[0].len()).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    let sols = modlin::solve_homogeneous(&rows, coords, modulus);
    let mut best: Option<Elem> = None;
    for w in sols.enumerate(SEARCH_BUDGET)? {
        let cand = x.mat() + &Matrix::unflatten(n, n, ext, &w);
        if best.as_ref().is_some_and(|b| b.mat().key() <= cand.key()) {
            continue;
        }
        if let Ok(g) = space.certify_group(cand) {
            best = Some(g);
        }
    }
    best.ok_or_else(|| Error::NotFound("theta-fixed coset representative".into()))
}

fn coset_key(x: &Elem, modulus: Modulus) -> Key {
    let m1 = Modulus::new(modulus.prime(), 1).expect("precision one");
    x.mat().map(|e| e.map(|t| t.truncate(m1))).key()
}

struct Neighborhood {
    keys: BTreeSet<Key>,
    piece: Piece,
}

/// Splits `C` into conjugate-theta-stable pieces.
pub fn decompose(ctx: &DecompositionContext, coset: &CosetSet) -> Result<Decomposition> {
    let space = &ctx.space;
    let modulus = space.modulus();

    if let Some(a) = coset.members().find(|a| theta_group(space, a).mat() == a.mat()) {
        let piece = Piece {
            members: coset.members.clone(),
            witness: a.inverse(),
            provenance: Provenance {
                a: a.mat().to_string(),
                x_a: space.identity().to_string(),
                d: None,
                level: coset.level,
            },
        };
        let witnesses = verify_piece(space, piece.members(), piece.witness());
        let checks = DecompositionChecks {
            partition: piece.members.len() == coset.len(),
            witnesses,
            nesting: true,
            disjoint_or_nested: true,
            lattice_by_coset: true,
        };
        return Ok(Decomposition { pieces: vec![piece], buckets: vec![], neighborhoods: 1, checks });
    }

    // choose x_a for every member and bucket by K-coset
    let mut conjugators: Vec<(Elem, Elem)> = Vec::with_capacity(coset.len());
    for a in coset.members() {
        let x = find_symmetric_conjugator_mod(space, a, ctx.scope)?;
        conjugators.push((a.clone(), x));
    }
    let mut reps: BTreeMap<Key, Elem> = BTreeMap::new();
    let mut bucket_of: Vec<Key> = Vec::with_capacity(conjugators.len());
    for (_, x) in &conjugators {
        let ck = coset_key(x, modulus);
        if !reps.contains_key(&ck) {
            reps.insert(ck.clone(), coset_representative(space, x)?);
        }
        bucket_of.push(ck);
    }

    // lattices L(d_i) and L(x_a), compared per member
    let mut lattice_cache: HashMap<Key, Lattice> = HashMap::new();
    let mut lattice_for = |x: &Elem| -> Result<Lattice> {
        let k = x.mat().key();
        if let Some(l) = lattice_cache.get(&k) {
            return Ok(l.clone());
        }
        let l = ctx.lattice_of_residue(x)?;
        lattice_cache.insert(k, l.clone());
        Ok(l)
    };
    let mut ordered: Vec<(&Key, &Elem)> = reps.iter().collect();
    ordered.sort_by_key(|(_, d)| d.mat().key());
    let mut levels: HashMap<Key, (u32, Lattice)> = HashMap::new();
    let mut buckets = Vec::new();
    let (mut prev_level, mut prev_lattice) = (coset.level, ctx.lattice.clone());
    for (ck, d) in &ordered {
        let lattice = lattice_for(d)?;
        let target = prev_lattice.scale(&ctx.exact.prime().power(i64::from(prev_level)));
        let level = (1..ctx.precision())
            .find(|&l| target.contains(&lattice.scale(&ctx.exact.prime().power(i64::from(l)))))
            .ok_or(Error::Precision { level: ctx.precision(), precision: ctx.precision() })?;
        let members = bucket_of.iter().filter(|b| b == ck).count();
        buckets.push(Bucket { d: d.mat().to_string(), level, members, lattice: lattice.to_string() });
        levels.insert((*ck).clone(), (level, lattice.clone()));
        prev_level = level;
        prev_lattice = lattice;
    }

    let mut lattice_by_coset = true;
    for ((_, x), ck) in conjugators.iter().zip(&bucket_of) {
        if lattice_for(x)? != levels[ck].1 {
            lattice_by_coset = false;
        }
    }

    // nesting of c(p^{l_i} L(d_i)) as residue sets
    let mut set_cache: HashMap<(Lattice, u32), BTreeMap<Key, Elem>> = HashMap::new();
    let mut subgroup = |lattice: &Lattice, level: u32| -> Result<BTreeMap<Key, Elem>> {
        let k = (lattice.clone(), level);
        if let Some(s) = set_cache.get(&k) {
            return Ok(s.clone());
        }
        let s = ctx.cayley_set(lattice, level)?;
        set_cache.insert(k, s.clone());
        Ok(s)
    };
    let mut nesting = true;
    let mut previous: BTreeSet<Key> = subgroup(&ctx.lattice, coset.level)?.into_keys().collect();
    for (ck, _) in &ordered {
        let (level, lattice) = &levels[*ck];
        let current: BTreeSet<Key> = subgroup(lattice, *level)?.into_keys().collect();
        nesting &= current.is_subset(&previous);
        previous = current;
    }

    // cover C by neighborhoods a c(p^{l_i} L(d_i))
    let mut covered: BTreeSet<Key> = BTreeSet::new();
    let mut hoods: Vec<Neighborhood> = Vec::new();
    for ((a, x), ck) in conjugators.iter().zip(&bucket_of) {
        let key = a.mat().key();
        if covered.contains(&key) {
            continue;
        }
        let (level, lattice) = &levels[ck];
        let members = ctx.translate(a, &subgroup(lattice, *level)?);
        let keys: BTreeSet<Key> = members.keys().cloned().collect();
        covered.extend(keys.iter().cloned());
        let piece = Piece {
            members,
            witness: x.compose(&a.inverse()),
            provenance: Provenance {
                a: a.mat().to_string(),
                x_a: x.mat().to_string(),
                d: Some(reps[ck].mat().to_string()),
                level: *level,
            },
        };
        hoods.push(Neighborhood { keys, piece });
    }

    let mut disjoint_or_nested = true;
    for (i, u) in hoods.iter().enumerate() {
        for v in &hoods[i + 1..] {
            let meets = !u.keys.is_disjoint(&v.keys);
            if meets && !u.keys.is_subset(&v.keys) && !v.keys.is_subset(&u.keys) {
                disjoint_or_nested = false;
            }
        }
    }
    let maximal: Vec<Piece> = hoods
        .iter()
        .enumerate()
        .filter(|(i, u)| {
            !hoods
                .iter()
                .enumerate()
                .any(|(j, v)| j != *i && u.keys.is_subset(&v.keys) && (u.keys.len() < v.keys.len() || j < *i))
        })
        .map(|(_, u)| u.piece.clone())
        .collect();

    let witnesses = maximal.iter().all(|p| verify_piece(space, p.members(), p.witness()));
    let checks = DecompositionChecks {
        partition: is_partition(&maximal, coset),
        witnesses,
        nesting,
        disjoint_or_nested,
        lattice_by_coset,
    };
    Ok(Decomposition { pieces: maximal, buckets, neighborhoods: hoods.len(), checks })
}

/// Pairwise disjoint, each inside `C`, union equal to `C`.
pub fn is_partition(pieces: &[Piece], coset: &CosetSet) -> bool {
    let mut seen: BTreeSet<&Key> = BTreeSet::new();
    for p in pieces {
        for k in p.keys() {
            if !coset.members.contains_key(k) || !seen.insert(k) {
                return false;
            }
        }
    }
    seen.len() == coset.len()
}
