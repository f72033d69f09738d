//! The named checks run by the suites. Each check is a pure function of its
//! context and a sample index, which is what makes replay possible.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use rand_chacha::ChaCha8Rng;

use super::sample;
use super::{GroupSpec, Suite};
use crate::cayley::{cayley_gu1, fiber, fiber_mod, in_domain, in_gu1, x_lambda, FiberCase, FiberResult};
use crate::decompose::{decompose, verify_piece, CosetSet, DecompositionContext};
use crate::error::{Error, Result};
use crate::finite::{build_group, verify_class_inversion, ClassStatus};
use crate::involution::{iota_group, theta_group, theta_lie, ConjugatorScope, SEARCH_BUDGET};
use crate::lattice::{
    check_cayley_level, lattice_of_x, standard_lattices, transform_lattice, LevelVariant, LieLattice, StandardLattices,
    Transform,
};
use crate::matrix::Matrix;
use crate::modlin;
use crate::scalar::{Modulus, Prime, Quad, Rational, Ring, Trunc};
use crate::space::{ExactSpace, Family, GroupElem, TruncSpace};

/// Everything a check may read: one target family plus run parameters.
pub struct Ctx {
    pub family: Family,
    pub dim: usize,
    pub prime: Prime,
    pub precision: u32,
    pub level: u32,
    pub seed: u64,
    pub groups: Vec<GroupSpec>,
    exact: ExactSpace,
    lattices: OnceLock<StandardLattices>,
    decomposition: OnceLock<DecompositionContext>,
}

impl Ctx {
    pub fn new(
        family: Family,
        dim: usize,
        prime: Prime,
        precision: u32,
        level: u32,
        seed: u64,
        groups: Vec<GroupSpec>,
    ) -> Result<Self> {
        let exact = ExactSpace::standard(family, dim, prime)?;
        Ok(Ctx {
            family,
            dim,
            prime,
            precision,
            level,
            seed,
            groups,
            exact,
            lattices: OnceLock::new(),
            decomposition: OnceLock::new(),
        })
    }

    pub fn target(&self) -> String {
        format!("{}/{}", self.family, self.dim)
    }

    pub fn exact(&self) -> &ExactSpace {
        &self.exact
    }

    fn lattices(&self) -> Result<&StandardLattices> {
        if let Some(l) = self.lattices.get() {
            return Ok(l);
        }
        let l = standard_lattices(&self.exact)?;
        Ok(self.lattices.get_or_init(|| l))
    }

    fn modulus(&self) -> Result<Modulus> {
        Modulus::new(self.prime, self.precision)
    }

    fn truncated(&self) -> Result<TruncSpace> {
        self.exact.reduce(self.modulus()?)
    }

    fn decomposition(&self) -> Result<&DecompositionContext> {
        if let Some(c) = self.decomposition.get() {
            return Ok(c);
        }
        let c = DecompositionContext::new(
            self.exact.clone(),
            self.precision,
            LieLattice::Similitude,
            ConjugatorScope::Similitude,
        )?;
        Ok(self.decomposition.get_or_init(|| c))
    }

    fn rng(&self, check: &str, index: u64) -> ChaCha8Rng {
        sample::rng_for(self.seed, check, &self.target(), index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail { input: String, message: String },
    Finding { input: String, message: String },
}

impl Outcome {
    fn fail(input: impl ToString, message: impl Into<String>) -> Outcome {
        Outcome::Fail { input: input.to_string(), message: message.into() }
    }

    fn check(ok: bool, input: impl ToString, message: impl Into<String>) -> Outcome {
        if ok {
            Outcome::Pass
        } else {
            Outcome::fail(input, message)
        }
    }
}

/// How many indices a check runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arity {
    Samples,
    Once,
    Cosets,
    Groups,
}

type CheckFn = fn(&Ctx, u64) -> Result<Outcome>;

pub struct CheckDef {
    pub name: &'static str,
    pub suite: Suite,
    pub arity: Arity,
    run: CheckFn,
}

impl CheckDef {
    /// Runs one index; errors become failures carrying the error text.
    pub fn run(&self, ctx: &Ctx, index: u64) -> Outcome {
        match (self.run)(ctx, index) {
            Ok(o) => o,
            Err(e) => Outcome::fail(format!("index {index}"), e.to_string()),
        }
    }
}

pub const CHECKS: &[CheckDef] = &[
    CheckDef { name: "theta-involution", suite: Suite::Identity, arity: Arity::Samples, run: theta_involution },
    CheckDef { name: "iota-homomorphism", suite: Suite::Identity, arity: Arity::Samples, run: iota_homomorphism },
    CheckDef { name: "star-adjoint", suite: Suite::Identity, arity: Arity::Samples, run: star_adjoint },
    CheckDef { name: "theta-lie", suite: Suite::Identity, arity: Arity::Samples, run: theta_lie_check },
    CheckDef { name: "multiplier-identity", suite: Suite::Cayley, arity: Arity::Samples, run: multiplier_identity },
    CheckDef { name: "cayley-round-trip", suite: Suite::Cayley, arity: Arity::Samples, run: cayley_round_trip },
    CheckDef { name: "fiber-cases", suite: Suite::Fiber, arity: Arity::Samples, run: fiber_cases },
    CheckDef { name: "fiber-exhaustive", suite: Suite::Fiber, arity: Arity::Once, run: fiber_exhaustive },
    CheckDef { name: "level-similitude", suite: Suite::Level, arity: Arity::Once, run: level_similitude },
    CheckDef { name: "level-isometry", suite: Suite::Level, arity: Arity::Once, run: level_isometry },
    CheckDef { name: "theta-cayley", suite: Suite::Hypothesis, arity: Arity::Samples, run: theta_cayley },
    CheckDef { name: "ad-cayley", suite: Suite::Hypothesis, arity: Arity::Samples, run: ad_cayley },
    CheckDef { name: "domain-theta", suite: Suite::Hypothesis, arity: Arity::Samples, run: domain_theta },
    CheckDef { name: "domain-ad", suite: Suite::Hypothesis, arity: Arity::Samples, run: domain_ad },
    CheckDef { name: "theta-lattice", suite: Suite::Hypothesis, arity: Arity::Once, run: theta_lattice },
    CheckDef { name: "lattice-in-domain", suite: Suite::Hypothesis, arity: Arity::Samples, run: lattice_in_domain },
    CheckDef { name: "lattice-theta-fixed", suite: Suite::Lattice, arity: Arity::Samples, run: lattice_theta_fixed },
    CheckDef { name: "lattice-coset", suite: Suite::Lattice, arity: Arity::Samples, run: lattice_coset },
    CheckDef {
        name: "decomposition-examples",
        suite: Suite::Decomposition,
        arity: Arity::Once,
        run: decomposition_examples,
    },
    CheckDef {
        name: "decomposition-coset",
        suite: Suite::Decomposition,
        arity: Arity::Cosets,
        run: decomposition_coset,
    },
    CheckDef { name: "class-inversion", suite: Suite::FiniteDuality, arity: Arity::Groups, run: class_inversion },
];

pub fn find_check(name: &str) -> Option<&'static CheckDef> {
    CHECKS.iter().find(|c| c.name == name)
}

pub fn checks_for(suite: Suite) -> impl Iterator<Item = &'static CheckDef> {
    CHECKS.iter().filter(move |c| c.suite == suite)
}

type G = GroupElem<Quad<Rational>>;

fn theta_involution(ctx: &Ctx, i: u64) -> Result<Outcome> {
    let s = ctx.exact();
    let g = sample::group(s, &mut ctx.rng("theta-involution", i))?;
    let back = theta_group(s, &theta_group(s, &g));
    Ok(Outcome::check(back.mat() == g.mat(), g.mat(), "theta(theta(g)) != g"))
}

fn iota_homomorphism(ctx: &Ctx, i: u64) -> Result<Outcome> {
    let s = ctx.exact();
    let mut rng = ctx.rng("iota-homomorphism", i);
    let g = sample::group(s, &mut rng)?;
    let h = sample::group(s, &mut rng)?;
    let lhs = iota_group(s, &g.compose(&h));
    let rhs = iota_group(s, &g).compose(&iota_group(s, &h));
    let input = format!("g = {}, h = {}", g.mat(), h.mat());
    Ok(Outcome::check(lhs.mat() == rhs.mat() && lhs.mu() == rhs.mu(), input, "iota(gh) != iota(g) iota(h)"))
}

fn star_adjoint(ctx: &Ctx, i: u64) -> Result<Outcome> {
    let s = ctx.exact();
    let mut rng = ctx.rng("star-adjoint", i);
    let a = sample::matrix(s, &mut rng, (-1, 1));
    if s.star(&s.star(&a)) != a {
        return Ok(Outcome::fail(&a, "star is not an involution"));
    }
    if s.is_general_linear() {
        return Ok(Outcome::Pass);
    }
    let u = sample::matrix(s, &mut rng, (-1, 1));
    let v = sample::matrix(s, &mut rng, (-1, 1));
    let (u, v) = (u.row(0).to_vec(), v.row(0).to_vec());
    let lhs = s.inner(&a.apply(&u), &v)?;
    let rhs = s.inner(&u, &s.star(&a).apply(&v))?;
    Ok(Outcome::check(lhs == rhs, &a, "<Au, v> != <u, A* v>"))
}

fn theta_lie_check(ctx: &Ctx, i: u64) -> Result<Outcome> {
    let s = ctx.exact();
    let x = sample::lie(s, &mut ctx.rng("theta-lie", i), (-1, 1), None)?;
    let tx = theta_lie(s, &x);
    let certified = s.certify_lie(tx.mat().clone())?;
    let ok = theta_lie(s, &tx).mat() == x.mat() && certified.alpha() == x.alpha() && tx.alpha() == x.alpha();
    Ok(Outcome::check(ok, x.mat(), "theta on gu(V) is not an alpha-preserving involution"))
}

fn multiplier_identity(ctx: &Ctx, i: u64) -> Result<Outcome> {
    let s = ctx.exact();
    let x = sample::domain_lie(s, &mut ctx.rng("multiplier-identity", i), None)?;
    let g = cayley_gu1(s, &x)?;
    let lambda = (Rational::one() + x.alpha().clone()).inv().ok_or(Error::Singular)?;
    let expected = if s.is_general_linear() { Rational::one() } else { lambda.clone() * lambda };
    Ok(Outcome::check(*g.mu() == expected, x.mat(), format!("mu(c(X)) = {} but (1+alpha)^-2 = {expected}", g.mu())))
}

fn cayley_round_trip(ctx: &Ctx, i: u64) -> Result<Outcome> {
    let s = ctx.exact();
    let x = sample::domain_lie(s, &mut ctx.rng("cayley-round-trip", i), None)?;
    let g = cayley_gu1(s, &x)?;
    if !s.is_general_linear() && *x.alpha() == Rational::from_integer(-2) {
        return Ok(Outcome::check(g.is_identity(), x.mat(), "alpha = -2 but c(X) != 1"));
    }
    let lambda = if s.is_general_linear() {
        Rational::one()
    } else {
        (Rational::one() + x.alpha().clone()).inv().ok_or(Error::Singular)?
    };
    let back = x_lambda(s, &g, &lambda)?;
    Ok(Outcome::check(back.mat() == x.mat(), x.mat(), "X_lambda(c(X)) != X"))
}

/// Samples cycle through generic `alpha`, `alpha = 0` (so `mu = 1`) and
/// `alpha = -2` (which `c` sends to 1).
fn fiber_cases(ctx: &Ctx, i: u64) -> Result<Outcome> {
    let s = ctx.exact();
    let alpha = match i % 4 {
        1 => Some(Rational::zero()),
        3 => Some(Rational::from_integer(-2)),
        _ => None,
    };
    let x = sample::domain_lie(s, &mut ctx.rng("fiber-cases", i), alpha)?;
    let g = cayley_gu1(s, &x)?;
    let fib = fiber(s, &g)?;
    Ok(match fiber_consistency(s, &x, &g, &fib) {
        None => Outcome::Pass,
        Some(msg) => Outcome::fail(x.mat(), msg),
    })
}

fn fiber_consistency(
    s: &ExactSpace,
    x: &crate::space::LieElem<Quad<Rational>>,
    g: &G,
    fib: &FiberResult<Quad<Rational>>,
) -> Option<String> {
    for pre in &fib.preimages {
        match cayley_gu1(s, &pre.x) {
            Ok(h) if h.mat() == g.mat() => {}
            _ => return Some(format!("preimage {} does not map back to g", pre.x.mat())),
        }
    }
    if s.is_general_linear() {
        let ok = fib.case == FiberCase::UniqueMu1 && fib.preimages.len() == 1 && fib.preimages[0].x.mat() == x.mat();
        return (!ok).then(|| format!("general-linear fiber reported as {}", fib.case));
    }
    if g.is_identity() {
        let ok = fib.case == FiberCase::InfiniteIdentity && FiberResult::identity_predicate(s, x);
        return (!ok).then(|| format!("g = 1 reported as {} or X outside the identity fiber", fib.case));
    }
    if !fib.preimages.iter().any(|p| p.x.mat() == x.mat()) {
        return Some(format!("X missing from the fiber ({})", fib.case));
    }
    if g.mu().is_one() {
        let ok = fib.case == FiberCase::UniqueMu1 && fib.preimages.len() == 1;
        return (!ok).then(|| format!("mu = 1 fiber reported as {} with {} preimages", fib.case, fib.preimages.len()));
    }
    let invertible =
        fib.lambdas.iter().filter(|l| g.mat().add_scalar(&s.rational((*l).clone())).is_invertible()).count();
    let expected = if invertible == 2 { FiberCase::TwoPreimages } else { FiberCase::UniqueLambda };
    let ok = fib.case == expected && fib.preimages.len() == invertible;
    (!ok).then(|| format!("fiber reported {} with {} preimages, expected {expected}", fib.case, fib.preimages.len()))
}

/// Buckets `c` over every residue `X` of gu(V) with `1 + X` and `1 + alpha`
/// invertible and compares each bucket with `fiber_mod`.
fn fiber_exhaustive(ctx: &Ctx, _: u64) -> Result<Outcome> {
    let space = ctx.truncated()?;
    let mut buckets: BTreeMap<Vec<u64>, (GroupElem<Quad<Trunc>>, BTreeSet<Vec<u64>>)> = BTreeMap::new();
    for x in gu_residues(&space)? {
        let Ok(x) = space.certify_lie(x) else { continue };
        if !in_gu1(&space, &x) {
            continue;
        }
        let g = cayley_gu1(&space, &x)?;
        buckets.entry(g.mat().key()).or_insert_with(|| (g, BTreeSet::new())).1.insert(x.mat().key());
    }
    for (g, xs) in buckets.values() {
        let fib = fiber_mod(&space, g)?;
        let found: BTreeSet<Vec<u64>> = fib.preimages.iter().map(|p| p.x.mat().key()).collect();
        if found != *xs {
            return Ok(Outcome::fail(
                g.mat(),
                format!("bucket of {} residues, fiber_mod returned {} ({})", xs.len(), found.len(), fib.case),
            ));
        }
    }
    Ok(Outcome::Pass)
}

/// Every residue matrix with `X + X*` scalar mod `p^N`.
pub(crate) fn gu_residues(space: &TruncSpace) -> Result<Vec<Matrix<Quad<Trunc>>>> {
    let n = space.dim();
    let ext = space.ext();
    let modulus = space.modulus();
    let coords = n * n * ext.degree();
    let columns: Vec<Vec<Trunc>> = (0..coords)
        .map(|i| {
            let mut v = vec![modulus.elem(0); coords];
            v[i] = modulus.elem(1);
            let e = Matrix::unflatten(n, n, ext, &v);
            if space.is_general_linear() {
                return vec![modulus.elem(0)];
            }
            let sum = &e + &space.star(&e);
            let corner = space.scalar(*sum.get(0, 0).re());
            sum.add_scalar(&-corner).flatten()
        })
        .collect();
    let rows: Vec<Vec<Trunc>> = (0..columns[0].len()).map(|r| columns.iter().map(|c| c[r]).collect()).collect();
    let sols = modlin::solve_homogeneous(&rows, coords, modulus);
    Ok(sols.enumerate(SEARCH_BUDGET)?.into_iter().map(|v| Matrix::unflatten(n, n, ext, &v)).collect())
}

fn level_check(ctx: &Ctx, variant: LevelVariant) -> Result<Outcome> {
    let check = check_cayley_level(ctx.exact(), ctx.level, ctx.precision, variant)?;
    if check.passed() {
        return Ok(Outcome::Pass);
    }
    let input = check.counterexample.clone().unwrap_or_else(|| "none".into());
    Ok(Outcome::fail(
        input,
        format!(
            "domain {}, image {}, group {}, equal {}, injective {}, alpha {}, mu {}",
            check.domain_count,
            check.image_count,
            check.group_count,
            check.set_equal,
            check.injective,
            check.alpha_integral,
            check.mu_congruent
        ),
    ))
}

fn level_similitude(ctx: &Ctx, _: u64) -> Result<Outcome> {
    level_check(ctx, LevelVariant::Similitude)
}

fn level_isometry(ctx: &Ctx, _: u64) -> Result<Outcome> {
    level_check(ctx, LevelVariant::Isometry)
}

fn theta_cayley(ctx: &Ctx, i: u64) -> Result<Outcome> {
    let s = ctx.exact();
    let x = sample::domain_lie(s, &mut ctx.rng("theta-cayley", i), None)?;
    let lhs = theta_group(s, &cayley_gu1(s, &x)?);
    let rhs = cayley_gu1(s, &theta_lie(s, &x))?;
    Ok(Outcome::check(lhs.mat() == rhs.mat(), x.mat(), "theta(c(X)) != c(theta X)"))
}

fn ad_cayley(ctx: &Ctx, i: u64) -> Result<Outcome> {
    let s = ctx.exact();
    let mut rng = ctx.rng("ad-cayley", i);
    let x = sample::domain_lie(s, &mut rng, None)?;
    let g = sample::group(s, &mut rng)?;
    let lhs = g.conjugate(&cayley_gu1(s, &x)?);
    let rhs = cayley_gu1(s, &s.ad(&g, &x)?)?;
    let input = format!("X = {}, x = {}", x.mat(), g.mat());
    Ok(Outcome::check(lhs.mat() == rhs.mat(), input, "Int(x) c(X) != c(Ad(x) X)"))
}

/// A Lie sample that leaves the domain a third of the time (`alpha = -1`).
fn any_lie(ctx: &Ctx, rng: &mut ChaCha8Rng, i: u64) -> Result<crate::space::LieElem<Quad<Rational>>> {
    let alpha = i.is_multiple_of(3).then(|| Rational::from_integer(-1));
    sample::lie(ctx.exact(), rng, (-1, 1), alpha)
}

fn domain_theta(ctx: &Ctx, i: u64) -> Result<Outcome> {
    let s = ctx.exact();
    let x = any_lie(ctx, &mut ctx.rng("domain-theta", i), i)?;
    let ok = in_domain(s, &x) == in_domain(s, &theta_lie(s, &x));
    Ok(Outcome::check(ok, x.mat(), "domain membership changes under theta"))
}

fn domain_ad(ctx: &Ctx, i: u64) -> Result<Outcome> {
    let s = ctx.exact();
    let mut rng = ctx.rng("domain-ad", i);
    let x = any_lie(ctx, &mut rng, i)?;
    let g = sample::group(s, &mut rng)?;
    let ok = in_domain(s, &x) == in_domain(s, &s.ad(&g, &x)?);
    Ok(Outcome::check(ok, format!("X = {}, x = {}", x.mat(), g.mat()), "domain membership changes under Ad"))
}

fn theta_lattice(ctx: &Ctx, _: u64) -> Result<Outcome> {
    let l = ctx.lattices()?;
    for (name, lat) in [("similitude", &l.l_dot), ("isometry", &l.l_ddot)] {
        if transform_lattice(ctx.exact(), &Transform::Theta, lat)? != *lat {
            return Ok(Outcome::fail(lat, format!("theta moves the {name} lattice")));
        }
    }
    Ok(Outcome::Pass)
}

fn p_adic_unit(prime: Prime, q: &Quad<Rational>) -> bool {
    prime.val(&q.norm()).finite() == Some(0)
}

fn lattice_in_domain(ctx: &Ctx, i: u64) -> Result<Outcome> {
    let s = ctx.exact();
    let l = ctx.lattices()?;
    let x = sample::lattice_point(s, &l.l_dot, &mut ctx.rng("lattice-in-domain", i), 1)?;
    let one_alpha = s.rational(Rational::one() + x.alpha().clone());
    let ok = in_domain(s, &x)
        && p_adic_unit(ctx.prime, &one_alpha)
        && p_adic_unit(ctx.prime, &x.mat().add_scalar(&s.one()).det())
        && (s.is_general_linear() || p_adic_unit(ctx.prime, &(-x.mat()).add_scalar(&one_alpha).det()));
    Ok(Outcome::check(ok, x.mat(), "element of pL outside the integral Cayley domain"))
}

fn lattice_theta_fixed(ctx: &Ctx, i: u64) -> Result<Outcome> {
    let s = ctx.exact();
    let base = &ctx.lattices()?.l_dot;
    let x = sample::theta_fixed_group(s, &mut ctx.rng("lattice-theta-fixed", i))?;
    let lx = lattice_of_x(s, base, &x)?;
    let lhs = transform_lattice(s, &Transform::Theta, &lx)?;
    let rhs = transform_lattice(s, &Transform::Ad(x.clone()), &lx)?;
    Ok(Outcome::check(lhs == rhs, x.mat(), "theta L(x) != Ad(x) L(x)"))
}

fn lattice_coset(ctx: &Ctx, i: u64) -> Result<Outcome> {
    let s = ctx.exact();
    let base = &ctx.lattices()?.l_dot;
    let mut rng = ctx.rng("lattice-coset", i);
    let d = sample::theta_fixed_group(s, &mut rng)?;
    let y = sample::lattice_point(s, base, &mut rng, 1)?;
    let k = cayley_gu1(s, &y)?;
    let input = format!("d = {}, k = {}", d.mat(), k.mat());
    if transform_lattice(s, &Transform::Ad(k.clone()), base)? != *base {
        return Ok(Outcome::fail(input, "k does not stabilise L"));
    }
    let ok = lattice_of_x(s, base, &k.compose(&d))? == lattice_of_x(s, base, &d)?;
    Ok(Outcome::check(ok, input, "L(kd) != L(d)"))
}

fn decomposition_examples(ctx: &Ctx, _: u64) -> Result<Outcome> {
    let c = ctx.decomposition()?;
    let space = c.space();
    let one = space.group_identity();
    let mut bases = vec![one.clone()];
    if ctx.family == Family::Symplectic && ctx.dim == 2 {
        bases.push(space.certify_group(space.int_matrix(&[&[1, 1], &[0, 1]]))?);
        bases.push(space.certify_group(space.int_matrix(&[&[2, 0], &[0, 1]]))?);
    }
    for b in bases {
        let coset = CosetSet::new(c, b.clone(), ctx.level)?;
        let d = decompose(c, &coset)?;
        if !d.checks.all() {
            return Ok(Outcome::fail(b.mat(), format!("{:?}", d.checks)));
        }
        let theta_fixed = theta_group(space, &b).mat() == b.mat();
        if theta_fixed && (d.pieces.len() != 1 || d.pieces[0].witness().mat() != b.inverse().mat()) {
            return Ok(Outcome::fail(b.mat(), "theta-fixed base did not give one piece with witness b^-1"));
        }
    }
    let whole = CosetSet::new(c, one.clone(), ctx.level)?;
    Ok(Outcome::check(verify_piece(space, whole.members(), &one), "c(p^k L)", "c(p^k L) is not theta-stable"))
}

fn decomposition_coset(ctx: &Ctx, i: u64) -> Result<Outcome> {
    let c = ctx.decomposition()?;
    let b = sample::residue_group(c.space(), &mut ctx.rng("decomposition-coset", i))?;
    let coset = CosetSet::new(c, b.clone(), ctx.level)?;
    let d = decompose(c, &coset)?;
    let witnesses = d.pieces.iter().all(|p| verify_piece(c.space(), p.members(), p.witness()));
    Ok(Outcome::check(d.checks.all() && witnesses, b.mat(), format!("{:?}", d.checks)))
}

fn class_inversion(ctx: &Ctx, i: u64) -> Result<Outcome> {
    let spec = ctx.groups.get(i as usize).ok_or_else(|| Error::Config(format!("no finite group at index {i}")))?;
    let report = verify_class_inversion(&build_group(spec.family, spec.dim, spec.p)?);
    if report.passed() {
        return Ok(Outcome::Pass);
    }
    let failing: Vec<String> = report
        .rows
        .iter()
        .filter(|r| matches!(r.status, ClassStatus::Finding))
        .map(|r| r.representative.clone())
        .collect();
    Ok(Outcome::Finding {
        input: spec.to_string(),
        message: format!(
            "{} classes fail; automorphism {}, involution {}, permutation {}, index {}: {}",
            failing.len(),
            report.iota_automorphism,
            report.iota_involution,
            report.permutation_equal,
            report.multiplier_index_ok,
            failing.join(" | ")
        ),
    })
}
