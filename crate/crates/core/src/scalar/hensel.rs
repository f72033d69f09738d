use super::{Ring, Trunc};
use crate::error::{Error, Result};

/// Newton iteration for `x^2 = mu` starting from a root modulo p.
fn newton_lift(mu: Trunc, start: Trunc) -> Trunc {
    let half = mu.from_i64_like(2).inv().expect("p is odd");
    let mut x = start;
    // quadratic convergence: ceil(log2 N) + 1 steps suffice
    for _ in 0..=(32 - mu.modulus().precision().leading_zeros()) {
        x = (x + mu * x.inv().expect("root of a unit is a unit")) * half;
    }
    x
}

/// The unique `lambda = 1 mod p^k` with `lambda^2 = mu mod p^N`, where `N` is
/// the precision carried by `mu`.
pub fn hensel_sqrt_one_plus(mu: Trunc, k: u32) -> Result<Trunc> {
    let modulus = mu.modulus();
    let precision = modulus.precision();
    if k == 0 || k > precision {
        return Err(Error::Precision { level: k, precision });
    }
    if (mu - mu.one_like()).valuation() < k {
        return Err(Error::NotOneModLevel { value: mu.to_string(), level: k });
    }
    let lambda = newton_lift(mu, mu.one_like());
    debug_assert_eq!(lambda * lambda, mu);
    Ok(lambda)
}

/// A square root of a unit modulo `p^N`, if one exists. The root returned is
/// the lift of the smallest square root modulo p; the other root is its negative.
pub fn sqrt_unit(mu: Trunc) -> Option<Trunc> {
    if !mu.is_unit() {
        return None;
    }
    let modulus = mu.modulus();
    let p = modulus.p();
    let target = mu.residue() % p;
    let r0 = (1..p).find(|r| (r * r) % p == target)?;
    let lambda = newton_lift(mu, modulus.elem(r0));
    debug_assert_eq!(lambda * lambda, mu);
    Some(lambda)
}
