//! Linear algebra over `Z/p^N` via the Smith normal form, used to enumerate
//! solution sets of linear congruences without a full residue scan.

use crate::error::{Error, Result};
use crate::scalar::{Modulus, Ring, Trunc};

/// `R A C = D` with `D` diagonal, pivots `p^v` in increasing valuation order,
/// and `R`, `C` invertible.
#[derive(Clone, Debug)]
pub struct Smith {
    modulus: Modulus,
    rows: usize,
    cols: usize,
    r: Vec<Vec<Trunc>>,
    c: Vec<Vec<Trunc>>,
    pivots: Vec<u32>,
}

fn identity(n: usize, m: Modulus) -> Vec<Vec<Trunc>> {
    (0..n).map(|i| (0..n).map(|j| m.elem(u64::from(i == j))).collect()).collect()
}

impl Smith {
    pub fn new(a: &[Vec<Trunc>], cols: usize, modulus: Modulus) -> Smith {
        let rows = a.len();
        let n = modulus.precision();
        let mut d: Vec<Vec<Trunc>> = a.to_vec();
        let mut r = identity(rows, modulus);
        let mut c = identity(cols, modulus);
        let mut pivots = Vec::new();
        for k in 0..rows.min(cols) {
            let mut best: Option<(u32, usize, usize)> = None;
            for (i, row) in d.iter().enumerate().skip(k) {
                for (j, x) in row.iter().enumerate().skip(k) {
                    let v = x.valuation();
                    if v < n && best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
            let Some((v, pi, pj)) = best else { break };
            d.swap(k, pi);
            r.swap(k, pi);
            for row in d.iter_mut() {
                row.swap(k, pj);
            }
            for row in c.iter_mut() {
                row.swap(k, pj);
            }
            let u = d[k][k].unit_part().inv().expect("unit part is a unit");
            for x in d[k].iter_mut() {
                *x = *x * u;
            }
            for x in r[k].iter_mut() {
                *x = *x * u;
            }
            for i in 0..rows {
                if i == k || d[i][k].is_zero() {
                    continue;
                }
                let f = d[i][k].div_p_pow(v);
                for j in 0..cols {
                    d[i][j] = d[i][j] - f * d[k][j];
                }
                for j in 0..rows {
                    r[i][j] = r[i][j] - f * r[k][j];
                }
            }
            for j in (k + 1)..cols {
                if d[k][j].is_zero() {
                    continue;
                }
                let f = d[k][j].div_p_pow(v);
                for row in d.iter_mut() {
                    row[j] = row[j] - f * row[k];
                }
                for row in c.iter_mut() {
                    row[j] = row[j] - f * row[k];
                }
            }
            pivots.push(v);
        }
        Smith { modulus, rows, cols, r, c, pivots }
    }

    pub fn pivots(&self) -> &[u32] {
        &self.pivots
    }

    /// Solutions of `A x = b` as an affine family, or `None` when inconsistent.
    pub fn solve(&self, b: &[Trunc]) -> Option<Solutions> {
        let n = self.modulus.precision();
        let rb: Vec<Trunc> = self
            .r
            .iter()
            .map(|row| row.iter().zip(b).fold(self.modulus.elem(0), |acc, (x, y)| acc + *x * *y))
            .collect();
        let mut y = vec![self.modulus.elem(0); self.cols];
        let mut orders = vec![n; self.cols];
        for (i, &v) in self.pivots.iter().enumerate() {
            if rb[i].valuation() < v {
                return None;
            }
            y[i] = rb[i].div_p_pow(v);
            orders[i] = v;
        }
        if rb[self.pivots.len()..self.rows].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let particular = self.apply_c(&y);
        let mut generators = Vec::new();
        for (i, &e) in orders.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let mut unit = vec![self.modulus.elem(0); self.cols];
            unit[i] = self.modulus.pow_p(n - e);
            generators.push((self.apply_c(&unit), e));
        }
        Some(Solutions { modulus: self.modulus, particular, generators })
    }

    fn apply_c(&self, y: &[Trunc]) -> Vec<Trunc> {
        self.c.iter().map(|row| row.iter().zip(y).fold(self.modulus.elem(0), |acc, (x, z)| acc + *x * *z)).collect()
    }
}

/// `particular + sum t_i g_i` with `t_i` ranging over `Z/p^{e_i}`; every
/// solution arises from exactly one coefficient vector.
#[derive(Clone, Debug)]
pub struct Solutions {
    modulus: Modulus,
    particular: Vec<Trunc>,
    generators: Vec<(Vec<Trunc>, u32)>,
}

impl Solutions {
    pub fn particular(&self) -> &[Trunc] {
        &self.particular
    }

    /// Number of solutions, saturating at `u128::MAX`.
    pub fn count(&self) -> u128 {
        let p = u128::from(self.modulus.p());
        self.generators.iter().fold(1u128, |acc, (_, e)| acc.saturating_mul(p.saturating_pow(*e)))
    }

    /// Every solution, in no particular order.
    pub fn enumerate(&self, budget: u128) -> Result<Vec<Vec<Trunc>>> {
        let size = self.count();
        if size > budget {
            return Err(Error::Budget { size, budget });
        }
        let p = self.modulus.p();
        let bounds: Vec<u64> = self.generators.iter().map(|(_, e)| p.pow(*e)).collect();
        let mut coef = vec![0u64; bounds.len()];
        let mut out = Vec::with_capacity(size as usize);
        loop {
            let mut x = self.particular.clone();
            for ((g, _), &t) in self.generators.iter().zip(&coef) {
                if t == 0 {
                    continue;
                }
                let t = self.modulus.elem(t);
                for (xi, gi) in x.iter_mut().zip(g) {
                    *xi = *xi + t * *gi;
                }
            }
            out.push(x);
            let mut i = 0;
            loop {
                if i == coef.len() {
                    return Ok(out);
                }
                coef[i] += 1;
                if coef[i] < bounds[i] {
                    break;
                }
                coef[i] = 0;
                i += 1;
            }
        }
    }
}

/// Solutions of `A x = b` over `Z/p^N`, where `A` has `cols` columns.
pub fn solve_affine(a: &[Vec<Trunc>], cols: usize, b: &[Trunc], modulus: Modulus) -> Option<Solutions> {
    Smith::new(a, cols, modulus).solve(b)
}

/// The kernel of `A` over `Z/p^N`.
pub fn solve_homogeneous(a: &[Vec<Trunc>], cols: usize, modulus: Modulus) -> Solutions {
    let zero = vec![modulus.elem(0); a.len()];
    solve_affine(a, cols, &zero, modulus).expect("homogeneous systems are consistent")
}
