//! Dense matrices over the scalar rings, with exact determinant and inverse.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{Extension, Modulus, Quad, Rational, Ring, Scalar, Trunc};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Ring> Matrix<S> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        assert!(rows > 0 && cols > 0, "empty matrices are not supported");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged or empty rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn zeros(rows: usize, cols: usize, proto: &S) -> Self {
        Matrix { rows, cols, data: vec![proto.zero_like(); rows * cols] }
    }

    pub fn scalar(n: usize, s: S) -> Self {
        let mut m = Matrix::zeros(n, n, &s);
        for i in 0..n {
            m.data[i * n + i] = s.clone();
        }
        m
    }

    pub fn identity(n: usize, proto: &S) -> Self {
        Matrix::scalar(n, proto.one_like())
    }

    pub fn diagonal(entries: &[S]) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n, &entries[0]);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn proto(&self) -> &S {
        &self.data[0]
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<T: Ring>(&self, f: impl Fn(&S) -> Result<T>) -> Result<Matrix<T>> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| s.clone() * x.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Ring::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.scalar_value().is_some_and(|s| s.is_one())
    }

    /// `Some(s)` when the matrix equals `s * 1`.
    pub fn scalar_value(&self) -> Option<S> {
        if !self.is_square() {
            return None;
        }
        let s = self.get(0, 0).clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.get(i, j);
                if (i == j && *e != s) || (i != j && !e.is_zero()) {
                    return None;
                }
            }
        }
        Some(s)
    }

    pub fn trace(&self) -> S {
        (1..self.rows).fold(self.get(0, 0).clone(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn add_scalar(&self, s: &S) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let v = m.get(i, i).clone() + s.clone();
            m.set(i, i, v);
        }
        m
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(v[0].zero_like(), |acc, (a, b)| acc + a.clone() * b.clone()))
            .collect()
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Self {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in (0..self.rows).filter(|&i| i != skip_row) {
            for j in (0..self.cols).filter(|&j| j != skip_col) {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: self.rows - 1, cols: self.cols - 1, data }
    }

    /// Exact determinant by cofactor expansion; uses only ring operations, so
    /// it is valid in the residue rings as well as over fields.
    pub fn det(&self) -> S {
        assert!(self.is_square(), "determinant of a non-square matrix");
        match self.rows {
            1 => self.data[0].clone(),
            2 => self.data[0].clone() * self.data[3].clone() - self.data[1].clone() * self.data[2].clone(),
            n => {
                let mut acc = self.proto().zero_like();
                for j in 0..n {
                    let e = self.get(0, j);
                    if e.is_zero() {
                        continue;
                    }
                    let term = e.clone() * self.minor(0, j).det();
                    acc = if j % 2 == 0 { acc + term } else { acc - term };
                }
                acc
            }
        }
    }

    /// Gauss-Jordan inverse pivoting on units. Over a local ring a matrix is
    /// invertible exactly when every column offers a unit pivot.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n, self.proto());
        for col in 0..n {
            let pivot = (col..n).find(|&r| a.get(r, col).is_unit())?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let pinv = a.get(col, col).inv().expect("unit pivot");
            a.scale_row(col, &pinv);
            inv.scale_row(col, &pinv);
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                a.add_row_multiple(r, col, &f);
                inv.add_row_multiple(r, col, &f);
            }
        }
        Some(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.det().is_unit()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, s: &S) {
        for j in 0..self.cols {
            let v = s.clone() * self.get(r, j).clone();
            self.set(r, j, v);
        }
    }

    /// row_r -= f * row_src
    fn add_row_multiple(&mut self, r: usize, src: usize, f: &S) {
        for j in 0..self.cols {
            let v = self.get(r, j).clone() - f.clone() * self.get(src, j).clone();
            self.set(r, j, v);
        }
    }
}

impl<S: Scalar> Matrix<S> {
    /// Entrywise tau.
    pub fn conj(&self) -> Self {
        self.map(Scalar::conj)
    }

    /// `Some(b)` when the matrix equals `b * 1` for a tau-fixed scalar `b`.
    pub fn base_scalar_value(&self) -> Option<S::Base> {
        self.scalar_value().and_then(|s| s.as_base())
    }
}

impl<'a, S: Ring> Add<&'a Matrix<S>> for &'a Matrix<S> {
    type Output = Matrix<S>;
    fn add(self, rhs: &'a Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }
}

impl<'a, S: Ring> Sub<&'a Matrix<S>> for &'a Matrix<S> {
    type Output = Matrix<S>;
    fn sub(self, rhs: &'a Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }
}

impl<'a, S: Ring> Mul<&'a Matrix<S>> for &'a Matrix<S> {
    type Output = Matrix<S>;
    fn mul(self, rhs: &'a Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in mul");
        let mut data = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = self.get(i, 0).clone() * rhs.get(0, j).clone();
                for k in 1..self.cols {
                    acc = acc + self.get(i, k).clone() * rhs.get(k, j).clone();
                }
                data.push(acc);
            }
        }
        Matrix { rows: self.rows, cols: rhs.cols, data }
    }
}

impl<S: Ring> Neg for &Matrix<S> {
    type Output = Matrix<S>;
    fn neg(self) -> Matrix<S> {
        self.map(|x| -x.clone())
    }
}

/// Row-major canonical text: entries separated by spaces, rows by `;`.
impl<S: Ring> fmt::Display for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl<S: Ring> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl<S: Ring> Matrix<S> {
    /// Rows of canonical scalar strings, the serialized form used in reports.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(ToString::to_string).collect()).collect()
    }
}

fn split_text(text: &str) -> Vec<Vec<&str>> {
    text.split([';', '\n'])
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .map(|r| r.split([' ', ',', '\t']).filter(|e| !e.is_empty()).collect())
        .collect()
}

impl Matrix<Quad<Rational>> {
    pub fn parse(text: &str, ext: Extension) -> Result<Self> {
        let rows = split_text(text)
            .into_iter()
            .map(|r| r.into_iter().map(|e| Quad::<Rational>::parse(e, ext)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Matrix::from_rows(rows)
    }

    pub fn from_string_rows(rows: &[Vec<String>], ext: Extension) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|e| Quad::<Rational>::parse(e, ext)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Matrix::from_rows(rows)
    }

    /// Integer matrix over E in the given extension.
    pub fn from_ints(rows: &[&[i64]], ext: Extension) -> Self {
        let rows = rows.iter().map(|r| r.iter().map(|&v| Quad::int(v, ext)).collect()).collect();
        Matrix::from_rows(rows).expect("well-formed integer rows")
    }
}

impl Matrix<Quad<Trunc>> {
    pub fn parse_mod(text: &str, ext: Extension, modulus: Modulus) -> Result<Self> {
        let rows = split_text(text)
            .into_iter()
            .map(|r| r.into_iter().map(|e| Quad::<Trunc>::parse_mod(e, ext, modulus)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Matrix::from_rows(rows)
    }

    pub fn from_string_rows_mod(rows: &[Vec<String>], ext: Extension, modulus: Modulus) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|e| Quad::<Trunc>::parse_mod(e, ext, modulus)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Matrix::from_rows(rows)
    }

    pub fn from_ints_mod(rows: &[&[i64]], ext: Extension, modulus: Modulus) -> Self {
        let rows = rows.iter().map(|r| r.iter().map(|&v| Quad::<Trunc>::int_mod(v, ext, modulus)).collect()).collect();
        Matrix::from_rows(rows).expect("well-formed integer rows")
    }

    /// Row-major residue vector; its lexicographic order is the canonical
    /// enumeration order used by every search.
    pub fn key(&self) -> Vec<u64> {
        let mut k = Vec::with_capacity(self.data.len() * 2);
        for e in &self.data {
            let (a, b) = e.key();
            k.push(a);
            k.push(b);
        }
        k
    }

    pub fn lift(&self) -> Matrix<Quad<Rational>> {
        self.map(Quad::lift)
    }
}

/// Flattening of matrices over E into coordinate vectors over F, ordered by
/// entry (row-major) and then by component (`a`, then `b` when inert).
impl<B: Ring> Matrix<Quad<B>> {
    pub fn flatten(&self) -> Vec<B> {
        let inert = self.proto().ext().is_inert();
        let mut v = Vec::with_capacity(self.data.len() * if inert { 2 } else { 1 });
        for e in &self.data {
            v.push(e.re().clone());
            if inert {
                v.push(e.im().clone());
            }
        }
        v
    }

    pub fn unflatten(rows: usize, cols: usize, ext: Extension, coords: &[B]) -> Self {
        let d = ext.degree();
        assert_eq!(coords.len(), rows * cols * d, "coordinate length mismatch");
        let data =
            coords
                .chunks(d)
                .map(|c| {
                    if d == 2 {
                        Quad::new(c[0].clone(), c[1].clone(), ext)
                    } else {
                        Quad::from_base(c[0].clone(), ext)
                    }
                })
                .collect();
        Matrix { rows, cols, data }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Prime;

    fn ext() -> Extension {
        Extension::Split
    }

    #[test]
    fn determinant_and_inverse() {
        let m = Matrix::<Quad<Rational>>::parse("1 2; 3 4", ext()).unwrap();
        assert_eq!(m.det(), Quad::int(-2, ext()));
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).is_identity());
        let s = Matrix::<Quad<Rational>>::parse("1 2; 2 4", ext()).unwrap();
        assert!(s.inverse().is_none());
        let m3 = Matrix::<Quad<Rational>>::parse("2 0 1; 1 3 0; 0 1 1", ext()).unwrap();
        assert_eq!(m3.det(), Quad::int(7, ext()));
        assert!((&m3 * &m3.inverse().unwrap()).is_identity());
    }

    #[test]
    fn inverse_over_residue_ring() {
        let md = Modulus::new(Prime::new(3).unwrap(), 2).unwrap();
        let m = Matrix::<Quad<Trunc>>::from_ints_mod(&[&[3, 1], &[1, 0]], ext(), md);
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).is_identity());
        let sing = Matrix::<Quad<Trunc>>::from_ints_mod(&[&[3, 0], &[0, 1]], ext(), md);
        assert!(sing.inverse().is_none());
        assert!(!sing.is_invertible());
    }

    #[test]
    fn text_roundtrip_and_flatten() {
        let e = Extension::inert(Prime::new(3).unwrap());
        let m = Matrix::<Quad<Rational>>::parse("1/3 -1/3+s; 0 2*s", e).unwrap();
        assert_eq!(Matrix::<Quad<Rational>>::parse(&m.to_string(), e).unwrap(), m);
        let flat = m.flatten();
        assert_eq!(flat.len(), 8);
        assert_eq!(Matrix::unflatten(2, 2, e, &flat), m);
    }
}
