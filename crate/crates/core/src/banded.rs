//! Real banded matrices and banded LU with partial pivoting.
//!
//! Storage follows the LAPACK band layout: entry `(i, j)` lives in column
//! `j` at band row `ku + i - j`.

use std::ops::{Add, AddAssign, Div, Mul, Sub, SubAssign};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalars a banded operator can act on.
pub trait Scalar:
    Copy
    + Default
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + AddAssign
    + SubAssign
{
    fn magnitude(&self) -> f64;
}

impl Scalar for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    rows: usize,
    cols: usize,
    kl: usize,
    ku: usize,
    band: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(rows: usize, cols: usize, kl: usize, ku: usize) -> Self {
        let kl = kl.min(rows.saturating_sub(1));
        let ku = ku.min(cols.saturating_sub(1));
        Self {
            rows,
            cols,
            kl,
            ku,
            band: vec![0.0; (kl + ku + 1) * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n, 0, 0);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds from `(offset, values)` pairs; offset `d` holds entries
    /// `(i, i + d)`, listed from the first valid row.
    pub fn from_diagonals(rows: usize, cols: usize, diagonals: &[(isize, Vec<f64>)]) -> Self {
        let kl = diagonals
            .iter()
            .map(|(d, _)| (-d).max(0) as usize)
            .max()
            .unwrap_or(0);
        let ku = diagonals
            .iter()
            .map(|(d, _)| (*d).max(0) as usize)
            .max()
            .unwrap_or(0);
        let mut m = Self::zeros(rows, cols, kl, ku);
        for (d, vals) in diagonals {
            let i0 = (-d).max(0) as usize;
            for (t, &v) in vals.iter().enumerate() {
                let i = i0 + t;
                let j = (i as isize + d) as usize;
                if i < rows && j < cols {
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of subdiagonals.
    pub fn lower(&self) -> usize {
        self.kl
    }

    /// Number of superdiagonals.
    pub fn upper(&self) -> usize {
        self.ku
    }

    #[inline]
    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.rows && j < self.cols && i + self.ku >= j && j + self.kl >= i
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.band[j * (self.kl + self.ku + 1) + self.ku + i - j]
        } else {
            0.0
        }
    }

    /// Sets an entry inside the band. Panics outside it.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside band");
        let ld = self.kl + self.ku + 1;
        self.band[j * ld + self.ku + i - j] = v;
    }

    /// Entries `(i, i + offset)` in increasing row order.
    pub fn diagonal(&self, offset: isize) -> Vec<f64> {
        let i0 = (-offset).max(0) as usize;
        (i0..self.rows)
            .map(|i| (i, i as isize + offset))
            .take_while(|&(_, j)| j >= 0 && (j as usize) < self.cols)
            .map(|(i, j)| self.get(i, j as usize))
            .collect()
    }

    /// Nonzero `(offset, diagonal)` pairs.
    pub fn bands(&self) -> Vec<(isize, Vec<f64>)> {
        (-(self.kl as isize)..=self.ku as isize)
            .map(|d| (d, self.diagonal(d)))
            .filter(|(_, v)| v.iter().any(|&x| x != 0.0))
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.band.iter().all(|v| v.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.band.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Copy with the band narrowed to the outermost nonzero diagonals.
    pub fn trimmed(&self) -> Self {
        let bands = self.bands();
        let mut out = Self::from_diagonals(self.rows, self.cols, &bands);
        if bands.is_empty() {
            out = Self::zeros(self.rows, self.cols, 0, 0);
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.ku, self.kl);
        for j in 0..self.cols {
            for i in self.row_range(j) {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Rows with band entries in column `j`.
    #[inline]
    fn row_range(&self, j: usize) -> std::ops::Range<usize> {
        j.saturating_sub(self.ku)..(j + self.kl + 1).min(self.rows)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.band.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `self + alpha · other`.
    pub fn add_scaled(&self, alpha: f64, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = Self::zeros(
            self.rows,
            self.cols,
            self.kl.max(other.kl),
            self.ku.max(other.ku),
        );
        for j in 0..self.cols {
            for i in out.row_range(j) {
                let v = self.get(i, j) + alpha * other.get(i, j);
                out.set(i, j, v);
            }
        }
        out
    }

    /// Matrix product; bandwidths add.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols, self.kl + other.kl, self.ku + other.ku);
        for j in 0..other.cols {
            for t in other.row_range(j) {
                let b = other.get(t, j);
                if b == 0.0 {
                    continue;
                }
                for i in self.row_range(t) {
                    let v = out.get(i, j) + self.get(i, t) * b;
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// `y = A x`.
    pub fn matvec<T: Scalar>(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        y.iter_mut().for_each(|v| *v = T::default());
        let ld = self.kl + self.ku + 1;
        for (j, &xj) in x.iter().enumerate() {
            let col = &self.band[j * ld..(j + 1) * ld];
            for i in self.row_range(j) {
                y[i] += xj * col[self.ku + i - j];
            }
        }
    }

    /// `Y = A X` for column-major `X` with `self.cols` rows.
    pub fn mul_left<T: Scalar>(&self, x: &[T], ncols: usize) -> Vec<T> {
        let mut y = vec![T::default(); self.rows * ncols];
        for (xc, yc) in x.chunks_exact(self.cols).zip(y.chunks_exact_mut(self.rows)) {
            self.matvec(xc, yc);
        }
        y
    }

    /// `Y = X A` for column-major `X` with `nrows` rows and `self.rows` columns.
    pub fn mul_right<T: Scalar>(&self, x: &[T], nrows: usize) -> Vec<T> {
        assert_eq!(x.len(), nrows * self.rows);
        let mut y = vec![T::default(); nrows * self.cols];
        for j in 0..self.cols {
            let yc = &mut y[j * nrows..(j + 1) * nrows];
            for t in self.row_range(j) {
                let a = self.get(t, j);
                if a == 0.0 {
                    continue;
                }
                let xc = &x[t * nrows..(t + 1) * nrows];
                for (yv, &xv) in yc.iter_mut().zip(xc) {
                    *yv += xv * a;
                }
            }
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }

    /// Banded copy of a dense matrix; entries with magnitude `<= drop` are ignored
    /// when sizing the band.
    pub fn from_dense(a: &DMatrix<f64>, drop: f64) -> Self {
        let (rows, cols) = a.shape();
        let mut kl = 0;
        let mut ku = 0;
        for j in 0..cols {
            for i in 0..rows {
                if a[(i, j)].abs() > drop {
                    if i > j {
                        kl = kl.max(i - j);
                    } else {
                        ku = ku.max(j - i);
                    }
                }
            }
        }
        let mut out = Self::zeros(rows, cols, kl, ku);
        for j in 0..cols {
            for i in out.row_range(j) {
                out.set(i, j, a[(i, j)]);
            }
        }
        out
    }

    /// Sub-matrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let dense = DMatrix::from_fn(rows.len(), cols.len(), |a, b| self.get(rows[a], cols[b]));
        Self::from_dense(&dense, 0.0)
    }

    pub fn lu(&self) -> Result<BandedLu> {
        BandedLu::factor(self)
    }
}

/// Banded LU factors `P A = L U` with partial pivoting.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ab: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    pub fn factor(a: &BandedMatrix) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::DimensionMismatch(format!(
                "LU of non-square {}x{} matrix",
                a.rows, a.cols
            )));
        }
        let n = a.rows;
        let (kl, ku) = (a.kl, a.ku);
        let kv = kl + ku;
        let ld = 2 * kl + ku + 1;
        let mut ab = vec![0.0; ld * n];
        for j in 0..n {
            for i in a.row_range(j) {
                ab[j * ld + kv + i - j] = a.get(i, j);
            }
        }
        let mut ipiv = vec![0; n];
        let idx = |i: usize, j: usize| j * ld + kv + i - j;
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut jp = 0;
            let mut best = ab[idx(j, j)].abs();
            for t in 1..=km {
                let v = ab[idx(j + t, j)].abs();
                if v > best {
                    best = v;
                    jp = t;
                }
            }
            ipiv[j] = j + jp;
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular(format!("zero pivot in column {j}")));
            }
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    ab.swap(idx(j, c), idx(j + jp, c));
                }
            }
            let piv = ab[idx(j, j)];
            for t in 1..=km {
                ab[idx(j + t, j)] /= piv;
            }
            for c in j + 1..=ju {
                let u = ab[idx(j, c)];
                if u != 0.0 {
                    for t in 1..=km {
                        let l = ab[idx(j + t, j)];
                        ab[idx(j + t, c)] -= l * u;
                    }
                }
            }
        }
        Ok(Self { n, kl, ku, ab, ipiv })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.ab[j * (2 * self.kl + self.ku + 1) + self.kl + self.ku + i - j]
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place<T: Scalar>(&self, b: &mut [T]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        let kv = self.kl + self.ku;
        for j in 0..n {
            let l = self.ipiv[j];
            if l != j {
                b.swap(l, j);
            }
            let bj = b[j];
            let km = self.kl.min(n - 1 - j);
            for t in 1..=km {
                b[j + t] -= bj * self.at(j + t, j);
            }
        }
        for j in (0..n).rev() {
            b[j] = b[j] / self.at(j, j);
            let bj = b[j];
            for i in j.saturating_sub(kv)..j {
                b[i] -= bj * self.at(i, j);
            }
        }
    }

    /// Solves `Aᵀ x = b` in place.
    pub fn solve_transpose_in_place<T: Scalar>(&self, b: &mut [T]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        let kv = self.kl + self.ku;
        for j in 0..n {
            let mut s = b[j];
            for i in j.saturating_sub(kv)..j {
                s -= b[i] * self.at(i, j);
            }
            b[j] = s / self.at(j, j);
        }
        for j in (0..n).rev() {
            let km = self.kl.min(n - 1 - j);
            let mut s = b[j];
            for t in 1..=km {
                s -= b[j + t] * self.at(j + t, j);
            }
            b[j] = s;
            let l = self.ipiv[j];
            if l != j {
                b.swap(l, j);
            }
        }
    }

    /// `X ← A⁻¹ X` for column-major `X` with `n` rows.
    pub fn solve_left<T: Scalar>(&self, x: &mut [T]) {
        for col in x.chunks_exact_mut(self.n) {
            self.solve_in_place(col);
        }
    }

    /// `X ← X A⁻¹` for column-major `X` with `nrows` rows and `n` columns.
    pub fn solve_right<T: Scalar>(&self, x: &mut [T], nrows: usize, scratch: &mut Vec<T>) {
        scratch.resize(self.n, T::default());
        for i in 0..nrows {
            for j in 0..self.n {
                scratch[j] = x[j * nrows + i];
            }
            self.solve_transpose_in_place(scratch);
            for j in 0..self.n {
                x[j * nrows + i] = scratch[j];
            }
        }
    }
}
