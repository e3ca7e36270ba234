//! Dense and skew-symmetric matrices over a [`Field`].

use crate::error::{Error, Result};
use crate::scalar::{Field, Rational, Scalar};

/// Pivot threshold for float elimination, relative to the largest entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pivoting {
    pub relative_threshold: f64,
}

impl Default for Pivoting {
    fn default() -> Self {
        Pivoting { relative_threshold: 1e-12 }
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Field> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(DenseMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> DenseMatrix<U> {
        DenseMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_same_shape(o)?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).clone() + o.get(i, j).clone()))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check_same_shape(o)?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).clone() - o.get(i, j).clone()))
    }

    fn check_same_shape(&self, o: &Self) -> Result<()> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(())
    }

    pub fn matmul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = out.get(i, j).clone() + a.clone() * o.get(k, j).clone();
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::Dimension("vector length".into()));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    /// Submatrix X(I;J).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Horizontal concatenation [self other].
    pub fn hcat(&self, o: &Self) -> Result<Self> {
        if self.rows != o.rows {
            return Err(Error::Dimension("hcat row counts differ".into()));
        }
        Ok(Self::from_fn(self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                o.get(i, j - self.cols).clone()
            }
        }))
    }

    /// Determinant: fraction-free elimination when exact, partial pivoting otherwise.
    pub fn det(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::NonSquare { rows: self.rows, cols: self.cols });
        }
        Ok(if T::EXACT { det_bareiss(self) } else { det_partial_pivot(self) })
    }

    pub fn inverse(&self) -> Result<Self> {
        self.inverse_with(Pivoting::default())
    }

    /// Gauss-Jordan inverse. Float mode reports singularity below the relative threshold.
    pub fn inverse_with(&self, piv: Pivoting) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NonSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let scale = self.data.iter().map(|x| x.magnitude()).fold(0.0, f64::max);
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for k in 0..n {
            let p = if T::EXACT {
                (k..n).find(|&i| !a.get(i, k).is_zero())
            } else {
                (k..n)
                    .max_by(|&i, &j| a.get(i, k).magnitude().total_cmp(&a.get(j, k).magnitude()))
                    .filter(|&i| a.get(i, k).magnitude() > piv.relative_threshold * scale)
            };
            let p = p.ok_or_else(|| Error::Singular(format!("no pivot in column {k}")))?;
            a.swap_rows(k, p);
            inv.swap_rows(k, p);
            let d = a.get(k, k).clone();
            for j in 0..n {
                a.set(k, j, a.get(k, j).clone() / d.clone());
                inv.set(k, j, inv.get(k, j).clone() / d.clone());
            }
            for i in 0..n {
                if i == k || a.get(i, k).is_zero() {
                    continue;
                }
                let f = a.get(i, k).clone();
                for j in 0..n {
                    let v = a.get(i, j).clone() - f.clone() * a.get(k, j).clone();
                    a.set(i, j, v);
                    let w = inv.get(i, j).clone() - f.clone() * inv.get(k, j).clone();
                    inv.set(i, j, w);
                }
            }
        }
        Ok(inv)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    /// Skew part check: m = -mᵀ with zero diagonal.
    pub fn is_skew(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                self.get(i, i).is_zero()
                    && (i + 1..self.rows).all(|j| *self.get(i, j) == -self.get(j, i).clone())
            })
    }

    pub fn to_scalars(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| x.to_scalar()).collect()).collect()
    }
}

impl DenseMatrix<Rational> {
    pub fn to_f64(&self) -> DenseMatrix<f64> {
        self.map(|x| x.as_f64())
    }
}

fn det_bareiss<T: Field>(m: &DenseMatrix<T>) -> T {
    let n = m.rows;
    if n == 0 {
        return T::one();
    }
    let mut a = m.clone();
    let mut sign = T::one();
    let mut prev = T::one();
    for k in 0..n - 1 {
        if a.get(k, k).is_zero() {
            match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                Some(p) => {
                    a.swap_rows(k, p);
                    sign = -sign;
                }
                None => return T::zero(),
            }
        }
        let piv = a.get(k, k).clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (piv.clone() * a.get(i, j).clone() - a.get(i, k).clone() * a.get(k, j).clone())
                    / prev.clone();
                a.set(i, j, v);
            }
        }
        prev = piv;
    }
    sign * a.get(n - 1, n - 1).clone()
}

fn det_partial_pivot<T: Field>(m: &DenseMatrix<T>) -> T {
    let n = m.rows;
    let mut a = m.clone();
    let mut acc = T::one();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a.get(i, k).magnitude().total_cmp(&a.get(j, k).magnitude()))
            .unwrap_or(k);
        if a.get(p, k).is_zero() {
            return T::zero();
        }
        if p != k {
            a.swap_rows(k, p);
            acc = -acc;
        }
        let piv = a.get(k, k).clone();
        acc = acc * piv.clone();
        for i in k + 1..n {
            let f = a.get(i, k).clone() / piv.clone();
            if f.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let v = a.get(i, j).clone() - f.clone() * a.get(k, j).clone();
                a.set(i, j, v);
            }
        }
    }
    acc
}

/// Cofactor expansion along the first row. Exponential; test oracle only.
pub fn det_cofactor<T: Field>(m: &DenseMatrix<T>) -> Result<T> {
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.rows, cols: m.cols });
    }
    fn go<T: Field>(m: &DenseMatrix<T>, rows: &[usize], cols: &[usize]) -> T {
        if rows.is_empty() {
            return T::one();
        }
        let mut acc = T::zero();
        for (k, &c) in cols.iter().enumerate() {
            let e = m.get(rows[0], c);
            if e.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = e.clone() * go(m, &rows[1..], &rest);
            acc = if k % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    }
    let idx: Vec<usize> = (0..m.rows).collect();
    Ok(go(m, &idx, &idx))
}

/// Skew-symmetric matrix stored as its strict upper triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix<T> {
    dim: usize,
    upper: Vec<T>,
}

impl<T: Field> SkewMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        SkewMatrix { dim, upper: vec![T::zero(); dim * dim.saturating_sub(1) / 2] }
    }

    /// Builds from f(i, j) evaluated for i < j only.
    pub fn from_upper_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut upper = Vec::with_capacity(dim * dim.saturating_sub(1) / 2);
        for i in 0..dim {
            for j in i + 1..dim {
                upper.push(f(i, j));
            }
        }
        SkewMatrix { dim, upper }
    }

    /// Reads the strict upper triangle of a dense matrix; rejects non-skew input.
    pub fn from_dense(m: &DenseMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
        }
        if !T::EXACT {
            return Ok(Self::from_upper_fn(m.rows(), |i, j| m.get(i, j).clone()));
        }
        if !m.is_skew() {
            return Err(Error::InvalidArgument("matrix is not skew-symmetric".into()));
        }
        Ok(Self::from_upper_fn(m.rows(), |i, j| m.get(i, j).clone()))
    }

    /// Skew part (m - mᵀ)/2 read from the upper triangle without checks.
    pub fn from_dense_upper(m: &DenseMatrix<T>) -> Self {
        Self::from_upper_fn(m.rows(), |i, j| m.get(i, j).clone())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn index(&self, i: usize, j: usize) -> usize {
        // offset of row i in the packed upper triangle
        i * (2 * self.dim - i - 1) / 2 + (j - i - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.upper[self.index(i, j)].clone(),
            Greater => -self.upper[self.index(j, i)].clone(),
            Equal => T::zero(),
        }
    }

    /// Sets (i,j) and implicitly (j,i) = -v.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => {
                let k = self.index(i, j);
                self.upper[k] = v;
            }
            Greater => {
                let k = self.index(j, i);
                self.upper[k] = -v;
            }
            Equal => {}
        }
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        DenseMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    /// Principal submatrix on the given index list.
    pub fn select(&self, idx: &[usize]) -> Self {
        Self::from_upper_fn(idx.len(), |i, j| self.get(idx[i], idx[j]))
    }

    /// Simultaneous row/column permutation: new (i,j) = old (p[i], p[j]).
    pub fn permute(&self, p: &[usize]) -> Self {
        self.select(p)
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> SkewMatrix<U> {
        SkewMatrix { dim: self.dim, upper: self.upper.iter().map(f).collect() }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.dim != o.dim {
            return Err(Error::Dimension("skew dims differ".into()));
        }
        Ok(SkewMatrix {
            dim: self.dim,
            upper: self.upper.iter().zip(&o.upper).map(|(a, b)| a.clone() + b.clone()).collect(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(|x| x.is_zero())
    }

    /// Congruence B m Bᵀ.
    pub fn congruence(&self, b: &DenseMatrix<T>) -> Result<Self> {
        if b.cols() != self.dim {
            return Err(Error::Dimension("congruence shape".into()));
        }
        let prod = b.matmul(&self.to_dense())?.matmul(&b.transpose())?;
        Ok(Self::from_dense_upper(&prod))
    }
}

impl SkewMatrix<Rational> {
    pub fn to_f64(&self) -> SkewMatrix<f64> {
        self.map(|x| x.as_f64())
    }
}
