//! Dense exact linear algebra over any supported field.

use crate::error::{Error, Result};
use crate::fields::{FieldDescriptor, FieldElem};

/// Row-major matrix of field elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl Matrix {
    pub fn zeros(k: FieldDescriptor, rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![k.zero(); rows * cols],
        }
    }

    pub fn identity(k: FieldDescriptor, n: usize) -> Self {
        let mut m = Self::zeros(k, n, n);
        for i in 0..n {
            m.set(i, i, k.one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<FieldElem>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_columns(k: FieldDescriptor, cols: &[Vec<FieldElem>]) -> Result<Self> {
        let n = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(k, n, cols.len());
        for (j, col) in cols.iter().enumerate() {
            if col.len() != n {
                return Err(Error::DimensionMismatch("ragged matrix columns".into()));
            }
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    pub fn diagonal(k: FieldDescriptor, entries: &[FieldElem]) -> Self {
        let mut m = Self::zeros(k, entries.len(), entries.len());
        for (i, x) in entries.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: FieldElem) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<FieldElem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<FieldElem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Matrix {
            rows: self.cols,
            cols: self.rows,
            data: self.data.clone(),
        };
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, k: FieldDescriptor, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(k, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = k.zero();
                for l in 0..self.cols {
                    acc = k.add(&acc, &k.mul(self.get(i, l), other.get(l, j)));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, k: FieldDescriptor, v: &[FieldElem]) -> Vec<FieldElem> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(k.zero(), |acc, (a, b)| k.add(&acc, &k.mul(a, b)))
            })
            .collect()
    }

    /// `Pᵀ · self · P`.
    pub fn congruent(&self, k: FieldDescriptor, p: &Matrix) -> Result<Matrix> {
        p.transpose().mul(k, &self.mul(k, p)?)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_diagonal(&self, k: FieldDescriptor) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || k.is_zero(self.get(i, j))))
    }

    pub fn inverse(&self, k: FieldDescriptor) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(k, n);
        for c in 0..n {
            let pivot = (c..n)
                .find(|&r| !k.is_zero(a.get(r, c)))
                .ok_or(Error::SingularForm)?;
            a.swap_rows(c, pivot);
            inv.swap_rows(c, pivot);
            let pinv = k.inv(a.get(c, c))?;
            a.scale_row(k, c, &pinv);
            inv.scale_row(k, c, &pinv);
            for r in 0..n {
                if r != c && !k.is_zero(a.get(r, c)) {
                    let f = a.get(r, c).clone();
                    a.add_row_multiple(k, r, c, &k.neg(&f));
                    inv.add_row_multiple(k, r, c, &k.neg(&f));
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn scale_row(&mut self, k: FieldDescriptor, i: usize, f: &FieldElem) {
        for c in 0..self.cols {
            let v = k.mul(self.get(i, c), f);
            self.set(i, c, v);
        }
    }

    /// row_target += f · row_src
    fn add_row_multiple(&mut self, k: FieldDescriptor, target: usize, src: usize, f: &FieldElem) {
        for c in 0..self.cols {
            let v = k.add(self.get(target, c), &k.mul(f, self.get(src, c)));
            self.set(target, c, v);
        }
    }
}

/// Solution set of `A·x = b`: a particular solution plus a kernel basis,
/// or `None` when the system is inconsistent.
pub fn solve_affine(
    k: FieldDescriptor,
    a: &Matrix,
    b: &[FieldElem],
) -> Result<Option<(Vec<FieldElem>, Vec<Vec<FieldElem>>)>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch("right-hand side length".into()));
    }
    let (rows, cols) = (a.rows(), a.cols());
    // augmented matrix in reduced row echelon form
    let mut m = Matrix::zeros(k, rows, cols + 1);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, a.get(i, j).clone());
        }
        m.set(i, cols, b[i].clone());
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !k.is_zero(m.get(i, c))) else {
            continue;
        };
        m.swap_rows(r, p);
        let pinv = k.inv(m.get(r, c))?;
        m.scale_row(k, r, &pinv);
        for i in 0..rows {
            if i != r && !k.is_zero(m.get(i, c)) {
                let f = k.neg(m.get(i, c));
                m.add_row_multiple(k, i, r, &f);
            }
        }
        pivots.push(c);
        r += 1;
    }
    if (r..rows).any(|i| !k.is_zero(m.get(i, cols))) {
        return Ok(None);
    }
    let mut particular = vec![k.zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        particular[c] = m.get(i, cols).clone();
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let kernel = free
        .iter()
        .map(|&f| {
            let mut v = vec![k.zero(); cols];
            v[f] = k.one();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = k.neg(m.get(i, f));
            }
            v
        })
        .collect();
    Ok(Some((particular, kernel)))
}

/// Rank of the matrix whose rows are `vectors`.
pub fn rank(k: FieldDescriptor, vectors: &[Vec<FieldElem>]) -> Result<usize> {
    if vectors.is_empty() {
        return Ok(0);
    }
    let m = Matrix::from_rows(vectors.to_vec())?;
    let (_, kernel) = solve_affine(k, &m.transpose(), &vec![k.zero(); m.cols()])?
        .expect("homogeneous systems are consistent");
    Ok(m.rows() - kernel.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;

    fn q(n: i64) -> FieldElem {
        FieldElem::Rat(int(n))
    }

    #[test]
    fn inverse_roundtrip() {
        let k = FieldDescriptor::Rationals;
        let m = Matrix::from_rows(vec![
            vec![q(2), q(1), q(0)],
            vec![q(1), q(3), q(1)],
            vec![q(0), q(1), q(4)],
        ])
        .unwrap();
        let inv = m.inverse(k).unwrap();
        assert_eq!(m.mul(k, &inv).unwrap(), Matrix::identity(k, 3));
        let sing = Matrix::from_rows(vec![vec![q(1), q(2)], vec![q(2), q(4)]]).unwrap();
        assert_eq!(sing.inverse(k), Err(Error::SingularForm));
    }

    #[test]
    fn affine_solutions() {
        let k = FieldDescriptor::FinitePrime(7);
        let r = |n| k.from_int(n);
        let a = Matrix::from_rows(vec![vec![r(1), r(2), r(3)], vec![r(2), r(4), r(6)]]).unwrap();
        let (x0, ker) = solve_affine(k, &a, &[r(1), r(2)]).unwrap().unwrap();
        assert_eq!(a.mul_vec(k, &x0), vec![r(1), r(2)]);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert_eq!(a.mul_vec(k, v), vec![r(0), r(0)]);
        }
        assert!(solve_affine(k, &a, &[r(1), r(3)]).unwrap().is_none());
        assert_eq!(rank(k, &a.to_rows()).unwrap(), 1);
    }
}
