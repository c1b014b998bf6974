use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::field::Field;

/// A sparse vector: entries sorted by index, no explicit zeros.
pub type SparseVec<E> = Vec<(usize, E)>;

/// `a + c * b` on sorted sparse vectors.
pub fn axpy<F: Field>(f: &F, a: &[(usize, F::Elem)], c: &F::Elem, b: &[(usize, F::Elem)]) -> SparseVec<F::Elem> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            let v = f.mul(c, &b[j].1);
            if !f.is_zero(&v) {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let v = f.add(&a[i].1, &f.mul(c, &b[j].1));
            if !f.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Sorts and merges duplicate indices, dropping zeros.
pub fn normalize<F: Field>(f: &F, mut v: Vec<(usize, F::Elem)>) -> SparseVec<F::Elem> {
    v.sort_by_key(|e| e.0);
    let mut out: SparseVec<F::Elem> = Vec::with_capacity(v.len());
    for (c, x) in v {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 = f.add(&last.1, &x),
            _ => out.push((c, x)),
        }
    }
    out.retain(|e| !f.is_zero(&e.1));
    out
}

/// Row-major sparse matrix. The field is passed to every arithmetic
/// operation rather than stored.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec<E>>,
}

impl<E: fmt::Debug> fmt::Debug for Matrix<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} {:?}", self.rows, self.cols, self.data)
    }
}

impl<E: Clone> Matrix<E> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, r: usize) -> &[(usize, E)] {
        &self.data[r]
    }

    pub fn row_vecs(&self) -> &[SparseVec<E>] {
        &self.data
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    /// Builds from rows that are already sorted sparse vectors.
    pub fn from_sparse_rows(rows: usize, cols: usize, data: Vec<SparseVec<E>>) -> Self {
        debug_assert_eq!(data.len(), rows);
        debug_assert!(data.iter().all(|r| r.iter().all(|e| e.0 < cols)));
        Matrix { rows, cols, data }
    }

    pub fn transpose(&self) -> Self {
        let mut data: Vec<SparseVec<E>> = vec![Vec::new(); self.cols];
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                data[*c].push((r, v.clone()));
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// The columns as sparse vectors.
    pub fn columns(&self) -> Vec<SparseVec<E>> {
        self.transpose().data
    }

    pub fn from_columns(rows: usize, cols: Vec<SparseVec<E>>) -> Self {
        let n = cols.len();
        Matrix {
            rows: n,
            cols: rows,
            data: cols,
        }
        .transpose()
    }

    pub fn map<G: Clone>(&self, g: impl Fn(&E) -> G) -> Matrix<G> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|r| r.iter().map(|(c, v)| (*c, g(v))).collect())
                .collect(),
        }
    }

    /// Columns selected by index, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let cols = self.columns();
        Matrix::from_columns(self.rows, idx.iter().map(|&i| cols[i].clone()).collect())
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "hstack of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let mut r = a.clone();
                r.extend(b.iter().map(|(c, v)| (c + self.cols, v.clone())));
                r
            })
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols + other.cols,
            data,
        })
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "vstack of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }
}

impl<E: Clone + PartialEq> Matrix<E> {
    pub fn get<F: Field<Elem = E>>(&self, f: &F, r: usize, c: usize) -> E {
        match self.data[r].binary_search_by_key(&c, |e| e.0) {
            Ok(k) => self.data[r][k].1.clone(),
            Err(_) => f.zero(),
        }
    }
}

impl<E: Clone + PartialEq + fmt::Debug> Matrix<E> {
    pub fn identity<F: Field<Elem = E>>(f: &F, n: usize) -> Self {
        Matrix {
            rows: n,
            cols: n,
            data: (0..n).map(|i| vec![(i, f.one())]).collect(),
        }
    }

    /// Diagonal matrix of signs.
    pub fn signed_identity<F: Field<Elem = E>>(f: &F, n: usize, negative: bool) -> Self {
        let s = f.sign(negative);
        Matrix {
            rows: n,
            cols: n,
            data: (0..n).map(|i| vec![(i, s.clone())]).collect(),
        }
    }

    pub fn from_triplets<F: Field<Elem = E>>(
        f: &F,
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, E)>,
    ) -> Self {
        let mut data: Vec<Vec<(usize, E)>> = vec![Vec::new(); rows];
        for (r, c, v) in entries {
            assert!(r < rows && c < cols, "entry ({r},{c}) outside {rows}x{cols}");
            data[r].push((c, v));
        }
        Matrix {
            rows,
            cols,
            data: data.into_iter().map(|r| normalize(f, r)).collect(),
        }
    }

    pub fn from_dense<F: Field<Elem = E>>(f: &F, rows: &[Vec<E>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged dense matrix".into()));
        }
        Ok(Self::from_dense_shape(f, rows.len(), cols, rows))
    }

    /// Like `from_dense` but keeps the shape when there are no rows.
    pub fn from_dense_shape<F: Field<Elem = E>>(f: &F, nrows: usize, ncols: usize, rows: &[Vec<E>]) -> Self {
        let data = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| !f.is_zero(v))
                    .map(|(c, v)| (c, v.clone()))
                    .collect()
            })
            .collect();
        Matrix {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn from_i64<F: Field<Elem = E>>(f: &F, rows: &[Vec<i64>]) -> Self {
        let conv: Vec<Vec<E>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| f.from_i64(x)).collect())
            .collect();
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_dense_shape(f, rows.len(), cols, &conv)
    }

    pub fn to_dense<F: Field<Elem = E>>(&self, f: &F) -> Vec<Vec<E>> {
        let mut out = vec![vec![f.zero(); self.cols]; self.rows];
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                out[r][*c] = v.clone();
            }
        }
        out
    }

    pub fn mul<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc: SparseVec<E> = Vec::new();
                for (k, a) in row {
                    acc = axpy(f, &acc, a, &other.data[*k]);
                }
                acc
            })
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    /// Product that panics on shape mismatch; for internal use where shapes
    /// are known by construction.
    pub fn compose<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        self.mul(f, other).expect("composable shapes")
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Result<Self> {
        self.add_scaled(f, &f.one(), other)
    }

    pub fn sub<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Result<Self> {
        self.add_scaled(f, &f.neg(&f.one()), other)
    }

    /// `self + c * other`
    pub fn add_scaled<F: Field<Elem = E>>(&self, f: &F, c: &E, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "sum of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| axpy(f, a, c, b))
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale<F: Field<Elem = E>>(&self, f: &F, c: &E) -> Self {
        if f.is_zero(c) {
            return Matrix::zero(self.rows, self.cols);
        }
        self.map(|v| f.mul(c, v))
    }

    pub fn neg<F: Field<Elem = E>>(&self, f: &F) -> Self {
        self.map(|v| f.neg(v))
    }

    /// Multiplies by -1 when `negative`.
    pub fn signed<F: Field<Elem = E>>(&self, f: &F, negative: bool) -> Self {
        if negative {
            self.neg(f)
        } else {
            self.clone()
        }
    }

    /// Kronecker product: entry ((r1, r2), (c1, c2)) at row `r1 * b.rows + r2`.
    pub fn kron<F: Field<Elem = E>>(&self, f: &F, b: &Self) -> Self {
        let mut data = Vec::with_capacity(self.rows * b.rows);
        for ra in &self.data {
            for rb in &b.data {
                let mut row = Vec::with_capacity(ra.len() * rb.len());
                for (ca, va) in ra {
                    for (cb, vb) in rb {
                        row.push((ca * b.cols + cb, f.mul(va, vb)));
                    }
                }
                data.push(row);
            }
        }
        Matrix {
            rows: self.rows * b.rows,
            cols: self.cols * b.cols,
            data,
        }
    }

    pub fn mul_vec<F: Field<Elem = E>>(&self, f: &F, v: &[(usize, E)]) -> SparseVec<E> {
        // Column-oriented: gather by scanning rows.
        let mut out = Vec::new();
        for (r, row) in self.data.iter().enumerate() {
            let mut acc = f.zero();
            let (mut i, mut j) = (0, 0);
            while i < row.len() && j < v.len() {
                match row[i].0.cmp(&v[j].0) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        acc = f.add(&acc, &f.mul(&row[i].1, &v[j].1));
                        i += 1;
                        j += 1;
                    }
                }
            }
            if !f.is_zero(&acc) {
                out.push((r, acc));
            }
        }
        out
    }

    /// Copies `block` into a larger matrix at the given offsets.
    pub fn place_into(
        &self,
        entries: &mut Vec<(usize, usize, E)>,
        row_offset: usize,
        col_offset: usize,
    ) {
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                entries.push((r + row_offset, c + col_offset, v.clone()));
            }
        }
    }
}

/// Incrementally assembles a sparse matrix from blocks.
pub struct MatrixBuilder<E> {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, E)>,
}

impl<E: Clone + PartialEq + fmt::Debug> MatrixBuilder<E> {
    pub fn new(rows: usize, cols: usize) -> Self {
        MatrixBuilder {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, r: usize, c: usize, v: E) {
        debug_assert!(r < self.rows && c < self.cols);
        self.entries.push((r, c, v));
    }

    pub fn block(&mut self, m: &Matrix<E>, row_offset: usize, col_offset: usize) {
        debug_assert!(row_offset + m.rows() <= self.rows && col_offset + m.cols() <= self.cols);
        m.place_into(&mut self.entries, row_offset, col_offset);
    }

    pub fn build<F: Field<Elem = E>>(self, f: &F) -> Matrix<E> {
        Matrix::from_triplets(f, self.rows, self.cols, self.entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::field::{PrimeField, Rationals};

    #[test]
    fn product_and_transpose() {
        let q = Rationals;
        let a = Matrix::from_i64(&q, &[vec![1, 2], vec![0, 1]]);
        let b = Matrix::from_i64(&q, &[vec![1, 0], vec![3, 1]]);
        let ab = a.mul(&q, &b).unwrap();
        assert_eq!(ab, Matrix::from_i64(&q, &[vec![7, 2], vec![3, 1]]));
        assert_eq!(ab.transpose().transpose(), ab);
        assert!(a.mul(&q, &Matrix::zero(3, 1)).is_err());
    }

    #[test]
    fn kronecker_layout() {
        let f = PrimeField::new(7).unwrap();
        let a = Matrix::from_i64(&f, &[vec![1, 2]]);
        let b = Matrix::from_i64(&f, &[vec![3], vec![4]]);
        let k = a.kron(&f, &b);
        assert_eq!(k.to_dense(&f), vec![vec![3, 6], vec![4, 1]]);
    }

    #[test]
    fn triplets_merge_duplicates() {
        let f = PrimeField::new(5).unwrap();
        let m = Matrix::from_triplets(&f, 1, 2, vec![(0, 1, 2), (0, 1, 3), (0, 0, 1)]);
        assert_eq!(m.row(0), &[(0, 1)]);
    }
}
