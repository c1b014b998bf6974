//! Sparse Gaussian elimination: rank, kernel, image and solving.
//!
//! Pivots are always the leftmost surviving entry and rows are inserted in
//! a fixed order, so every basis produced here is a deterministic function
//! of the input matrix.

use crate::error::{Error, Result};
use crate::linalg::field::Field;
use crate::linalg::matrix::{axpy, Matrix, SparseVec};

const NO_PIVOT: usize = usize::MAX;

/// Row echelon form built one vector at a time. Stored rows have leading
/// coefficient 1 at their pivot and no entries to the left of it.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    field: F,
    rows: Vec<SparseVec<F::Elem>>,
    pivot_row: Vec<usize>,
}

impl<F: Field> Echelon<F> {
    pub fn new(field: &F, len: usize) -> Self {
        Echelon {
            field: field.clone(),
            rows: Vec::new(),
            pivot_row: vec![NO_PIVOT; len],
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Removes every pivot coordinate from `v`.
    pub fn reduce(&self, v: SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        self.reduce_tracked(v, |_, _| {})
    }

    fn reduce_tracked(
        &self,
        mut v: SparseVec<F::Elem>,
        mut on_step: impl FnMut(usize, &F::Elem),
    ) -> SparseVec<F::Elem> {
        let f = &self.field;
        let mut idx = 0;
        while idx < v.len() {
            let (col, ref coef) = v[idx];
            let r = self.pivot_row[col];
            if r == NO_PIVOT {
                idx += 1;
                continue;
            }
            let c = f.neg(coef);
            on_step(r, &c);
            // Entries left of `col` are untouched; the one at `col` cancels.
            let tail = axpy(f, &v[idx..], &c, &self.rows[r]);
            v.truncate(idx);
            v.extend(tail);
        }
        v
    }

    /// Inserts `v`; returns whether it was independent of the rows so far.
    pub fn insert(&mut self, v: SparseVec<F::Elem>) -> bool {
        let v = self.reduce(v);
        self.push_reduced(v)
    }

    fn push_reduced(&mut self, mut v: SparseVec<F::Elem>) -> bool {
        let Some(&(pivot, ref lead)) = v.first() else {
            return false;
        };
        let f = &self.field;
        let inv = f.inv(lead).expect("nonzero leading entry");
        if !f.is_one(&inv) {
            for e in v.iter_mut() {
                e.1 = f.mul(&e.1, &inv);
            }
        }
        self.pivot_row[pivot] = self.rows.len();
        self.rows.push(v);
        true
    }

    pub fn contains(&self, v: SparseVec<F::Elem>) -> bool {
        self.reduce(v).is_empty()
    }

    /// Pivot columns in insertion order.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r[0].0).collect()
    }

    /// Reduced row echelon form: rows sorted by pivot, with zeros above
    /// every pivot.
    pub fn into_rref(self) -> Vec<SparseVec<F::Elem>> {
        let f = self.field.clone();
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&r| self.rows[r][0].0);
        let mut rows = self.rows;
        let pivot_row = self.pivot_row;
        // Back-substitute from the last pivot to the first; rows with larger
        // pivots are already reduced when used.
        for &r in order.iter().rev() {
            let mut v = std::mem::take(&mut rows[r]);
            let mut idx = 1;
            while idx < v.len() {
                let (col, ref coef) = v[idx];
                let pr = pivot_row[col];
                if pr == NO_PIVOT {
                    idx += 1;
                    continue;
                }
                let c = f.neg(coef);
                let tail = axpy(&f, &v[idx..], &c, &rows[pr]);
                v.truncate(idx);
                v.extend(tail);
            }
            rows[r] = v;
        }
        order.into_iter().map(|r| std::mem::take(&mut rows[r])).collect()
    }
}

/// Echelon form that remembers how every stored row is expressed through
/// the inserted vectors.
#[derive(Clone, Debug)]
pub struct TrackedEchelon<F: Field> {
    inner: Echelon<F>,
    combos: Vec<SparseVec<F::Elem>>,
    inserted: usize,
}

impl<F: Field> TrackedEchelon<F> {
    pub fn new(field: &F, len: usize) -> Self {
        TrackedEchelon {
            inner: Echelon::new(field, len),
            combos: Vec::new(),
            inserted: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.inner.rank()
    }

    /// Reduces `v`; returns the remainder and coefficients `x` over the
    /// inserted vectors with `v = remainder + sum x_k input_k`.
    pub fn decompose(&self, v: SparseVec<F::Elem>) -> (SparseVec<F::Elem>, SparseVec<F::Elem>) {
        let f = &self.inner.field;
        let mut combo: SparseVec<F::Elem> = Vec::new();
        let rem = self.inner.reduce_tracked(v, |r, c| {
            // v <- v + c * row_r, and row_r = sum combos[r]; so v_orig picks up -c.
            combo = axpy(f, &combo, &f.neg(c), &self.combos[r]);
        });
        (rem, combo)
    }

    /// Inserts the next input vector. Returns `Ok(())` when independent, or
    /// `Err(relation)` with a vector `x` over the inputs, `x_new = 1`, such
    /// that `sum x_k input_k = 0`.
    pub fn insert(&mut self, v: SparseVec<F::Elem>) -> std::result::Result<(), SparseVec<F::Elem>> {
        let f = self.inner.field.clone();
        let id = self.inserted;
        self.inserted += 1;
        let (rem, combo) = self.decompose(v);
        // input_id = rem + combo  =>  rem = input_id - combo
        let mut own = combo.iter().map(|(k, x)| (*k, f.neg(x))).collect::<Vec<_>>();
        own.push((id, f.one()));
        if rem.is_empty() {
            return Err(own);
        }
        let lead = rem[0].1.clone();
        let inv = f.inv(&lead).expect("nonzero");
        let own: Vec<_> = own.into_iter().map(|(k, x)| (k, f.mul(&x, &inv))).collect();
        self.inner.push_reduced(rem);
        self.combos.push(own);
        Ok(())
    }
}

pub fn rank<F: Field>(f: &F, m: &Matrix<F::Elem>) -> usize {
    // Eliminate along the shorter side; sparse rows first to limit fill-in.
    let (vectors, len) = if m.rows() <= m.cols() {
        (m.row_vecs().to_vec(), m.cols())
    } else {
        (m.columns(), m.rows())
    };
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_by_key(|&k| (vectors[k].len(), k));
    let mut ech = Echelon::new(f, len);
    for k in order {
        if !vectors[k].is_empty() {
            ech.insert(vectors[k].clone());
        }
        if ech.rank() == len {
            break;
        }
    }
    ech.rank()
}

/// Basis of the null space of `m`, as the columns of the result.
pub fn kernel<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    let cols = m.cols();
    let mut ech = Echelon::new(f, cols);
    for row in m.row_vecs() {
        if !row.is_empty() {
            ech.insert(row.clone());
        }
    }
    let rref = ech.into_rref();
    let mut is_pivot = vec![false; cols];
    for r in &rref {
        is_pivot[r[0].0] = true;
    }
    let free: Vec<usize> = (0..cols).filter(|&c| !is_pivot[c]).collect();
    let mut free_index = vec![usize::MAX; cols];
    for (k, &c) in free.iter().enumerate() {
        free_index[c] = k;
    }
    let mut kcols: Vec<SparseVec<F::Elem>> = free.iter().map(|&c| vec![(c, f.one())]).collect();
    for r in &rref {
        let p = r[0].0;
        for (c, v) in &r[1..] {
            let k = free_index[*c];
            debug_assert!(k != usize::MAX);
            kcols[k].push((p, f.neg(v)));
        }
    }
    for col in kcols.iter_mut() {
        col.sort_by_key(|e| e.0);
    }
    Matrix::from_columns(cols, kcols)
}

/// Indices of a maximal set of columns of `m` that are independent, chosen
/// greedily from the left.
pub fn independent_columns<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Vec<usize> {
    let mut ech = Echelon::new(f, m.rows());
    let mut chosen = Vec::new();
    for (k, col) in m.columns().into_iter().enumerate() {
        if ech.insert(col) {
            chosen.push(k);
        }
    }
    chosen
}

/// A basis of the column space, drawn from the columns of `m`.
pub fn image<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    m.select_columns(&independent_columns(f, m))
}

pub fn rank_kernel_image<F: Field>(
    f: &F,
    m: &Matrix<F::Elem>,
) -> (usize, Matrix<F::Elem>, Matrix<F::Elem>) {
    let img = image(f, m);
    (img.cols(), kernel(f, m), img)
}

/// Solves `m x = target`. Returns `Ok(None)` when some column of `target`
/// is outside the column space of `m`.
pub fn solve<F: Field>(
    f: &F,
    m: &Matrix<F::Elem>,
    target: &Matrix<F::Elem>,
) -> Result<Option<Matrix<F::Elem>>> {
    if m.rows() != target.rows() {
        return Err(Error::DimensionMismatch(format!(
            "solve with {} rows against {} rows",
            m.rows(),
            target.rows()
        )));
    }
    let mut ech = TrackedEchelon::new(f, m.rows());
    for col in m.columns() {
        let _ = ech.insert(col);
    }
    let mut xs = Vec::with_capacity(target.cols());
    for t in target.columns() {
        let (rem, combo) = ech.decompose(t);
        if !rem.is_empty() {
            return Ok(None);
        }
        xs.push(combo);
    }
    Ok(Some(Matrix::from_columns(m.cols(), xs)))
}

/// Indices of the columns of `candidates` that extend the span of `base`
/// (greedily, left to right).
pub fn extend_basis<F: Field>(
    f: &F,
    base: &Matrix<F::Elem>,
    candidates: &Matrix<F::Elem>,
) -> Vec<usize> {
    let mut ech = Echelon::new(f, base.rows().max(candidates.rows()));
    for col in base.columns() {
        ech.insert(col);
    }
    let mut chosen = Vec::new();
    for (k, col) in candidates.columns().into_iter().enumerate() {
        if ech.insert(col) {
            chosen.push(k);
        }
    }
    chosen
}
