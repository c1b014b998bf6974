//! Bigraded complexes with internal-degree-preserving differentials and
//! their per-bidegree cohomology.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{extend_basis, kernel, rank, Field, Matrix, MatrixBuilder};

/// (cohomological degree, internal degree)
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bidegree {
    pub i: i64,
    pub j: i64,
}

impl Bidegree {
    pub const ZERO: Bidegree = Bidegree { i: 0, j: 0 };

    pub const fn new(i: i64, j: i64) -> Self {
        Bidegree { i, j }
    }

    /// The bidegree one step up in cohomological degree.
    pub fn next(self) -> Self {
        Bidegree::new(self.i + 1, self.j)
    }

    pub fn prev(self) -> Self {
        Bidegree::new(self.i - 1, self.j)
    }

    pub fn neg(self) -> Self {
        Bidegree::new(-self.i, -self.j)
    }

    pub fn is_odd(self) -> bool {
        self.i.rem_euclid(2) == 1
    }
}

impl std::ops::Add for Bidegree {
    type Output = Bidegree;
    fn add(self, o: Bidegree) -> Bidegree {
        Bidegree::new(self.i + o.i, self.j + o.j)
    }
}

impl std::ops::Sub for Bidegree {
    type Output = Bidegree;
    fn sub(self, o: Bidegree) -> Bidegree {
        Bidegree::new(self.i - o.i, self.j - o.j)
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

impl FromStr for Bidegree {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("'{s}' is not a bidegree \"(i,j)\""));
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        Ok(Bidegree::new(
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ))
    }
}

/// Inclusive range of internal degrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub j_min: i64,
    pub j_max: i64,
}

impl Window {
    pub fn new(j_min: i64, j_max: i64) -> Result<Self> {
        if j_min > j_max {
            return Err(Error::Parse(format!("empty window [{j_min}, {j_max}]")));
        }
        Ok(Window { j_min, j_max })
    }

    /// Panics on an empty range; for literal windows in code.
    pub fn of(j_min: i64, j_max: i64) -> Self {
        Window::new(j_min, j_max).expect("nonempty window")
    }

    pub fn contains(&self, j: i64) -> bool {
        self.j_min <= j && j <= self.j_max
    }

    pub fn covers(&self, other: &Window) -> bool {
        self.j_min <= other.j_min && other.j_max <= self.j_max
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.j_min..=self.j_max
    }

    pub fn shifted(&self, m: i64) -> Window {
        Window::of(self.j_min + m, self.j_max + m)
    }

    pub fn negated(&self) -> Window {
        Window::of(-self.j_max, -self.j_min)
    }

    pub fn intersect(&self, other: &Window) -> Option<Window> {
        Window::new(self.j_min.max(other.j_min), self.j_max.min(other.j_max)).ok()
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.j_min, self.j_max)
    }
}

impl FromStr for Window {
    type Err = Error;
    /// "jmin:jmax"
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("'{s}' is not a window \"jmin:jmax\""));
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        Window::new(
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        )
    }
}

/// Finite bigraded complex. `diff[b]` is the block from `b` to `b.next()`;
/// absent blocks are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BigradedComplex<E> {
    pub dims: BTreeMap<Bidegree, usize>,
    pub diff: BTreeMap<Bidegree, Matrix<E>>,
}

impl<E: Clone + PartialEq + fmt::Debug> Default for BigradedComplex<E> {
    fn default() -> Self {
        BigradedComplex {
            dims: BTreeMap::new(),
            diff: BTreeMap::new(),
        }
    }
}

impl<E: Clone + PartialEq + fmt::Debug + Send + Sync> BigradedComplex<E> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self, b: Bidegree) -> usize {
        self.dims.get(&b).copied().unwrap_or(0)
    }

    pub fn set_dim(&mut self, b: Bidegree, d: usize) {
        if d == 0 {
            self.dims.remove(&b);
        } else {
            self.dims.insert(b, d);
        }
    }

    /// The differential block at `b`, zero when absent.
    pub fn d(&self, b: Bidegree) -> Matrix<E> {
        match self.diff.get(&b) {
            Some(m) => m.clone(),
            None => Matrix::zero(self.dim(b.next()), self.dim(b)),
        }
    }

    pub fn set_d(&mut self, b: Bidegree, m: Matrix<E>) {
        debug_assert_eq!(m.shape(), (self.dim(b.next()), self.dim(b)), "block at {b}");
        if m.is_zero() {
            self.diff.remove(&b);
        } else {
            self.diff.insert(b, m);
        }
    }

    pub fn internal_degrees(&self) -> BTreeSet<i64> {
        self.dims.keys().map(|b| b.j).collect()
    }

    /// Cohomological degrees occupied at internal degree `j`, ascending.
    pub fn slice(&self, j: i64) -> Vec<i64> {
        self.dims
            .range(Bidegree::new(i64::MIN, j)..=Bidegree::new(i64::MAX, j))
            .filter(|(b, _)| b.j == j)
            .map(|(b, _)| b.i)
            .collect()
    }

    pub fn check_shapes(&self) -> Result<()> {
        for (b, m) in &self.diff {
            if m.shape() != (self.dim(b.next()), self.dim(*b)) {
                return Err(Error::DimensionMismatch(format!(
                    "differential block at {b} has shape {:?}, expected {:?}",
                    m.shape(),
                    (self.dim(b.next()), self.dim(*b))
                )));
            }
        }
        Ok(())
    }

    pub fn check_square_zero<F: Field<Elem = E>>(&self, f: &F) -> Result<()> {
        self.check_shapes()?;
        for (b, m) in &self.diff {
            if let Some(next) = self.diff.get(&b.next()) {
                if !next.compose(f, m).is_zero() {
                    return Err(Error::NotSquareZero(*b));
                }
            }
        }
        Ok(())
    }

    /// Restriction to internal degrees in `w`.
    pub fn restrict(&self, w: &Window) -> Self {
        BigradedComplex {
            dims: self
                .dims
                .iter()
                .filter(|(b, _)| w.contains(b.j))
                .map(|(b, d)| (*b, *d))
                .collect(),
            diff: self
                .diff
                .iter()
                .filter(|(b, _)| w.contains(b.j))
                .map(|(b, m)| (*b, m.clone()))
                .collect(),
        }
    }

    pub fn euler_characteristic(&self, j: i64) -> i64 {
        self.slice(j)
            .into_iter()
            .map(|i| sign_i64(i) * self.dim(Bidegree::new(i, j)) as i64)
            .sum()
    }
}

pub(crate) fn sign_i64(i: i64) -> i64 {
    if i.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Degree-(0,0) map between complexes; absent blocks are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMap<E> {
    pub blocks: BTreeMap<Bidegree, Matrix<E>>,
}

impl<E: Clone + PartialEq + fmt::Debug + Send + Sync> ComplexMap<E> {
    pub fn new() -> Self {
        ComplexMap {
            blocks: BTreeMap::new(),
        }
    }

    pub fn block(&self, b: Bidegree, rows: usize, cols: usize) -> Matrix<E> {
        match self.blocks.get(&b) {
            Some(m) => m.clone(),
            None => Matrix::zero(rows, cols),
        }
    }

    pub fn identity<F: Field<Elem = E>>(f: &F, c: &BigradedComplex<E>) -> Self {
        ComplexMap {
            blocks: c
                .dims
                .iter()
                .map(|(b, d)| (*b, Matrix::identity(f, *d)))
                .collect(),
        }
    }

    /// Checks block shapes and `d f = f d` at every bidegree where both
    /// complexes are stored (internal degree in `w`).
    pub fn check_chain_map<F: Field<Elem = E>>(
        &self,
        f: &F,
        source: &BigradedComplex<E>,
        target: &BigradedComplex<E>,
        w: &Window,
    ) -> Result<()> {
        for (b, m) in &self.blocks {
            if m.shape() != (target.dim(*b), source.dim(*b)) {
                return Err(Error::InvalidMap(format!(
                    "block at {b} has shape {:?}, expected {:?}",
                    m.shape(),
                    (target.dim(*b), source.dim(*b))
                )));
            }
        }
        for b in source.dims.keys().filter(|b| w.contains(b.j)) {
            let fb = self.block(*b, target.dim(*b), source.dim(*b));
            let fnext = self.block(b.next(), target.dim(b.next()), source.dim(b.next()));
            let lhs = target.d(*b).compose(f, &fb);
            let rhs = fnext.compose(f, &source.d(*b));
            if lhs != rhs {
                return Err(Error::NotChainMap(format!("d f != f d at {b}")));
            }
        }
        Ok(())
    }
}

impl<E: Clone + PartialEq + fmt::Debug + Send + Sync> Default for ComplexMap<E> {
    fn default() -> Self {
        Self::new()
    }
}

/// Cohomology dimensions, with optional cycle representatives whose classes
/// form a basis.
#[derive(Clone, Debug, PartialEq)]
pub struct CohomologyTable<E> {
    pub dims: BTreeMap<Bidegree, usize>,
    pub representatives: Option<BTreeMap<Bidegree, Matrix<E>>>,
}

/// Dimension table without representatives; the common currency of checks.
pub type Table = BTreeMap<Bidegree, usize>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub i: i64,
    pub j: i64,
    pub dim: usize,
}

impl<E> CohomologyTable<E> {
    pub fn dim(&self, b: Bidegree) -> usize {
        self.dims.get(&b).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn hilbert(&self) -> Vec<(i64, i64, usize)> {
        hilbert(&self.dims)
    }

    pub fn table(&self) -> Table {
        self.dims.clone()
    }
}

/// Sorted triples (i, j, dim) with zero entries omitted.
pub fn hilbert(t: &Table) -> Vec<(i64, i64, usize)> {
    let mut v: Vec<_> = t
        .iter()
        .filter(|(_, d)| **d > 0)
        .map(|(b, d)| (b.i, b.j, *d))
        .collect();
    v.sort_by_key(|&(i, j, _)| (j, i));
    v.dedup();
    v
}

pub fn table_entries(t: &Table) -> Vec<TableEntry> {
    hilbert(t)
        .into_iter()
        .map(|(i, j, dim)| TableEntry { i, j, dim })
        .collect()
}

pub fn table_to_csv(t: &Table) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["i", "j", "dim"]).expect("in-memory write");
    for e in table_entries(t) {
        w.serialize((e.i, e.j, e.dim)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

pub fn table_to_text(t: &Table) -> String {
    let mut s = String::new();
    for (i, j, d) in hilbert(t) {
        s.push_str(&format!("{i:>5} {j:>5} {d:>6}\n"));
    }
    s
}

/// Table of `C[n]<m>` given the table of `C`.
pub fn shift_twist_table(t: &Table, n: i64, m: i64) -> Table {
    t.iter()
        .map(|(b, d)| (Bidegree::new(b.i - n, b.j + m), *d))
        .collect()
}

pub fn restrict_table(t: &Table, w: &Window) -> Table {
    t.iter()
        .filter(|(b, d)| w.contains(b.j) && **d > 0)
        .map(|(b, d)| (*b, *d))
        .collect()
}

/// Table regraded by (i, j) -> (i + j, j).
pub fn xi_table(t: &Table) -> Table {
    t.iter()
        .map(|(b, d)| (Bidegree::new(b.i + b.j, b.j), *d))
        .collect()
}

fn slice_dims<E: Clone + PartialEq + fmt::Debug + Send + Sync, F: Field<Elem = E>>(
    f: &F,
    c: &BigradedComplex<E>,
    j: i64,
) -> Vec<(Bidegree, usize)> {
    let mut out = Vec::new();
    for i in c.slice(j) {
        let b = Bidegree::new(i, j);
        let dim = c.dim(b);
        let r_out = c.diff.get(&b).map_or(0, |m| rank(f, m));
        let r_in = c.diff.get(&b.prev()).map_or(0, |m| rank(f, m));
        let h = dim - r_out - r_in;
        if h > 0 {
            out.push((b, h));
        }
    }
    out
}

/// Exact cohomology dimensions for every internal degree in `w`. Internal
/// degrees are processed in parallel.
pub fn cohomology<F: Field>(
    f: &F,
    c: &BigradedComplex<F::Elem>,
    w: &Window,
) -> Result<CohomologyTable<F::Elem>> {
    let c = c.restrict(w);
    c.check_square_zero(f)?;
    let js: Vec<i64> = c.internal_degrees().into_iter().collect();
    let parts: Vec<Vec<(Bidegree, usize)>> = js.par_iter().map(|&j| slice_dims(f, &c, j)).collect();
    Ok(CohomologyTable {
        dims: parts.into_iter().flatten().collect(),
        representatives: None,
    })
}

/// Columns of cycles whose classes form a basis of H at `b`.
pub fn representatives_at<F: Field>(
    f: &F,
    c: &BigradedComplex<F::Elem>,
    b: Bidegree,
) -> Matrix<F::Elem> {
    let z = kernel(f, &c.d(b));
    let boundaries = c.d(b.prev());
    let chosen = extend_basis(f, &boundaries, &z);
    z.select_columns(&chosen)
}

/// Cohomology with representatives.
pub fn cohomology_with_representatives<F: Field>(
    f: &F,
    c: &BigradedComplex<F::Elem>,
    w: &Window,
) -> Result<CohomologyTable<F::Elem>> {
    let c = c.restrict(w);
    c.check_square_zero(f)?;
    let bs: Vec<Bidegree> = c.dims.keys().copied().collect();
    let reps: Vec<(Bidegree, Matrix<F::Elem>)> = bs
        .par_iter()
        .map(|&b| (b, representatives_at(f, &c, b)))
        .filter(|(_, m)| m.cols() > 0)
        .collect();
    Ok(CohomologyTable {
        dims: reps.iter().map(|(b, m)| (*b, m.cols())).collect(),
        representatives: Some(reps.into_iter().collect()),
    })
}

/// `C[n]`: dims'(i,j) = dims(i+n,j) and d' = (-1)^n d.
pub fn shift<E: Clone + PartialEq + fmt::Debug + Send + Sync, F: Field<Elem = E>>(
    f: &F,
    c: &BigradedComplex<E>,
    n: i64,
) -> BigradedComplex<E> {
    let odd = n.rem_euclid(2) == 1;
    BigradedComplex {
        dims: c
            .dims
            .iter()
            .map(|(b, d)| (Bidegree::new(b.i - n, b.j), *d))
            .collect(),
        diff: c
            .diff
            .iter()
            .map(|(b, m)| (Bidegree::new(b.i - n, b.j), m.signed(f, odd)))
            .collect(),
    }
}

/// `C<m>`: dims'(i,j) = dims(i,j-m), differential unchanged.
pub fn twist<E: Clone + PartialEq + fmt::Debug + Send + Sync>(
    c: &BigradedComplex<E>,
    m: i64,
) -> BigradedComplex<E> {
    BigradedComplex {
        dims: c
            .dims
            .iter()
            .map(|(b, d)| (Bidegree::new(b.i, b.j + m), *d))
            .collect(),
        diff: c
            .diff
            .iter()
            .map(|(b, x)| (Bidegree::new(b.i, b.j + m), x.clone()))
            .collect(),
    }
}

/// Mapping cone of `map: source -> target`: source[1] ⊕ target with
/// d(a, b) = (-d a, map(a) + d b). In each bidegree the source part comes
/// first.
pub fn cone<F: Field>(
    f: &F,
    source: &BigradedComplex<F::Elem>,
    target: &BigradedComplex<F::Elem>,
    map: &ComplexMap<F::Elem>,
) -> Result<BigradedComplex<F::Elem>> {
    let mut bs: BTreeSet<Bidegree> = target.dims.keys().copied().collect();
    bs.extend(source.dims.keys().map(|b| b.prev()));
    for (b, m) in &map.blocks {
        if m.shape() != (target.dim(*b), source.dim(*b)) {
            return Err(Error::InvalidMap(format!("cone: block at {b} has wrong shape")));
        }
    }
    let mut out = BigradedComplex::new();
    for &b in &bs {
        out.set_dim(b, source.dim(b.next()) + target.dim(b));
    }
    for &b in &bs {
        let n = b.next();
        let (sa, ta) = (source.dim(b.next()), target.dim(b));
        let (sb, tb) = (source.dim(n.next()), target.dim(n));
        if sa + ta == 0 || sb + tb == 0 {
            continue;
        }
        let mut mb = MatrixBuilder::new(sb + tb, sa + ta);
        mb.block(&source.d(b.next()).neg(f), 0, 0);
        mb.block(&map.block(b.next(), target.dim(b.next()), sa), sb, 0);
        mb.block(&target.d(b), sb, sa);
        out.set_d(b, mb.build(f));
    }
    out.check_square_zero(f)?;
    Ok(out)
}

/// Whether `map` induces isomorphisms on cohomology at every bidegree with
/// internal degree in `w`.
pub fn is_quasi_iso<F: Field>(
    f: &F,
    source: &BigradedComplex<F::Elem>,
    target: &BigradedComplex<F::Elem>,
    map: &ComplexMap<F::Elem>,
    w: &Window,
) -> Result<bool> {
    let source = source.restrict(w);
    let target = target.restrict(w);
    source.check_square_zero(f)?;
    target.check_square_zero(f)?;
    let mut bs: BTreeSet<Bidegree> = source.dims.keys().copied().collect();
    bs.extend(target.dims.keys().copied());
    let bs: Vec<Bidegree> = bs.into_iter().collect();
    let results: Vec<bool> = bs
        .par_iter()
        .map(|&b| {
            let reps = representatives_at(f, &source, b);
            let t_cycles = target.dim(b) - target.diff.get(&b).map_or(0, |m| rank(f, m));
            let t_bound = target.diff.get(&b.prev()).map_or(0, |m| rank(f, m));
            let h_t = t_cycles - t_bound;
            if reps.cols() != h_t {
                return false;
            }
            if h_t == 0 {
                return true;
            }
            let images = map
                .block(b, target.dim(b), source.dim(b))
                .compose(f, &reps);
            extend_basis(f, &target.d(b.prev()), &images).len() == reps.cols()
        })
        .collect();
    Ok(results.into_iter().all(|x| x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{PrimeField, Rationals};

    fn point<F: Field>(f: &F, b: Bidegree, d: usize) -> BigradedComplex<F::Elem> {
        let _ = f;
        let mut c = BigradedComplex::new();
        c.set_dim(b, d);
        c
    }

    fn iso_pair<F: Field>(f: &F, scalar: i64) -> BigradedComplex<F::Elem> {
        let mut c = BigradedComplex::new();
        c.set_dim(Bidegree::new(0, 4), 1);
        c.set_dim(Bidegree::new(1, 4), 1);
        c.set_d(Bidegree::new(0, 4), Matrix::from_i64(f, &[vec![scalar]]));
        c
    }

    #[test]
    fn zero_differential_table_is_dims() {
        let q = Rationals;
        let mut c = point(&q, Bidegree::new(0, 0), 2);
        c.set_dim(Bidegree::new(-1, 2), 3);
        let t = cohomology(&q, &c, &Window::of(-5, 5)).unwrap();
        assert_eq!(t.dims, c.dims);
    }

    #[test]
    fn identity_differential_is_acyclic() {
        let q = Rationals;
        let c = iso_pair(&q, 1);
        assert!(cohomology(&q, &c, &Window::of(0, 10)).unwrap().is_empty());
    }

    #[test]
    fn square_zero_detected() {
        let q = Rationals;
        let mut c = iso_pair(&q, 1);
        c.set_dim(Bidegree::new(2, 4), 1);
        c.set_d(Bidegree::new(1, 4), Matrix::from_i64(&q, &[vec![1]]));
        let err = cohomology(&q, &c, &Window::of(4, 4)).unwrap_err();
        assert_eq!(err, Error::NotSquareZero(Bidegree::new(0, 4)));
    }

    #[test]
    fn shift_and_twist_bookkeeping() {
        let q = Rationals;
        let c = iso_pair(&q, 1);
        assert_eq!(shift(&q, &c, 0), c);
        assert_eq!(shift(&q, &shift(&q, &c, 1), -1), c);
        assert_eq!(twist(&c, 0), c);
        assert_eq!(twist(&shift(&q, &c, 3), 2), shift(&q, &twist(&c, 2), 3));
        let s = shift(&q, &c, 1);
        assert_eq!(s.dim(Bidegree::new(-1, 4)), 1);
        assert_eq!(s.d(Bidegree::new(-1, 4)), Matrix::from_i64(&q, &[vec![-1]]));
    }

    #[test]
    fn cones() {
        let q = Rationals;
        let c = iso_pair(&q, 2);
        let mut c2 = c.clone();
        c2.set_d(Bidegree::new(0, 4), Matrix::zero(1, 1));
        let id = ComplexMap::identity(&q, &c2);
        let cn = cone(&q, &c2, &c2, &id).unwrap();
        assert!(cohomology(&q, &cn, &Window::of(0, 4)).unwrap().is_empty());
        // cone of the zero map to the zero complex is c[1]
        let zero = BigradedComplex::new();
        let cz = cone(&q, &c, &zero, &ComplexMap::new()).unwrap();
        assert_eq!(cz, shift(&q, &c, 1));
    }

    #[test]
    fn cone_of_two_depends_on_characteristic() {
        // k --2--> k viewed as a map of one-term complexes at bidegree (0,0)
        fn run<F: Field>(f: &F) -> Table {
            let a = point(f, Bidegree::ZERO, 1);
            let mut m = ComplexMap::new();
            m.blocks.insert(Bidegree::ZERO, Matrix::from_i64(f, &[vec![2]]));
            let c = cone(f, &a, &a, &m).unwrap();
            cohomology(f, &c, &Window::of(0, 0)).unwrap().dims
        }
        assert!(run(&Rationals).is_empty());
        let t = run(&PrimeField::new(2).unwrap());
        assert_eq!(hilbert(&t), vec![(-1, 0, 1), (0, 0, 1)]);
    }

    #[test]
    fn quasi_isomorphism_basics() {
        let q = Rationals;
        let mut c = point(&q, Bidegree::ZERO, 2);
        c.set_dim(Bidegree::new(1, 0), 1);
        c.set_d(Bidegree::ZERO, Matrix::from_i64(&q, &[vec![1, 0]]));
        let w = Window::of(0, 0);
        assert!(is_quasi_iso(&q, &c, &c, &ComplexMap::identity(&q, &c), &w).unwrap());
        assert!(!is_quasi_iso(&q, &c, &c, &ComplexMap::new(), &w).unwrap());
    }

    #[test]
    fn hilbert_format() {
        let t: Table = BTreeMap::new();
        assert!(hilbert(&t).is_empty());
        let t: Table = [(Bidegree::ZERO, 1)].into_iter().collect();
        assert_eq!(hilbert(&t), vec![(0, 0, 1)]);
        assert_eq!(table_to_csv(&t), "i,j,dim\n0,0,1\n");
    }

    #[test]
    fn parse_formats() {
        assert_eq!("(-1, 2)".parse::<Bidegree>().unwrap(), Bidegree::new(-1, 2));
        assert_eq!("-6:0".parse::<Window>().unwrap(), Window::of(-6, 0));
        assert!("3:1".parse::<Window>().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        /// Random complex over F_3: a two-step differential built as d1 = A,
        /// d2 = B with B A = 0 by taking B from the left kernel.
        fn random_complex(seed: Vec<i64>, dims: (usize, usize, usize)) -> BigradedComplex<u64> {
            let f = PrimeField::new(3).unwrap();
            let (a, b, c) = dims;
            let mut it = seed.into_iter().cycle();
            let d0: Vec<Vec<i64>> = (0..b).map(|_| (0..a).map(|_| it.next().unwrap()).collect()).collect();
            let d0 = Matrix::from_dense_shape(&f, b, a, &d0.iter().map(|r| r.iter().map(|&x| f.from_i64(x)).collect()).collect::<Vec<_>>());
            // rows of d1 lie in the left kernel of d0
            let left = kernel(&f, &d0.transpose());
            let mut rows = Vec::new();
            for _ in 0..c {
                let mut acc: Vec<(usize, u64)> = Vec::new();
                for col in left.columns() {
                    let coef = f.from_i64(it.next().unwrap());
                    acc = crate::linalg::matrix::axpy(&f, &acc, &coef, &col);
                }
                rows.push(acc);
            }
            let d1 = Matrix::from_sparse_rows(c, b, rows);
            let mut cx = BigradedComplex::new();
            for (k, d) in [a, b, c].into_iter().enumerate() {
                cx.set_dim(Bidegree::new(k as i64 - 1, 2), d);
            }
            cx.set_d(Bidegree::new(-1, 2), d0);
            cx.set_d(Bidegree::new(0, 2), d1);
            cx
        }

        proptest! {
            #[test]
            fn euler_and_shift(seed in proptest::collection::vec(-2i64..3, 1..40), a in 0usize..4, b in 0usize..5, c in 0usize..4) {
                let f = PrimeField::new(3).unwrap();
                let cx = random_complex(seed, (a, b, c));
                let w = Window::of(2, 2);
                let h = cohomology(&f, &cx, &w).unwrap();
                let euler: i64 = h.dims.iter().map(|(b, d)| sign_i64(b.i) * *d as i64).sum();
                prop_assert_eq!(euler, cx.euler_characteristic(2));
                let hs = cohomology(&f, &shift(&f, &cx, 2), &w).unwrap();
                prop_assert_eq!(hs.dims, shift_twist_table(&h.dims, 2, 0));
                let ht = cohomology(&f, &twist(&cx, 4), &w.shifted(4)).unwrap();
                prop_assert_eq!(ht.dims, shift_twist_table(&h.dims, 0, 4));
            }

            #[test]
            fn cone_acyclic_iff_quasi_iso(seed in proptest::collection::vec(-2i64..3, 1..40), a in 0usize..3, b in 1usize..4, c in 0usize..3, s in 0i64..3) {
                let f = PrimeField::new(3).unwrap();
                let cx = random_complex(seed, (a, b, c));
                // multiplication by a scalar is a chain map
                let mut m = ComplexMap::new();
                for (bd, d) in &cx.dims {
                    m.blocks.insert(*bd, Matrix::signed_identity(&f, *d, false).scale(&f, &f.from_i64(s)));
                }
                let w = Window::of(2, 2);
                m.check_chain_map(&f, &cx, &cx, &w).unwrap();
                let qis = is_quasi_iso(&f, &cx, &cx, &m, &w).unwrap();
                let cn = cone(&f, &cx, &cx, &m).unwrap();
                let acyclic = cohomology(&f, &cn, &w).unwrap().is_empty();
                prop_assert_eq!(qis, acyclic);
            }
        }
    }
}
