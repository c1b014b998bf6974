//! Generator complexes and the free graded-commutative dg-algebras on them.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::bigraded::{Bidegree, BigradedComplex};
use crate::error::{Error, Result};
use crate::linalg::matrix::normalize;
use crate::linalg::{Field, Matrix, SparseVec};

/// A finite complex of free modules `V^i` placed in one internal degree.
/// `diffs[i]` maps `V^i` to `V^{i+1}` (rows indexed by `V^{i+1}`).
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorComplex<E> {
    pub ranks: BTreeMap<i64, usize>,
    pub internal_degree: i64,
    pub diffs: BTreeMap<i64, Matrix<E>>,
}

impl<E: Clone + PartialEq + fmt::Debug + Send + Sync> GeneratorComplex<E> {
    pub fn new(internal_degree: i64) -> Self {
        GeneratorComplex {
            ranks: BTreeMap::new(),
            internal_degree,
            diffs: BTreeMap::new(),
        }
    }

    pub fn rank(&self, i: i64) -> usize {
        self.ranks.get(&i).copied().unwrap_or(0)
    }

    pub fn with_rank(mut self, i: i64, r: usize) -> Self {
        if r > 0 {
            self.ranks.insert(i, r);
        }
        self
    }

    pub fn with_diff(mut self, i: i64, m: Matrix<E>) -> Self {
        self.diffs.insert(i, m);
        self
    }

    pub fn d(&self, i: i64) -> Matrix<E> {
        self.diffs
            .get(&i)
            .cloned()
            .unwrap_or_else(|| Matrix::zero(self.rank(i + 1), self.rank(i)))
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    pub fn validate<F: Field<Elem = E>>(&self, f: &F) -> Result<()> {
        if self.internal_degree == 0 {
            return Err(Error::InvalidComplex("internal degree must be nonzero".into()));
        }
        for (i, m) in &self.diffs {
            if m.shape() != (self.rank(i + 1), self.rank(*i)) {
                return Err(Error::InvalidComplex(format!(
                    "differential at degree {i} has shape {:?}, expected {:?}",
                    m.shape(),
                    (self.rank(i + 1), self.rank(*i))
                )));
            }
        }
        for i in self.diffs.keys() {
            if let Some(next) = self.diffs.get(&(i + 1)) {
                if !next.compose(f, &self.diffs[i]).is_zero() {
                    return Err(Error::InvalidComplex(format!("d^2 != 0 at degree {i}")));
                }
            }
        }
        Ok(())
    }

    /// Validates the shape required of 𝒳: components in degrees [-n, 0],
    /// internal degree 2.
    pub fn validate_x<F: Field<Elem = E>>(&self, f: &F) -> Result<()> {
        self.validate(f)?;
        if self.internal_degree != 2 {
            return Err(Error::InvalidComplex("𝒳 must sit in internal degree 2".into()));
        }
        if let Some((&i, _)) = self.ranks.iter().find(|(i, r)| **i > 0 && **r > 0) {
            return Err(Error::InvalidComplex(format!(
                "𝒳 has a component in positive degree {i}"
            )));
        }
        Ok(())
    }

    /// Largest n with `V^{-n}` nonzero (0 for the zero complex).
    pub fn amplitude(&self) -> i64 {
        self.ranks
            .iter()
            .filter(|(_, r)| **r > 0)
            .map(|(i, _)| -i)
            .max()
            .unwrap_or(0)
            .max(0)
    }

    /// `G[n]`: components moved to degree `i - n`, differential times (-1)^n.
    pub fn shifted<F: Field<Elem = E>>(&self, f: &F, n: i64) -> Self {
        let odd = n.rem_euclid(2) == 1;
        GeneratorComplex {
            ranks: self.ranks.iter().map(|(i, r)| (i - n, *r)).collect(),
            internal_degree: self.internal_degree,
            diffs: self
                .diffs
                .iter()
                .map(|(i, m)| (i - n, m.signed(f, odd)))
                .collect(),
        }
    }

    pub fn map_field<G: Field>(&self, g: impl Fn(&E) -> G::Elem) -> GeneratorComplex<G::Elem> {
        GeneratorComplex {
            ranks: self.ranks.clone(),
            internal_degree: self.internal_degree,
            diffs: self.diffs.iter().map(|(i, m)| (*i, m.map(&g))).collect(),
        }
    }
}

/// 𝒴 = 𝒳^∨[-1]: `𝒴^k = (V^{1-k})^∨` in internal degree `-t`, with
/// differential `(-1)^k` times the transpose of `D_{-k}: V^{-k} -> V^{1-k}`.
pub fn build_y<F: Field>(f: &F, x: &GeneratorComplex<F::Elem>) -> Result<GeneratorComplex<F::Elem>> {
    x.validate(f)?;
    let mut y = GeneratorComplex::new(-x.internal_degree);
    for (i, r) in &x.ranks {
        if *r > 0 {
            y.ranks.insert(1 - i, *r);
        }
    }
    for (i, d) in &x.diffs {
        // D_i : V^i -> V^{i+1}; with i = -k it gives the block 𝒴^k -> 𝒴^{k+1}.
        let k = -i;
        let odd = k.rem_euclid(2) == 1;
        y.diffs.insert(k, d.transpose().signed(f, odd));
    }
    y.validate(f)?;
    check_pairing(f, x, &y)?;
    Ok(y)
}

/// ⟨d_𝒴 y, v⟩ = (-1)^{|y|} ⟨y, d_𝒳 v⟩ on all basis pairs.
pub fn check_pairing<F: Field>(
    f: &F,
    x: &GeneratorComplex<F::Elem>,
    y: &GeneratorComplex<F::Elem>,
) -> Result<()> {
    for (&k, &rk) in &y.ranks {
        let dy = y.d(k); // 𝒴^k -> 𝒴^{k+1} = (V^{-k})^∨
        let dx = x.d(-k); // V^{-k} -> V^{1-k}
        for a in 0..rk {
            for b in 0..x.rank(-k) {
                let lhs = dy.get(f, b, a);
                let rhs = f.mul(&f.sign(k.rem_euclid(2) == 1), &dx.get(f, a, b));
                if lhs != rhs {
                    return Err(Error::InvalidComplex(format!(
                        "pairing sign fails at 𝒴 degree {k}"
                    )));
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generator<E> {
    pub label: String,
    pub degree: Bidegree,
    /// Degree of the generator's component in the underlying complex.
    pub component: i64,
    pub index: usize,
    /// Image under the differential, over generator indices.
    pub diff: SparseVec<E>,
}

impl<E> Generator<E> {
    pub fn is_odd(&self) -> bool {
        self.degree.is_odd()
    }
}

/// Exponent vector over the generators; odd exponents are 0 or 1. The
/// monomial stands for the product of generators in index order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn generator(n: usize, g: usize) -> Self {
        let mut e = vec![0; n];
        e[g] = 1;
        Monomial(e)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn length(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Generator indices with repetition, in normal order.
    pub fn factors(&self) -> Vec<usize> {
        let mut v = Vec::new();
        for (g, &e) in self.0.iter().enumerate() {
            for _ in 0..e {
                v.push(g);
            }
        }
        v
    }
}

/// Monomial basis of one bidegree with its reverse index.
#[derive(Debug)]
pub struct BasisSlice {
    pub monomials: Vec<Monomial>,
    pub index: HashMap<Monomial, usize>,
}

impl BasisSlice {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
}

/// Free graded-commutative algebra on finitely many generators of nonzero
/// internal degree, all of the same sign.
pub struct SymDgAlgebra<F: Field> {
    field: F,
    generators: Vec<Generator<F::Elem>>,
    cache: RwLock<HashMap<Bidegree, Arc<BasisSlice>>>,
}

impl<F: Field> fmt::Debug for SymDgAlgebra<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymDgAlgebra")
            .field("generators", &self.generators)
            .finish()
    }
}

impl<F: Field> SymDgAlgebra<F> {
    pub fn new(field: &F, generators: Vec<Generator<F::Elem>>) -> Result<Self> {
        let pos = generators.iter().filter(|g| g.degree.j > 0).count();
        let neg = generators.iter().filter(|g| g.degree.j < 0).count();
        if pos + neg != generators.len() || (pos > 0 && neg > 0) {
            return Err(Error::InvalidComplex(
                "generators need nonzero internal degrees of one sign".into(),
            ));
        }
        for w in generators.windows(2) {
            if (w[0].degree.i, w[0].index) > (w[1].degree.i, w[1].index) {
                return Err(Error::InvalidComplex("generators not in normal order".into()));
            }
        }
        for (k, g) in generators.iter().enumerate() {
            for (h, _) in &g.diff {
                if *h >= generators.len() || generators[*h].degree != g.degree.next() {
                    return Err(Error::InvalidComplex(format!(
                        "differential of generator {k} does not have degree {}",
                        g.degree.next()
                    )));
                }
            }
        }
        let a = SymDgAlgebra {
            field: field.clone(),
            generators,
            cache: RwLock::new(HashMap::new()),
        };
        Ok(a)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn generators(&self) -> &[Generator<F::Elem>] {
        &self.generators
    }

    pub fn ngens(&self) -> usize {
        self.generators.len()
    }

    /// +1 if generators have positive internal degree, -1 if negative, 0
    /// for the ground field.
    pub fn direction(&self) -> i64 {
        self.generators.first().map_or(0, |g| g.degree.j.signum())
    }

    pub fn generator_by_label(&self, label: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.label == label)
    }

    pub fn generator_of(&self, component: i64, index: usize) -> Option<usize> {
        self.generators
            .iter()
            .position(|g| g.component == component && g.index == index)
    }

    /// Generators with zero differential.
    pub fn cycle_generators(&self) -> Vec<usize> {
        (0..self.ngens())
            .filter(|&g| self.generators[g].diff.is_empty())
            .collect()
    }

    pub fn degree_of(&self, m: &Monomial) -> Bidegree {
        let mut d = Bidegree::ZERO;
        for (g, &e) in m.0.iter().enumerate() {
            d.i += self.generators[g].degree.i * e as i64;
            d.j += self.generators[g].degree.j * e as i64;
        }
        d
    }

    pub fn one(&self) -> Monomial {
        Monomial::one(self.ngens())
    }

    /// All normal-ordered monomials of bidegree `b`, cached.
    pub fn basis(&self, b: Bidegree) -> Arc<BasisSlice> {
        if let Some(s) = self.cache.read().expect("cache lock").get(&b) {
            return s.clone();
        }
        let monomials = self.enumerate(b);
        let index = monomials
            .iter()
            .enumerate()
            .map(|(k, m)| (m.clone(), k))
            .collect();
        let slice = Arc::new(BasisSlice { monomials, index });
        // Concurrent fills compute identical values; keep whichever landed first.
        self.cache
            .write()
            .expect("cache lock")
            .entry(b)
            .or_insert(slice)
            .clone()
    }

    pub fn monomials(&self, b: Bidegree) -> Vec<Monomial> {
        self.basis(b).monomials.clone()
    }

    pub fn dim(&self, b: Bidegree) -> usize {
        self.basis(b).len()
    }

    fn enumerate(&self, b: Bidegree) -> Vec<Monomial> {
        let n = self.ngens();
        let mut out = Vec::new();
        if n == 0 {
            if b == Bidegree::ZERO {
                out.push(Monomial(Vec::new()));
            }
            return out;
        }
        let dir = self.direction();
        if b.j * dir < 0 {
            return out;
        }
        let mut exps = vec![0u32; n];
        self.enumerate_rec(0, b, &mut exps, &mut out);
        out
    }

    fn enumerate_rec(&self, g: usize, rem: Bidegree, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if g == self.ngens() {
            if rem == Bidegree::ZERO {
                out.push(Monomial(exps.clone()));
            }
            return;
        }
        let gd = self.generators[g].degree;
        let max_by_weight = (rem.j / gd.j).max(0) as u32;
        let max = if self.generators[g].is_odd() {
            max_by_weight.min(1)
        } else {
            max_by_weight
        };
        for e in 0..=max {
            exps[g] = e;
            let next = Bidegree::new(rem.i - gd.i * e as i64, rem.j - gd.j * e as i64);
            self.enumerate_rec(g + 1, next, exps, out);
        }
        exps[g] = 0;
    }

    /// Normal-ordered product: `None` when an odd generator repeats,
    /// otherwise (negative?, monomial).
    pub fn multiply(&self, a: &Monomial, b: &Monomial) -> Option<(bool, Monomial)> {
        let mut negative = false;
        let mut odd_in_a_above = 0u32;
        // Walk generators from the highest index down, counting odd factors
        // of `a` that each odd factor of `b` must pass.
        for g in (0..self.ngens()).rev() {
            if self.generators[g].is_odd() {
                if a.0[g] > 0 && b.0[g] > 0 {
                    return None;
                }
                if b.0[g] > 0 && odd_in_a_above % 2 == 1 {
                    negative = !negative;
                }
                odd_in_a_above += a.0[g];
            }
        }
        let e = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
        Some((negative, Monomial(e)))
    }

    /// Product of a monomial with a linear combination, accumulated.
    fn mul_into(
        &self,
        acc: &mut HashMap<Monomial, F::Elem>,
        coef: &F::Elem,
        a: &Monomial,
        b: &Monomial,
    ) {
        if let Some((neg, m)) = self.multiply(a, b) {
            let f = &self.field;
            let c = if neg { f.neg(coef) } else { coef.clone() };
            let e = acc.entry(m).or_insert_with(|| f.zero());
            *e = f.add(e, &c);
        }
    }

    /// Graded Leibniz expansion of d on a monomial.
    pub fn algebra_diff(&self, m: &Monomial) -> Vec<(Monomial, F::Elem)> {
        let f = &self.field;
        let n = self.ngens();
        let factors = m.factors();
        let mut acc: HashMap<Monomial, F::Elem> = HashMap::new();
        let mut prefix = Monomial::one(n);
        let mut prefix_odd = false;
        for (p, &g) in factors.iter().enumerate() {
            let mut suffix = Monomial::one(n);
            for &h in &factors[p + 1..] {
                suffix.0[h] += 1;
            }
            let sign = f.sign(prefix_odd);
            for (h, c) in &self.generators[g].diff {
                let Some((neg1, left)) = self.multiply(&prefix, &Monomial::generator(n, *h)) else {
                    continue;
                };
                let coef = f.mul(&sign, c);
                let coef = if neg1 { f.neg(&coef) } else { coef };
                self.mul_into(&mut acc, &coef, &left, &suffix);
            }
            prefix.0[g] += 1;
            if self.generators[g].is_odd() {
                prefix_odd = !prefix_odd;
            }
        }
        let mut out: Vec<_> = acc.into_iter().filter(|(_, c)| !f.is_zero(c)).collect();
        out.sort_by(|x, y| x.0.cmp(&y.0));
        out
    }

    /// Matrix of d from bidegree `b` to `b.next()`.
    pub fn diff_matrix(&self, b: Bidegree) -> Matrix<F::Elem> {
        let src = self.basis(b);
        let tgt = self.basis(b.next());
        let f = &self.field;
        let mut entries = Vec::new();
        for (c, m) in src.monomials.iter().enumerate() {
            for (t, v) in self.algebra_diff(m) {
                let r = tgt.index[&t];
                entries.push((r, c, v));
            }
        }
        Matrix::from_triplets(f, tgt.len(), src.len(), entries)
    }

    /// Matrix of left multiplication by monomial `t` from bidegree `b`.
    pub fn left_mul_matrix(&self, t: &Monomial, b: Bidegree) -> Matrix<F::Elem> {
        let f = &self.field;
        let src = self.basis(b);
        let tgt = self.basis(b + self.degree_of(t));
        let mut entries = Vec::new();
        for (c, m) in src.monomials.iter().enumerate() {
            if let Some((neg, p)) = self.multiply(t, m) {
                entries.push((tgt.index[&p], c, f.sign(neg)));
            }
        }
        Matrix::from_triplets(f, tgt.len(), src.len(), entries)
    }

    /// The algebra as a bigraded complex on the internal degrees of `w`.
    pub fn as_complex(&self, w: &crate::bigraded::Window) -> BigradedComplex<F::Elem> {
        let mut c = BigradedComplex::new();
        for j in w.degrees() {
            for i in self.cohomological_range(j) {
                let b = Bidegree::new(i, j);
                c.set_dim(b, self.dim(b));
            }
        }
        let keys: Vec<Bidegree> = c.dims.keys().copied().collect();
        for b in keys {
            if c.dim(b.next()) > 0 {
                c.set_d(b, self.diff_matrix(b));
            }
        }
        c
    }

    /// Cohomological degrees that can carry monomials of internal degree `j`.
    pub fn cohomological_range(&self, j: i64) -> std::ops::RangeInclusive<i64> {
        if self.ngens() == 0 || j * self.direction() < 0 {
            #[allow(clippy::reversed_empty_ranges)]
            let empty = 1..=0;
            return if j == 0 { 0..=0 } else { empty };
        }
        let min_w = self.generators.iter().map(|g| g.degree.j.abs()).min().unwrap();
        let len = j.abs() / min_w;
        let lo = self.generators.iter().map(|g| g.degree.i).min().unwrap().min(0);
        let hi = self.generators.iter().map(|g| g.degree.i).max().unwrap().max(0);
        (lo * len)..=(hi * len)
    }

    /// Whether d squares to zero on monomials of bidegree `b`.
    pub fn check_square_zero_at(&self, b: Bidegree) -> bool {
        let d1 = self.diff_matrix(b);
        let d2 = self.diff_matrix(b.next());
        d2.compose(&self.field, &d1).is_zero()
    }
}

/// Sym(G[shift]) with generator labels `{prefix}_{component}_{index}`,
/// where `component` is the degree in the unshifted complex `g`.
pub fn build_algebra<F: Field>(
    f: &F,
    g: &GeneratorComplex<F::Elem>,
    shift: i64,
    prefix: &str,
) -> Result<SymDgAlgebra<F>> {
    g.validate(f)?;
    let odd_shift = shift.rem_euclid(2) == 1;
    let mut gens = Vec::new();
    let mut offset: BTreeMap<i64, usize> = BTreeMap::new();
    for (&c, &r) in &g.ranks {
        offset.insert(c, gens.len());
        for k in 0..r {
            gens.push(Generator {
                label: format!("{prefix}_{c}_{k}"),
                degree: Bidegree::new(c - shift, g.internal_degree),
                component: c,
                index: k,
                diff: Vec::new(),
            });
        }
    }
    for (&c, &r) in &g.ranks {
        let d = g.d(c);
        let cols = d.columns();
        for k in 0..r {
            let Some(&base) = offset.get(&(c + 1)) else {
                continue;
            };
            let img: Vec<(usize, F::Elem)> = cols[k]
                .iter()
                .map(|(row, v)| (base + row, if odd_shift { f.neg(v) } else { v.clone() }))
                .collect();
            gens[offset[&c] + k].diff = normalize(f, img);
        }
    }
    SymDgAlgebra::new(f, gens)
}

/// ℛ from 𝒮: every generator moves from (c, t) to (c + t, t); labels and
/// differentials are kept.
pub fn regrade_xi<F: Field>(s: &SymDgAlgebra<F>) -> Result<SymDgAlgebra<F>> {
    if s.direction() > 0 {
        return Err(Error::InvalidComplex(
            "regrading expects an algebra with negative internal degrees".into(),
        ));
    }
    let gens = s
        .generators()
        .iter()
        .map(|g| Generator {
            degree: Bidegree::new(g.degree.i + g.degree.j, g.degree.j),
            ..g.clone()
        })
        .collect();
    SymDgAlgebra::new(s.field(), gens)
}

/// Bidegree map of ξ: (i, j) -> (i + j, j).
pub fn xi(b: Bidegree) -> Bidegree {
    Bidegree::new(b.i + b.j, b.j)
}

pub fn xi_inv(b: Bidegree) -> Bidegree {
    Bidegree::new(b.i - b.j, b.j)
}

/// Algebra map determined by generator images (linear combinations of
/// target generators).
#[derive(Clone, Debug)]
pub struct AlgebraMorphism<F: Field> {
    pub source: Arc<SymDgAlgebra<F>>,
    pub target: Arc<SymDgAlgebra<F>>,
    pub gen_images: Vec<SparseVec<F::Elem>>,
}

impl<F: Field> AlgebraMorphism<F> {
    pub fn new(
        source: Arc<SymDgAlgebra<F>>,
        target: Arc<SymDgAlgebra<F>>,
        gen_images: Vec<SparseVec<F::Elem>>,
    ) -> Result<Self> {
        let m = AlgebraMorphism {
            source,
            target,
            gen_images,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn identity(a: Arc<SymDgAlgebra<F>>) -> Self {
        let f = a.field().clone();
        let imgs = (0..a.ngens()).map(|g| vec![(g, f.one())]).collect();
        AlgebraMorphism {
            source: a.clone(),
            target: a,
            gen_images: imgs,
        }
    }

    /// Bidegree preservation and compatibility with the differentials on
    /// generators.
    pub fn validate(&self) -> Result<()> {
        let f = self.source.field();
        if self.gen_images.len() != self.source.ngens() {
            return Err(Error::InvalidMap("one image per source generator required".into()));
        }
        for (g, img) in self.gen_images.iter().enumerate() {
            let deg = self.source.generators()[g].degree;
            for (h, _) in img {
                if self.target.generators()[*h].degree != deg {
                    return Err(Error::InvalidMap(format!(
                        "image of generator {} leaves bidegree {deg}",
                        self.source.generators()[g].label
                    )));
                }
            }
            // Φ(d g) == d Φ(g), both linear in generators.
            let mut lhs: Vec<(usize, F::Elem)> = Vec::new();
            for (h, c) in &self.source.generators()[g].diff {
                lhs = crate::linalg::matrix::axpy(f, &lhs, c, &self.gen_images[*h]);
            }
            let mut rhs: Vec<(usize, F::Elem)> = Vec::new();
            for (h, c) in img {
                rhs = crate::linalg::matrix::axpy(f, &rhs, c, &self.target.generators()[*h].diff);
            }
            if lhs != rhs {
                return Err(Error::NotChainMap(format!(
                    "morphism does not commute with d on {}",
                    self.source.generators()[g].label
                )));
            }
        }
        Ok(())
    }

    /// Image of a source monomial as a combination of target monomials.
    pub fn apply_monomial(&self, m: &Monomial) -> Vec<(Monomial, F::Elem)> {
        let f = self.target.field();
        let mut acc: Vec<(Monomial, F::Elem)> = vec![(self.target.one(), f.one())];
        for g in m.factors() {
            let mut next: HashMap<Monomial, F::Elem> = HashMap::new();
            for (t, c) in &acc {
                for (h, v) in &self.gen_images[g] {
                    let coef = f.mul(c, v);
                    self.target
                        .mul_into(&mut next, &coef, t, &Monomial::generator(self.target.ngens(), *h));
                }
            }
            acc = next.into_iter().filter(|(_, c)| !f.is_zero(c)).collect();
            acc.sort_by(|a, b| a.0.cmp(&b.0));
        }
        acc
    }
}

/// Chain map between generator complexes: `blocks[i]` maps `source V^i`
/// to `target V^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorMap<E> {
    pub blocks: BTreeMap<i64, Matrix<E>>,
}

impl<E: Clone + PartialEq + fmt::Debug + Send + Sync> GeneratorMap<E> {
    pub fn block(&self, i: i64, rows: usize, cols: usize) -> Matrix<E> {
        self.blocks
            .get(&i)
            .cloned()
            .unwrap_or_else(|| Matrix::zero(rows, cols))
    }

    pub fn check<F: Field<Elem = E>>(
        &self,
        f: &F,
        source: &GeneratorComplex<E>,
        target: &GeneratorComplex<E>,
    ) -> Result<()> {
        let mut degrees: Vec<i64> = source.ranks.keys().chain(target.ranks.keys()).copied().collect();
        degrees.sort();
        degrees.dedup();
        for &i in &degrees {
            let m = self.block(i, target.rank(i), source.rank(i));
            if m.shape() != (target.rank(i), source.rank(i)) {
                return Err(Error::InvalidMap(format!("block at degree {i} has wrong shape")));
            }
            let next = self.block(i + 1, target.rank(i + 1), source.rank(i + 1));
            if target.d(i).compose(f, &m) != next.compose(f, &source.d(i)) {
                return Err(Error::NotChainMap(format!("at generator degree {i}")));
            }
        }
        Ok(())
    }

    /// The dual map between 𝒴-type complexes: component `1 - i` gets the
    /// transpose of block `i`.
    pub fn dual_shifted(&self) -> GeneratorMap<E> {
        GeneratorMap {
            blocks: self
                .blocks
                .iter()
                .map(|(i, m)| (1 - i, m.transpose()))
                .collect(),
        }
    }
}

/// Sym(φ) for a chain map of generator complexes; generator images are the
/// columns of φ. The algebras must have been built from `source`/`target`.
pub fn sym_morphism<F: Field>(
    phi: &GeneratorMap<F::Elem>,
    source_complex: &GeneratorComplex<F::Elem>,
    target_complex: &GeneratorComplex<F::Elem>,
    source: Arc<SymDgAlgebra<F>>,
    target: Arc<SymDgAlgebra<F>>,
) -> Result<AlgebraMorphism<F>> {
    let f = source.field().clone();
    phi.check(&f, source_complex, target_complex)?;
    let mut imgs = Vec::with_capacity(source.ngens());
    for g in source.generators() {
        let m = phi.block(g.component, target_complex.rank(g.component), source_complex.rank(g.component));
        let col = &m.columns()[g.index];
        let img: Vec<(usize, F::Elem)> = col
            .iter()
            .map(|(r, v)| {
                let h = target
                    .generator_of(g.component, *r)
                    .expect("target generator exists");
                (h, v.clone())
            })
            .collect();
        imgs.push(normalize(&f, img));
    }
    AlgebraMorphism::new(source, target, imgs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigraded::{cohomology, Window};
    use crate::linalg::{PrimeField, Rationals};

    fn x_point<F: Field>(f: &F, i: i64, r: usize) -> GeneratorComplex<F::Elem> {
        let _ = f;
        GeneratorComplex::new(2).with_rank(i, r)
    }

    fn de_rham<F: Field>(f: &F) -> GeneratorComplex<F::Elem> {
        GeneratorComplex::new(2)
            .with_rank(-2, 1)
            .with_rank(-1, 1)
            .with_diff(-2, Matrix::from_i64(f, &[vec![1]]))
    }

    #[test]
    fn build_y_examples() {
        let q = Rationals;
        let y = build_y(&q, &x_point(&q, 0, 1)).unwrap();
        assert_eq!(y.ranks, [(1, 1)].into_iter().collect());
        assert_eq!(y.internal_degree, -2);
        assert!(y.diffs.is_empty());

        let x = GeneratorComplex::new(2)
            .with_rank(-1, 1)
            .with_rank(0, 1)
            .with_diff(-1, Matrix::from_i64(&q, &[vec![1]]));
        let y = build_y(&q, &x).unwrap();
        assert_eq!(y.ranks, [(1, 1), (2, 1)].into_iter().collect());
        assert_eq!(y.d(1), Matrix::from_i64(&q, &[vec![-1]]));

        let x = GeneratorComplex::new(2)
            .with_rank(-1, 2)
            .with_rank(0, 2)
            .with_diff(-1, Matrix::from_i64(&q, &[vec![1, 0], vec![0, 2]]));
        let y = build_y(&q, &x).unwrap();
        assert_eq!(y.d(1), Matrix::from_i64(&q, &[vec![-1, 0], vec![0, -2]]));
    }

    #[test]
    fn algebra_shapes() {
        let q = Rationals;
        let t = build_algebra(&q, &x_point(&q, 0, 1), 0, "x").unwrap();
        for m in 0..5 {
            assert_eq!(t.dim(Bidegree::new(0, 2 * m)), 1);
        }
        assert_eq!(t.monomials(Bidegree::new(0, 6)), vec![Monomial(vec![3])]);

        let e = build_algebra(&q, &x_point(&q, -1, 1), 0, "x").unwrap();
        let table = cohomology(&q, &e.as_complex(&Window::of(0, 10)), &Window::of(0, 10)).unwrap();
        assert_eq!(table.hilbert(), vec![(0, 0, 1), (-1, 2, 1)]);

        let e2 = build_algebra(&q, &x_point(&q, -1, 2), 0, "x").unwrap();
        assert_eq!(e2.monomials(Bidegree::new(-2, 4)), vec![Monomial(vec![1, 1])]);
    }

    #[test]
    fn mixed_s_basis() {
        let q = Rationals;
        let x = GeneratorComplex::new(2).with_rank(-1, 1).with_rank(0, 1);
        let y = build_y(&q, &x).unwrap();
        let s = build_algebra(&q, &y, 0, "y").unwrap();
        // a at (1,-2) odd, b at (2,-2) even
        assert_eq!(s.generators()[0].degree, Bidegree::new(1, -2));
        assert_eq!(s.generators()[1].degree, Bidegree::new(2, -2));
        assert_eq!(s.monomials(Bidegree::new(3, -4)), vec![Monomial(vec![1, 1])]);
    }

    #[test]
    fn multiplication_signs() {
        let q = Rationals;
        let x = GeneratorComplex::new(2).with_rank(-1, 2).with_rank(0, 1);
        let a = build_algebra(&q, &x, 0, "x").unwrap();
        let xi1 = Monomial(vec![1, 0, 0]);
        let xi2 = Monomial(vec![0, 1, 0]);
        let even = Monomial(vec![0, 0, 1]);
        assert_eq!(a.multiply(&xi2, &xi1), Some((true, Monomial(vec![1, 1, 0]))));
        assert_eq!(a.multiply(&xi1, &xi1), None);
        let xi1x = a.multiply(&xi1, &even).unwrap().1;
        assert_eq!(a.multiply(&xi1x, &xi2), Some((false, Monomial(vec![1, 1, 1]))));
        // gen_diff = 0 so d(ξ1 ξ2) = 0
        assert!(a.algebra_diff(&Monomial(vec![1, 1, 0])).is_empty());
    }

    #[test]
    fn de_rham_differential() {
        let q = Rationals;
        let t = build_algebra(&q, &de_rham(&q), 0, "x").unwrap();
        assert_eq!(t.generators()[0].degree, Bidegree::new(-2, 2));
        assert_eq!(t.generators()[0].diff, vec![(1, q.one())]);
        let d = t.algebra_diff(&Monomial(vec![4, 0]));
        assert_eq!(d, vec![(Monomial(vec![3, 1]), q.from_i64(4))]);

        let f3 = PrimeField::new(3).unwrap();
        let t3 = build_algebra(&f3, &de_rham(&f3), 0, "x").unwrap();
        assert!(t3.algebra_diff(&Monomial(vec![3, 0])).is_empty());
    }

    #[test]
    fn regrade_matches_shifted_build() {
        let q = Rationals;
        let x = GeneratorComplex::new(2)
            .with_rank(-1, 1)
            .with_rank(0, 1)
            .with_diff(-1, Matrix::from_i64(&q, &[vec![3]]));
        let y = build_y(&q, &x).unwrap();
        let s = build_algebra(&q, &y, 0, "y").unwrap();
        let r1 = regrade_xi(&s).unwrap();
        let r2 = build_algebra(&q, &y, 2, "y").unwrap();
        assert_eq!(r1.generators(), r2.generators());
        assert_eq!(r1.generators()[0].degree, Bidegree::new(-1, -2));
        assert_eq!(r1.generators()[1].degree, Bidegree::new(0, -2));
        assert_eq!(xi(Bidegree::ZERO), Bidegree::ZERO);
    }

    #[test]
    fn sym_morphism_inclusion() {
        let q = Rationals;
        let small = x_point(&q, 0, 1);
        let big = x_point(&q, 0, 2);
        let ts = Arc::new(build_algebra(&q, &small, 0, "x").unwrap());
        let tb = Arc::new(build_algebra(&q, &big, 0, "x").unwrap());
        let phi = GeneratorMap {
            blocks: [(0, Matrix::from_i64(&q, &[vec![1], vec![0]]))].into_iter().collect(),
        };
        let m = sym_morphism(&phi, &small, &big, ts.clone(), tb.clone()).unwrap();
        assert_eq!(
            m.apply_monomial(&Monomial(vec![2])),
            vec![(Monomial(vec![2, 0]), q.one())]
        );
        // identity and zero maps
        let id = GeneratorMap {
            blocks: [(0, Matrix::identity(&q, 1))].into_iter().collect(),
        };
        let mid = sym_morphism(&id, &small, &small, ts.clone(), ts.clone()).unwrap();
        assert_eq!(mid.gen_images, AlgebraMorphism::identity(ts.clone()).gen_images);
        let zero = GeneratorMap { blocks: BTreeMap::new() };
        let mz = sym_morphism(&zero, &small, &big, ts.clone(), tb).unwrap();
        assert!(mz.apply_monomial(&Monomial(vec![1])).is_empty());
        assert_eq!(mz.apply_monomial(&Monomial(vec![0])).len(), 1);
        // Ψ = dual map on the 𝒴 side
        let dual = phi.dual_shifted();
        assert_eq!(dual.blocks[&1], Matrix::from_i64(&q, &[vec![1, 0]]));
    }

    #[test]
    fn chain_map_violation_rejected() {
        let q = Rationals;
        let x = GeneratorComplex::new(2)
            .with_rank(-1, 1)
            .with_rank(0, 1)
            .with_diff(-1, Matrix::from_i64(&q, &[vec![1]]));
        let phi = GeneratorMap {
            blocks: [(0, Matrix::identity(&q, 1))].into_iter().collect(),
        };
        let t = Arc::new(build_algebra(&q, &x, 0, "x").unwrap());
        assert!(matches!(
            sym_morphism(&phi, &x, &x, t.clone(), t),
            Err(Error::NotChainMap(_))
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        /// Coefficient of q^a t^m in prod_even 1/(1 - q^c t) prod_odd (1 + q^c t),
        /// computed by polynomial multiplication truncated at t^max.
        fn generating_dims(gens: &[i64], max: usize) -> BTreeMap<(i64, usize), usize> {
            let mut poly: BTreeMap<(i64, usize), usize> = [((0, 0), 1)].into_iter().collect();
            for &c in gens {
                let mut next = BTreeMap::new();
                for (&(a, m), &v) in &poly {
                    let top = if c.rem_euclid(2) == 1 { 1 } else { max };
                    for e in 0..=top {
                        if m + e > max {
                            break;
                        }
                        *next.entry((a + c * e as i64, m + e)).or_insert(0) += v;
                    }
                }
                poly = next;
            }
            poly
        }

        fn random_x(r: &[usize], seed: &[i64]) -> GeneratorComplex<num_rational::BigRational> {
            let q = Rationals;
            let (r2, r1, r0) = (r[0], r[1], r[2]);
            let mut it = seed.iter().copied().cycle();
            let mut x = GeneratorComplex::new(2)
                .with_rank(-2, r2)
                .with_rank(-1, r1)
                .with_rank(0, r0);
            // d_{-1} random; d_{-2} from the kernel of d_{-1} so d^2 = 0.
            let d1: Vec<Vec<i64>> = (0..r0).map(|_| (0..r1).map(|_| it.next().unwrap()).collect()).collect();
            let d1 = Matrix::from_dense_shape(&q, r0, r1, &d1.iter().map(|r| r.iter().map(|&v| q.from_i64(v)).collect()).collect::<Vec<_>>());
            let ker = crate::linalg::kernel(&q, &d1);
            let mut cols = Vec::new();
            for _ in 0..r2 {
                let mut acc = Vec::new();
                for kc in ker.columns() {
                    acc = crate::linalg::matrix::axpy(&q, &acc, &q.from_i64(it.next().unwrap()), &kc);
                }
                cols.push(acc);
            }
            x = x.with_diff(-1, d1).with_diff(-2, Matrix::from_columns(r1, cols));
            x
        }

        proptest! {
            #[test]
            fn dims_match_generating_function(r in proptest::collection::vec(0usize..3, 3)) {
                let q = Rationals;
                let x = GeneratorComplex::new(2).with_rank(-2, r[0]).with_rank(-1, r[1]).with_rank(0, r[2]);
                let t = build_algebra(&q, &x, 0, "x").unwrap();
                let degs: Vec<i64> = t.generators().iter().map(|g| g.degree.i).collect();
                let gf = generating_dims(&degs, 5);
                for m in 0..=5usize {
                    for a in -10..=0 {
                        let want = gf.get(&(a, m)).copied().unwrap_or(0);
                        prop_assert_eq!(t.dim(Bidegree::new(a, 2 * m as i64)), want);
                    }
                }
            }

            #[test]
            fn product_laws_and_leibniz(r in proptest::collection::vec(0usize..3, 3), seed in proptest::collection::vec(-2i64..3, 1..20), picks in proptest::collection::vec(0usize..1000, 6)) {
                let q = Rationals;
                let x = random_x(&r, &seed);
                let t = build_algebra(&q, &x, 0, "x").unwrap();
                prop_assume!(t.ngens() > 0);
                // random monomials of small length
                let mono = |p: usize, len: usize| {
                    let mut m = Monomial::one(t.ngens());
                    let mut s = p;
                    for _ in 0..len {
                        let g = s % t.ngens();
                        s = s / t.ngens() + 7;
                        if !(t.generators()[g].is_odd() && m.0[g] > 0) {
                            m.0[g] += 1;
                        }
                    }
                    m
                };
                let a = mono(picks[0], picks[3] % 3);
                let b = mono(picks[1], picks[4] % 3);
                let c = mono(picks[2], picks[5] % 2);
                // associativity
                let left = t.multiply(&a, &b).and_then(|(s1, ab)| t.multiply(&ab, &c).map(|(s2, m)| (s1 ^ s2, m)));
                let right = t.multiply(&b, &c).and_then(|(s1, bc)| t.multiply(&a, &bc).map(|(s2, m)| (s1 ^ s2, m)));
                prop_assert_eq!(left, right);
                // graded commutativity
                let ab = t.multiply(&a, &b);
                let ba = t.multiply(&b, &a);
                let sign = t.degree_of(&a).is_odd() && t.degree_of(&b).is_odd();
                prop_assert_eq!(ab.clone().map(|(s, m)| (s ^ sign, m)), ba);
                // d^2 = 0
                for b in [t.degree_of(&a), t.degree_of(&b)] {
                    prop_assert!(t.check_square_zero_at(b));
                }
                // Leibniz: d(ab) = d(a) b + (-1)^{|a|} a d(b)
                if let Some((neg, m)) = ab {
                    let mut lhs: HashMap<Monomial, _> = HashMap::new();
                    for (u, v) in t.algebra_diff(&m) {
                        lhs.insert(u, if neg { q.neg(&v) } else { v });
                    }
                    let mut rhs: HashMap<Monomial, _> = HashMap::new();
                    for (u, v) in t.algebra_diff(&a) {
                        t.mul_into(&mut rhs, &v, &u, &b);
                    }
                    let sa = q.sign(t.degree_of(&a).is_odd());
                    for (u, v) in t.algebra_diff(&b) {
                        t.mul_into(&mut rhs, &q.mul(&sa, &v), &a, &u);
                    }
                    rhs.retain(|_, v| !q.is_zero(v));
                    prop_assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
