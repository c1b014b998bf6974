//! Dg-modules over free graded-commutative algebras, presented by a
//! differential and one action block per algebra generator, stored on a
//! window of internal degrees.

pub mod dual;
pub mod generation;
pub mod resolution;
pub mod semifree;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::bigraded::{
    cohomology, is_quasi_iso, Bidegree, BigradedComplex, CohomologyTable, ComplexMap, Table,
    Window,
};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, MatrixBuilder, SparseVec};
use crate::symdg::{AlgebraMorphism, Monomial, SymDgAlgebra};

pub use dual::{double_dual_map, dualize};
pub use generation::window_generation_check;
pub use resolution::semifree_resolution;
pub use semifree::{extend_scalars, SemiFree};

/// Maps between modules are per-bidegree blocks of degree zero.
pub type DgModuleMap<E> = ComplexMap<E>;

/// What is known about one internal degree of a windowed module.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slice {
    Known,
    Zero,
    Unknown,
}

/// A dg-module stored on `window`. Outside the window a slice is zero on a
/// side flagged as bounded and unknown otherwise.
#[derive(Clone, Debug)]
pub struct DgModule<F: Field> {
    pub algebra: Arc<SymDgAlgebra<F>>,
    pub complex: BigradedComplex<F::Elem>,
    /// `actions[g][b]` maps bidegree `b` to `b + deg(g)`.
    pub actions: Vec<BTreeMap<Bidegree, Matrix<F::Elem>>>,
    pub window: Window,
    pub bounded_below: bool,
    pub bounded_above: bool,
    pub presentation: Option<Arc<SemiFree<F>>>,
}

/// One failed dg-module axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub invariant: &'static str,
    pub bidegree: Bidegree,
    pub generator: Option<String>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.generator {
            Some(g) => write!(f, "{} at {} (generator {g})", self.invariant, self.bidegree),
            None => write!(f, "{} at {}", self.invariant, self.bidegree),
        }
    }
}

impl<F: Field> DgModule<F> {
    /// An empty module on `window` to be filled in by constructors.
    pub fn empty(algebra: Arc<SymDgAlgebra<F>>, window: Window) -> Self {
        let n = algebra.ngens();
        DgModule {
            algebra,
            complex: BigradedComplex::new(),
            actions: vec![BTreeMap::new(); n],
            window,
            bounded_below: false,
            bounded_above: false,
            presentation: None,
        }
    }

    pub fn field(&self) -> &F {
        self.algebra.field()
    }

    pub fn dim(&self, b: Bidegree) -> usize {
        self.complex.dim(b)
    }

    pub fn d(&self, b: Bidegree) -> Matrix<F::Elem> {
        self.complex.d(b)
    }

    pub fn gen_degree(&self, g: usize) -> Bidegree {
        self.algebra.generators()[g].degree
    }

    /// Action block of generator `g` out of `b`, zero when absent.
    pub fn action(&self, g: usize, b: Bidegree) -> Matrix<F::Elem> {
        let t = b + self.gen_degree(g);
        match self.actions[g].get(&b) {
            Some(m) => m.clone(),
            None => Matrix::zero(self.dim(t), self.dim(b)),
        }
    }

    pub fn set_action(&mut self, g: usize, b: Bidegree, m: Matrix<F::Elem>) {
        if m.is_zero() {
            self.actions[g].remove(&b);
        } else {
            self.actions[g].insert(b, m);
        }
    }

    pub fn slice_status(&self, j: i64) -> Slice {
        if self.window.contains(j) {
            Slice::Known
        } else if (j > self.window.j_max && self.bounded_above)
            || (j < self.window.j_min && self.bounded_below)
        {
            Slice::Zero
        } else {
            Slice::Unknown
        }
    }

    /// Errors unless every internal degree in `[lo, hi]` is known or zero.
    pub fn require(&self, lo: i64, hi: i64, what: &str) -> Result<()> {
        if lo > hi {
            return Ok(());
        }
        let ok_low = lo >= self.window.j_min || self.bounded_below;
        let ok_high = hi <= self.window.j_max || self.bounded_above;
        if ok_low && ok_high {
            Ok(())
        } else {
            Err(Error::window(what, lo, hi))
        }
    }

    /// Highest internal degree that can be nonzero, when bounded above.
    pub fn top(&self) -> Option<i64> {
        self.bounded_above.then(|| {
            self.complex
                .dims
                .keys()
                .map(|b| b.j)
                .max()
                .unwrap_or(self.window.j_min)
                .min(self.window.j_max)
        })
    }

    /// Lowest internal degree that can be nonzero, when bounded below.
    pub fn bottom(&self) -> Option<i64> {
        self.bounded_below.then(|| {
            self.complex
                .dims
                .keys()
                .map(|b| b.j)
                .min()
                .unwrap_or(self.window.j_max)
                .max(self.window.j_min)
        })
    }

    /// Bidegrees with internal degree `j` carrying a nonzero space.
    pub fn slice(&self, j: i64) -> Vec<Bidegree> {
        self.complex
            .slice(j)
            .into_iter()
            .map(|i| Bidegree::new(i, j))
            .collect()
    }

    /// Applies the monomial `t` (normal-ordered product of generators) to a
    /// vector at `b`: the rightmost factor acts first.
    pub fn act_monomial_vec(
        &self,
        t: &Monomial,
        b: Bidegree,
        v: &SparseVec<F::Elem>,
    ) -> SparseVec<F::Elem> {
        let f = self.field();
        let mut cur = v.clone();
        let mut at = b;
        for g in t.factors().into_iter().rev() {
            if cur.is_empty() {
                break;
            }
            cur = self.action(g, at).mul_vec(f, &cur);
            at = at + self.gen_degree(g);
        }
        cur
    }

    /// Matrix of the monomial `t` acting from `b`.
    pub fn act_monomial(&self, t: &Monomial, b: Bidegree) -> Matrix<F::Elem> {
        let f = self.field();
        let mut cur = Matrix::identity(f, self.dim(b));
        let mut at = b;
        for g in t.factors().into_iter().rev() {
            cur = self.action(g, at).compose(f, &cur);
            at = at + self.gen_degree(g);
        }
        cur
    }

    /// Every violated dg-module axiom among blocks lying inside the window.
    pub fn validate(&self) -> Vec<Violation> {
        let f = self.field();
        let gens = self.algebra.generators();
        let mut out = Vec::new();
        let v = |invariant, bidegree, g: Option<usize>| Violation {
            invariant,
            bidegree,
            generator: g.map(|g| gens[g].label.clone()),
        };
        if self.actions.len() != gens.len() {
            out.push(v("one action per generator", Bidegree::ZERO, None));
            return out;
        }
        for b in self.complex.dims.keys() {
            if !self.window.contains(b.j) {
                out.push(v("support outside window", *b, None));
            }
        }
        for (b, m) in &self.complex.diff {
            if m.shape() != (self.dim(b.next()), self.dim(*b)) {
                out.push(v("differential shape", *b, None));
            }
        }
        for (g, blocks) in self.actions.iter().enumerate() {
            for (b, m) in blocks {
                let t = *b + gens[g].degree;
                if m.shape() != (self.dim(t), self.dim(*b)) {
                    out.push(v("action shape", *b, Some(g)));
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        let bs: Vec<Bidegree> = self.complex.dims.keys().copied().collect();
        for &b in &bs {
            if !self.complex.d(b.next()).compose(f, &self.d(b)).is_zero() {
                out.push(v("d^2 = 0", b, None));
            }
        }
        for (g, gen) in gens.iter().enumerate() {
            let deg = gen.degree;
            for &b in &bs {
                if !self.window.contains(b.j + deg.j) {
                    continue;
                }
                // d ρ_g - (-1)^a ρ_g d = ρ_{d g}
                let t = b + deg;
                let lhs = self
                    .d(t)
                    .compose(f, &self.action(g, b))
                    .sub(f, &self.action(g, b.next()).compose(f, &self.d(b)).signed(f, deg.is_odd()))
                    .expect("shapes agree");
                let mut rhs = Matrix::zero(self.dim(t.next()), self.dim(b));
                for (h, c) in &gen.diff {
                    rhs = rhs.add_scaled(f, c, &self.action(*h, b)).expect("shapes agree");
                }
                if lhs != rhs {
                    out.push(v("Leibniz", b, Some(g)));
                }
            }
        }
        for g in 0..gens.len() {
            for h in g..gens.len() {
                let (dg, dh) = (gens[g].degree, gens[h].degree);
                for &b in &bs {
                    if ![dg.j, dh.j, dg.j + dh.j]
                        .iter()
                        .all(|&x| self.window.contains(b.j + x))
                    {
                        continue;
                    }
                    let gh = self.action(g, b + dh).compose(f, &self.action(h, b));
                    if g == h {
                        if dg.is_odd() && !gh.is_zero() {
                            out.push(v("odd square", b, Some(g)));
                        }
                        continue;
                    }
                    let hg = self.action(h, b + dg).compose(f, &self.action(g, b));
                    if gh != hg.signed(f, dg.is_odd() && dh.is_odd()) {
                        out.push(v("graded commutation", b, Some(g)));
                    }
                }
            }
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        match self.validate().first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidModule(v.to_string())),
        }
    }

    /// Cohomology of the underlying complex on `w`.
    pub fn cohomology(&self, w: &Window) -> Result<CohomologyTable<F::Elem>> {
        self.require(w.j_min, w.j_max, "module")?;
        cohomology(self.field(), &self.complex, w)
    }

    pub fn table(&self, w: &Window) -> Result<Table> {
        Ok(self.cohomology(w)?.dims)
    }

    /// The same module stored on a smaller window.
    pub fn restrict_window(&self, w: &Window) -> Result<Self> {
        self.require(w.j_min, w.j_max, "module")?;
        let mut m = self.clone();
        m.complex = self.complex.restrict(w);
        for (g, blocks) in m.actions.iter_mut().enumerate() {
            let t = self.gen_degree(g).j;
            blocks.retain(|b, _| w.contains(b.j) && w.contains(b.j + t));
        }
        m.bounded_above = self.bounded_above && w.j_max >= self.window.j_max;
        m.bounded_below = self.bounded_below && w.j_min <= self.window.j_min;
        m.window = *w;
        Ok(m)
    }
}

/// Finite module with prescribed dimensions, zero actions and optional
/// differential.
pub fn trivial_module<F: Field>(
    algebra: Arc<SymDgAlgebra<F>>,
    dims: &Table,
    diff: BTreeMap<Bidegree, Matrix<F::Elem>>,
) -> Result<DgModule<F>> {
    let js: Vec<i64> = dims.iter().filter(|(_, d)| **d > 0).map(|(b, _)| b.j).collect();
    let window = Window::of(
        js.iter().copied().min().unwrap_or(0),
        js.iter().copied().max().unwrap_or(0),
    );
    let mut m = DgModule::empty(algebra, window);
    for (b, d) in dims {
        m.complex.set_dim(*b, *d);
    }
    for (b, d) in diff {
        if d.shape() != (m.dim(b.next()), m.dim(b)) {
            return Err(Error::InvalidModule(format!("differential block at {b} has wrong shape")));
        }
        m.complex.set_d(b, d);
    }
    m.bounded_above = true;
    m.bounded_below = true;
    m.check()?;
    Ok(m)
}

/// The ground field at bidegree `b` with zero action.
pub fn unit_module<F: Field>(algebra: Arc<SymDgAlgebra<F>>, b: Bidegree) -> DgModule<F> {
    let dims: Table = [(b, 1)].into_iter().collect();
    trivial_module(algebra, &dims, BTreeMap::new()).expect("one-dimensional module is valid")
}

/// Free module on generators of the given bidegrees, materialized on `w`.
pub fn free_module<F: Field>(
    algebra: Arc<SymDgAlgebra<F>>,
    gens: &[Bidegree],
    w: &Window,
) -> Result<DgModule<F>> {
    SemiFree::free(algebra, gens.to_vec()).materialize(w)
}

/// `M[n]`: degrees lowered by `n`, d' = (-1)^n d, ρ'_g = (-1)^{n a_g} ρ_g.
pub fn shift<F: Field>(m: &DgModule<F>, n: i64) -> DgModule<F> {
    let f = m.field();
    let mv = |b: &Bidegree| Bidegree::new(b.i - n, b.j);
    let odd_n = n.rem_euclid(2) == 1;
    let mut out = m.clone();
    out.complex = crate::bigraded::shift(f, &m.complex, n);
    out.actions = m
        .actions
        .iter()
        .enumerate()
        .map(|(g, blocks)| {
            let odd = odd_n && m.gen_degree(g).is_odd();
            blocks.iter().map(|(b, x)| (mv(b), x.signed(f, odd))).collect()
        })
        .collect();
    out.presentation = None;
    out
}

/// `M<m>`: internal degrees raised by `m`.
pub fn twist<F: Field>(module: &DgModule<F>, m: i64) -> DgModule<F> {
    let mv = |b: &Bidegree| Bidegree::new(b.i, b.j + m);
    let mut out = module.clone();
    out.complex = crate::bigraded::twist(&module.complex, m);
    out.actions = module
        .actions
        .iter()
        .map(|blocks| blocks.iter().map(|(b, x)| (mv(b), x.clone())).collect())
        .collect();
    out.window = module.window.shifted(m);
    out.presentation = None;
    out
}

fn same_shape<F: Field>(a: &DgModule<F>, b: &DgModule<F>) -> Result<()> {
    if a.window != b.window || a.algebra.generators() != b.algebra.generators() {
        return Err(Error::InvalidModule(
            "modules must share algebra and window".into(),
        ));
    }
    Ok(())
}

/// Direct sum; in each bidegree the first summand comes first.
pub fn direct_sum<F: Field>(a: &DgModule<F>, b: &DgModule<F>) -> Result<DgModule<F>> {
    same_shape(a, b)?;
    let f = a.field();
    let mut out = DgModule::empty(a.algebra.clone(), a.window);
    out.bounded_above = a.bounded_above && b.bounded_above;
    out.bounded_below = a.bounded_below && b.bounded_below;
    let bs: BTreeSet<Bidegree> = a.complex.dims.keys().chain(b.complex.dims.keys()).copied().collect();
    for &x in &bs {
        out.complex.set_dim(x, a.dim(x) + b.dim(x));
    }
    let diag = |ma: Matrix<F::Elem>, mb: Matrix<F::Elem>| {
        let mut mbld = MatrixBuilder::new(ma.rows() + mb.rows(), ma.cols() + mb.cols());
        mbld.block(&ma, 0, 0);
        mbld.block(&mb, ma.rows(), ma.cols());
        mbld.build(f)
    };
    for &x in &bs {
        if out.dim(x.next()) > 0 {
            out.complex.set_d(x, diag(a.d(x), b.d(x)));
        }
        for g in 0..a.algebra.ngens() {
            if out.dim(x + a.gen_degree(g)) > 0 {
                out.set_action(g, x, diag(a.action(g, x), b.action(g, x)));
            }
        }
    }
    Ok(out)
}

/// Cone of a module map `f: a -> b`: a[1] ⊕ b, with the actions on the
/// a[1] part twisted by (-1)^{a_g}.
pub fn cone<F: Field>(
    map: &DgModuleMap<F::Elem>,
    a: &DgModule<F>,
    b: &DgModule<F>,
) -> Result<DgModule<F>> {
    same_shape(a, b)?;
    let f = a.field();
    let mut out = DgModule::empty(a.algebra.clone(), a.window);
    out.bounded_above = a.bounded_above && b.bounded_above;
    out.bounded_below = a.bounded_below && b.bounded_below;
    out.complex = crate::bigraded::cone(f, &a.complex, &b.complex, map)?;
    let bs: Vec<Bidegree> = out.complex.dims.keys().copied().collect();
    for &x in &bs {
        for g in 0..a.algebra.ngens() {
            let deg = a.gen_degree(g);
            let t = x + deg;
            if out.dim(t) == 0 {
                continue;
            }
            let ra = a.action(g, x.next()).signed(f, deg.is_odd());
            let rb = b.action(g, x);
            let mut mb = MatrixBuilder::new(out.dim(t), out.dim(x));
            mb.block(&ra, 0, 0);
            mb.block(&rb, a.dim(t.next()), a.dim(x.next()));
            out.set_action(g, x, mb.build(f));
        }
    }
    Ok(out)
}

/// Identity map on a module.
pub fn identity_map<F: Field>(m: &DgModule<F>) -> DgModuleMap<F::Elem> {
    ComplexMap::identity(m.field(), &m.complex)
}

/// Violations of the module-map axioms on internal degrees of `w`.
pub fn check_module_map<F: Field>(
    map: &DgModuleMap<F::Elem>,
    source: &DgModule<F>,
    target: &DgModule<F>,
    w: &Window,
) -> Vec<Violation> {
    let f = source.field();
    let mut out = Vec::new();
    let v = |invariant, bidegree, g: Option<usize>| Violation {
        invariant,
        bidegree,
        generator: g.map(|g| source.algebra.generators()[g].label.clone()),
    };
    let mut bs: BTreeSet<Bidegree> = source.complex.dims.keys().copied().collect();
    bs.retain(|b| w.contains(b.j));
    for &b in &bs {
        let fb = map.block(b, target.dim(b), source.dim(b));
        if fb.shape() != (target.dim(b), source.dim(b)) {
            out.push(v("map shape", b, None));
            continue;
        }
        let fn_ = map.block(b.next(), target.dim(b.next()), source.dim(b.next()));
        if target.d(b).compose(f, &fb) != fn_.compose(f, &source.d(b)) {
            out.push(v("commutes with d", b, None));
        }
        for g in 0..source.algebra.ngens() {
            let t = b + source.gen_degree(g);
            if !w.contains(t.j) {
                continue;
            }
            let ft = map.block(t, target.dim(t), source.dim(t));
            if target.action(g, b).compose(f, &fb) != ft.compose(f, &source.action(g, b)) {
                out.push(v("commutes with action", b, Some(g)));
            }
        }
    }
    out
}

/// Whether a module map induces isomorphisms in cohomology on `w`.
pub fn module_quasi_iso<F: Field>(
    map: &DgModuleMap<F::Elem>,
    source: &DgModule<F>,
    target: &DgModule<F>,
    w: &Window,
) -> Result<bool> {
    source.require(w.j_min, w.j_max, "source")?;
    target.require(w.j_min, w.j_max, "target")?;
    is_quasi_iso(source.field(), &source.complex, &target.complex, map, w)
}

/// Restriction of scalars along `phi: A' -> A` for a module over `A`.
pub fn restrict_scalars<F: Field>(
    phi: &AlgebraMorphism<F>,
    m: &DgModule<F>,
) -> Result<DgModule<F>> {
    if phi.target.generators() != m.algebra.generators() {
        return Err(Error::InvalidMap("module is not over the morphism's target".into()));
    }
    let f = m.field();
    let mut out = DgModule::empty(phi.source.clone(), m.window);
    out.complex = m.complex.clone();
    out.bounded_above = m.bounded_above;
    out.bounded_below = m.bounded_below;
    let bs: Vec<Bidegree> = m.complex.dims.keys().copied().collect();
    for (g, img) in phi.gen_images.iter().enumerate() {
        let deg = phi.source.generators()[g].degree;
        for &b in &bs {
            let t = b + deg;
            if m.dim(t) == 0 {
                continue;
            }
            let mut acc = Matrix::zero(m.dim(t), m.dim(b));
            for (h, c) in img {
                acc = acc.add_scaled(f, c, &m.action(*h, b))?;
            }
            out.set_action(g, b, acc);
        }
    }
    Ok(out)
}

/// Relabels bidegrees by `re` and moves the module to `algebra`, whose
/// generators must be those of the current algebra regraded the same way.
/// Matrices are unchanged.
pub fn regrade<F: Field>(
    m: &DgModule<F>,
    algebra: Arc<SymDgAlgebra<F>>,
    re: impl Fn(Bidegree) -> Bidegree,
) -> Result<DgModule<F>> {
    for (a, b) in m.algebra.generators().iter().zip(algebra.generators()) {
        if re(a.degree) - re(Bidegree::ZERO) != b.degree || a.label != b.label {
            return Err(Error::InvalidModule("regrading does not match the algebras".into()));
        }
    }
    if m.algebra.ngens() != algebra.ngens() {
        return Err(Error::InvalidModule("regrading does not match the algebras".into()));
    }
    let mut out = DgModule::empty(algebra, m.window);
    out.bounded_above = m.bounded_above;
    out.bounded_below = m.bounded_below;
    for (b, d) in &m.complex.dims {
        out.complex.set_dim(re(*b), *d);
    }
    for (b, x) in &m.complex.diff {
        out.complex.diff.insert(re(*b), x.clone());
    }
    for (g, blocks) in m.actions.iter().enumerate() {
        out.actions[g] = blocks.iter().map(|(b, x)| (re(*b), x.clone())).collect();
    }
    Ok(out)
}
