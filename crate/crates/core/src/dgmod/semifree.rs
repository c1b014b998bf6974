//! Semi-free modules: free graded modules on generators `e_k` with
//! `d(e_k)` a combination of earlier `t * e_l`.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::bigraded::{Bidegree, Window};
use crate::dgmod::DgModule;
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix};
use crate::symdg::{AlgebraMorphism, BasisSlice, Monomial, SymDgAlgebra};

/// Terms `(t, l, c)` standing for `c * t * e_l`.
pub type FreeElement<E> = Vec<(Monomial, usize, E)>;

#[derive(Clone, Debug)]
pub struct SemiFree<F: Field> {
    pub algebra: Arc<SymDgAlgebra<F>>,
    pub gens: Vec<Bidegree>,
    pub dgen: Vec<FreeElement<F::Elem>>,
    /// Internal degrees on which the generator list is complete; `None`
    /// means everywhere.
    pub complete: Option<Window>,
}

/// Basis of one bidegree of a semi-free module: blocks `A(b - deg e_k) e_k`.
pub struct Layout {
    pub blocks: Vec<(usize, usize, Arc<BasisSlice>)>,
    pub dim: usize,
}

impl Layout {
    pub fn position(&self, t: &Monomial, k: usize) -> Option<usize> {
        self.blocks
            .iter()
            .find(|(g, _, _)| *g == k)
            .and_then(|(_, off, basis)| basis.index.get(t).map(|p| off + p))
    }

    /// The pair `(t, k)` at a basis position.
    pub fn decode(&self, pos: usize) -> (Monomial, usize) {
        let (k, off, basis) = self
            .blocks
            .iter()
            .rev()
            .find(|(_, off, _)| *off <= pos)
            .expect("position inside layout");
        (basis.monomials[pos - off].clone(), *k)
    }
}

impl<F: Field> SemiFree<F> {
    pub fn free(algebra: Arc<SymDgAlgebra<F>>, gens: Vec<Bidegree>) -> Self {
        let n = gens.len();
        SemiFree {
            algebra,
            gens,
            dgen: vec![Vec::new(); n],
            complete: None,
        }
    }

    pub fn new(
        algebra: Arc<SymDgAlgebra<F>>,
        gens: Vec<Bidegree>,
        dgen: Vec<FreeElement<F::Elem>>,
    ) -> Result<Self> {
        if gens.len() != dgen.len() {
            return Err(Error::InvalidModule("one differential per generator".into()));
        }
        for (k, terms) in dgen.iter().enumerate() {
            for (t, l, _) in terms {
                if *l >= gens.len() || algebra.degree_of(t) + gens[*l] != gens[k].next() {
                    return Err(Error::InvalidModule(format!(
                        "d(e_{k}) has a term of the wrong bidegree"
                    )));
                }
            }
        }
        Ok(SemiFree {
            algebra,
            gens,
            dgen,
            complete: None,
        })
    }

    pub fn layout(&self, b: Bidegree) -> Layout {
        let mut blocks = Vec::new();
        let mut dim = 0;
        for (k, g) in self.gens.iter().enumerate() {
            let basis = self.algebra.basis(b - *g);
            if !basis.is_empty() {
                blocks.push((k, dim, basis.clone()));
                dim += basis.len();
            }
        }
        Layout { blocks, dim }
    }

    /// Cohomological degrees that may be occupied at internal degree `j`.
    pub fn cohomological_degrees(&self, j: i64) -> BTreeSet<i64> {
        let mut out = BTreeSet::new();
        for g in &self.gens {
            for i in self.algebra.cohomological_range(j - g.j) {
                out.insert(i + g.i);
            }
        }
        out
    }

    /// Image of `t * e_k` under the differential, as a vector in `target`.
    fn diff_of(&self, t: &Monomial, k: usize, target: &Layout) -> Vec<(usize, F::Elem)> {
        let f = self.algebra.field();
        let mut v = Vec::new();
        for (u, c) in self.algebra.algebra_diff(t) {
            if let Some(p) = target.position(&u, k) {
                v.push((p, c));
            }
        }
        let sign = f.sign(self.algebra.degree_of(t).is_odd());
        for (t2, l, c) in &self.dgen[k] {
            if let Some((neg, u)) = self.algebra.multiply(t, t2) {
                let coef = f.mul(&sign, c);
                let coef = if neg { f.neg(&coef) } else { coef };
                if let Some(p) = target.position(&u, *l) {
                    v.push((p, coef));
                }
            }
        }
        v
    }

    /// Differential block between two adjacent layouts.
    pub fn diff_block(&self, src: &Layout, tgt: &Layout) -> Matrix<F::Elem> {
        let f = self.algebra.field();
        let mut entries = Vec::new();
        for (k, off, basis) in &src.blocks {
            for (p, t) in basis.monomials.iter().enumerate() {
                for (r, c) in self.diff_of(t, *k, tgt) {
                    entries.push((r, off + p, c));
                }
            }
        }
        Matrix::from_triplets(f, tgt.dim, src.dim, entries)
    }

    /// Action block of generator `g` from `src` to `tgt`.
    pub fn action_block(&self, g: usize, src: &Layout, tgt: &Layout) -> Matrix<F::Elem> {
        let f = self.algebra.field();
        let x = Monomial::generator(self.algebra.ngens(), g);
        let mut entries = Vec::new();
        for (k, off, basis) in &src.blocks {
            for (p, t) in basis.monomials.iter().enumerate() {
                if let Some((neg, u)) = self.algebra.multiply(&x, t) {
                    if let Some(r) = tgt.position(&u, *k) {
                        entries.push((r, off + p, f.sign(neg)));
                    }
                }
            }
        }
        Matrix::from_triplets(f, tgt.dim, src.dim, entries)
    }

    /// The module on internal degrees `w`.
    pub fn materialize(&self, w: &Window) -> Result<DgModule<F>> {
        if let Some(c) = &self.complete {
            if !c.covers(w) {
                return Err(Error::window(
                    "semi-free presentation",
                    w.j_min.max(c.j_min),
                    w.j_max.min(c.j_max),
                ));
            }
        }
        let a = &self.algebra;
        let mut m = DgModule::empty(a.clone(), *w);
        let mut layouts: HashMap<Bidegree, Layout> = HashMap::new();
        for j in w.degrees() {
            for i in self.cohomological_degrees(j) {
                let b = Bidegree::new(i, j);
                let l = self.layout(b);
                if l.dim > 0 {
                    m.complex.set_dim(b, l.dim);
                    layouts.insert(b, l);
                }
            }
        }
        let bs: Vec<Bidegree> = m.complex.dims.keys().copied().collect();
        for &b in &bs {
            let src = &layouts[&b];
            if let Some(tgt) = layouts.get(&b.next()) {
                m.complex.set_d(b, self.diff_block(src, tgt));
            }
            for g in 0..a.ngens() {
                if let Some(tgt) = layouts.get(&(b + a.generators()[g].degree)) {
                    m.set_action(g, b, self.action_block(g, src, tgt));
                }
            }
        }
        let dir = a.direction();
        let min_j = self.gens.iter().map(|g| g.j).min();
        let max_j = self.gens.iter().map(|g| g.j).max();
        m.bounded_below = match min_j {
            None => true,
            Some(lo) => dir >= 0 && w.j_min <= lo,
        };
        m.bounded_above = match max_j {
            None => true,
            Some(hi) => dir <= 0 && w.j_max >= hi,
        };
        if dir == 0 {
            m.bounded_below = min_j.is_none_or(|lo| w.j_min <= lo);
        }
        m.presentation = Some(Arc::new(self.clone()));
        Ok(m)
    }

    /// Transport along an algebra morphism: same generators, differential
    /// pushed through the generator images.
    pub fn extend(&self, phi: &AlgebraMorphism<F>) -> Result<SemiFree<F>> {
        if phi.source.generators() != self.algebra.generators() {
            return Err(Error::InvalidMap("module is not over the morphism's source".into()));
        }
        let f = phi.target.field();
        let mut dgen = Vec::with_capacity(self.dgen.len());
        for terms in &self.dgen {
            let mut acc: HashMap<(Monomial, usize), F::Elem> = HashMap::new();
            for (t, l, c) in terms {
                for (u, c2) in phi.apply_monomial(t) {
                    let e = acc.entry((u, *l)).or_insert_with(|| f.zero());
                    *e = f.add(e, &f.mul(c, &c2));
                }
            }
            let mut v: FreeElement<F::Elem> = acc
                .into_iter()
                .filter(|(_, c)| !f.is_zero(c))
                .map(|((u, l), c)| (u, l, c))
                .collect();
            v.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
            dgen.push(v);
        }
        Ok(SemiFree {
            algebra: phi.target.clone(),
            gens: self.gens.clone(),
            dgen,
            complete: self.complete,
        })
    }
}

/// `target ⊗_source M` for a module with a semi-free presentation.
pub fn extend_scalars<F: Field>(
    phi: &AlgebraMorphism<F>,
    m: &DgModule<F>,
    w: &Window,
) -> Result<DgModule<F>> {
    let p = m.presentation.as_ref().ok_or(Error::NotSemiFree)?;
    p.extend(phi)?.materialize(w)
}

/// Resolves first, then extends: the left derived extension of scalars.
pub fn derived_extend_scalars<F: Field>(
    phi: &AlgebraMorphism<F>,
    m: &DgModule<F>,
    w: &Window,
) -> Result<DgModule<F>> {
    let (p, _) = crate::dgmod::semifree_resolution(m, w)?;
    extend_scalars(phi, &p, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgmod::free_module;
    use crate::linalg::Rationals;
    use crate::symdg::{build_algebra, GeneratorComplex};

    #[test]
    fn koszul_resolution_of_k_over_polynomials() {
        let q = Rationals;
        let x = GeneratorComplex::new(2).with_rank(0, 1);
        let a = Arc::new(build_algebra(&q, &x, 0, "x").unwrap());
        let p = SemiFree::new(
            a.clone(),
            vec![Bidegree::ZERO, Bidegree::new(-1, 2)],
            vec![vec![], vec![(Monomial(vec![1]), 0, q.one())]],
        )
        .unwrap();
        let m = p.materialize(&Window::of(0, 10)).unwrap();
        assert!(m.validate().is_empty());
        let t = m.table(&Window::of(0, 10)).unwrap();
        assert_eq!(t, [(Bidegree::ZERO, 1)].into_iter().collect());
    }

    #[test]
    fn extension_of_free_is_free() {
        let q = Rationals;
        let small = GeneratorComplex::new(2).with_rank(0, 1);
        let big = GeneratorComplex::new(2).with_rank(0, 2);
        let ts = Arc::new(build_algebra(&q, &small, 0, "x").unwrap());
        let tb = Arc::new(build_algebra(&q, &big, 0, "x").unwrap());
        let phi = AlgebraMorphism::new(ts.clone(), tb.clone(), vec![vec![(0, q.one())]]).unwrap();
        let w = Window::of(0, 6);
        let gens = [Bidegree::ZERO, Bidegree::new(1, 2)];
        let m = free_module(ts.clone(), &gens, &w).unwrap();
        let e = extend_scalars(&phi, &m, &w).unwrap();
        let direct = free_module(tb, &gens, &w).unwrap();
        assert_eq!(e.complex, direct.complex);
        assert_eq!(e.actions, direct.actions);
        let id = AlgebraMorphism::identity(ts);
        let same = extend_scalars(&id, &m, &w).unwrap();
        assert_eq!(same.complex, m.complex);

        let mut plain = m.clone();
        plain.presentation = None;
        assert_eq!(extend_scalars(&phi, &plain, &w).unwrap_err(), Error::NotSemiFree);
    }
}
