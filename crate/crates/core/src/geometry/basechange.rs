//! Base change along a finite field extension `k ⊂ k'`, i.e. along
//! `Spec k' -> Spec k`. The dualizing complex on the `k'` side is `k'`
//! trivialized by a nonzero k-linear functional λ.

use std::sync::Arc;

use crate::bigraded::{Bidegree, Window};
use crate::dgmod::{check_module_map, dualize, module_quasi_iso, DgModule, DgModuleMap};
use crate::error::{Error, Result};
use crate::geometry::TableComparison;
use crate::koszul::{functor_a, kappa, KoszulContext};
use crate::linalg::{Field, FieldExtension, Matrix};
use crate::symdg::{GeneratorComplex, SymDgAlgebra};

/// Koszul contexts over `k` (the Y side) and `k'` (the X side) for the
/// same generator complex.
pub struct BaseChange<K: Field, E: FieldExtension<K>> {
    pub base: K,
    pub ext: E,
    /// `λ(x^r)` for the power basis `1, x, ..`.
    pub lambda: Vec<K::Elem>,
    pub ctx_y: Arc<KoszulContext<K>>,
    pub ctx_x: Arc<KoszulContext<E>>,
}

/// Outcome of the base-change checks for one pair of modules.
#[derive(Clone, Debug)]
pub struct BaseChangeReport {
    pub comparisons: Vec<TableComparison>,
    /// Whether `π̂_* D'(M') -> D(π̂_* M')` built from λ is an isomorphism of
    /// dg-modules.
    pub lambda_map_iso: bool,
}

impl BaseChangeReport {
    pub fn passes(&self) -> bool {
        self.lambda_map_iso && self.comparisons.iter().all(TableComparison::agrees)
    }
}

impl<K: Field, E: FieldExtension<K>> BaseChange<K, E> {
    /// `lambda` defaults to the trace form, or to the top power-basis
    /// coordinate when the trace vanishes identically.
    pub fn new(ext: E, x: &GeneratorComplex<K::Elem>, lambda: Option<Vec<K::Elem>>) -> Result<Self> {
        let base = ext.base_field();
        let d = ext.degree_over_base();
        let lambda = match lambda {
            Some(l) => l,
            None => {
                let tr: Vec<K::Elem> = ext.power_basis().iter().map(|b| ext.trace(b)).collect();
                if tr.iter().all(|c| base.is_zero(c)) {
                    (0..d).map(|k| if k + 1 == d { base.one() } else { base.zero() }).collect()
                } else {
                    tr
                }
            }
        };
        if lambda.len() != d || lambda.iter().all(|c| base.is_zero(c)) {
            return Err(Error::InvalidSetup(format!(
                "lambda must be a nonzero functional given by {d} values"
            )));
        }
        let xe = x.map_field::<E>(|a| ext.embed_base(a));
        Ok(BaseChange {
            ctx_y: Arc::new(KoszulContext::new(&base, x.clone())?),
            ctx_x: Arc::new(KoszulContext::new(&ext, xe)?),
            base,
            ext,
            lambda,
        })
    }

    pub fn degree(&self) -> usize {
        self.ext.degree_over_base()
    }

    fn lambda_of(&self, a: &E::Elem) -> K::Elem {
        let k = &self.base;
        self.ext
            .coordinates(a)
            .iter()
            .zip(&self.lambda)
            .fold(k.zero(), |acc, (c, l)| k.add(&acc, &k.mul(c, l)))
    }

    /// Scalar extension `k' ⊗_k M` onto the matching algebra over `k'`.
    pub fn pullback(&self, m: &DgModule<K>, target: &Arc<SymDgAlgebra<E>>) -> Result<DgModule<E>> {
        same_generators(&m.algebra, target)?;
        let e = &self.ext;
        let mut out = DgModule::empty(target.clone(), m.window);
        out.bounded_above = m.bounded_above;
        out.bounded_below = m.bounded_below;
        let lift = |x: &Matrix<K::Elem>| {
            let v = x.map(|a| e.embed_base(a));
            Matrix::from_sparse_rows(v.rows(), v.cols(), v.row_vecs().to_vec())
        };
        for (b, d) in &m.complex.dims {
            out.complex.set_dim(*b, *d);
        }
        for (b, x) in &m.complex.diff {
            out.complex.set_d(*b, lift(x));
        }
        for (g, blocks) in m.actions.iter().enumerate() {
            for (b, x) in blocks {
                out.set_action(g, *b, lift(x));
            }
        }
        Ok(out)
    }

    /// Restriction of scalars to `k`: the basis `x^r v_a` sits at `a d + r`.
    pub fn pushforward(&self, m: &DgModule<E>, target: &Arc<SymDgAlgebra<K>>) -> Result<DgModule<K>> {
        same_generators(target, &m.algebra)?;
        let d = self.degree();
        let mut out = DgModule::empty(target.clone(), m.window);
        out.bounded_above = m.bounded_above;
        out.bounded_below = m.bounded_below;
        for (b, n) in &m.complex.dims {
            out.complex.set_dim(*b, n * d);
        }
        for (b, x) in &m.complex.diff {
            out.complex.set_d(*b, self.blockify(x));
        }
        for (g, blocks) in m.actions.iter().enumerate() {
            for (b, x) in blocks {
                out.set_action(g, *b, self.blockify(x));
            }
        }
        Ok(out)
    }

    fn blockify(&self, x: &Matrix<E::Elem>) -> Matrix<K::Elem> {
        let d = self.degree();
        let k = &self.base;
        let mut entries = Vec::new();
        for r in 0..x.rows() {
            for (c, a) in x.row(r) {
                for (col, coords) in self.ext.multiplication_matrix(a).iter().enumerate() {
                    for (row, v) in coords.iter().enumerate() {
                        entries.push((r * d + row, c * d + col, v.clone()));
                    }
                }
            }
        }
        Matrix::from_triplets(k, x.rows() * d, x.cols() * d, entries)
    }

    /// `π̂^! = D' ∘ π̂^* ∘ D` for a 𝒯_Y-module.
    pub fn upper_shriek(&self, m: &DgModule<K>) -> Result<DgModule<E>> {
        Ok(dualize(&self.pullback(&dualize(m), &self.ctx_x.t)?))
    }

    /// The λ-pairing `π̂_* D'(M') -> D(π̂_* M')`, `x^r ψ_a ↦ Σ_s λ(x^{r+s}) φ_{a,s}`,
    /// with its source and target.
    pub fn lambda_map(&self, m: &DgModule<E>) -> Result<(DgModule<K>, DgModule<K>, DgModuleMap<K::Elem>)> {
        let t = &self.ctx_y.t;
        let src = self.pushforward(&dualize(m), t)?;
        let tgt = dualize(&self.pushforward(m, t)?);
        let d = self.degree();
        let powers = self.ext.power_basis();
        let pair: Vec<Vec<K::Elem>> = (0..d)
            .map(|r| (0..d).map(|s| self.lambda_of(&self.ext.mul(&powers[r], &powers[s]))).collect())
            .collect();
        let mut map = DgModuleMap::new();
        for (b, n) in &src.complex.dims {
            let mut entries = Vec::new();
            for a in 0..n / d {
                for r in 0..d {
                    for s in 0..d {
                        entries.push((a * d + s, a * d + r, pair[r][s].clone()));
                    }
                }
            }
            map.blocks.insert(*b, Matrix::from_triplets(&self.base, *n, *n, entries));
        }
        Ok((src, tgt, map))
    }

    /// All four identities and the 𝒜-compatibility for a 𝒯_Y-module `m` and a
    /// 𝒯_X-module `mx`, both bounded below.
    pub fn check(&self, m: &DgModule<K>, mx: &DgModule<E>, w: &Window) -> Result<BaseChangeReport> {
        let (cy, cx) = (&self.ctx_y, &self.ctx_x);
        let kappa_y = kappa(cy, m, w)?;
        let pulled_kappa = self.pullback(&kappa_y, &cx.r)?.table(w)?;

        let pullback = TableComparison::new(
            "Lπ̃^*κ^Y(M) = κ^X(π̂^!M)",
            pulled_kappa.clone(),
            kappa(cx, &self.upper_shriek(m)?, w)?.table(w)?,
        );
        let smooth = TableComparison::new(
            "Lπ̃^*κ^Y(M) = κ^X(Lπ̂^*M)",
            pulled_kappa,
            kappa(cx, &self.pullback(m, &cx.t)?, w)?.table(w)?,
        );
        let pushforward = TableComparison::new(
            "Rπ̃_*κ^X(M') = κ^Y(Rπ̂_*M')",
            self.pushforward(&kappa(cx, mx, w)?, &cy.r)?.table(w)?,
            kappa(cy, &self.pushforward(mx, &cy.t)?, w)?.table(w)?,
        );
        let (src, tgt, map) = self.lambda_map(mx)?;
        let duality = TableComparison::new("Rπ̂_*D'(M') = D(Rπ̂_*M')", src.table(w)?, tgt.table(w)?);
        let lambda_map_iso = check_module_map(&map, &src, &tgt, w).is_empty()
            && module_quasi_iso(&map, &src, &tgt, w)?
            && src.complex.dims.iter().all(|(b, n)| {
                crate::linalg::rank(&self.base, &map.block(*b, *n, *n)) == *n
            });

        let dm = dualize(m);
        let cd = TableComparison::new(
            "Lπ̌^*𝒜_Y(N) = 𝒜_X(Lπ̂^*N)",
            self.pullback(&functor_a(cy, &dm, w)?.module, &cx.s)?.table(w)?,
            functor_a(cx, &self.pullback(&dm, &cx.t)?, w)?.module.table(w)?,
        );
        Ok(BaseChangeReport {
            comparisons: vec![pullback, pushforward, smooth, duality, cd],
            lambda_map_iso,
        })
    }
}

fn same_generators<K: Field, E: Field>(a: &SymDgAlgebra<K>, b: &SymDgAlgebra<E>) -> Result<()> {
    let ga: Vec<(&str, Bidegree)> = a.generators().iter().map(|g| (g.label.as_str(), g.degree)).collect();
    let gb: Vec<(&str, Bidegree)> = b.generators().iter().map(|g| (g.label.as_str(), g.degree)).collect();
    if ga != gb {
        return Err(Error::InvalidModule("algebras do not correspond under base change".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgmod::{free_module, unit_module};
    use crate::geometry::{build_x_lkd, SubbundleSetup};
    use crate::linalg::{ExtensionField, PrimeField};

    fn f25() -> ExtensionField {
        ExtensionField::new(5, vec![3, 0, 1]).unwrap()
    }

    fn lines(f: &PrimeField) -> GeneratorComplex<u64> {
        let e1 = Matrix::from_i64(f, &[vec![1], vec![0]]);
        build_x_lkd(f, &SubbundleSetup::new(f, 2, e1.clone(), e1).unwrap()).unwrap()
    }

    #[test]
    fn dims_double() {
        let f5 = PrimeField::new(5).unwrap();
        let bc = BaseChange::<PrimeField, _>::new(f25(), &lines(&f5), None).unwrap();
        let m = free_module(bc.ctx_y.t.clone(), &[Bidegree::ZERO], &Window::of(0, 6)).unwrap();
        let round = bc.pushforward(&bc.pullback(&m, &bc.ctx_x.t).unwrap(), &bc.ctx_y.t).unwrap();
        assert!(round.validate().is_empty());
        for (b, n) in &m.complex.dims {
            assert_eq!(round.dim(*b), 2 * n);
        }
        let k = unit_module(bc.ctx_y.t.clone(), Bidegree::ZERO);
        let shriek = bc.upper_shriek(&k).unwrap();
        assert!(shriek.validate().is_empty());
        assert_eq!(shriek.table(&Window::of(0, 0)).unwrap(), [(Bidegree::ZERO, 1)].into_iter().collect());
    }

    #[test]
    fn trivial_extension_is_identity() {
        let f5 = PrimeField::new(5).unwrap();
        let bc = BaseChange::<PrimeField, PrimeField>::new(f5, &lines(&f5), None).unwrap();
        let m = free_module(bc.ctx_y.t.clone(), &[Bidegree::ZERO], &Window::of(0, 6)).unwrap();
        let p = bc.pushforward(&m, &bc.ctx_y.t).unwrap();
        assert_eq!(p.complex, m.complex);
        assert_eq!(p.actions, m.actions);
    }

    #[test]
    fn base_change_identities() {
        let f5 = PrimeField::new(5).unwrap();
        let bc = BaseChange::<PrimeField, _>::new(f25(), &lines(&f5), None).unwrap();
        let w = Window::of(-6, 0);
        let m = free_module(bc.ctx_y.t.clone(), &[Bidegree::ZERO], &w.negated()).unwrap();
        let mx = unit_module(bc.ctx_x.t.clone(), Bidegree::ZERO);
        let r = bc.check(&m, &mx, &w).unwrap();
        for c in &r.comparisons {
            assert!(c.agrees(), "{}: {:?} vs {:?}", c.name, c.left, c.right);
            assert!(!c.left.is_empty(), "{}", c.name);
        }
        assert!(r.lambda_map_iso);
        // a nonstandard functional works as well
        let bc = BaseChange::<PrimeField, _>::new(f25(), &lines(&f5), Some(vec![0, 1])).unwrap();
        let mx = free_module(bc.ctx_x.t.clone(), &[Bidegree::ZERO], &w.negated()).unwrap();
        assert!(bc.check(&m, &mx, &w).unwrap().passes());
    }
}
