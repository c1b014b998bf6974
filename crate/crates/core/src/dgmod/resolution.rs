//! Staircase construction of semi-free resolutions.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::bigraded::{Bidegree, ComplexMap, Window};
use crate::dgmod::semifree::{FreeElement, Layout, SemiFree};
use crate::dgmod::{DgModule, DgModuleMap};
use crate::error::{Error, Result};
use crate::linalg::{extend_basis, kernel, Field, Matrix, SparseVec};

/// Matrix of `p: P -> M` on one bidegree, from the images of generators.
fn comparison_block<F: Field>(
    m: &DgModule<F>,
    gens: &[Bidegree],
    images: &[SparseVec<F::Elem>],
    layout: &Layout,
    b: Bidegree,
) -> Matrix<F::Elem> {
    let mut cols = Vec::with_capacity(layout.dim);
    for (k, _, basis) in &layout.blocks {
        for t in &basis.monomials {
            cols.push(m.act_monomial_vec(t, gens[*k], &images[*k]));
        }
    }
    Matrix::from_columns(m.dim(b), cols)
}

fn to_free_element<F: Field>(layout: &Layout, v: &SparseVec<F::Elem>) -> FreeElement<F::Elem> {
    v.iter()
        .map(|(p, c)| {
            let (t, k) = layout.decode(*p);
            (t, k, c.clone())
        })
        .collect()
}

/// A semi-free module `P` and a quasi-isomorphism `p: P -> M` on `w`.
///
/// Internal degrees are processed moving away from the bounded edge of `M`
/// (upwards for positively graded generators, downwards otherwise); within
/// one internal degree, kernel classes of `H(P) -> H(M)` are killed and
/// missing classes of `H(M)` are hit, by decreasing cohomological degree.
pub fn semifree_resolution<F: Field>(
    m: &DgModule<F>,
    w: &Window,
) -> Result<(DgModule<F>, DgModuleMap<F::Elem>)> {
    let f = m.field().clone();
    if let Some(p) = &m.presentation {
        let out = p.materialize(w)?;
        let id = ComplexMap::identity(&f, &out.complex);
        return Ok((out, id));
    }
    let a = m.algebra.clone();
    let dir = a.direction();
    let order: Vec<i64> = match dir {
        0 => {
            m.require(w.j_min, w.j_max, "module")?;
            w.degrees().collect()
        }
        d if d > 0 => {
            let lo = m.bottom().ok_or_else(|| {
                Error::Unbounded("resolution needs a module bounded below".into())
            })?;
            m.require(lo, w.j_max, "module")?;
            (lo..=w.j_max).collect()
        }
        _ => {
            let hi = m.top().ok_or_else(|| {
                Error::Unbounded("resolution needs a module bounded above".into())
            })?;
            m.require(w.j_min, hi, "module")?;
            (w.j_min..=hi).rev().collect()
        }
    };

    let mut sf = SemiFree::free(a.clone(), Vec::new());
    let mut images: Vec<SparseVec<F::Elem>> = Vec::new();
    for j in order {
        let mut degrees: BTreeSet<i64> = sf.cohomological_degrees(j);
        degrees.extend(m.complex.slice(j));
        let mut new_gens: Vec<(Bidegree, FreeElement<F::Elem>, SparseVec<F::Elem>)> = Vec::new();
        for &i in degrees.iter().rev() {
            let b = Bidegree::new(i, j);
            let here = sf.layout(b);
            let next = sf.layout(b.next());
            let prev = sf.layout(b.prev());
            let d_p = sf.diff_block(&here, &next);
            let d_p_in = sf.diff_block(&prev, &here);
            let p_here = comparison_block(m, &sf.gens, &images, &here, b);
            let d_m_in = m.d(b.prev());

            let z = kernel(&f, &d_p);
            let pz = p_here.compose(&f, &z);

            // Kernel classes: z with p(z) = d_M(y), independent modulo B(P).
            let stacked = pz.hstack(&d_m_in.neg(&f))?;
            let pairs = kernel(&f, &stacked);
            let nz = z.cols();
            let mut zs = Vec::new();
            let mut ys = Vec::new();
            for col in pairs.columns() {
                let alpha: SparseVec<F::Elem> =
                    col.iter().filter(|(r, _)| *r < nz).cloned().collect();
                let y: SparseVec<F::Elem> = col
                    .iter()
                    .filter(|(r, _)| *r >= nz)
                    .map(|(r, c)| (r - nz, c.clone()))
                    .collect();
                zs.push(z.mul_vec(&f, &alpha));
                ys.push(y);
            }
            let zs_m = Matrix::from_columns(here.dim, zs.clone());
            for k in extend_basis(&f, &d_p_in, &zs_m) {
                new_gens.push((b.prev(), to_free_element::<F>(&here, &zs[k]), ys[k].clone()));
            }

            // Missing classes: cycles of M outside p(Z(P)) + B(M).
            let zm = kernel(&f, &m.d(b));
            let base = pz.hstack(&d_m_in)?;
            let zm_cols = zm.columns();
            for k in extend_basis(&f, &base, &zm) {
                new_gens.push((b, Vec::new(), zm_cols[k].clone()));
            }
        }
        for (g, dg, img) in new_gens {
            sf.gens.push(g);
            sf.dgen.push(dg);
            images.push(img);
        }
    }
    sf.complete = Some(match dir {
        0 => *w,
        d if d > 0 => Window::of(i64::MIN / 4, w.j_max),
        _ => Window::of(w.j_min, i64::MAX / 4),
    });
    let sf = Arc::new(sf);
    let p = sf.materialize(w)?;
    let mut map = ComplexMap::new();
    for &b in p.complex.dims.keys() {
        let l = sf.layout(b);
        map.blocks
            .insert(b, comparison_block(m, &sf.gens, &images, &l, b));
    }
    Ok((p, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgmod::{
        check_module_map, dualize, free_module, module_quasi_iso, unit_module,
    };
    use crate::linalg::{PrimeField, Rationals};
    use crate::symdg::{build_algebra, build_y, GeneratorComplex, SymDgAlgebra};

    fn algebra<F: Field>(f: &F, x: &GeneratorComplex<F::Elem>) -> Arc<SymDgAlgebra<F>> {
        Arc::new(build_algebra(f, x, 0, "x").unwrap())
    }

    #[test]
    fn koszul_resolution_of_k() {
        let q = Rationals;
        let a = algebra(&q, &GeneratorComplex::new(2).with_rank(0, 1));
        let k = unit_module(a, Bidegree::ZERO);
        let w = Window::of(0, 10);
        let (p, map) = semifree_resolution(&k, &w).unwrap();
        let pres = p.presentation.clone().unwrap();
        assert_eq!(pres.gens, vec![Bidegree::ZERO, Bidegree::new(-1, 2)]);
        assert!(p.validate().is_empty());
        assert!(check_module_map(&map, &p, &k, &w).is_empty());
        assert!(module_quasi_iso(&map, &p, &k, &w).unwrap());
        // dims match Λ(e) ⊗ k[x]
        for m in 1..=5 {
            assert_eq!(p.dim(Bidegree::new(0, 2 * m)), 1);
            assert_eq!(p.dim(Bidegree::new(-1, 2 * m)), 1);
        }
    }

    #[test]
    fn free_input_is_returned() {
        let q = Rationals;
        let a = algebra(&q, &GeneratorComplex::new(2).with_rank(-1, 1));
        let w = Window::of(0, 6);
        let m = free_module(a, &[Bidegree::ZERO], &w).unwrap();
        let (p, map) = semifree_resolution(&m, &w).unwrap();
        assert_eq!(p.complex, m.complex);
        assert_eq!(map, ComplexMap::identity(&q, &m.complex));
    }

    #[test]
    fn resolutions_are_quasi_isos() {
        let f3 = PrimeField::new(3).unwrap();
        let x = GeneratorComplex::new(2)
            .with_rank(-2, 1)
            .with_rank(-1, 1)
            .with_rank(0, 1)
            .with_diff(-2, Matrix::from_i64(&f3, &[vec![1]]));
        let a = algebra(&f3, &x);
        let w = Window::of(0, 8);
        // a finite quotient of a free module
        let mut trunc = free_module(a.clone(), &[Bidegree::ZERO], &Window::of(0, 4)).unwrap();
        trunc.bounded_above = true;
        trunc.presentation = None;
        assert!(trunc.validate().is_empty());
        let (p, map) = semifree_resolution(&trunc, &w).unwrap();
        assert!(p.validate().is_empty());
        assert!(check_module_map(&map, &p, &trunc, &w).is_empty());
        assert!(module_quasi_iso(&map, &p, &trunc, &w).unwrap());
        assert_eq!(p.table(&w).unwrap(), trunc.table(&w).unwrap());
    }

    #[test]
    fn negative_side_resolution() {
        let q = Rationals;
        let x = GeneratorComplex::new(2).with_rank(-1, 1).with_rank(0, 1);
        let y = build_y(&q, &x).unwrap();
        let s = Arc::new(build_algebra(&q, &y, 0, "y").unwrap());
        let k = unit_module(s.clone(), Bidegree::ZERO);
        let w = Window::of(-8, 0);
        let (p, map) = semifree_resolution(&k, &w).unwrap();
        assert!(p.validate().is_empty());
        assert!(module_quasi_iso(&map, &p, &k, &w).unwrap());
        // a finite quotient of a free module over the negative side
        let mut trunc = free_module(s, &[Bidegree::ZERO], &Window::of(-4, 0)).unwrap();
        trunc.bounded_below = true;
        trunc.presentation = None;
        assert!(trunc.validate().is_empty());
        let (p2, map2) = semifree_resolution(&trunc, &w).unwrap();
        assert!(module_quasi_iso(&map2, &p2, &trunc, &w).unwrap());
        // modules unbounded on the edge the resolution starts from are refused
        let t = algebra(&q, &x);
        let td = dualize(&free_module(t, &[Bidegree::ZERO], &Window::of(0, 6)).unwrap());
        assert!(matches!(
            semifree_resolution(&td, &Window::of(-6, 0)),
            Err(Error::Unbounded(_))
        ));
    }
}
