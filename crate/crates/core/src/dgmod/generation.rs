//! Finite surrogate for finite generation of cohomology.

use std::collections::BTreeMap;

use crate::bigraded::{Bidegree, Window};
use crate::dgmod::DgModule;
use crate::error::{Error, Result};
use crate::linalg::{image, kernel, rank, Field, Matrix};

/// Whether the cohomology classes with internal degree in `gen_window`
/// generate all cohomology in `test_window` under the maps induced by the
/// algebra generators that are cycles. Only window-verified: nothing
/// outside `test_window` is examined.
pub fn window_generation_check<F: Field>(
    m: &DgModule<F>,
    gen_window: &Window,
    test_window: &Window,
) -> Result<bool> {
    if !test_window.covers(gen_window) {
        return Err(Error::InvalidModule("test window must contain the generation window".into()));
    }
    m.require(test_window.j_min, test_window.j_max, "module")?;
    let f = m.field();
    let a = &m.algebra;
    let cycles = a.cycle_generators();
    let mut js: Vec<i64> = test_window.degrees().collect();
    if a.direction() < 0 {
        js.reverse();
    }
    let mut reach: BTreeMap<Bidegree, Matrix<F::Elem>> = BTreeMap::new();
    for j in js {
        for b in m.slice(j) {
            let z = kernel(f, &m.d(b));
            let bd = m.d(b.prev());
            let mut span = if gen_window.contains(j) {
                z.clone()
            } else {
                Matrix::zero(m.dim(b), 0)
            };
            for &g in &cycles {
                let src = b - a.generators()[g].degree;
                if let Some(r) = reach.get(&src) {
                    span = span.hstack(&m.action(g, src).compose(f, r))?;
                }
            }
            let span = image(f, &span.hstack(&bd)?);
            if span.cols() != z.cols() {
                return Ok(false);
            }
            debug_assert_eq!(rank(f, &span), z.cols());
            reach.insert(b, span);
        }
    }
    Ok(true)
}
