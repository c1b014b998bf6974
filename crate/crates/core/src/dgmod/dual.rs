//! Duality with coefficients in the ground field placed at (0,0).

use crate::bigraded::{Bidegree, ComplexMap};
use crate::dgmod::{DgModule, DgModuleMap};
use crate::linalg::{Field, Matrix};

/// `D(M)^i_j = Hom(M^{-i}_{-j}, k)` with `d(φ) = -(-1)^{|φ|} φ∘d` and
/// `(a·φ)(m) = (-1)^{|a||φ|} φ(a·m)`.
pub fn dualize<F: Field>(m: &DgModule<F>) -> DgModule<F> {
    let f = m.field();
    let mut out = DgModule::empty(m.algebra.clone(), m.window.negated());
    out.bounded_above = m.bounded_below;
    out.bounded_below = m.bounded_above;
    for (b, d) in &m.complex.dims {
        out.complex.set_dim(b.neg(), *d);
    }
    for (b, d) in &m.complex.diff {
        // d_M: b -> b+1 dualizes to a block out of -(b+1).
        let src = b.next().neg();
        let negative = src.i.rem_euclid(2) == 0;
        out.complex.set_d(src, d.transpose().signed(f, negative));
    }
    for (g, blocks) in m.actions.iter().enumerate() {
        let deg = m.gen_degree(g);
        for (s, x) in blocks {
            let src = (*s + deg).neg();
            let odd = (deg.i * src.i).rem_euclid(2) == 1;
            out.set_action(g, src, x.transpose().signed(f, odd));
        }
    }
    out
}

/// Canonical map `M -> D(D(M))`, `e ↦ (φ ↦ (-1)^{|e||φ|} φ(e))`.
pub fn double_dual_map<F: Field>(m: &DgModule<F>) -> DgModuleMap<F::Elem> {
    let f = m.field();
    let mut map = ComplexMap::new();
    for (b, d) in &m.complex.dims {
        map.blocks
            .insert(*b, Matrix::signed_identity(f, *d, b.i.rem_euclid(2) == 1));
    }
    map
}

/// Bidegrees of `D(M)` are negatives of those of `M`.
pub fn dual_bidegree(b: Bidegree) -> Bidegree {
    b.neg()
}
