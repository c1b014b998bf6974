//! Independent computation of `Tor^R(R/I1, R/I2)` for `R = k[z_1..z_d]` and
//! `I_k` generated by the linear forms of `F_k^⊥`, through the Koszul
//! resolution of `R/I1` tensored with the quotient ring `R/I2`.

use std::collections::HashMap;

use crate::bigraded::{cohomology, Bidegree, BigradedComplex, Table, Window};
use crate::error::Result;
use crate::geometry::{orthogonal, SubbundleSetup};
use crate::linalg::{Echelon, Field, Matrix, SparseVec};

/// Exponent vectors of total degree `m` in `d` variables.
fn monomials(d: usize, m: u32) -> Vec<Vec<u32>> {
    fn go(d: usize, m: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == d {
            prefix.push(m);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=m).rev() {
            prefix.push(e);
            go(d, m - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d == 0 {
        if m == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(d, m, &mut Vec::new(), &mut out);
    out
}

/// One graded piece of `R/I2`: monomials of `R_m`, the echelon form of
/// `(I2)_m`, and the surviving (non-pivot) monomials numbered in order.
struct QuotientPiece<F: Field> {
    index: HashMap<Vec<u32>, usize>,
    ideal: Echelon<F>,
    basis: Vec<usize>,
    position: HashMap<usize, usize>,
}

impl<F: Field> QuotientPiece<F> {
    fn new(f: &F, d: usize, m: u32, forms: &[SparseVec<F::Elem>]) -> Self {
        let mons = monomials(d, m);
        let index: HashMap<Vec<u32>, usize> =
            mons.iter().cloned().enumerate().map(|(k, e)| (e, k)).collect();
        let mut ideal = Echelon::new(f, mons.len());
        if m > 0 {
            for mu in monomials(d, m - 1) {
                for l in forms {
                    ideal.insert(multiply(f, &index, &mu, l));
                }
            }
        }
        let mut pivots = vec![false; mons.len()];
        for p in ideal.pivots() {
            pivots[p] = true;
        }
        let basis: Vec<usize> = (0..mons.len()).filter(|k| !pivots[*k]).collect();
        let position = basis.iter().enumerate().map(|(a, k)| (*k, a)).collect();
        QuotientPiece {
            index,
            ideal,
            basis,
            position,
        }
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of the class of `v ∈ R_m` in the quotient basis.
    fn class(&self, v: SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        self.ideal
            .reduce(v)
            .into_iter()
            .map(|(k, c)| (self.position[&k], c))
            .collect()
    }
}

/// `l · z^mu` in the monomial basis of degree `|mu| + 1`.
fn multiply<F: Field>(
    f: &F,
    index: &HashMap<Vec<u32>, usize>,
    mu: &[u32],
    l: &[(usize, F::Elem)],
) -> SparseVec<F::Elem> {
    let mut v: Vec<(usize, F::Elem)> = l
        .iter()
        .map(|(i, c)| {
            let mut e = mu.to_vec();
            e[*i] += 1;
            (index[&e], c.clone())
        })
        .collect();
    v.sort_by_key(|(k, _)| *k);
    v.retain(|(_, c)| !f.is_zero(c));
    v
}

/// Subsets of `0..p` of size `q`, as sorted index lists in lexicographic order.
fn subsets(p: usize, q: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, p: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for s in start..p {
            cur.push(s);
            go(s + 1, p, q, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, p, q, &mut Vec::new(), &mut out);
    out
}

/// Bigraded `Tor` dimensions on `w`: `Tor_q` in polynomial degree `n` sits
/// at bidegree `(-q, 2n)`.
pub fn tor_oracle<F: Field>(f: &F, s: &SubbundleSetup<F::Elem>, w: &Window) -> Result<Table> {
    s.validate(f)?;
    let d = s.dim_e;
    let xi = orthogonal(f, d, &s.f1).columns();
    let forms = orthogonal(f, d, &s.f2).columns();
    let p = xi.len();
    if w.j_max < 0 {
        return Ok(Table::new());
    }
    let top = (w.j_max / 2) as u32;
    let pieces: Vec<QuotientPiece<F>> = (0..=top + 1)
        .map(|m| QuotientPiece::new(f, d, m, &forms))
        .collect();

    let mut c = BigradedComplex::new();
    for n in 0..=top {
        let j = 2 * n as i64;
        if !w.contains(j) {
            continue;
        }
        for q in 0..=p.min(n as usize) {
            let m = n as usize - q;
            let sets = subsets(p, q);
            let piece = &pieces[m];
            let at = Bidegree::new(-(q as i64), j);
            c.set_dim(at, sets.len() * piece.dim());
            if q == 0 {
                continue;
            }
            // e_S ⊗ f ↦ Σ_k (-1)^k e_{S∖s_k} ⊗ ξ_{s_k} f
            let lower = subsets(p, q - 1);
            let lower_index: HashMap<&Vec<usize>, usize> =
                lower.iter().enumerate().map(|(k, t)| (t, k)).collect();
            let target = &pieces[m + 1];
            let mons = monomials(d, m as u32);
            let mut entries = Vec::new();
            for (a, set) in sets.iter().enumerate() {
                for (b, &k) in piece.basis.iter().enumerate() {
                    let col = a * piece.dim() + b;
                    for (pos, &sk) in set.iter().enumerate() {
                        let mut rest = set.clone();
                        rest.remove(pos);
                        let row0 = lower_index[&rest] * target.dim();
                        let prod = multiply(f, &target.index, &mons[k], &xi[sk]);
                        let sign = f.sign(pos % 2 == 1);
                        for (r, v) in target.class(prod) {
                            entries.push((row0 + r, col, f.mul(&sign, &v)));
                        }
                    }
                }
            }
            let rows = lower.len() * target.dim();
            c.set_d(at, Matrix::from_triplets(f, rows, sets.len() * piece.dim(), entries));
        }
    }
    Ok(cohomology(f, &c, w)?.dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::derived_intersection_cohomology;
    use crate::geometry::tests::setup;
    use crate::linalg::{PrimeField, Rationals};
    use proptest::prelude::*;

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(3, 2).len(), 6);
        assert_eq!(monomials(1, 5), vec![vec![5]]);
        assert_eq!(monomials(0, 0).len(), 1);
        assert_eq!(subsets(4, 2).len(), 6);
    }

    #[test]
    fn known_tor() {
        let q = Rationals;
        let w = Window::of(0, 8);
        // a point against itself inside a line: Tor_1 = k in degree 1
        let t = tor_oracle(&q, &setup(&q, 1, &[], &[]), &w).unwrap();
        assert_eq!(t, [(Bidegree::ZERO, 1), (Bidegree::new(-1, 2), 1)].into_iter().collect());
        // a line against itself in the plane
        let t = tor_oracle(&q, &setup(&q, 2, &[vec![1], vec![0]], &[vec![1], vec![0]]), &w).unwrap();
        assert_eq!(t.len(), 5 + 4);
    }

    fn rand_setup(f: &PrimeField, dim: usize, r1: usize, r2: usize, seed: &[u64]) -> Option<SubbundleSetup<u64>> {
        let p = f.p();
        let mut it = seed.iter().cycle();
        let mut mat = |r: usize| {
            let rows: Vec<Vec<i64>> = (0..dim)
                .map(|_| (0..r).map(|_| (it.next().unwrap() % p) as i64).collect())
                .collect();
            if r == 0 {
                Matrix::zero(dim, 0)
            } else {
                Matrix::from_i64(f, &rows)
            }
        };
        let (a, b) = (mat(r1), mat(r2));
        SubbundleSetup::new(f, dim, a, b).ok()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn oracle_matches_derived_intersection(
            dim in 1usize..4,
            r1 in 0usize..4,
            r2 in 0usize..4,
            seed in proptest::collection::vec(0u64..3, 12),
        ) {
            let f = PrimeField::new(3).unwrap();
            let (r1, r2) = (r1.min(dim), r2.min(dim));
            if let Some(s) = rand_setup(&f, dim, r1, r2, &seed) {
                let w = Window::of(0, 8);
                let direct = derived_intersection_cohomology(&f, &s, &w).unwrap().dims;
                prop_assert_eq!(direct, tor_oracle(&f, &s, &w).unwrap());
            }
        }
    }
}
