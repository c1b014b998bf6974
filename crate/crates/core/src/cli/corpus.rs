//! Seeded example modules, complexes and setups for the verification suites.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::bigraded::{Bidegree, Table, Window};
use crate::dgmod::{cone, direct_sum, free_module, identity_map, shift, trivial_module, twist, unit_module, DgModule};
use crate::error::Result;
use crate::geometry::SubbundleSetup;
use crate::koszul::KoszulContext;
use crate::linalg::{independent_columns, kernel, Field, Matrix};
use crate::symdg::{GeneratorComplex, SymDgAlgebra};

pub fn random_matrix<F: Field>(f: &F, rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<F::Elem> {
    let dense: Vec<Vec<i64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-2..=2)).collect())
        .collect();
    if rows == 0 || cols == 0 {
        return Matrix::zero(rows, cols);
    }
    Matrix::from_i64(f, &dense)
}

/// A random `rows × cols` matrix vanishing on the image of `prev`.
fn random_after<F: Field>(
    f: &F,
    rng: &mut ChaCha8Rng,
    prev: Option<&Matrix<F::Elem>>,
    rows: usize,
    cols: usize,
) -> Matrix<F::Elem> {
    match prev {
        Some(p) if p.cols() > 0 && p.rows() > 0 => {
            let k = kernel(f, &p.transpose());
            random_matrix(f, rng, rows, k.cols()).compose(f, &k.transpose())
        }
        _ => random_matrix(f, rng, rows, cols),
    }
}

/// 𝒳 with components in degrees `[-n, 0]`, `n ≤ 2`, ranks at most 2.
pub fn random_x<F: Field>(f: &F, rng: &mut ChaCha8Rng) -> GeneratorComplex<F::Elem> {
    let n = rng.gen_range(0..=2i64);
    let mut x = GeneratorComplex::new(2);
    for i in -n..=0 {
        x = x.with_rank(i, rng.gen_range(0..=2));
    }
    if x.total_rank() == 0 {
        x = x.with_rank(0, 1);
    }
    let mut prev: Option<Matrix<F::Elem>> = None;
    for i in -n..0 {
        let (r, c) = (x.rank(i + 1), x.rank(i));
        let d = random_after(f, rng, prev.as_ref(), r, c);
        if r > 0 && c > 0 {
            x = x.with_diff(i, d.clone());
        }
        prev = Some(d);
    }
    x
}

/// Subspaces of `k^d`, `d ≤ 3`, spanned by independent random columns.
pub fn random_setup<F: Field>(f: &F, rng: &mut ChaCha8Rng) -> SubbundleSetup<F::Elem> {
    let d = rng.gen_range(1..=3usize);
    let mut span = || {
        let r = rng.gen_range(0..=d);
        let m = random_matrix(f, rng, d, r);
        m.select_columns(&independent_columns(f, &m))
    };
    let (f1, f2) = (span(), span());
    SubbundleSetup::new(f, d, f1, f2).expect("independent columns")
}

/// Finite module with zero action: random dimensions in a few internal
/// degrees and a random differential in each.
pub fn random_finite<F: Field>(
    a: Arc<SymDgAlgebra<F>>,
    rng: &mut ChaCha8Rng,
    degrees: &[i64],
) -> Result<DgModule<F>> {
    let f = a.field().clone();
    let mut dims = Table::new();
    let mut diff = BTreeMap::new();
    for &j in degrees {
        let ranks: Vec<usize> = (0..4).map(|_| rng.gen_range(0..=2)).collect();
        let mut prev: Option<Matrix<F::Elem>> = None;
        for (k, &r) in ranks.iter().enumerate() {
            let i = k as i64 - 2;
            if r > 0 {
                dims.insert(Bidegree::new(i, j), r);
            }
            if let Some(&next) = ranks.get(k + 1) {
                let d = random_after(&f, rng, prev.as_ref(), next, r);
                if next > 0 && r > 0 && !d.is_zero() {
                    diff.insert(Bidegree::new(i, j), d.clone());
                }
                prev = Some(d);
            }
        }
    }
    if dims.is_empty() {
        dims.insert(Bidegree::new(0, degrees[0]), 1);
    }
    trivial_module(a, &dims, diff)
}

/// Free module of rank one with everything above `top` dropped.
pub fn truncated_free<F: Field>(a: Arc<SymDgAlgebra<F>>, gens: &[Bidegree], top: i64) -> Result<DgModule<F>> {
    let lo = gens.iter().map(|g| g.j).min().unwrap_or(0).min(0);
    let mut m = free_module(a, gens, &Window::of(lo, top))?;
    m.bounded_above = true;
    m.presentation = None;
    Ok(m)
}

/// 𝒮 with everything below `lo` dropped.
pub fn truncated_s<F: Field>(ctx: &KoszulContext<F>, lo: i64) -> Result<DgModule<F>> {
    let mut m = ctx.s_free(lo)?;
    m.bounded_below = true;
    m.presentation = None;
    Ok(m)
}

/// The 𝒳 = (k -> k) complex in degrees -1, 0.
pub fn id_complex<F: Field>(f: &F) -> GeneratorComplex<F::Elem> {
    GeneratorComplex::new(2)
        .with_rank(-1, 1)
        .with_rank(0, 1)
        .with_diff(-1, Matrix::from_i64(f, &[vec![1]]))
}

/// Bounded-above 𝒯-modules: trivial, free-dual, cones and random ones.
pub fn mod_minus<F: Field>(ctx: &KoszulContext<F>, rng: &mut ChaCha8Rng) -> Result<Vec<(String, DgModule<F>)>> {
    let t = ctx.t.clone();
    let tr = truncated_free(t.clone(), &[Bidegree::ZERO], 4)?;
    let td = ctx.t_dual(-16)?;
    let mut out = vec![
        ("k".to_string(), unit_module(t.clone(), Bidegree::ZERO)),
        ("T^v".into(), td.clone()),
        ("T^v[1]<-2>".into(), shift(&twist(&ctx.t_dual(-16)?, -2), 1)),
        ("T/T_{>4}".into(), tr.clone()),
        ("cone(id T/T_{>4})".into(), cone(&identity_map(&tr), &tr, &tr)?),
        ("cone(id T^v)".into(), cone(&identity_map(&td), &td, &td)?),
    ];
    for k in 0..3 {
        out.push((format!("random finite {k}"), random_finite(t.clone(), rng, &[0, 2])?));
    }
    let two = truncated_free(t.clone(), &[Bidegree::ZERO, Bidegree::new(1, 2)], 4)?;
    out.push(("T(0,0)+T(1,2) truncated".into(), two.clone()));
    let mut k = unit_module(t, Bidegree::new(-1, 0));
    k.window = tr.window;
    out.push(("k[1] + T/T_{>4}".into(), direct_sum(&k, &tr)?));
    Ok(out)
}

/// Bounded-below 𝒮-modules for the counit.
pub fn mod_plus<F: Field>(ctx: &KoszulContext<F>, rng: &mut ChaCha8Rng) -> Result<Vec<(String, DgModule<F>)>> {
    let s = ctx.s.clone();
    let st = truncated_s(ctx, -4)?;
    let mut out = vec![
        ("k".to_string(), unit_module(s.clone(), Bidegree::ZERO)),
        ("S".into(), ctx.s_free(-12)?),
        ("S/S_{<-4}".into(), st.clone()),
        ("cone(id S/S_{<-4})".into(), cone(&identity_map(&st), &st, &st)?),
    ];
    for k in 0..2 {
        out.push((format!("random finite {k}"), random_finite(s.clone(), rng, &[0, -2])?));
    }
    Ok(out)
}
