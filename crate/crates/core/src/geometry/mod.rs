//! Derived intersections of two linear subspaces `F1, F2 ⊂ E` over a
//! point, their Koszul duals, morphisms and base change.

pub mod basechange;
pub mod morphism;
pub mod tor;

use std::sync::Arc;

use crate::bigraded::{cohomology, Bidegree, CohomologyTable, Table, Window};
use crate::dgmod::unit_module;
use crate::error::{Error, Result};
use crate::koszul::{kappa, KoszulContext};
use crate::linalg::{kernel, rank, Field, Matrix};
use crate::symdg::{build_algebra, GeneratorComplex};

pub use basechange::{BaseChange, BaseChangeReport};
pub use morphism::{check_morphism_compat, phi_functors, BundleMorphism};
pub use tor::tor_oracle;

/// Subspaces of `E = k^dim_e` given by spanning columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SubbundleSetup<E> {
    pub dim_e: usize,
    pub f1: Matrix<E>,
    pub f2: Matrix<E>,
}

impl<E: Clone + PartialEq + std::fmt::Debug + Send + Sync> SubbundleSetup<E> {
    pub fn new<F: Field<Elem = E>>(f: &F, dim_e: usize, f1: Matrix<E>, f2: Matrix<E>) -> Result<Self> {
        let s = SubbundleSetup { dim_e, f1, f2 };
        s.validate(f)?;
        Ok(s)
    }

    pub fn validate<F: Field<Elem = E>>(&self, f: &F) -> Result<()> {
        for (name, m) in [("F1", &self.f1), ("F2", &self.f2)] {
            if m.rows() != self.dim_e {
                return Err(Error::InvalidSetup(format!(
                    "{name} has {} rows but dim E = {}",
                    m.rows(),
                    self.dim_e
                )));
            }
            if rank(f, m) != m.cols() {
                return Err(Error::InvalidSetup(format!("{name} columns are dependent")));
            }
        }
        Ok(())
    }
}

/// Basis of `F^⊥ ⊂ E^∨` (columns in dual coordinates): the kernel of `F^T`.
pub fn orthogonal<F: Field>(f: &F, dim_e: usize, span: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    if span.cols() == 0 {
        return Matrix::identity(f, dim_e);
    }
    kernel(f, &span.transpose())
}

/// 𝒳 = (F1^⊥ -> F2^∨) in degrees -1, 0: a functional goes to its restriction
/// to F2, written in the basis dual to the columns of F2.
pub fn build_x_lkd<F: Field>(f: &F, s: &SubbundleSetup<F::Elem>) -> Result<GeneratorComplex<F::Elem>> {
    s.validate(f)?;
    let xi = orthogonal(f, s.dim_e, &s.f1);
    let d = s.f2.transpose().compose(f, &xi);
    let mut x = GeneratorComplex::new(2)
        .with_rank(-1, xi.cols())
        .with_rank(0, s.f2.cols());
    if xi.cols() > 0 && s.f2.cols() > 0 {
        x = x.with_diff(-1, d);
    }
    x.validate_x(f)?;
    Ok(x)
}

/// `(E^∨, F1^⊥, F2^⊥)`.
pub fn dual_setup<F: Field>(f: &F, s: &SubbundleSetup<F::Elem>) -> SubbundleSetup<F::Elem> {
    SubbundleSetup {
        dim_e: s.dim_e,
        f1: orthogonal(f, s.dim_e, &s.f1),
        f2: orthogonal(f, s.dim_e, &s.f2),
    }
}

/// Whether two column sets span the same subspace.
pub fn same_span<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> bool {
    let ra = rank(f, a);
    ra == rank(f, b) && a.hstack(b).is_ok_and(|ab| rank(f, &ab) == ra)
}

/// H(𝒯) for 𝒯 = Sym(build_x_lkd(s)).
pub fn derived_intersection_cohomology<F: Field>(
    f: &F,
    s: &SubbundleSetup<F::Elem>,
    w: &Window,
) -> Result<CohomologyTable<F::Elem>> {
    let x = build_x_lkd(f, s)?;
    let t = build_algebra(f, &x, 0, "x")?;
    cohomology(f, &t.as_complex(w), w)
}

/// Hilbert function of Sym((F1 ∩ F2)^∨): `C(r + m - 1, m)` at (0, 2m) with
/// `r = dim F1 ∩ F2`.
pub fn honest_intersection_table<F: Field>(f: &F, s: &SubbundleSetup<F::Elem>, w: &Window) -> Result<Table> {
    let both = s.f1.hstack(&s.f2)?;
    let r = (s.f1.cols() + s.f2.cols()) as u64 - rank(f, &both) as u64;
    let mut t = Table::new();
    for j in w.degrees().filter(|j| *j >= 0 && j % 2 == 0) {
        let m = (j / 2) as u64;
        let d = if r == 0 {
            (m == 0) as u64
        } else {
            binomial(r + m - 1, m)
        };
        if d > 0 {
            t.insert(Bidegree::new(0, j), d as usize);
        }
    }
    Ok(t)
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Cohomology of κ(k) over the setup and of 𝒯 for the dual setup, the
/// latter with internal degrees negated. The two agree by Tor symmetry.
pub fn exchange_tables<F: Field>(
    f: &F,
    s: &SubbundleSetup<F::Elem>,
    w: &Window,
) -> Result<(Table, Table)> {
    let ctx = KoszulContext::new(f, build_x_lkd(f, s)?)?;
    let k = unit_module(ctx.t.clone(), Bidegree::ZERO);
    let left = kappa(&ctx, &k, w)?.table(w)?;
    let dual = derived_intersection_cohomology(f, &dual_setup(f, s), &w.negated())?;
    let right = dual
        .dims
        .into_iter()
        .map(|(b, d)| (Bidegree::new(b.i, -b.j), d))
        .collect();
    Ok((left, right))
}

/// Context for a setup, shared by the geometric checks.
pub fn context<F: Field>(f: &F, s: &SubbundleSetup<F::Elem>) -> Result<Arc<KoszulContext<F>>> {
    Ok(Arc::new(KoszulContext::new(f, build_x_lkd(f, s)?)?))
}

/// A named pair of tables that should agree.
#[derive(Clone, Debug, PartialEq)]
pub struct TableComparison {
    pub name: String,
    pub left: Table,
    pub right: Table,
}

impl TableComparison {
    pub fn new(name: impl Into<String>, left: Table, right: Table) -> Self {
        TableComparison {
            name: name.into(),
            left,
            right,
        }
    }

    pub fn agrees(&self) -> bool {
        self.left == self.right
    }
}
