//! Morphisms of setups `φ: E -> E'` with `φ(F_i) ⊆ F_i'` and the induced
//! algebra maps Φ: 𝒯' -> 𝒯 and Ψ: ℛ -> ℛ'.

use std::sync::Arc;

use crate::bigraded::{Bidegree, Window};
use crate::dgmod::{
    extend_scalars, free_module, restrict_scalars, semifree_resolution, unit_module, DgModule,
};
use crate::error::{Error, Result};
use crate::geometry::{build_x_lkd, orthogonal, SubbundleSetup, TableComparison};
use crate::koszul::{kappa, KoszulContext};
use crate::linalg::{solve, Field, Matrix};
use crate::symdg::{sym_morphism, AlgebraMorphism, GeneratorMap};

/// A map of setups, `phi` of shape `dim E' × dim E`.
#[derive(Clone, Debug, PartialEq)]
pub struct BundleMorphism<E> {
    pub source: SubbundleSetup<E>,
    pub target: SubbundleSetup<E>,
    pub phi: Matrix<E>,
}

impl<E: Clone + PartialEq + std::fmt::Debug + Send + Sync> BundleMorphism<E> {
    pub fn validate<F: Field<Elem = E>>(&self, f: &F) -> Result<()> {
        self.source.validate(f)?;
        self.target.validate(f)?;
        if self.phi.shape() != (self.target.dim_e, self.source.dim_e) {
            return Err(Error::InvalidSetup(format!(
                "phi has shape {:?}, expected {:?}",
                self.phi.shape(),
                (self.target.dim_e, self.source.dim_e)
            )));
        }
        for (name, a, b) in [
            ("F1", &self.source.f1, &self.target.f1),
            ("F2", &self.source.f2, &self.target.f2),
        ] {
            if inclusion(f, &self.phi.compose(f, a), b)?.is_none() {
                return Err(Error::InvalidSetup(format!("phi({name}) is not contained in {name}'")));
            }
        }
        Ok(())
    }
}

/// `C` with `span · C = v`, if the columns of `v` lie in the span.
fn inclusion<F: Field>(f: &F, v: &Matrix<F::Elem>, span: &Matrix<F::Elem>) -> Result<Option<Matrix<F::Elem>>> {
    if v.cols() == 0 {
        return Ok(Some(Matrix::zero(span.cols(), 0)));
    }
    if span.cols() == 0 {
        return Ok(v.is_zero().then(|| Matrix::zero(0, v.cols())));
    }
    solve(f, span, v)
}

/// Φ, Ψ and the Koszul contexts of source and target.
pub struct PhiFunctors<F: Field> {
    pub ctx: Arc<KoszulContext<F>>,
    pub ctx_prime: Arc<KoszulContext<F>>,
    /// 𝒯' -> 𝒯
    pub phi: AlgebraMorphism<F>,
    /// ℛ -> ℛ'
    pub psi: AlgebraMorphism<F>,
}

/// The chain map 𝒳' -> 𝒳: precomposition with φ on `F1'^⊥ -> F1^⊥` and
/// restriction along φ on `F2'^∨ -> F2^∨`.
pub fn x_map<F: Field>(f: &F, b: &BundleMorphism<F::Elem>) -> Result<GeneratorMap<F::Elem>> {
    b.validate(f)?;
    let xi = orthogonal(f, b.source.dim_e, &b.source.f1);
    let xi_t = orthogonal(f, b.target.dim_e, &b.target.f1);
    let mut blocks = std::collections::BTreeMap::new();
    if xi.cols() > 0 && xi_t.cols() > 0 {
        let pulled = b.phi.transpose().compose(f, &xi_t);
        let m = inclusion(f, &pulled, &xi)?.ok_or_else(|| Error::InvalidSetup("psi(F1'^⊥) ⊄ F1^⊥".into()))?;
        blocks.insert(-1, m);
    }
    if b.source.f2.cols() > 0 && b.target.f2.cols() > 0 {
        let c = inclusion(f, &b.phi.compose(f, &b.source.f2), &b.target.f2)?
            .ok_or_else(|| Error::InvalidSetup("phi(F2) ⊄ F2'".into()))?;
        blocks.insert(0, c.transpose());
    }
    Ok(GeneratorMap { blocks })
}

pub fn phi_functors<F: Field>(f: &F, b: &BundleMorphism<F::Elem>) -> Result<PhiFunctors<F>> {
    let map = x_map(f, b)?;
    let ctx = Arc::new(KoszulContext::new(f, build_x_lkd(f, &b.source)?)?);
    let ctx_prime = Arc::new(KoszulContext::new(f, build_x_lkd(f, &b.target)?)?);
    let phi = sym_morphism(&map, &ctx_prime.x, &ctx.x, ctx_prime.t.clone(), ctx.t.clone())?;
    let on_s = sym_morphism(&map.dual_shifted(), &ctx.y, &ctx_prime.y, ctx.s.clone(), ctx_prime.s.clone())?;
    let psi = AlgebraMorphism::new(ctx.r.clone(), ctx_prime.r.clone(), on_s.gen_images)?;
    Ok(PhiFunctors {
        ctx,
        ctx_prime,
        phi,
        psi,
    })
}

impl<F: Field> PhiFunctors<F> {
    /// (i): `LΨ^* κ(M)` against `κ'(Φ_* M)` for a 𝒯-module.
    pub fn compat_i(&self, m: &DgModule<F>, w: &Window) -> Result<TableComparison> {
        let km = kappa(&self.ctx, m, w)?;
        let (p, _) = semifree_resolution(&km, w)?;
        let left = extend_scalars(&self.psi, &p, w)?.table(w)?;
        let right = kappa(&self.ctx_prime, &restrict_scalars(&self.phi, m)?, w)?.table(w)?;
        Ok(TableComparison::new("LΨ^*κ(M) = κ'(Φ_*M)", left, right))
    }

    /// (ii): `κ(LΦ^* M')` against `Ψ_* κ'(M')` for a 𝒯'-module.
    pub fn compat_ii(&self, m: &DgModule<F>, w: &Window) -> Result<TableComparison> {
        let inner = w.negated();
        let (p, _) = semifree_resolution(m, &inner)?;
        let pulled = extend_scalars(&self.phi, &p, &inner)?;
        let left = kappa(&self.ctx, &pulled, w)?.table(w)?;
        let right = restrict_scalars(&self.psi, &kappa(&self.ctx_prime, m, w)?)?.table(w)?;
        Ok(TableComparison::new("κ(LΦ^*M') = Ψ_*κ'(M')", left, right))
    }
}

/// Both compatibilities on the free rank-one and trivial modules of each side.
pub fn check_morphism_compat<F: Field>(
    f: &F,
    b: &BundleMorphism<F::Elem>,
    w: &Window,
) -> Result<Vec<TableComparison>> {
    let fun = phi_functors(f, b)?;
    let inner = w.negated();
    let mut out = Vec::new();
    for (name, ctx, second) in [("M", &fun.ctx, false), ("M'", &fun.ctx_prime, true)] {
        let free = free_module(ctx.t.clone(), &[Bidegree::ZERO], &inner)?;
        let k = unit_module(ctx.t.clone(), Bidegree::ZERO);
        for (label, m) in [("free", free), ("trivial", k)] {
            let mut c = if second {
                fun.compat_ii(&m, w)?
            } else {
                fun.compat_i(&m, w)?
            };
            c.name = format!("{} [{name} = {label}]", c.name);
            out.push(c);
        }
    }
    Ok(out)
}
