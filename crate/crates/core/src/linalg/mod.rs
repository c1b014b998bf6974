//! Exact field arithmetic and sparse elimination.

pub mod echelon;
pub mod field;
pub mod matrix;
pub mod scalar;

pub use echelon::{
    extend_basis, image, independent_columns, kernel, rank, rank_kernel_image, solve, Echelon,
    TrackedEchelon,
};
pub use field::{ExtensionField, Field, FieldExtension, FieldSpec, PrimeField, Rationals};
pub use matrix::{Matrix, MatrixBuilder, SparseVec};
pub use scalar::{ArithOp, Scalar};

/// Runs `$body` with `$f` bound to the concrete field described by `$spec`.
#[macro_export]
macro_rules! with_field {
    ($spec:expr, |$f:ident| $body:expr) => {{
        match $spec {
            $crate::linalg::FieldSpec::Rationals => {
                let $f = $crate::linalg::Rationals;
                $body
            }
            $crate::linalg::FieldSpec::Prime { p } => {
                let $f = $crate::linalg::PrimeField::new(*p)?;
                $body
            }
            $crate::linalg::FieldSpec::Extension { p, min_poly } => {
                let $f = $crate::linalg::ExtensionField::new(*p, min_poly.clone())?;
                $body
            }
        }
    }};
}
