//! Runtime-typed scalars for the serialization boundary.

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::linalg::field::{ExtensionField, Field, FieldSpec, PrimeField, Rationals};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Rational(BigRational),
    Residue(u64),
    Poly(Vec<u64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Inv,
    Neg,
}

impl FieldSpec {
    /// Parses a serialized scalar into canonical form for this field.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        Ok(match self {
            FieldSpec::Rationals => Scalar::Rational(Rationals.parse(s)?),
            FieldSpec::Prime { p } => Scalar::Residue(PrimeField::new(*p)?.parse(s)?),
            FieldSpec::Extension { p, min_poly } => {
                Scalar::Poly(ExtensionField::new(*p, min_poly.clone())?.parse(s)?)
            }
        })
    }

    pub fn format_scalar(&self, a: &Scalar) -> Result<String> {
        Ok(match (self, a) {
            (FieldSpec::Rationals, Scalar::Rational(x)) => Rationals.format(x),
            (FieldSpec::Prime { p }, Scalar::Residue(x)) => {
                let f = PrimeField::new(*p)?;
                f.format(&self.check_residue(&f, *x)?)
            }
            (FieldSpec::Extension { p, min_poly }, Scalar::Poly(x)) => {
                let f = ExtensionField::new(*p, min_poly.clone())?;
                f.format(&self.check_poly(&f, x)?)
            }
            _ => return Err(self.mismatch(a)),
        })
    }

    fn mismatch(&self, a: &Scalar) -> Error {
        Error::WrongField(format!("{a:?} is not an element of {}", self.name()))
    }

    fn check_residue(&self, f: &PrimeField, x: u64) -> Result<u64> {
        if x >= f.p() {
            return Err(Error::WrongField(format!("residue {x} not in [0, {})", f.p())));
        }
        Ok(x)
    }

    fn check_poly(&self, f: &ExtensionField, x: &[u64]) -> Result<Vec<u64>> {
        if x.len() != f.degree() || x.iter().any(|&c| c >= f.base().p()) {
            return Err(Error::WrongField(format!(
                "{x:?} is not a canonical residue for {}",
                self.name()
            )));
        }
        Ok(x.to_vec())
    }

    /// Exact arithmetic on runtime scalars. `b` is used only by the binary
    /// operations.
    pub fn arith(&self, op: ArithOp, a: &Scalar, b: Option<&Scalar>) -> Result<Scalar> {
        fn run<F: Field>(
            f: &F,
            op: ArithOp,
            a: F::Elem,
            b: Option<F::Elem>,
        ) -> Result<F::Elem> {
            let need_b = || {
                b.clone()
                    .ok_or_else(|| Error::Parse("binary operation needs two operands".into()))
            };
            Ok(match op {
                ArithOp::Add => f.add(&a, &need_b()?),
                ArithOp::Mul => f.mul(&a, &need_b()?),
                ArithOp::Neg => f.neg(&a),
                ArithOp::Inv => f.inv(&a).ok_or(Error::DivisionByZero)?,
            })
        }
        match self {
            FieldSpec::Rationals => {
                let unwrap = |s: &Scalar| match s {
                    Scalar::Rational(x) => Ok(x.clone()),
                    other => Err(self.mismatch(other)),
                };
                let b = b.map(unwrap).transpose()?;
                Ok(Scalar::Rational(run(&Rationals, op, unwrap(a)?, b)?))
            }
            FieldSpec::Prime { p } => {
                let f = PrimeField::new(*p)?;
                let unwrap = |s: &Scalar| match s {
                    Scalar::Residue(x) => self.check_residue(&f, *x),
                    other => Err(self.mismatch(other)),
                };
                let b = b.map(unwrap).transpose()?;
                Ok(Scalar::Residue(run(&f, op, unwrap(a)?, b)?))
            }
            FieldSpec::Extension { p, min_poly } => {
                let f = ExtensionField::new(*p, min_poly.clone())?;
                let unwrap = |s: &Scalar| match s {
                    Scalar::Poly(x) => self.check_poly(&f, x),
                    other => Err(self.mismatch(other)),
                };
                let b = b.map(unwrap).transpose()?;
                Ok(Scalar::Poly(run(&f, op, unwrap(a)?, b)?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        let q = FieldSpec::Rationals;
        let a = q.parse_scalar("1/2").unwrap();
        let b = q.parse_scalar("1/3").unwrap();
        let s = q.arith(ArithOp::Add, &a, Some(&b)).unwrap();
        assert_eq!(q.format_scalar(&s).unwrap(), "5/6");

        let f7 = FieldSpec::Prime { p: 7 };
        let inv = f7.arith(ArithOp::Inv, &Scalar::Residue(3), None).unwrap();
        assert_eq!(inv, Scalar::Residue(5));

        let f4 = FieldSpec::Extension {
            p: 2,
            min_poly: vec![1, 1, 1],
        };
        let x = f4.parse_scalar("[0,1]").unwrap();
        let xx = f4.arith(ArithOp::Mul, &x, Some(&x)).unwrap();
        assert_eq!(f4.format_scalar(&xx).unwrap(), "[1,1]");
    }

    #[test]
    fn errors() {
        let f7 = FieldSpec::Prime { p: 7 };
        assert_eq!(
            f7.arith(ArithOp::Inv, &Scalar::Residue(0), None),
            Err(Error::DivisionByZero)
        );
        let q = FieldSpec::Rationals;
        assert!(matches!(
            f7.arith(ArithOp::Add, &q.parse_scalar("1/2").unwrap(), Some(&Scalar::Residue(1))),
            Err(Error::WrongField(_))
        ));
        assert!(matches!(
            f7.arith(ArithOp::Neg, &Scalar::Residue(9), None),
            Err(Error::WrongField(_))
        ));
        assert!(matches!(
            FieldSpec::Prime { p: 9 }.validate(),
            Err(Error::InvalidField(_))
        ));
    }

    #[test]
    fn field_spec_json() {
        let spec: FieldSpec = serde_json::from_str(r#"{"type":"Fq","p":5,"min_poly":[3,0,1]}"#).unwrap();
        assert_eq!(spec.name(), "F_25");
        let back = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<FieldSpec>(&back).unwrap(), spec);
    }
}
