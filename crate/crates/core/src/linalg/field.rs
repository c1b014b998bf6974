//! Exact base fields: the rationals, prime fields and extensions of prime
//! fields given by an irreducible polynomial.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arithmetic over an exact field. Elements are plain values; the field
/// instance carries whatever data (modulus, minimal polynomial) the
/// operations need.
pub trait Field: Clone + Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// 0 for the rationals.
    fn characteristic(&self) -> u64;
    fn spec(&self) -> FieldSpec;
    fn format(&self, a: &Self::Elem) -> String;
    fn parse(&self, s: &str) -> Result<Self::Elem>;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// `a - c * b`, the elimination kernel.
    fn sub_mul(&self, a: &Self::Elem, c: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.sub(a, &self.mul(c, b))
    }

    fn sign(&self, negative: bool) -> Self::Elem {
        if negative {
            self.neg(&self.one())
        } else {
            self.one()
        }
    }
}

/// Serializable description of a field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum FieldSpec {
    #[serde(rename = "Q")]
    Rationals,
    #[serde(rename = "Fp")]
    Prime { p: u64 },
    /// `min_poly` lists coefficients from the constant term up; it must be
    /// monic and irreducible over F_p.
    #[serde(rename = "Fq")]
    Extension { p: u64, min_poly: Vec<u64> },
}

impl FieldSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            FieldSpec::Rationals => Ok(()),
            FieldSpec::Prime { p } => PrimeField::new(*p).map(|_| ()),
            FieldSpec::Extension { p, min_poly } => {
                ExtensionField::new(*p, min_poly.clone()).map(|_| ())
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            FieldSpec::Rationals => "Q".to_string(),
            FieldSpec::Prime { p } => format!("F_{p}"),
            FieldSpec::Extension { p, min_poly } => {
                format!("F_{}", p.pow((min_poly.len() - 1) as u32))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn is_one(&self, a: &BigRational) -> bool {
        a.is_one()
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn spec(&self) -> FieldSpec {
        FieldSpec::Rationals
    }
    fn format(&self, a: &BigRational) -> String {
        if a.denom().is_one() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
    fn parse(&self, s: &str) -> Result<BigRational> {
        let s = s.trim();
        let bad = || Error::Parse(format!("'{s}' is not a rational number"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let r = BigRational::new(num, den);
        debug_assert!(r.denom().is_positive());
        Ok(r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("p not prime: {p}")));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    fn reduce_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, n: i64) -> u64 {
        self.reduce_i64(n)
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = *a as u128 + *b as u128;
        (s % self.p as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        Some(pow_mod(*a, self.p - 2, self.p))
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime { p: self.p }
    }
    fn format(&self, a: &u64) -> String {
        a.to_string()
    }
    fn parse(&self, s: &str) -> Result<u64> {
        let s = s.trim();
        let v: i64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("'{s}' is not a residue")))?;
        if v < 0 || v as u64 >= self.p {
            return Err(Error::WrongField(format!(
                "residue {v} not in [0, {})",
                self.p
            )));
        }
        Ok(v as u64)
    }
}

/// F_p[x]/(f) with f monic irreducible of degree at least 2. Elements are
/// coefficient vectors of length deg f, constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionField {
    base: PrimeField,
    min_poly: Vec<u64>,
}

impl ExtensionField {
    pub fn new(p: u64, min_poly: Vec<u64>) -> Result<Self> {
        let base = PrimeField::new(p)?;
        if min_poly.len() < 3 {
            return Err(Error::InvalidField(
                "min_poly must have degree at least 2".into(),
            ));
        }
        if min_poly.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField(format!(
                "min_poly coefficients must lie in [0, {p})"
            )));
        }
        if *min_poly.last().unwrap() != 1 {
            return Err(Error::InvalidField("min_poly must be monic".into()));
        }
        if !is_irreducible(&base, &min_poly)? {
            return Err(Error::InvalidField(format!(
                "min_poly {min_poly:?} is reducible over F_{p}"
            )));
        }
        Ok(ExtensionField { base, min_poly })
    }

    pub fn base(&self) -> PrimeField {
        self.base
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    pub fn min_poly(&self) -> &[u64] {
        &self.min_poly
    }

    /// The class of x.
    pub fn generator(&self) -> Vec<u64> {
        let mut v = vec![0; self.degree()];
        v[1] = 1;
        v
    }

    /// Embeds an element of the prime field.
    pub fn embed(&self, a: u64) -> Vec<u64> {
        let mut v = vec![0; self.degree()];
        v[0] = a % self.base.p();
        v
    }

    fn reduce(&self, mut poly: Vec<u64>) -> Vec<u64> {
        let d = self.degree();
        let f = &self.base;
        while poly.len() > d {
            let lead = poly.pop().unwrap();
            if lead != 0 {
                let off = poly.len() - d;
                for (k, c) in self.min_poly[..d].iter().enumerate() {
                    poly[off + k] = f.sub(&poly[off + k], &f.mul(&lead, c));
                }
            }
        }
        poly.resize(d, 0);
        poly
    }
}

impl Field for ExtensionField {
    type Elem = Vec<u64>;

    fn zero(&self) -> Vec<u64> {
        vec![0; self.degree()]
    }
    fn one(&self) -> Vec<u64> {
        self.embed(1)
    }
    fn from_i64(&self, n: i64) -> Vec<u64> {
        self.embed(self.base.from_i64(n))
    }
    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }
    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let f = &self.base;
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = f.add(&prod[i + j], &f.mul(x, y));
            }
        }
        self.reduce(prod)
    }
    fn inv(&self, a: &Vec<u64>) -> Option<Vec<u64>> {
        if self.is_zero(a) {
            return None;
        }
        // Extended Euclid in F_p[x]: s*a + t*f = g, with g a nonzero constant.
        let f = &self.base;
        let (g, s) = poly_ext_gcd(f, &trim(a.clone()), &self.min_poly);
        debug_assert_eq!(g.len(), 1);
        let c = f.inv(&g[0])?;
        let s: Vec<u64> = s.iter().map(|x| f.mul(x, &c)).collect();
        Some(self.reduce(s))
    }
    fn is_zero(&self, a: &Vec<u64>) -> bool {
        a.iter().all(|&c| c == 0)
    }
    fn characteristic(&self) -> u64 {
        self.base.p()
    }
    fn spec(&self) -> FieldSpec {
        FieldSpec::Extension {
            p: self.base.p(),
            min_poly: self.min_poly.clone(),
        }
    }
    fn format(&self, a: &Vec<u64>) -> String {
        let parts: Vec<String> = a.iter().map(|c| c.to_string()).collect();
        format!("[{}]", parts.join(","))
    }
    fn parse(&self, s: &str) -> Result<Vec<u64>> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("'{t}' is not a coefficient list")))?;
        let mut coeffs = Vec::new();
        for part in inner.split(',').filter(|p| !p.trim().is_empty()) {
            coeffs.push(self.base.parse(part)?);
        }
        if coeffs.len() > self.degree() {
            return Err(Error::WrongField(format!(
                "'{t}' has more than {} coefficients",
                self.degree()
            )));
        }
        coeffs.resize(self.degree(), 0);
        Ok(coeffs)
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut b = base as u128 % m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'outer: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn trim(mut p: Vec<u64>) -> Vec<u64> {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
    p
}

fn poly_is_zero(p: &[u64]) -> bool {
    p.iter().all(|&c| c == 0)
}

/// Remainder of `a` modulo `b` (b nonzero) in F_p[x].
fn poly_rem(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
    poly_divmod(f, a, b).1
}

fn poly_divmod(f: &PrimeField, a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    let lead_inv = f.inv(b.last().unwrap()).expect("nonzero divisor");
    if r.len() < b.len() {
        return (vec![0], r);
    }
    let mut q = vec![0u64; r.len() - b.len() + 1];
    while r.len() >= b.len() && !poly_is_zero(&r) {
        let shift = r.len() - b.len();
        let c = f.mul(r.last().unwrap(), &lead_inv);
        q[shift] = c;
        for (k, bk) in b.iter().enumerate() {
            r[shift + k] = f.sub(&r[shift + k], &f.mul(&c, bk));
        }
        r = trim(r);
        if r.len() == 1 && b.len() == 1 {
            break;
        }
    }
    (trim(q), r)
}

fn poly_sub_mul(f: &PrimeField, a: &[u64], q: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len().max(q.len() + b.len() - 1)];
    out[..a.len()].copy_from_slice(a);
    for (i, x) in q.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.sub(&out[i + j], &f.mul(x, y));
        }
    }
    trim(out)
}

/// Returns (gcd, s) with s * a ≡ gcd (mod m).
fn poly_ext_gcd(f: &PrimeField, a: &[u64], m: &[u64]) -> (Vec<u64>, Vec<u64>) {
    let (mut r0, mut r1) = (trim(m.to_vec()), trim(a.to_vec()));
    let (mut s0, mut s1) = (vec![0u64], vec![1u64]);
    while !poly_is_zero(&r1) {
        let (q, r) = poly_divmod(f, &r0, &r1);
        let s2 = poly_sub_mul(f, &s0, &q, &s1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    (r0, s0)
}

const IRREDUCIBILITY_SEARCH_LIMIT: u64 = 2_000_000;

/// Brute-force factor search: f of degree d is irreducible iff no monic
/// polynomial of degree 1..=d/2 divides it.
fn is_irreducible(f: &PrimeField, poly: &[u64]) -> Result<bool> {
    let d = poly.len() - 1;
    let p = f.p();
    for deg in 1..=d / 2 {
        let count = p.checked_pow(deg as u32).filter(|&c| c <= IRREDUCIBILITY_SEARCH_LIMIT);
        let Some(count) = count else {
            return Err(Error::InvalidField(format!(
                "irreducibility search for degree {d} over F_{p} is too large"
            )));
        };
        for code in 0..count {
            let mut cand = Vec::with_capacity(deg + 1);
            let mut c = code;
            for _ in 0..deg {
                cand.push(c % p);
                c /= p;
            }
            cand.push(1);
            if poly_is_zero(&poly_rem(f, poly, &cand)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A finite extension `Self` of the field `K`, with a chosen K-basis
/// `1, x, ..., x^{d-1}` of `Self`.
pub trait FieldExtension<K: Field>: Field {
    fn base_field(&self) -> K;
    fn degree_over_base(&self) -> usize;
    fn embed_base(&self, a: &K::Elem) -> Self::Elem;
    /// Coordinates in the power basis.
    fn coordinates(&self, a: &Self::Elem) -> Vec<K::Elem>;
    fn power_basis(&self) -> Vec<Self::Elem>;

    /// Matrix (over K, column-major in the power basis) of multiplication by `a`.
    fn multiplication_matrix(&self, a: &Self::Elem) -> Vec<Vec<K::Elem>> {
        self.power_basis()
            .iter()
            .map(|b| self.coordinates(&self.mul(a, b)))
            .collect()
    }

    /// Trace of multiplication by `a`, a K-linear functional.
    fn trace(&self, a: &Self::Elem) -> K::Elem {
        let k = self.base_field();
        let cols = self.multiplication_matrix(a);
        let mut acc = k.zero();
        for (i, col) in cols.iter().enumerate() {
            acc = k.add(&acc, &col[i]);
        }
        acc
    }
}

impl FieldExtension<PrimeField> for ExtensionField {
    fn base_field(&self) -> PrimeField {
        self.base
    }
    fn degree_over_base(&self) -> usize {
        self.degree()
    }
    fn embed_base(&self, a: &u64) -> Vec<u64> {
        self.embed(*a)
    }
    fn coordinates(&self, a: &Vec<u64>) -> Vec<u64> {
        a.clone()
    }
    fn power_basis(&self) -> Vec<Vec<u64>> {
        (0..self.degree())
            .map(|k| {
                let mut v = vec![0; self.degree()];
                v[k] = 1;
                v
            })
            .collect()
    }
}

/// Every field is a degree-one extension of itself.
macro_rules! trivial_extension {
    ($t:ty) => {
        impl FieldExtension<$t> for $t {
            fn base_field(&self) -> $t {
                self.clone()
            }
            fn degree_over_base(&self) -> usize {
                1
            }
            fn embed_base(&self, a: &<$t as Field>::Elem) -> <$t as Field>::Elem {
                a.clone()
            }
            fn coordinates(&self, a: &<$t as Field>::Elem) -> Vec<<$t as Field>::Elem> {
                vec![a.clone()]
            }
            fn power_basis(&self) -> Vec<<$t as Field>::Elem> {
                vec![self.one()]
            }
        }
    };
}

trivial_extension!(Rationals);
trivial_extension!(PrimeField);
trivial_extension!(ExtensionField);
