//! Problem files: JSON schema, first-error diagnostics with a JSON path, and
//! semantic validation against the declared field.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::bigraded::{Bidegree, Window};
use crate::dgmod::DgModule;
use crate::error::{Error, Result};
use crate::geometry::{build_x_lkd, BaseChange, BundleMorphism, SubbundleSetup};
use crate::koszul::KoszulContext;
use crate::linalg::{ExtensionField, Field, FieldSpec, Matrix, PrimeField};
use crate::symdg::{GeneratorComplex, SymDgAlgebra};

/// Names resolved by the CLI itself; files may not define modules with them.
pub const BUILTIN_MODULES: &[&str] = &["T", "S", "R", "k", "Tdual", "K1", "K2"];

/// A matrix entry: an integer, or a string in the field's own syntax
/// ("1/2" over ℚ, "[c0,c1]" over 𝔽_q).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Text(String),
}

/// Row-major; `[]` stands for any matrix with no entries.
pub type RawMatrix = Vec<Vec<Entry>>;

/// A bidegree written as the map key "(i,j)".
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Key(pub Bidegree);

impl Serialize for Key {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Key {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map(Key).map_err(de::Error::custom)
    }
}

fn two() -> i64 {
    2
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub ranks: BTreeMap<i64, usize>,
    #[serde(default)]
    pub diffs: BTreeMap<i64, RawMatrix>,
    #[serde(default = "two")]
    pub internal_degree: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetupSpec {
    #[serde(rename = "dim_E")]
    pub dim_e: usize,
    #[serde(rename = "F1")]
    pub f1: RawMatrix,
    #[serde(rename = "F2")]
    pub f2: RawMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    pub source: SetupSpec,
    pub target: SetupSpec,
    pub phi: RawMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseChangeSpec {
    pub base: FieldSpec,
    pub extension: FieldSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex: Option<ComplexSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setup: Option<SetupSpec>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlgebraName {
    #[default]
    T,
    S,
    R,
}

impl fmt::Display for AlgebraName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    #[serde(default)]
    pub algebra: AlgebraName,
    pub dims: BTreeMap<Key, usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diff: BTreeMap<Key, RawMatrix>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub actions: BTreeMap<String, BTreeMap<Key, RawMatrix>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub field: FieldSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex: Option<ComplexSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setup: Option<SetupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub morphism: Option<MorphismSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_change: Option<BaseChangeSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modules: BTreeMap<String, ModuleSpec>,
    pub window: Window,
}

fn at(path: &str, e: impl fmt::Display) -> Error {
    Error::Parse(format!("{path}: {e}"))
}

/// Reads and fully validates a problem file.
pub fn parse(path: &Path) -> Result<ProblemFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_str(&text)
}

pub fn parse_str(text: &str) -> Result<ProblemFile> {
    let mut de = serde_json::Deserializer::from_str(text);
    let p: ProblemFile = serde_path_to_error::deserialize(&mut de).map_err(|e| at(&e.path().to_string(), e.inner()))?;
    p.validate()?;
    Ok(p)
}

pub fn to_json(p: &ProblemFile) -> String {
    serde_json::to_string_pretty(p).expect("problem files serialize")
}

impl ProblemFile {
    /// Semantic checks: field, the single geometric object, matrices over
    /// the field, module axioms.
    pub fn validate(&self) -> Result<()> {
        self.field.validate().map_err(|e| at("field", e))?;
        if self.window.j_min > self.window.j_max {
            return Err(at("window", format!("j_min {} exceeds j_max {}", self.window.j_min, self.window.j_max)));
        }
        let given: Vec<&str> = [
            ("complex", self.complex.is_some()),
            ("setup", self.setup.is_some()),
            ("morphism", self.morphism.is_some()),
            ("base_change", self.base_change.is_some()),
        ]
        .into_iter()
        .filter_map(|(n, b)| b.then_some(n))
        .collect();
        if given.len() != 1 {
            return Err(at(
                ".",
                format!("expected exactly one of complex, setup, morphism, base_change; found {given:?}"),
            ));
        }
        for name in self.modules.keys() {
            if BUILTIN_MODULES.contains(&name.as_str()) {
                return Err(at(&format!("modules.{name}"), "name is reserved for a builtin module"));
            }
        }
        if self.base_change.is_some() {
            self.base_change_data()?;
        }
        crate::with_field!(&self.field, |f| self.build(&f).map(|_| ()))
    }

    /// The typed problem over a concrete field matching `self.field`.
    pub fn build<F: Field>(&self, f: &F) -> Result<Problem<F>> {
        if f.spec() != self.field {
            return Err(Error::WrongField(format!("{} vs {}", f.spec().name(), self.field.name())));
        }
        let object = if let Some(c) = &self.complex {
            Object::Complex(complex(f, c, "complex")?)
        } else if let Some(s) = &self.setup {
            Object::Setup(setup(f, s, "setup")?)
        } else if let Some(m) = &self.morphism {
            Object::Morphism(morphism(f, m)?)
        } else if let Some(b) = &self.base_change {
            Object::BaseChange(base_x(f, b)?)
        } else {
            return Err(at(".", "no complex, setup, morphism or base_change"));
        };
        let x = match &object {
            Object::Complex(x) | Object::BaseChange(x) => x.clone(),
            Object::Setup(s) => build_x_lkd(f, s)?,
            Object::Morphism(b) => build_x_lkd(f, &b.source)?,
        };
        let ctx = Arc::new(KoszulContext::new(f, x).map_err(|e| at(object.path(), e))?);
        let mut modules = BTreeMap::new();
        for (name, spec) in &self.modules {
            let m = module(f, &ctx, spec, &format!("modules.{name}"))?;
            modules.insert(name.clone(), (spec.algebra, m));
        }
        Ok(Problem {
            window: self.window,
            object,
            ctx,
            modules,
        })
    }

    /// 𝔽_p, 𝔽_q, 𝒳 and λ of the base-change block.
    pub fn base_change_data(&self) -> Result<BaseChange<PrimeField, ExtensionField>> {
        let b = self
            .base_change
            .as_ref()
            .ok_or_else(|| at("base_change", "missing"))?;
        if b.base != self.field {
            return Err(at("base_change.base", "must equal the problem field"));
        }
        let FieldSpec::Prime { p } = b.base else {
            return Err(at("base_change.base", "base change runs over a prime field Fp"));
        };
        let FieldSpec::Extension { p: q, min_poly } = &b.extension else {
            return Err(at("base_change.extension", "expected an Fq field"));
        };
        if *q != p {
            return Err(at("base_change.extension", format!("characteristic {q} differs from {p}")));
        }
        let k = PrimeField::new(p).map_err(|e| at("base_change.base", e))?;
        let ext = ExtensionField::new(p, min_poly.clone()).map_err(|e| at("base_change.extension", e))?;
        let x = base_x(&k, b)?;
        let lambda = b
            .lambda
            .as_ref()
            .map(|l| {
                l.iter()
                    .enumerate()
                    .map(|(n, e)| entry(&k, e, &format!("base_change.lambda[{n}]")))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        BaseChange::new(ext, &x, lambda).map_err(|e| at("base_change", e))
    }
}

/// The geometric object of a problem.
#[derive(Clone, Debug)]
pub enum Object<E> {
    Complex(GeneratorComplex<E>),
    Setup(SubbundleSetup<E>),
    Morphism(BundleMorphism<E>),
    /// 𝒳 over the base field.
    BaseChange(GeneratorComplex<E>),
}

impl<E> Object<E> {
    pub fn path(&self) -> &'static str {
        match self {
            Object::Complex(_) => "complex",
            Object::Setup(_) => "setup",
            Object::Morphism(_) => "morphism",
            Object::BaseChange(_) => "base_change",
        }
    }
}

/// A validated problem over `F`. Modules live over the algebras of `ctx`;
/// for a morphism that is the source setup.
pub struct Problem<F: Field> {
    pub window: Window,
    pub object: Object<F::Elem>,
    pub ctx: Arc<KoszulContext<F>>,
    pub modules: BTreeMap<String, (AlgebraName, DgModule<F>)>,
}

impl<F: Field> Problem<F> {
    pub fn algebra(&self, a: AlgebraName) -> Arc<SymDgAlgebra<F>> {
        algebra(&self.ctx, a)
    }
}

pub fn algebra<F: Field>(ctx: &KoszulContext<F>, a: AlgebraName) -> Arc<SymDgAlgebra<F>> {
    match a {
        AlgebraName::T => ctx.t.clone(),
        AlgebraName::S => ctx.s.clone(),
        AlgebraName::R => ctx.r.clone(),
    }
}

fn entry<F: Field>(f: &F, e: &Entry, path: &str) -> Result<F::Elem> {
    match e {
        Entry::Int(n) => Ok(f.from_i64(*n)),
        Entry::Text(s) => f.parse(s).map_err(|e| at(path, e)),
    }
}

/// A matrix of the given shape; `[]` is accepted whenever the shape has no
/// entries, and so is a list of empty rows when there are no columns.
fn matrix<F: Field>(f: &F, raw: &RawMatrix, rows: usize, cols: usize, path: &str) -> Result<Matrix<F::Elem>> {
    if rows == 0 || cols == 0 {
        let empty = raw.is_empty() || (raw.len() == rows && raw.iter().all(Vec::is_empty));
        if !empty {
            return Err(at(path, format!("expected an empty {rows}x{cols} matrix")));
        }
        return Ok(Matrix::zero(rows, cols));
    }
    if raw.len() != rows {
        return Err(at(path, format!("expected {rows} rows, found {}", raw.len())));
    }
    let mut dense = Vec::with_capacity(rows);
    for (r, row) in raw.iter().enumerate() {
        if row.len() != cols {
            return Err(at(&format!("{path}[{r}]"), format!("expected {cols} entries, found {}", row.len())));
        }
        dense.push(
            row.iter()
                .enumerate()
                .map(|(c, e)| entry(f, e, &format!("{path}[{r}][{c}]")))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(Matrix::from_dense_shape(f, rows, cols, &dense))
}

/// A matrix with `rows` rows whose column count is read off the data.
fn columns<F: Field>(f: &F, raw: &RawMatrix, rows: usize, path: &str) -> Result<Matrix<F::Elem>> {
    let cols = raw.first().map_or(0, Vec::len);
    matrix(f, raw, rows, cols, path)
}

fn complex<F: Field>(f: &F, c: &ComplexSpec, path: &str) -> Result<GeneratorComplex<F::Elem>> {
    let mut x = GeneratorComplex::new(c.internal_degree);
    for (&i, &r) in &c.ranks {
        x = x.with_rank(i, r);
    }
    for (&i, raw) in &c.diffs {
        let m = matrix(f, raw, x.rank(i + 1), x.rank(i), &format!("{path}.diffs.{i}"))?;
        if !m.is_zero() {
            x = x.with_diff(i, m);
        }
    }
    x.validate_x(f).map_err(|e| at(path, e))?;
    Ok(x)
}

fn setup<F: Field>(f: &F, s: &SetupSpec, path: &str) -> Result<SubbundleSetup<F::Elem>> {
    let f1 = columns(f, &s.f1, s.dim_e, &format!("{path}.F1"))?;
    let f2 = columns(f, &s.f2, s.dim_e, &format!("{path}.F2"))?;
    SubbundleSetup::new(f, s.dim_e, f1, f2).map_err(|e| at(path, e))
}

fn morphism<F: Field>(f: &F, m: &MorphismSpec) -> Result<BundleMorphism<F::Elem>> {
    let source = setup(f, &m.source, "morphism.source")?;
    let target = setup(f, &m.target, "morphism.target")?;
    let phi = matrix(f, &m.phi, target.dim_e, source.dim_e, "morphism.phi")?;
    let b = BundleMorphism { source, target, phi };
    b.validate(f).map_err(|e| at("morphism", e))?;
    Ok(b)
}

fn base_x<F: Field>(f: &F, b: &BaseChangeSpec) -> Result<GeneratorComplex<F::Elem>> {
    match (&b.complex, &b.setup) {
        (Some(c), None) => complex(f, c, "base_change.complex"),
        (None, Some(s)) => build_x_lkd(f, &setup(f, s, "base_change.setup")?).map_err(|e| at("base_change.setup", e)),
        _ => Err(at("base_change", "expected exactly one of complex, setup")),
    }
}

/// A finite module: both sides bounded, stored on the hull of its support.
fn module<F: Field>(f: &F, ctx: &KoszulContext<F>, spec: &ModuleSpec, path: &str) -> Result<DgModule<F>> {
    let a = algebra(ctx, spec.algebra);
    let js: Vec<i64> = spec.dims.iter().filter(|(_, d)| **d > 0).map(|(k, _)| k.0.j).collect();
    let window = Window::of(
        js.iter().copied().min().unwrap_or(0),
        js.iter().copied().max().unwrap_or(0),
    );
    let mut m = DgModule::empty(a.clone(), window);
    m.bounded_above = true;
    m.bounded_below = true;
    for (k, d) in &spec.dims {
        m.complex.set_dim(k.0, *d);
    }
    for (k, raw) in &spec.diff {
        let b = k.0;
        let d = matrix(f, raw, m.dim(b.next()), m.dim(b), &format!("{path}.diff.{b}"))?;
        m.complex.set_d(b, d);
    }
    for (label, blocks) in &spec.actions {
        let g = a
            .generator_by_label(label)
            .ok_or_else(|| at(&format!("{path}.actions.{label}"), format!("no generator with this label in {}", spec.algebra)))?;
        for (k, raw) in blocks {
            let b = k.0;
            let t = b + a.generators()[g].degree;
            let p = format!("{path}.actions.{label}.{b}");
            if !m.window.contains(t.j) {
                return Err(at(&p, format!("target bidegree {t} lies outside the support")));
            }
            let mat = matrix(f, raw, m.dim(t), m.dim(b), &p)?;
            m.set_action(g, b, mat);
        }
    }
    if let Some(v) = m.validate().first() {
        let e = if v.invariant == "d^2 = 0" {
            Error::NotSquareZero(v.bidegree)
        } else {
            Error::InvalidModule(v.to_string())
        };
        return Err(at(path, e));
    }
    Ok(m)
}

fn emit_entry<F: Field>(f: &F, a: &F::Elem) -> Entry {
    let s = f.format(a);
    match s.parse() {
        Ok(n) => Entry::Int(n),
        Err(_) => Entry::Text(s),
    }
}

fn emit_matrix<F: Field>(f: &F, m: &Matrix<F::Elem>) -> RawMatrix {
    m.to_dense(f)
        .iter()
        .map(|r| r.iter().map(|a| emit_entry(f, a)).collect())
        .collect()
}

/// The module in problem-file form, zero blocks omitted.
pub fn emit_module<F: Field>(m: &DgModule<F>, algebra: AlgebraName) -> ModuleSpec {
    let f = m.field();
    let dims = m.complex.dims.iter().filter(|(_, d)| **d > 0).map(|(b, d)| (Key(*b), *d)).collect();
    let diff = m
        .complex
        .diff
        .iter()
        .filter(|(_, d)| !d.is_zero())
        .map(|(b, d)| (Key(*b), emit_matrix(f, d)))
        .collect();
    let mut actions = BTreeMap::new();
    for (g, blocks) in m.actions.iter().enumerate() {
        let nonzero: BTreeMap<Key, RawMatrix> = blocks
            .iter()
            .filter(|(_, a)| !a.is_zero())
            .map(|(b, a)| (Key(*b), emit_matrix(f, a)))
            .collect();
        if !nonzero.is_empty() {
            actions.insert(m.algebra.generators()[g].label.clone(), nonzero);
        }
    }
    ModuleSpec {
        algebra,
        dims,
        diff,
        actions,
    }
}
