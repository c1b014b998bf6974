//! Verification suites. Each returns reports `{check, window, pass,
//! witnesses}`; randomized suites draw from a ChaCha stream seeded by the
//! caller, so equal seeds give equal reports.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bigraded::{cohomology, restrict_table, shift_twist_table, table_entries, Bidegree, Table, Window};
use crate::cli::corpus::{self, id_complex, random_finite, truncated_free};
use crate::dgmod::{
    check_module_map, double_dual_map, dualize, free_module, module_quasi_iso, shift, twist, unit_module,
    window_generation_check, DgModule,
};
use crate::error::{Error, Result};
use crate::geometry::{
    derived_intersection_cohomology, exchange_tables, honest_intersection_table, tor_oracle, BaseChange,
    BundleMorphism, SubbundleSetup,
};
use crate::koszul::{counit, kappa, kappa_inv, koszul_k1, koszul_k2, unit, KoszulContext};
use crate::linalg::{rank, ExtensionField, Field, Matrix, PrimeField, Rationals};
use crate::symdg::{build_algebra, GeneratorComplex};

pub const SUITES: &[&str] = &[
    "koszul-acyclicity",
    "char-p",
    "unit-counit",
    "duality",
    "degree-formula",
    "intersections",
    "exchange",
    "fg",
    "morphisms",
    "base-change",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub window: Window,
    pub pass: bool,
    pub witnesses: Vec<Value>,
}

impl Report {
    pub fn new(check: impl Into<String>, window: Window) -> Self {
        Report {
            check: check.into(),
            window,
            pass: true,
            witnesses: Vec::new(),
        }
    }

    /// Records a witness and folds its verdict into the report.
    pub fn add(&mut self, ok: bool, mut witness: Value) {
        if let Value::Object(m) = &mut witness {
            m.insert("pass".into(), Value::Bool(ok));
        }
        self.pass &= ok;
        self.witnesses.push(witness);
    }
}

pub fn table_json(t: &Table) -> Value {
    json!(table_entries(t))
}

fn at_origin() -> Table {
    [(Bidegree::ZERO, 1)].into_iter().collect()
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs a suite by name, or every suite for "all".
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<Report>> {
    if name == "all" {
        let mut out = Vec::new();
        for s in SUITES {
            out.extend(run_suite(s, seed)?);
        }
        return Ok(out);
    }
    match name {
        "koszul-acyclicity" => koszul_acyclicity(seed),
        "char-p" => char_p(),
        "unit-counit" => unit_counit(seed),
        "duality" => duality(seed),
        "degree-formula" => degree_formula(),
        "intersections" => intersections(seed),
        "exchange" => exchange(),
        "fg" => fg(seed),
        "morphisms" => morphisms(),
        "base-change" => base_change(),
        _ => Err(Error::Parse(format!(
            "unknown suite '{name}'; expected one of {} or all",
            SUITES.join(", ")
        ))),
    }
}

pub fn ranks_json<E>(x: &GeneratorComplex<E>) -> Value {
    json!(x.ranks.iter().filter(|(_, r)| **r > 0).map(|(i, r)| (i.to_string(), *r)).collect::<BTreeMap<_, _>>())
}

/// 𝒦^(1) and 𝒦^(2) have cohomology k at (0,0), and their augmentations
/// are quasi-isomorphic module maps.
pub fn acyclicity_witness<F: Field>(f: &F, x: &GeneratorComplex<F::Elem>, w: &Window) -> Result<(bool, Value)> {
    let ctx = KoszulContext::new(f, x.clone())?;
    let (k1, aug) = koszul_k1(&ctx, w)?;
    let (k2, coaug) = koszul_k2(&ctx, w)?;
    let (t1, t2) = (k1.table(w)?, k2.table(w)?);
    let ks = unit_module(ctx.s.clone(), Bidegree::ZERO);
    let kt = unit_module(ctx.t.clone(), Bidegree::ZERO);
    let maps = check_module_map(&aug, &k1, &ks, w).is_empty()
        && check_module_map(&coaug, &kt, &k2, w).is_empty()
        && module_quasi_iso(&aug, &k1, &ks, w)?
        && module_quasi_iso(&coaug, &kt, &k2, w)?;
    let ok = t1 == at_origin() && t2 == at_origin() && maps;
    Ok((
        ok,
        json!({"field": f.spec().name(), "ranks": ranks_json(x), "K1": table_json(&t1), "K2": table_json(&t2), "augmentations": maps}),
    ))
}

pub fn koszul_acyclicity(seed: u64) -> Result<Vec<Report>> {
    let w = Window::of(-12, 0);
    let mut r = Report::new("koszul-acyclicity", w);
    fn each<F: Field>(f: &F, rng: &mut ChaCha8Rng, w: &Window, r: &mut Report) -> Result<()> {
        for _ in 0..20 {
            let x = corpus::random_x(f, rng);
            let (ok, wit) = acyclicity_witness(f, &x, w)?;
            r.add(ok, wit);
        }
        Ok(())
    }
    each(&Rationals, &mut rng_for(seed, 1), &w, &mut r)?;
    each(&PrimeField::new(2)?, &mut rng_for(seed, 2), &w, &mut r)?;
    each(&PrimeField::new(7)?, &mut rng_for(seed, 3), &w, &mut r)?;
    Ok(vec![r])
}

/// H(𝒯) for 𝒳 = (k -> k) in degrees -2, -1: `d(x^m) = m x^{m-1} y`, so in
/// characteristic p both `x^m` and `x^{m-1} y` survive exactly when p | m.
pub fn char_p_expected(p: u64, w: &Window) -> Table {
    let mut t = Table::new();
    for j in w.degrees().filter(|j| *j >= 0 && j % 2 == 0) {
        let m = j / 2;
        if m == 0 {
            t.insert(Bidegree::ZERO, 1);
        } else if p > 0 && (m as u64).is_multiple_of(p) {
            t.insert(Bidegree::new(-2 * m, j), 1);
            t.insert(Bidegree::new(-2 * m + 1, j), 1);
        }
    }
    t
}

pub fn char_p_table<F: Field>(f: &F, w: &Window) -> Result<Table> {
    let x = GeneratorComplex::new(2)
        .with_rank(-2, 1)
        .with_rank(-1, 1)
        .with_diff(-2, Matrix::from_i64(f, &[vec![1]]));
    let t = build_algebra(f, &x, 0, "x")?;
    Ok(cohomology(f, &t.as_complex(w), w)?.dims)
}

pub fn char_p() -> Result<Vec<Report>> {
    let w = Window::of(0, 8);
    let mut r = Report::new("char-p", w);
    for (name, got, p) in [
        ("Fp(3)", char_p_table(&PrimeField::new(3)?, &w)?, 3),
        ("Q", char_p_table(&Rationals, &w)?, 0),
    ] {
        let want = char_p_expected(p, &w);
        r.add(got == want, json!({"field": name, "table": table_json(&got), "expected": table_json(&want)}));
    }
    Ok(vec![r])
}

/// The unit `M -> ℬ𝒜(M)` is a quasi-isomorphism of dg-modules.
pub fn unit_witness<F: Field>(ctx: &KoszulContext<F>, name: &str, m: &DgModule<F>, w: &Window) -> Result<(bool, Value)> {
    let (bam, u) = unit(ctx, m, w)?;
    let ok = bam.validate().is_empty() && check_module_map(&u, m, &bam, w).is_empty() && module_quasi_iso(&u, m, &bam, w)?;
    Ok((ok, json!({"field": ctx.field().spec().name(), "map": "unit", "module": name, "table": table_json(&m.table(w)?)})))
}

/// The counit `𝒜ℬ(N) -> N` is a quasi-isomorphism of dg-modules.
pub fn counit_witness<F: Field>(ctx: &KoszulContext<F>, name: &str, n: &DgModule<F>, w: &Window) -> Result<(bool, Value)> {
    let (abn, e) = counit(ctx, n, w)?;
    let ok = abn.validate().is_empty() && check_module_map(&e, &abn, n, w).is_empty() && module_quasi_iso(&e, &abn, n, w)?;
    Ok((ok, json!({"field": ctx.field().spec().name(), "map": "counit", "module": name, "table": table_json(&n.table(w)?)})))
}

pub fn unit_counit(seed: u64) -> Result<Vec<Report>> {
    let w = Window::of(-12, 0);
    let mut r = Report::new("unit-counit", w);
    fn each<F: Field>(f: &F, rng: &mut ChaCha8Rng, w: &Window, r: &mut Report) -> Result<()> {
        let ctx = KoszulContext::new(f, id_complex(f))?;
        for (name, m) in corpus::mod_minus(&ctx, rng)? {
            let (ok, wit) = unit_witness(&ctx, &name, &m, w)?;
            r.add(ok, wit);
        }
        for (name, n) in corpus::mod_plus(&ctx, rng)? {
            let (ok, wit) = counit_witness(&ctx, &name, &n, w)?;
            r.add(ok, wit);
        }
        Ok(())
    }
    each(&Rationals, &mut rng_for(seed, 4), &w, &mut r)?;
    each(&PrimeField::new(5)?, &mut rng_for(seed, 5), &w, &mut r)?;
    Ok(vec![r])
}

/// The canonical map `M -> DD(M)` is an isomorphism of dg-modules.
pub fn double_dual_is_iso<F: Field>(m: &DgModule<F>) -> bool {
    let dd = dualize(&dualize(m));
    let map = double_dual_map(m);
    let w = m.window;
    dd.complex.dims == m.complex.dims
        && check_module_map(&map, m, &dd, &w).is_empty()
        && m.complex
            .dims
            .iter()
            .all(|(b, d)| rank(m.field(), &map.block(*b, *d, *d)) == *d)
}

pub fn duality(seed: u64) -> Result<Vec<Report>> {
    let mut rng = rng_for(seed, 6);
    let q = Rationals;
    let ctx = KoszulContext::new(&q, id_complex(&q))?;
    let w = Window::of(-2, 6);
    let mut r = Report::new("duality", w);
    for k in 0..10 {
        let m = if k % 3 == 2 {
            truncated_free(ctx.t.clone(), &[Bidegree::ZERO, Bidegree::new(k as i64 % 2, 2)], 6)?
        } else {
            random_finite(ctx.t.clone(), &mut rng, &[0, 2, 4])?
        };
        let ok = double_dual_is_iso(&m);
        r.add(ok, json!({"module": k, "table": table_json(&m.table(&m.window)?)}));
    }
    Ok(vec![r])
}

/// κ(M[n]⟨m⟩) against κ(M) shifted by [-n+m]⟨-m⟩ for (n, m) ∈ [-2, 2]²;
/// `wide` must contain `w` widened by 2 on each side.
pub fn degree_formula_witness<F: Field>(
    ctx: &KoszulContext<F>,
    name: &str,
    m: &DgModule<F>,
    w: &Window,
    wide: &Window,
) -> Result<(bool, Value)> {
    let base = kappa(ctx, m, wide)?.table(wide)?;
    let mut bad = Vec::new();
    for n in -2..=2 {
        for mm in -2..=2 {
            let got = kappa(ctx, &twist(&shift(m, n), mm), w)?.table(w)?;
            let want = restrict_table(&shift_twist_table(&base, -n + mm, -mm), w);
            if got != want {
                bad.push(json!([n, mm]));
            }
        }
    }
    Ok((bad.is_empty(), json!({"module": name, "pairs": 25, "failures": bad})))
}

pub fn degree_formula() -> Result<Vec<Report>> {
    let q = Rationals;
    let ctx = KoszulContext::new(&q, id_complex(&q))?;
    let w = Window::of(-8, 0);
    let wide = Window::of(-10, 2);
    let mut r = Report::new("degree-formula", w);
    let modules: Vec<(&str, DgModule<Rationals>)> = vec![
        ("k", unit_module(ctx.t.clone(), Bidegree::ZERO)),
        ("T(0,0)+T(1,2)", free_module(ctx.t.clone(), &[Bidegree::ZERO, Bidegree::new(1, 2)], &Window::of(0, 14))?),
        ("T/T_{>4}", truncated_free(ctx.t.clone(), &[Bidegree::ZERO], 4)?),
    ];
    for (name, m) in &modules {
        let (ok, wit) = degree_formula_witness(&ctx, name, m, &w, &wide)?;
        r.add(ok, wit);
    }
    Ok(vec![r])
}

pub fn canonical_setups<F: Field>(f: &F) -> Vec<(&'static str, SubbundleSetup<F::Elem>)> {
    let m = |rows: &[Vec<i64>], d: usize| {
        if rows.is_empty() {
            Matrix::zero(d, 0)
        } else {
            Matrix::from_i64(f, rows)
        }
    };
    let e1 = vec![vec![1], vec![0]];
    let e2 = vec![vec![0], vec![1]];
    let mk = |d, a: &[Vec<i64>], b: &[Vec<i64>]| SubbundleSetup::new(f, d, m(a, d), m(b, d)).expect("valid");
    vec![
        ("transversal", mk(2, &e1, &e2)),
        ("origin self-intersection", mk(1, &[], &[])),
        ("coincident lines", mk(2, &e1, &e1)),
        ("F1 = E, F2 = 0", mk(2, &[vec![1, 0], vec![0, 1]], &[])),
    ]
}

pub fn setup_json<F: Field>(f: &F, s: &SubbundleSetup<F::Elem>) -> Value {
    let fmt = |m: &Matrix<F::Elem>| -> Vec<Vec<String>> {
        m.to_dense(f).iter().map(|r| r.iter().map(|a| f.format(a)).collect()).collect()
    };
    json!({"dim_E": s.dim_e, "F1": fmt(&s.f1), "F2": fmt(&s.f2)})
}

/// Derived intersection against the Tor oracle, plus the honest
/// intersection in degree zero.
pub fn intersection_witness<F: Field>(f: &F, s: &SubbundleSetup<F::Elem>, w: &Window) -> Result<(bool, Value)> {
    let direct = derived_intersection_cohomology(f, s, w)?.dims;
    let oracle = tor_oracle(f, s, w)?;
    let h0: Table = direct.iter().filter(|(b, _)| b.i == 0).map(|(b, d)| (*b, *d)).collect();
    let honest = honest_intersection_table(f, s, w)?;
    Ok((
        direct == oracle && h0 == honest,
        json!({"setup": setup_json(f, s), "derived": table_json(&direct), "tor": table_json(&oracle), "H0_is_honest": h0 == honest}),
    ))
}

pub fn intersections(seed: u64) -> Result<Vec<Report>> {
    let q = Rationals;
    let w = Window::of(-10, 10);
    let mut r = Report::new("intersections", w);
    for (name, s) in canonical_setups(&q) {
        let (ok, mut wit) = intersection_witness(&q, &s, &w)?;
        wit["name"] = json!(name);
        r.add(ok, wit);
    }
    let mut rng = rng_for(seed, 7);
    for _ in 0..20 {
        let s = corpus::random_setup(&q, &mut rng);
        let (ok, wit) = intersection_witness(&q, &s, &w)?;
        r.add(ok, wit);
    }
    Ok(vec![r])
}

pub fn exchange() -> Result<Vec<Report>> {
    let q = Rationals;
    let w = Window::of(-10, 0);
    let wt = w.negated();
    let origin = &canonical_setups(&q)[1].1;
    let ctx = crate::geometry::context(&q, origin)?;
    let mut r = Report::new("exchange", w);

    let free_t = free_module(ctx.t.clone(), &[Bidegree::ZERO], &wt)?;
    let kt = unit_module(ctx.t.clone(), Bidegree::ZERO);
    let k_free = kappa(&ctx, &free_t, &w)?;
    let k_k = kappa(&ctx, &kt, &w)?;
    let h_r = cohomology(&q, &ctx.r.as_complex(&w), &w)?.dims;
    let poly: Table = (0..=5).map(|m| (Bidegree::new(0, -2 * m), 1)).collect();
    let t1 = k_free.table(&w)?;
    r.add(t1 == at_origin(), json!({"check": "κ(T)", "table": table_json(&t1)}));
    let t2 = k_k.table(&w)?;
    r.add(t2 == h_r && h_r == poly, json!({"check": "κ(k) = H(R)", "table": table_json(&t2), "H(R)": table_json(&h_r)}));

    let back_free = kappa_inv(&ctx, &k_free, &wt)?.table(&wt)?;
    let back_k = kappa_inv(&ctx, &k_k, &wt)?.table(&wt)?;
    let h_t = free_t.table(&wt)?;
    r.add(back_free == h_t, json!({"check": "κ⁻¹κ(T)", "table": table_json(&back_free), "H(T)": table_json(&h_t)}));
    r.add(back_k == at_origin(), json!({"check": "κ⁻¹κ(k)", "table": table_json(&back_k)}));
    let free_r = free_module(ctx.r.clone(), &[Bidegree::ZERO], &w)?;
    let t = kappa_inv(&ctx, &free_r, &wt)?.table(&wt)?;
    r.add(t == at_origin(), json!({"check": "κ⁻¹(R)", "table": table_json(&t)}));
    let kr = unit_module(ctx.r.clone(), Bidegree::ZERO);
    let t = kappa_inv(&ctx, &kr, &wt)?.table(&wt)?;
    r.add(t == h_t, json!({"check": "κ⁻¹(k)", "table": table_json(&t)}));

    for (name, s) in canonical_setups(&q) {
        let (left, right) = exchange_tables(&q, &s, &w)?;
        r.add(left == right, json!({"check": "κ(k) vs dual setup", "setup": name, "table": table_json(&left), "dual": table_json(&right)}));
    }
    Ok(vec![r])
}

/// Occupied internal degrees of `m` nearest its top, at most two.
fn top_degrees<F: Field>(m: &DgModule<F>) -> Vec<i64> {
    let mut js: Vec<i64> = m.complex.dims.iter().filter(|(_, d)| **d > 0).map(|(b, _)| b.j).collect();
    js.sort_unstable_by(|a, b| b.cmp(a));
    js.dedup();
    js.truncate(2);
    js
}

/// Window generation for κ(M): generators in the two occupied internal
/// degrees nearest the top must reach the next 12 units.
pub fn fg_witness<F: Field>(ctx: &KoszulContext<F>, name: &str, m: &DgModule<F>) -> Result<(bool, Value)> {
    let probe = Window::of(-6, 6);
    let js = top_degrees(&kappa(ctx, m, &probe)?);
    let Some(&top) = js.first() else {
        return Ok((true, json!({"module": name, "note": "κ(M) vanishes near the top"})));
    };
    let low = *js.last().unwrap_or(&top);
    let gen_window = Window::of(low, top);
    let test_window = Window::of(low - 12, top);
    let km = kappa(ctx, m, &test_window)?;
    let ok = window_generation_check(&km, &gen_window, &test_window)?;
    Ok((ok, json!({"module": name, "gen_window": gen_window, "test_window": test_window})))
}

pub fn fg_corpus<F: Field>(ctx: &KoszulContext<F>, rng: &mut ChaCha8Rng) -> Result<Vec<(String, DgModule<F>)>> {
    let t = ctx.t.clone();
    let wide = Window::of(0, 24);
    let free = free_module(t.clone(), &[Bidegree::ZERO], &wide)?;
    let two = free_module(t.clone(), &[Bidegree::ZERO, Bidegree::new(1, 2)], &wide)?;
    let k = unit_module(t.clone(), Bidegree::ZERO);
    Ok(vec![
        ("k".into(), k.clone()),
        ("k[1]<2>".into(), twist(&shift(&k, 1), 2)),
        ("T".into(), free.clone()),
        ("T(0,0)+T(1,2)".into(), two),
        ("random finite".into(), random_finite(t.clone(), rng, &[0, 2])?),
        ("cone(id T)".into(), crate::dgmod::cone(&crate::dgmod::identity_map(&free), &free, &free)?),
    ])
}

pub fn fg(seed: u64) -> Result<Vec<Report>> {
    let q = Rationals;
    let mut rng = rng_for(seed, 8);
    let mut r = Report::new("fg", Window::of(-14, 0));
    for x in [GeneratorComplex::new(2).with_rank(0, 1), id_complex(&q)] {
        let ctx = KoszulContext::new(&q, x.clone())?;
        for (name, m) in fg_corpus(&ctx, &mut rng)? {
            let (ok, mut wit) = fg_witness(&ctx, &name, &m)?;
            wit["ranks"] = ranks_json(&x);
            r.add(ok, wit);
        }
    }
    Ok(vec![r])
}

/// E = k², F_i = ⟨e1⟩ inside F_i' = E, φ = id.
pub fn line_into_plane<F: Field>(f: &F) -> Result<BundleMorphism<F::Elem>> {
    let e1 = Matrix::from_i64(f, &[vec![1], vec![0]]);
    let all = Matrix::identity(f, 2);
    let b = BundleMorphism {
        source: SubbundleSetup::new(f, 2, e1.clone(), e1)?,
        target: SubbundleSetup::new(f, 2, all.clone(), all)?,
        phi: Matrix::identity(f, 2),
    };
    b.validate(f)?;
    Ok(b)
}

pub fn morphism_report<F: Field>(f: &F, b: &BundleMorphism<F::Elem>, w: &Window) -> Result<Report> {
    let mut r = Report::new("morphisms", *w);
    for c in crate::geometry::check_morphism_compat(f, b, w)? {
        r.add(
            c.agrees(),
            json!({"identity": c.name, "left": table_json(&c.left), "right": table_json(&c.right)}),
        );
    }
    r.witnesses.push(json!({"note": "properness of the induced map of intersections is automatic over a point"}));
    Ok(r)
}

pub fn morphisms() -> Result<Vec<Report>> {
    let q = Rationals;
    Ok(vec![morphism_report(&q, &line_into_plane(&q)?, &Window::of(-10, 0))?])
}

/// Both corpus pairs `(free, trivial)` and `(trivial, free)` of Y- and
/// X-side modules.
pub fn base_change_report<K: Field, E: crate::linalg::FieldExtension<K>>(
    bc: &BaseChange<K, E>,
    w: &Window,
) -> Result<Report> {
    let mut r = Report::new("base-change", *w);
    let inner = w.negated();
    let free_y = free_module(bc.ctx_y.t.clone(), &[Bidegree::ZERO], &inner)?;
    let free_x = free_module(bc.ctx_x.t.clone(), &[Bidegree::ZERO], &inner)?;
    let k_y = unit_module(bc.ctx_y.t.clone(), Bidegree::ZERO);
    let k_x = unit_module(bc.ctx_x.t.clone(), Bidegree::ZERO);
    for (label, m, mx) in [("M = T_Y, M' = k'", &free_y, &k_x), ("M = k, M' = T_X", &k_y, &free_x)] {
        let rep = bc.check(m, mx, w)?;
        for c in &rep.comparisons {
            r.add(
                c.agrees(),
                json!({"modules": label, "identity": c.name, "left": table_json(&c.left), "right": table_json(&c.right)}),
            );
        }
        r.add(rep.lambda_map_iso, json!({"modules": label, "identity": "λ-pairing is an isomorphism"}));
    }
    r.witnesses.push(json!({"note": "a finite field extension is proper, flat and of finite Tor-dimension"}));
    Ok(r)
}

pub fn base_change() -> Result<Vec<Report>> {
    let f5 = PrimeField::new(5)?;
    let f25 = ExtensionField::new(5, vec![3, 0, 1])?;
    let e1 = Matrix::from_i64(&f5, &[vec![1], vec![0]]);
    let s = SubbundleSetup::new(&f5, 2, e1.clone(), e1)?;
    let x = crate::geometry::build_x_lkd(&f5, &s)?;
    let bc = BaseChange::<PrimeField, _>::new(f25, &x, None)?;
    Ok(vec![base_change_report(&bc, &Window::of(-10, 0))?])
}
