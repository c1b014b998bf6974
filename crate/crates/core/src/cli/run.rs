//! Command dispatch. Every command returns an [`Outcome`] holding the JSON
//! body, its plain-text and CSV renderings, and the verdict.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::bigraded::{table_to_csv, table_to_text, Bidegree, Table, Window};
use crate::cli::problem::{emit_module, AlgebraName, Object, Problem, ProblemFile, BUILTIN_MODULES};
use crate::cli::verify::{
    self, acyclicity_witness, base_change_report, counit_witness, degree_formula_witness, double_dual_is_iso,
    fg_witness, intersection_witness, morphism_report, ranks_json, setup_json, table_json, unit_witness, Report,
};
use crate::dgmod::{free_module, module_quasi_iso, semifree_resolution, unit_module, DgModule};
use crate::error::{Error, Result};
use crate::geometry::{derived_intersection_cohomology, exchange_tables, honest_intersection_table, tor_oracle};
use crate::koszul::{kappa, kappa_inv, koszul_k1, koszul_k2, KoszulContext};
use crate::linalg::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Check,
    Cohomology,
    Dual,
    Resolve,
    Intersect,
    Verify,
    Hilbert,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Cohomology => "cohomology",
            Command::Dual => "dual",
            Command::Resolve => "resolve",
            Command::Intersect => "intersect",
            Command::Verify => "verify",
            Command::Hilbert => "hilbert",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Format::Table),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Parse(format!("unknown format '{s}'; expected table, json or csv"))),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub module: Option<String>,
    /// Overrides the problem window.
    pub window: Option<Window>,
    pub suite: Option<String>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    /// Machine-readable descriptions of failed checks.
    pub failures: Vec<Value>,
    pub body: Value,
    pub text: String,
    pub csv: String,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.body).expect("json values serialize") + "\n",
            Format::Table => self.text.clone(),
            Format::Csv => self.csv.clone(),
        }
    }

    /// A body carrying named tables and named boolean checks; the verdict is
    /// the conjunction of the checks.
    fn tables(mut body: Value, header: String, tables: Vec<(&str, Table)>, checks: Vec<(&str, bool)>) -> Self {
        let mut text = header;
        for (name, t) in &tables {
            body[*name] = table_json(t);
            text.push_str(&format!("# {name}\n{:>5} {:>5} {:>6}\n{}", "i", "j", "dim", table_to_text(t)));
        }
        let csv = match tables.as_slice() {
            [(_, t)] => table_to_csv(t),
            _ => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["table", "i", "j", "dim"]).expect("in-memory write");
                for (name, t) in &tables {
                    for (b, d) in t.iter().filter(|(_, d)| **d > 0) {
                        w.serialize((name, b.i, b.j, d)).expect("in-memory write");
                    }
                }
                String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
            }
        };
        let mut failures = Vec::new();
        if !checks.is_empty() {
            let mut c = serde_json::Map::new();
            for (name, ok) in &checks {
                c.insert(name.to_string(), Value::Bool(*ok));
                text.push_str(&format!("{} {name}\n", if *ok { "PASS" } else { "FAIL" }));
                if !ok {
                    failures.push(json!({"check": name}));
                }
            }
            body["checks"] = Value::Object(c);
        }
        let pass = failures.is_empty();
        body["pass"] = Value::Bool(pass);
        Outcome {
            pass,
            failures,
            body,
            text,
            csv,
        }
    }

    fn reports(reports: Vec<Report>) -> Self {
        let mut text = String::new();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["check", "window", "pass", "witnesses"]).expect("in-memory write");
        let mut failures = Vec::new();
        for r in &reports {
            let verdict = if r.pass { "PASS" } else { "FAIL" };
            text.push_str(&format!("{verdict} {} on {} ({} witnesses)\n", r.check, r.window, r.witnesses.len()));
            w.serialize((&r.check, r.window.to_string(), r.pass, r.witnesses.len()))
                .expect("in-memory write");
            if !r.pass {
                let bad: Vec<&Value> = r.witnesses.iter().filter(|v| v["pass"] == Value::Bool(false)).collect();
                failures.push(json!({"check": r.check, "window": r.window, "witnesses": bad}));
            }
        }
        Outcome {
            pass: failures.is_empty(),
            failures,
            body: serde_json::to_value(&reports).expect("reports serialize"),
            text,
            csv: String::from_utf8(w.into_inner().expect("flush")).expect("utf8"),
        }
    }
}

/// Runs a command. Only `verify` works without a problem file; it then runs
/// the builtin suites.
pub fn run(cmd: Command, problem: Option<&ProblemFile>, flags: &Flags) -> Result<Outcome> {
    let Some(pf) = problem else {
        if cmd == Command::Verify {
            return Ok(Outcome::reports(verify::run_suite(suite_name(flags), flags.seed)?));
        }
        return Err(Error::Parse(format!("{} needs --input", cmd.name())));
    };
    crate::with_field!(&pf.field, |f| {
        let p = pf.build(&f)?;
        run_typed(&f, cmd, pf, &p, flags)
    })
}

fn suite_name(flags: &Flags) -> &str {
    flags.suite.as_deref().unwrap_or("all")
}

fn run_typed<F: Field>(f: &F, cmd: Command, pf: &ProblemFile, p: &Problem<F>, flags: &Flags) -> Result<Outcome> {
    let w = flags.window.unwrap_or(p.window);
    let header = |extra: &str| format!("{} over {} on {w}{extra}\n", cmd.name(), pf.field.name());
    let body = json!({"command": cmd.name(), "field": pf.field.name(), "window": w});
    match cmd {
        Command::Check => {
            let mut body = body;
            body["object"] = json!(p.object.path());
            body["X"] = ranks_json(&p.ctx.x);
            let mut text = header("");
            text.push_str(&format!("object: {}\n", p.object.path()));
            let mut mods = BTreeMap::new();
            for (name, (a, m)) in &p.modules {
                let total: usize = m.complex.dims.values().sum();
                text.push_str(&format!("module {name} over {a}: total dimension {total}, window {}\n", m.window));
                mods.insert(name.clone(), json!({"algebra": a.to_string(), "window": m.window, "dims": table_json(&m.complex.dims)}));
            }
            body["modules"] = json!(mods);
            Ok(Outcome::tables(body, text, vec![], vec![("valid", true)]))
        }
        Command::Cohomology => {
            let name = module_flag(flags)?;
            let (a, m) = lookup(p, name, &w)?;
            let mut body = body;
            body["module"] = json!(name);
            body["algebra"] = json!(a.to_string());
            Ok(Outcome::tables(body, header(&format!(", module {name}")), vec![("table", m.table(&w)?)], vec![]))
        }
        Command::Hilbert => {
            let (name, dims) = match &flags.module {
                Some(name) => {
                    let (_, m) = lookup(p, name, &w)?;
                    m.require(w.j_min, w.j_max, "module")?;
                    (name.clone(), m.complex.dims.clone())
                }
                None => ("T".to_string(), p.ctx.t.as_complex(&w).dims),
            };
            let dims: Table = dims.into_iter().filter(|(b, d)| *d > 0 && w.contains(b.j)).collect();
            let mut body = body;
            body["module"] = json!(name);
            Ok(Outcome::tables(body, header(&format!(", chain-level dimensions of {name}")), vec![("dims", dims)], vec![]))
        }
        Command::Dual => {
            let name = module_flag(flags)?;
            let (a, m) = lookup(p, name, &w)?;
            let (functor, out, oa) = match a {
                AlgebraName::T => ("κ", kappa(&p.ctx, &m, &w)?, AlgebraName::R),
                AlgebraName::R => ("κ⁻¹", kappa_inv(&p.ctx, &m, &w)?, AlgebraName::T),
                AlgebraName::S => {
                    return Err(Error::InvalidModule(format!("dual takes a module over T or R; {name} is over S")))
                }
            };
            let table = out.table(&w)?;
            let mut body = body;
            body["module"] = json!(name);
            body["functor"] = json!(functor);
            body["output"] = serde_json::to_value(emit_module(&out.restrict_window(&w)?, oa)).expect("modules serialize");
            Ok(Outcome::tables(body, header(&format!(", {functor}({name}) over {oa}")), vec![("table", table)], vec![]))
        }
        Command::Resolve => {
            let name = module_flag(flags)?;
            let (_, m) = lookup(p, name, &w)?;
            let (res, map) = semifree_resolution(&m, &w)?;
            let quasi = module_quasi_iso(&map, &res, &m, &w)?;
            let mut gens = Table::new();
            if let Some(pres) = &res.presentation {
                for g in &pres.gens {
                    *gens.entry(*g).or_insert(0) += 1;
                }
            }
            let mut body = body;
            body["module"] = json!(name);
            body["generator_count"] = json!(gens.values().sum::<usize>());
            let tables = vec![("generators", gens), ("H(P)", res.table(&w)?), ("H(M)", m.table(&w)?)];
            Ok(Outcome::tables(body, header(&format!(", semi-free resolution P -> {name}")), tables, vec![("P -> M is a quasi-isomorphism", quasi)]))
        }
        Command::Intersect => {
            let Object::Setup(s) = &p.object else {
                return Err(Error::InvalidSetup("intersect needs a setup".into()));
            };
            let t_side = derived_intersection_cohomology(f, s, &w)?.dims;
            let tor = tor_oracle(f, s, &w)?;
            let honest = honest_intersection_table(f, s, &w)?;
            let h0: Table = t_side.iter().filter(|(b, _)| b.i == 0).map(|(b, d)| (*b, *d)).collect();
            let (kk, r_side) = exchange_tables(f, s, &w.negated())?;
            let mut body = body;
            body["setup"] = setup_json(f, s);
            body["R-side window"] = json!(w.negated());
            let checks = vec![
                ("T-side = Tor oracle", t_side == tor),
                ("H^0 = honest intersection", h0 == honest),
                ("κ(k) = R-side", kk == r_side),
            ];
            let tables = vec![("T-side", t_side), ("Tor", tor), ("R-side", r_side), ("κ(k)", kk)];
            Ok(Outcome::tables(body, header(" (R-side on the negated window)"), tables, checks))
        }
        Command::Verify => {
            let name = suite_name(flags);
            let names: Vec<&str> = if name == "all" { verify::SUITES.to_vec() } else { vec![name] };
            let mut out = Vec::new();
            for s in names {
                match input_suite(f, pf, p, s, &w)? {
                    Some(r) => out.push(r),
                    None => out.extend(verify::run_suite(s, flags.seed)?),
                }
            }
            Ok(Outcome::reports(out))
        }
    }
}

fn module_flag(flags: &Flags) -> Result<&str> {
    flags
        .module
        .as_deref()
        .ok_or_else(|| Error::Parse("this command needs --module".into()))
}

fn which<F: Field>(ctx: &KoszulContext<F>, m: &DgModule<F>) -> AlgebraName {
    if Arc::ptr_eq(&m.algebra, &ctx.s) {
        AlgebraName::S
    } else if Arc::ptr_eq(&m.algebra, &ctx.r) {
        AlgebraName::R
    } else {
        AlgebraName::T
    }
}

/// A module from the file, or a builtin materialized on a window symmetric
/// enough for both κ and κ⁻¹ to find their input degrees.
fn lookup<F: Field>(p: &Problem<F>, name: &str, w: &Window) -> Result<(AlgebraName, DgModule<F>)> {
    if let Some((a, m)) = p.modules.get(name) {
        return Ok((*a, m.clone()));
    }
    let ctx = &p.ctx;
    let hull = Window::of(w.j_min.min(-w.j_max), w.j_max.max(-w.j_min));
    let m = match name {
        "T" => free_module(ctx.t.clone(), &[Bidegree::ZERO], &hull)?,
        "S" => free_module(ctx.s.clone(), &[Bidegree::ZERO], &hull)?,
        "R" => free_module(ctx.r.clone(), &[Bidegree::ZERO], &hull)?,
        "k" => unit_module(ctx.t.clone(), Bidegree::ZERO),
        "Tdual" => ctx.t_dual(hull.j_min)?,
        "K1" => koszul_k1(ctx, w)?.0,
        "K2" => koszul_k2(ctx, w)?.0,
        _ => {
            let mut known: Vec<&str> = BUILTIN_MODULES.to_vec();
            known.extend(p.modules.keys().map(String::as_str));
            return Err(Error::Parse(format!("unknown module '{name}'; known: {}", known.join(", "))));
        }
    };
    Ok((which(ctx, &m), m))
}

/// A suite run against the problem's own objects, or `None` when the suite
/// has nothing to take from this problem.
fn input_suite<F: Field>(
    f: &F,
    pf: &ProblemFile,
    p: &Problem<F>,
    suite: &str,
    w: &Window,
) -> Result<Option<Report>> {
    let ctx = &p.ctx;
    let over = |a: AlgebraName| p.modules.iter().filter(move |(_, (b, _))| *b == a).map(|(n, (_, m))| (n, m));
    let mut r = Report::new(suite, *w);
    match (suite, &p.object) {
        ("koszul-acyclicity", _) => {
            let (ok, wit) = acyclicity_witness(f, &ctx.x, w)?;
            r.add(ok, wit);
        }
        ("intersections", Object::Setup(s)) => {
            let (ok, wit) = intersection_witness(f, s, w)?;
            r.add(ok, wit);
        }
        ("exchange", Object::Setup(s)) => {
            let (left, right) = exchange_tables(f, s, w)?;
            r.add(left == right, json!({"check": "κ(k) vs dual setup", "table": table_json(&left), "dual": table_json(&right)}));
        }
        ("morphisms", Object::Morphism(b)) => r = morphism_report(f, b, w)?,
        ("base-change", Object::BaseChange(_)) => r = base_change_report(&pf.base_change_data()?, w)?,
        ("unit-counit" | "duality" | "degree-formula" | "fg", _) if !p.modules.is_empty() => {
            for (name, m) in over(AlgebraName::T) {
                let (ok, wit) = match suite {
                    "unit-counit" => unit_witness(ctx, name, m, w)?,
                    "duality" => (double_dual_is_iso(m), json!({"module": name})),
                    "degree-formula" => degree_formula_witness(ctx, name, m, w, &Window::of(w.j_min - 2, w.j_max + 2))?,
                    _ => fg_witness(ctx, name, m)?,
                };
                r.add(ok, wit);
            }
            for (name, n) in over(AlgebraName::S).chain(over(AlgebraName::R)) {
                match suite {
                    "unit-counit" if which(ctx, n) == AlgebraName::S => {
                        let (ok, wit) = counit_witness(ctx, name, n, w)?;
                        r.add(ok, wit);
                    }
                    "duality" => r.add(double_dual_is_iso(n), json!({"module": name})),
                    _ => {}
                }
            }
            if r.witnesses.is_empty() {
                return Ok(None);
            }
        }
        _ => return Ok(None),
    }
    Ok(Some(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::problem::parse_str;

    fn problem(text: &str) -> ProblemFile {
        parse_str(text).unwrap()
    }

    fn flags(module: Option<&str>) -> Flags {
        Flags {
            module: module.map(String::from),
            ..Flags::default()
        }
    }

    #[test]
    fn cohomology_of_t_on_a_point() {
        let p = problem(r#"{"field":{"type":"Q"},"complex":{"ranks":{"0":1}},"window":{"j_min":0,"j_max":8}}"#);
        let out = run(Command::Cohomology, Some(&p), &flags(Some("T"))).unwrap();
        let want: Table = (0..=4).map(|m| (Bidegree::new(0, 2 * m), 1)).collect();
        assert_eq!(out.body["table"], table_json(&want));
        assert!(out.pass);
        assert!(out.render(Format::Csv).starts_with("i,j,dim\n0,0,1\n"));
    }

    #[test]
    fn acyclicity_on_input() {
        let p = problem(r#"{"field":{"type":"Fp","p":3},"complex":{"ranks":{"-1":1,"0":2},"diffs":{"-1":[[1],[2]]}},"window":{"j_min":-8,"j_max":0}}"#);
        let f = Flags {
            suite: Some("koszul-acyclicity".into()),
            ..Flags::default()
        };
        let out = run(Command::Verify, Some(&p), &f).unwrap();
        assert!(out.pass, "{}", out.render(Format::Json));
        let wit = &out.body[0]["witnesses"][0];
        assert_eq!(wit["K1"], json!([{"i": 0, "j": 0, "dim": 1}]));
        assert_eq!(wit["K2"], json!([{"i": 0, "j": 0, "dim": 1}]));
    }

    #[test]
    fn intersect_point_in_line() {
        let p = problem(r#"{"field":{"type":"Q"},"setup":{"dim_E":1,"F1":[],"F2":[]},"window":{"j_min":0,"j_max":8}}"#);
        let out = run(Command::Intersect, Some(&p), &flags(None)).unwrap();
        assert!(out.pass, "{}", out.text);
        assert_eq!(out.body["T-side"], json!([{"i": 0, "j": 0, "dim": 1}, {"i": -1, "j": 2, "dim": 1}]));
        let poly: Table = (0..=4).map(|m| (Bidegree::new(0, -2 * m), 1)).collect();
        assert_eq!(out.body["R-side"], table_json(&poly));
        assert_eq!(out.body["κ(k)"], table_json(&poly));
    }

    #[test]
    fn dual_and_back() {
        let p = problem(r#"{"field":{"type":"Q"},"setup":{"dim_E":1,"F1":[],"F2":[]},"window":{"j_min":-8,"j_max":0}}"#);
        let out = run(Command::Dual, Some(&p), &flags(Some("k"))).unwrap();
        let poly: Table = (0..=4).map(|m| (Bidegree::new(0, -2 * m), 1)).collect();
        assert_eq!(out.body["table"], table_json(&poly));
        assert_eq!(out.body["output"]["algebra"], json!("R"));
        let out = run(Command::Dual, Some(&p), &flags(Some("R"))).unwrap();
        assert_eq!(out.body["functor"], json!("κ⁻¹"));
    }

    #[test]
    fn resolve_and_hilbert() {
        let p = problem(r#"{"field":{"type":"Q"},"complex":{"ranks":{"-1":1,"0":1},"diffs":{"-1":[[1]]}},"window":{"j_min":0,"j_max":6},
            "modules":{"M":{"dims":{"(0,0)":1}}}}"#);
        let out = run(Command::Resolve, Some(&p), &flags(Some("M"))).unwrap();
        assert!(out.pass, "{}", out.text);
        assert_eq!(out.body["H(P)"], out.body["H(M)"]);
        let out = run(Command::Hilbert, Some(&p), &flags(None)).unwrap();
        // Λ(x_{-1}) ⊗ k[x_0] in internal degree 2m: x_0^m and x_{-1} x_0^{m-1}
        assert_eq!(out.body["dims"][1], json!({"i": -1, "j": 2, "dim": 1}));
    }

    #[test]
    fn errors_name_the_problem() {
        let p = problem(r#"{"field":{"type":"Q"},"complex":{"ranks":{"0":1}},"window":{"j_min":0,"j_max":4}}"#);
        let e = run(Command::Cohomology, Some(&p), &flags(Some("nope"))).unwrap_err();
        assert!(e.to_string().contains("unknown module 'nope'"));
        assert!(run(Command::Intersect, Some(&p), &flags(None)).is_err());
        assert!(run(Command::Cohomology, None, &flags(Some("T"))).is_err());
    }

    #[test]
    fn failed_reports_are_listed() {
        let mut r = Report::new("demo", Window::of(0, 0));
        r.add(true, json!({"n": 1}));
        r.add(false, json!({"n": 2}));
        let out = Outcome::reports(vec![r]);
        assert!(!out.pass);
        assert_eq!(out.failures, vec![json!({"check": "demo", "window": {"j_min": 0, "j_max": 0}, "witnesses": [{"n": 2, "pass": false}]})]);
        assert!(out.text.starts_with("FAIL demo"));
    }
}
