//! Workspace files (`.dgws`): JSON documents naming algebras, modules and
//! maps, plus global settings.
//!
//! ```json
//! {
//!   "settings": { "field": "q", "max_degree": 12, "window": "-1:8" },
//!   "algebras": { "A": { "kind": "dg_polynomial", "t": ["0"] } },
//!   "modules": {
//!     "K": { "algebra": "A", "generators": [["u", 0], ["v", 0]], "differential": { "v": "x1*u" } }
//!   },
//!   "maps": { "f": { "source": "K", "target": "K", "degree": 0, "images": { "u": "u", "v": "v" } } }
//! }
//! ```
//!
//! Any algebra, module or map entry may instead be `{ "file": "path" }`,
//! resolved relative to the workspace file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{AlgebraElement, AlgebraKind, BasisLabel, DiffEntry, GradedAlgebra, ProductEntry, TableSpec};
use crate::error::{DgError, Result};
use crate::expr::{format_algebra_element, format_module_element, is_identifier, parse_algebra_element, parse_module_element};
use crate::homology::Window;
use crate::invariants::DEFAULT_GENERATOR_BUDGET;
use crate::module::{AMatrix, BasedDGModule, Generator, ModuleElement, ModuleMap};
use crate::scalar::Field;

pub const DEFAULT_MAX_DEGREE: usize = 12;

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct SettingsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    window: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    budget_generators: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum AlgebraFile {
    DgPolynomial {
        t: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_degree: Option<usize>,
    },
    Table {
        basis: Vec<Vec<String>>,
        unit: String,
        #[serde(default)]
        products: BTreeMap<String, String>,
        #[serde(default)]
        differential: BTreeMap<String, String>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleFile {
    algebra: String,
    generators: Vec<(String, i64)>,
    #[serde(default)]
    differential: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    source: String,
    target: String,
    #[serde(default)]
    degree: i64,
    #[serde(default)]
    images: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorkspaceFile {
    #[serde(default)]
    settings: SettingsFile,
    #[serde(default)]
    algebras: BTreeMap<String, Value>,
    #[serde(default)]
    modules: BTreeMap<String, Value>,
    #[serde(default)]
    maps: BTreeMap<String, Value>,
}

/// Global settings; CLI flags override them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Settings {
    pub field: Field,
    pub max_degree: usize,
    pub window: Option<Window>,
    pub budget_generators: usize,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Self { field: Field::Rational, max_degree: DEFAULT_MAX_DEGREE, window: None, budget_generators: DEFAULT_GENERATOR_BUDGET, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedModule {
    pub algebra: String,
    pub module: Arc<BasedDGModule>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedMap {
    pub source: String,
    pub target: String,
    pub map: ModuleMap,
}

/// A fully validated object graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Workspace {
    pub settings: Settings,
    pub algebras: BTreeMap<String, Arc<GradedAlgebra>>,
    pub modules: BTreeMap<String, NamedModule>,
    pub maps: BTreeMap<String, NamedMap>,
}

fn parse_err(ctx: &str, e: impl std::fmt::Display) -> DgError {
    DgError::Parse(format!("{ctx}: {e}"))
}

/// Follows a `{ "file": … }` reference.
fn resolve(v: &Value, base: &Path, ctx: &str) -> Result<Value> {
    match v.as_object() {
        Some(o) if o.len() == 1 && o.contains_key("file") => {
            let rel = o["file"].as_str().ok_or_else(|| parse_err(ctx, "\"file\" must be a string"))?;
            let path = base.join(rel);
            let text = std::fs::read_to_string(&path).map_err(|e| parse_err(ctx, format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| parse_err(&format!("{ctx} ({})", path.display()), e))
        }
        _ => Ok(v.clone()),
    }
}

fn typed<T: for<'de> Deserialize<'de>>(v: Value, ctx: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| parse_err(ctx, e))
}

fn build_algebra(file: AlgebraFile, settings: &Settings, ctx: &str) -> Result<GradedAlgebra> {
    let field = settings.field;
    match file {
        AlgebraFile::DgPolynomial { t, max_degree } => {
            let t = t.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>>>().map_err(|e| parse_err(ctx, e))?;
            GradedAlgebra::dg_polynomial(field, t, max_degree.unwrap_or(settings.max_degree))
        }
        AlgebraFile::Table { basis, unit, products, differential } => {
            if basis.is_empty() {
                return Err(parse_err(ctx, "table algebras need a degree-0 basis"));
            }
            let max_degree = basis.len() - 1;
            let unit_idx =
                basis[0].iter().position(|b| *b == unit).ok_or_else(|| parse_err(ctx, format!("unit {unit:?} is not in degree 0")))?;
            for (d, names) in basis.iter().enumerate() {
                for n in names {
                    if !(is_identifier(n) || (d == 0 && *n == unit && n == "1")) {
                        return Err(parse_err(ctx, format!("basis label {n:?} is not a valid name")));
                    }
                }
            }
            let bare = GradedAlgebra::from_table(TableSpec {
                field,
                max_degree,
                basis: basis.clone(),
                unit: unit_idx,
                mul: vec![],
                diff: vec![],
            })?;
            let lookup = |name: &str| bare.named(name).ok_or_else(|| parse_err(ctx, format!("unknown basis label {name:?}")));
            let mut mul = Vec::new();
            for (key, val) in &products {
                let (l, r) = key.split_once('*').ok_or_else(|| parse_err(ctx, format!("product key {key:?} must read left*right")))?;
                let (l, r) = (lookup(l.trim())?, lookup(r.trim())?);
                let e = parse_algebra_element(&bare, val).map_err(|e| parse_err(&format!("{ctx}.products.{key}"), e))?;
                mul.push(ProductEntry { left: l, right: r, terms: e.terms().to_vec() });
            }
            let mut diff = Vec::new();
            for (key, val) in &differential {
                let b = lookup(key)?;
                let e = parse_algebra_element(&bare, val).map_err(|e| parse_err(&format!("{ctx}.differential.{key}"), e))?;
                diff.push(DiffEntry { basis: b, terms: e.terms().to_vec() });
            }
            GradedAlgebra::from_table(TableSpec { field, max_degree, basis, unit: unit_idx, mul, diff })
        }
    }
}

fn algebra_file(alg: &GradedAlgebra) -> AlgebraFile {
    match alg.kind() {
        AlgebraKind::DgPolynomial { t, .. } => {
            AlgebraFile::DgPolynomial { t: t.iter().map(|c| c.to_canonical_string()).collect(), max_degree: Some(alg.max_degree()) }
        }
        AlgebraKind::Table => {
            let name = |d: usize, i: usize| alg.label(d, i).to_string();
            let basis = (0..=alg.max_degree()).map(|d| alg.labels(d).iter().map(|l| l.to_string()).collect()).collect();
            let mut products = BTreeMap::new();
            for ((a, b), v) in alg.product_table() {
                let e = AlgebraElement::from_sparse(a.degree + b.degree, v);
                products.insert(format!("{}*{}", name(a.degree, a.index), name(b.degree, b.index)), format_algebra_element(alg, &e));
            }
            let mut differential = BTreeMap::new();
            for d in 0..alg.max_degree() {
                for i in 0..alg.labels(d).len() {
                    let v = alg.diff_basis(d, i).expect("degree below the cap");
                    if !v.is_empty() {
                        differential.insert(name(d, i), format_algebra_element(alg, &AlgebraElement::from_sparse(d + 1, v)));
                    }
                }
            }
            AlgebraFile::Table { basis, unit: name(0, alg.unit_index()), products, differential }
        }
    }
}

fn check_generator_names(alg: &GradedAlgebra, gens: &[(String, i64)], ctx: &str) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for (g, _) in gens {
        if !is_identifier(g) {
            return Err(parse_err(ctx, format!("generator name {g:?} is not a valid name")));
        }
        let clashes = match alg.kind() {
            AlgebraKind::DgPolynomial { .. } => g.strip_prefix('x').is_some_and(|r| !r.is_empty() && r.chars().all(|c| c.is_ascii_digit())),
            AlgebraKind::Table => (0..=alg.max_degree()).any(|d| alg.labels(d).iter().any(|l| matches!(l, BasisLabel::Named(n) if n == g))),
        };
        if clashes {
            return Err(parse_err(ctx, format!("generator name {g:?} clashes with an algebra label")));
        }
        if !seen.insert(g.clone()) {
            return Err(parse_err(ctx, format!("duplicate generator {g:?}")));
        }
    }
    Ok(())
}

fn gen_names(m: &BasedDGModule) -> Vec<String> {
    m.gens().iter().map(|g| g.name.clone()).collect()
}

/// `{"generators": [[name, degree], …], "differential": {name: expr}}`.
pub fn module_value(m: &BasedDGModule) -> Value {
    let names = gen_names(m);
    let mut differential = BTreeMap::new();
    for j in 0..m.rank() {
        let col = ModuleElement::from_column(m.differential().col(j));
        if !col.is_zero() {
            differential.insert(names[j].clone(), Value::String(format_module_element(m.algebra(), &names, &col)));
        }
    }
    let generators: Vec<Value> = m.gens().iter().map(|g| serde_json::json!([g.name, g.degree])).collect();
    serde_json::json!({ "generators": generators, "differential": differential })
}

/// `{"degree": r, "images": {source generator: expr in the target}}`.
pub fn map_value(f: &ModuleMap) -> Value {
    let tnames = gen_names(f.target());
    let mut images = BTreeMap::new();
    for j in 0..f.source().rank() {
        let img = f.on_generator(j);
        if !img.is_zero() {
            images.insert(f.source().gens()[j].name.clone(), Value::String(format_module_element(f.target().algebra(), &tnames, &img)));
        }
    }
    serde_json::json!({ "degree": f.degree(), "images": images })
}

/// Settings given on the command line; they win over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub field: Option<Field>,
    pub max_degree: Option<usize>,
    pub window: Option<Window>,
    pub budget_generators: Option<usize>,
    pub seed: Option<u64>,
}

impl Workspace {
    pub fn parse_str(text: &str, base: &Path) -> Result<Self> {
        Self::parse_with(text, base, &Overrides::default())
    }

    pub fn parse_with(text: &str, base: &Path, over: &Overrides) -> Result<Self> {
        let raw: WorkspaceFile = serde_json::from_str(text).map_err(|e| parse_err("workspace", e))?;
        let mut settings = Settings::default();
        if let Some(f) = &raw.settings.field {
            settings.field = Field::from_spec_string(f)?;
        }
        if let Some(n) = raw.settings.max_degree {
            settings.max_degree = n;
        }
        if let Some(w) = &raw.settings.window {
            settings.window = Some(w.parse().map_err(|e| parse_err("settings.window", e))?);
        }
        if let Some(b) = raw.settings.budget_generators {
            settings.budget_generators = b;
        }
        if let Some(s) = raw.settings.seed {
            settings.seed = s;
        }
        settings.field = over.field.unwrap_or(settings.field);
        settings.max_degree = over.max_degree.unwrap_or(settings.max_degree);
        settings.window = over.window.or(settings.window);
        settings.budget_generators = over.budget_generators.unwrap_or(settings.budget_generators);
        settings.seed = over.seed.unwrap_or(settings.seed);
        let mut ws = Workspace { settings, ..Default::default() };
        for (name, v) in &raw.algebras {
            let ctx = format!("algebras.{name}");
            let file: AlgebraFile = typed(resolve(v, base, &ctx)?, &ctx)?;
            let alg = build_algebra(file, &ws.settings, &ctx)?;
            let report = alg.validate();
            if !report.is_valid() {
                return Err(DgError::Validation(format!("{ctx}: {:?}", report.violations)));
            }
            ws.algebras.insert(name.clone(), Arc::new(alg));
        }
        for (name, v) in &raw.modules {
            let ctx = format!("modules.{name}");
            let file: ModuleFile = typed(resolve(v, base, &ctx)?, &ctx)?;
            let alg = ws.algebras.get(&file.algebra).ok_or_else(|| parse_err(&ctx, format!("unknown algebra {:?}", file.algebra)))?.clone();
            check_generator_names(&alg, &file.generators, &ctx)?;
            let names: Vec<String> = file.generators.iter().map(|g| g.0.clone()).collect();
            let mut d = AMatrix::zeros(names.len(), names.len());
            for (col, expr) in &file.differential {
                let j = names.iter().position(|n| n == col).ok_or_else(|| parse_err(&ctx, format!("unknown generator {col:?}")))?;
                let e = parse_module_element(&alg, &names, expr).map_err(|e| parse_err(&format!("{ctx}.differential.{col}"), e))?;
                for (i, a) in e.coeffs() {
                    d.set(*i, j, a.clone());
                }
            }
            let gens = file.generators.iter().map(|(n, deg)| Generator::new(n.clone(), *deg)).collect();
            let m = BasedDGModule::new(alg, gens, d).map_err(|e| parse_err(&ctx, e))?;
            let report = m.validate();
            if !report.is_valid() {
                return Err(DgError::Validation(format!("{ctx}: {:?}", report.violations)));
            }
            ws.modules.insert(name.clone(), NamedModule { algebra: file.algebra, module: Arc::new(m) });
        }
        for (name, v) in &raw.maps {
            let ctx = format!("maps.{name}");
            let file: MapFile = typed(resolve(v, base, &ctx)?, &ctx)?;
            let lookup =
                |n: &str| ws.modules.get(n).map(|m| m.module.clone()).ok_or_else(|| parse_err(&ctx, format!("unknown module {n:?}")));
            let (src, tgt) = (lookup(&file.source)?, lookup(&file.target)?);
            let src_names = gen_names(&src);
            let tgt_names = gen_names(&tgt);
            let mut mat = AMatrix::zeros(tgt.rank(), src.rank());
            for (g, expr) in &file.images {
                let j = src_names.iter().position(|n| n == g).ok_or_else(|| parse_err(&ctx, format!("unknown source generator {g:?}")))?;
                let e = parse_module_element(tgt.algebra(), &tgt_names, expr).map_err(|e| parse_err(&format!("{ctx}.images.{g}"), e))?;
                for (i, a) in e.coeffs() {
                    mat.set(*i, j, a.clone());
                }
            }
            let map = ModuleMap::new(src, tgt, file.degree, mat).map_err(|e| parse_err(&ctx, e))?;
            let violations = map.validate(false)?;
            if !violations.is_empty() {
                return Err(DgError::Validation(format!("{ctx}: {violations:?}")));
            }
            ws.maps.insert(name.clone(), NamedMap { source: file.source, target: file.target, map });
        }
        Ok(ws)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::load_with(path, &Overrides::default())
    }

    pub fn load_with(path: &Path, over: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        Self::parse_with(&text, &base, over).map_err(|e| match e {
            DgError::Parse(m) => DgError::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Canonical JSON text with every reference inlined.
    pub fn to_json_string(&self) -> String {
        let s = &self.settings;
        let settings = SettingsFile {
            field: Some(s.field.spec_string()),
            max_degree: Some(s.max_degree),
            window: s.window.map(|w| w.to_string()),
            budget_generators: Some(s.budget_generators),
            seed: Some(s.seed),
        };
        let mut out = WorkspaceFile { settings, ..Default::default() };
        for (name, alg) in &self.algebras {
            out.algebras.insert(name.clone(), serde_json::to_value(algebra_file(alg)).unwrap());
        }
        for (name, nm) in &self.modules {
            let mut v = module_value(&nm.module);
            v["algebra"] = Value::String(nm.algebra.clone());
            out.modules.insert(name.clone(), v);
        }
        for (name, nm) in &self.maps {
            let mut v = map_value(&nm.map);
            v["source"] = Value::String(nm.source.clone());
            v["target"] = Value::String(nm.target.clone());
            out.maps.insert(name.clone(), v);
        }
        let mut text = serde_json::to_string_pretty(&out).unwrap();
        text.push('\n');
        text
    }

    pub fn module(&self, name: &str) -> Result<&Arc<BasedDGModule>> {
        self.modules.get(name).map(|m| &m.module).ok_or_else(|| DgError::Parse(format!("unknown module {name:?}")))
    }

    pub fn map(&self, name: &str) -> Result<&ModuleMap> {
        self.maps.get(name).map(|m| &m.map).ok_or_else(|| DgError::Parse(format!("unknown map {name:?}")))
    }

    /// Adds a module under `name` over the algebra it already shares with an
    /// existing entry.
    pub fn insert_module(&mut self, name: &str, m: Arc<BasedDGModule>) -> Result<()> {
        let alg = self
            .algebras
            .iter()
            .find(|(_, a)| ***a == *m.algebra())
            .map(|(n, _)| n.clone())
            .ok_or_else(|| DgError::Internal("module over an unregistered algebra".into()))?;
        self.modules.insert(name.to_string(), NamedModule { algebra: alg, module: m });
        Ok(())
    }
}

/// Writes `text` to `dir/name`, creating the directory.
pub fn write_artifact(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, text)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    const KOSZUL: &str = r#"{
      "settings": { "field": "q", "max_degree": 8, "window": "-1:6" },
      "algebras": { "A": { "kind": "dg_polynomial", "t": ["0"] } },
      "modules": { "K": { "algebra": "A", "generators": [["u", 0], ["v", 0]], "differential": { "v": "x1*u" } } },
      "maps": { "id": { "source": "K", "target": "K", "images": { "u": "u", "v": "v" } } }
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let ws = Workspace::parse_str(KOSZUL, Path::new(".")).unwrap();
        assert_eq!(ws.settings.window, Some(Window::new(-1, 6).unwrap()));
        let k = ws.module("K").unwrap();
        assert_eq!(k.differential().get(0, 1), Some(&k.algebra().variable(1)));
        let text = ws.to_json_string();
        let again = Workspace::parse_str(&text, Path::new(".")).unwrap();
        assert_eq!(again, ws);
        assert_eq!(again.to_json_string(), text);
    }

    #[test]
    fn table_algebra_round_trip() {
        let text = r#"{
          "algebras": { "E": { "kind": "table", "basis": [["1"], ["a"], ["b"]], "unit": "1",
                               "products": { "a*a": "b" }, "differential": { "a": "0" } } },
          "modules": { "M": { "algebra": "E", "generators": [["g", 0]] } }
        }"#;
        let ws = Workspace::parse_str(text, Path::new(".")).unwrap();
        let out = ws.to_json_string();
        let again = Workspace::parse_str(&out, Path::new(".")).unwrap();
        assert_eq!(again, ws);
        assert_eq!(again.to_json_string(), out);
    }

    #[test]
    fn reports_dangling_references_and_bad_modules() {
        let dangling = r#"{ "modules": { "M": { "algebra": "B", "generators": [["g", 0]] } } }"#;
        match Workspace::parse_str(dangling, Path::new(".")) {
            Err(DgError::Parse(m)) => assert!(m.contains("\"B\"")),
            other => panic!("{other:?}"),
        }
        let bad = r#"{
          "algebras": { "A": { "kind": "dg_polynomial", "t": ["0"] } },
          "modules": { "M": { "algebra": "A", "generators": [["a", 0], ["b", 0], ["c", 0]],
                              "differential": { "b": "x1*a", "c": "x1*b" } } }
        }"#;
        assert!(matches!(Workspace::parse_str(bad, Path::new(".")), Err(DgError::Validation(_))));
        let syntax = "{ \"algebras\": ";
        match Workspace::parse_str(syntax, Path::new(".")) {
            Err(DgError::Parse(m)) => assert!(m.contains("line")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn file_references_resolve_relative_to_the_workspace() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("alg.json"), r#"{ "kind": "dg_polynomial", "t": ["1", "0"] }"#).unwrap();
        let ws_text = r#"{ "algebras": { "A": { "file": "alg.json" } },
                           "modules": { "U": { "algebra": "A", "generators": [["e", 0]] } } }"#;
        let path = dir.path().join("w.dgws");
        std::fs::write(&path, ws_text).unwrap();
        let ws = Workspace::load(&path).unwrap();
        assert_eq!(ws.algebras["A"].max_degree(), DEFAULT_MAX_DEGREE);
    }
}
