//! The `dgq` command-line tool.
//!
//! Every command loads one workspace, writes a JSON certificate (or a new
//! workspace) to the output directory and prints a short summary. Exit codes:
//! 0 success, 1 internal or I/O failure, 2 parse, 3 validation,
//! 4 inconclusive, 5 budget.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::{DgError, Result};
use crate::expr::format_module_element;
use crate::filtration::{find_filtration, minimize};
use crate::homology::{cohomology, Window};
use crate::invariants::{analyze, InvariantOptions, InvariantReport};
use crate::io::{map_value, module_value, write_artifact, Overrides, Workspace};
use crate::module::{direct_sum, mapping_cone, BasedDGModule, ModuleMap};
use crate::quillen_suslin::{split_categorically_projective, split_semiprojective, CategoricalMethod, Projector, SplitMethod};
use crate::scalar::Field;

/// Directory searched for bare workspace names that do not exist locally.
pub const CORPUS_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus");

#[derive(Parser, Debug)]
#[command(name = "dgq", version, about = "Exact computations with DG modules over connected cochain DG algebras")]
pub struct Cli {
    /// Ground field: `q` or `fp:<prime>`.
    #[arg(long, global = true)]
    pub field: Option<String>,
    /// Algebra degree cap for polynomial algebras.
    #[arg(long, global = true)]
    pub max_degree: Option<usize>,
    /// Degree window `lo:hi`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub window: Option<String>,
    #[arg(long, global = true)]
    pub budget_generators: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory for certificates and derived workspaces.
    #[arg(long, global = true, default_value = "dgq-out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ModuleTarget {
    /// Workspace path, or a name resolved as `<name>.dgws` (locally, then in the corpus).
    pub workspace: String,
    /// Module to act on; defaults to the only module of the workspace.
    #[arg(long)]
    pub module: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct MapTarget {
    pub workspace: String,
    #[arg(long)]
    pub map: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate every object.
    Validate {
        workspace: String,
    },
    Cohomology(ModuleTarget),
    /// Minimal model by cancelling scalar differential entries.
    Minimize(ModuleTarget),
    /// Longest-path semi-free filtration over the given basis.
    Filtration(ModuleTarget),
    ConeLength(ModuleTarget),
    GhostLength(ModuleTarget),
    Level(ModuleTarget),
    /// Maximum ghost length over the listed modules (all by default): a lower bound.
    GhostDim {
        workspace: String,
        #[arg(long = "module")]
        modules: Vec<String>,
    },
    /// Semi-free splitting of the image of an idempotent chain endomorphism.
    Split(MapTarget),
    /// Categorically free splitting of the image of an idempotent on a categorically free module.
    Catsplit(MapTarget),
    /// Adds the mapping cone of a degree-0 chain map as a new module.
    Cone {
        workspace: String,
        #[arg(long)]
        map: String,
        #[arg(long)]
        name: Option<String>,
    },
    /// Adds `Σ^shift M` as a new module.
    Suspend {
        workspace: String,
        #[arg(long)]
        module: String,
        #[arg(long, allow_hyphen_values = true)]
        shift: i64,
        #[arg(long)]
        name: Option<String>,
    },
    /// Adds the direct sum of two modules as a new module.
    Sum {
        workspace: String,
        first: String,
        second: String,
        #[arg(long)]
        name: Option<String>,
    },
}

/// Runs `dgq` with the given arguments (including the program name),
/// writing the summary to `out`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            if code == 0 {
                let _ = write!(out, "{}", e.render());
            } else {
                eprint!("{}", e.render());
            }
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn main_entry() -> i32 {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    run(std::env::args_os(), &mut lock)
}

/// Finds a workspace file: the path itself, then `<arg>.dgws`, then both
/// under the corpus directory.
pub fn resolve_workspace(arg: &str) -> Result<PathBuf> {
    let mut candidates = vec![PathBuf::from(arg), PathBuf::from(format!("{arg}.dgws"))];
    let corpus = std::env::var_os("DGQ_CORPUS").map(PathBuf::from).unwrap_or_else(|| PathBuf::from(CORPUS_DIR));
    candidates.push(corpus.join(arg));
    candidates.push(corpus.join(format!("{arg}.dgws")));
    candidates
        .into_iter()
        .find(|p| p.is_file())
        .ok_or_else(|| DgError::Io(std::io::Error::new(std::io::ErrorKind::NotFound, format!("no workspace {arg:?}"))))
}

/// Default window for a module: one below its lowest generator up to
/// whichever is larger of `min + N - 5` and one above its highest generator.
pub fn default_window(m: &BasedDGModule, max_degree: usize) -> Window {
    match (m.min_degree(), m.max_degree()) {
        (Some(lo), Some(hi)) => Window::new(lo - 1, (lo + max_degree as i64 - 5).max(hi + 1)).unwrap(),
        _ => Window::new(-1, 1).unwrap(),
    }
}

struct Session<'a> {
    ws: Workspace,
    stem: String,
    file: String,
    out_dir: &'a Path,
    explicit_window: bool,
}

impl Session<'_> {
    fn window_for(&self, m: &BasedDGModule) -> Window {
        self.ws.settings.window.unwrap_or_else(|| default_window(m, self.ws.settings.max_degree))
    }

    fn options(&self, m: &BasedDGModule) -> InvariantOptions {
        let mut o = InvariantOptions::new(self.window_for(m));
        o.budget_generators = self.ws.settings.budget_generators;
        o.seed = self.ws.settings.seed;
        o
    }

    fn pick_module(&self, name: &Option<String>) -> Result<(String, Arc<BasedDGModule>)> {
        let name = match name {
            Some(n) => n.clone(),
            None => {
                let mut names = self.ws.modules.keys();
                match (names.next(), names.next()) {
                    (Some(n), None) => n.clone(),
                    _ => {
                        let all: Vec<&String> = self.ws.modules.keys().collect();
                        return Err(DgError::InvalidParameter(format!("choose a module with --module among {all:?}")));
                    }
                }
            }
        };
        let m = self.ws.module(&name)?.clone();
        Ok((name, m))
    }

    fn header(&self, command: &str, target: &str, window: Option<Window>) -> Value {
        let s = &self.ws.settings;
        json!({
            "tool": format!("dgq {}", env!("CARGO_PKG_VERSION")),
            "command": command,
            "workspace": self.file,
            "target": target,
            "settings": {
                "field": s.field.spec_string(),
                "max_degree": s.max_degree,
                "window": window.map(|w| w.to_string()),
                "window_source": if self.explicit_window { "given" } else { "default" },
                "budget_generators": s.budget_generators,
                "seed": s.seed,
            },
        })
    }

    fn certify(&self, command: &str, target: &str, mut doc: Value, body: Value, out: &mut dyn Write) -> Result<PathBuf> {
        for (k, v) in body.as_object().expect("certificate body is an object") {
            doc[k] = v.clone();
        }
        let mut text = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
        text.push('\n');
        let path = write_artifact(self.out_dir, &format!("{command}-{}-{target}.json", self.stem), &text)?;
        writeln!(out, "certificate: {}", path.display())?;
        Ok(path)
    }

    fn write_workspace(&self, ws: &Workspace, name: &str, out: &mut dyn Write) -> Result<PathBuf> {
        let path = write_artifact(self.out_dir, &format!("{name}.dgws"), &ws.to_json_string())?;
        writeln!(out, "workspace: {}", path.display())?;
        Ok(path)
    }
}

fn overrides(cli: &Cli) -> Result<Overrides> {
    Ok(Overrides {
        field: cli.field.as_deref().map(Field::from_spec_string).transpose()?,
        max_degree: cli.max_degree,
        window: cli.window.as_deref().map(str::parse).transpose()?,
        budget_generators: cli.budget_generators,
        seed: cli.seed,
    })
}

fn workspace_arg(cmd: &Command) -> &str {
    match cmd {
        Command::Validate { workspace } | Command::GhostDim { workspace, .. } => workspace,
        Command::Cohomology(t)
        | Command::Minimize(t)
        | Command::Filtration(t)
        | Command::ConeLength(t)
        | Command::GhostLength(t)
        | Command::Level(t) => &t.workspace,
        Command::Split(t) | Command::Catsplit(t) => &t.workspace,
        Command::Cone { workspace, .. } | Command::Suspend { workspace, .. } | Command::Sum { workspace, .. } => workspace,
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let over = overrides(cli)?;
    let path = resolve_workspace(workspace_arg(&cli.command))?;
    let ws = Workspace::load_with(&path, &over)?;
    let file = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let stem = path.file_stem().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let explicit_window = ws.settings.window.is_some();
    let s = Session { ws, stem, file, out_dir: &cli.out, explicit_window };
    match &cli.command {
        Command::Validate { .. } => cmd_validate(&s, out),
        Command::Cohomology(t) => cmd_cohomology(&s, t, out),
        Command::Minimize(t) => cmd_minimize(&s, t, out),
        Command::Filtration(t) => cmd_filtration(&s, t, out),
        Command::ConeLength(t) => cmd_invariant(&s, t, Invariant::ConeLength, out),
        Command::GhostLength(t) => cmd_invariant(&s, t, Invariant::GhostLength, out),
        Command::Level(t) => cmd_invariant(&s, t, Invariant::Level, out),
        Command::GhostDim { modules, .. } => cmd_ghost_dim(&s, modules, out),
        Command::Split(t) => cmd_split(&s, t, out),
        Command::Catsplit(t) => cmd_catsplit(&s, t, out),
        Command::Cone { map, name, .. } => cmd_cone(&s, map, name.as_deref(), out),
        Command::Suspend { module, shift, name, .. } => cmd_suspend(&s, module, *shift, name.as_deref(), out),
        Command::Sum { first, second, name, .. } => cmd_sum(&s, first, second, name.as_deref(), out),
    }
}

fn levels_value(levels: &[usize], m: &BasedDGModule) -> Value {
    let mut o = serde_json::Map::new();
    for (g, l) in m.gens().iter().zip(levels) {
        o.insert(g.name.clone(), json!(l));
    }
    Value::Object(o)
}

fn cmd_validate(s: &Session, out: &mut dyn Write) -> Result<()> {
    let ws = &s.ws;
    let mut modules = serde_json::Map::new();
    for (name, nm) in &ws.modules {
        let m = &nm.module;
        let filtration = find_filtration(m).ok();
        let length = filtration.as_ref().map(|f| f.length());
        writeln!(
            out,
            "module {name}: {} generators, {}, {}",
            m.rank(),
            match length {
                Some(l) => format!("semi-free of length {l} over its basis"),
                None => "not semi-free over its basis".to_string(),
            },
            if m.is_minimal() { "minimal" } else { "not minimal" }
        )?;
        modules.insert(
            name.clone(),
            json!({
                "algebra": nm.algebra,
                "rank": m.rank(),
                "minimal": m.is_minimal(),
                "filtration_length": length,
                "degrees": m.gens().iter().map(|g| g.degree).collect::<Vec<_>>(),
            }),
        );
    }
    let mut maps = serde_json::Map::new();
    for (name, nm) in &ws.maps {
        let chain = nm.map.is_chain_map()?;
        writeln!(
            out,
            "map {name}: {} -> {}, degree {}, {}",
            nm.source,
            nm.target,
            nm.map.degree(),
            if chain { "chain map" } else { "not a chain map" }
        )?;
        maps.insert(name.clone(), json!({ "source": nm.source, "target": nm.target, "degree": nm.map.degree(), "chain_map": chain }));
    }
    writeln!(out, "valid: {} algebras, {} modules, {} maps", ws.algebras.len(), ws.modules.len(), ws.maps.len())?;
    let body = json!({
        "valid": true,
        "algebras": ws.algebras.keys().collect::<Vec<_>>(),
        "modules": modules,
        "maps": maps,
    });
    s.certify("validate", "all", s.header("validate", "all", s.ws.settings.window), body, out)?;
    Ok(())
}

fn cmd_cohomology(s: &Session, t: &ModuleTarget, out: &mut dyn Write) -> Result<()> {
    let (name, m) = s.pick_module(&t.module)?;
    let window = s.window_for(&m);
    let table = cohomology(&m, window)?;
    let dims: Vec<Value> = table.dims().iter().map(|(d, n)| json!([d, n])).collect();
    let shown: Vec<String> = table.dims().iter().filter(|(_, n)| *n > 0).map(|(d, n)| format!("H^{d} = {n}")).collect();
    writeln!(out, "cohomology of {name} on {window}: {}", if shown.is_empty() { "0".to_string() } else { shown.join(", ") })?;
    let body = json!({ "dims": dims, "total": table.total_dim() });
    s.certify("cohomology", &name, s.header("cohomology", &name, Some(window)), body, out)?;
    Ok(())
}

fn cmd_minimize(s: &Session, t: &ModuleTarget, out: &mut dyn Write) -> Result<()> {
    let (name, m) = s.pick_module(&t.module)?;
    let window = s.window_for(&m);
    let mm = minimize(&m, window)?;
    writeln!(out, "minimal model of {name}: {} generators ({} cancellations)", mm.model.rank(), mm.log.len())?;
    let log: Vec<Value> = mm
        .log
        .iter()
        .map(|c| json!({ "source": c.source, "target": c.target, "pivot": c.pivot.to_canonical_string(), "degree": c.degree }))
        .collect();
    let body = json!({
        "model": module_value(&mm.model),
        "cancellations": log,
        "p": map_value(&mm.p),
        "iota": map_value(&mm.iota),
        "homotopy_ip": mm.homotopy_ip.as_ref().map(map_value),
        "quasi_iso_on_window": mm.quasi_iso_on_window,
    });
    s.certify("minimize", &name, s.header("minimize", &name, Some(window)), body, out)?;
    Ok(())
}

fn cmd_filtration(s: &Session, t: &ModuleTarget, out: &mut dyn Write) -> Result<()> {
    let (name, m) = s.pick_module(&t.module)?;
    let f = find_filtration(&m).map_err(|cycle| {
        let names: Vec<&str> = cycle.iter().map(|&j| m.gens()[j].name.as_str()).collect();
        DgError::NotFilterable(format!("cycle {}", names.join(" -> ")))
    })?;
    writeln!(out, "filtration of {name}: length {}", f.length())?;
    let body = json!({ "levels": levels_value(&f.levels, &m), "length": f.length() });
    s.certify("filtration", &name, s.header("filtration", &name, None), body, out)?;
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Invariant {
    ConeLength,
    GhostLength,
    Level,
}

impl Invariant {
    fn command(self) -> &'static str {
        match self {
            Invariant::ConeLength => "cone-length",
            Invariant::GhostLength => "ghost-length",
            Invariant::Level => "level",
        }
    }

    fn label(self) -> &'static str {
        match self {
            Invariant::ConeLength => "cone length",
            Invariant::GhostLength => "ghost length",
            Invariant::Level => "level",
        }
    }
}

fn report_value(r: &InvariantReport) -> Value {
    let class = r.class.as_ref().map(|c| {
        json!({
            "lower": c.lower,
            "upper": c.upper,
            "module": module_value(&c.module),
            "levels": levels_value(&c.filtration.levels, &c.module),
            "moves": c.moves.iter().map(|(a, b, k)| json!({ "target": a, "added": b, "coefficient": k })).collect::<Vec<_>>(),
        })
    });
    let witness = r.witness.as_ref().map(|w| {
        json!({
            "stage": r.lower,
            "target": module_value(w.target()),
            "map": map_value(w),
        })
    });
    json!({
        "quasi_trivial": r.quasi_trivial,
        "lower": r.lower,
        "upper": r.upper,
        "exact": r.exact,
        "ghost_length": r.value(),
        "cone_length": r.value(),
        "level": r.level(),
        "minimal_model": module_value(&r.minimal_model),
        "filtration": class,
        "witness": witness,
        "tower_depth": r.tower_depth,
        "stats": {
            "cancellations": r.stats.cancellations,
            "tower_stage_ranks": r.stats.tower_stage_ranks,
            "homotopy_solves": r.stats.homotopy_solves,
            "basis_moves": r.stats.basis_moves,
        },
    })
}

fn cmd_invariant(s: &Session, t: &ModuleTarget, which: Invariant, out: &mut dyn Write) -> Result<()> {
    let (name, m) = s.pick_module(&t.module)?;
    let opts = s.options(&m);
    let r = analyze(&m, &opts)?;
    let body = report_value(&r);
    match (r.exact, which) {
        (true, Invariant::Level) => writeln!(out, "level of {name}: {}", r.level().unwrap())?,
        (true, _) => writeln!(out, "{} of {name}: {}", which.label(), r.lower)?,
        (false, _) => writeln!(out, "{} of {name}: inconclusive, between {} and {}", which.label(), r.lower, r.upper)?,
    }
    s.certify(which.command(), &name, s.header(which.command(), &name, Some(opts.window)), body, out)?;
    if r.exact {
        Ok(())
    } else {
        Err(DgError::Inconclusive { lower: r.lower, upper: r.upper })
    }
}

fn cmd_ghost_dim(s: &Session, names: &[String], out: &mut dyn Write) -> Result<()> {
    let names: Vec<String> = if names.is_empty() { s.ws.modules.keys().cloned().collect() } else { names.to_vec() };
    let mut members = serde_json::Map::new();
    let mut best: Option<i64> = None;
    for n in &names {
        let m = s.ws.module(n)?.clone();
        let opts = s.options(&m);
        let r = analyze(&m, &opts)?;
        if !r.exact {
            return Err(DgError::Inconclusive { lower: r.lower, upper: r.upper });
        }
        best = Some(best.map_or(r.lower, |b| b.max(r.lower)));
        members.insert(n.clone(), json!({ "ghost_length": r.lower, "window": opts.window.to_string() }));
    }
    match best {
        Some(b) => writeln!(out, "ghost dimension >= {b} (over {} modules)", names.len())?,
        None => writeln!(out, "ghost dimension >= -inf (empty corpus)")?,
    }
    let body = json!({ "lower_bound": best, "members": members });
    s.certify("ghost-dim", "corpus", s.header("ghost-dim", "corpus", s.ws.settings.window), body, out)?;
    Ok(())
}

fn endomorphism_window(s: &Session, map: &str) -> Result<(ModuleMap, Window)> {
    let f = s.ws.map(map)?.clone();
    if f.source() != f.target() || f.degree() != 0 {
        return Err(DgError::InvalidParameter(format!("map {map:?} is not a degree-0 endomorphism")));
    }
    let w = s.window_for(f.source());
    Ok((f, w))
}

fn cmd_split(s: &Session, t: &MapTarget, out: &mut dyn Write) -> Result<()> {
    let (f, window) = endomorphism_window(s, &t.map)?;
    let pi = Projector::new(f)?;
    let r = split_semiprojective(&pi, None, window)?;
    let ambient = find_filtration(pi.module()).map(|f| f.length()).ok();
    writeln!(out, "image of {}: {} generators, semi-free of length {}", t.map, r.module.rank(), r.filtration.length())?;
    let body = json!({
        "module": module_value(&r.module),
        "levels": levels_value(&r.filtration.levels, &r.module),
        "length": r.filtration.length(),
        "ambient_length": ambient,
        "inc": map_value(&r.inc),
        "proj": map_value(&r.proj),
        "method": match r.method { SplitMethod::Layered => "layered", SplitMethod::Global => "global" },
        "layers": r.layers.iter().map(|l| json!({ "level": l.level, "rank": l.rank, "dropped": l.dropped })).collect::<Vec<_>>(),
        "checks": r.checks.iter().map(|(l, d, k)| json!([l, d, k])).collect::<Vec<_>>(),
    });
    s.certify("split", &t.map, s.header("split", &t.map, Some(window)), body, out)?;
    Ok(())
}

fn cmd_catsplit(s: &Session, t: &MapTarget, out: &mut dyn Write) -> Result<()> {
    let (f, window) = endomorphism_window(s, &t.map)?;
    let pi = Projector::new(f)?;
    let r = split_categorically_projective(&pi, window)?;
    let fm = pi.module();
    let names: Vec<String> = fm.gens().iter().map(|g| g.name.clone()).collect();
    let fmt = |e| format_module_element(fm.algebra(), &names, e);
    writeln!(out, "image of {}: {} pairs", t.map, r.epsilons.len())?;
    let pairs: Vec<Value> = r.epsilons.iter().zip(&r.boundaries).map(|(e, b)| json!({ "epsilon": fmt(e), "d_epsilon": fmt(b) })).collect();
    let body = json!({
        "module": module_value(&r.module),
        "pairs": pairs,
        "inc": map_value(&r.inc),
        "proj": map_value(&r.proj),
        "method": match r.method { CategoricalMethod::Pairs => "pairs", CategoricalMethod::Cancellation => "cancellation" },
        "beta_checks": r.beta_checks.iter().map(|(d, a, b, c)| json!({ "degree": d, "source_dim": a, "rank": b, "p0_dim": c })).collect::<Vec<_>>(),
    });
    s.certify("catsplit", &t.map, s.header("catsplit", &t.map, Some(window)), body, out)?;
    Ok(())
}

fn fresh_module_name(ws: &Workspace, wanted: Option<&str>, fallback: String) -> Result<String> {
    let name = wanted.map(str::to_string).unwrap_or(fallback);
    if ws.modules.contains_key(&name) {
        return Err(DgError::InvalidParameter(format!("module {name:?} already exists")));
    }
    Ok(name)
}

fn add_and_write(s: &Session, name: &str, m: BasedDGModule, out: &mut dyn Write) -> Result<()> {
    let m = m.with_distinct_names();
    writeln!(out, "module {name}: {} generators", m.rank())?;
    let mut ws = s.ws.clone();
    ws.insert_module(name, Arc::new(m))?;
    s.write_workspace(&ws, &format!("{}-{name}", s.stem), out)?;
    Ok(())
}

fn cmd_cone(s: &Session, map: &str, name: Option<&str>, out: &mut dyn Write) -> Result<()> {
    let f = s.ws.map(map)?;
    let name = fresh_module_name(&s.ws, name, format!("cone_{map}"))?;
    let c = mapping_cone(f)?;
    add_and_write(s, &name, (*c.module).clone(), out)
}

fn cmd_suspend(s: &Session, module: &str, shift: i64, name: Option<&str>, out: &mut dyn Write) -> Result<()> {
    let m = s.ws.module(module)?;
    let fallback = if shift >= 0 { format!("s{shift}_{module}") } else { format!("d{}_{module}", -shift) };
    let name = fresh_module_name(&s.ws, name, fallback)?;
    add_and_write(s, &name, m.suspend(shift), out)
}

fn cmd_sum(s: &Session, first: &str, second: &str, name: Option<&str>, out: &mut dyn Write) -> Result<()> {
    let a = s.ws.module(first)?;
    let b = s.ws.module(second)?;
    let name = fresh_module_name(&s.ws, name, format!("{first}_plus_{second}"))?;
    let d = direct_sum(a, b)?;
    add_and_write(s, &name, (*d.module).clone(), out)
}
