//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dgcore::algebra::GradedAlgebra;
use dgcore::filtration::{find_filtration, minimize, minimize_with};
use dgcore::generate::{
    koszul_on_variables, multiplication_map, random_categorical_projector, random_chain_map, random_ghost_from_free, random_module,
    random_semifree_projector, ModuleShape, ProjectorInstance,
};
use dgcore::homology::{cohomology, Window};
use dgcore::invariants::{analyze, cone_length, ghost_length, InvariantOptions};
use dgcore::io::{NamedMap, NamedModule, Settings, Workspace};
use dgcore::linalg::rank;
use dgcore::module::{mapping_cone, null_homotopy, BasedDGModule, ModuleElement, ModuleMap};
use dgcore::quillen_suslin::{categorical_pairs, split_categorically_projective, split_semiprojective, CategoricalMethod, Projector};
use dgcore::scalar::Field;
use dgcore::DgError;

const SUITE1_INSTANCES: usize = 200;
const SUITE1_BUDGET: Duration = Duration::from_secs(120);
const SUITE2_INSTANCES: usize = 100;
const SUITE2_BUDGET: Duration = Duration::from_secs(60);
const SUITE3_INSTANCES: usize = 100;
const SUITE3_BUDGET: Duration = Duration::from_secs(600);
const SUITE3_MAX_INCONCLUSIVE: f64 = 0.10;
const SUITE4_BUDGET: Duration = Duration::from_secs(60);
const SUITE5_INSTANCES: usize = 200;
const SUITE6_INSTANCES: usize = 100;
const SUITE7_INSTANCES: usize = 100;
/// Instances per randomized criterion replayed through the CLI for criterion 8.
const SUITE8_INSTANCES: usize = 8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: usize, name: &str, o: &Outcome) {
    println!("[{}] criterion {id} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
}

fn poly(t: &[i64], cap: usize) -> Arc<GradedAlgebra> {
    let q = Field::Rational;
    Arc::new(GradedAlgebra::dg_polynomial(q, t.iter().map(|&v| q.from_i64(v)).collect(), cap).unwrap())
}

/// `A(0)`, `A(0,0)` and `A(1,0)`, cycled by instance index.
fn algebras(cap: usize) -> Vec<Arc<GradedAlgebra>> {
    vec![poly(&[0], cap), poly(&[0, 0], cap), poly(&[1, 0], cap)]
}

fn basis_of(m: &BasedDGModule, d: i64) -> Vec<ModuleElement> {
    let layout = m.layout(d).unwrap();
    (0..layout.dim).map(|k| m.element_from_coords(&layout, &[(k, m.field().one())])).collect()
}

/// Rank of `f: M^d → N^{d+r}`.
fn map_rank(f: &ModuleMap, d: i64) -> usize {
    let tgt = f.target();
    let layout = tgt.layout(d + f.degree()).unwrap();
    let cols: Vec<_> = basis_of(f.source(), d).iter().map(|x| tgt.coords(&layout, &f.apply(x).unwrap())).collect();
    rank(tgt.field(), layout.dim, &cols)
}

const SUITE1_WINDOW: (i64, i64) = (-1, 5);
const SUITE2_WINDOW: (i64, i64) = (-2, 10);
const SUITE3_WINDOW: (i64, i64) = (-2, 12);

fn window(w: (i64, i64)) -> Window {
    Window::new(w.0, w.1).unwrap()
}

// Instance generators, shared with the determinism rerun.

fn suite1_instance(rng: &mut ChaCha8Rng, alg: &Arc<GradedAlgebra>) -> ProjectorInstance {
    let shape = ModuleShape { min_gens: 1, max_gens: 3, degrees: (-1, 2), max_level: 3, minimal: false, attach: 0.8 };
    let mixed = rng.gen_bool(0.5);
    random_semifree_projector(rng, alg, shape, mixed).unwrap()
}

fn suite2_instance(rng: &mut ChaCha8Rng, alg: &Arc<GradedAlgebra>, k: usize) -> ProjectorInstance {
    random_categorical_projector(rng, alg, 4, (-1, 2), k.is_multiple_of(3)).unwrap()
}

fn suite3_module(rng: &mut ChaCha8Rng, alg: &Arc<GradedAlgebra>) -> Arc<BasedDGModule> {
    let shape = ModuleShape { min_gens: 1, max_gens: 5, degrees: (-1, 2), max_level: 4, minimal: true, attach: 0.8 };
    random_module(rng, alg, shape).unwrap()
}

fn suite5_module(rng: &mut ChaCha8Rng, alg: &Arc<GradedAlgebra>) -> Arc<BasedDGModule> {
    let shape = ModuleShape { min_gens: 1, max_gens: 8, degrees: (-1, 2), max_level: 8, minimal: false, attach: 0.85 };
    random_module(rng, alg, shape).unwrap()
}

fn suite5_window(m: &BasedDGModule) -> Window {
    let lo = m.min_degree().unwrap();
    Window::new(lo - 1, lo + m.algebra().max_degree() as i64 - 1).unwrap()
}

fn suite6_target(rng: &mut ChaCha8Rng, alg: &Arc<GradedAlgebra>) -> Arc<BasedDGModule> {
    let shape = ModuleShape { min_gens: 1, max_gens: 4, degrees: (-1, 2), max_level: 3, minimal: false, attach: 0.8 };
    random_module(rng, alg, shape).unwrap()
}

/// A ghost into `m` out of a free module (even `k`) or out of a split summand of one (odd `k`).
fn suite6_ghost(rng: &mut ChaCha8Rng, alg: &Arc<GradedAlgebra>, k: usize, m: &Arc<BasedDGModule>) -> Result<ModuleMap, DgError> {
    let free_shape = ModuleShape { min_gens: 1, max_gens: 3, degrees: (-1, 2), max_level: 0, minimal: false, attach: 0.0 };
    let source = if k.is_multiple_of(2) {
        random_module(rng, alg, free_shape)?
    } else {
        let mixed = rng.gen_bool(0.5);
        let inst = random_semifree_projector(rng, alg, free_shape, mixed)?;
        let s = split_semiprojective(&Projector::new(inst.projector)?, None, Window::new(-1, 4)?)?;
        s.module
    };
    random_ghost_from_free(rng, &source, m)
}

fn suite7_map(rng: &mut ChaCha8Rng, alg: &Arc<GradedAlgebra>) -> ModuleMap {
    let shape = ModuleShape { min_gens: 1, max_gens: 4, degrees: (-1, 2), max_level: 3, minimal: false, attach: 0.8 };
    let m = random_module(rng, alg, shape).unwrap();
    let n = random_module(rng, alg, shape).unwrap();
    random_chain_map(rng, &m, &n).unwrap()
}

fn suite1() -> Outcome {
    let start = Instant::now();
    let algs = algebras(12);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e11_0001);
    let window = window(SUITE1_WINDOW);
    let mut failures = Vec::new();
    let mut layered = 0;
    for k in 0..SUITE1_INSTANCES {
        let alg = &algs[k % algs.len()];
        let inst = suite1_instance(&mut rng, alg);
        let f_len = find_filtration(&inst.module).unwrap().length();
        let mut check = || -> Result<bool, DgError> {
            let pi = Projector::new(inst.projector.clone())?;
            let s = split_semiprojective(&pi, None, window)?;
            if s.method == dgcore::quillen_suslin::SplitMethod::Layered {
                layered += 1;
            }
            let p = &s.module;
            let mut ok = p.validate().is_valid() && s.filtration.is_valid_for(p) && s.filtration.length() <= f_len;
            ok &= ModuleMap::compose(&s.proj, &s.inc)? == ModuleMap::identity(p.clone());
            ok &= ModuleMap::compose(&s.inc, &s.proj)? == inst.projector;
            let comp = ModuleMap::identity(inst.module.clone()).sub(&inst.projector)?;
            for d in window.degrees() {
                let total = inst.module.layout(d)?.dim;
                ok &= total == p.layout(d)?.dim + map_rank(&comp, d);
            }
            Ok(ok)
        };
        match check() {
            Ok(true) => {}
            Ok(false) => failures.push(format!("#{k}: invariant violated")),
            Err(e) => failures.push(format!("#{k}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: failures.is_empty() && elapsed < SUITE1_BUDGET,
        detail: format!(
            "{}/{} split, {layered} layered, {:.1}s (limit {}s){}",
            SUITE1_INSTANCES - failures.len(),
            SUITE1_INSTANCES,
            elapsed.as_secs_f64(),
            SUITE1_BUDGET.as_secs(),
            first_failures(&failures)
        ),
    }
}

fn first_failures(f: &[String]) -> String {
    if f.is_empty() {
        String::new()
    } else {
        format!("; failures: {}", f.iter().take(3).cloned().collect::<Vec<_>>().join(" | "))
    }
}

fn suite2() -> Outcome {
    let start = Instant::now();
    let algs = algebras(12);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e11_0002);
    let window = window(SUITE2_WINDOW);
    let mut failures = Vec::new();
    let mut by_pairs = 0;
    for k in 0..SUITE2_INSTANCES {
        let alg = &algs[k % algs.len()];
        let inst = suite2_instance(&mut rng, alg, k);
        let mut check = || -> Result<bool, DgError> {
            let pi = Projector::new(inst.projector.clone())?;
            let s = split_categorically_projective(&pi, window)?;
            if s.method == CategoricalMethod::Pairs {
                by_pairs += 1;
            }
            let mut ok = categorical_pairs(&s.module).map(|p| p.len()) == Some(s.epsilons.len());
            ok &= s.beta_checks.iter().all(|&(_, src, rk, p0)| src == rk && rk == p0);
            let a = inst.module.algebra();
            for d in window.degrees() {
                let mut expect = 0;
                for (e, b) in s.epsilons.iter().zip(&s.boundaries) {
                    let de = inst.module.element_degree(e).unwrap();
                    ok &= inst.module.element_degree(b) == Some(de + 1);
                    for off in [d - de, d - de - 1] {
                        if off >= 0 {
                            expect += a.dim(off)?;
                        }
                    }
                }
                ok &= expect == map_rank(&inst.projector, d);
            }
            Ok(ok)
        };
        match check() {
            Ok(true) => {}
            Ok(false) => failures.push(format!("#{k}: invariant violated")),
            Err(e) => failures.push(format!("#{k}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: failures.is_empty() && elapsed < SUITE2_BUDGET,
        detail: format!(
            "{}/{} split into pairs ({by_pairs} via β), {:.1}s (limit {}s){}",
            SUITE2_INSTANCES - failures.len(),
            SUITE2_INSTANCES,
            elapsed.as_secs_f64(),
            SUITE2_BUDGET.as_secs(),
            first_failures(&failures)
        ),
    }
}

fn suite3() -> Outcome {
    let start = Instant::now();
    let algs = algebras(16);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e11_0003);
    let opts = InvariantOptions::new(window(SUITE3_WINDOW));
    let mut modules = Vec::new();
    for k in 0..SUITE3_INSTANCES {
        modules.push((suite3_module(&mut rng, &algs[k % algs.len()]), None));
    }
    let a3 = poly(&[0, 0, 0], 16);
    for n in 1..=3 {
        modules.push((koszul_on_variables(&a3, n).unwrap(), Some(n as i64)));
    }
    let mut inconclusive = 0;
    let mut failures = Vec::new();
    let mut histogram = std::collections::BTreeMap::new();
    for (k, (m, expected)) in modules.iter().enumerate() {
        match analyze(m, &opts) {
            Ok(r) if r.exact => {
                *histogram.entry(r.lower).or_insert(0usize) += 1;
                let witness_ok = r.lower == r.upper && (r.lower <= 0 || r.witness.is_some());
                let level_ok = r.level() == Some(r.lower + 1);
                let expected_ok = expected.is_none_or(|e| e == r.lower);
                if !(witness_ok && level_ok && expected_ok) {
                    failures.push(format!("#{k}: value {} level {:?}", r.lower, r.level()));
                }
            }
            Ok(_) => inconclusive += 1,
            Err(e) => failures.push(format!("#{k}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    let rate = inconclusive as f64 / modules.len() as f64;
    Outcome {
        pass: failures.is_empty() && rate < SUITE3_MAX_INCONCLUSIVE && elapsed < SUITE3_BUDGET,
        detail: format!(
            "{} modules, values {:?}, inconclusive rate {:.3} (limit {:.2}), {:.1}s (limit {}s){}",
            modules.len(),
            histogram,
            rate,
            SUITE3_MAX_INCONCLUSIVE,
            elapsed.as_secs_f64(),
            SUITE3_BUDGET.as_secs(),
            first_failures(&failures)
        ),
    }
}

fn suite4() -> Outcome {
    let start = Instant::now();
    let a = poly(&[0, 0, 0], 12);
    let opts = InvariantOptions::new(Window::new(-1, 8).unwrap());
    let mut lines = Vec::new();
    let mut ok = true;
    for n in 1..=3i64 {
        let k = koszul_on_variables(&a, n as usize).unwrap();
        let cl = cone_length(&k, &opts).map(|r| r.lower);
        let gh = ghost_length(&k, &opts).map(|r| r.lower);
        let level = dgcore::invariants::level(&k, &opts);
        let good = matches!((&cl, &gh, &level), (Ok(c), Ok(g), Ok(l)) if *c == n && *g == n && *l == n + 1);
        ok &= good;
        lines.push(format!("n={n}: cl {:?} gh {:?} level {:?}", cl.ok(), gh.ok(), level.ok()));
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: ok && elapsed < SUITE4_BUDGET,
        detail: format!("{}; {:.1}s (limit {}s)", lines.join(", "), elapsed.as_secs_f64(), SUITE4_BUDGET.as_secs()),
    }
}

fn suite5() -> Outcome {
    let algs = algebras(10);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e11_0005);
    let mut failures = Vec::new();
    let mut cancelled = 0;
    for k in 0..SUITE5_INSTANCES {
        let alg = &algs[k % algs.len()];
        let m = suite5_module(&mut rng, alg);
        let window = suite5_window(&m);
        let mut check = || -> Result<bool, DgError> {
            let mm = minimize_with(&m, window, false)?;
            cancelled += mm.log.len();
            let before = cohomology(&m, window)?;
            let after = cohomology(&mm.model, window)?;
            Ok(mm.model.is_minimal() && before.dims() == after.dims())
        };
        match check() {
            Ok(true) => {}
            Ok(false) => failures.push(format!("#{k}: mismatch")),
            Err(e) => failures.push(format!("#{k}: {e}")),
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "{}/{} minimal with matching cohomology, {cancelled} cancellations{}",
            SUITE5_INSTANCES - failures.len(),
            SUITE5_INSTANCES,
            first_failures(&failures)
        ),
    }
}

fn suite6() -> Outcome {
    let algs = algebras(10);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e11_0006);
    let mut failures = Vec::new();
    let mut from_summands = 0;
    for k in 0..SUITE6_INSTANCES {
        let alg = &algs[k % algs.len()];
        let m = suite6_target(&mut rng, alg);
        let check = |rng: &mut ChaCha8Rng| -> Result<bool, DgError> {
            let f = suite6_ghost(rng, alg, k, &m)?;
            Ok(f.is_chain_map()? && null_homotopy(&f)?.is_some())
        };
        if k % 2 == 1 {
            from_summands += 1;
        }
        match check(&mut rng) {
            Ok(true) => {}
            Ok(false) => failures.push(format!("#{k}: not null-homotopic")),
            Err(e) => failures.push(format!("#{k}: {e}")),
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "{}/{} ghosts certified null-homotopic ({from_summands} out of split summands){}",
            SUITE6_INSTANCES - failures.len(),
            SUITE6_INSTANCES,
            first_failures(&failures)
        ),
    }
}

fn suite7() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let a1 = poly(&[0], 12);
    let unit = Arc::new(BasedDGModule::unit(a1.clone()));
    let w = Window::new(-1, 8).unwrap();
    let cid = mapping_cone(&ModuleMap::identity(unit)).unwrap();
    let zero = minimize(&cid.module, w).map(|mm| mm.model.rank() == 0).unwrap_or(false);
    ok &= zero;
    notes.push(format!("cone(id) minimal rank 0: {zero}"));
    let x = multiplication_map(&a1, &a1.variable(1)).unwrap();
    let cx = mapping_cone(&x).unwrap();
    let dims = cohomology(&cx.module, w).unwrap().dims();
    let nonzero: Vec<_> = dims.iter().filter(|(_, n)| *n > 0).collect();
    let single = nonzero.len() == 1 && nonzero[0].1 == 1;
    ok &= single;
    notes.push(format!("H(cone(x)) nonzero in {:?}", nonzero));

    let algs = algebras(10);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e11_0007);
    let mut good = 0;
    for k in 0..SUITE7_INSTANCES {
        let f = suite7_map(&mut rng, &algs[k % algs.len()]);
        let (m, n) = (f.source().clone(), f.target().clone());
        let c = mapping_cone(&f).unwrap();
        let sm = c.suspended_source.clone();
        let lo = m.min_degree().unwrap().min(n.min_degree().unwrap()) - 1;
        let window = Window::new(lo, lo + 6).unwrap();
        let mut exact = ModuleMap::compose(&c.pi, &c.iota).unwrap().is_zero();
        for d in window.degrees() {
            let (dc, dn, ds) = (c.module.layout(d).unwrap().dim, n.layout(d).unwrap().dim, sm.layout(d).unwrap().dim);
            exact &= dc == dn + ds && map_rank(&c.iota, d) == dn && map_rank(&c.pi, d) == ds;
        }
        good += exact as usize;
    }
    ok &= good == SUITE7_INSTANCES;
    notes.push(format!("{good}/{SUITE7_INSTANCES} cones split-exact degreewise"));
    Outcome { pass: ok, detail: notes.join("; ") }
}

fn workspace(
    alg: &Arc<GradedAlgebra>,
    modules: &[(&str, &Arc<BasedDGModule>)],
    maps: &[(&str, &str, &str, &ModuleMap)],
    w: Option<Window>,
) -> Workspace {
    let mut ws =
        Workspace { settings: Settings { max_degree: alg.max_degree(), window: w, ..Settings::default() }, ..Workspace::default() };
    ws.algebras.insert("A".into(), alg.clone());
    for (name, m) in modules {
        ws.modules.insert(name.to_string(), NamedModule { algebra: "A".into(), module: (*m).clone() });
    }
    for (name, src, tgt, f) in maps {
        ws.maps.insert(name.to_string(), NamedMap { source: src.to_string(), target: tgt.to_string(), map: (*f).clone() });
    }
    ws
}

struct Replay {
    workspaces: PathBuf,
    out: PathBuf,
    errors: Vec<String>,
}

impl Replay {
    /// Writes `ws` as `<name>.dgws` and runs each command on it; exit 4
    /// (inconclusive) still writes its certificate.
    fn emit(&mut self, name: &str, ws: &Workspace, commands: &[&[&str]]) -> PathBuf {
        std::fs::create_dir_all(&self.workspaces).unwrap();
        let path = self.workspaces.join(format!("{name}.dgws"));
        std::fs::write(&path, ws.to_json_string()).unwrap();
        for cmd in commands {
            self.dgq(&path, cmd);
        }
        path
    }

    fn dgq(&mut self, ws: &Path, cmd: &[&str]) {
        let mut argv = vec!["dgq".to_string(), "--out".into(), self.out.to_string_lossy().into_owned(), cmd[0].into()];
        argv.push(ws.to_string_lossy().into_owned());
        argv.extend(cmd[1..].iter().map(|s| s.to_string()));
        let code = dgcore::cli::run(argv, &mut std::io::sink());
        if code != 0 && code != 4 {
            self.errors.push(format!("{} {}: exit {code}", cmd[0], ws.display()));
        }
    }
}

/// Regenerates the first instances of criteria 1-7 from their seeds, stores
/// them as workspaces and runs the matching `dgq` commands under `root`.
fn replay(root: &Path) -> Vec<String> {
    let mut r = Replay { workspaces: root.join("workspaces"), out: root.join("certificates"), errors: Vec::new() };

    let algs = algebras(12);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e11_0001);
    for k in 0..SUITE8_INSTANCES {
        let alg = &algs[k % algs.len()];
        let inst = suite1_instance(&mut rng, alg);
        let ws = workspace(alg, &[("F", &inst.module)], &[("pi", "F", "F", &inst.projector)], Some(window(SUITE1_WINDOW)));
        r.emit(&format!("c1-{k}"), &ws, &[&["split", "--map", "pi"]]);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5e11_0002);
    for k in 0..SUITE8_INSTANCES {
        let alg = &algs[k % algs.len()];
        let inst = suite2_instance(&mut rng, alg, k);
        let ws = workspace(alg, &[("F", &inst.module)], &[("pi", "F", "F", &inst.projector)], Some(window(SUITE2_WINDOW)));
        r.emit(&format!("c2-{k}"), &ws, &[&["catsplit", "--map", "pi"]]);
    }

    let algs16 = algebras(16);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e11_0003);
    for k in 0..SUITE8_INSTANCES {
        let alg = &algs16[k % algs16.len()];
        let m = suite3_module(&mut rng, alg);
        let ws = workspace(alg, &[("M", &m)], &[], Some(window(SUITE3_WINDOW)));
        r.emit(&format!("c3-{k}"), &ws, &[&["ghost-length"], &["level"]]);
    }

    let a3 = poly(&[0, 0, 0], 12);
    for n in 1..=3 {
        let k = koszul_on_variables(&a3, n).unwrap();
        let ws = workspace(&a3, &[("K", &k)], &[], Some(window((-1, 8))));
        r.emit(&format!("c4-{n}"), &ws, &[&["cone-length"], &["ghost-length"], &["level"]]);
    }

    let algs10 = algebras(10);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e11_0005);
    for k in 0..SUITE8_INSTANCES {
        let alg = &algs10[k % algs10.len()];
        let m = suite5_module(&mut rng, alg);
        let ws = workspace(alg, &[("M", &m)], &[], Some(suite5_window(&m)));
        r.emit(&format!("c5-{k}"), &ws, &[&["minimize"], &["cohomology"]]);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5e11_0006);
    for k in 0..SUITE8_INSTANCES {
        let alg = &algs10[k % algs10.len()];
        let m = suite6_target(&mut rng, alg);
        match suite6_ghost(&mut rng, alg, k, &m) {
            Ok(f) => {
                let ws = workspace(alg, &[("S", f.source()), ("M", &m)], &[("f", "S", "M", &f)], None);
                r.emit(&format!("c6-{k}"), &ws, &[&["validate"], &["cone", "--map", "f", "--name", "C"]]);
            }
            Err(e) => r.errors.push(format!("c6-{k}: {e}")),
        }
    }

    let a1 = poly(&[0], 12);
    let unit = Arc::new(BasedDGModule::unit(a1.clone()));
    let x = multiplication_map(&a1, &a1.variable(1)).unwrap();
    let id = ModuleMap::identity(unit.clone());
    let ws = workspace(&a1, &[("A", &unit), ("E", x.source())], &[("id", "A", "A", &id), ("x", "E", "A", &x)], Some(window((-1, 8))));
    r.emit("c7-fixed", &ws, &[&["cone", "--map", "id", "--name", "Cid"], &["cone", "--map", "x", "--name", "Cx"]]);
    let (cid, cx) = (r.out.join("c7-fixed-Cid.dgws"), r.out.join("c7-fixed-Cx.dgws"));
    r.dgq(&cid, &["minimize", "--module", "Cid"]);
    r.dgq(&cx, &["cohomology", "--module", "Cx"]);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e11_0007);
    for k in 0..SUITE8_INSTANCES {
        let alg = &algs10[k % algs10.len()];
        let f = suite7_map(&mut rng, alg);
        let ws = workspace(alg, &[("M", f.source()), ("N", f.target())], &[("f", "M", "N", &f)], None);
        r.emit(&format!("c7-{k}"), &ws, &[&["cone", "--map", "f", "--name", "C"]]);
        let derived = r.out.join(format!("c7-{k}-C.dgws"));
        r.dgq(&derived, &["cohomology", "--module", "C"]);
    }
    r.errors
}

fn files_under(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let bytes = std::fs::read(&path).unwrap();
                out.push((path.strip_prefix(root).unwrap().to_path_buf(), bytes));
            }
        }
    }
    out.sort();
    out
}

fn suite8() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut errors = replay(a.path());
    errors.extend(replay(b.path()));
    let (fa, fb) = (files_under(a.path()), files_under(b.path()));
    let names_match = fa.iter().map(|f| &f.0).eq(fb.iter().map(|f| &f.0));
    let differing: Vec<String> = fa.iter().zip(&fb).filter(|(x, y)| x.1 != y.1).map(|(x, _)| x.0.display().to_string()).collect();
    let certificates = fa.iter().filter(|f| f.0.starts_with("certificates") && f.0.extension().is_some_and(|e| e == "json")).count();
    Outcome {
        pass: errors.is_empty() && names_match && differing.is_empty() && certificates > 0,
        detail: format!(
            "{} files over two runs ({certificates} certificates each), {} differing{}{}",
            fa.len() + fb.len(),
            differing.len(),
            if names_match { "" } else { ", file sets differ" },
            first_failures(&[errors, differing].concat())
        ),
    }
}

#[test]
fn acceptance() {
    let results = [
        (1, "semi-projective splitting", suite1()),
        (2, "categorically projective splitting", suite2()),
        (3, "ghost length equals cone length", suite3()),
        (4, "Koszul complexes", suite4()),
        (5, "minimization soundness", suite5()),
        (6, "ghosts out of free modules", suite6()),
        (7, "cone calculus", suite7()),
        (8, "determinism", suite8()),
    ];
    for (id, name, o) in &results {
        report(*id, name, o);
    }
    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
