//! Ghost towers, ghost length, level and ghost dimension.
//!
//! The ghost length of a compact module is bracketed by two independent
//! computations. The lower bound comes from a tower of cones over
//! cohomology-epimorphic covers: if the composite of the first `n` tower
//! maps is not null-homotopic, then `gh.len ≥ n`. The upper bound is the
//! length of a semi-free filtration of the minimal model, found by a
//! basis-change search. The value is declared only when the two agree.

use std::sync::Arc;

use crate::error::{DgError, Result};
use crate::filtration::{dg_free_class, minimize_with, require_filtration, ClassMode, FreeClassResult};
use crate::homology::{cohomology, induced_map_with, minimal_cohomology_generators, CohomologyGenerators, Window};
use crate::module::{mapping_cone, null_homotopy, AMatrix, BasedDGModule, Generator, ModuleMap};

/// New cohomology generators in the top this-many window degrees make a
/// cover unstable.
pub const DEFAULT_STABILITY_MARGIN: i64 = 2;
pub const DEFAULT_GENERATOR_BUDGET: usize = 512;
pub const DEFAULT_SEARCH_MOVES: usize = 4000;
pub const DEFAULT_SEARCH_SIZE_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InvariantOptions {
    pub window: Window,
    pub budget_generators: usize,
    pub search_moves: usize,
    pub search_size_cap: usize,
    pub stability_margin: i64,
    pub seed: u64,
}

impl InvariantOptions {
    pub fn new(window: Window) -> Self {
        Self {
            window,
            budget_generators: DEFAULT_GENERATOR_BUDGET,
            search_moves: DEFAULT_SEARCH_MOVES,
            search_size_cap: DEFAULT_SEARCH_SIZE_CAP,
            stability_margin: DEFAULT_STABILITY_MARGIN,
            seed: 0,
        }
    }
}

/// A free module mapping onto `H(M)` in cohomology.
#[derive(Clone, Debug)]
pub struct Cover {
    pub free: Arc<BasedDGModule>,
    pub map: ModuleMap,
    pub generators: CohomologyGenerators,
}

fn cover_from(m: &Arc<BasedDGModule>, gens: CohomologyGenerators) -> Result<Cover> {
    if !gens.stable {
        return Err(DgError::WindowTooSmall(format!("new cohomology generators near the top of window {}", gens.window)));
    }
    let alg = m.algebra_arc().clone();
    let free_gens: Vec<Generator> = gens.generators.iter().enumerate().map(|(k, (d, _))| Generator::new(format!("z{k}"), *d)).collect();
    let free = Arc::new(BasedDGModule::free(alg, free_gens));
    let mut mat = AMatrix::zeros(m.rank(), free.rank());
    for (k, (_, z)) in gens.generators.iter().enumerate() {
        for (i, a) in z.coeffs() {
            mat.set(*i, k, a.clone());
        }
    }
    let map = ModuleMap::new(free.clone(), m.clone(), 0, mat)?;
    Ok(Cover { free, map, generators: gens })
}

/// `F → M` with `F` DG free on minimal cohomology generators and `H(f)`
/// surjective on the window (verified).
pub fn homology_epi_cover(m: &Arc<BasedDGModule>, window: Window, margin: i64) -> Result<Cover> {
    let gens = minimal_cohomology_generators(m, window, margin)?;
    let cover = cover_from(m, gens)?;
    let w = cover.generators.window;
    let hf = cohomology(&cover.free, w)?;
    let h = induced_map_with(&cover.map, &hf, &cover.generators.table)?;
    for d in w.degrees() {
        let target = cover.generators.table.dim(d);
        if h.rank(d, target) != target {
            return Err(DgError::Internal(format!("cover is not surjective in degree {d}")));
        }
    }
    Ok(cover)
}

/// One tower step `I_i → I_{i+1}`.
#[derive(Clone, Debug)]
pub struct TowerStage {
    pub cover: Arc<BasedDGModule>,
    /// Minimal model of the cone of the cover.
    pub next: Arc<BasedDGModule>,
    /// Ghost `I_i → I_{i+1}`: cone inclusion followed by the minimal-model projection.
    pub ghost: ModuleMap,
    /// `ρ_i = g_i∘…∘g_0: I_0 → I_{i+1}`.
    pub composite: ModuleMap,
    /// Whether `ρ_i` is null-homotopic (exact solve).
    pub null: bool,
}

#[derive(Clone, Debug)]
pub struct GhostTower {
    pub base: Arc<BasedDGModule>,
    pub stages: Vec<TowerStage>,
    pub window: Window,
}

impl GhostTower {
    /// Index of the first null-homotopic composite.
    pub fn first_null(&self) -> Option<usize> {
        self.stages.iter().position(|s| s.null)
    }
}

/// Builds `depth` tower stages over `m` (which must be semi-free), stopping
/// early after the first null-homotopic composite when `stop_at_null` is set.
pub fn ghost_tower(m: &Arc<BasedDGModule>, depth: usize, opts: &InvariantOptions, stop_at_null: bool) -> Result<GhostTower> {
    require_filtration(m)?;
    let window = opts.window;
    let mut stage = m.clone();
    let mut gens = minimal_cohomology_generators(&stage, window, opts.stability_margin)?;
    let mut rho: Option<ModuleMap> = None;
    let mut stages = Vec::new();
    for _ in 0..depth {
        let cover = cover_from(&stage, gens)?;
        let cone = mapping_cone(&cover.map)?;
        if cone.module.rank() > opts.budget_generators {
            return Err(DgError::BudgetExceeded(format!(
                "tower stage has {} generators, budget {}",
                cone.module.rank(),
                opts.budget_generators
            )));
        }
        let mm = minimize_with(&cone.module, window, false)?;
        let next = mm.model.clone();
        require_filtration(&next)?;
        let ghost = ModuleMap::compose(&mm.p, &cone.iota)?;
        let next_gens = minimal_cohomology_generators(&next, window, opts.stability_margin)?;
        let h = induced_map_with(&ghost, &cover.generators.table, &next_gens.table)?;
        if !h.is_zero() {
            return Err(DgError::Internal("tower map is not a ghost".into()));
        }
        let composite = match &rho {
            None => ghost.clone(),
            Some(r) => ModuleMap::compose(&ghost, r)?,
        };
        let null = null_homotopy(&composite)?.is_some();
        stages.push(TowerStage { cover: cover.free.clone(), next: next.clone(), ghost, composite: composite.clone(), null });
        rho = Some(composite);
        stage = next;
        gens = next_gens;
        if null && stop_at_null {
            break;
        }
    }
    Ok(GhostTower { base: m.clone(), stages, window })
}

/// Deterministic work counters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub cancellations: usize,
    pub tower_stage_ranks: Vec<usize>,
    pub homotopy_solves: usize,
    pub basis_moves: usize,
}

#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub window: Window,
    pub quasi_trivial: bool,
    /// Ghost-tower lower bound on `gh.len = cl`.
    pub lower: i64,
    /// Semi-free filtration length upper bound on `cl`.
    pub upper: i64,
    pub exact: bool,
    pub minimal_model: Arc<BasedDGModule>,
    /// Basis and filtration attaining the upper bound (absent for quasi-trivial modules).
    pub class: Option<FreeClassResult>,
    /// Last composite of tower ghosts that is not null-homotopic.
    pub witness: Option<ModuleMap>,
    pub tower_depth: usize,
    pub stats: Stats,
}

impl InvariantReport {
    pub fn value(&self) -> Option<i64> {
        self.exact.then_some(self.lower)
    }

    pub fn level(&self) -> Option<i64> {
        self.value().map(|v| v + 1)
    }
}

/// Minimal model, ghost-tower lower bound and filtration upper bound.
pub fn analyze(m: &Arc<BasedDGModule>, opts: &InvariantOptions) -> Result<InvariantReport> {
    let mm = minimize_with(m, opts.window, false)?;
    let g = mm.model.clone();
    let mut stats = Stats { cancellations: mm.log.len(), ..Stats::default() };
    if g.rank() == 0 {
        return Ok(InvariantReport {
            window: opts.window,
            quasi_trivial: true,
            lower: -1,
            upper: -1,
            exact: true,
            minimal_model: g,
            class: None,
            witness: None,
            tower_depth: 0,
            stats,
        });
    }
    let fixed = require_filtration(&g)?.length();
    let tower = ghost_tower(&g, fixed as usize, opts, true)?;
    stats.tower_stage_ranks = tower.stages.iter().map(|s| s.next.rank()).collect();
    stats.homotopy_solves = tower.stages.len();
    let lower = tower.first_null().map_or(fixed, |k| k as i64);
    let witness = if lower == 0 { Some(ModuleMap::identity(g.clone())) } else { Some(tower.stages[lower as usize - 1].composite.clone()) };
    let class = if lower < fixed {
        let mode = ClassMode::Exhaustive { size_cap: opts.search_size_cap, moves: opts.search_moves, seed: opts.seed };
        dg_free_class(&g, mode, lower)?
    } else {
        dg_free_class(&g, ClassMode::FixedBasis, lower)?
    };
    stats.basis_moves = class.moves.len();
    let upper = class.upper;
    if lower > upper {
        return Err(DgError::Internal(format!("ghost witness {lower} exceeds filtration length {upper}")));
    }
    Ok(InvariantReport {
        window: opts.window,
        quasi_trivial: false,
        lower,
        upper,
        exact: lower == upper,
        minimal_model: g,
        class: Some(class),
        witness,
        tower_depth: tower.stages.len(),
        stats,
    })
}

fn exact_or_inconclusive(r: InvariantReport) -> Result<InvariantReport> {
    if r.exact {
        Ok(r)
    } else {
        Err(DgError::Inconclusive { lower: r.lower, upper: r.upper })
    }
}

/// Ghost length; `-1` for quasi-trivial modules.
pub fn ghost_length(m: &Arc<BasedDGModule>, opts: &InvariantOptions) -> Result<InvariantReport> {
    exact_or_inconclusive(analyze(m, opts)?)
}

/// Cone length of the minimal model, certified by the ghost witness;
/// `-1` for quasi-trivial modules.
pub fn cone_length(m: &Arc<BasedDGModule>, opts: &InvariantOptions) -> Result<InvariantReport> {
    exact_or_inconclusive(analyze(m, opts)?)
}

/// `gh.len + 1`; `0` for quasi-trivial modules.
pub fn level(m: &Arc<BasedDGModule>, opts: &InvariantOptions) -> Result<i64> {
    Ok(ghost_length(m, opts)?.level().unwrap())
}

/// Maximum ghost length over a corpus: a lower bound for the ghost
/// dimension. `None` stands for the empty supremum.
pub fn ghost_dimension(corpus: &[Arc<BasedDGModule>], opts: &InvariantOptions) -> Result<Option<i64>> {
    let mut best = None;
    for m in corpus {
        let v = ghost_length(m, opts)?.value().unwrap();
        best = Some(best.map_or(v, |b: i64| b.max(v)));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GradedAlgebra;
    use crate::homology::is_ghost;
    use crate::scalar::Field;

    fn poly(t: &[i64], cap: usize) -> Arc<GradedAlgebra> {
        let q = Field::Rational;
        Arc::new(GradedAlgebra::dg_polynomial(q, t.iter().map(|&v| q.from_i64(v)).collect(), cap).unwrap())
    }

    fn koszul(alg: &Arc<GradedAlgebra>) -> Arc<BasedDGModule> {
        let mut d = AMatrix::zeros(2, 2);
        d.set(0, 1, alg.variable(1));
        Arc::new(BasedDGModule::new(alg.clone(), vec![Generator::new("u", 0), Generator::new("v", 0)], d).unwrap())
    }

    fn opts(lo: i64, hi: i64) -> InvariantOptions {
        InvariantOptions::new(Window::new(lo, hi).unwrap())
    }

    #[test]
    fn covers() {
        let a = poly(&[0], 14);
        let unit = Arc::new(BasedDGModule::unit(a.clone()));
        let c = homology_epi_cover(&unit, Window::new(0, 8).unwrap(), 2).unwrap();
        assert_eq!(c.free.rank(), 1);
        assert_eq!(c.map.matrix().get(0, 0), Some(&a.one()));
        let k = koszul(&a);
        let c = homology_epi_cover(&k, Window::new(0, 8).unwrap(), 2).unwrap();
        assert_eq!(c.free.gens()[0].degree, 0);
        assert_eq!(c.map.matrix().get(0, 0), Some(&a.one()));
        let zero = Arc::new(BasedDGModule::zero_module(a));
        assert_eq!(homology_epi_cover(&zero, Window::new(0, 8).unwrap(), 2).unwrap().free.rank(), 0);
    }

    #[test]
    fn koszul_tower() {
        let a = poly(&[0], 14);
        let k = koszul(&a);
        let o = opts(-2, 10);
        let t = ghost_tower(&k, 2, &o, false).unwrap();
        assert_eq!(t.stages.len(), 2);
        assert!(!t.stages[0].null);
        assert!(t.stages[1].null);
        for s in &t.stages {
            assert!(is_ghost(&s.ghost, o.window).unwrap());
        }
    }

    #[test]
    fn unit_module_invariants() {
        let a = poly(&[0, 0], 14);
        let unit = Arc::new(BasedDGModule::unit(a.clone()));
        let r = ghost_length(&unit, &opts(-2, 10)).unwrap();
        assert_eq!(r.value(), Some(0));
        assert_eq!(r.level(), Some(1));
        let k = koszul(&a);
        let r = ghost_length(&k, &opts(-2, 10)).unwrap();
        assert_eq!(r.value(), Some(1));
        assert_eq!(level(&k, &opts(-2, 10)).unwrap(), 2);
    }

    #[test]
    fn quasi_trivial_and_suspension() {
        let a = poly(&[0], 14);
        let unit = Arc::new(BasedDGModule::unit(a.clone()));
        let c = mapping_cone(&ModuleMap::identity(unit)).unwrap();
        let r = ghost_length(&c.module, &opts(-2, 10)).unwrap();
        assert_eq!(r.value(), Some(-1));
        assert_eq!(r.level(), Some(0));
        let k = koszul(&a);
        let sk = Arc::new(k.suspend(1));
        assert_eq!(ghost_length(&sk, &opts(-2, 10)).unwrap().value(), Some(1));
        assert_eq!(ghost_dimension(&[], &opts(-2, 10)).unwrap(), None);
        let unit = Arc::new(BasedDGModule::unit(a.clone()));
        assert_eq!(ghost_dimension(&[unit, k], &opts(-2, 10)).unwrap(), Some(1));
    }
}
