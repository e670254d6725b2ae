//! Degreewise realization of based modules as finite complexes of vector
//! spaces, cohomology with explicit representatives, induced maps, and
//! minimal cohomology generators.
//!
//! Every verdict here is relative to a [`Window`] of degrees.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{DgError, Result};
use crate::linalg::{kernel, Echelon, SparseAcc, SparseVec};
use crate::module::{BasedDGModule, DegreeLayout, ModuleElement, ModuleMap};

/// Inclusive degree range `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(DgError::InvalidParameter(format!("empty window {lo}:{hi}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn contains(&self, d: i64) -> bool {
        self.lo <= d && d <= self.hi
    }

    pub fn shift(&self, r: i64) -> Self {
        Self { lo: self.lo + r, hi: self.hi + r }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl FromStr for Window {
    type Err = DgError;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || DgError::Parse(format!("malformed window {s:?}; expected lo:hi"));
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        Window::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
    }
}

/// `M^d` and `∂^d: M^d → M^{d+1}` for `d` in the window.
#[derive(Clone, Debug)]
pub struct DegreewiseComplex {
    pub window: Window,
    layouts: BTreeMap<i64, DegreeLayout>,
    /// Columns of `∂^d`, indexed by the basis of `M^d`.
    diffs: BTreeMap<i64, Vec<SparseVec>>,
}

impl DegreewiseComplex {
    pub fn dim(&self, d: i64) -> usize {
        self.layouts.get(&d).map_or(0, |l| l.dim)
    }

    pub fn layout(&self, d: i64) -> &DegreeLayout {
        &self.layouts[&d]
    }

    pub fn diff_columns(&self, d: i64) -> &[SparseVec] {
        &self.diffs[&d]
    }

    /// `∂^{d+1}∘∂^d = 0` for every consecutive pair in the window.
    pub fn squares_to_zero(&self) -> bool {
        for d in self.window.lo..self.window.hi {
            let next = &self.diffs[&(d + 1)];
            for col in &self.diffs[&d] {
                let mut acc = SparseAcc::new();
                for (k, c) in col {
                    acc.add_scaled(c, &next[*k]);
                }
                if !acc.is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

/// Realizes `M` on the window; needs `hi + 1 - min|g| <= max_degree`.
pub fn realize(m: &BasedDGModule, window: Window) -> Result<DegreewiseComplex> {
    let alg = m.algebra();
    let mut layouts = BTreeMap::new();
    for d in window.lo..=window.hi + 1 {
        layouts.insert(d, m.layout(d)?);
    }
    let mut diffs = BTreeMap::new();
    for d in window.degrees() {
        let src = &layouts[&d];
        let tgt = &layouts[&(d + 1)];
        let mut cols = Vec::with_capacity(src.dim);
        for (j, block) in src.blocks.iter().enumerate() {
            let Some((_, e)) = *block else { continue };
            let (off_j, _) = tgt.blocks[j].expect("generator present in the next degree");
            for b in 0..alg.dim(e as i64)? {
                let mut acc = SparseAcc::new();
                for (k, c) in alg.diff_basis(e, b)? {
                    acc.add(off_j + k, c);
                }
                let sign = alg.field().sign(e as i64);
                for (i, dij) in m.differential().col(j) {
                    let (off_i, _) = tgt.blocks[*i].expect("entry degree is non-negative");
                    let mut part = SparseAcc::new();
                    for t in dij.terms() {
                        alg.mul_basis_into(e, b, t.degree, t.index, &(&sign * &t.coeff), &mut part)?;
                    }
                    for (k, c) in part.finish() {
                        acc.add(off_i + k, &c);
                    }
                }
                cols.push(acc.finish());
            }
        }
        diffs.insert(d, cols);
    }
    Ok(DegreewiseComplex { window, layouts, diffs })
}

/// Cohomology in one degree.
#[derive(Clone, Debug)]
pub struct CohomologyDegree {
    pub degree: i64,
    pub dim: usize,
    pub chain_dim: usize,
    pub cocycle_dim: usize,
    pub boundary_rank: usize,
    pub representatives: Vec<ModuleElement>,
    pub rep_coords: Vec<SparseVec>,
    layout: DegreeLayout,
    /// Boundary generators first, then representatives.
    classifier: Echelon,
    boundary_inputs: usize,
}

impl CohomologyDegree {
    pub fn layout(&self) -> &DegreeLayout {
        &self.layout
    }

    /// Coordinates of the class of a cocycle in the representative basis;
    /// `None` if `z` is not a cocycle.
    pub fn class_of(&self, z: &[(usize, crate::scalar::Scalar)]) -> Option<SparseVec> {
        let comb = self.classifier.solve(z)?;
        Some(comb.into_iter().filter(|(k, _)| *k >= self.boundary_inputs).map(|(k, c)| (k - self.boundary_inputs, c)).collect())
    }

    pub fn is_boundary(&self, z: &[(usize, crate::scalar::Scalar)]) -> bool {
        matches!(self.class_of(z), Some(v) if v.is_empty())
    }

    /// Boundary echelon of this degree (rows are coboundaries).
    pub(crate) fn boundary_vectors(&self) -> Vec<SparseVec> {
        let mut out = Vec::new();
        for i in 0..self.classifier.rank() {
            out.push(self.classifier.row(i).to_vec());
        }
        out.truncate(self.boundary_rank);
        out
    }
}

#[derive(Clone, Debug)]
pub struct CohomologyTable {
    pub window: Window,
    pub degrees: BTreeMap<i64, CohomologyDegree>,
}

impl CohomologyTable {
    pub fn dim(&self, d: i64) -> usize {
        self.degrees.get(&d).map_or(0, |c| c.dim)
    }

    pub fn dims(&self) -> Vec<(i64, usize)> {
        self.degrees.iter().map(|(d, c)| (*d, c.dim)).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.degrees.values().map(|c| c.dim).sum()
    }

    pub fn degree(&self, d: i64) -> &CohomologyDegree {
        &self.degrees[&d]
    }
}

pub fn cohomology(m: &BasedDGModule, window: Window) -> Result<CohomologyTable> {
    let field = m.field();
    let cx = realize(m, Window { lo: window.lo - 1, hi: window.hi })?;
    let mut degrees = BTreeMap::new();
    for d in window.degrees() {
        let dim = cx.dim(d);
        let boundaries = cx.diff_columns(d - 1);
        let mut classifier = Echelon::new(field, dim);
        let mut boundary_echelon = Echelon::new(field, dim);
        for b in boundaries {
            classifier.insert(b);
            boundary_echelon.insert(b);
        }
        let boundary_inputs = boundaries.len();
        let boundary_rank = classifier.rank();
        let cocycles = kernel(field, cx.dim(d + 1), cx.diff_columns(d));
        let mut representatives = Vec::new();
        let mut rep_coords = Vec::new();
        for z in &cocycles {
            if classifier.contains(z) {
                continue;
            }
            let (residual, _) = boundary_echelon.reduce(z);
            classifier.insert(&residual);
            representatives.push(m.element_from_coords(cx.layout(d), &residual));
            rep_coords.push(residual);
        }
        degrees.insert(
            d,
            CohomologyDegree {
                degree: d,
                dim: rep_coords.len(),
                chain_dim: dim,
                cocycle_dim: cocycles.len(),
                boundary_rank,
                representatives,
                rep_coords,
                layout: cx.layout(d).clone(),
                classifier,
                boundary_inputs,
            },
        );
    }
    Ok(CohomologyTable { window, degrees })
}

/// `H^d(f): H^d(M) → H^{d+r}(N)` in representative bases, as columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedMap {
    pub window: Window,
    pub degree: i64,
    pub matrices: BTreeMap<i64, Vec<SparseVec>>,
}

impl InducedMap {
    pub fn is_zero(&self) -> bool {
        self.matrices.values().all(|m| m.iter().all(|c| c.is_empty()))
    }

    pub fn rank(&self, d: i64, target_dim: usize) -> usize {
        let field = self
            .matrices
            .values()
            .flat_map(|m| m.iter())
            .find_map(|c| c.first().map(|(_, x)| x.field()))
            .unwrap_or(crate::scalar::Field::Rational);
        crate::linalg::rank(field, target_dim, &self.matrices[&d])
    }
}

pub fn induced_map_with(f: &ModuleMap, src: &CohomologyTable, tgt: &CohomologyTable) -> Result<InducedMap> {
    let r = f.degree();
    let mut matrices = BTreeMap::new();
    for d in src.window.degrees() {
        let h = src.degree(d);
        let Some(ht) = tgt.degrees.get(&(d + r)) else {
            return Err(DgError::WindowTooSmall(format!("target cohomology missing degree {}", d + r)));
        };
        let mut cols = Vec::with_capacity(h.dim);
        for z in &h.representatives {
            let fz = f.apply(z)?;
            let coords = f.target().coords(ht.layout(), &fz);
            let c = ht.class_of(&coords).ok_or_else(|| DgError::NotChainMap(format!("image of a degree-{d} cocycle is not a cocycle")))?;
            cols.push(c);
        }
        matrices.insert(d, cols);
    }
    Ok(InducedMap { window: src.window, degree: r, matrices })
}

pub fn induced_map(f: &ModuleMap, window: Window) -> Result<InducedMap> {
    let src = cohomology(f.source(), window)?;
    let tgt = cohomology(f.target(), window.shift(f.degree()))?;
    induced_map_with(f, &src, &tgt)
}

pub fn is_ghost(f: &ModuleMap, window: Window) -> Result<bool> {
    Ok(induced_map(f, window)?.is_zero())
}

pub fn is_quasi_iso(f: &ModuleMap, window: Window) -> Result<bool> {
    let src = cohomology(f.source(), window)?;
    let tgt = cohomology(f.target(), window.shift(f.degree()))?;
    let h = induced_map_with(f, &src, &tgt)?;
    for d in window.degrees() {
        let n = src.dim(d);
        let t = tgt.dim(d + f.degree());
        if n != t || h.rank(d, t) != n {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Cocycle representatives of a minimal generating set of `H(M)` as an
/// `H(A)`-module, on the window.
#[derive(Clone, Debug)]
pub struct CohomologyGenerators {
    /// `(degree, cocycle)`, in increasing degree.
    pub generators: Vec<(i64, ModuleElement)>,
    /// False when a generator appeared in the top `margin` degrees.
    pub stable: bool,
    pub window: Window,
    pub table: CohomologyTable,
}

/// The window is extended downward to the lowest generator degree so that
/// decomposables are computed from all of `H(M)` below each degree.
pub fn minimal_cohomology_generators(m: &BasedDGModule, window: Window, margin: i64) -> Result<CohomologyGenerators> {
    let alg = m.algebra();
    let field = m.field();
    let lo = m.min_degree().map_or(window.lo, |g| g.min(window.lo));
    let ext = Window { lo, hi: window.hi };
    let table = cohomology(m, ext)?;
    let mut generators = Vec::new();
    let mut stable = true;
    for d in ext.degrees() {
        let h = table.degree(d);
        if h.dim == 0 {
            continue;
        }
        let mut span = Echelon::new(field, h.chain_dim);
        for b in h.boundary_vectors() {
            span.insert(&b);
        }
        for e in 1..=(d - lo) {
            let lower = table.degree(d - e);
            if lower.dim == 0 {
                continue;
            }
            for a in alg.cocycles(e as usize)? {
                let a = crate::algebra::AlgebraElement::from_sparse(e as usize, &a);
                for r in &lower.representatives {
                    let prod = r.left_mul(alg, &a)?;
                    span.insert(&m.coords(h.layout(), &prod));
                }
            }
        }
        for (z, zc) in h.representatives.iter().zip(&h.rep_coords) {
            if span.contains(zc) {
                continue;
            }
            span.insert(zc);
            if d > window.hi - margin {
                stable = false;
            }
            generators.push((d, z.clone()));
        }
    }
    Ok(CohomologyGenerators { generators, stable, window: ext, table })
}
