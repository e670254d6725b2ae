//! Based DG modules: finitely generated graded-free modules `⊕ A·g_j` with a
//! differential matrix, maps between them, and the basic constructions.
//!
//! Conventions. `D[i][j]` holds the coefficient of `g_i` in `∂g_j`, so
//! `∂(a·g_j) = ∂a·g_j + (-1)^{|a|} a·Σ_i D[i][j]·g_i`. A map `f` of degree
//! `r` stores `f(g_j) = Σ_i f[i][j]·h_i` and acts by
//! `f(a·m) = (-1)^{r|a|} a·f(m)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{AlgebraElement, GradedAlgebra, Term};
use crate::error::{DgError, Result};
use crate::linalg::{Echelon, SparseAcc, SparseVec};
use crate::scalar::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: i64) -> Self {
        Self { name: name.into(), degree }
    }
}

/// Sparse matrix of algebra elements, stored by column.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AMatrix {
    rows: usize,
    cols: Vec<BTreeMap<usize, AlgebraElement>>,
}

impl AMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols: vec![BTreeMap::new(); cols] }
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&AlgebraElement> {
        self.cols[j].get(&i)
    }

    /// Sets an entry; zero removes it.
    pub fn set(&mut self, i: usize, j: usize, a: AlgebraElement) {
        assert!(i < self.rows, "row {i} out of range");
        if a.is_zero() {
            self.cols[j].remove(&i);
        } else {
            self.cols[j].insert(i, a);
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, a: &AlgebraElement) {
        let cur = self.cols[j].remove(&i).unwrap_or_default();
        self.set(i, j, cur.add(a));
    }

    pub fn col(&self, j: usize) -> &BTreeMap<usize, AlgebraElement> {
        &self.cols[j]
    }

    /// Nonzero entries `(row, col, entry)` in column-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &AlgebraElement)> {
        self.cols.iter().enumerate().flat_map(|(j, c)| c.iter().map(move |(i, a)| (*i, j, a)))
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }
}

/// `Σ_j a_j·g_j`, zero coefficients omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModuleElement {
    coeffs: BTreeMap<usize, AlgebraElement>,
}

impl ModuleElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn generator(alg: &GradedAlgebra, j: usize) -> Self {
        Self::single(j, alg.one())
    }

    pub fn single(j: usize, a: AlgebraElement) -> Self {
        let mut m = Self::zero();
        m.add_term(j, &a);
        m
    }

    pub fn from_column(col: &BTreeMap<usize, AlgebraElement>) -> Self {
        Self { coeffs: col.clone() }
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, AlgebraElement> {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Option<&AlgebraElement> {
        self.coeffs.get(&j)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, j: usize, a: &AlgebraElement) {
        if a.is_zero() {
            return;
        }
        let cur = self.coeffs.remove(&j).unwrap_or_default();
        let new = cur.add(a);
        if !new.is_zero() {
            self.coeffs.insert(j, new);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (j, a) in &other.coeffs {
            out.add_term(*j, a);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&other.field_or(self).from_i64(-1)))
    }

    fn field_or(&self, other: &Self) -> Field {
        self.coeffs
            .values()
            .chain(other.coeffs.values())
            .find_map(|a| a.terms().first().map(|t| t.coeff.field()))
            .unwrap_or(Field::Rational)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero();
        for (j, a) in &self.coeffs {
            out.add_term(*j, &a.scale(c));
        }
        out
    }

    /// `a·m` without any sign (plain left action).
    pub fn left_mul(&self, alg: &GradedAlgebra, a: &AlgebraElement) -> Result<Self> {
        let mut out = Self::zero();
        for (j, b) in &self.coeffs {
            out.add_term(*j, &alg.mul(a, b)?);
        }
        Ok(out)
    }
}

/// Flat coordinates of `M^d`: pairs (generator, algebra basis element),
/// generator-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeLayout {
    pub degree: i64,
    /// `(offset, algebra degree)` for each generator contributing to `M^d`.
    pub blocks: Vec<Option<(usize, usize)>>,
    pub dim: usize,
}

impl DegreeLayout {
    /// Decodes a flat index into `(generator, algebra degree, algebra index)`.
    pub fn decode(&self, k: usize, alg: &GradedAlgebra) -> (usize, usize, usize) {
        for (j, b) in self.blocks.iter().enumerate() {
            if let Some((off, e)) = b {
                let len = alg.dim(*e as i64).unwrap();
                if k >= *off && k < off + len {
                    return (j, *e, k - off);
                }
            }
        }
        panic!("flat index {k} outside degree {}", self.degree)
    }
}

/// A finitely generated graded-free DG module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasedDGModule {
    algebra: Arc<GradedAlgebra>,
    gens: Vec<Generator>,
    d: AMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleViolation {
    /// Entry `D[row][col]` is not homogeneous of degree `|g_col| + 1 - |g_row|`.
    Homogeneity {
        row: usize,
        col: usize,
        expected: i64,
    },
    /// Coefficient of `g_row` in `∂²g_col` is nonzero.
    Flatness {
        row: usize,
        col: usize,
    },
    /// Checking `∂²g_col` needs algebra degrees beyond the cap.
    BeyondCap {
        col: usize,
        needed: i64,
    },
    ForeignField {
        row: usize,
        col: usize,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModuleReport {
    pub violations: Vec<ModuleViolation>,
    pub minimal: bool,
}

impl ModuleReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub(crate) fn same_algebra(a: &Arc<GradedAlgebra>, b: &Arc<GradedAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl BasedDGModule {
    /// Builds a module; entries are not checked here, see [`Self::validate`].
    pub fn new(algebra: Arc<GradedAlgebra>, gens: Vec<Generator>, d: AMatrix) -> Result<Self> {
        if d.n_rows() != gens.len() || d.n_cols() != gens.len() {
            return Err(DgError::ShapeMismatch(format!("differential is {}x{} for {} generators", d.n_rows(), d.n_cols(), gens.len())));
        }
        Ok(Self { algebra, gens, d })
    }

    /// Free module with zero differential on generators of the given degrees.
    pub fn free(algebra: Arc<GradedAlgebra>, gens: Vec<Generator>) -> Self {
        let n = gens.len();
        Self { algebra, gens, d: AMatrix::zeros(n, n) }
    }

    pub fn zero_module(algebra: Arc<GradedAlgebra>) -> Self {
        Self::free(algebra, Vec::new())
    }

    /// The module `A` itself.
    pub fn unit(algebra: Arc<GradedAlgebra>) -> Self {
        Self::free(algebra, vec![Generator::new("e", 0)])
    }

    pub fn algebra(&self) -> &GradedAlgebra {
        &self.algebra
    }

    pub fn algebra_arc(&self) -> &Arc<GradedAlgebra> {
        &self.algebra
    }

    pub fn field(&self) -> Field {
        self.algebra.field()
    }

    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn degree(&self, j: usize) -> i64 {
        self.gens[j].degree
    }

    pub fn differential(&self) -> &AMatrix {
        &self.d
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.gens.iter().map(|g| g.degree).min()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.gens.iter().map(|g| g.degree).max()
    }

    /// Required degree of `D[i][j]`.
    pub fn entry_degree(&self, i: usize, j: usize) -> i64 {
        self.gens[j].degree + 1 - self.gens[i].degree
    }

    pub fn validate(&self) -> ModuleReport {
        let alg = &*self.algebra;
        let field = alg.field();
        let mut violations = Vec::new();
        let mut minimal = true;
        for (i, j, a) in self.d.entries() {
            let expected = self.entry_degree(i, j);
            if a.terms().iter().any(|t| t.coeff.field() != field) {
                violations.push(ModuleViolation::ForeignField { row: i, col: j });
                continue;
            }
            if expected < 0 || a.degree() != Some(expected as usize) {
                violations.push(ModuleViolation::Homogeneity { row: i, col: j, expected });
                continue;
            }
            if expected == 0 {
                minimal = false;
            }
        }
        if !violations.is_empty() {
            return ModuleReport { violations, minimal };
        }
        for j in 0..self.rank() {
            let col = ModuleElement::from_column(self.d.col(j));
            match self.diff_element(&col) {
                Ok(dd) => {
                    for k in dd.coeffs().keys() {
                        violations.push(ModuleViolation::Flatness { row: *k, col: j });
                    }
                }
                Err(DgError::CapExceeded { needed, .. }) => {
                    violations.push(ModuleViolation::BeyondCap { col: j, needed });
                }
                Err(e) => panic!("unexpected error while validating: {e}"),
            }
        }
        ModuleReport { violations, minimal }
    }

    pub fn is_minimal(&self) -> bool {
        self.d.entries().all(|(_, _, a)| a.in_augmentation_ideal())
    }

    /// `∂m`.
    pub fn diff_element(&self, m: &ModuleElement) -> Result<ModuleElement> {
        let alg = &*self.algebra;
        let mut out = ModuleElement::zero();
        for (j, a) in m.coeffs() {
            out.add_term(*j, &alg.diff(a)?);
            for t in a.terms() {
                let ta = AlgebraElement::basis(t.degree, t.index, t.coeff.clone().signed(t.degree as i64));
                for (i, dij) in self.d.col(*j) {
                    out.add_term(*i, &alg.mul(&ta, dij)?);
                }
            }
        }
        Ok(out)
    }

    /// Coordinate layout of `M^d`.
    pub fn layout(&self, d: i64) -> Result<DegreeLayout> {
        let alg = &*self.algebra;
        let mut blocks = Vec::with_capacity(self.rank());
        let mut off = 0;
        for g in &self.gens {
            let e = d - g.degree;
            if e < 0 {
                blocks.push(None);
                continue;
            }
            let len = alg.dim(e)?;
            blocks.push(Some((off, e as usize)));
            off += len;
        }
        Ok(DegreeLayout { degree: d, blocks, dim: off })
    }

    /// Coordinates of the degree-`layout.degree` part of `m`.
    pub fn coords(&self, layout: &DegreeLayout, m: &ModuleElement) -> SparseVec {
        let mut out = Vec::new();
        for (j, a) in m.coeffs() {
            if let Some((off, e)) = layout.blocks[*j] {
                for t in a.terms() {
                    if t.degree == e {
                        out.push((off + t.index, t.coeff.clone()));
                    }
                }
            }
        }
        out.sort_by_key(|(k, _)| *k);
        out
    }

    pub fn element_from_coords(&self, layout: &DegreeLayout, v: &[(usize, Scalar)]) -> ModuleElement {
        let alg = &*self.algebra;
        let mut per_gen: BTreeMap<usize, Vec<Term>> = BTreeMap::new();
        for (k, c) in v {
            let (j, e, idx) = layout.decode(*k, alg);
            per_gen.entry(j).or_default().push(Term { degree: e, index: idx, coeff: c.clone() });
        }
        let mut out = ModuleElement::zero();
        for (j, terms) in per_gen {
            out.add_term(j, &AlgebraElement::from_terms(terms));
        }
        out
    }

    /// Total degree of a homogeneous element, `None` for zero or mixed.
    pub fn element_degree(&self, m: &ModuleElement) -> Option<i64> {
        let mut deg = None;
        for (j, a) in m.coeffs() {
            for t in a.terms() {
                let d = t.degree as i64 + self.gens[*j].degree;
                match deg {
                    None => deg = Some(d),
                    Some(x) if x != d => return None,
                    _ => {}
                }
            }
        }
        deg
    }

    pub fn generator_element(&self, j: usize) -> ModuleElement {
        ModuleElement::generator(&self.algebra, j)
    }

    /// `Σ^i M`: generator degrees drop by `i`, entries pick up
    /// `(-1)^{i(1 + |D[k][j]|)}`.
    pub fn suspend(&self, i: i64) -> Self {
        let gens = self.gens.iter().map(|g| Generator::new(g.name.clone(), g.degree - i)).collect();
        let mut d = AMatrix::zeros(self.rank(), self.rank());
        for (k, j, a) in self.d.entries() {
            let e = self.entry_degree(k, j);
            d.set(k, j, a.scale(&self.field().sign(i * (1 + e))));
        }
        Self { algebra: self.algebra.clone(), gens, d }
    }

    /// Keeps the listed generators (in the given order) and the entries among them.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let gens = keep.iter().map(|&j| self.gens[j].clone()).collect();
        let mut d = AMatrix::zeros(keep.len(), keep.len());
        for (i, j, a) in self.d.entries() {
            if let (Some(&pi), Some(&pj)) = (pos.get(&i), pos.get(&j)) {
                d.set(pi, pj, a.clone());
            }
        }
        Self { algebra: self.algebra.clone(), gens, d }
    }

    /// Appends primes to generator names already used earlier in the list.
    pub fn with_distinct_names(mut self) -> Self {
        distinct_names(&mut self.gens);
        self
    }

    pub fn with_names(mut self, names: impl IntoIterator<Item = String>) -> Self {
        for (g, n) in self.gens.iter_mut().zip(names) {
            g.name = n;
        }
        self
    }
}

fn distinct_names(gens: &mut [Generator]) {
    let mut seen = std::collections::BTreeSet::new();
    for g in gens {
        while !seen.insert(g.name.clone()) {
            g.name.push('\'');
        }
    }
}

/// A degree-`r` A-linear map between based modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap {
    source: Arc<BasedDGModule>,
    target: Arc<BasedDGModule>,
    degree: i64,
    m: AMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapViolation {
    Homogeneity { row: usize, col: usize, expected: i64 },
    NotChainMap { col: usize },
}

impl ModuleMap {
    pub fn new(source: Arc<BasedDGModule>, target: Arc<BasedDGModule>, degree: i64, m: AMatrix) -> Result<Self> {
        if !same_algebra(&source.algebra, &target.algebra) {
            return Err(DgError::ShapeMismatch("source and target live over different algebras".into()));
        }
        if m.n_rows() != target.rank() || m.n_cols() != source.rank() {
            return Err(DgError::ShapeMismatch(format!(
                "map matrix is {}x{}, expected {}x{}",
                m.n_rows(),
                m.n_cols(),
                target.rank(),
                source.rank()
            )));
        }
        Ok(Self { source, target, degree, m })
    }

    pub fn zero(source: Arc<BasedDGModule>, target: Arc<BasedDGModule>, degree: i64) -> Self {
        let m = AMatrix::zeros(target.rank(), source.rank());
        Self { source, target, degree, m }
    }

    pub fn identity(m: Arc<BasedDGModule>) -> Self {
        let n = m.rank();
        let mut mat = AMatrix::zeros(n, n);
        for j in 0..n {
            mat.set(j, j, m.algebra.one());
        }
        Self { source: m.clone(), target: m, degree: 0, m: mat }
    }

    pub fn source(&self) -> &Arc<BasedDGModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<BasedDGModule> {
        &self.target
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn matrix(&self) -> &AMatrix {
        &self.m
    }

    pub fn entry_degree(&self, i: usize, j: usize) -> i64 {
        self.source.degree(j) + self.degree - self.target.degree(i)
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    /// Value on the generator `g_j`.
    pub fn on_generator(&self, j: usize) -> ModuleElement {
        ModuleElement::from_column(self.m.col(j))
    }

    pub fn apply(&self, x: &ModuleElement) -> Result<ModuleElement> {
        let alg = self.source.algebra();
        let mut out = ModuleElement::zero();
        for (j, a) in x.coeffs() {
            for t in a.terms() {
                let ta = AlgebraElement::basis(t.degree, t.index, t.coeff.clone().signed(self.degree * t.degree as i64));
                for (i, fij) in self.m.col(*j) {
                    out.add_term(*i, &alg.mul(&ta, fij)?);
                }
            }
        }
        Ok(out)
    }

    /// Checks entry homogeneity and, when `chain` is set, `∂_Hom f = 0`.
    pub fn validate(&self, chain: bool) -> Result<Vec<MapViolation>> {
        let mut out = Vec::new();
        for (i, j, a) in self.m.entries() {
            let expected = self.entry_degree(i, j);
            if expected < 0 || a.degree() != Some(expected as usize) {
                out.push(MapViolation::Homogeneity { row: i, col: j, expected });
            }
        }
        if chain && out.is_empty() {
            let dh = self.d_hom()?;
            for j in 0..self.source.rank() {
                if !dh.m.col(j).is_empty() {
                    out.push(MapViolation::NotChainMap { col: j });
                }
            }
        }
        Ok(out)
    }

    /// `∂_Hom f = ∂_N∘f - (-1)^r f∘∂_M`, a map of degree `r + 1`.
    pub fn d_hom(&self) -> Result<ModuleMap> {
        let n = self.source.rank();
        let mut mat = AMatrix::zeros(self.target.rank(), n);
        let sign = self.source.field().sign(self.degree + 1);
        for j in 0..n {
            let a = self.target.diff_element(&self.on_generator(j))?;
            let b = self.apply(&self.source.diff_element(&self.source.generator_element(j))?)?;
            let v = a.add(&b.scale(&sign));
            for (i, e) in v.coeffs() {
                mat.set(*i, j, e.clone());
            }
        }
        Ok(ModuleMap { source: self.source.clone(), target: self.target.clone(), degree: self.degree + 1, m: mat })
    }

    pub fn is_chain_map(&self) -> Result<bool> {
        Ok(self.d_hom()?.is_zero())
    }

    /// `g∘f`.
    pub fn compose(g: &ModuleMap, f: &ModuleMap) -> Result<ModuleMap> {
        if *f.target != *g.source {
            return Err(DgError::ShapeMismatch("target of the first map is not the source of the second".into()));
        }
        let mut mat = AMatrix::zeros(g.target.rank(), f.source.rank());
        for j in 0..f.source.rank() {
            let v = g.apply(&f.on_generator(j))?;
            for (i, e) in v.coeffs() {
                mat.set(*i, j, e.clone());
            }
        }
        Ok(ModuleMap { source: f.source.clone(), target: g.target.clone(), degree: f.degree + g.degree, m: mat })
    }

    pub fn add(&self, other: &ModuleMap) -> Result<ModuleMap> {
        self.combine(other, &self.source.field().one())
    }

    pub fn sub(&self, other: &ModuleMap) -> Result<ModuleMap> {
        self.combine(other, &self.source.field().from_i64(-1))
    }

    fn combine(&self, other: &ModuleMap, c: &Scalar) -> Result<ModuleMap> {
        if self.degree != other.degree || *self.source != *other.source || *self.target != *other.target {
            return Err(DgError::ShapeMismatch("maps differ in source, target or degree".into()));
        }
        let mut m = self.m.clone();
        for (i, j, a) in other.m.entries() {
            m.add_to(i, j, &a.scale(c));
        }
        Ok(ModuleMap { m, ..self.clone() })
    }

    pub fn scale(&self, c: &Scalar) -> ModuleMap {
        let mut m = AMatrix::zeros(self.m.n_rows(), self.m.n_cols());
        for (i, j, a) in self.m.entries() {
            m.set(i, j, a.scale(c));
        }
        ModuleMap { m, ..self.clone() }
    }

    /// Same matrix, reinterpreted between other (structurally equal-ranked) modules.
    pub fn retarget(&self, source: Arc<BasedDGModule>, target: Arc<BasedDGModule>) -> Result<ModuleMap> {
        ModuleMap::new(source, target, self.degree, self.m.clone())
    }

    /// Checks `self - other = ∂σ + σ∂` for a degree `r - 1` map `σ`
    /// (`∂_Hom σ` in general degree).
    pub fn is_homotopy(&self, other: &ModuleMap, sigma: &ModuleMap) -> Result<bool> {
        let diff = self.sub(other)?;
        if sigma.degree != self.degree - 1 {
            return Ok(false);
        }
        let dh = sigma.d_hom()?;
        Ok(dh.m == diff.m)
    }
}

/// Inverse of a degree-0 self-map `φ = S + N` whose scalar part `S` is
/// invertible: `φ^{-1} = Σ_k (-S^{-1}N)^k S^{-1}` (the sum is finite because
/// `N` raises algebra degree).
pub fn invert_automorphism(phi: &ModuleMap) -> Result<ModuleMap> {
    let m = phi.source.clone();
    if phi.degree != 0 || *phi.target != *m {
        return Err(DgError::ShapeMismatch("only degree-0 self-maps can be inverted".into()));
    }
    let field = m.field();
    let alg = m.algebra();
    let n = m.rank();
    let mut scalar = AMatrix::zeros(n, n);
    let mut ech = Echelon::new(field, n);
    for j in 0..n {
        let mut col = Vec::new();
        for (i, a) in phi.m.col(j) {
            if phi.entry_degree(*i, j) == 0 {
                scalar.set(*i, j, a.clone());
                col.push((*i, a.degree_zero_part().unwrap().clone()));
            }
        }
        ech.insert(&col);
    }
    if ech.rank() < n {
        return Err(DgError::InvalidParameter("scalar part of the map is singular".into()));
    }
    let mut sinv = AMatrix::zeros(n, n);
    for i in 0..n {
        let comb = ech.solve(&[(i, field.one())]).unwrap();
        for (j, c) in comb {
            sinv.set(j, i, alg.scalar(c));
        }
    }
    let sinv = ModuleMap { source: m.clone(), target: m.clone(), degree: 0, m: sinv };
    let s = ModuleMap { source: m.clone(), target: m.clone(), degree: 0, m: scalar };
    let neg_t = ModuleMap::compose(&sinv, &phi.sub(&s)?)?.scale(&field.from_i64(-1));
    let mut term = ModuleMap::identity(m.clone());
    let mut total = term.clone();
    let span = (m.max_degree().unwrap_or(0) - m.min_degree().unwrap_or(0)) as usize;
    for _ in 0..=(n + span + 1) {
        term = ModuleMap::compose(&neg_t, &term)?;
        if term.is_zero() {
            let inv = ModuleMap::compose(&total, &sinv)?;
            if ModuleMap::compose(phi, &inv)? != ModuleMap::identity(m.clone()) {
                return Err(DgError::Internal("automorphism inverse failed verification".into()));
            }
            return Ok(inv);
        }
        total = total.add(&term)?;
    }
    Err(DgError::InvalidParameter("non-scalar part of the map is not nilpotent".into()))
}

/// `M ⊕ N` with inclusions and projections.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub module: Arc<BasedDGModule>,
    pub inc: [ModuleMap; 2],
    pub proj: [ModuleMap; 2],
}

pub fn direct_sum(m: &Arc<BasedDGModule>, n: &Arc<BasedDGModule>) -> Result<DirectSum> {
    if !same_algebra(&m.algebra, &n.algebra) {
        return Err(DgError::ShapeMismatch("summands live over different algebras".into()));
    }
    let (a, b) = (m.rank(), n.rank());
    let mut gens = m.gens.clone();
    gens.extend(n.gens.iter().cloned());
    let mut d = AMatrix::zeros(a + b, a + b);
    for (i, j, e) in m.d.entries() {
        d.set(i, j, e.clone());
    }
    for (i, j, e) in n.d.entries() {
        d.set(a + i, a + j, e.clone());
    }
    distinct_names(&mut gens);
    let sum = Arc::new(BasedDGModule { algebra: m.algebra.clone(), gens, d });
    let one = m.algebra.one();
    let block = |rows: usize, cols: usize, off_r: usize, off_c: usize, k: usize| {
        let mut mat = AMatrix::zeros(rows, cols);
        for t in 0..k {
            mat.set(off_r + t, off_c + t, one.clone());
        }
        mat
    };
    let inc = [
        ModuleMap::new(m.clone(), sum.clone(), 0, block(a + b, a, 0, 0, a))?,
        ModuleMap::new(n.clone(), sum.clone(), 0, block(a + b, b, a, 0, b))?,
    ];
    let proj = [
        ModuleMap::new(sum.clone(), m.clone(), 0, block(a, a + b, 0, 0, a))?,
        ModuleMap::new(sum.clone(), n.clone(), 0, block(b, a + b, 0, a, b))?,
    ];
    Ok(DirectSum { module: sum, inc, proj })
}

/// Mapping cone of a degree-0 chain map `f: M → N`.
#[derive(Clone, Debug)]
pub struct Cone {
    pub module: Arc<BasedDGModule>,
    /// `N → cone(f)`.
    pub iota: ModuleMap,
    /// `cone(f) → ΣM`.
    pub pi: ModuleMap,
    pub suspended_source: Arc<BasedDGModule>,
}

/// Generators are those of `N` followed by `Σg_j`; the differential is
/// `∂(n, Σm) = (f(m) + ∂n, -Σ∂m)`.
pub fn mapping_cone(f: &ModuleMap) -> Result<Cone> {
    if f.degree != 0 {
        return Err(DgError::InvalidParameter(format!("cone of a map of degree {}", f.degree)));
    }
    if !f.is_chain_map()? {
        return Err(DgError::NotChainMap("mapping cone input".into()));
    }
    let (mm, nn) = (&f.source, &f.target);
    let field = mm.field();
    let (a, b) = (nn.rank(), mm.rank());
    let mut gens = nn.gens.clone();
    gens.extend(mm.gens.iter().map(|g| Generator::new(format!("s{}", g.name), g.degree - 1)));
    let mut d = AMatrix::zeros(a + b, a + b);
    for (i, j, e) in nn.d.entries() {
        d.set(i, j, e.clone());
    }
    for (i, j, e) in f.m.entries() {
        d.set(i, a + j, e.clone());
    }
    for (k, j, e) in mm.d.entries() {
        let deg = mm.entry_degree(k, j);
        d.set(a + k, a + j, e.scale(&field.sign(deg + 1)));
    }
    distinct_names(&mut gens);
    let cone = Arc::new(BasedDGModule { algebra: mm.algebra.clone(), gens, d });
    let report = cone.validate();
    if !report.is_valid() {
        return Err(DgError::SignCheckFailed(format!("{:?}", report.violations)));
    }
    let one = mm.algebra.one();
    let mut iota = AMatrix::zeros(a + b, a);
    for t in 0..a {
        iota.set(t, t, one.clone());
    }
    let sm = Arc::new(mm.suspend(1));
    let mut pi = AMatrix::zeros(b, a + b);
    for t in 0..b {
        pi.set(t, a + t, one.clone());
    }
    let iota = ModuleMap::new(nn.clone(), cone.clone(), 0, iota)?;
    let pi = ModuleMap::new(cone.clone(), sm.clone(), 0, pi)?;
    Ok(Cone { module: cone, iota, pi, suspended_source: sm })
}

/// Solves `f = ∂σ - (-1)^{r-1} σ∂` exactly for `σ` of degree `r - 1`.
/// Returns `None` when `f` is not null-homotopic.
pub fn null_homotopy(f: &ModuleMap) -> Result<Option<ModuleMap>> {
    let (mm, nn) = (&f.source, &f.target);
    let alg = mm.algebra();
    let field = alg.field();
    let r = f.degree;
    if mm.rank() == 0 || nn.rank() == 0 {
        return if f.is_zero() { Ok(Some(ModuleMap::zero(mm.clone(), nn.clone(), r - 1))) } else { Ok(None) };
    }
    let need = mm.max_degree().unwrap() + r - nn.min_degree().unwrap();
    alg.check_degree(need)?;
    // Unknown and equation blocks, one per source generator.
    let mut unk_layouts = Vec::with_capacity(mm.rank());
    let mut eq_layouts = Vec::with_capacity(mm.rank());
    let mut unk_off = vec![0usize];
    let mut eq_off = vec![0usize];
    for j in 0..mm.rank() {
        let lu = nn.layout(mm.degree(j) + r - 1)?;
        let le = nn.layout(mm.degree(j) + r)?;
        unk_off.push(unk_off[j] + lu.dim);
        eq_off.push(eq_off[j] + le.dim);
        unk_layouts.push(lu);
        eq_layouts.push(le);
    }
    let total_eq = eq_off[mm.rank()];
    // sign of σ∂ inside ∂_Hom σ, and of σ passing a coefficient of degree e
    let outer = field.sign(r);
    let mut ech = Echelon::new(field, total_eq);
    let mut unknowns = Vec::new();
    for j in 0..mm.rank() {
        for k in 0..unk_layouts[j].dim {
            let x = nn.element_from_coords(&unk_layouts[j], &[(k, field.one())]);
            let mut col = SparseAcc::new();
            let dx = nn.diff_element(&x)?;
            for (p, c) in nn.coords(&eq_layouts[j], &dx) {
                col.add(eq_off[j] + p, &c);
            }
            // σ(g_j) = x contributes to every column l with D[j][l] ≠ 0
            for l in 0..mm.rank() {
                let Some(djl) = mm.d.get(j, l) else { continue };
                let e = mm.entry_degree(j, l);
                let coef = djl.scale(&(&outer * &field.sign((r - 1) * e)));
                let y = x.left_mul(alg, &coef)?;
                for (p, c) in nn.coords(&eq_layouts[l], &y) {
                    col.add(eq_off[l] + p, &c);
                }
            }
            ech.insert(&col.finish());
            unknowns.push((j, k));
        }
    }
    let mut rhs = Vec::new();
    for j in 0..mm.rank() {
        for (p, c) in nn.coords(&eq_layouts[j], &f.on_generator(j)) {
            rhs.push((eq_off[j] + p, c));
        }
    }
    let Some(sol) = ech.solve(&rhs) else { return Ok(None) };
    let mut sigma = AMatrix::zeros(nn.rank(), mm.rank());
    let mut per_col: BTreeMap<usize, SparseVec> = BTreeMap::new();
    for (u, c) in sol {
        let (j, k) = unknowns[u];
        per_col.entry(j).or_default().push((k, c));
    }
    for (j, v) in per_col {
        let x = nn.element_from_coords(&unk_layouts[j], &v);
        for (i, a) in x.coeffs() {
            sigma.set(*i, j, a.clone());
        }
    }
    let sigma = ModuleMap::new(mm.clone(), nn.clone(), r - 1, sigma)?;
    let zero = ModuleMap::zero(mm.clone(), nn.clone(), r);
    if !f.is_homotopy(&zero, &sigma)? {
        return Err(DgError::Internal("null-homotopy failed re-verification".into()));
    }
    Ok(Some(sigma))
}
