//! Free bases of graded summands, splitting of semi-projective and
//! categorically projective summands, and cone presentations of semi-free
//! extensions.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::algebra::{AlgebraElement, Term};
use crate::error::{DgError, Result};
use crate::filtration::{cancel_step, find_filtration, next_pivot, SemifreeFiltration};
use crate::homology::Window;
use crate::linalg::{Echelon, Inserted, SparseVec};
use crate::module::{mapping_cone, AMatrix, BasedDGModule, Cone, Generator, ModuleElement, ModuleMap};

/// A degree-0 idempotent endomorphism, checked exactly on construction.
#[derive(Clone, Debug)]
pub struct Projector {
    map: ModuleMap,
    chain: bool,
}

impl Projector {
    /// Idempotent chain map.
    pub fn new(map: ModuleMap) -> Result<Self> {
        let p = Self::graded(map)?;
        if !p.chain {
            return Err(DgError::NotChainMap("projector does not commute with the differential".into()));
        }
        Ok(p)
    }

    /// Idempotent graded map; the chain condition is recorded, not required.
    pub fn graded(map: ModuleMap) -> Result<Self> {
        if map.degree() != 0 || map.source() != map.target() {
            return Err(DgError::ShapeMismatch("a projector is a degree-0 endomorphism".into()));
        }
        if ModuleMap::compose(&map, &map)? != map {
            return Err(DgError::NotIdempotent("π∘π differs from π".into()));
        }
        let chain = map.is_chain_map()?;
        Ok(Self { map, chain })
    }

    pub fn map(&self) -> &ModuleMap {
        &self.map
    }

    pub fn module(&self) -> &Arc<BasedDGModule> {
        self.map.source()
    }

    pub fn is_chain_map(&self) -> bool {
        self.chain
    }
}

fn restrict_element(x: &ModuleElement, keep: &BTreeSet<usize>) -> ModuleElement {
    let mut out = ModuleElement::zero();
    for (j, a) in x.coeffs() {
        if keep.contains(j) {
            out.add_term(*j, a);
        }
    }
    out
}

fn basis_elements(m: &BasedDGModule, d: i64, keep: Option<&BTreeSet<usize>>) -> Result<Vec<ModuleElement>> {
    let alg = m.algebra();
    let mut out = Vec::new();
    for j in 0..m.rank() {
        if keep.is_some_and(|k| !k.contains(&j)) {
            continue;
        }
        let e = d - m.degree(j);
        if e < 0 {
            continue;
        }
        for idx in 0..alg.dim(e)? {
            let a = AlgebraElement::basis(e as usize, idx, m.field().one());
            out.push(ModuleElement::single(j, a));
        }
    }
    Ok(out)
}

/// Homogeneous elements of a summand forming a free basis, with the
/// generator each one was projected from.
#[derive(Clone, Debug)]
pub struct FreeBasis {
    pub elements: Vec<ModuleElement>,
    pub degrees: Vec<i64>,
    pub sources: Vec<usize>,
    /// `(degree, rank of the layer image, rank of the free span)` per window degree.
    pub checks: Vec<(i64, usize, usize)>,
}

/// Free basis of the image of `π` in the quotient of `F` spanned by the
/// generators in `layer` (all generators when `layer` is `None`).
///
/// The basis is `π(g_j)` for the generators whose scalar columns are
/// independent modulo `m`, scanned lowest degree first; each element is
/// normalized to leading scalar coefficient 1. The result is verified on every
/// window degree: the free span injects and equals the layer image of `π`.
pub fn extract_free_basis(pi: &Projector, layer: Option<&[usize]>, window: Window) -> Result<FreeBasis> {
    let f = pi.module();
    let alg = f.algebra();
    let field = f.field();
    let layer: BTreeSet<usize> = match layer {
        Some(l) => l.iter().copied().collect(),
        None => (0..f.rank()).collect(),
    };
    if layer.is_empty() {
        return Ok(FreeBasis { elements: vec![], degrees: vec![], sources: vec![], checks: vec![] });
    }
    let lo = layer.iter().map(|&j| f.degree(j)).min().unwrap();
    let hi = layer.iter().map(|&j| f.degree(j)).max().unwrap();
    if window.lo > lo || window.hi < hi {
        return Err(DgError::WindowTooSmall(format!("window {window} must cover the generator degrees {lo}:{hi} of the layer")));
    }
    let mut order: Vec<usize> = layer.iter().copied().collect();
    order.sort_by_key(|&j| (f.degree(j), j));
    let mut ech = Echelon::new(field, f.rank());
    let mut basis = FreeBasis { elements: vec![], degrees: vec![], sources: vec![], checks: vec![] };
    for j in order {
        let col: SparseVec = pi
            .map()
            .matrix()
            .col(j)
            .iter()
            .filter(|(i, _)| layer.contains(i) && f.degree(**i) == f.degree(j))
            .filter_map(|(i, a)| a.degree_zero_part().map(|c| (*i, c.clone())))
            .collect();
        if col.is_empty() {
            continue;
        }
        if let Inserted::Independent(_) = ech.insert(&col) {
            let lead = col[0].1.inv().unwrap();
            let w = pi.map().on_generator(j).scale(&lead);
            basis.elements.push(w);
            basis.degrees.push(f.degree(j));
            basis.sources.push(j);
        }
    }
    for d in window.degrees() {
        let layout = f.layout(d)?;
        let mut image = Echelon::new(field, layout.dim);
        for x in basis_elements(f, d, Some(&layer))? {
            let y = restrict_element(&pi.map().apply(&x)?, &layer);
            image.insert(&f.coords(&layout, &y));
        }
        let mut span = Echelon::new(field, layout.dim);
        let mut count = 0;
        for (w, &dw) in basis.elements.iter().zip(&basis.degrees) {
            let e = d - dw;
            if e < 0 {
                continue;
            }
            for idx in 0..alg.dim(e)? {
                let a = AlgebraElement::basis(e as usize, idx, field.one());
                let y = restrict_element(&w.left_mul(alg, &a)?, &layer);
                let v = f.coords(&layout, &y);
                if !image.contains(&v) {
                    return Err(DgError::NotProjective(format!("basis element leaves the image of π in degree {d}")));
                }
                span.insert(&v);
                count += 1;
            }
        }
        if span.rank() != count {
            return Err(DgError::NotProjective(format!("extracted elements are A-dependent in degree {d}")));
        }
        if span.rank() != image.rank() {
            return Err(DgError::NotProjective(format!("extracted elements miss part of the image in degree {d}")));
        }
        basis.checks.push((d, image.rank(), span.rank()));
    }
    Ok(basis)
}

/// Echelon of one degree plus, per inserted vector, `(basis element, algebra degree, algebra basis index)`.
type DegreeEchelon = (Echelon, Vec<(usize, usize, usize)>);

/// Solves `x = Σ a_λ ω_λ` degreewise with cached eliminations.
struct Expresser<'a> {
    f: &'a BasedDGModule,
    basis: &'a [ModuleElement],
    degrees: &'a [i64],
    cache: BTreeMap<i64, DegreeEchelon>,
}

impl<'a> Expresser<'a> {
    fn new(f: &'a BasedDGModule, basis: &'a [ModuleElement], degrees: &'a [i64]) -> Self {
        Self { f, basis, degrees, cache: BTreeMap::new() }
    }

    fn express(&mut self, x: &ModuleElement, d: i64) -> Result<Option<Vec<AlgebraElement>>> {
        let f = self.f;
        let alg = f.algebra();
        let field = f.field();
        if !self.cache.contains_key(&d) {
            let layout = f.layout(d)?;
            let mut ech = Echelon::new(field, layout.dim);
            let mut index = Vec::new();
            for (l, (w, &dw)) in self.basis.iter().zip(self.degrees).enumerate() {
                let e = d - dw;
                if e < 0 {
                    continue;
                }
                for idx in 0..alg.dim(e)? {
                    let a = AlgebraElement::basis(e as usize, idx, field.one());
                    ech.insert(&f.coords(&layout, &w.left_mul(alg, &a)?));
                    index.push((l, e as usize, idx));
                }
            }
            self.cache.insert(d, (ech, index));
        }
        let layout = f.layout(d)?;
        let (ech, index) = &self.cache[&d];
        let Some(comb) = ech.solve(&f.coords(&layout, x)) else { return Ok(None) };
        let mut terms: Vec<Vec<Term>> = vec![Vec::new(); self.basis.len()];
        for (k, c) in comb {
            let (l, e, idx) = index[k];
            terms[l].push(Term { degree: e, index: idx, coeff: c });
        }
        Ok(Some(terms.into_iter().map(AlgebraElement::from_terms).collect()))
    }
}

/// `P` with basis `ω`, the inclusion `P → F` and `proj: F → P` with
/// `proj∘inc = id` and `inc∘proj = π`.
fn based_summand(
    pi: &Projector,
    names: Vec<String>,
    basis: &[ModuleElement],
    degrees: &[i64],
) -> Result<(Arc<BasedDGModule>, ModuleMap, ModuleMap)> {
    let f = pi.module();
    let n = basis.len();
    let mut ex = Expresser::new(f, basis, degrees);
    let mut d = AMatrix::zeros(n, n);
    for (l, w) in basis.iter().enumerate() {
        let dw = f.diff_element(w)?;
        let coeffs = ex
            .express(&dw, degrees[l] + 1)?
            .ok_or_else(|| DgError::ExpressionFailure(format!("∂{} is not in the span of the basis", names[l])))?;
        for (i, a) in coeffs.into_iter().enumerate() {
            d.set(i, l, a);
        }
    }
    let gens = names.into_iter().zip(degrees).map(|(s, &deg)| Generator::new(s, deg)).collect();
    let p = Arc::new(BasedDGModule::new(f.algebra_arc().clone(), gens, d)?);
    let report = p.validate();
    if !report.is_valid() {
        return Err(DgError::Internal(format!("summand failed validation: {:?}", report.violations)));
    }
    let mut inc = AMatrix::zeros(f.rank(), n);
    for (l, w) in basis.iter().enumerate() {
        for (i, a) in w.coeffs() {
            inc.set(*i, l, a.clone());
        }
    }
    let inc = ModuleMap::new(p.clone(), f.clone(), 0, inc)?;
    let mut proj = AMatrix::zeros(n, f.rank());
    for j in 0..f.rank() {
        let y = pi.map().on_generator(j);
        let coeffs = ex
            .express(&y, f.degree(j))?
            .ok_or_else(|| DgError::ExpressionFailure(format!("π({}) is not in the span of the basis", f.gens()[j].name)))?;
        for (i, a) in coeffs.into_iter().enumerate() {
            proj.set(i, j, a);
        }
    }
    let proj = ModuleMap::new(f.clone(), p.clone(), 0, proj)?;
    if !inc.is_chain_map()? || !proj.is_chain_map()? {
        return Err(DgError::Internal("summand inclusion or projection is not a chain map".into()));
    }
    if ModuleMap::compose(&proj, &inc)? != ModuleMap::identity(p.clone()) {
        return Err(DgError::Internal("proj∘inc differs from the identity".into()));
    }
    if &ModuleMap::compose(&inc, &proj)? != pi.map() {
        return Err(DgError::Internal("inc∘proj differs from π".into()));
    }
    Ok((p, inc, proj))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerRecord {
    pub level: usize,
    pub rank: usize,
    pub dropped: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitMethod {
    /// Layer by layer along a filtration of `F` preserved by `π`.
    Layered,
    /// `π` moves the filtration: one free basis for all of `P`, then the
    /// longest-path filtration of the result.
    Global,
}

#[derive(Clone, Debug)]
pub struct SplitResult {
    pub module: Arc<BasedDGModule>,
    pub filtration: SemifreeFiltration,
    /// `P → F`.
    pub inc: ModuleMap,
    /// `F → P`.
    pub proj: ModuleMap,
    pub layers: Vec<LayerRecord>,
    pub method: SplitMethod,
    /// Per-degree verification of each extracted basis: `(level, degree, image rank)`.
    pub checks: Vec<(usize, i64, usize)>,
}

fn preserves_levels(pi: &ModuleMap, levels: &[usize]) -> bool {
    pi.matrix().entries().all(|(i, j, _)| levels[i] <= levels[j])
}

/// Splits the image of an idempotent chain map on a semi-free `F` as a
/// semi-free module. With a filtration given (or the longest-path one of `F`)
/// that `π` preserves, the `r`-th layer of `P` is the free module on
/// `π(level-r generators)` modulo lower layers; empty layers are dropped.
pub fn split_semiprojective(pi: &Projector, filtration: Option<&SemifreeFiltration>, window: Window) -> Result<SplitResult> {
    let f = pi.module();
    if !pi.is_chain_map() {
        return Err(DgError::NotChainMap("split needs a chain projector".into()));
    }
    let filt = match filtration {
        Some(fl) if fl.is_valid_for(f) => fl.clone(),
        Some(_) => return Err(DgError::Validation("filtration does not match the module".into())),
        None => find_filtration(f).map_err(|cycle| {
            DgError::NotFilterable(format!("generator cycle {:?}", cycle.iter().map(|&j| &f.gens()[j].name).collect::<Vec<_>>()))
        })?,
    };
    if !preserves_levels(pi.map(), &filt.levels) {
        return split_global(pi, window);
    }
    let t = filt.length().max(0) as usize;
    let mut elements = Vec::new();
    let mut degrees = Vec::new();
    let mut names = Vec::new();
    let mut raw_levels = Vec::new();
    let mut layers = Vec::new();
    let mut checks = Vec::new();
    for r in 0..=t {
        let layer: Vec<usize> = (0..f.rank()).filter(|&j| filt.levels[j] == r).collect();
        let fb = extract_free_basis(pi, Some(&layer), window)?;
        layers.push(LayerRecord { level: r, rank: fb.elements.len(), dropped: fb.elements.is_empty() });
        checks.extend(fb.checks.iter().map(|&(d, rk, _)| (r, d, rk)));
        for (k, (w, d)) in fb.elements.into_iter().zip(fb.degrees).enumerate() {
            names.push(format!("w{r}_{k}"));
            elements.push(w);
            degrees.push(d);
            raw_levels.push(r);
        }
    }
    let (p, inc, proj) = based_summand(pi, names, &elements, &degrees)?;
    let kept: Vec<usize> = layers.iter().filter(|l| !l.dropped).map(|l| l.level).collect();
    let levels = raw_levels.iter().map(|r| kept.iter().position(|k| k == r).unwrap()).collect();
    let filtration = SemifreeFiltration { levels };
    if !filtration.is_valid_for(&p) {
        return Err(DgError::ExpressionFailure("a layer differential does not land in lower layers".into()));
    }
    Ok(SplitResult { module: p, filtration, inc, proj, layers, method: SplitMethod::Layered, checks })
}

fn split_global(pi: &Projector, window: Window) -> Result<SplitResult> {
    let fb = extract_free_basis(pi, None, window)?;
    let names = (0..fb.elements.len()).map(|k| format!("w{k}")).collect();
    let (p, inc, proj) = based_summand(pi, names, &fb.elements, &fb.degrees)?;
    let filtration =
        find_filtration(&p).map_err(|_| DgError::NotFilterable("the extracted basis of the summand is not semi-free".into()))?;
    let checks = fb.checks.iter().map(|&(d, rk, _)| (0, d, rk)).collect();
    let layers = vec![LayerRecord { level: 0, rank: p.rank(), dropped: false }];
    Ok(SplitResult { module: p, filtration, inc, proj, layers, method: SplitMethod::Global, checks })
}

/// `F ≅ cone(f)` for a DG submodule `F'` spanned by generators whose
/// complement is free on cocycles.
#[derive(Clone, Debug)]
pub struct ConePresentation {
    /// `A ⊗ Σ^{-1}V`.
    pub source: Arc<BasedDGModule>,
    pub sub: Arc<BasedDGModule>,
    pub f: ModuleMap,
    pub cone: Cone,
    /// Generator bijection `cone(f) → F`.
    pub iso: ModuleMap,
}

pub fn cone_presentation(f: &Arc<BasedDGModule>, sub: &[usize]) -> Result<ConePresentation> {
    let s: BTreeSet<usize> = sub.iter().copied().collect();
    let quotient: Vec<usize> = (0..f.rank()).filter(|j| !s.contains(j)).collect();
    for (i, j, _) in f.differential().entries() {
        if s.contains(&j) && !s.contains(&i) {
            return Err(DgError::NotClosed(format!("∂{} leaves the submodule through {}", f.gens()[j].name, f.gens()[i].name)));
        }
        if !s.contains(&j) && !s.contains(&i) {
            return Err(DgError::QuotientNotFree(format!("∂{} is nonzero in the quotient", f.gens()[j].name)));
        }
    }
    let subm = Arc::new(f.restrict(sub));
    let src_gens = quotient.iter().map(|&j| Generator::new(format!("{}'", f.gens()[j].name), f.degree(j) + 1)).collect();
    let source = Arc::new(BasedDGModule::free(f.algebra_arc().clone(), src_gens));
    let mut m = AMatrix::zeros(sub.len(), quotient.len());
    for (q, &j) in quotient.iter().enumerate() {
        for (pos, &i) in sub.iter().enumerate() {
            if let Some(a) = f.differential().get(i, j) {
                m.set(pos, q, a.clone());
            }
        }
    }
    let map = ModuleMap::new(source.clone(), subm.clone(), 0, m)?;
    if !map.is_chain_map()? {
        return Err(DgError::Internal("attaching map is not a chain map".into()));
    }
    let cone = mapping_cone(&map)?;
    let mut iso = AMatrix::zeros(f.rank(), cone.module.rank());
    for (pos, &i) in sub.iter().chain(&quotient).enumerate() {
        iso.set(i, pos, f.algebra().one());
    }
    let iso = ModuleMap::new(cone.module.clone(), f.clone(), 0, iso)?;
    if !iso.is_chain_map()? {
        return Err(DgError::SignCheckFailed("cone(f) → F is not a chain map".into()));
    }
    Ok(ConePresentation { source, sub: subm, f: map, cone, iso })
}

/// Pairs `(y, z)` with `∂y = c·z` for a nonzero scalar `c` and no other
/// differential entries, covering all generators.
pub fn categorical_pairs(f: &BasedDGModule) -> Option<Vec<(usize, usize)>> {
    let mut pairs = Vec::new();
    let mut used = vec![false; f.rank()];
    for j in 0..f.rank() {
        let col = f.differential().col(j);
        if col.is_empty() {
            continue;
        }
        if col.len() != 1 {
            return None;
        }
        let (&i, a) = col.iter().next().unwrap();
        if f.entry_degree(i, j) != 0 || a.degree_zero_part().is_none() || used[i] || used[j] {
            return None;
        }
        used[i] = true;
        used[j] = true;
        pairs.push((j, i));
    }
    used.iter().all(|&u| u).then_some(pairs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CategoricalMethod {
    /// `P(0) = Σ A·π(∂y)`, `ε` from the free quotient, `β` checked bijective.
    Pairs,
    /// `π` moves `A·{∂y}`: cancellation pairs on a free basis of `P`.
    Cancellation,
}

#[derive(Clone, Debug)]
pub struct CategoricalSplit {
    /// Generators `ε_k`, `dε_k` with `∂ε_k = dε_k`.
    pub module: Arc<BasedDGModule>,
    pub epsilons: Vec<ModuleElement>,
    pub boundaries: Vec<ModuleElement>,
    pub inc: ModuleMap,
    pub proj: ModuleMap,
    pub method: CategoricalMethod,
    /// `(degree, dim of the β source, rank of β, dim P(0))` per window degree.
    pub beta_checks: Vec<(i64, usize, usize, usize)>,
}

/// `dim H^d(im π)` on the window.
pub fn image_cohomology(pi: &Projector, window: Window) -> Result<Vec<(i64, usize)>> {
    let f = pi.module();
    let field = f.field();
    let mut boundary_rank = BTreeMap::new();
    let mut cycles = BTreeMap::new();
    for d in (window.lo - 1)..=window.hi {
        let layout = f.layout(d)?;
        let mut image = Echelon::new(field, layout.dim);
        for x in basis_elements(f, d, None)? {
            image.insert(&f.coords(&layout, &pi.map().apply(&x)?));
        }
        let next = f.layout(d + 1)?;
        let mut dimg = Echelon::new(field, next.dim);
        for r in 0..image.rank() {
            let x = f.element_from_coords(&layout, image.row(r));
            dimg.insert(&f.coords(&next, &f.diff_element(&x)?));
        }
        boundary_rank.insert(d + 1, dimg.rank());
        cycles.insert(d, image.rank() - dimg.rank());
    }
    Ok(window.degrees().map(|d| (d, cycles[&d] - boundary_rank[&d])).collect())
}

/// Splits the image of an idempotent chain map on a categorically free `F`
/// into pairs `{ε, ∂ε}`.
pub fn split_categorically_projective(pi: &Projector, window: Window) -> Result<CategoricalSplit> {
    let f = pi.module();
    if !pi.is_chain_map() {
        return Err(DgError::NotChainMap("catsplit needs a chain projector".into()));
    }
    let pairs = categorical_pairs(f).ok_or_else(|| DgError::Validation("module is not categorically free on its generators".into()))?;
    if let Some((d, h)) = image_cohomology(pi, window)?.into_iter().find(|&(_, h)| h != 0) {
        return Err(DgError::NotQuasiTrivial(format!("H^{d}(im π) has dimension {h}")));
    }
    let base: Vec<usize> = pairs.iter().map(|&(_, z)| z).collect();
    let tops: Vec<usize> = pairs.iter().map(|&(y, _)| y).collect();
    let in_base: BTreeSet<usize> = base.iter().copied().collect();
    let stable = pi.map().matrix().entries().all(|(i, j, _)| !in_base.contains(&j) || in_base.contains(&i));
    if !stable {
        return split_by_cancellation(pi, window);
    }
    let p0 = extract_free_basis(pi, Some(&base), window)?;
    let p1 = extract_free_basis(pi, Some(&tops), window)?;
    let epsilons = p1.elements.clone();
    let mut boundaries = Vec::new();
    for e in &epsilons {
        boundaries.push(f.diff_element(e)?);
    }
    let alg = f.algebra();
    let field = f.field();
    let mut beta_checks = Vec::new();
    for d in window.degrees() {
        let layout = f.layout(d)?;
        let mut target = Echelon::new(field, layout.dim);
        for (w, &dw) in p0.elements.iter().zip(&p0.degrees) {
            let e = d - dw;
            if e < 0 {
                continue;
            }
            for idx in 0..alg.dim(e)? {
                let a = AlgebraElement::basis(e as usize, idx, field.one());
                target.insert(&f.coords(&layout, &w.left_mul(alg, &a)?));
            }
        }
        let mut image = Echelon::new(field, layout.dim);
        let mut src_dim = 0;
        for (b, &de) in boundaries.iter().zip(&p1.degrees) {
            let e = d - de - 1;
            if e < 0 {
                continue;
            }
            for idx in 0..alg.dim(e)? {
                let a = AlgebraElement::basis(e as usize, idx, field.one());
                let v = f.coords(&layout, &b.left_mul(alg, &a)?);
                if !target.contains(&v) {
                    return Err(DgError::BetaNotBijective(format!("∂ε leaves P(0) in degree {d}")));
                }
                image.insert(&v);
                src_dim += 1;
            }
        }
        if image.rank() != src_dim || image.rank() != target.rank() {
            return Err(DgError::BetaNotBijective(format!("degree {d}: source {src_dim}, rank {}, P(0) {}", image.rank(), target.rank())));
        }
        beta_checks.push((d, src_dim, image.rank(), target.rank()));
    }
    finish_categorical(pi, epsilons, boundaries, p1.degrees, CategoricalMethod::Pairs, beta_checks)
}

fn finish_categorical(
    pi: &Projector,
    epsilons: Vec<ModuleElement>,
    boundaries: Vec<ModuleElement>,
    eps_degrees: Vec<i64>,
    method: CategoricalMethod,
    beta_checks: Vec<(i64, usize, usize, usize)>,
) -> Result<CategoricalSplit> {
    let mut basis = Vec::new();
    let mut degrees = Vec::new();
    let mut names = Vec::new();
    for (k, (e, b)) in epsilons.iter().zip(&boundaries).enumerate() {
        if b.is_zero() {
            return Err(DgError::BetaNotBijective(format!("∂ε{} vanishes", k + 1)));
        }
        basis.push(e.clone());
        basis.push(b.clone());
        degrees.push(eps_degrees[k]);
        degrees.push(eps_degrees[k] + 1);
        names.push(format!("eps{}", k + 1));
        names.push(format!("deps{}", k + 1));
    }
    let (p, inc, proj) = based_summand(pi, names, &basis, &degrees)?;
    if categorical_pairs(&p).map(|v| v.len()) != Some(epsilons.len()) {
        return Err(DgError::Internal("split summand is not categorically free".into()));
    }
    Ok(CategoricalSplit { module: p, epsilons, boundaries, inc, proj, method, beta_checks })
}

fn split_by_cancellation(pi: &Projector, window: Window) -> Result<CategoricalSplit> {
    let split = split_global(pi, window)?;
    let mut cur = split.module.clone();
    // ι from the current complement into the summand
    let mut iota = ModuleMap::identity(cur.clone());
    let mut epsilons = Vec::new();
    let mut boundaries = Vec::new();
    let mut degrees = Vec::new();
    while let Some((i, j)) = next_pivot(&cur) {
        let in_p = iota.on_generator(j);
        let eps = split.inc.apply(&in_p)?;
        boundaries.push(pi.module().diff_element(&eps)?);
        epsilons.push(eps);
        degrees.push(cur.degree(j));
        let (g, _, is, _) = cancel_step(&cur, i, j)?;
        iota = ModuleMap::compose(&iota, &is)?;
        cur = g;
    }
    if cur.rank() != 0 {
        return Err(DgError::NotQuasiTrivial("the summand has a nonzero minimal model".into()));
    }
    finish_categorical(pi, epsilons, boundaries, degrees, CategoricalMethod::Cancellation, Vec::new())
}
