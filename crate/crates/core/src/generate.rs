//! Standard modules (Koszul complexes, multiplication maps) and seeded
//! random instances: semi-free and minimal modules, chain maps, ghosts and
//! idempotent projectors.

use std::sync::Arc;

use rand::Rng;

use crate::algebra::{AlgebraElement, GradedAlgebra, Term};
use crate::error::{DgError, Result};
use crate::filtration::find_filtration;
use crate::homology::{realize, Window};
use crate::linalg::{kernel, SparseAcc, SparseVec};
use crate::module::{direct_sum, invert_automorphism, mapping_cone, AMatrix, BasedDGModule, Generator, ModuleElement, ModuleMap};
use crate::scalar::{Field, Scalar};

/// `·a: Σ^{-|a|}A → A` for a homogeneous cocycle `a`.
pub fn multiplication_map(alg: &Arc<GradedAlgebra>, a: &AlgebraElement) -> Result<ModuleMap> {
    let d = a.degree().ok_or_else(|| DgError::InvalidParameter("multiplier must be homogeneous and nonzero".into()))?;
    let src = Arc::new(BasedDGModule::free(alg.clone(), vec![Generator::new("e", d as i64)]));
    let tgt = Arc::new(BasedDGModule::unit(alg.clone()));
    let mut m = AMatrix::zeros(1, 1);
    m.set(0, 0, a.clone());
    ModuleMap::new(src, tgt, 0, m)
}

/// Koszul complex on degree-1 cocycles `x_1, .., x_k`, built as iterated
/// cones of `±x_i` on the previous stage. Generators are `e`, `e1`, `e2`,
/// `e12`, … with the subset in the name.
pub fn koszul_complex(alg: &Arc<GradedAlgebra>, xs: &[AlgebraElement]) -> Result<Arc<BasedDGModule>> {
    let field = alg.field();
    let mut k = Arc::new(BasedDGModule::unit(alg.clone()));
    let mut wedge = vec![0i64];
    for (step, x) in xs.iter().enumerate() {
        if x.degree() != Some(1) || !alg.diff(x)?.is_zero() {
            return Err(DgError::InvalidParameter("Koszul complexes need degree-1 cocycles".into()));
        }
        let src = Arc::new(k.suspend(-1));
        let mut m = AMatrix::zeros(k.rank(), k.rank());
        for (j, w) in wedge.iter().enumerate() {
            m.set(j, j, x.scale(&field.sign(*w)));
        }
        let f = ModuleMap::new(src, k.clone(), 0, m)?;
        let cone = mapping_cone(&f)?;
        let mut names: Vec<String> = k.gens().iter().map(|g| g.name.clone()).collect();
        names.extend(k.gens().iter().map(|g| format!("{}{}", g.name, step + 1)));
        let mut next_wedge = wedge.clone();
        next_wedge.extend(wedge.iter().map(|w| w + 1));
        wedge = next_wedge;
        k = Arc::new((*cone.module).clone().with_names(names));
    }
    Ok(k)
}

/// Koszul complex on the variables of a polynomial algebra.
pub fn koszul_on_variables(alg: &Arc<GradedAlgebra>, n: usize) -> Result<Arc<BasedDGModule>> {
    let xs: Vec<AlgebraElement> = (1..=n).map(|i| alg.variable(i)).collect();
    koszul_complex(alg, &xs)
}

pub fn random_nonzero<R: Rng>(rng: &mut R, field: Field, bound: i64) -> Scalar {
    loop {
        let v = rng.gen_range(-bound..=bound);
        let s = field.from_i64(v);
        if !s.is_zero() {
            return s;
        }
    }
}

fn random_combination<R: Rng>(rng: &mut R, field: Field, basis: &[SparseVec], density: f64) -> SparseVec {
    let mut acc = SparseAcc::new();
    for v in basis {
        if rng.gen_bool(density) {
            acc.add_scaled(&random_nonzero(rng, field, 3), v);
        }
    }
    acc.finish()
}

/// Random homogeneous algebra element of degree `e` (possibly zero).
pub fn random_algebra_element<R: Rng>(rng: &mut R, alg: &GradedAlgebra, e: usize, density: f64) -> Result<AlgebraElement> {
    let field = alg.field();
    let mut terms = Vec::new();
    for idx in 0..alg.dim(e as i64)? {
        if rng.gen_bool(density) {
            terms.push(Term { degree: e, index: idx, coeff: random_nonzero(rng, field, 3) });
        }
    }
    Ok(AlgebraElement::from_terms(terms))
}

/// Basis of the cocycles of `M^d`, optionally restricted to `(mM)^d`.
pub fn cocycle_basis(m: &BasedDGModule, d: i64, in_augmentation: bool) -> Result<Vec<ModuleElement>> {
    if m.rank() == 0 {
        return Ok(Vec::new());
    }
    let cx = realize(m, Window { lo: d, hi: d })?;
    let layout = cx.layout(d);
    let cols = cx.diff_columns(d);
    let mut chosen = Vec::new();
    for block in layout.blocks.iter().flatten() {
        let (off, e) = *block;
        if in_augmentation && e == 0 {
            continue;
        }
        let len = m.algebra().dim(e as i64)?;
        chosen.extend(off..off + len);
    }
    let sub: Vec<SparseVec> = chosen.iter().map(|&k| cols[k].clone()).collect();
    let ker = kernel(m.field(), cx.dim(d + 1), &sub);
    Ok(ker
        .into_iter()
        .map(|rel| {
            let v: SparseVec = rel.into_iter().map(|(k, c)| (chosen[k], c)).collect();
            m.element_from_coords(layout, &v)
        })
        .collect())
}

/// Random element of `M^d`.
pub fn random_element<R: Rng>(rng: &mut R, m: &BasedDGModule, d: i64, density: f64) -> Result<ModuleElement> {
    let layout = m.layout(d)?;
    let field = m.field();
    let mut v = Vec::new();
    for k in 0..layout.dim {
        if rng.gen_bool(density) {
            v.push((k, random_nonzero(rng, field, 3)));
        }
    }
    Ok(m.element_from_coords(&layout, &v))
}

/// Shape of a random based module.
#[derive(Clone, Copy, Debug)]
pub struct ModuleShape {
    pub min_gens: usize,
    pub max_gens: usize,
    pub degrees: (i64, i64),
    /// Upper bound on the semi-free filtration length of the result.
    pub max_level: usize,
    /// Restrict differentials to `m·M`.
    pub minimal: bool,
    /// Probability that a new generator gets a nonzero differential.
    pub attach: f64,
}

/// Adds generators one at a time; each new differential is a random cocycle
/// in the submodule spanned by generators of level below `max_level`.
pub fn random_module<R: Rng>(rng: &mut R, alg: &Arc<GradedAlgebra>, shape: ModuleShape) -> Result<Arc<BasedDGModule>> {
    let count = rng.gen_range(shape.min_gens..=shape.max_gens);
    let field = alg.field();
    let mut m = BasedDGModule::zero_module(alg.clone());
    for k in 0..count {
        let d = rng.gen_range(shape.degrees.0..=shape.degrees.1);
        let levels = find_filtration(&m).expect("random modules are built semi-free").levels;
        let keep: Vec<usize> = (0..m.rank()).filter(|&j| levels[j] < shape.max_level).collect();
        let sub = m.restrict(&keep);
        let mut image = ModuleElement::zero();
        if rng.gen_bool(shape.attach) {
            let basis = cocycle_basis(&sub, d + 1, shape.minimal)?;
            let coords: Vec<SparseVec> = basis.iter().enumerate().map(|(i, _)| vec![(i, field.one())]).collect();
            let comb = random_combination(rng, field, &coords, 0.6);
            for (i, c) in comb {
                image = image.add(&basis[i].scale(&c));
            }
        }
        let n = m.rank();
        let mut gens = m.gens().to_vec();
        gens.push(Generator::new(format!("g{k}"), d));
        let mut dm = AMatrix::zeros(n + 1, n + 1);
        for (i, j, a) in m.differential().entries() {
            dm.set(i, j, a.clone());
        }
        for (i, a) in image.coeffs() {
            dm.set(keep[*i], n, a.clone());
        }
        m = BasedDGModule::new(alg.clone(), gens, dm)?;
    }
    let report = m.validate();
    if !report.is_valid() {
        return Err(DgError::Internal(format!("random module failed validation: {:?}", report.violations)));
    }
    Ok(Arc::new(m))
}

/// Random degree-0 chain map `M → N` (uniform over a spanning set of the
/// solution space of `∂_Hom f = 0`).
pub fn random_chain_map<R: Rng>(rng: &mut R, m: &Arc<BasedDGModule>, n: &Arc<BasedDGModule>) -> Result<ModuleMap> {
    let field = m.field();
    let alg = m.algebra();
    let mut unk = Vec::new();
    let mut eq_off = vec![0usize];
    let mut eqs = Vec::new();
    for j in 0..m.rank() {
        let lu = n.layout(m.degree(j))?;
        let le = n.layout(m.degree(j) + 1)?;
        eq_off.push(eq_off[j] + le.dim);
        unk.push(lu);
        eqs.push(le);
    }
    let mut columns = Vec::new();
    let mut index = Vec::new();
    for j in 0..m.rank() {
        for k in 0..unk[j].dim {
            let x = n.element_from_coords(&unk[j], &[(k, field.one())]);
            let mut col = SparseAcc::new();
            for (p, c) in n.coords(&eqs[j], &n.diff_element(&x)?) {
                col.add(eq_off[j] + p, &c);
            }
            for l in 0..m.rank() {
                let Some(djl) = m.differential().get(j, l) else { continue };
                let y = x.left_mul(alg, &djl.neg())?;
                for (p, c) in n.coords(&eqs[l], &y) {
                    col.add(eq_off[l] + p, &c);
                }
            }
            columns.push(col.finish());
            index.push((j, k));
        }
    }
    let ker = kernel(field, eq_off[m.rank()], &columns);
    let comb = random_combination(rng, field, &ker, 0.5);
    let mut mat = AMatrix::zeros(n.rank(), m.rank());
    let mut per_col: Vec<SparseVec> = vec![Vec::new(); m.rank()];
    for (u, c) in comb {
        let (j, k) = index[u];
        per_col[j].push((k, c));
    }
    for (j, v) in per_col.iter().enumerate() {
        let x = n.element_from_coords(&unk[j], v);
        for (i, a) in x.coeffs() {
            mat.set(*i, j, a.clone());
        }
    }
    let f = ModuleMap::new(m.clone(), n.clone(), 0, mat)?;
    debug_assert!(f.is_chain_map()?);
    Ok(f)
}

/// Random ghost `F → M` out of a DG free module: generators go to random
/// coboundaries.
pub fn random_ghost_from_free<R: Rng>(rng: &mut R, free: &Arc<BasedDGModule>, m: &Arc<BasedDGModule>) -> Result<ModuleMap> {
    let mut mat = AMatrix::zeros(m.rank(), free.rank());
    for j in 0..free.rank() {
        let w = random_element(rng, m, free.degree(j) - 1, 0.5)?;
        let z = m.diff_element(&w)?;
        for (i, a) in z.coeffs() {
            mat.set(*i, j, a.clone());
        }
    }
    ModuleMap::new(free.clone(), m.clone(), 0, mat)
}

/// Random degree `-1` map lowering filtration level strictly.
pub fn random_level_lowering_homotopy<R: Rng>(rng: &mut R, m: &Arc<BasedDGModule>, levels: &[usize], density: f64) -> Result<ModuleMap> {
    let alg = m.algebra();
    let mut mat = AMatrix::zeros(m.rank(), m.rank());
    for j in 0..m.rank() {
        for i in 0..m.rank() {
            if levels[i] >= levels[j] {
                continue;
            }
            let e = m.degree(j) - 1 - m.degree(i);
            if e < 0 || e as usize > alg.max_degree() {
                continue;
            }
            mat.set(i, j, random_algebra_element(rng, alg, e as usize, density)?);
        }
    }
    ModuleMap::new(m.clone(), m.clone(), -1, mat)
}

/// `id + ∂h + h∂` for a level-lowering `h`: a filtration-preserving chain
/// automorphism.
pub fn random_unipotent_automorphism<R: Rng>(rng: &mut R, m: &Arc<BasedDGModule>, levels: &[usize]) -> Result<ModuleMap> {
    let h = random_level_lowering_homotopy(rng, m, levels, 0.4)?;
    ModuleMap::identity(m.clone()).add(&h.d_hom()?)
}

/// An idempotent chain map with its ambient module.
#[derive(Clone, Debug)]
pub struct ProjectorInstance {
    pub module: Arc<BasedDGModule>,
    pub projector: ModuleMap,
    /// Ranks of the blocks the projector was conjugated from.
    pub kept_rank: usize,
}

fn block_projector(sum: &crate::module::DirectSum, first: bool) -> Result<ModuleMap> {
    let k = if first { 0 } else { 1 };
    ModuleMap::compose(&sum.inc[k], &sum.proj[k])
}

fn conjugate(phi: &ModuleMap, pi0: &ModuleMap) -> Result<ModuleMap> {
    let inv = invert_automorphism(phi)?;
    ModuleMap::compose(phi, &ModuleMap::compose(pi0, &inv)?)
}

/// Scalar mix `[[a, b], [c, d]]` of `B ⊕ B` (invertible).
fn block_mix<R: Rng>(rng: &mut R, sum: &crate::module::DirectSum, half: usize) -> Result<ModuleMap> {
    let m = sum.module.clone();
    let alg = m.algebra();
    let field = m.field();
    loop {
        let a = field.from_i64(rng.gen_range(-2..=2));
        let b = field.from_i64(rng.gen_range(-2..=2));
        let c = field.from_i64(rng.gen_range(-2..=2));
        let d = field.from_i64(rng.gen_range(-2..=2));
        if (&(&a * &d) - &(&b * &c)).is_zero() {
            continue;
        }
        let mut mat = AMatrix::zeros(2 * half, 2 * half);
        for t in 0..half {
            mat.set(t, t, alg.scalar(a.clone()));
            mat.set(t, half + t, alg.scalar(b.clone()));
            mat.set(half + t, t, alg.scalar(c.clone()));
            mat.set(half + t, half + t, alg.scalar(d.clone()));
        }
        return ModuleMap::new(m.clone(), m, 0, mat);
    }
}

/// Semi-free `F = B_1 ⊕ B_2` with a block projector conjugated by
/// filtration-preserving chain automorphisms. With `mixed`, `B_2 = B_1` and
/// the blocks are first mixed by an invertible scalar matrix.
pub fn random_semifree_projector<R: Rng>(
    rng: &mut R,
    alg: &Arc<GradedAlgebra>,
    block: ModuleShape,
    mixed: bool,
) -> Result<ProjectorInstance> {
    let b1 = random_module(rng, alg, block)?;
    let b2 = if mixed { b1.clone() } else { random_module(rng, alg, block)? };
    let sum = direct_sum(&b1, &b2)?;
    let first = rng.gen_bool(0.5);
    let mut pi = block_projector(&sum, first)?;
    let kept_rank = if first { b1.rank() } else { b2.rank() };
    let f = sum.module.clone();
    if mixed {
        let mix = block_mix(rng, &sum, b1.rank())?;
        pi = conjugate(&mix, &pi)?;
    }
    let levels = find_filtration(&f).unwrap().levels;
    let phi = random_unipotent_automorphism(rng, &f, &levels)?;
    pi = conjugate(&phi, &pi)?;
    Ok(ProjectorInstance { module: f, projector: pi, kept_rank })
}

/// Categorically free module on pairs `(y_λ, z_λ = ∂y_λ)`, generators ordered
/// `y_1, z_1, y_2, z_2, …`.
pub fn categorically_free(alg: &Arc<GradedAlgebra>, degrees: &[i64]) -> Arc<BasedDGModule> {
    let n = degrees.len();
    let mut gens = Vec::with_capacity(2 * n);
    let mut d = AMatrix::zeros(2 * n, 2 * n);
    for (k, &deg) in degrees.iter().enumerate() {
        gens.push(Generator::new(format!("y{}", k + 1), deg));
        gens.push(Generator::new(format!("z{}", k + 1), deg + 1));
        d.set(2 * k + 1, 2 * k, alg.one());
    }
    Arc::new(BasedDGModule::new(alg.clone(), gens, d).unwrap())
}

/// Chain automorphism of a categorically free module: `y ↦ S y + (m-part)`
/// and `z ↦ ∂φ(y)`, with `S` invertible per degree.
pub fn random_categorical_automorphism<R: Rng>(rng: &mut R, f: &Arc<BasedDGModule>) -> Result<ModuleMap> {
    let alg = f.algebra();
    let field = f.field();
    let pairs = f.rank() / 2;
    let mut mat = AMatrix::zeros(f.rank(), f.rank());
    for l in 0..pairs {
        let yl = 2 * l;
        let mut image = ModuleElement::zero();
        for mu in 0..pairs {
            let ym = 2 * mu;
            let zm = ym + 1;
            let e = f.degree(yl) - f.degree(ym);
            if e == 0 {
                // unitriangular in pair order with a random nonzero diagonal
                let c = if mu == l {
                    random_nonzero(rng, field, 2)
                } else if mu > l && rng.gen_bool(0.5) {
                    field.from_i64(rng.gen_range(-2..=2))
                } else {
                    field.zero()
                };
                image.add_term(ym, &alg.scalar(c));
            } else if e > 0 && (e as usize) <= alg.max_degree() {
                image.add_term(ym, &random_algebra_element(rng, alg, e as usize, 0.4)?);
            }
            let ez = f.degree(yl) - f.degree(zm);
            if ez >= 0 && (ez as usize) <= alg.max_degree() && rng.gen_bool(0.5) {
                image.add_term(zm, &random_algebra_element(rng, alg, ez as usize, 0.4)?);
            }
        }
        let dz = f.diff_element(&image)?;
        for (i, a) in image.coeffs() {
            mat.set(*i, yl, a.clone());
        }
        for (i, a) in dz.coeffs() {
            mat.set(*i, yl + 1, a.clone());
        }
    }
    let phi = ModuleMap::new(f.clone(), f.clone(), 0, mat)?;
    debug_assert!(phi.is_chain_map()?);
    Ok(phi)
}

/// Categorically free `F` on at most `max_pairs` pairs with a projector onto
/// a subset of pairs, conjugated by a random categorical automorphism. With
/// `swap`, the two halves carry identical degrees and are mixed first.
pub fn random_categorical_projector<R: Rng>(
    rng: &mut R,
    alg: &Arc<GradedAlgebra>,
    max_pairs: usize,
    degrees: (i64, i64),
    swap: bool,
) -> Result<ProjectorInstance> {
    let (f, keep) = if swap {
        let half = rng.gen_range(1..=max_pairs / 2);
        let ds: Vec<i64> = (0..half).map(|_| rng.gen_range(degrees.0..=degrees.1)).collect();
        let all: Vec<i64> = ds.iter().chain(ds.iter()).copied().collect();
        (categorically_free(alg, &all), (0..half).collect::<Vec<_>>())
    } else {
        let n = rng.gen_range(1..=max_pairs);
        let ds: Vec<i64> = (0..n).map(|_| rng.gen_range(degrees.0..=degrees.1)).collect();
        let keep: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        (categorically_free(alg, &ds), keep)
    };
    let mut mat = AMatrix::zeros(f.rank(), f.rank());
    for &k in &keep {
        mat.set(2 * k, 2 * k, alg.one());
        mat.set(2 * k + 1, 2 * k + 1, alg.one());
    }
    let mut pi = ModuleMap::new(f.clone(), f.clone(), 0, mat)?;
    if swap {
        let half = f.rank() / 4;
        let field = f.field();
        // (y_k, y_{k+half}) ↦ mixed by [[1, 1], [-1, 1]] on both pair members
        let mut mix = AMatrix::zeros(f.rank(), f.rank());
        for k in 0..half {
            for off in 0..2 {
                let a = 2 * k + off;
                let b = 2 * (k + half) + off;
                mix.set(a, a, alg.one());
                mix.set(a, b, alg.one());
                mix.set(b, a, alg.scalar(field.from_i64(-1)));
                mix.set(b, b, alg.one());
            }
        }
        let mix = ModuleMap::new(f.clone(), f.clone(), 0, mix)?;
        pi = conjugate(&mix, &pi)?;
    }
    let phi = random_categorical_automorphism(rng, &f)?;
    pi = conjugate(&phi, &pi)?;
    Ok(ProjectorInstance { module: f, projector: pi, kept_rank: 2 * keep.len() })
}
