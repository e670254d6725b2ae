//! Exact sparse linear algebra over a [`Field`].
//!
//! The workhorse is [`Echelon`], an incrementally built row-echelon basis that
//! optionally remembers how each stored row combines the vectors fed to it.
//! Rank, kernels, membership and linear solves are all phrased through it.

use std::collections::BTreeMap;

use crate::scalar::{Field, Scalar};

/// Sorted `(index, value)` pairs with no stored zeros.
pub type SparseVec = Vec<(usize, Scalar)>;

/// Accumulator for building sparse vectors out of order.
#[derive(Clone, Debug, Default)]
pub struct SparseAcc {
    entries: BTreeMap<usize, Scalar>,
}

impl SparseAcc {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, idx: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.entries.get_mut(&idx) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.entries.remove(&idx);
                }
            }
            None => {
                self.entries.insert(idx, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, c: &Scalar, v: &[(usize, Scalar)]) {
        if c.is_zero() {
            return;
        }
        for (i, x) in v {
            self.add(*i, &(c * x));
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn finish(self) -> SparseVec {
        self.entries.into_iter().collect()
    }
}

pub fn scale(v: &[(usize, Scalar)], c: &Scalar) -> SparseVec {
    if c.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(i, x)| (*i, c * x)).collect()
}

/// `a + c·b`.
pub fn add_scaled(a: &[(usize, Scalar)], c: &Scalar, b: &[(usize, Scalar)]) -> SparseVec {
    let mut acc = SparseAcc::new();
    for (i, x) in a {
        acc.add(*i, x);
    }
    acc.add_scaled(c, b);
    acc.finish()
}

/// Unit vector `e_i`.
pub fn unit(field: Field, i: usize) -> SparseVec {
    vec![(i, field.one())]
}

#[derive(Clone, Debug)]
struct Row {
    vec: SparseVec,
    tag: SparseVec,
}

/// Outcome of [`Echelon::insert`].
#[derive(Clone, Debug)]
pub enum Inserted {
    /// The input was independent and is now stored as row `index`.
    Independent(usize),
    /// The input depended on earlier inputs: `relation` is a vanishing
    /// combination of inputs with coefficient 1 on the new one.
    Dependent(SparseVec),
}

/// Row-echelon basis of a growing subspace of `field^dim`.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    dim: usize,
    rows: Vec<Row>,
    pivot_row: Vec<Option<usize>>,
    inputs: usize,
}

impl Echelon {
    pub fn new(field: Field, dim: usize) -> Self {
        Self { field, dim, rows: Vec::new(), pivot_row: vec![None; dim], inputs: 0 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn input_count(&self) -> usize {
        self.inputs
    }

    /// Pivot column of every stored row, in insertion order.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.vec[0].0).collect()
    }

    /// Reduces `v` against the stored rows. Returns the residual and the
    /// combination `c` of inputs with `v = residual + Σ c_k input_k`.
    pub fn reduce(&self, v: &[(usize, Scalar)]) -> (SparseVec, SparseVec) {
        let mut work: BTreeMap<usize, Scalar> = v.iter().filter(|(_, x)| !x.is_zero()).cloned().collect();
        let mut comb = SparseAcc::new();
        let mut residual = Vec::new();
        while let Some((&k, _)) = work.iter().next() {
            let c = work.remove(&k).unwrap();
            match self.pivot_row[k] {
                Some(r) => {
                    let row = &self.rows[r];
                    for (i, x) in &row.vec[1..] {
                        let delta = &c * x;
                        match work.get_mut(i) {
                            Some(y) => {
                                *y -= &delta;
                                if y.is_zero() {
                                    work.remove(i);
                                }
                            }
                            None => {
                                work.insert(*i, -delta);
                            }
                        }
                    }
                    comb.add_scaled(&c, &row.tag);
                }
                None => residual.push((k, c)),
            }
        }
        (residual, comb.finish())
    }

    pub fn contains(&self, v: &[(usize, Scalar)]) -> bool {
        let mut work: BTreeMap<usize, Scalar> = v.iter().filter(|(_, x)| !x.is_zero()).cloned().collect();
        while let Some((&k, _)) = work.iter().next() {
            let c = work.remove(&k).unwrap();
            let Some(r) = self.pivot_row[k] else { return false };
            for (i, x) in &self.rows[r].vec[1..] {
                let delta = &c * x;
                match work.get_mut(i) {
                    Some(y) => {
                        *y -= &delta;
                        if y.is_zero() {
                            work.remove(i);
                        }
                    }
                    None => {
                        work.insert(*i, -delta);
                    }
                }
            }
        }
        true
    }

    /// Adds `v` as the next input.
    pub fn insert(&mut self, v: &[(usize, Scalar)]) -> Inserted {
        let t = self.inputs;
        self.inputs += 1;
        let (residual, comb) = self.reduce(v);
        // tag of the residual: e_t - comb
        let mut tag = SparseAcc::new();
        tag.add(t, &self.field.one());
        tag.add_scaled(&self.field.from_i64(-1), &comb);
        let tag = tag.finish();
        if residual.is_empty() {
            return Inserted::Dependent(tag);
        }
        // residual entries are sorted: the first one is the pivot
        let lead_inv = residual[0].1.inv().unwrap();
        let vec = scale(&residual, &lead_inv);
        let tag = scale(&tag, &lead_inv);
        let idx = self.rows.len();
        self.pivot_row[vec[0].0] = Some(idx);
        self.rows.push(Row { vec, tag });
        Inserted::Independent(idx)
    }

    /// Expresses `v` as a combination of inputs, if it lies in the span.
    pub fn solve(&self, v: &[(usize, Scalar)]) -> Option<SparseVec> {
        let (residual, comb) = self.reduce(v);
        residual.is_empty().then_some(comb)
    }

    /// Stored row `i` (normalized, leading coefficient 1).
    pub fn row(&self, i: usize) -> &[(usize, Scalar)] {
        &self.rows[i].vec
    }
}

/// Rank of the span of `vectors` in `field^dim`.
pub fn rank(field: Field, dim: usize, vectors: &[SparseVec]) -> usize {
    let mut e = Echelon::new(field, dim);
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

/// Kernel basis of the linear map sending `e_j` to `columns[j]`.
pub fn kernel(field: Field, target_dim: usize, columns: &[SparseVec]) -> Vec<SparseVec> {
    let mut e = Echelon::new(field, target_dim);
    let mut out = Vec::new();
    for c in columns {
        if let Inserted::Dependent(rel) = e.insert(c) {
            out.push(rel);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(v: i64) -> Scalar {
        Field::Rational.from_i64(v)
    }

    fn dense_to_sparse(v: &[i64]) -> SparseVec {
        v.iter().enumerate().filter(|(_, x)| **x != 0).map(|(i, x)| (i, q(*x))).collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        let rows = vec![dense_to_sparse(&[1, 2, 3]), dense_to_sparse(&[2, 4, 6]), dense_to_sparse(&[0, 1, 1])];
        assert_eq!(rank(Field::Rational, 3, &rows), 2);
    }

    #[test]
    fn kernel_relations_vanish() {
        let cols = vec![dense_to_sparse(&[1, 0]), dense_to_sparse(&[0, 1]), dense_to_sparse(&[1, 1])];
        let ker = kernel(Field::Rational, 2, &cols);
        assert_eq!(ker.len(), 1);
        let mut acc = SparseAcc::new();
        for (j, c) in &ker[0] {
            acc.add_scaled(c, &cols[*j]);
        }
        assert!(acc.is_empty());
    }

    #[test]
    fn solve_finds_combination() {
        let mut e = Echelon::new(Field::Rational, 3);
        e.insert(&dense_to_sparse(&[1, 1, 0]));
        e.insert(&dense_to_sparse(&[0, 1, 1]));
        let target = dense_to_sparse(&[2, 5, 3]);
        let comb = e.solve(&target).unwrap();
        let mut acc = SparseAcc::new();
        let inputs = [dense_to_sparse(&[1, 1, 0]), dense_to_sparse(&[0, 1, 1])];
        for (k, c) in &comb {
            acc.add_scaled(c, &inputs[*k]);
        }
        assert_eq!(acc.finish(), target);
        assert!(e.solve(&dense_to_sparse(&[1, 0, 0])).is_none());
    }

    proptest! {
        #[test]
        fn rank_nullity(entries in proptest::collection::vec(-3i64..4, 12)) {
            // 4 columns in Q^3
            let cols: Vec<SparseVec> = entries.chunks(3).map(dense_to_sparse).collect();
            let r = rank(Field::Rational, 3, &cols);
            let k = kernel(Field::Rational, 3, &cols).len();
            prop_assert_eq!(r + k, 4);
        }
    }
}
