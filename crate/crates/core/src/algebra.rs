//! Locally finite connected cochain DG algebras.
//!
//! An algebra carries an explicit basis in every degree `0..=max_degree`,
//! multiplication of basis elements, and the differential of every basis
//! element. Two presentations are supported: DG polynomial algebras
//! `k[x_1, .., x_n]` with `|x_i| = 1` and `∂x_i = Σ_j t_j x_i x_j`, and
//! arbitrary tables.
//!
//! The degree cap is hard: any product or differential that would land above
//! `max_degree` fails with [`DgError::CapExceeded`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{DgError, Result};
use crate::linalg::{SparseAcc, SparseVec};
use crate::scalar::{Field, Scalar};

/// One term `coeff · b` of an algebra element, `b` the `index`-th basis
/// element of degree `degree`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub degree: usize,
    pub index: usize,
    pub coeff: Scalar,
}

/// A sparse algebra element in canonical form: terms sorted by
/// `(degree, index)`, no zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AlgebraElement {
    terms: Vec<Term>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// Canonicalizes an arbitrary list of terms (merges duplicates, drops zeros).
    pub fn from_terms(terms: impl IntoIterator<Item = Term>) -> Self {
        let mut map: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
        for t in terms {
            match map.get_mut(&(t.degree, t.index)) {
                Some(c) => *c += &t.coeff,
                None => {
                    map.insert((t.degree, t.index), t.coeff);
                }
            }
        }
        let terms = map.into_iter().filter(|(_, c)| !c.is_zero()).map(|((degree, index), coeff)| Term { degree, index, coeff }).collect();
        Self { terms }
    }

    /// Homogeneous element of degree `degree` from a sparse coordinate vector.
    pub fn from_sparse(degree: usize, v: &[(usize, Scalar)]) -> Self {
        Self { terms: v.iter().filter(|(_, c)| !c.is_zero()).map(|(i, c)| Term { degree, index: *i, coeff: c.clone() }).collect() }
    }

    pub fn basis(degree: usize, index: usize, coeff: Scalar) -> Self {
        Self::from_terms([Term { degree, index, coeff }])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The common degree of all terms, `None` for zero or mixed elements.
    pub fn degree(&self) -> Option<usize> {
        let d = self.terms.first()?.degree;
        self.terms.iter().all(|t| t.degree == d).then_some(d)
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.iter().map(|t| t.degree).max()
    }

    /// True when no term lies in degree 0, i.e. the element is in the
    /// augmentation ideal.
    pub fn in_augmentation_ideal(&self) -> bool {
        self.terms.iter().all(|t| t.degree > 0)
    }

    /// The scalar coefficient of the degree-0 part (for connected algebras
    /// this is the coefficient of the unit).
    pub fn degree_zero_part(&self) -> Option<&Scalar> {
        self.terms.iter().find(|t| t.degree == 0).map(|t| &t.coeff)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|t| Term { degree: t.degree, index: t.index, coeff: c * &t.coeff }).collect() }
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|t| Term { degree: t.degree, index: t.index, coeff: -&t.coeff }).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().chain(other.terms.iter()).cloned())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Coordinates of the degree-`d` part.
    pub fn component(&self, d: usize) -> SparseVec {
        self.terms.iter().filter(|t| t.degree == d).map(|t| (t.index, t.coeff.clone())).collect()
    }

    /// Canonical form check: sorted, no zeros, no duplicates.
    pub fn is_canonical(&self) -> bool {
        self.terms.iter().all(|t| !t.coeff.is_zero())
            && self.terms.windows(2).all(|w| (w[0].degree, w[0].index) < (w[1].degree, w[1].index))
    }
}

/// Label of a basis element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    Monomial(Vec<u32>),
    Named(String),
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::Named(s) => f.write_str(s),
            BasisLabel::Monomial(e) => {
                if e.iter().all(|x| *x == 0) {
                    return f.write_str("1");
                }
                let mut first = true;
                for (i, x) in e.iter().enumerate() {
                    if *x == 0 {
                        continue;
                    }
                    if !first {
                        f.write_str("*")?;
                    }
                    first = false;
                    if *x == 1 {
                        write!(f, "x{}", i + 1)?;
                    } else {
                        write!(f, "x{}^{}", i + 1, x)?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Reference to a basis element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisRef {
    pub degree: usize,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraKind {
    DgPolynomial { n: usize, t: Vec<Scalar> },
    Table,
}

/// A product entry of a table algebra: `left · right = Σ terms`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductEntry {
    pub left: BasisRef,
    pub right: BasisRef,
    pub terms: Vec<Term>,
}

/// Differential entry of a table algebra: `∂(basis) = Σ terms`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffEntry {
    pub basis: BasisRef,
    pub terms: Vec<Term>,
}

/// Raw description of a table algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableSpec {
    pub field: Field,
    pub max_degree: usize,
    /// Basis names, one list per degree `0..=max_degree`.
    pub basis: Vec<Vec<String>>,
    /// Index of the unit within the degree-0 basis.
    pub unit: usize,
    pub mul: Vec<ProductEntry>,
    pub diff: Vec<DiffEntry>,
}

/// A locally finite connected cochain DG algebra, truncated at `max_degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedAlgebra {
    field: Field,
    max_degree: usize,
    kind: AlgebraKind,
    labels: Vec<Vec<BasisLabel>>,
    unit: usize,
    monomial_index: Vec<HashMap<Vec<u32>, usize>>,
    /// Explicit products of a table algebra; unit products are implicit.
    table: BTreeMap<(BasisRef, BasisRef), SparseVec>,
    /// `diff[d][i]`: coordinates in degree `d + 1`; empty for `d = max_degree`.
    diff: Vec<Vec<SparseVec>>,
}

/// Monomials of total degree `d` in `n` variables, graded lexicographic with
/// `x_1 > .. > x_n`.
fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n - 1 {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e);
            rec(n, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

impl GradedAlgebra {
    /// DG polynomial algebra `A(t_1, .., t_n)` truncated at `max_degree`.
    pub fn dg_polynomial(field: Field, t: Vec<Scalar>, max_degree: usize) -> Result<Self> {
        let n = t.len();
        if n == 0 {
            return Err(DgError::InvalidParameter("a DG polynomial algebra needs n >= 1".into()));
        }
        if max_degree < 2 {
            return Err(DgError::InvalidParameter("max_degree must be at least 2".into()));
        }
        if t.iter().any(|s| s.field() != field) {
            return Err(DgError::InvalidParameter("t-vector lives in a different field".into()));
        }
        let mut labels = Vec::with_capacity(max_degree + 1);
        let mut monomial_index = Vec::with_capacity(max_degree + 1);
        for d in 0..=max_degree {
            let mons = monomials(n, d as u32);
            monomial_index.push(mons.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect::<HashMap<_, _>>());
            labels.push(mons.into_iter().map(BasisLabel::Monomial).collect::<Vec<_>>());
        }
        // ∂(x^a) = [|a| odd] · θ · x^a with θ = Σ_j t_j x_j: the signed Leibniz
        // rule on a commutative ring makes even monomials cocycles.
        let mut diff = Vec::with_capacity(max_degree + 1);
        for d in 0..=max_degree {
            let mut row = Vec::with_capacity(labels[d].len());
            for label in &labels[d] {
                let BasisLabel::Monomial(e) = label else { unreachable!() };
                if d == max_degree || d % 2 == 0 {
                    row.push(Vec::new());
                    continue;
                }
                let mut acc = SparseAcc::new();
                for (j, tj) in t.iter().enumerate() {
                    if tj.is_zero() {
                        continue;
                    }
                    let mut e2 = e.clone();
                    e2[j] += 1;
                    acc.add(monomial_index[d + 1][&e2], tj);
                }
                row.push(acc.finish());
            }
            diff.push(row);
        }
        Ok(Self {
            field,
            max_degree,
            kind: AlgebraKind::DgPolynomial { n, t },
            labels,
            unit: 0,
            monomial_index,
            table: BTreeMap::new(),
            diff,
        })
    }

    /// Algebra from explicit tables. Tables are stored verbatim (products with
    /// the unit are implicit); run [`GradedAlgebra::validate`] before use.
    pub fn from_table(spec: TableSpec) -> Result<Self> {
        let n_max = spec.max_degree;
        if spec.basis.len() != n_max + 1 {
            return Err(DgError::MalformedTable(format!(
                "basis lists cover {} degrees, expected {} (degrees 0..={n_max})",
                spec.basis.len(),
                n_max + 1
            )));
        }
        if spec.unit >= spec.basis[0].len() {
            return Err(DgError::MalformedTable("unit index is not a degree-0 basis element".into()));
        }
        let dims: Vec<usize> = spec.basis.iter().map(|b| b.len()).collect();
        let check_ref = |r: &BasisRef| -> Result<()> {
            if r.degree > n_max || r.index >= dims[r.degree] {
                return Err(DgError::MalformedTable(format!("basis reference {r:?} out of range")));
            }
            Ok(())
        };
        let check_terms = |terms: &[Term], degree: i64, what: &str| -> Result<SparseVec> {
            let mut acc = SparseAcc::new();
            for t in terms {
                if t.coeff.field() != spec.field {
                    return Err(DgError::MalformedTable(format!("{what}: coefficient in wrong field")));
                }
                if t.degree as i64 != degree {
                    return Err(DgError::MalformedTable(format!("{what}: term of degree {} where degree {degree} is required", t.degree)));
                }
                check_ref(&BasisRef { degree: t.degree, index: t.index })?;
                acc.add(t.index, &t.coeff);
            }
            Ok(acc.finish())
        };
        let mut table = BTreeMap::new();
        for e in &spec.mul {
            check_ref(&e.left)?;
            check_ref(&e.right)?;
            let deg = e.left.degree + e.right.degree;
            let what = format!("product {:?}·{:?}", e.left, e.right);
            if deg > n_max {
                if e.terms.iter().any(|t| !t.coeff.is_zero()) {
                    return Err(DgError::MalformedTable(format!("{what} exceeds the degree cap")));
                }
                continue;
            }
            let v = check_terms(&e.terms, deg as i64, &what)?;
            if table.insert((e.left, e.right), v).is_some() {
                return Err(DgError::MalformedTable(format!("{what} listed twice")));
            }
        }
        let mut diff: Vec<Vec<SparseVec>> = dims.iter().map(|&k| vec![Vec::new(); k]).collect();
        let mut seen = std::collections::HashSet::new();
        for e in &spec.diff {
            check_ref(&e.basis)?;
            let what = format!("differential of {:?}", e.basis);
            if !seen.insert(e.basis) {
                return Err(DgError::MalformedTable(format!("{what} listed twice")));
            }
            if e.basis.degree == n_max {
                if e.terms.iter().any(|t| !t.coeff.is_zero()) {
                    return Err(DgError::MalformedTable(format!("{what} exceeds the degree cap")));
                }
                continue;
            }
            diff[e.basis.degree][e.basis.index] = check_terms(&e.terms, e.basis.degree as i64 + 1, &what)?;
        }
        let labels = spec.basis.iter().map(|b| b.iter().cloned().map(BasisLabel::Named).collect()).collect();
        Ok(Self {
            field: spec.field,
            max_degree: n_max,
            kind: AlgebraKind::Table,
            labels,
            unit: spec.unit,
            monomial_index: Vec::new(),
            table,
            diff,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn kind(&self) -> &AlgebraKind {
        &self.kind
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn label(&self, degree: usize, index: usize) -> &BasisLabel {
        &self.labels[degree][index]
    }

    pub fn labels(&self, degree: usize) -> &[BasisLabel] {
        &self.labels[degree]
    }

    /// The raw product table of a table algebra (empty for polynomial algebras).
    pub fn product_table(&self) -> &BTreeMap<(BasisRef, BasisRef), SparseVec> {
        &self.table
    }

    /// Table algebras list their whole basis, so they vanish above the top
    /// degree; polynomial algebras are truncations.
    pub fn is_complete(&self) -> bool {
        matches!(self.kind, AlgebraKind::Table)
    }

    pub fn check_degree(&self, d: i64) -> Result<()> {
        if d > self.max_degree as i64 && !self.is_complete() {
            return Err(DgError::CapExceeded { needed: d, cap: self.max_degree });
        }
        Ok(())
    }

    /// `dim A^d`; zero for negative `d`, `CapExceeded` above the cap of a
    /// truncated algebra.
    pub fn dim(&self, d: i64) -> Result<usize> {
        if d < 0 || (d > self.max_degree as i64 && self.is_complete()) {
            return Ok(0);
        }
        self.check_degree(d)?;
        Ok(self.labels[d as usize].len())
    }

    /// Basis index of a monomial, for polynomial algebras.
    pub fn monomial(&self, exponents: &[u32]) -> Option<BasisRef> {
        let AlgebraKind::DgPolynomial { n, .. } = &self.kind else { return None };
        if exponents.len() != *n {
            return None;
        }
        let d: u32 = exponents.iter().sum();
        let idx = *self.monomial_index.get(d as usize)?.get(exponents)?;
        Some(BasisRef { degree: d as usize, index: idx })
    }

    pub fn named(&self, name: &str) -> Option<BasisRef> {
        for (d, ls) in self.labels.iter().enumerate() {
            for (i, l) in ls.iter().enumerate() {
                if matches!(l, BasisLabel::Named(s) if s == name) {
                    return Some(BasisRef { degree: d, index: i });
                }
            }
        }
        None
    }

    pub fn one(&self) -> AlgebraElement {
        AlgebraElement::basis(0, self.unit, self.field.one())
    }

    pub fn scalar(&self, c: Scalar) -> AlgebraElement {
        AlgebraElement::basis(0, self.unit, c)
    }

    /// `x_i` (1-based variable index) of a polynomial algebra.
    pub fn variable(&self, i: usize) -> AlgebraElement {
        let AlgebraKind::DgPolynomial { n, .. } = &self.kind else { panic!("variable() on a table algebra") };
        let mut e = vec![0u32; *n];
        e[i - 1] = 1;
        let r = self.monomial(&e).expect("variable within cap");
        AlgebraElement::basis(r.degree, r.index, self.field.one())
    }

    /// Element from a monomial exponent vector and coefficient.
    pub fn monomial_element(&self, exponents: &[u32], coeff: Scalar) -> Result<AlgebraElement> {
        let d: u32 = exponents.iter().sum();
        self.check_degree(d as i64)?;
        let r = self
            .monomial(exponents)
            .ok_or_else(|| DgError::InvalidParameter(format!("{exponents:?} is not a monomial of this algebra")))?;
        Ok(AlgebraElement::basis(r.degree, r.index, coeff))
    }

    /// Adds `c · (basis (d1,i1)) · (basis (d2,i2))` into `acc` (coordinates in
    /// degree `d1 + d2`).
    pub fn mul_basis_into(&self, d1: usize, i1: usize, d2: usize, i2: usize, c: &Scalar, acc: &mut SparseAcc) -> Result<()> {
        let d = d1 + d2;
        self.check_degree(d as i64)?;
        if c.is_zero() || d > self.max_degree {
            return Ok(());
        }
        match &self.kind {
            AlgebraKind::DgPolynomial { .. } => {
                let (BasisLabel::Monomial(a), BasisLabel::Monomial(b)) = (&self.labels[d1][i1], &self.labels[d2][i2]) else {
                    unreachable!()
                };
                let e: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                acc.add(self.monomial_index[d][&e], c);
            }
            AlgebraKind::Table => {
                let l = BasisRef { degree: d1, index: i1 };
                let r = BasisRef { degree: d2, index: i2 };
                if let Some(v) = self.table.get(&(l, r)) {
                    acc.add_scaled(c, v);
                } else if d1 == 0 && i1 == self.unit {
                    acc.add(i2, c);
                } else if d2 == 0 && i2 == self.unit {
                    acc.add(i1, c);
                }
            }
        }
        Ok(())
    }

    pub fn mul_basis(&self, a: BasisRef, b: BasisRef) -> Result<SparseVec> {
        let mut acc = SparseAcc::new();
        self.mul_basis_into(a.degree, a.index, b.degree, b.index, &self.field.one(), &mut acc)?;
        Ok(acc.finish())
    }

    /// Differential of a basis element, as coordinates in degree `d + 1`.
    pub fn diff_basis(&self, d: usize, i: usize) -> Result<&SparseVec> {
        static ZERO: SparseVec = Vec::new();
        self.check_degree(d as i64 + 1)?;
        if d >= self.max_degree {
            return Ok(&ZERO);
        }
        Ok(&self.diff[d][i])
    }

    /// Bilinear product; fails if any product term would pass the cap.
    pub fn mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        let mut by_degree: BTreeMap<usize, SparseAcc> = BTreeMap::new();
        for s in a.terms() {
            for t in b.terms() {
                let acc = by_degree.entry(s.degree + t.degree).or_default();
                self.mul_basis_into(s.degree, s.index, t.degree, t.index, &(&s.coeff * &t.coeff), acc)?;
            }
        }
        Ok(AlgebraElement::from_terms(
            by_degree.into_iter().flat_map(|(d, acc)| acc.finish().into_iter().map(move |(index, coeff)| Term { degree: d, index, coeff })),
        ))
    }

    /// Linear extension of the differential.
    pub fn diff(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        let mut out = Vec::new();
        for t in a.terms() {
            for (j, c) in self.diff_basis(t.degree, t.index)? {
                out.push(Term { degree: t.degree + 1, index: *j, coeff: &t.coeff * c });
            }
        }
        Ok(AlgebraElement::from_terms(out))
    }

    /// Kernel of `∂: A^d → A^{d+1}` as coordinate vectors.
    pub fn cocycles(&self, d: usize) -> Result<Vec<SparseVec>> {
        let cols: Vec<SparseVec> = (0..self.dim(d as i64)?).map(|i| self.diff_basis(d, i).cloned()).collect::<Result<_>>()?;
        Ok(crate::linalg::kernel(self.field, self.dim(d as i64 + 1)?, &cols))
    }

    /// Checks every algebra axiom up to the cap.
    pub fn validate(&self) -> AlgebraReport {
        let mut violations = Vec::new();
        let one = self.field.one();
        if self.labels[0].len() != 1 {
            violations.push(AlgebraViolation::Connectedness { degree_zero_dim: self.labels[0].len() });
        }
        let n = self.max_degree;
        // Polynomial multiplication is exponent addition, so unit and
        // associativity laws are structural; they are still spot-checked on
        // low degrees to guard the indexing.
        let assoc_cap = match self.kind {
            AlgebraKind::DgPolynomial { .. } => n.min(6),
            AlgebraKind::Table => n,
        };
        let refs: Vec<BasisRef> = (0..=n).flat_map(|d| (0..self.labels[d].len()).map(move |i| BasisRef { degree: d, index: i })).collect();
        let unit = BasisRef { degree: 0, index: self.unit };
        for &b in &refs {
            let expect = vec![(b.index, one.clone())];
            let l = self.mul_basis(unit, b).unwrap_or_default();
            let r = self.mul_basis(b, unit).unwrap_or_default();
            if l != expect || r != expect {
                violations.push(AlgebraViolation::Unit { basis: b });
            }
        }
        for &a in refs.iter().filter(|r| r.degree <= assoc_cap) {
            for &b in refs.iter().filter(|r| a.degree + r.degree <= assoc_cap) {
                let ab = AlgebraElement::from_sparse(a.degree + b.degree, &self.mul_basis(a, b).unwrap());
                for &c in refs.iter().filter(|r| a.degree + b.degree + r.degree <= assoc_cap) {
                    let bc = AlgebraElement::from_sparse(b.degree + c.degree, &self.mul_basis(b, c).unwrap());
                    let ea = AlgebraElement::basis(a.degree, a.index, one.clone());
                    let ec = AlgebraElement::basis(c.degree, c.index, one.clone());
                    let left = self.mul(&ab, &ec).unwrap();
                    let right = self.mul(&ea, &bc).unwrap();
                    if left != right {
                        violations.push(AlgebraViolation::Associativity { a, b, c });
                    }
                }
            }
        }
        for &a in &refs {
            for &b in refs.iter().filter(|r| a.degree + r.degree < n) {
                let ea = AlgebraElement::basis(a.degree, a.index, one.clone());
                let eb = AlgebraElement::basis(b.degree, b.index, one.clone());
                let ab = self.mul(&ea, &eb).unwrap();
                let lhs = self.diff(&ab).unwrap();
                let t1 = self.mul(&self.diff(&ea).unwrap(), &eb).unwrap();
                let t2 = self.mul(&ea, &self.diff(&eb).unwrap()).unwrap();
                let rhs = if a.degree % 2 == 0 { t1.add(&t2) } else { t1.sub(&t2) };
                if lhs != rhs {
                    violations.push(AlgebraViolation::Leibniz { a, b });
                }
            }
        }
        for &a in refs.iter().filter(|r| r.degree + 2 <= n) {
            let ea = AlgebraElement::basis(a.degree, a.index, one.clone());
            let dd = self.diff(&self.diff(&ea).unwrap()).unwrap();
            if !dd.is_zero() {
                violations.push(AlgebraViolation::DifferentialSquare { basis: a });
            }
        }
        AlgebraReport { violations }
    }

    /// Human-readable rendering of an element.
    pub fn format(&self, a: &AlgebraElement) -> String {
        if a.is_zero() {
            return "0".into();
        }
        a.terms()
            .iter()
            .map(|t| {
                let l = self.label(t.degree, t.index).to_string();
                if t.coeff.is_one() {
                    l
                } else {
                    format!("({})*{}", t.coeff, l)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraViolation {
    Connectedness { degree_zero_dim: usize },
    Unit { basis: BasisRef },
    Associativity { a: BasisRef, b: BasisRef, c: BasisRef },
    Leibniz { a: BasisRef, b: BasisRef },
    DifferentialSquare { basis: BasisRef },
}

/// Violated axiom instances; empty means valid up to the degree cap.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlgebraReport {
    pub violations: Vec<AlgebraViolation>,
}

impl AlgebraReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}
