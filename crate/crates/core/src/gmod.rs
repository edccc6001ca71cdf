//! Graded free `ℚ[∂]`-modules of finite rank and the exact linear algebra
//! behind every solver: reduced row echelon forms over `ℚ`, kernels, span
//! operations, fraction-free rank over `ℚ(∂)` and bounded submodule
//! membership.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{MPoly, Rational, Var};

/// `ℤ₂` grading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    /// `(-1)^{|a||b|}`.
    pub fn sign(a: Parity, b: Parity) -> i64 {
        if a.is_odd() && b.is_odd() {
            -1
        } else {
            1
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        if self == rhs {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ordered, named, graded basis of a free `ℚ[∂]`-module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    names: Vec<String>,
    parities: Vec<Parity>,
}

impl Basis {
    pub fn new(names: Vec<String>, parities: Vec<Parity>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidBasis("rank must be at least 1".into()));
        }
        if names.len() != parities.len() {
            return Err(Error::InvalidBasis("names and parities differ in length".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidBasis(format!("duplicate basis name `{n}`")));
            }
        }
        Ok(Basis { names, parities })
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parities
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.parities[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// `(even count, odd count)`.
    pub fn superdimension(&self) -> (usize, usize) {
        let odd = self.parities.iter().filter(|p| p.is_odd()).count();
        (self.rank() - odd, odd)
    }
}

/// Element of a free module: one `∂`-polynomial per basis slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Element {
    coords: Vec<MPoly>,
}

impl Element {
    pub fn new(basis: &Basis, coords: Vec<MPoly>) -> Result<Self> {
        if coords.len() != basis.rank() {
            return Err(Error::Dimension(format!(
                "element has {} coordinates, basis rank is {}",
                coords.len(),
                basis.rank()
            )));
        }
        if let Some(p) = coords.iter().find(|p| !p.only_uses(&[Var::Partial])) {
            return Err(Error::ForbiddenVariable(format!(
                "element coordinate `{p}` must involve only d"
            )));
        }
        Ok(Element { coords })
    }

    pub fn zero(basis: &Basis) -> Self {
        Element {
            coords: vec![MPoly::zero(); basis.rank()],
        }
    }

    /// `p(∂)·aᵢ`.
    pub fn basis_vector(basis: &Basis, i: usize, p: MPoly) -> Result<Self> {
        let mut coords = vec![MPoly::zero(); basis.rank()];
        coords[i] = p;
        Element::new(basis, coords)
    }

    pub fn coords(&self) -> &[MPoly] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(MPoly::is_zero)
    }

    /// Parity of a homogeneous element; `None` for mixed support. The zero
    /// element is reported as even.
    pub fn parity(&self, basis: &Basis) -> Option<Parity> {
        let mut seen: Option<Parity> = None;
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match seen {
                None => seen = Some(basis.parity(i)),
                Some(p) if p != basis.parity(i) => return None,
                _ => {}
            }
        }
        Some(seen.unwrap_or(Parity::Even))
    }

    pub fn render(&self, basis: &Basis) -> String {
        render_vector(&self.coords, basis)
    }
}

/// Render a coordinate vector as `(p₁) a₁ + (p₂) a₂`.
pub fn render_vector(coords: &[MPoly], basis: &Basis) -> String {
    let parts: Vec<String> = coords
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| {
            if c.is_one() {
                basis.names()[i].clone()
            } else {
                format!("({}) {}", c, basis.names()[i])
            }
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Dense matrix of polynomials, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<MPoly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            entries: vec![MPoly::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = PolyMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, MPoly::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<MPoly>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(PolyMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<MPoly>]) -> Self {
        let mut m = PolyMatrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, p) in col.iter().enumerate() {
                m.set(i, j, p.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &MPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: MPoly) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn entries(&self) -> &[MPoly] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> Vec<MPoly> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<MPoly>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(MPoly::is_zero)
    }

    pub fn map(&self, f: impl Fn(&MPoly) -> MPoly) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, rhs: &PolyMatrix) -> Result<PolyMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = PolyMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.entries[idx] += &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &PolyMatrix) -> Result<PolyMatrix> {
        self.zip(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &PolyMatrix) -> Result<PolyMatrix> {
        self.zip(rhs, |a, b| a - b)
    }

    fn zip(&self, rhs: &PolyMatrix, f: impl Fn(&MPoly, &MPoly) -> MPoly) -> Result<PolyMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Dimension("shape mismatch".into()));
        }
        Ok(PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: &MPoly) -> PolyMatrix {
        self.map(|p| p * c)
    }

    pub fn only_uses(&self, vars: &[Var]) -> bool {
        self.entries.iter().all(|p| p.only_uses(vars))
    }

    /// Row-major textual rendering, one string per entry.
    pub fn render(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect())
            .collect()
    }

    /// Determinant of a square `∂`-only matrix via fraction-free elimination.
    pub fn determinant(&self) -> Result<MPoly> {
        if self.rows != self.cols {
            return Err(Error::Dimension("determinant of non-square matrix".into()));
        }
        if !self.only_uses(&[Var::Partial]) {
            return Err(Error::ForbiddenVariable("determinant needs d-only entries".into()));
        }
        let n = self.rows;
        let mut a: Vec<Vec<MPoly>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut sign = MPoly::one();
        let mut prev = MPoly::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
                return Ok(MPoly::zero());
            };
            if p != k {
                a.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = exact_div(&num, &prev);
                }
                a[i][k] = MPoly::zero();
            }
            prev = a[k][k].clone();
        }
        Ok(&sign * &a[n - 1][n - 1])
    }

    /// Transpose.
    pub fn transpose(&self) -> PolyMatrix {
        let mut t = PolyMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> PolyMatrix {
        let rows: Vec<Vec<MPoly>> = (0..self.rows)
            .filter(|&i| i != skip_row)
            .map(|i| {
                (0..self.cols)
                    .filter(|&j| j != skip_col)
                    .map(|j| self.get(i, j).clone())
                    .collect()
            })
            .collect();
        PolyMatrix::from_rows(rows).expect("minor is rectangular")
    }

    /// Classical adjugate of a square `∂`-only matrix.
    pub fn adjugate(&self) -> Result<PolyMatrix> {
        let n = self.rows;
        if n != self.cols {
            return Err(Error::Dimension("adjugate of non-square matrix".into()));
        }
        if n == 1 {
            return Ok(PolyMatrix::identity(1));
        }
        let mut adj = PolyMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(i, j).determinant()?;
                let c = if (i + j) % 2 == 1 { -c } else { c };
                adj.set(j, i, c);
            }
        }
        Ok(adj)
    }
}

fn exact_div(num: &MPoly, den: &MPoly) -> MPoly {
    if den.is_one() {
        return num.clone();
    }
    let (q, r) = num
        .div_rem_univariate(den, Var::Partial)
        .expect("fraction-free step divides d-only polynomials");
    debug_assert!(r.is_zero(), "Bareiss division must be exact");
    q
}

/// Rank of a `∂`-only matrix over `ℚ(∂)`, by fraction-free (Bareiss)
/// elimination with column skipping.
pub fn rank_over_fraction_field(m: &PolyMatrix) -> Result<usize> {
    if !m.only_uses(&[Var::Partial]) {
        return Err(Error::ForbiddenVariable(
            "rank over Q(d) needs entries in d only".into(),
        ));
    }
    let mut a: Vec<Vec<MPoly>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).clone()).collect())
        .collect();
    let rows = m.rows();
    let cols = m.cols();
    let mut prev = MPoly::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = &(&a[r][c] * &a[i][j]) - &(&a[i][c] * &a[r][j]);
                a[i][j] = exact_div(&num, &prev);
            }
            a[i][c] = MPoly::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    Ok(r)
}

/// Sparse rational vector keyed by column index.
pub type SparseVec = BTreeMap<usize, Rational>;

/// Incrementally maintained reduced row echelon form over `ℚ`.
///
/// Rows are stored normalized (pivot coefficient 1) and every pivot column is
/// zero in all other rows, so insertion needs a single reduction pass.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Rows in ascending pivot order.
    pub fn rows(&self) -> impl Iterator<Item = &SparseVec> {
        self.rows.values()
    }

    pub fn row_for_pivot(&self, c: usize) -> Option<&SparseVec> {
        self.rows.get(&c)
    }

    /// Reduce `v` against the current rows.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut v = v.clone();
        for (c, row) in &self.rows {
            if let Some(f) = v.get(c).cloned() {
                axpy(&mut v, &(-f), row);
            }
        }
        v
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Insert a vector; returns `true` when it increased the rank.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let mut v = self.reduce(v);
        let Some((&pc, pv)) = v.iter().next() else {
            return false;
        };
        let inv = Rational::one() / pv.clone();
        for val in v.values_mut() {
            *val *= &inv;
        }
        for row in self.rows.values_mut() {
            if let Some(f) = row.get(&pc).cloned() {
                axpy(row, &(-f), &v);
            }
        }
        self.rows.insert(pc, v);
        true
    }

    /// Kernel basis of the matrix whose rows were inserted, over `cols`
    /// columns: one vector per free column, in ascending free-column order.
    pub fn kernel(&self, cols: usize) -> Vec<SparseVec> {
        let mut out = Vec::new();
        for f in 0..cols {
            if self.rows.contains_key(&f) {
                continue;
            }
            let mut v = SparseVec::new();
            v.insert(f, Rational::one());
            for (pc, row) in &self.rows {
                if let Some(x) = row.get(&f) {
                    v.insert(*pc, -x.clone());
                }
            }
            out.push(v);
        }
        out
    }
}

/// `v += a·w` with zero pruning.
pub fn axpy(v: &mut SparseVec, a: &Rational, w: &SparseVec) {
    if a.is_zero() {
        return;
    }
    for (c, x) in w {
        let add = a * x;
        match v.entry(*c) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(add);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += add;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }
}

pub fn sparse_from_dense(v: &[Rational]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn dense_from_sparse(v: &SparseVec, len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

/// Kernel of a dense rational matrix (rows of equal length `cols`).
///
/// The basis is derived from the reduced row echelon form: one vector per
/// non-pivot column, in ascending column order, with the free coordinate set
/// to 1.
pub fn nullspace_over_q(rows: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut ech = Echelon::new();
    for r in rows {
        assert_eq!(r.len(), cols, "row length mismatch");
        ech.insert(&sparse_from_dense(r));
    }
    ech.kernel(cols)
        .iter()
        .map(|v| dense_from_sparse(v, cols))
        .collect()
}

/// Canonical reduced echelon basis of the span of the given vectors.
pub fn span_basis(vectors: &[SparseVec]) -> Vec<SparseVec> {
    let mut ech = Echelon::new();
    for v in vectors {
        ech.insert(v);
    }
    ech.rows().cloned().collect()
}

/// Coefficients `c` with `Σ cᵢ uᵢ ∈ span(W)`, as a basis of that subspace of
/// coefficient vectors (the pullback of `W` along the `u` family).
pub fn pullback_into_span(us: &[SparseVec], ws: &[SparseVec]) -> Vec<SparseVec> {
    // kernel of [u_1 .. u_m | w_1 .. w_n] acting on coefficient vectors
    let m = us.len();
    let mut by_coord: BTreeMap<usize, SparseVec> = BTreeMap::new();
    for (j, u) in us.iter().enumerate() {
        for (c, x) in u {
            by_coord.entry(*c).or_default().insert(j, x.clone());
        }
    }
    for (j, w) in ws.iter().enumerate() {
        for (c, x) in w {
            by_coord.entry(*c).or_default().insert(m + j, -x.clone());
        }
    }
    let mut ech = Echelon::new();
    for row in by_coord.values() {
        ech.insert(row);
    }
    let kernel = ech.kernel(m + ws.len());
    let coeffs: Vec<SparseVec> = kernel
        .into_iter()
        .map(|v| v.into_iter().filter(|(c, _)| *c < m).collect::<SparseVec>())
        .filter(|v| !v.is_empty())
        .collect();
    span_basis(&coeffs)
}

/// Outcome of a bounded membership test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    /// Witness coefficients `cⱼ(∂)` with `Σ cⱼ·genⱼ = v`.
    Member(Vec<MPoly>),
    /// No witness exists within the degree bound; not a proof of
    /// non-membership.
    NotMemberAtBound(usize),
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }
}

/// Default slack added to the witness-degree bound.
pub const DEFAULT_SLACK: usize = 2;

/// Decide whether `v` lies in the `ℚ[∂]`-span of the columns of `gens` by a
/// bounded-degree ansatz.
pub fn submodule_membership(gens: &PolyMatrix, v: &Element) -> Result<bool> {
    Ok(submodule_membership_with(gens, v.coords(), DEFAULT_SLACK)?.is_member())
}

/// Bounded membership with explicit slack; the witness degree bound is
/// `deg v + max column degree + slack`.
pub fn submodule_membership_with(
    gens: &PolyMatrix,
    v: &[MPoly],
    slack: usize,
) -> Result<Membership> {
    if !gens.only_uses(&[Var::Partial]) || v.iter().any(|p| !p.only_uses(&[Var::Partial])) {
        return Err(Error::ForbiddenVariable("membership needs d-only data".into()));
    }
    if gens.rows() != v.len() && gens.cols() > 0 {
        return Err(Error::Dimension("generator rows differ from vector length".into()));
    }
    let n = v.len();
    if v.iter().all(MPoly::is_zero) {
        return Ok(Membership::Member(vec![MPoly::zero(); gens.cols()]));
    }
    if gens.cols() == 0 {
        return Ok(Membership::NotMemberAtBound(0));
    }
    let deg_v = v.iter().map(|p| p.degree_in(Var::Partial)).max().unwrap_or(0).max(0) as usize;
    let deg_g = gens
        .entries()
        .iter()
        .map(|p| p.degree_in(Var::Partial))
        .max()
        .unwrap_or(0)
        .max(0) as usize;
    let bound = deg_v + deg_g + slack;
    // unknown (j, k): coefficient of ∂^k in c_j; row (slot i, ∂-power e)
    let ncols = gens.cols() * (bound + 1) + 1;
    let rhs_col = ncols - 1;
    let mut rows: BTreeMap<(usize, u32), SparseVec> = BTreeMap::new();
    for j in 0..gens.cols() {
        for k in 0..=bound {
            let col = j * (bound + 1) + k;
            for i in 0..n {
                for (e, c) in gens.get(i, j).terms() {
                    let row = rows.entry((i, e[0] + k as u32)).or_default();
                    *row.entry(col).or_insert_with(Rational::zero) += c;
                }
            }
        }
    }
    for (i, p) in v.iter().enumerate() {
        for (e, c) in p.terms() {
            rows.entry((i, e[0])).or_default().insert(rhs_col, -c.clone());
        }
    }
    let mut ech = Echelon::new();
    for r in rows.values_mut() {
        r.retain(|_, x| !x.is_zero());
        ech.insert(r);
    }
    // solvable iff the rhs column is free in some kernel vector with weight 1
    let kernel = ech.kernel(ncols);
    let Some(sol) = kernel.iter().find(|kv| kv.contains_key(&rhs_col)) else {
        return Ok(Membership::NotMemberAtBound(bound));
    };
    let scale = sol[&rhs_col].clone();
    let mut witness = vec![MPoly::zero(); gens.cols()];
    for (col, x) in sol {
        if *col == rhs_col {
            continue;
        }
        let (j, k) = (col / (bound + 1), col % (bound + 1));
        witness[j] += &MPoly::monomial(x / &scale, [k as u32, 0, 0, 0]);
    }
    Ok(Membership::Member(witness))
}
