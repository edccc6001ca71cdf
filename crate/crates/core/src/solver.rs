//! Derivation-type identities as finite `ℚ`-linear systems over the
//! coefficients of an unknown conformal map with bounded entry degrees.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cend::{ConfMap, GroupSpec, Morphism, Operator, Twist};
use crate::error::{Error, Result};
use crate::gmod::{
    pullback_into_span, rank_over_fraction_field, span_basis, Echelon, Parity, PolyMatrix,
    SparseVec,
};
use crate::lcsa::{poly_kernel, Algebra};
use crate::poly::{MPoly, Rational, Var};

/// Entry-degree limits for the unknown map: `∂`-degree and `λ`-degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DegreeBound {
    pub d_partial: u32,
    pub d_lambda: u32,
    pub slack: u32,
}

impl DegreeBound {
    pub fn new(d_partial: u32, d_lambda: u32) -> Self {
        DegreeBound {
            d_partial,
            d_lambda,
            slack: 2,
        }
    }

    /// Both limits raised by `k`.
    pub fn raised(&self, k: u32) -> Self {
        DegreeBound {
            d_partial: self.d_partial + k,
            d_lambda: self.d_lambda + k,
            slack: self.slack,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"d_partial": self.d_partial, "d_lambda": self.d_lambda, "slack": self.slack})
    }
}

impl Default for DegreeBound {
    fn default() -> Self {
        DegreeBound::new(2, 2)
    }
}

impl fmt::Display for DegreeBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.d_partial, self.d_lambda)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EquationKind {
    Der,
    SigmaTau(Twist, Twist),
    Abg(Rational, Rational, Rational),
    GDer,
    QDer,
    Centroid,
    QCentroid,
    ZDer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Slot {
    /// `d_λ([a_μ b])`
    Out,
    /// `[(d_λ a)_{λ+μ} σ(b)]`
    Left,
    /// `(−1)^{|a|θ}[τ(a)_μ d_λ(b)]`
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Term {
    slot: Slot,
    role: usize,
    coef: Rational,
    twist: Option<Morphism>,
}

impl Term {
    fn new(slot: Slot, role: usize, coef: i64) -> Self {
        Term {
            slot,
            role,
            coef: Rational::from_integer(coef.into()),
            twist: None,
        }
    }
}

fn fmt_q(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl EquationKind {
    pub fn abg(a: i64, b: i64, g: i64) -> Self {
        EquationKind::Abg(crate::poly::int(a), crate::poly::int(b), crate::poly::int(g))
    }

    pub fn sigma_tau(sigma: impl Into<Twist>, tau: impl Into<Twist>) -> Self {
        EquationKind::SigmaTau(sigma.into(), tau.into())
    }

    /// Unknown maps involved: `f` plus any existential companions.
    pub fn roles(&self) -> usize {
        match self {
            EquationKind::GDer => 3,
            EquationKind::QDer => 2,
            _ => 1,
        }
    }

    pub fn label(&self) -> String {
        match self {
            EquationKind::Der => "der".into(),
            EquationKind::SigmaTau(s, t) => format!("sigma_tau({},{})", s.name(), t.name()),
            EquationKind::Abg(a, b, g) => format!("abg({},{},{})", fmt_q(a), fmt_q(b), fmt_q(g)),
            EquationKind::GDer => "gder".into(),
            EquationKind::QDer => "qder".into(),
            EquationKind::Centroid => "centroid".into(),
            EquationKind::QCentroid => "qcentroid".into(),
            EquationKind::ZDer => "zder".into(),
        }
    }

    fn equations(&self) -> Vec<Vec<Term>> {
        use Slot::*;
        match self {
            EquationKind::Der => vec![vec![
                Term::new(Out, 0, 1),
                Term::new(Left, 0, -1),
                Term::new(Right, 0, -1),
            ]],
            EquationKind::SigmaTau(s, t) => {
                let mut l = Term::new(Left, 0, -1);
                l.twist = Some(s.morphism().clone());
                let mut r = Term::new(Right, 0, -1);
                r.twist = Some(t.morphism().clone());
                vec![vec![Term::new(Out, 0, 1), l, r]]
            }
            EquationKind::Abg(a, b, g) => vec![vec![
                Term { slot: Out, role: 0, coef: a.clone(), twist: None },
                Term { slot: Left, role: 0, coef: -b.clone(), twist: None },
                Term { slot: Right, role: 0, coef: -g.clone(), twist: None },
            ]],
            EquationKind::GDer => vec![vec![
                Term::new(Left, 0, 1),
                Term::new(Right, 1, 1),
                Term::new(Out, 2, -1),
            ]],
            EquationKind::QDer => vec![vec![
                Term::new(Left, 0, 1),
                Term::new(Right, 0, 1),
                Term::new(Out, 1, -1),
            ]],
            EquationKind::Centroid => vec![
                vec![Term::new(Left, 0, 1), Term::new(Right, 0, -1)],
                vec![Term::new(Left, 0, 1), Term::new(Out, 0, -1)],
            ],
            EquationKind::QCentroid => vec![vec![Term::new(Left, 0, 1), Term::new(Right, 0, -1)]],
            EquationKind::ZDer => vec![vec![Term::new(Left, 0, 1)], vec![Term::new(Out, 0, 1)]],
        }
    }

    fn twists(&self) -> Vec<&Twist> {
        match self {
            EquationKind::SigmaTau(s, t) => vec![s, t],
            _ => vec![],
        }
    }
}

/// A linear condition on the unknown map(s).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Constraint {
    Equation(EquationKind),
    /// `d_λ ∘ σ = σ ∘ d_λ`.
    CommutesWith(Morphism),
    /// `d_λ(g) = 0` for every listed element.
    Annihilates(Vec<Vec<MPoly>>),
    /// `[(d_λ a)_μ b] = 0` for every basis vector `b`.
    BracketKills(Vec<MPoly>),
    /// `(d_λ σ − σ d_λ)(R)` lies in the center.
    CommutatorCentral(Morphism),
}

impl Constraint {
    fn roles(&self) -> usize {
        match self {
            Constraint::Equation(k) => k.roles(),
            _ => 1,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Constraint::Equation(k) => k.label(),
            Constraint::CommutesWith(m) => format!("commutes({})", m.name()),
            Constraint::Annihilates(g) => format!("annihilates[{}]", g.len()),
            Constraint::BracketKills(_) => "bracket_kills".into(),
            Constraint::CommutatorCentral(m) => format!("commutator_central({})", m.name()),
        }
    }
}

/// Residual of a derivation-type equation for maps already evaluated at `λ`,
/// over all ordered basis pairs, with `μ` the inner bracket slot.
fn equation_residual(
    alg: &Algebra,
    terms: &[Term],
    theta: Parity,
    ops: &[Operator],
    lam: &MPoly,
    mu: &MPoly,
) -> Vec<MPoly> {
    let n = alg.rank();
    let total = lam + mu;
    let mut out = Vec::with_capacity(n * n * n);
    let cols: Vec<Vec<Vec<MPoly>>> = ops
        .iter()
        .map(|op| (0..n).map(|i| op.apply(&alg.unit(i))).collect())
        .collect();
    for i in 0..n {
        for j in 0..n {
            let mut acc = vec![MPoly::zero(); n];
            let inner = alg
                .structure(i, j)
                .iter()
                .map(|p| p.substitute(Var::X0, mu))
                .collect::<Vec<_>>();
            for t in terms {
                if t.coef.is_zero() || ops[t.role].matrix.is_zero() {
                    continue;
                }
                let v = match t.slot {
                    Slot::Out => ops[t.role].apply(&inner),
                    Slot::Left => {
                        let b = match &t.twist {
                            Some(s) => s.column(j),
                            None => alg.unit(j),
                        };
                        alg.bracket_raw(&cols[t.role][i], &b, &total)
                    }
                    Slot::Right => {
                        let a = match &t.twist {
                            Some(s) => s.column(i),
                            None => alg.unit(i),
                        };
                        let r = alg.bracket_raw(&a, &cols[t.role][j], mu);
                        if Parity::sign(alg.parity(i), theta) < 0 {
                            r.iter().map(|p| -p).collect()
                        } else {
                            r
                        }
                    }
                };
                let c = MPoly::constant(t.coef.clone());
                for (a, b) in acc.iter_mut().zip(&v) {
                    if !b.is_zero() {
                        *a += &(b * &c);
                    }
                }
            }
            out.extend(acc);
        }
    }
    out
}

/// Residual of a constraint for maps evaluated at `λ` (one operator per
/// role), with `μ` the auxiliary slot.
pub(crate) fn constraint_residual(
    alg: &Algebra,
    c: &Constraint,
    theta: Parity,
    ops: &[Operator],
    lam: &MPoly,
    mu: &MPoly,
) -> Vec<MPoly> {
    match c {
        Constraint::Equation(kind) => kind
            .equations()
            .iter()
            .flat_map(|terms| equation_residual(alg, terms, theta, ops, lam, mu))
            .collect(),
        Constraint::CommutesWith(s) => {
            let a = ops[0].then(&s.op());
            let b = s.op().then(&ops[0]);
            a.matrix.sub(&b.matrix).expect("same shape").entries().to_vec()
        }
        Constraint::Annihilates(gens) => gens.iter().flat_map(|g| ops[0].apply(g)).collect(),
        Constraint::BracketKills(a) => {
            let da = ops[0].apply(a);
            (0..alg.rank())
                .flat_map(|j| alg.bracket_raw(&da, &alg.unit(j), mu))
                .collect()
        }
        Constraint::CommutatorCentral(s) => {
            let e = ops[0].then(&s.op()).sub(&s.op().then(&ops[0]));
            let n = alg.rank();
            (0..n)
                .flat_map(|i| {
                    let col = e.matrix.column(i);
                    (0..n).flat_map(move |j| alg.bracket_raw(&col, &alg.unit(j), mu))
                })
                .collect()
        }
    }
}

/// Residual of a derivation-type identity for a map family evaluated at the
/// slot `lam`, with inner bracket slot `mu`. Used for maps that are not plain
/// elements of `Cend(R)`, such as `gc` brackets with a live parameter.
pub fn residual_for_operator(
    alg: &Algebra,
    kind: &EquationKind,
    theta: Parity,
    op: &Operator,
    lam: &MPoly,
    mu: &MPoly,
) -> Vec<MPoly> {
    constraint_residual(alg, &Constraint::Equation(kind.clone()), theta, std::slice::from_ref(op), lam, mu)
}

/// Residual of `constraints` for concrete maps (one per role, missing roles
/// read as zero), at `λ = x₀`, `μ = x₁`.
pub fn residual(alg: &Algebra, constraints: &[Constraint], theta: Parity, maps: &[ConfMap]) -> Vec<MPoly> {
    let x0 = MPoly::var(Var::X0);
    let x1 = MPoly::var(Var::X1);
    let mut ops: Vec<Operator> = maps.iter().map(|m| m.at(&x0)).collect();
    let roles = constraints.iter().map(Constraint::roles).max().unwrap_or(1);
    while ops.len() < roles {
        ops.push(ConfMap::zero(alg.rank(), theta).at(&x0));
    }
    constraints
        .iter()
        .flat_map(|c| constraint_residual(alg, c, theta, &ops, &x0, &x1))
        .collect()
}

/// Position of the coefficient of `∂^p x₀^q` in entry `(k, i)` among the
/// unknowns of one role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Indexer {
    n: usize,
    parity: Parity,
    bound: DegreeBound,
    entries: Vec<(usize, usize)>,
}

impl Indexer {
    pub fn new(alg: &Algebra, parity: Parity, bound: DegreeBound) -> Self {
        let n = alg.rank();
        let mut entries = Vec::new();
        for i in 0..n {
            for k in 0..n {
                if alg.parity(k) == alg.parity(i) + parity {
                    entries.push((k, i));
                }
            }
        }
        Indexer {
            n,
            parity,
            bound,
            entries,
        }
    }

    fn per_entry(&self) -> usize {
        ((self.bound.d_partial + 1) * (self.bound.d_lambda + 1)) as usize
    }

    pub fn len(&self) -> usize {
        self.entries.len() * self.per_entry()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn decode(&self, idx: usize) -> (usize, usize, u32, u32) {
        let pe = self.per_entry();
        let (k, i) = self.entries[idx / pe];
        let r = (idx % pe) as u32;
        let w = self.bound.d_lambda + 1;
        (k, i, r / w, r % w)
    }

    pub fn index(&self, k: usize, i: usize, p: u32, q: u32) -> Option<usize> {
        if p > self.bound.d_partial || q > self.bound.d_lambda {
            return None;
        }
        let e = self.entries.iter().position(|&x| x == (k, i))?;
        Some(e * self.per_entry() + (p * (self.bound.d_lambda + 1) + q) as usize)
    }

    pub fn unit_map(&self, idx: usize) -> ConfMap {
        let (k, i, p, q) = self.decode(idx);
        let mut m = PolyMatrix::zeros(self.n, self.n);
        m.set(k, i, MPoly::partial_lambda(Rational::one(), p, q));
        ConfMap::from_parts(self.parity, m)
    }

    pub fn assemble(&self, v: &SparseVec, offset: usize) -> ConfMap {
        let mut m = PolyMatrix::zeros(self.n, self.n);
        for (c, x) in v.range(offset..offset + self.len()) {
            let (k, i, p, q) = self.decode(c - offset);
            let e = m.get(k, i) + &MPoly::partial_lambda(x.clone(), p, q);
            m.set(k, i, e);
        }
        ConfMap::from_parts(self.parity, m)
    }

    /// Coordinates of a map, or `None` when it leaves the bounded slice.
    pub fn coords(&self, f: &ConfMap) -> Option<SparseVec> {
        let mut v = SparseVec::new();
        for k in 0..self.n {
            for i in 0..self.n {
                for (e, x) in f.matrix().get(k, i).terms() {
                    if e[2] != 0 || e[3] != 0 {
                        return None;
                    }
                    let idx = self.index(k, i, e[0], e[1])?;
                    v.insert(idx, x.clone());
                }
            }
        }
        Some(v)
    }
}

/// Constraints plus existential witnesses for every basis element.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Part {
    constraints: Vec<Constraint>,
    roles: usize,
    /// Per basis element, the maps filling roles `1..roles`.
    aux: Vec<Vec<ConfMap>>,
}

#[derive(Debug, Clone)]
pub struct SolutionSpace {
    label: String,
    parity: Parity,
    bound: DegreeBound,
    indexer: Indexer,
    parts: Vec<Part>,
    basis: Vec<ConfMap>,
    coords: Vec<SparseVec>,
    residual_ok: bool,
    pub saturated: Option<bool>,
}

impl SolutionSpace {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn bound(&self) -> DegreeBound {
        self.bound
    }

    pub fn basis(&self) -> &[ConfMap] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn coords(&self) -> &[SparseVec] {
        &self.coords
    }

    pub fn indexer(&self) -> &Indexer {
        &self.indexer
    }

    pub fn residual_check(&self) -> bool {
        self.residual_ok
    }

    pub fn constraints(&self) -> Vec<Constraint> {
        self.parts.iter().flat_map(|p| p.constraints.clone()).collect()
    }

    /// Witness tuples `(f, f′, …)` for each basis element of the first part.
    pub fn witnesses(&self) -> Vec<Vec<ConfMap>> {
        self.basis
            .iter()
            .enumerate()
            .map(|(b, f)| {
                let mut t = vec![f.clone()];
                t.extend(self.parts[0].aux[b].iter().cloned());
                t
            })
            .collect()
    }

    pub fn contains(&self, f: &ConfMap) -> bool {
        if f.is_zero() {
            return true;
        }
        if f.parity() != self.parity {
            return false;
        }
        let Some(v) = self.indexer.coords(f) else {
            return false;
        };
        let mut ech = Echelon::new();
        for c in &self.coords {
            ech.insert(c);
        }
        ech.contains(&v)
    }

    /// Coordinates of `v` in the echelon basis (values at the pivots).
    fn express(&self, v: &SparseVec) -> Vec<Rational> {
        self.coords
            .iter()
            .map(|row| {
                let (piv, _) = row.iter().next().expect("basis rows are nonzero");
                v.get(piv).cloned().unwrap_or_else(Rational::zero)
            })
            .collect()
    }

    fn recombine(&self, part: &Part, coeffs: &[Rational]) -> Vec<ConfMap> {
        (1..part.roles)
            .map(|r| {
                let mut acc = ConfMap::zero(self.indexer.n, self.parity);
                for (b, c) in coeffs.iter().enumerate() {
                    if !c.is_zero() {
                        acc = acc.add(&part.aux[b][r - 1].scale(c));
                    }
                }
                acc
            })
            .collect()
    }

    fn verify(&mut self, alg: &Algebra) {
        let theta = self.parity;
        self.residual_ok = self.basis.par_iter().enumerate().all(|(b, f)| {
            self.parts.iter().all(|part| {
                let mut maps = vec![f.clone()];
                maps.extend(part.aux[b].iter().cloned());
                residual(alg, &part.constraints, theta, &maps)
                    .iter()
                    .all(MPoly::is_zero)
            })
        });
    }

    /// `ℚ`-basis indices of a generating set over `ℚ[∂]`: elements not in
    /// `∂S ∩ S` plus the previously chosen ones.
    pub fn generator_indices(&self) -> Vec<usize> {
        let mut keys: BTreeMap<(usize, usize, u32, u32), usize> = BTreeMap::new();
        let mut free = |m: &PolyMatrix| -> SparseVec {
            let mut v = SparseVec::new();
            for k in 0..m.rows() {
                for i in 0..m.cols() {
                    for (e, x) in m.get(k, i).terms() {
                        let next = keys.len();
                        let idx = *keys.entry((k, i, e[0], e[1])).or_insert(next);
                        v.insert(idx, x.clone());
                    }
                }
            }
            v
        };
        let ws: Vec<SparseVec> = self.basis.iter().map(|f| free(f.matrix())).collect();
        let us: Vec<SparseVec> = self.basis.iter().map(|f| free(f.partial().matrix())).collect();
        let coeffs = pullback_into_span(&us, &ws);
        let mut ech = Echelon::new();
        for c in &coeffs {
            let mut v = SparseVec::new();
            for (a, x) in c {
                crate::gmod::axpy(&mut v, x, &us[*a]);
            }
            ech.insert(&v);
        }
        let mut gens = Vec::new();
        for (b, w) in ws.iter().enumerate() {
            if ech.insert(w) {
                gens.push(b);
            }
        }
        gens
    }

    pub fn generators_over_cpartial(&self) -> Vec<ConfMap> {
        self.generator_indices()
            .into_iter()
            .map(|i| self.basis[i].clone())
            .collect()
    }

    /// Rank over `ℚ(∂)` of the span, where `∂` acts on `Cend(R)` by `−λ`.
    pub fn rank_at_bound(&self) -> usize {
        let t = MPoly::var(Var::Partial);
        let mut keys: BTreeMap<(usize, usize, u32), usize> = BTreeMap::new();
        let mut cols: Vec<BTreeMap<usize, MPoly>> = Vec::new();
        for f in &self.basis {
            let mut col: BTreeMap<usize, MPoly> = BTreeMap::new();
            let m = f.matrix();
            for k in 0..m.rows() {
                for i in 0..m.cols() {
                    for (e, x) in m.get(k, i).terms() {
                        let next = keys.len();
                        let idx = *keys.entry((k, i, e[0])).or_insert(next);
                        let term = (-&t).pow(e[1]).scale(x);
                        *col.entry(idx).or_insert_with(MPoly::zero) += &term;
                    }
                }
            }
            cols.push(col);
        }
        let rows = keys.len();
        let dense: Vec<Vec<MPoly>> = cols
            .iter()
            .map(|c| (0..rows).map(|r| c.get(&r).cloned().unwrap_or_else(MPoly::zero)).collect())
            .collect();
        if dense.is_empty() || rows == 0 {
            return 0;
        }
        rank_over_fraction_field(&PolyMatrix::from_columns(rows, &dense)).expect("d-only entries")
    }

    pub fn to_json(&self) -> Value {
        let basis: Vec<Value> = self.basis.iter().map(|f| json!(f.render())).collect();
        let mut obj = json!({
            "kind": self.label,
            "parity": self.parity.as_str(),
            "bound": self.bound.to_json(),
            "dim_Q": self.dim(),
            "generators_over_Cpartial": self.generator_indices().len(),
            "rank_at_bound": self.rank_at_bound(),
            "saturated": self.saturated,
            "basis": basis,
            "residual_check": if self.residual_ok { "pass" } else { "fail" },
        });
        if self.parts[0].roles > 1 {
            let w: Vec<Value> = self
                .witnesses()
                .iter()
                .map(|t| Value::Array(t.iter().map(|f| json!(f.render())).collect()))
                .collect();
            obj["witnesses"] = Value::Array(w);
        }
        obj
    }
}

fn validate(alg: &Algebra, constraints: &[Constraint]) -> Result<()> {
    alg.require_axioms()?;
    for c in constraints {
        match c {
            Constraint::Equation(k) => {
                for t in k.twists() {
                    if t.morphism().rank() != alg.rank() {
                        return Err(Error::Dimension(format!("map {} has the wrong rank", t.name())));
                    }
                    if let Twist::Strict(m) = t {
                        if !m.is_automorphism(alg) {
                            return Err(Error::NotAutomorphism(m.name().to_string()));
                        }
                    }
                }
            }
            Constraint::CommutesWith(m) | Constraint::CommutatorCentral(m) => {
                if m.rank() != alg.rank() {
                    return Err(Error::Dimension(format!("map {} has the wrong rank", m.name())));
                }
            }
            Constraint::Annihilates(gs) => {
                if gs.iter().any(|g| g.len() != alg.rank()) {
                    return Err(Error::Dimension("annihilated element has wrong length".into()));
                }
            }
            Constraint::BracketKills(a) => {
                if a.len() != alg.rank() {
                    return Err(Error::Dimension("element has wrong length".into()));
                }
            }
        }
    }
    Ok(())
}

/// Solve a single derivation-type equation of degree `parity`.
pub fn solve(
    alg: &Algebra,
    kind: &EquationKind,
    parity: Parity,
    bound: DegreeBound,
) -> Result<SolutionSpace> {
    solve_constraints(alg, &[Constraint::Equation(kind.clone())], parity, bound, &kind.label())
}

/// Solve the conjunction of several constraints (sharing one unknown `f` and
/// role-wise companions).
pub fn solve_constraints(
    alg: &Algebra,
    constraints: &[Constraint],
    parity: Parity,
    bound: DegreeBound,
    label: &str,
) -> Result<SolutionSpace> {
    validate(alg, constraints)?;
    let indexer = Indexer::new(alg, parity, bound);
    let roles = constraints.iter().map(Constraint::roles).max().unwrap_or(1);
    let per = indexer.len();
    let total = per * roles;
    let x0 = MPoly::var(Var::X0);
    let x1 = MPoly::var(Var::X1);
    let n = alg.rank();
    let zero_op = ConfMap::zero(n, parity).at(&x0);
    let columns: Vec<Vec<MPoly>> = (0..total)
        .into_par_iter()
        .map(|c| {
            let (role, idx) = (c / per, c % per);
            let mut ops = vec![zero_op.clone(); roles];
            ops[role] = indexer.unit_map(idx).at(&x0);
            constraints
                .iter()
                .flat_map(|k| constraint_residual(alg, k, parity, &ops, &x0, &x1))
                .collect()
        })
        .collect();
    let kernel = poly_kernel(&columns);
    let rows = span_basis(&kernel);
    let mut basis = Vec::new();
    let mut coords = Vec::new();
    let mut aux = Vec::new();
    for row in rows.iter().filter(|r| r.keys().next().is_some_and(|&p| p < per)) {
        basis.push(indexer.assemble(row, 0));
        coords.push(row.range(..per).map(|(k, v)| (*k, v.clone())).collect());
        aux.push((1..roles).map(|r| indexer.assemble(row, r * per)).collect());
    }
    let mut space = SolutionSpace {
        label: label.to_string(),
        parity,
        bound,
        indexer,
        parts: vec![Part {
            constraints: constraints.to_vec(),
            roles,
            aux,
        }],
        basis,
        coords,
        residual_ok: false,
        saturated: None,
    };
    space.verify(alg);
    Ok(space)
}

fn compatible(s1: &SolutionSpace, s2: &SolutionSpace) -> Result<()> {
    if s1.bound != s2.bound || s1.parity != s2.parity || s1.indexer != s2.indexer {
        return Err(Error::BoundMismatch(format!(
            "{} {} vs {} {}",
            s1.parity, s1.bound, s2.parity, s2.bound
        )));
    }
    Ok(())
}

/// `ℚ`-intersection of two solution spaces at the same bound and parity.
pub fn intersect(alg: &Algebra, s1: &SolutionSpace, s2: &SolutionSpace) -> Result<SolutionSpace> {
    compatible(s1, s2)?;
    let coeffs = pullback_into_span(&s1.coords, &s2.coords);
    let vecs: Vec<SparseVec> = coeffs
        .iter()
        .map(|c| {
            let mut v = SparseVec::new();
            for (a, x) in c {
                crate::gmod::axpy(&mut v, x, &s1.coords[*a]);
            }
            v
        })
        .collect();
    let coords = span_basis(&vecs);
    let basis: Vec<ConfMap> = coords.iter().map(|v| s1.indexer.assemble(v, 0)).collect();
    let mut parts = Vec::new();
    for s in [s1, s2] {
        for part in &s.parts {
            let aux = coords
                .iter()
                .map(|v| s.recombine(part, &s.express(v)))
                .collect();
            parts.push(Part {
                constraints: part.constraints.clone(),
                roles: part.roles,
                aux,
            });
        }
    }
    let mut out = SolutionSpace {
        label: format!("intersect({},{})", s1.label, s2.label),
        parity: s1.parity,
        bound: s1.bound,
        indexer: s1.indexer.clone(),
        parts,
        basis,
        coords,
        residual_ok: false,
        saturated: None,
    };
    out.verify(alg);
    Ok(out)
}

/// Mutual containment of the two spans.
pub fn space_equal(s1: &SolutionSpace, s2: &SolutionSpace) -> Result<bool> {
    compatible(s1, s2)?;
    Ok(s1.coords == s2.coords)
}

/// `s1 ⊆ s2`.
pub fn space_contained(s1: &SolutionSpace, s2: &SolutionSpace) -> Result<bool> {
    compatible(s1, s2)?;
    let mut ech = Echelon::new();
    for c in &s2.coords {
        ech.insert(c);
    }
    Ok(s1.coords.iter().all(|c| ech.contains(c)))
}

/// Commutation-constrained pieces of the interiors of `CDer_G`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InteriorKind {
    Plus,
    Minus,
    Star,
}

impl InteriorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InteriorKind::Plus => "plus",
            InteriorKind::Minus => "minus",
            InteriorKind::Star => "star",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "plus" | "+" => Some(InteriorKind::Plus),
            "minus" | "-" => Some(InteriorKind::Minus),
            "star" | "*" => Some(InteriorKind::Star),
            _ => None,
        }
    }
}

/// Constraints defining the `σᵏ` piece of an interior of `CDer_G`, where
/// `σ` is the first generator of `G`.
pub fn interior_constraints(
    group: &GroupSpec,
    sigma_power: i64,
    interior: InteriorKind,
) -> Result<Vec<Constraint>> {
    let sigma = group
        .generators()
        .first()
        .ok_or_else(|| Error::Invalid("group has no generators".into()))?;
    let sk = sigma.power(sigma_power)?;
    let mut cs = vec![Constraint::Equation(EquationKind::sigma_tau(
        sk.clone(),
        Morphism::identity(sigma.rank()),
    ))];
    match interior {
        InteriorKind::Plus => cs.push(Constraint::CommutesWith(sk)),
        InteriorKind::Minus => {
            cs.extend(group.generators().iter().cloned().map(Constraint::CommutesWith))
        }
        InteriorKind::Star => {}
    }
    Ok(cs)
}

pub fn solve_interior(
    alg: &Algebra,
    group: &GroupSpec,
    sigma_power: i64,
    interior: InteriorKind,
    parity: Parity,
    bound: DegreeBound,
) -> Result<SolutionSpace> {
    let cs = interior_constraints(group, sigma_power, interior)?;
    let label = format!("interior_{}(sigma^{})", interior.as_str(), sigma_power);
    solve_constraints(alg, &cs, parity, bound, &label)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    pub bound: DegreeBound,
    pub dim_q: usize,
    pub generators: usize,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    pub saturated: bool,
    /// Rank at the largest bound; meaningful only when saturated.
    pub rank: usize,
}

impl ScanReport {
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({"bound": r.bound.to_json(), "dim_Q": r.dim_q, "generators": r.generators, "rank": r.rank})
            })
            .collect();
        json!({
            "rows": rows,
            "saturated": self.saturated,
            "rank": if self.saturated { json!(self.rank) } else { json!("unbounded at scan limit") },
        })
    }
}

/// Re-solve at `bound₀ + s` for `s < steps`; saturation means the generator
/// count and rank agree over the last two bounds.
pub fn saturation_scan(
    alg: &Algebra,
    constraints: &[Constraint],
    parity: Parity,
    bound0: DegreeBound,
    steps: u32,
) -> Result<ScanReport> {
    if steps < 2 {
        return Err(Error::Invalid("a saturation scan needs at least two steps".into()));
    }
    let mut rows = Vec::new();
    for s in 0..steps {
        let b = bound0.raised(s);
        let sp = solve_constraints(alg, constraints, parity, b, "scan")?;
        rows.push(ScanRow {
            bound: b,
            dim_q: sp.dim(),
            generators: sp.generator_indices().len(),
            rank: sp.rank_at_bound(),
        });
    }
    let (a, b) = (&rows[rows.len() - 2], &rows[rows.len() - 1]);
    let saturated = a.generators == b.generators && a.rank == b.rank;
    let rank = b.rank;
    Ok(ScanReport {
        rows,
        saturated,
        rank,
    })
}

/// Solve at `bound` and set the saturation flag from a re-solve at
/// `bound + 1`.
pub fn solve_with_saturation(
    alg: &Algebra,
    constraints: &[Constraint],
    parity: Parity,
    bound: DegreeBound,
    label: &str,
) -> Result<SolutionSpace> {
    let mut sp = solve_constraints(alg, constraints, parity, bound, label)?;
    let next = solve_constraints(alg, constraints, parity, bound.raised(1), label)?;
    sp.saturated = Some(
        sp.generator_indices().len() == next.generator_indices().len()
            && sp.rank_at_bound() == next.rank_at_bound(),
    );
    Ok(sp)
}

/// All entries of one role permitted by the grading, as a solution space
/// with no constraints.
pub fn full_space(alg: &Algebra, parity: Parity, bound: DegreeBound) -> Result<SolutionSpace> {
    solve_constraints(alg, &[], parity, bound, "cend")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::shorthand::*;

    fn b22() -> DegreeBound {
        DegreeBound::new(2, 2)
    }

    #[test]
    fn abelian_der_is_everything() {
        let a = Algebra::builtin("abelian(1|0)").unwrap();
        let s = solve(&a, &EquationKind::Der, Parity::Even, DegreeBound::new(1, 1)).unwrap();
        assert_eq!(s.dim(), 4);
        assert!(s.residual_check());
    }

    #[test]
    fn virasoro_der_is_inner() {
        let a = Algebra::builtin("virasoro").unwrap();
        let s = solve(&a, &EquationKind::Der, Parity::Even, b22()).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.residual_check());
        assert_eq!(s.generator_indices().len(), 1);
        assert_eq!(s.rank_at_bound(), 1);
        let ad = a.adjoint(&crate::gmod::Element::new(a.basis(), vec![c(1)]).unwrap()).unwrap();
        assert!(s.contains(&ad));
        assert!(s.contains(&ad.partial()));
        let z = solve(&a, &EquationKind::Der, Parity::Even, DegreeBound::new(0, 0)).unwrap();
        assert_eq!(z.dim(), 0);
    }

    #[test]
    fn virasoro_abg100_is_zero() {
        let a = Algebra::builtin("virasoro").unwrap();
        let s = solve(&a, &EquationKind::abg(1, 0, 0), Parity::Even, b22()).unwrap();
        assert_eq!(s.dim(), 0);
    }

    #[test]
    fn current_algebra_der_contains_scaled_identity() {
        let a = Algebra::builtin("cur_sl2").unwrap();
        let s = solve(&a, &EquationKind::Der, Parity::Even, DegreeBound::new(1, 1)).unwrap();
        let id = ConfMap::identity(3);
        assert!(s.contains(&ConfMap::from_parts(Parity::Even, id.matrix().scale(&(d() + x())))));
        let h = crate::gmod::Element::new(a.basis(), vec![c(0), c(1), c(0)]).unwrap();
        assert!(s.contains(&a.adjoint(&h).unwrap()));
        assert_eq!(s.rank_at_bound(), 4);
    }

    #[test]
    fn intersect_and_equal() {
        let a = Algebra::builtin("virasoro").unwrap();
        let s = solve(&a, &EquationKind::Der, Parity::Even, b22()).unwrap();
        let full = full_space(&a, Parity::Even, b22()).unwrap();
        assert!(space_equal(&intersect(&a, &s, &s).unwrap(), &s).unwrap());
        assert!(space_equal(&intersect(&a, &s, &full).unwrap(), &s).unwrap());
        let other = solve(&a, &EquationKind::Der, Parity::Even, DegreeBound::new(1, 1)).unwrap();
        assert!(space_equal(&s, &other).is_err());
    }

    #[test]
    fn gder_projects_onto_f() {
        let a = Algebra::builtin("virasoro").unwrap();
        let g = solve(&a, &EquationKind::GDer, Parity::Even, DegreeBound::new(1, 1)).unwrap();
        assert!(g.residual_check());
        let d = solve(&a, &EquationKind::Der, Parity::Even, DegreeBound::new(1, 1)).unwrap();
        assert!(space_contained(&d, &g).unwrap());
        assert_eq!(g.witnesses().first().map(Vec::len), Some(3));
    }

    #[test]
    fn abelian_never_saturates() {
        let a = Algebra::builtin("abelian(1|0)").unwrap();
        let r = saturation_scan(&a, &[Constraint::Equation(EquationKind::Der)], Parity::Even, DegreeBound::new(1, 1), 2).unwrap();
        assert!(!r.saturated);
    }

    #[test]
    fn virasoro_saturates_at_rank_one() {
        let a = Algebra::builtin("virasoro").unwrap();
        let r = saturation_scan(&a, &[Constraint::Equation(EquationKind::Der)], Parity::Even, b22(), 2).unwrap();
        assert!(r.saturated);
        assert_eq!(r.rank, 1);
    }
}
