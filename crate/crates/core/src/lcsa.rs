//! Lie conformal superalgebras given by a λ-bracket structure table on a free
//! `ℚ[∂]`-module.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::cend::ConfMap;
use crate::error::{Error, Result};
use crate::gmod::{Basis, Echelon, Element, Parity, PolyMatrix, SparseVec};
use crate::poly::{MPoly, Rational, Var};

/// Structure table entry `[aᵢ_λ aⱼ] = Σₖ pₖ(∂, λ) aₖ`, stored for `i ≤ j`.
pub type Table = BTreeMap<(usize, usize), Vec<MPoly>>;

#[derive(Debug)]
pub struct Algebra {
    name: String,
    basis: Basis,
    table: Table,
    axioms: OnceLock<AxiomReport>,
}

impl Clone for Algebra {
    fn clone(&self) -> Self {
        let axioms = OnceLock::new();
        if let Some(r) = self.axioms.get() {
            let _ = axioms.set(r.clone());
        }
        Algebra {
            name: self.name.clone(),
            basis: self.basis.clone(),
            table: self.table.clone(),
            axioms,
        }
    }
}

impl PartialEq for Algebra {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis && self.table == other.table
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    /// `C2λ` or `C3λ`.
    pub axiom: String,
    pub witness: Vec<String>,
    pub residual: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub passed: bool,
    pub violations: Vec<AxiomViolation>,
}

impl Algebra {
    /// Build an algebra from its stored half of the table. Entries must have
    /// `i ≤ j`, use only `∂` and `x₀`, and respect the grading.
    pub fn new(name: impl Into<String>, basis: Basis, table: Table) -> Result<Self> {
        let n = basis.rank();
        for (&(i, j), v) in &table {
            if i > j {
                return Err(Error::Table(format!(
                    "pair ({i},{j}) must be declared with i <= j"
                )));
            }
            if j >= n || v.len() != n {
                return Err(Error::Dimension(format!("table entry ({i},{j}) out of range")));
            }
            let want = basis.parity(i) + basis.parity(j);
            for (k, p) in v.iter().enumerate() {
                if !p.only_uses(&[Var::Partial, Var::X0]) {
                    return Err(Error::ForbiddenVariable(format!(
                        "structure polynomial `{p}` may involve only d and x"
                    )));
                }
                if !p.is_zero() && basis.parity(k) != want {
                    return Err(Error::Grading(format!(
                        "[{},{}] has a component along {} of the wrong parity",
                        basis.names()[i],
                        basis.names()[j],
                        basis.names()[k]
                    )));
                }
            }
        }
        let table = table
            .into_iter()
            .filter(|(_, v)| v.iter().any(|p| !p.is_zero()))
            .collect();
        Ok(Algebra {
            name: name.into(),
            basis,
            table,
            axioms: OnceLock::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.basis.parity(i)
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    /// `[aᵢ_{x₀} aⱼ]` for any ordered pair; the `i > j` half comes from
    /// skew-supersymmetry.
    pub fn structure(&self, i: usize, j: usize) -> Vec<MPoly> {
        let n = self.rank();
        if i <= j {
            return self
                .table
                .get(&(i, j))
                .cloned()
                .unwrap_or_else(|| vec![MPoly::zero(); n]);
        }
        let Some(v) = self.table.get(&(j, i)) else {
            return vec![MPoly::zero(); n];
        };
        let flip = -(&MPoly::var(Var::Partial) + &MPoly::var(Var::X0));
        let sign = -Parity::sign(self.parity(i), self.parity(j));
        let s = MPoly::from_int(sign);
        v.iter().map(|p| &p.substitute(Var::X0, &flip) * &s).collect()
    }

    /// Basis vector `aᵢ` as a coordinate vector.
    pub fn unit(&self, i: usize) -> Vec<MPoly> {
        let mut v = vec![MPoly::zero(); self.rank()];
        v[i] = MPoly::one();
        v
    }

    /// `[u_s v]` for coordinate vectors whose entries may carry spectral
    /// parameters, with `s` an arbitrary polynomial slot. The dressings are
    /// rewritten by `u(∂ → −s)` and `v(∂ → ∂ + s)`.
    pub fn bracket_raw(&self, u: &[MPoly], v: &[MPoly], slot: &MPoly) -> Vec<MPoly> {
        let n = self.rank();
        let mut out = vec![MPoly::zero(); n];
        let neg_slot = -slot;
        let shifted = &MPoly::var(Var::Partial) + slot;
        let us: Vec<MPoly> = u
            .iter()
            .map(|p| p.substitute(Var::Partial, &neg_slot))
            .collect();
        let vs: Vec<MPoly> = v
            .iter()
            .map(|p| p.substitute(Var::Partial, &shifted))
            .collect();
        for (i, ui) in us.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in vs.iter().enumerate() {
                if vj.is_zero() {
                    continue;
                }
                let s = self.structure(i, j);
                if s.iter().all(MPoly::is_zero) {
                    continue;
                }
                let c = ui * vj;
                for (k, p) in s.iter().enumerate() {
                    if p.is_zero() {
                        continue;
                    }
                    out[k] += &(&c * &p.substitute(Var::X0, slot));
                }
            }
        }
        out
    }

    /// `[a_slot b]` for homogeneous elements.
    pub fn bracket(&self, a: &Element, b: &Element, slot: Var) -> Result<Vec<MPoly>> {
        if slot == Var::Partial {
            return Err(Error::PartialSlot);
        }
        if a.parity(&self.basis).is_none() || b.parity(&self.basis).is_none() {
            return Err(Error::NonHomogeneous);
        }
        Ok(self.bracket_raw(a.coords(), b.coords(), &MPoly::var(slot)))
    }

    /// Check skew-supersymmetry on all pairs and the Jacobi identity on all
    /// triples of basis vectors.
    pub fn check_axioms(&self) -> AxiomReport {
        let n = self.rank();
        let names = self.basis.names();
        let mut violations = Vec::new();
        let x0 = MPoly::var(Var::X0);
        let x1 = MPoly::var(Var::X1);
        let flip = -(&MPoly::var(Var::Partial) + &x0);
        for i in 0..n {
            for j in i..n {
                let lhs = self.bracket_raw(&self.unit(i), &self.unit(j), &x0);
                let rhs = self.bracket_raw(&self.unit(j), &self.unit(i), &flip);
                let s = MPoly::from_int(Parity::sign(self.parity(i), self.parity(j)));
                let res: Vec<MPoly> = lhs.iter().zip(&rhs).map(|(a, b)| a + &(b * &s)).collect();
                if res.iter().any(|p| !p.is_zero()) {
                    violations.push(AxiomViolation {
                        axiom: "C2λ".into(),
                        witness: vec![names[i].clone(), names[j].clone()],
                        residual: render_vec(&res),
                    });
                }
            }
        }
        let sum = &x0 + &x1;
        for i in 0..n {
            for j in 0..n {
                let ij = self.bracket_raw(&self.unit(i), &self.unit(j), &x0);
                for k in 0..n {
                    let jk = self.bracket_raw(&self.unit(j), &self.unit(k), &x1);
                    let ik = self.bracket_raw(&self.unit(i), &self.unit(k), &x0);
                    let t1 = self.bracket_raw(&self.unit(i), &jk, &x0);
                    let t2 = self.bracket_raw(&ij, &self.unit(k), &sum);
                    let t3 = self.bracket_raw(&self.unit(j), &ik, &x1);
                    let s = MPoly::from_int(Parity::sign(self.parity(i), self.parity(j)));
                    let res: Vec<MPoly> = (0..n)
                        .map(|c| &(&t1[c] - &t2[c]) - &(&t3[c] * &s))
                        .collect();
                    if res.iter().any(|p| !p.is_zero()) {
                        violations.push(AxiomViolation {
                            axiom: "C3λ".into(),
                            witness: vec![names[i].clone(), names[j].clone(), names[k].clone()],
                            residual: render_vec(&res),
                        });
                    }
                }
            }
        }
        AxiomReport {
            passed: violations.is_empty(),
            violations,
        }
    }

    /// Cached axiom report.
    pub fn axioms(&self) -> &AxiomReport {
        self.axioms.get_or_init(|| self.check_axioms())
    }

    pub fn require_axioms(&self) -> Result<()> {
        let r = self.axioms();
        if r.passed {
            Ok(())
        } else {
            let v = &r.violations[0];
            Err(Error::AxiomsFailed(format!(
                "{} at ({})",
                v.axiom,
                v.witness.join(",")
            )))
        }
    }

    /// Elements of `∂`-degree at most `d_bound` killing every basis vector.
    pub fn center(&self, d_bound: usize) -> PolyMatrix {
        let targets: Vec<Vec<MPoly>> = (0..self.rank()).map(|j| self.unit(j)).collect();
        self.annihilator_slice(d_bound, |a| {
            targets
                .iter()
                .map(|b| self.bracket_raw(a, b, &MPoly::var(Var::X0)))
                .collect()
        })
    }

    /// `{b : [c_λ b] = 0}` restricted to `∂`-degree at most `d_bound`.
    pub fn centralizer(&self, c: &Element, d_bound: usize) -> PolyMatrix {
        self.annihilator_slice(d_bound, |b| {
            vec![self.bracket_raw(c.coords(), b, &MPoly::var(Var::X0))]
        })
    }

    fn annihilator_slice(
        &self,
        d_bound: usize,
        residual: impl Fn(&[MPoly]) -> Vec<Vec<MPoly>>,
    ) -> PolyMatrix {
        let n = self.rank();
        let mut unknowns = Vec::new();
        for i in 0..n {
            for p in 0..=d_bound {
                unknowns.push((i, p as u32));
            }
        }
        let columns: Vec<Vec<MPoly>> = unknowns
            .iter()
            .map(|&(i, p)| {
                let mut v = vec![MPoly::zero(); n];
                v[i] = MPoly::monomial(Rational::one(), [p, 0, 0, 0]);
                residual(&v).into_iter().flatten().collect()
            })
            .collect();
        let kernel = poly_kernel(&columns);
        let cols: Vec<Vec<MPoly>> = kernel
            .iter()
            .map(|kv| {
                let mut v = vec![MPoly::zero(); n];
                for (c, x) in kv {
                    let (i, p) = unknowns[*c];
                    v[i] += &MPoly::monomial(x.clone(), [p, 0, 0, 0]);
                }
                v
            })
            .collect();
        PolyMatrix::from_columns(n, &cols)
    }

    /// `ℚ[∂]`-generators of the span of all n-products: the `λ`-coefficients
    /// of every stored bracket.
    pub fn derived_subalgebra(&self) -> PolyMatrix {
        let n = self.rank();
        let mut cols = Vec::new();
        for v in self.table.values() {
            let deg = v.iter().map(|p| p.degree_in(Var::X0)).max().unwrap_or(-1);
            for k in 0..=deg.max(-1) {
                let col: Vec<MPoly> = v.iter().map(|p| p.coefficient_of(Var::X0, k as u32)).collect();
                if col.iter().any(|p| !p.is_zero()) {
                    cols.push(col);
                }
            }
        }
        PolyMatrix::from_columns(n, &cols)
    }

    /// `ad(r)`, the map `b ↦ [r_λ b]`.
    pub fn adjoint(&self, r: &Element) -> Result<ConfMap> {
        let parity = r.parity(&self.basis).ok_or(Error::NonHomogeneous)?;
        let x0 = MPoly::var(Var::X0);
        let cols: Vec<Vec<MPoly>> = (0..self.rank())
            .map(|j| self.bracket_raw(r.coords(), &self.unit(j), &x0))
            .collect();
        ConfMap::new(&self.basis, parity, PolyMatrix::from_columns(self.rank(), &cols))
    }

    /// Names accepted by [`Algebra::builtin`].
    pub fn builtin_names() -> Vec<&'static str> {
        vec![
            "virasoro",
            "neveu_schwarz",
            "cur_sl2",
            "heisenberg_pair",
            "abelian(n|m)",
        ]
    }

    pub fn builtin(name: &str) -> Result<Algebra> {
        use crate::poly::shorthand::*;
        let even = Parity::Even;
        let odd = Parity::Odd;
        let basis = |names: &[&str], ps: &[Parity]| {
            Basis::new(names.iter().map(|s| s.to_string()).collect(), ps.to_vec())
        };
        let alg = match name {
            "virasoro" => {
                let mut t = Table::new();
                t.insert((0, 0), vec![&d() + &(&c(2) * &x())]);
                Algebra::new(name, basis(&["L"], &[even])?, t)?
            }
            "neveu_schwarz" => {
                let mut t = Table::new();
                t.insert((0, 0), vec![&d() + &(&c(2) * &x()), c(0)]);
                t.insert((0, 1), vec![c(0), &d() + &(&q(3, 2) * &x())]);
                t.insert((1, 1), vec![c(2), c(0)]);
                Algebra::new(name, basis(&["L", "G"], &[even, odd])?, t)?
            }
            "cur_sl2" => {
                let mut t = Table::new();
                t.insert((0, 1), vec![c(-2), c(0), c(0)]);
                t.insert((0, 2), vec![c(0), c(1), c(0)]);
                t.insert((1, 2), vec![c(0), c(0), c(-2)]);
                Algebra::new(name, basis(&["e", "h", "f"], &[even, even, even])?, t)?
            }
            "heisenberg_pair" => {
                let mut t = Table::new();
                t.insert((0, 1), vec![c(0), c(1)]);
                Algebra::new(name, basis(&["a", "b"], &[even, even])?, t)?
            }
            other => {
                let (n, m) = parse_abelian(other)
                    .ok_or_else(|| Error::UnknownBuiltin(other.to_string()))?;
                let mut names = Vec::new();
                let mut ps = Vec::new();
                for i in 1..=n {
                    names.push(format!("e{i}"));
                    ps.push(even);
                }
                for i in 1..=m {
                    names.push(format!("o{i}"));
                    ps.push(odd);
                }
                Algebra::new(format!("abelian({n}|{m})"), Basis::new(names, ps)?, Table::new())?
            }
        };
        Ok(alg)
    }
}

fn parse_abelian(s: &str) -> Option<(usize, usize)> {
    let inner = s.strip_prefix("abelian(")?.strip_suffix(')')?;
    let (a, b) = inner.split_once('|')?;
    let n: usize = a.trim().parse().ok()?;
    let m: usize = b.trim().parse().ok()?;
    (n + m > 0).then_some((n, m))
}

pub fn render_vec(v: &[MPoly]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

/// Kernel over `ℚ` of the linear map sending unknown `c` to the polynomial
/// vector `columns[c]`; equations are the coefficients of every monomial in
/// every slot.
pub fn poly_kernel(columns: &[Vec<MPoly>]) -> Vec<SparseVec> {
    let mut rows: BTreeMap<(usize, [u32; 4]), SparseVec> = BTreeMap::new();
    for (c, col) in columns.iter().enumerate() {
        for (slot, p) in col.iter().enumerate() {
            for (e, x) in p.terms() {
                rows.entry((slot, *e)).or_default().insert(c, x.clone());
            }
        }
    }
    let mut ech = Echelon::new();
    for r in rows.values() {
        ech.insert(r);
    }
    ech.kernel(columns.len())
}

/// Whether every coordinate vanishes.
pub fn is_zero_vec(v: &[MPoly]) -> bool {
    v.iter().all(MPoly::is_zero)
}

/// Scale a coordinate vector by a rational.
pub fn scale_vec(v: &[MPoly], c: &Rational) -> Vec<MPoly> {
    if c.is_zero() {
        return vec![MPoly::zero(); v.len()];
    }
    v.iter().map(|p| p.scale(c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::shorthand::*;

    fn el(a: &Algebra, coords: Vec<MPoly>) -> Element {
        Element::new(a.basis(), coords).unwrap()
    }

    #[test]
    fn builtins_pass_axioms() {
        for name in ["virasoro", "neveu_schwarz", "cur_sl2", "heisenberg_pair", "abelian(2|1)"] {
            let a = Algebra::builtin(name).unwrap();
            assert!(a.check_axioms().passed, "{name}");
        }
        assert!(Algebra::builtin("nope").is_err());
    }

    #[test]
    fn mutated_virasoro_fails_skew() {
        let mut t = Table::new();
        t.insert((0, 0), vec![x()]);
        let b = Basis::new(vec!["L".into()], vec![Parity::Even]).unwrap();
        let a = Algebra::new("mut", b, t).unwrap();
        let r = a.check_axioms();
        assert!(!r.passed);
        let v = r.violations.iter().find(|v| v.axiom == "C2λ").unwrap();
        assert_eq!(v.residual, vec!["-d".to_string()]);
    }

    #[test]
    fn virasoro_brackets() {
        let a = Algebra::builtin("virasoro").unwrap();
        let l = el(&a, vec![c(1)]);
        let dl = el(&a, vec![d()]);
        assert_eq!(a.bracket(&l, &l, Var::X0).unwrap(), vec![&d() + &(&c(2) * &x())]);
        assert_eq!(
            a.bracket(&dl, &l, Var::X0).unwrap(),
            vec![-(&x() * &(&d() + &(&c(2) * &x())))]
        );
        assert!(a.bracket(&l, &l, Var::Partial).is_err());
    }

    #[test]
    fn center_and_centralizer() {
        let vir = Algebra::builtin("virasoro").unwrap();
        assert_eq!(vir.center(3).cols(), 0);
        let ab = Algebra::builtin("abelian(2|0)").unwrap();
        assert_eq!(ab.center(1).cols(), 4);
        let sl = Algebra::builtin("cur_sl2").unwrap();
        assert_eq!(sl.center(2).cols(), 0);
        let h = el(&sl, vec![c(0), c(1), c(0)]);
        let z = sl.centralizer(&h, 2);
        assert_eq!(z.cols(), 3);
        for j in 0..3 {
            assert!(z.get(0, j).is_zero() && z.get(2, j).is_zero());
        }
    }

    #[test]
    fn derived_subalgebra_examples() {
        let vir = Algebra::builtin("virasoro").unwrap();
        let ds = vir.derived_subalgebra();
        assert_eq!(ds.columns(), vec![vec![d()], vec![c(2)]]);
        assert_eq!(Algebra::builtin("abelian(3|0)").unwrap().derived_subalgebra().cols(), 0);
        let hp = Algebra::builtin("heisenberg_pair").unwrap();
        assert_eq!(hp.derived_subalgebra().columns(), vec![vec![c(0), c(1)]]);
    }

    #[test]
    fn adjoint_examples() {
        let vir = Algebra::builtin("virasoro").unwrap();
        let ad = vir.adjoint(&el(&vir, vec![c(1)])).unwrap();
        assert_eq!(ad.matrix().get(0, 0), &(&d() + &(&c(2) * &x())));
        assert!(vir.adjoint(&el(&vir, vec![c(0)])).unwrap().matrix().is_zero());
    }

    #[test]
    fn grading_is_enforced() {
        let b = Basis::new(vec!["L".into(), "G".into()], vec![Parity::Even, Parity::Odd]).unwrap();
        let mut t = Table::new();
        t.insert((0, 0), vec![c(0), c(1)]);
        assert!(matches!(Algebra::new("bad", b.clone(), t), Err(Error::Grading(_))));
        let mut t = Table::new();
        t.insert((1, 0), vec![c(0), c(1)]);
        assert!(matches!(Algebra::new("bad", b, t), Err(Error::Table(_))));
    }
}
