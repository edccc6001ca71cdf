//! Conformal linear maps, their composition and the `gc` λ-bracket, and
//! `ℚ[∂]`-module morphisms used as twisting maps.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gmod::{Basis, Element, Parity, PolyMatrix};
use crate::lcsa::{render_vec, Algebra};
use crate::poly::{MPoly, Rational, Var};

/// A conformal map evaluated at a concrete slot: `v ↦ Σⱼ vⱼ(∂ + shift)·colⱼ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operator {
    pub matrix: PolyMatrix,
    pub shift: MPoly,
}

impl Operator {
    pub fn identity(n: usize) -> Self {
        Operator {
            matrix: PolyMatrix::identity(n),
            shift: MPoly::zero(),
        }
    }

    pub fn apply(&self, v: &[MPoly]) -> Vec<MPoly> {
        let n = self.matrix.rows();
        let mut out = vec![MPoly::zero(); n];
        let shifted = &MPoly::var(Var::Partial) + &self.shift;
        for (j, vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            let s = if self.shift.is_zero() {
                vj.clone()
            } else {
                vj.substitute(Var::Partial, &shifted)
            };
            for (i, o) in out.iter_mut().enumerate() {
                let m = self.matrix.get(i, j);
                if !m.is_zero() {
                    *o += &(&s * m);
                }
            }
        }
        out
    }

    /// `self ∘ rhs`: apply `rhs` first.
    pub fn then(&self, rhs: &Operator) -> Operator {
        let shifted = &MPoly::var(Var::Partial) + &self.shift;
        let b = if self.shift.is_zero() {
            rhs.matrix.clone()
        } else {
            rhs.matrix.map(|p| p.substitute(Var::Partial, &shifted))
        };
        Operator {
            matrix: self.matrix.mul(&b).expect("operator dimensions agree"),
            shift: &self.shift + &rhs.shift,
        }
    }

    pub fn sub(&self, rhs: &Operator) -> Operator {
        debug_assert_eq!(self.shift, rhs.shift, "operators must share a slot");
        Operator {
            matrix: self.matrix.sub(&rhs.matrix).expect("operator dimensions agree"),
            shift: self.shift.clone(),
        }
    }

    pub fn add(&self, rhs: &Operator) -> Operator {
        debug_assert_eq!(self.shift, rhs.shift, "operators must share a slot");
        Operator {
            matrix: self.matrix.add(&rhs.matrix).expect("operator dimensions agree"),
            shift: self.shift.clone(),
        }
    }

    pub fn scale(&self, c: &MPoly) -> Operator {
        Operator {
            matrix: self.matrix.scale(c),
            shift: self.shift.clone(),
        }
    }
}

/// `[f_p g]` evaluated at total slot `s`, for maps given as slot families.
pub fn bracket_at<F, G>(f: F, pf: Parity, g: G, pg: Parity, param: &MPoly, slot: &MPoly) -> Operator
where
    F: Fn(&MPoly) -> Operator,
    G: Fn(&MPoly) -> Operator,
{
    let rest = slot - param;
    let fp = f(param);
    let gr = g(&rest);
    let a = fp.then(&gr);
    let b = gr.then(&fp);
    let s = MPoly::from_int(Parity::sign(pf, pg));
    a.sub(&b.scale(&s))
}

/// Element of `Cend(R)`: column `j` of the matrix is `f_{x₀}(aⱼ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConfMap {
    parity: Parity,
    matrix: PolyMatrix,
}

impl ConfMap {
    pub fn new(basis: &Basis, parity: Parity, matrix: PolyMatrix) -> Result<Self> {
        let n = basis.rank();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::Dimension(format!(
                "conformal map must be {n}x{n}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.only_uses(&[Var::Partial, Var::X0]) {
            return Err(Error::ForbiddenVariable("conformal maps use only d and x".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if !matrix.get(i, j).is_zero() && basis.parity(i) != basis.parity(j) + parity {
                    return Err(Error::Grading(format!(
                        "entry ({i},{j}) breaks the grading of a degree-{parity} map"
                    )));
                }
            }
        }
        Ok(ConfMap { parity, matrix })
    }

    /// Construct without validation; callers guarantee the invariants.
    pub(crate) fn from_parts(parity: Parity, matrix: PolyMatrix) -> Self {
        ConfMap { parity, matrix }
    }

    pub fn zero(n: usize, parity: Parity) -> Self {
        ConfMap {
            parity,
            matrix: PolyMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        ConfMap {
            parity: Parity::Even,
            matrix: PolyMatrix::identity(n),
        }
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn matrix(&self) -> &PolyMatrix {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// Evaluate at a slot polynomial.
    pub fn at(&self, slot: &MPoly) -> Operator {
        let matrix = if *slot == MPoly::var(Var::X0) {
            self.matrix.clone()
        } else {
            self.matrix.map(|p| p.substitute(Var::X0, slot))
        };
        Operator {
            matrix,
            shift: slot.clone(),
        }
    }

    /// `f_slot(a)`.
    pub fn apply(&self, a: &Element, slot: Var) -> Result<Vec<MPoly>> {
        if slot == Var::Partial {
            return Err(Error::PartialSlot);
        }
        Ok(self.at(&MPoly::var(slot)).apply(a.coords()))
    }

    /// `∂f`, whose matrix is `−x₀·F`.
    pub fn partial(&self) -> ConfMap {
        ConfMap {
            parity: self.parity,
            matrix: self.matrix.scale(&-MPoly::var(Var::X0)),
        }
    }

    pub fn add(&self, rhs: &ConfMap) -> ConfMap {
        ConfMap {
            parity: self.parity,
            matrix: self.matrix.add(&rhs.matrix).expect("same shape"),
        }
    }

    pub fn scale(&self, c: &Rational) -> ConfMap {
        ConfMap {
            parity: self.parity,
            matrix: self.matrix.map(|p| p.scale(c)),
        }
    }

    /// Left multiplication by a morphism: `σ ∘ f`.
    pub fn after_morphism(&self, s: &Morphism) -> ConfMap {
        ConfMap {
            parity: self.parity,
            matrix: s.matrix().mul(&self.matrix).expect("same shape"),
        }
    }

    /// Right multiplication by a morphism: `f ∘ σ`.
    pub fn before_morphism(&self, s: &Morphism) -> ConfMap {
        let shifted = &MPoly::var(Var::Partial) + &MPoly::var(Var::X0);
        let sm = s.matrix().map(|p| p.substitute(Var::Partial, &shifted));
        ConfMap {
            parity: self.parity,
            matrix: self.matrix.mul(&sm).expect("same shape"),
        }
    }

    /// `f ∘ σ − σ ∘ f` as a matrix.
    pub fn commutator_with(&self, s: &Morphism) -> PolyMatrix {
        self.before_morphism(s)
            .matrix
            .sub(&self.after_morphism(s).matrix)
            .expect("same shape")
    }

    pub fn commutes_with(&self, s: &Morphism) -> bool {
        self.commutator_with(s).is_zero()
    }

    pub fn render(&self) -> Vec<Vec<String>> {
        self.matrix.render()
    }
}

/// A map in total slot `x₁` with parameter `x₀`, such as `(f_λ g)` or
/// `[f_λ g]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoSlotMap {
    pub parity: Parity,
    pub matrix: PolyMatrix,
}

impl TwoSlotMap {
    /// Evaluate with parameter `p` and total slot `s`.
    pub fn at(&self, param: &MPoly, slot: &MPoly) -> Operator {
        let subs = [None, Some(param), Some(slot), None];
        Operator {
            matrix: self.matrix.map(|q| q.substitute_all(&subs)),
            shift: slot.clone(),
        }
    }
}

/// `(f_{x₀} g)_{x₁}`: matrix `F(∂, x₀)·G(∂+x₀, x₁−x₀)`.
pub fn compose(f: &ConfMap, g: &ConfMap) -> Result<TwoSlotMap> {
    check_shapes(f, g)?;
    let x0 = MPoly::var(Var::X0);
    let x1 = MPoly::var(Var::X1);
    let op = f.at(&x0).then(&g.at(&(&x1 - &x0)));
    Ok(TwoSlotMap {
        parity: f.parity + g.parity,
        matrix: op.matrix,
    })
}

/// `[f_{x₀} g]_{x₁} = f_{x₀} g_{x₁−x₀} − (−1)^{|f||g|} g_{x₁−x₀} f_{x₀}`.
pub fn gc_bracket(f: &ConfMap, g: &ConfMap) -> Result<TwoSlotMap> {
    check_shapes(f, g)?;
    let op = bracket_at(
        |s| f.at(s),
        f.parity,
        |s| g.at(s),
        g.parity,
        &MPoly::var(Var::X0),
        &MPoly::var(Var::X1),
    );
    Ok(TwoSlotMap {
        parity: f.parity + g.parity,
        matrix: op.matrix,
    })
}

fn check_shapes(f: &ConfMap, g: &ConfMap) -> Result<()> {
    if f.matrix.rows() != g.matrix.rows() {
        return Err(Error::Dimension("maps act on modules of different rank".into()));
    }
    Ok(())
}

/// Even `ℚ[∂]`-linear map given by a `∂`-only matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Morphism {
    name: String,
    matrix: PolyMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomomorphismReport {
    pub is_homomorphism: bool,
    /// First failing pair and its residual.
    pub witness: Option<(String, String, Vec<String>)>,
}

impl Morphism {
    pub fn new(name: impl Into<String>, basis: &Basis, matrix: PolyMatrix) -> Result<Self> {
        let n = basis.rank();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::Dimension(format!("morphism must be {n}x{n}")));
        }
        if !matrix.only_uses(&[Var::Partial]) {
            return Err(Error::ForbiddenVariable("morphisms must be free of x".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if !matrix.get(i, j).is_zero() && basis.parity(i) != basis.parity(j) {
                    return Err(Error::Grading("morphisms must be even".into()));
                }
            }
        }
        Ok(Morphism {
            name: name.into(),
            matrix,
        })
    }

    pub fn identity(n: usize) -> Self {
        Morphism {
            name: "id".into(),
            matrix: PolyMatrix::identity(n),
        }
    }

    /// `c·id`.
    pub fn scalar(n: usize, c: Rational, name: impl Into<String>) -> Self {
        let p = MPoly::constant(c);
        Morphism {
            name: name.into(),
            matrix: PolyMatrix::identity(n).scale(&p),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn matrix(&self) -> &PolyMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn op(&self) -> Operator {
        Operator {
            matrix: self.matrix.clone(),
            shift: MPoly::zero(),
        }
    }

    pub fn apply(&self, v: &[MPoly]) -> Vec<MPoly> {
        self.op().apply(v)
    }

    pub fn column(&self, j: usize) -> Vec<MPoly> {
        self.matrix.column(j)
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == PolyMatrix::identity(self.rank())
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &Morphism) -> Morphism {
        Morphism {
            name: format!("{}*{}", self.name, rhs.name),
            matrix: self.matrix.mul(&rhs.matrix).expect("same rank"),
        }
    }

    pub fn sub(&self, rhs: &Morphism) -> Morphism {
        Morphism {
            name: format!("{}-{}", self.name, rhs.name),
            matrix: self.matrix.sub(&rhs.matrix).expect("same rank"),
        }
    }

    pub fn check_homomorphism(&self, alg: &Algebra) -> HomomorphismReport {
        let n = alg.rank();
        let x0 = MPoly::var(Var::X0);
        for i in 0..n {
            for j in i..n {
                let lhs = self.apply(&alg.structure(i, j));
                let rhs = alg.bracket_raw(&self.column(i), &self.column(j), &x0);
                let res: Vec<MPoly> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
                if res.iter().any(|p| !p.is_zero()) {
                    let names = alg.basis().names();
                    return HomomorphismReport {
                        is_homomorphism: false,
                        witness: Some((names[i].clone(), names[j].clone(), render_vec(&res))),
                    };
                }
            }
        }
        HomomorphismReport {
            is_homomorphism: true,
            witness: None,
        }
    }

    pub fn determinant(&self) -> MPoly {
        self.matrix.determinant().expect("morphism matrix is square and d-only")
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant()
            .constant_value()
            .is_some_and(|c| !c.is_zero())
    }

    pub fn is_automorphism(&self, alg: &Algebra) -> bool {
        self.is_unimodular() && self.check_homomorphism(alg).is_homomorphism
    }

    /// Inverse over `ℚ[∂]`; requires a nonzero constant determinant.
    pub fn invert(&self) -> Result<Morphism> {
        let det = self.determinant();
        let Some(c) = det.constant_value().filter(|c| !c.is_zero()) else {
            return Err(Error::NotInvertible(format!("determinant {det} is not a unit")));
        };
        let inv = MPoly::constant(<Rational as num_traits::One>::one() / c);
        Ok(Morphism {
            name: format!("{}^-1", self.name),
            matrix: self.matrix.adjugate()?.scale(&inv),
        })
    }

    /// `σᵏ` for any integer `k`.
    pub fn power(&self, k: i64) -> Result<Morphism> {
        let base = if k < 0 { self.invert()? } else { self.clone() };
        let mut acc = Morphism::identity(self.rank());
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose(&base);
        }
        acc.name = format!("{}^{}", self.name, k);
        Ok(acc)
    }

    /// Smallest `n ≤ limit` with `σⁿ = id`.
    pub fn order(&self, limit: usize) -> Option<usize> {
        let id = PolyMatrix::identity(self.rank());
        let mut acc = self.matrix.clone();
        for n in 1..=limit {
            if acc == id {
                return Some(n);
            }
            acc = acc.mul(&self.matrix).expect("square");
        }
        None
    }

    pub fn commutes_with(&self, rhs: &Morphism) -> bool {
        self.compose(rhs).matrix == rhs.compose(self).matrix
    }
}

/// A `λ`-free even map used where a twisting map need not be a bracket
/// homomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneralizedScalar(pub Morphism);

/// Twisting map in a `(σ, τ)` equation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Twist {
    Strict(Morphism),
    Generalized(GeneralizedScalar),
}

impl Twist {
    pub fn morphism(&self) -> &Morphism {
        match self {
            Twist::Strict(m) => m,
            Twist::Generalized(g) => &g.0,
        }
    }

    pub fn name(&self) -> &str {
        self.morphism().name()
    }

    pub fn is_generalized(&self) -> bool {
        matches!(self, Twist::Generalized(_))
    }
}

impl From<Morphism> for Twist {
    fn from(m: Morphism) -> Self {
        Twist::Strict(m)
    }
}

/// Generators of a subgroup of `Aut(R)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    generators: Vec<Morphism>,
    orders: Vec<Option<usize>>,
}

impl GroupSpec {
    pub fn new(alg: &Algebra, generators: Vec<Morphism>) -> Result<Self> {
        for g in &generators {
            if !g.is_automorphism(alg) {
                return Err(Error::NotAutomorphism(g.name().to_string()));
            }
        }
        let orders = generators.iter().map(|g| g.order(64)).collect();
        Ok(GroupSpec { generators, orders })
    }

    pub fn cyclic(alg: &Algebra, sigma: &Morphism) -> Result<Self> {
        GroupSpec::new(alg, vec![sigma.clone()])
    }

    pub fn trivial(n: usize) -> Self {
        GroupSpec {
            generators: vec![Morphism::identity(n)],
            orders: vec![Some(1)],
        }
    }

    pub fn generators(&self) -> &[Morphism] {
        &self.generators
    }

    pub fn orders(&self) -> &[Option<usize>] {
        &self.orders
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::shorthand::*;
    use crate::poly::{int, rat};

    fn vir() -> Algebra {
        Algebra::builtin("virasoro").unwrap()
    }

    fn one_by_one(p: MPoly) -> ConfMap {
        ConfMap::from_parts(Parity::Even, PolyMatrix::from_rows(vec![vec![p]]).unwrap())
    }

    #[test]
    fn apply_examples() {
        let a = vir();
        let f = one_by_one(x());
        let dl = Element::new(a.basis(), vec![d()]).unwrap();
        assert_eq!(f.apply(&dl, Var::X0).unwrap(), vec![&(&d() + &x()) * &x()]);
        assert_eq!(Morphism::identity(1).apply(dl.coords()), vec![d()]);
        let l = Element::new(a.basis(), vec![c(1)]).unwrap();
        assert_eq!(ConfMap::identity(1).apply(&l, Var::X0).unwrap(), vec![c(1)]);
        assert!(f.apply(&dl, Var::Partial).is_err());
    }

    #[test]
    fn compose_examples() {
        let c = compose(&one_by_one(x()), &one_by_one(d())).unwrap();
        assert_eq!(c.matrix.get(0, 0), &(&(&d() + &x()) * &x()));
        let f = one_by_one(&d() * &x());
        let c = compose(&f, &ConfMap::identity(1)).unwrap();
        assert_eq!(c.matrix.get(0, 0), &(&d() * &x()));
        let c = compose(&ConfMap::identity(1), &f).unwrap();
        // g(∂+x₀, x₁−x₀)
        assert_eq!(c.matrix.get(0, 0), &(&(&d() + &x()) * &(&y() - &x())));
    }

    #[test]
    fn gc_bracket_of_constants_vanishes() {
        let f = one_by_one(c(3));
        assert!(gc_bracket(&f, &f).unwrap().matrix.is_zero());
    }

    #[test]
    fn ad_is_a_homomorphism_into_gc() {
        let a = vir();
        let l = Element::new(a.basis(), vec![c(1)]).unwrap();
        let ad = a.adjoint(&l).unwrap();
        let br = gc_bracket(&ad, &ad).unwrap();
        // ad([L_λ L]) at slot μ: [([L_λ L])_μ b] with λ parameter
        let inner = a.structure(0, 0);
        let expect = a.bracket_raw(&inner, &a.unit(0), &y());
        assert_eq!(br.matrix.get(0, 0), &expect[0]);
    }

    #[test]
    fn homomorphism_checks() {
        let a = vir();
        let s = Morphism::scalar(1, int(3), "s");
        let r = s.check_homomorphism(&a);
        assert!(!r.is_homomorphism);
        // (c − c²)(∂+2x) with c = 3
        assert_eq!(r.witness.unwrap().2, vec!["-6*d - 12*x".to_string()]);
        assert!(Morphism::identity(1).check_homomorphism(&a).is_homomorphism);
    }

    #[test]
    fn inversion_and_order() {
        let b = Basis::new(vec!["e1".into(), "e2".into()], vec![Parity::Even; 2]).unwrap();
        let m = PolyMatrix::from_rows(vec![vec![c(2), c(0)], vec![c(0), q(1, 2)]]).unwrap();
        let s = Morphism::new("s", &b, m).unwrap();
        let inv = s.invert().unwrap();
        assert_eq!(inv.matrix().get(0, 0), &q(1, 2));
        assert_eq!(inv.matrix().get(1, 1), &c(2));
        let sw = PolyMatrix::from_rows(vec![vec![c(0), c(1)], vec![c(1), c(0)]]).unwrap();
        let sw = Morphism::new("swap", &b, sw).unwrap();
        assert_eq!(sw.order(10), Some(2));
        assert_eq!(s.order(10), None);
        let sing = Morphism::new("z", &b, PolyMatrix::from_rows(vec![vec![d(), c(0)], vec![c(0), c(1)]]).unwrap()).unwrap();
        assert!(sing.invert().is_err());
        assert_eq!(s.power(-1).unwrap().matrix(), inv.matrix());
        let _ = rat(1, 2);
    }
}
