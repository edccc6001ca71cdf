//! Exact sparse polynomials over the rationals in `∂` and three spectral
//! variables.
//!
//! Every bracket, conformal map and residual in the crate is built from
//! [`MPoly`]. The representation is canonical: a term map without zero
//! coefficients, so two polynomials are equal exactly when their maps are.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

/// Build a rational from a numerator/denominator pair.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Build an integral rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// One of the four polynomial variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// The translation operator `∂`; rendered as `d`.
    Partial,
    /// First spectral slot (`λ`); rendered as `x`.
    X0,
    /// Second spectral slot (`μ`); rendered as `y`.
    X1,
    /// Third spectral slot (`γ`); rendered as `z`.
    X2,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::Partial, Var::X0, Var::X1, Var::X2];
    pub const SLOTS: [Var; 3] = [Var::X0, Var::X1, Var::X2];

    pub fn index(self) -> usize {
        match self {
            Var::Partial => 0,
            Var::X0 => 1,
            Var::X1 => 2,
            Var::X2 => 3,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Var::Partial => "d",
            Var::X0 => "x",
            Var::X1 => "y",
            Var::X2 => "z",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Var> {
        match s {
            "d" => Some(Var::Partial),
            "x" => Some(Var::X0),
            "y" => Some(Var::X1),
            "z" => Some(Var::X2),
            _ => None,
        }
    }
}

/// Exponent tuple `(e_∂, e₀, e₁, e₂)`.
pub type Exponents = [u32; 4];

/// Graded lexicographic comparison: total degree first, then lexicographic
/// on `(e_∂, e₀, e₁, e₂)`.
pub fn grlex(a: &Exponents, b: &Exponents) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// Multivariate polynomial with rational coefficients in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MPoly {
    terms: BTreeMap<Exponents, Rational>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn one() -> Self {
        MPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        MPoly::monomial(c, [0; 4])
    }

    pub fn from_int(n: i64) -> Self {
        MPoly::constant(int(n))
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; 4];
        e[v.index()] = 1;
        MPoly::monomial(Rational::one(), e)
    }

    pub fn monomial(c: Rational, exps: Exponents) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        MPoly { terms }
    }

    /// `c · ∂^p · x₀^q`, the shape of a single unknown coefficient in the solver.
    pub fn partial_lambda(c: Rational, p: u32, q: u32) -> Self {
        MPoly::monomial(c, [p, q, 0, 0])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// The value of a constant polynomial (zero included), `None` otherwise.
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&[0; 4]).cloned(),
            _ => None,
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending exponent-tuple order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &Exponents) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, exps: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> MPoly {
        let mut base = self.clone();
        let mut acc = MPoly::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Maximal exponent of `v`; `-1` for the zero polynomial.
    pub fn degree_in(&self, v: Var) -> i64 {
        self.terms
            .keys()
            .map(|e| i64::from(e[v.index()]))
            .max()
            .unwrap_or(-1)
    }

    pub fn total_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|e| i64::from(e.iter().sum::<u32>()))
            .max()
            .unwrap_or(-1)
    }

    pub fn uses(&self, v: Var) -> bool {
        self.terms.keys().any(|e| e[v.index()] > 0)
    }

    /// True when every term only involves variables in `allowed`.
    pub fn only_uses(&self, allowed: &[Var]) -> bool {
        Var::ALL
            .iter()
            .filter(|v| !allowed.contains(v))
            .all(|v| !self.uses(*v))
    }

    /// Coefficient of `vᵏ`, as a polynomial in the remaining variables.
    pub fn coefficient_of(&self, v: Var, k: u32) -> MPoly {
        let i = v.index();
        let mut out = MPoly::zero();
        for (e, c) in &self.terms {
            if e[i] == k {
                let mut e2 = *e;
                e2[i] = 0;
                out.add_term(e2, c.clone());
            }
        }
        out
    }

    /// Replace every occurrence of `v` by `r`.
    pub fn substitute(&self, v: Var, r: &MPoly) -> MPoly {
        let mut subs: [Option<&MPoly>; 4] = [None; 4];
        subs[v.index()] = Some(r);
        self.substitute_all(&subs)
    }

    /// Simultaneous substitution: each `Some(r)` slot replaces the variable
    /// with that index; `None` leaves it untouched.
    pub fn substitute_all(&self, subs: &[Option<&MPoly>; 4]) -> MPoly {
        if self.is_zero() {
            return MPoly::zero();
        }
        // cache of powers per substituted variable
        let mut powers: [Vec<MPoly>; 4] = Default::default();
        for (i, s) in subs.iter().enumerate() {
            if let Some(r) = s {
                let maxe = self.terms.keys().map(|e| e[i]).max().unwrap_or(0) as usize;
                let mut pw = Vec::with_capacity(maxe + 1);
                pw.push(MPoly::one());
                for k in 1..=maxe {
                    let next = &pw[k - 1] * *r;
                    pw.push(next);
                }
                powers[i] = pw;
            }
        }
        let mut out = MPoly::zero();
        for (e, c) in &self.terms {
            let mut kept = [0u32; 4];
            let mut factor = MPoly::constant(c.clone());
            for i in 0..4 {
                if subs[i].is_some() {
                    if e[i] > 0 {
                        factor = &factor * &powers[i][e[i] as usize];
                    }
                } else {
                    kept[i] = e[i];
                }
            }
            for (fe, fc) in factor.terms {
                let mut ne = fe;
                for i in 0..4 {
                    ne[i] += kept[i];
                }
                out.add_term(ne, fc);
            }
        }
        out
    }

    /// Rename variables by an index permutation-like map (`map[i]` is the new
    /// variable for old variable `i`). Colliding targets multiply.
    pub fn rename(&self, map: &[Var; 4]) -> MPoly {
        let mut out = MPoly::zero();
        for (e, c) in &self.terms {
            let mut ne = [0u32; 4];
            for i in 0..4 {
                ne[map[i].index()] += e[i];
            }
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Evaluate at a rational point `(∂, x₀, x₁, x₂)`.
    pub fn eval(&self, point: &[Rational; 4]) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..4 {
                for _ in 0..e[i] {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Division with remainder in `ℚ[v]`, treating the polynomials as
    /// univariate in `v`. Returns `None` when either operand involves another
    /// variable or the divisor is zero.
    pub fn div_rem_univariate(&self, divisor: &MPoly, v: Var) -> Option<(MPoly, MPoly)> {
        let others: Vec<Var> = Var::ALL.iter().copied().filter(|w| *w != v).collect();
        if divisor.is_zero() || others.iter().any(|w| self.uses(*w) || divisor.uses(*w)) {
            return None;
        }
        let dd = divisor.degree_in(v) as u32;
        let lead = divisor.coefficient_of(v, dd).constant_value()?;
        let mut rem = self.clone();
        let mut quot = MPoly::zero();
        let mut e = [0u32; 4];
        while !rem.is_zero() && rem.degree_in(v) >= i64::from(dd) {
            let rd = rem.degree_in(v) as u32;
            let rc = rem.coefficient_of(v, rd).constant_value()?;
            e[v.index()] = rd - dd;
            let t = MPoly::monomial(rc / &lead, e);
            rem = &rem - &(&t * divisor);
            quot = &quot + &t;
        }
        Some((quot, rem))
    }

    /// Terms sorted for rendering: descending graded lexicographic order.
    pub fn sorted_terms(&self) -> Vec<(&Exponents, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| grlex(b.0, a.0));
        v
    }
}

fn render_monomial(e: &Exponents) -> String {
    let mut parts = Vec::new();
    for v in Var::ALL {
        match e[v.index()] {
            0 => {}
            1 => parts.push(v.symbol().to_string()),
            k => parts.push(format!("{}^{}", v.symbol(), k)),
        }
    }
    parts.join("*")
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono = render_monomial(e);
            if mono.is_empty() {
                write!(f, "{}", abs)?;
            } else if abs.is_one() {
                write!(f, "{}", mono)?;
            } else {
                write!(f, "{}*{}", abs, mono)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({})", self)
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for MPoly {
    type Output = MPoly;
    fn add(mut self, rhs: MPoly) -> MPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&MPoly> for MPoly {
    fn add_assign(&mut self, rhs: &MPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl SubAssign<&MPoly> for MPoly {
    fn sub_assign(&mut self, rhs: &MPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c.clone());
        }
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for MPoly {
    type Output = MPoly;
    fn sub(mut self, rhs: MPoly) -> MPoly {
        self -= &rhs;
        self
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Mul for MPoly {
    type Output = MPoly;
    fn mul(self, rhs: MPoly) -> MPoly {
        &self * &rhs
    }
}

/// Shorthand constructors used throughout the crate and its tests.
pub mod shorthand {
    use super::{MPoly, Var};

    pub fn d() -> MPoly {
        MPoly::var(Var::Partial)
    }
    pub fn x() -> MPoly {
        MPoly::var(Var::X0)
    }
    pub fn y() -> MPoly {
        MPoly::var(Var::X1)
    }
    pub fn z() -> MPoly {
        MPoly::var(Var::X2)
    }
    pub fn c(n: i64) -> MPoly {
        MPoly::from_int(n)
    }
    pub fn q(n: i64, den: i64) -> MPoly {
        MPoly::constant(super::rat(n, den))
    }
}

#[cfg(test)]
mod tests {
    use super::shorthand::*;
    use super::*;

    #[test]
    fn add_cancels_and_normalizes() {
        assert_eq!(&(&d() + &(&c(2) * &x())) + &(-d()), &c(2) * &x());
        let p = &d() + &x();
        assert_eq!(&p + &MPoly::zero(), p);
        assert_eq!(&(&q(1, 2) * &x()) + &(&q(1, 2) * &x()), x());
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn mul_distributes() {
        let p = &d() + &(&c(2) * &x());
        assert_eq!(&p * &x(), &(&d() * &x()) + &(&c(2) * &x().pow(2)));
        assert_eq!(&p * &MPoly::one(), p);
        assert_eq!(&(&x() - &y()) * &(&x() + &y()), &x().pow(2) - &y().pow(2));
    }

    #[test]
    fn substitution_examples() {
        let p = &d() + &(&c(2) * &x());
        let skew = -(&d() + &x());
        assert_eq!(p.substitute(Var::X0, &skew), -(&d() + &(&c(2) * &x())));
        let sq = x().pow(2);
        assert_eq!(
            sq.substitute(Var::X0, &(&x() + &y())),
            &(&x().pow(2) + &(&c(2) * &(&x() * &y()))) + &y().pow(2)
        );
        assert_eq!(p.substitute(Var::X0, &x()), p);
    }

    #[test]
    fn substitution_is_simultaneous() {
        // x -> y, y -> x swaps rather than collapsing
        let p = &x() + &(&c(3) * &y());
        let subs = [None, Some(&y()), Some(&x()), None];
        assert_eq!(p.substitute_all(&subs), &y() + &(&c(3) * &x()));
    }

    #[test]
    fn coefficient_and_degree() {
        let p = &d() + &(&c(2) * &x());
        assert_eq!(p.coefficient_of(Var::X0, 1), c(2));
        assert!(p.coefficient_of(Var::X0, 5).is_zero());
        assert_eq!((&p * &y()).coefficient_of(Var::X1, 1), p);
        assert_eq!((&(&d().pow(2) * &x()) + &x().pow(3)).degree_in(Var::X0), 3);
        assert_eq!(MPoly::zero().degree_in(Var::Partial), -1);
        assert_eq!(c(7).degree_in(Var::Partial), 0);
    }

    #[test]
    fn rendering_is_graded_lex_descending() {
        let p = &(&d() + &(&c(2) * &x())) + &MPoly::one();
        assert_eq!(p.to_string(), "d + 2*x + 1");
        let p = &(&q(1, 2) * &x().pow(2)) - &(&d() * &x());
        assert_eq!(p.to_string(), "-d*x + 1/2*x^2");
        assert_eq!((-d()).to_string(), "-d");
        assert_eq!(MPoly::zero().to_string(), "0");
        assert_eq!((&q(-3, 4) * &z()).to_string(), "-3/4*z");
    }

    #[test]
    fn univariate_division() {
        let p = &d().pow(2) - &c(1);
        let (qt, r) = p.div_rem_univariate(&(&d() - &c(1)), Var::Partial).unwrap();
        assert_eq!(qt, &d() + &c(1));
        assert!(r.is_zero());
        let (_, r) = d().div_rem_univariate(&(&c(2) * &d()), Var::Partial).unwrap();
        assert!(r.is_zero());
        assert!(x().div_rem_univariate(&d(), Var::Partial).is_none());
    }
}
