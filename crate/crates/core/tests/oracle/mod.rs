//! Brute-force oracle for the derivation-type solvers: enumerate every
//! monomial unknown, evaluate the defining identity directly, and take the
//! dense nullspace over Q.

use std::collections::BTreeMap;

use lcsa::cend::{ConfMap, Morphism};
use lcsa::poly::{int, Exponents};
use lcsa::solver::{DegreeBound, EquationKind};
use lcsa::{Algebra, MPoly, Parity, PolyMatrix, Rational, Twist, Var};
use num_traits::{One, Zero};

/// `[u_s v]` for coordinate vectors, straight from the structure table.
pub fn bracket(alg: &Algebra, u: &[MPoly], v: &[MPoly], s: &MPoly) -> Vec<MPoly> {
    let n = alg.rank();
    let d = MPoly::var(Var::Partial);
    let mut out = vec![MPoly::zero(); n];
    for i in 0..n {
        let ui = u[i].substitute(Var::Partial, &-s);
        for j in 0..n {
            let vj = v[j].substitute(Var::Partial, &(&d + s));
            let p = alg.structure(i, j);
            for k in 0..n {
                out[k] = &out[k] + &(&(&ui * &vj) * &p[k].substitute(Var::X0, s));
            }
        }
    }
    out
}

/// `f_λ(v)` for `f` given by its matrix in `(∂, λ)`.
pub fn apply(m: &PolyMatrix, v: &[MPoly], lam: &MPoly) -> Vec<MPoly> {
    let n = v.len();
    let d = MPoly::var(Var::Partial);
    let shifted = &d + lam;
    let mut out = vec![MPoly::zero(); n];
    for i in 0..n {
        let c = v[i].substitute(Var::Partial, &shifted);
        for k in 0..n {
            let e = m.get(k, i).substitute(Var::X0, lam);
            out[k] = &out[k] + &(&e * &c);
        }
    }
    out
}

pub enum Kind {
    Abg(Rational, Rational, Rational),
    SigmaTau(Morphism, Morphism),
}

pub fn residual(alg: &Algebra, kind: &Kind, m: &PolyMatrix, theta: Parity) -> Vec<MPoly> {
    let n = alg.rank();
    let lam = MPoly::var(Var::X0);
    let mu = MPoly::var(Var::X1);
    let lm = &lam + &mu;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let (ei, ej) = (alg.unit(i), alg.unit(j));
            let sign = MPoly::from_int(Parity::sign(alg.parity(i), theta));
            let inner = bracket(alg, &ei, &ej, &mu);
            let lhs = apply(m, &inner, &lam);
            let (a, b, g, sj, ti) = match kind {
                Kind::Abg(a, b, g) => (a.clone(), b.clone(), g.clone(), ej.clone(), ei.clone()),
                Kind::SigmaTau(s, t) => (Rational::one(), Rational::one(), Rational::one(), s.column(j), t.column(i)),
            };
            let left = bracket(alg, &apply(m, &ei, &lam), &sj, &lm);
            let right = bracket(alg, &ti, &apply(m, &ej, &lam), &mu);
            for k in 0..n {
                let r = &(&lhs[k].scale(&a) - &left[k].scale(&b)) - &(&right[k] * &sign).scale(&g);
                out.push(r);
            }
        }
    }
    out
}

pub fn nullspace(rows: Vec<Vec<Rational>>, cols: usize) -> Vec<Vec<Rational>> {
    let mut a = rows;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = Rational::one() / &a[r][c];
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for cc in 0..cols {
                    let t = &a[r][cc] * &f;
                    a[i][cc] = &a[i][cc] - &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Rational::zero(); cols];
            v[fc] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][fc].clone();
            }
            v
        })
        .collect()
}

struct Unknown {
    k: usize,
    i: usize,
    p: u32,
    q: u32,
}

pub fn oracle(alg: &Algebra, kind: &Kind, theta: Parity, b: DegreeBound) -> Vec<ConfMap> {
    let n = alg.rank();
    let mut unknowns = Vec::new();
    for k in 0..n {
        for i in 0..n {
            if alg.parity(k) != alg.parity(i) + theta {
                continue;
            }
            for p in 0..=b.d_partial {
                for q in 0..=b.d_lambda {
                    unknowns.push(Unknown { k, i, p, q });
                }
            }
        }
    }
    let matrix_of = |coef: &dyn Fn(usize) -> Rational| {
        let mut m = PolyMatrix::zeros(n, n);
        for (c, u) in unknowns.iter().enumerate() {
            let x = coef(c);
            if !x.is_zero() {
                let e = m.get(u.k, u.i) + &MPoly::monomial(x, [u.p, u.q, 0, 0]);
                m.set(u.k, u.i, e);
            }
        }
        m
    };
    let mut monomials: BTreeMap<(usize, Exponents), usize> = BTreeMap::new();
    let mut columns = Vec::new();
    for c in 0..unknowns.len() {
        let m = matrix_of(&|x| if x == c { Rational::one() } else { Rational::zero() });
        let mut col = BTreeMap::new();
        for (slot, p) in residual(alg, kind, &m, theta).iter().enumerate() {
            for (e, x) in p.terms() {
                let next = monomials.len();
                let row = *monomials.entry((slot, *e)).or_insert(next);
                col.insert(row, x.clone());
            }
        }
        columns.push(col);
    }
    let rows: Vec<Vec<Rational>> = (0..monomials.len())
        .map(|r| columns.iter().map(|c| c.get(&r).cloned().unwrap_or_else(Rational::zero)).collect())
        .collect();
    nullspace(rows, unknowns.len())
        .into_iter()
        .map(|v| ConfMap::new(alg.basis(), theta, matrix_of(&|c| v[c].clone())).unwrap())
        .collect()
}

pub fn kinds(alg: &Algebra) -> Vec<(EquationKind, Kind)> {
    let mut v = vec![
        (EquationKind::Der, Kind::Abg(int(1), int(1), int(1))),
        (EquationKind::abg(1, 0, 0), Kind::Abg(int(1), int(0), int(0))),
        (EquationKind::QCentroid, Kind::Abg(int(0), int(1), int(-1))),
    ];
    if alg.name() == "abelian(2|0)" {
        let c = MPoly::from_int;
        let swap = Morphism::new(
            "swap",
            alg.basis(),
            PolyMatrix::from_rows(vec![vec![c(0), c(1)], vec![c(1), c(0)]]).unwrap(),
        )
        .unwrap();
        let id = Morphism::identity(2);
        v.push((
            EquationKind::SigmaTau(Twist::Strict(swap.clone()), Twist::Strict(id.clone())),
            Kind::SigmaTau(swap, id),
        ));
    }
    v
}
