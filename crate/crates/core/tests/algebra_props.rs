use lcsa::cend::{bracket_at, compose, ConfMap};
use lcsa::poly::int;
use lcsa::solver::{residual, Constraint, EquationKind};
use lcsa::{Algebra, Element, MPoly, Parity, PolyMatrix, Var};
use proptest::prelude::*;

const ALGEBRAS: [&str; 5] = ["virasoro", "neveu_schwarz", "cur_sl2", "heisenberg_pair", "abelian(2|1)"];

fn algebra() -> impl Strategy<Value = Algebra> {
    prop::sample::select(ALGEBRAS.to_vec()).prop_map(|n| Algebra::builtin(n).unwrap())
}

fn dpoly() -> impl Strategy<Value = MPoly> {
    prop::collection::vec(-3i64..=3, 1..3).prop_map(|cs| {
        cs.iter()
            .enumerate()
            .fold(MPoly::zero(), |acc, (p, c)| &acc + &MPoly::monomial(int(*c), [p as u32, 0, 0, 0]))
    })
}

/// Homogeneous element: random `∂`-dressings on basis vectors of one parity.
fn element(alg: &Algebra, parity: Parity) -> impl Strategy<Value = Vec<MPoly>> {
    let mask: Vec<bool> = (0..alg.rank()).map(|i| alg.parity(i) == parity).collect();
    prop::collection::vec(dpoly(), alg.rank()).prop_map(move |v| {
        v.into_iter()
            .zip(&mask)
            .map(|(p, m)| if *m { p } else { MPoly::zero() })
            .collect()
    })
}

fn conf_map(alg: &Algebra, parity: Parity) -> impl Strategy<Value = ConfMap> {
    let n = alg.rank();
    let basis = alg.basis().clone();
    prop::collection::vec(prop::collection::vec(-2i64..=2, 4), n * n).prop_map(move |cs| {
        let mut m = PolyMatrix::zeros(n, n);
        for k in 0..n {
            for i in 0..n {
                if basis.parity(k) != basis.parity(i) + parity {
                    continue;
                }
                let c = &cs[k * n + i];
                let mut p = MPoly::zero();
                for (t, (a, b)) in [(0, 0), (1, 0), (0, 1), (1, 1)].into_iter().enumerate() {
                    p = &p + &MPoly::monomial(int(c[t]), [a, b, 0, 0]);
                }
                m.set(k, i, p);
            }
        }
        ConfMap::new(&basis, parity, m).unwrap()
    })
}

fn parity() -> impl Strategy<Value = Parity> {
    prop::sample::select(vec![Parity::Even, Parity::Odd])
}

fn x(i: usize) -> MPoly {
    MPoly::var(Var::SLOTS[i])
}

fn op_eq(a: &lcsa::Operator, b: &lcsa::Operator) -> bool {
    a.matrix == b.matrix && a.shift == b.shift
}

#[test]
fn builtins_satisfy_axioms() {
    for n in ALGEBRAS {
        assert!(Algebra::builtin(n).unwrap().check_axioms().passed, "{n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn skew_supersymmetry_on_elements(
        (alg, pu, pv, u, v) in (algebra(), parity(), parity()).prop_flat_map(|(a, pu, pv)| {
            let (eu, ev) = (element(&a, pu), element(&a, pv));
            (Just(a), Just(pu), Just(pv), eu, ev)
        })
    ) {
        let lhs = alg.bracket_raw(&u, &v, &x(0));
        let flip = -(&MPoly::var(Var::Partial) + &x(0));
        let s = MPoly::from_int(-Parity::sign(pu, pv));
        let rhs: Vec<MPoly> = alg.bracket_raw(&v, &u, &x(1)).iter().map(|p| &p.substitute(Var::X1, &flip) * &s).collect();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sesquilinearity_on_elements(
        (alg, u, v) in algebra().prop_flat_map(|a| {
            let (eu, ev) = (element(&a, Parity::Even), element(&a, Parity::Even));
            (Just(a), eu, ev)
        })
    ) {
        let d = MPoly::var(Var::Partial);
        let du: Vec<MPoly> = u.iter().map(|p| p * &d).collect();
        let dv: Vec<MPoly> = v.iter().map(|p| p * &d).collect();
        let b = alg.bracket_raw(&u, &v, &x(0));
        let left: Vec<MPoly> = b.iter().map(|p| p * &-x(0)).collect();
        prop_assert_eq!(alg.bracket_raw(&du, &v, &x(0)), left);
        let right: Vec<MPoly> = b.iter().map(|p| p * &(&d + &x(0))).collect();
        prop_assert_eq!(alg.bracket_raw(&u, &dv, &x(0)), right);
    }

    #[test]
    fn adjoint_maps_are_derivations((alg, p, u) in (algebra(), parity()).prop_flat_map(|(a, p)| {
        let e = element(&a, p);
        (Just(a), Just(p), e)
    })) {
        let el = Element::new(alg.basis(), u).unwrap();
        prop_assume!(!el.is_zero());
        let ad = alg.adjoint(&el).unwrap();
        let r = residual(&alg, &[Constraint::Equation(EquationKind::Der)], p, &[ad]);
        prop_assert!(r.iter().all(MPoly::is_zero));
    }

    #[test]
    fn composition_is_associative((f, g, h) in algebra().prop_flat_map(|a| {
        (conf_map(&a, Parity::Even), conf_map(&a, Parity::Odd), conf_map(&a, Parity::Even))
    })) {
        let (p, q) = (x(0), x(1));
        let left = f.at(&p).then(&g.at(&q)).then(&h.at(&x(2)));
        let right = f.at(&p).then(&g.at(&q).then(&h.at(&x(2))));
        prop_assert!(op_eq(&left, &right));
        prop_assert!(compose(&f, &g).is_ok());
    }

    #[test]
    fn gc_bracket_axioms((f, g, h) in (algebra(), parity(), parity(), parity()).prop_flat_map(|(a, pf, pg, ph)| {
        (conf_map(&a, pf), conf_map(&a, pg), conf_map(&a, ph))
    })) {
        let (pf, pg, ph) = (f.parity(), g.parity(), h.parity());
        let fam = |m: &ConfMap| { let m = m.clone(); move |s: &MPoly| m.at(s) };
        let fg = bracket_at(fam(&f), pf, fam(&g), pg, &x(0), &x(1));
        let df = f.partial();
        prop_assert!(op_eq(&bracket_at(fam(&df), pf, fam(&g), pg, &x(0), &x(1)), &fg.scale(&-x(0))));
        let gf = bracket_at(fam(&g), pg, fam(&f), pf, &(&x(1) - &x(0)), &x(1));
        prop_assert!(op_eq(&fg, &gf.scale(&MPoly::from_int(-Parity::sign(pf, pg)))));
        let gh = |s: &MPoly| bracket_at(fam(&g), pg, fam(&h), ph, &x(1), s);
        let lhs = bracket_at(fam(&f), pf, gh, pg + ph, &x(0), &x(2));
        let fgs = |s: &MPoly| bracket_at(fam(&f), pf, fam(&g), pg, &x(0), s);
        let r1 = bracket_at(fgs, pf + pg, fam(&h), ph, &(&x(0) + &x(1)), &x(2));
        let fh = |s: &MPoly| bracket_at(fam(&f), pf, fam(&h), ph, &x(0), s);
        let r2 = bracket_at(fam(&g), pg, fh, pf + ph, &x(1), &x(2));
        prop_assert!(op_eq(&lhs, &r1.add(&r2.scale(&MPoly::from_int(Parity::sign(pf, pg))))));
    }
}

#[test]
fn mutated_virasoro_fails_skew_symmetry() {
    let mut t = lcsa::lcsa::Table::new();
    t.insert((0, 0), vec![MPoly::var(Var::X0)]);
    let alg = Algebra::new("virasoro_mutated", Algebra::builtin("virasoro").unwrap().basis().clone(), t).unwrap();
    let r = alg.check_axioms();
    assert!(!r.passed);
    let v = &r.violations[0];
    assert!(v.axiom.starts_with("C2"), "{}", v.axiom);
    assert!(v.residual.iter().any(|s| s != "0"));
}
