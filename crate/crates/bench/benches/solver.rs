use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use lcsa::cend::Morphism;
use lcsa::hilbert::series;
use lcsa::poly::shorthand::c;
use lcsa::solver::{solve, DegreeBound, EquationKind, InteriorKind};
use lcsa::verify::{verify_many, VerifyParams};
use lcsa::{Algebra, HilbertWindow, Parity, PolyMatrix, PropositionId};

fn solver(cr: &mut Criterion) {
    let mut g = cr.benchmark_group("solve");
    for name in ["virasoro", "neveu_schwarz", "cur_sl2"] {
        let a = Algebra::builtin(name).unwrap();
        for (dp, dl) in [(2, 2), (3, 3)] {
            g.bench_function(format!("{name} der {dp},{dl}"), |b| {
                b.iter(|| solve(&a, &EquationKind::Der, Parity::Even, black_box(DegreeBound::new(dp, dl))).unwrap())
            });
        }
        g.bench_function(format!("{name} gder 2,2"), |b| {
            b.iter(|| solve(&a, &EquationKind::GDer, Parity::Even, DegreeBound::new(2, 2)).unwrap())
        });
    }
    g.finish();
}

fn axioms(cr: &mut Criterion) {
    for name in ["neveu_schwarz", "cur_sl2"] {
        let a = Algebra::builtin(name).unwrap();
        cr.bench_function(&format!("axioms {name}"), |b| b.iter(|| black_box(&a).check_axioms()));
    }
}

fn hilbert(cr: &mut Criterion) {
    let a = Algebra::builtin("cur_sl2").unwrap();
    let m = PolyMatrix::from_rows(vec![
        vec![c(0), c(0), c(1)],
        vec![c(0), c(-1), c(0)],
        vec![c(1), c(0), c(0)],
    ])
    .unwrap();
    let sigma = Morphism::new("cartan", a.basis(), m).unwrap();
    let w = HilbertWindow::new(-3, 3, DegreeBound::new(1, 1), InteriorKind::Minus).unwrap();
    cr.bench_function("hilbert cur_sl2 cartan", |b| b.iter(|| series(&a, &sigma, &w).unwrap()));
}

fn verify_suite(cr: &mut Criterion) {
    let a = Algebra::builtin("virasoro").unwrap();
    let p = VerifyParams::identity(&a, DegreeBound::new(2, 2));
    let mut g = cr.benchmark_group("verify");
    g.sample_size(10);
    g.bench_function("virasoro all", |b| b.iter(|| verify_many(&PropositionId::ALL, &a, &p).unwrap()));
    g.finish();
}

criterion_group!(benches, solver, axioms, hilbert, verify_suite);
criterion_main!(benches);
