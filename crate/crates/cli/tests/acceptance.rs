//! One line per acceptance criterion. Every criterion runs even when an
//! earlier one fails; the process exits nonzero if any did.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::path::PathBuf;
use std::process::{Command, Output};

use lcsa::cend::{GeneralizedScalar, GroupSpec, Morphism};
use lcsa::frontend::{self, parse, print};
use lcsa::hilbert::{rationality_probe, series, Rationality};
use lcsa::lcsa::Table;
use lcsa::poly::shorthand::c;
use lcsa::solver::{
    intersect, residual, saturation_scan, solve, solve_constraints, solve_interior, space_equal, Constraint,
    DegreeBound, EquationKind, InteriorKind, SolutionSpace,
};
use lcsa::verify::verify;
use lcsa::{Algebra, Element, MPoly, Outcome, Parity, PolyMatrix, PropositionId, Twist, Var, VerifyParams};

type Verdict = Result<(), String>;

const PARITIES: [Parity; 2] = [Parity::Even, Parity::Odd];
const SUITE: [&str; 7] = [
    "virasoro",
    "neveu_schwarz",
    "cur_sl2",
    "heisenberg_pair",
    "abelian(1|0)",
    "abelian(2|0)",
    "abelian(2|1)",
];

fn b22() -> DegreeBound {
    DegreeBound::new(2, 2)
}

fn alg(name: &str) -> Algebra {
    Algebra::builtin(name).unwrap()
}

fn morphism(a: &Algebra, name: &str, rows: Vec<Vec<i64>>) -> Morphism {
    let rows = rows.into_iter().map(|r| r.into_iter().map(c).collect()).collect();
    Morphism::new(name, a.basis(), PolyMatrix::from_rows(rows).unwrap()).unwrap()
}

fn cartan(a: &Algebra) -> Morphism {
    morphism(a, "cartan", vec![vec![0, 0, 1], vec![0, -1, 0], vec![1, 0, 0]])
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Verdict {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn space(a: &Algebra, k: &EquationKind, p: Parity) -> SolutionSpace {
    solve(a, k, p, b22()).unwrap()
}

fn same_kind(a: &Algebra, k1: &EquationKind, k2: &EquationKind) -> Verdict {
    for p in PARITIES {
        let (s1, s2) = (space(a, k1, p), space(a, k2, p));
        ensure(space_equal(&s1, &s2).unwrap(), || {
            format!("{}: {} != {} [{p}] ({} vs {})", a.name(), k1.label(), k2.label(), s1.dim(), s2.dim())
        })?;
    }
    Ok(())
}

fn corpus() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus"))
}

fn lcsa_cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcsa")).args(args).output().unwrap()
}

fn criterion_1() -> Verdict {
    for n in ["virasoro", "neveu_schwarz", "cur_sl2", "abelian(2|1)", "heisenberg_pair"] {
        let r = alg(n).check_axioms();
        ensure(r.passed, || format!("{n}: {:?}", r.violations))?;
    }
    let vir = alg("virasoro");
    let mut t = Table::new();
    t.insert((0, 0), vec![MPoly::var(Var::X0)]);
    let bad = Algebra::new("virasoro_mutated", vir.basis().clone(), t).unwrap();
    let r = bad.check_axioms();
    ensure(!r.passed, || "mutated algebra passes".into())?;
    let v = r
        .violations
        .iter()
        .find(|v| v.axiom.starts_with("C2"))
        .ok_or("no skew-symmetry violation")?;
    ensure(!v.witness.is_empty() && v.residual.iter().any(|s| s != "0"), || {
        format!("zero residual witness {v:?}")
    })
}

fn criterion_2() -> Verdict {
    let mut solves = 0;
    for n in SUITE {
        let a = alg(n);
        let id = Morphism::identity(a.rank());
        let kinds = [
            EquationKind::Der,
            EquationKind::GDer,
            EquationKind::QDer,
            EquationKind::Centroid,
            EquationKind::QCentroid,
            EquationKind::ZDer,
            EquationKind::abg(1, 0, 0),
            EquationKind::abg(1, 2, 3),
            EquationKind::abg(0, 1, -1),
            EquationKind::sigma_tau(Twist::Strict(id.clone()), Twist::Strict(id.clone())),
            EquationKind::sigma_tau(
                Twist::Strict(id.clone()),
                Twist::Generalized(GeneralizedScalar(Morphism::scalar(a.rank(), lcsa::poly::int(-1), "neg_id"))),
            ),
        ];
        for k in &kinds {
            for p in PARITIES {
                let s = space(&a, k, p);
                solves += 1;
                ensure(s.residual_check(), || format!("{n} {} [{p}]: residual flag", k.label()))?;
                for w in s.witnesses() {
                    let r = residual(&a, &[Constraint::Equation(k.clone())], p, &w);
                    ensure(r.iter().all(MPoly::is_zero), || format!("{n} {} [{p}]: nonzero residual", k.label()))?;
                }
            }
        }
    }
    println!("  {solves} solves checked");
    Ok(())
}

fn criterion_3() -> Verdict {
    for n in ["abelian(1|0)", "abelian(2|0)", "virasoro", "heisenberg_pair"] {
        let a = alg(n);
        for (dp, dl) in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1), (1, 2), (2, 2)] {
            let b = DegreeBound::new(dp, dl);
            for (kind, okind) in oracle::kinds(&a) {
                for p in PARITIES {
                    let s = solve(&a, &kind, p, b).unwrap();
                    let o = oracle::oracle(&a, &okind, p, b);
                    let ctx = || format!("{n} {} [{p}] {b}", kind.label());
                    ensure(s.dim() == o.len(), || format!("{}: dim {} vs oracle {}", ctx(), s.dim(), o.len()))?;
                    ensure(o.iter().all(|f| s.contains(f)), || format!("{}: oracle not inside solver", ctx()))?;
                    ensure(
                        s.basis()
                            .iter()
                            .all(|f| oracle::residual(&a, &okind, f.matrix(), p).iter().all(MPoly::is_zero)),
                        || format!("{}: solver not inside oracle", ctx()),
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn criterion_4() -> Verdict {
    let sl2 = alg("cur_sl2");
    let ab = alg("abelian(2|0)");
    let cases = [
        (&sl2, cartan(&sl2), Morphism::identity(3)),
        (&ab, morphism(&ab, "swap", vec![vec![0, 1], vec![1, 0]]), morphism(&ab, "diag", vec![vec![1, 0], vec![0, 2]])),
    ];
    for (a, s, t) in cases {
        let reduced = t.invert().unwrap().compose(&s);
        for p in PARITIES {
            let lhs = space(a, &EquationKind::sigma_tau(Twist::Strict(s.clone()), Twist::Strict(t.clone())), p);
            let rhs = space(
                a,
                &EquationKind::sigma_tau(Twist::Strict(reduced.clone()), Twist::Strict(Morphism::identity(a.rank()))),
                p,
            );
            ensure(lhs.dim() == rhs.dim(), || format!("{}: {} vs {} [{p}]", a.name(), lhs.dim(), rhs.dim()))?;
            let tinv = t.invert().unwrap();
            for d in lhs.basis() {
                ensure(rhs.contains(&d.after_morphism(&tinv)), || format!("{}: image fails [{p}]", a.name()))?;
            }
        }
        let mut params = VerifyParams::identity(a, b22());
        params.sigma = s;
        params.tau = t;
        let r = verify(PropositionId::P2_1, a, &params).unwrap();
        ensure(r.outcome == Outcome::Pass, || format!("{}: {}", a.name(), r.summary_line()))?;
    }
    Ok(())
}

fn criterion_5() -> Verdict {
    for n in ["virasoro", "cur_sl2"] {
        let a = alg(n);
        same_kind(&a, &EquationKind::abg(1, 1, 1), &EquationKind::Der)?;
        same_kind(&a, &EquationKind::abg(0, 1, -1), &EquationKind::QCentroid)?;
        same_kind(&a, &EquationKind::abg(5, 10, 15), &EquationKind::abg(1, 2, 3))?;
    }
    Ok(())
}

fn criterion_6() -> Verdict {
    for n in ["virasoro", "cur_sl2"] {
        let a = alg(n);
        for p in PARITIES {
            let lhs = space(&a, &EquationKind::abg(1, 2, 3), p);
            let meet = intersect(&a, &space(&a, &EquationKind::abg(0, -1, 1), p), &space(&a, &EquationKind::abg(2, 5, 5), p))
                .unwrap();
            ensure(space_equal(&lhs, &meet).unwrap(), || {
                format!("{n} [{p}]: {} vs {}", lhs.dim(), meet.dim())
            })?;
        }
    }
    Ok(())
}

fn criterion_7() -> Verdict {
    let a = alg("virasoro");
    let derived: Vec<Vec<MPoly>> = a.derived_subalgebra().columns();
    for p in PARITIES {
        let s = space(&a, &EquationKind::abg(1, 0, 0), p);
        let ann = solve_constraints(&a, &[Constraint::Annihilates(derived.clone())], p, b22(), "ann").unwrap();
        ensure(space_equal(&s, &ann).unwrap(), || format!("[{p}]: {} vs {}", s.dim(), ann.dim()))?;
        ensure(s.dim() == 0, || format!("[{p}]: dim {}", s.dim()))?;
    }
    Ok(())
}

fn criterion_8() -> Verdict {
    for n in ["virasoro", "cur_sl2"] {
        let a = alg(n);
        let neg = GeneralizedScalar(Morphism::scalar(a.rank(), lcsa::poly::int(-1), "neg_id"));
        let k = EquationKind::sigma_tau(Twist::Strict(Morphism::identity(a.rank())), Twist::Generalized(neg));
        same_kind(&a, &EquationKind::abg(1, 1, -1), &k)?;
    }
    Ok(())
}

fn criterion_9() -> Verdict {
    let a = alg("virasoro");
    let cs = [Constraint::Equation(EquationKind::Der)];
    let scan = saturation_scan(&a, &cs, Parity::Even, DegreeBound::new(1, 1), 3).unwrap();
    let last = scan.rows.last().unwrap();
    ensure(last.bound == DegreeBound::new(3, 3), || format!("scan ends at {}", last.bound))?;
    ensure(scan.saturated && scan.rank == 1, || format!("{:?}", scan.rows))?;
    for b in [DegreeBound::new(2, 2), DegreeBound::new(3, 3)] {
        let s = solve(&a, &EquationKind::Der, Parity::Even, b).unwrap();
        let mut inner = Vec::new();
        for k in 0..=b.d_lambda {
            let r = Element::new(a.basis(), vec![MPoly::var(Var::Partial).pow(k)]).unwrap();
            let ad = a.adjoint(&r).unwrap();
            if s.indexer().coords(&ad).is_some() {
                inner.push(ad);
            }
        }
        ensure(inner.iter().all(|f| s.contains(f)), || format!("{b}: inner derivation missing"))?;
        ensure(s.dim() == inner.len(), || format!("{b}: dim {} but {} inner derivations", s.dim(), inner.len()))?;
        for f in s.basis() {
            ensure(in_span(f, &inner), || format!("{b}: solution outside the inner span"))?;
        }
    }
    let odd = solve(&a, &EquationKind::Der, Parity::Odd, DegreeBound::new(3, 3)).unwrap();
    ensure(odd.dim() == 0, || "odd derivations on virasoro".into())
}

/// Exact membership in the ℚ-span via the nullspace oracle.
fn in_span(f: &lcsa::ConfMap, gens: &[lcsa::ConfMap]) -> bool {
    let mut keys = std::collections::BTreeSet::new();
    let flat = |m: &lcsa::ConfMap| {
        let mut v = std::collections::BTreeMap::new();
        let n = m.matrix().rows();
        for k in 0..n {
            for i in 0..n {
                for (e, q) in m.matrix().get(k, i).terms() {
                    v.insert((k, i, *e), q.clone());
                }
            }
        }
        v
    };
    let cols: Vec<_> = gens.iter().chain(std::iter::once(f)).map(flat).collect();
    for c in &cols {
        keys.extend(c.keys().cloned());
    }
    let rows: Vec<Vec<lcsa::Rational>> = keys
        .iter()
        .map(|k| cols.iter().map(|c| c.get(k).cloned().unwrap_or_default()).collect())
        .collect();
    oracle::nullspace(rows, cols.len()).iter().any(|v| !num_traits::Zero::is_zero(&v[gens.len()]))
}

fn criterion_10() -> Verdict {
    let a = alg("cur_sl2");
    let sigma = cartan(&a);
    let b = DegreeBound::new(1, 1);
    let g = GroupSpec::cyclic(&a, &sigma).unwrap();
    for interior in [InteriorKind::Plus, InteriorKind::Minus, InteriorKind::Star] {
        let w = lcsa::HilbertWindow::new(-3, 3, b, interior).unwrap();
        let r = series(&a, &sigma, &w).unwrap();
        let tag = interior.as_str();
        ensure(r.order == Some(2) && r.periodic_mod_order, || format!("{tag}: {:?}", r.ranks()))?;
        ensure(r.coefficients.len() == 7, || format!("{tag}: window size"))?;
        for k in -3..=1 {
            for p in PARITIES {
                let json = |k: i64| {
                    let s = solve_interior(&a, &g, k, interior, p, b).unwrap();
                    serde_json::to_string(&s.basis().iter().map(|f| f.render()).collect::<Vec<_>>()).unwrap()
                };
                ensure(json(k) == json(k + 2), || format!("{tag}: pieces {k} and {} differ [{p}]", k + 2))?;
            }
        }
        let Rationality::ClosedForm(f) = rationality_probe(&r, 2).unwrap() else {
            return Err(format!("{tag}: no closed form"));
        };
        ensure(r.coefficients.iter().all(|c| f.coefficient(c.k) == c.rank as i64), || {
            format!("{tag}: {} vs {:?}", f.render(), r.ranks())
        })?;
    }
    Ok(())
}

fn criterion_11() -> Verdict {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "lcsa"))
        .collect();
    files.sort();
    ensure(files.len() >= 6, || format!("{} corpus files", files.len()))?;
    for f in &files {
        let text = std::fs::read_to_string(f).unwrap();
        let first = parse(&text).map_err(|d| format!("{}: {d:?}", f.display()))?;
        let printed = print(&first);
        let second = parse(&printed).map_err(|d| format!("{} reprint: {d:?}", f.display()))?;
        ensure(first.without_spans() == second.without_spans(), || format!("{}: round trip", f.display()))?;
        ensure(print(&second) == printed, || format!("{}: printing not stable", f.display()))?;
        frontend::load(&text).map_err(|d| format!("{}: {d:?}", f.display()))?;
    }
    let broken = [
        "algebra A { basis L: even; [L,L] = (d + 2*x) L }",
        "algebra A { basis L: even, L: odd; }",
        "algebra A { basis a: even, b: even; [b,a] = a; }",
        "algebra A { basis a: even, b: odd; [a,a] = b; }",
        "algebra A { basis a: even; [a,q] = a; }",
        "algebra A { basis a: even; }\nmap m on A { a -> x a; }",
        "algebra A { basis a: even, b: odd; }\nmap m on A { a -> b; b -> a; }",
        "algebra A { basis a: even; }\nmap m on B { a -> a; }",
        "algebra A { basis a: even; }\ntask t { run = solve; algebra = A; colour = red; }",
        "algebra A { basis a: even; [a,a] = 1/0 a; }",
        "algebra A { basis a: even; @ }",
        "task t { run = solve; }",
    ];
    for src in broken {
        let diags = frontend::load(src).err().ok_or_else(|| format!("accepted: {src}"))?;
        ensure(!diags.is_empty(), || format!("no diagnostics: {src}"))?;
        for d in &diags {
            let lines = src.lines().count();
            ensure(d.span.line >= 1 && d.span.line <= lines + 1 && d.span.col >= 1, || {
                format!("bad span {d}: {src}")
            })?;
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.lcsa");
    std::fs::write(&bad, broken[0]).unwrap();
    let expect = [
        ("virasoro.lcsa", 0),
        ("neveu_schwarz.lcsa", 0),
        ("cur_sl2.lcsa", 0),
        ("abelian_2_1.lcsa", 0),
        ("heisenberg_pair.lcsa", 0),
        ("virasoro_mutated.lcsa", 1),
    ];
    for (f, code) in expect {
        let path = corpus().join(f);
        let out = lcsa_cli(&["check", path.to_str().unwrap()]);
        ensure(out.status.code() == Some(code), || format!("check {f}: {:?}", out.status))?;
    }
    let out = lcsa_cli(&["check", bad.to_str().unwrap()]);
    ensure(out.status.code() == Some(2), || format!("check bad.lcsa: {:?}", out.status))?;
    let err = String::from_utf8_lossy(&out.stderr);
    ensure(err.contains("error at 1:"), || format!("no span in {err}"))?;
    let out = lcsa_cli(&["check", "builtin:no_such_algebra"]);
    ensure(out.status.code() == Some(2), || format!("unknown builtin: {:?}", out.status))
}

fn criterion_12() -> Verdict {
    let tasks = corpus().join("tasks.lcsa");
    let tasks = tasks.to_str().unwrap();
    let run = || {
        let mut all = Vec::new();
        let out = lcsa_cli(&["report", tasks, "--json"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        all.extend(out.stdout);
        for n in SUITE {
            let file = format!("builtin:{n}");
            let out = lcsa_cli(&["verify", &file, "--prop", "all", "--json"]);
            all.extend(out.stdout);
        }
        all
    };
    let (first, second) = (run(), run());
    ensure(!first.is_empty() && first == second, || "reports differ".into())
}

fn main() {
    let criteria: [(usize, &str, fn() -> Verdict); 12] = [
        (1, "axiom suite", criterion_1),
        (2, "solver soundness", criterion_2),
        (3, "solver completeness against the oracle", criterion_3),
        (4, "twisted derivations reduce to sigma-derivations", criterion_4),
        (5, "abg special cases and scaling", criterion_5),
        (6, "abg intersection identity", criterion_6),
        (7, "abg(1,0,0) annihilates the derived algebra", criterion_7),
        (8, "abg(1,1,-1) equals the (id,-id) space", criterion_8),
        (9, "virasoro derivations are inner", criterion_9),
        (10, "cartan hilbert series", criterion_10),
        (11, "dsl round trip, spans and exit codes", criterion_11),
        (12, "deterministic reports", criterion_12),
    ];
    let mut failed = Vec::new();
    for (n, name, f) in criteria {
        match f() {
            Ok(()) => println!("criterion {n:>2} ({name}): pass"),
            Err(e) => {
                println!("criterion {n:>2} ({name}): FAIL: {e}");
                failed.push(n);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
