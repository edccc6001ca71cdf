mod oracle;

use lcsa::solver::{solve, DegreeBound};
use lcsa::{Algebra, MPoly, Parity};
use oracle::{kinds, oracle, residual};

#[test]
fn solver_matches_oracle() {
    for name in ["abelian(1|0)", "abelian(2|0)", "virasoro", "heisenberg_pair"] {
        let alg = Algebra::builtin(name).unwrap();
        for (dp, dl) in [(1, 1), (2, 1), (2, 2)] {
            let b = DegreeBound::new(dp, dl);
            for (kind, okind) in kinds(&alg) {
                for theta in [Parity::Even, Parity::Odd] {
                    let s = solve(&alg, &kind, theta, b).unwrap();
                    let o = oracle(&alg, &okind, theta, b);
                    let ctx = format!("{name} {} {theta} {b}", kind.label());
                    assert_eq!(s.dim(), o.len(), "{ctx}");
                    for f in &o {
                        assert!(s.contains(f), "{ctx}: oracle element outside solver space");
                    }
                    for f in s.basis() {
                        assert!(
                            residual(&alg, &okind, f.matrix(), theta).iter().all(MPoly::is_zero),
                            "{ctx}: solver element fails the oracle identity"
                        );
                    }
                }
            }
        }
    }
}
