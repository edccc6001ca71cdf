use std::fmt::Write;

use num_traits::{One, Signed};

use super::ast::*;
use crate::gmod::Parity;
use crate::poly::MPoly;

fn coefficient(c: &MPoly) -> String {
    match c.constant_value() {
        Some(q) if q.is_one() => String::new(),
        Some(q) if q.is_positive() => format!("{q} "),
        _ => format!("({c}) "),
    }
}

pub fn print_expr(e: &ModExpr) -> String {
    if e.terms.is_empty() {
        return "0".into();
    }
    e.terms
        .iter()
        .map(|(c, n)| format!("{}{}", coefficient(c), n.name))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn print_atom(a: &Atom) -> String {
    match &a.kind {
        AtomKind::Str(s) => format!("\"{s}\""),
        _ => a.text(),
    }
}

pub fn print_algebra(a: &AlgebraDecl) -> String {
    let mut out = format!("algebra {} {{\n    basis ", a.name.name);
    let basis: Vec<String> = a
        .basis
        .iter()
        .map(|b| {
            let p = match b.parity {
                Parity::Even => "even",
                Parity::Odd => "odd",
            };
            format!("{}: {p}", b.name.name)
        })
        .collect();
    out.push_str(&basis.join(", "));
    out.push_str(";\n");
    for b in &a.brackets {
        let _ = writeln!(out, "    [{},{}] = {};", b.left.name, b.right.name, print_expr(&b.rhs));
    }
    out.push_str("}\n");
    out
}

pub fn print_map(m: &MapDecl) -> String {
    let mut out = format!("map {} on {} {{\n", m.name.name, m.algebra.name);
    for (src, e) in &m.images {
        let _ = writeln!(out, "    {} -> {};", src.name, print_expr(e));
    }
    out.push_str("}\n");
    out
}

pub fn print_task(t: &TaskDecl) -> String {
    let mut out = format!("task {} {{\n", t.name.name);
    for e in &t.entries {
        let vals: Vec<String> = e.values.iter().map(print_atom).collect();
        let _ = writeln!(out, "    {} = {};", e.key.name, vals.join(", "));
    }
    out.push_str("}\n");
    out
}

/// Canonical text of a source file; items separated by blank lines.
pub fn print(f: &SourceFile) -> String {
    f.items
        .iter()
        .map(|item| match item {
            Item::Algebra(a) => print_algebra(a),
            Item::Map(m) => print_map(m),
            Item::Task(t) => print_task(t),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn round_trip() {
        let src = "algebra A { basis a: even, b: odd; [a,a] = (d + 2*x) a; [a,b] = -b + 3/2 x b; [b,b] = 2 a; }\n\
                   map s on A { a -> a; b -> -b; }\n\
                   task t { run = verify; prop = \"P4.7\"; abg = 1, -2, 3/4; }";
        let f = parse(src).unwrap();
        let text = print(&f);
        let g = parse(&text).unwrap();
        assert_eq!(f.without_spans(), g.without_spans());
        assert_eq!(print(&g), text);
        assert!(text.contains("[a,b] = (3/2*x - 1) b;"), "{text}");
        assert!(text.contains("b -> (-1) b;"));
    }
}
