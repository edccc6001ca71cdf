use std::collections::{BTreeMap, HashMap};

use super::ast::*;
use super::{Diagnostic, Span};
use crate::cend::Morphism;
use crate::gmod::{Basis, PolyMatrix};
use crate::lcsa::{Algebra, Table};
use crate::poly::{int, MPoly, Var};

/// Commands a task may run.
pub const TASK_COMMANDS: [&str; 6] = ["check", "solve", "solve_gder", "interior", "hilbert", "verify"];

/// Keys a task may set.
pub const TASK_KEYS: [&str; 18] = [
    "run", "algebra", "kind", "parity", "dp", "dl", "sigma", "tau", "sigma_prime", "abg", "prop", "window",
    "interior", "power", "l0", "delta", "alpha", "strict_auto",
];

/// Maps every algebra carries without declaring them.
pub const IMPLICIT_MAPS: [&str; 2] = ["id", "neg_id"];

#[derive(Debug, Clone)]
pub struct MapDef {
    pub name: String,
    pub algebra: String,
    pub morphism: Morphism,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct Task {
    pub name: String,
    pub span: Span,
    pub command: String,
    pub algebra: String,
    pub options: BTreeMap<String, Vec<Atom>>,
}

impl Task {
    pub fn get(&self, key: &str) -> Option<&[Atom]> {
        self.options.get(key).map(Vec::as_slice)
    }

    /// Comma-joined text of a key, as a command-line flag would carry it.
    pub fn text(&self, key: &str) -> Option<String> {
        self.get(key)
            .map(|v| v.iter().map(Atom::text).collect::<Vec<_>>().join(","))
    }
}

#[derive(Debug, Clone, Default)]
pub struct Program {
    pub algebras: Vec<Algebra>,
    pub maps: Vec<MapDef>,
    pub tasks: Vec<Task>,
}

impl Program {
    pub fn algebra(&self, name: &str) -> Option<&Algebra> {
        self.algebras.iter().find(|a| a.name() == name)
    }

    /// A declared map on `alg`, or one of the implicit maps.
    pub fn morphism(&self, alg: &Algebra, name: &str) -> Option<Morphism> {
        implicit_map(alg, name).or_else(|| {
            self.maps
                .iter()
                .find(|m| m.name == name && m.algebra == alg.name())
                .map(|m| m.morphism.clone())
        })
    }

    pub fn maps_on<'a>(&'a self, alg: &'a str) -> impl Iterator<Item = &'a MapDef> + 'a {
        self.maps.iter().filter(move |m| m.algebra == alg)
    }
}

pub fn implicit_map(alg: &Algebra, name: &str) -> Option<Morphism> {
    match name {
        "id" => Some(Morphism::identity(alg.rank())),
        "neg_id" => Some(Morphism::scalar(alg.rank(), int(-1), "neg_id")),
        _ => None,
    }
}

struct Elab {
    diags: Vec<Diagnostic>,
}

impl Elab {
    fn err(&mut self, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(span, msg));
    }

    /// Coordinates of `e` in `basis`, or `None` after reporting.
    fn coords(&mut self, e: &ModExpr, index: &HashMap<&str, usize>, n: usize) -> Option<Vec<MPoly>> {
        let mut v = vec![MPoly::zero(); n];
        let mut ok = true;
        for (c, name) in &e.terms {
            match index.get(name.name.as_str()) {
                Some(&k) => v[k] = &v[k] + c,
                None => {
                    self.err(name.span, format!("unknown basis element `{}`", name.name));
                    ok = false;
                }
            }
        }
        ok.then_some(v)
    }

    fn algebra(&mut self, a: &AlgebraDecl) -> Option<Algebra> {
        let before = self.diags.len();
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (k, b) in a.basis.iter().enumerate() {
            if index.insert(b.name.name.as_str(), k).is_some() {
                self.err(b.name.span, format!("duplicate basis element `{}`", b.name.name));
            }
        }
        let n = a.basis.len();
        let parity = |k: usize| a.basis[k].parity;
        let mut table = Table::new();
        for br in &a.brackets {
            let (Some(&i), Some(&j)) = (index.get(br.left.name.as_str()), index.get(br.right.name.as_str())) else {
                for id in [&br.left, &br.right] {
                    if !index.contains_key(id.name.as_str()) {
                        self.err(id.span, format!("unknown basis element `{}`", id.name));
                    }
                }
                continue;
            };
            if i > j {
                self.err(
                    br.span,
                    format!(
                        "declare the ({},{}) pair with i <= j; the reverse is derived by skew-supersymmetry",
                        br.right.name, br.left.name
                    ),
                );
                continue;
            }
            if table.contains_key(&(i, j)) {
                self.err(br.span, format!("duplicate bracket [{},{}]", br.left.name, br.right.name));
                continue;
            }
            let want = parity(i) + parity(j);
            for (_, c) in &br.rhs.terms {
                if let Some(&k) = index.get(c.name.as_str()) {
                    if parity(k) != want {
                        self.err(
                            c.span,
                            format!(
                                "grading violation in [{},{}]: `{}` is {} but the bracket of {} and {} elements is {}",
                                br.left.name,
                                br.right.name,
                                c.name,
                                parity(k),
                                parity(i),
                                parity(j),
                                want
                            ),
                        );
                    }
                }
            }
            if let Some(v) = self.coords(&br.rhs, &index, n) {
                if v.iter().any(|p| !p.is_zero()) {
                    table.insert((i, j), v);
                }
            }
        }
        if self.diags.len() > before {
            return None;
        }
        let basis = Basis::new(
            a.basis.iter().map(|b| b.name.name.clone()).collect(),
            a.basis.iter().map(|b| b.parity).collect(),
        );
        match basis.and_then(|b| Algebra::new(a.name.name.clone(), b, table)) {
            Ok(alg) => Some(alg),
            Err(e) => {
                self.err(a.span, format!("algebra `{}`: {e}", a.name.name));
                None
            }
        }
    }

    fn map(&mut self, m: &MapDecl, alg: &Algebra) -> Option<Morphism> {
        let before = self.diags.len();
        let names = alg.basis().names();
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(k, s)| (s.as_str(), k)).collect();
        let n = alg.rank();
        let mut cols: Vec<Option<Vec<MPoly>>> = vec![None; n];
        for (src, e) in &m.images {
            let Some(&j) = index.get(src.name.as_str()) else {
                self.err(src.span, format!("unknown basis element `{}`", src.name));
                continue;
            };
            if cols[j].is_some() {
                self.err(src.span, format!("duplicate image for `{}`", src.name));
                continue;
            }
            if e.terms.iter().any(|(c, _)| c.uses(Var::X0)) {
                self.err(e.span, format!("map `{}`: x may not appear in a map image", m.name.name));
                continue;
            }
            for (_, c) in &e.terms {
                if let Some(&k) = index.get(c.name.as_str()) {
                    if alg.basis().parity(k) != alg.basis().parity(j) {
                        self.err(
                            c.span,
                            format!("map `{}` must preserve parity: `{}` and `{}` differ", m.name.name, src.name, c.name),
                        );
                    }
                }
            }
            cols[j] = self.coords(e, &index, n);
        }
        for (j, c) in cols.iter().enumerate() {
            if c.is_none() && self.diags.len() == before {
                self.err(m.span, format!("map `{}` gives no image for `{}`", m.name.name, names[j]));
            }
        }
        if self.diags.len() > before {
            return None;
        }
        let cols: Vec<Vec<MPoly>> = cols.into_iter().map(Option::unwrap).collect();
        match Morphism::new(m.name.name.clone(), alg.basis(), PolyMatrix::from_columns(n, &cols)) {
            Ok(mm) => Some(mm),
            Err(e) => {
                self.err(m.span, format!("map `{}`: {e}", m.name.name));
                None
            }
        }
    }

    fn task(&mut self, t: &TaskDecl, prog: &Program) -> Option<Task> {
        let before = self.diags.len();
        let mut options: BTreeMap<String, Vec<Atom>> = BTreeMap::new();
        for e in &t.entries {
            if !TASK_KEYS.contains(&e.key.name.as_str()) {
                self.err(e.key.span, format!("unknown task key `{}`", e.key.name));
                continue;
            }
            if options.insert(e.key.name.clone(), e.values.clone()).is_some() {
                self.err(e.key.span, format!("duplicate task key `{}`", e.key.name));
            }
        }
        let single = |this: &mut Self, key: &str| -> Option<(String, Span)> {
            match options.get(key).map(Vec::as_slice) {
                Some([a]) => Some((a.text(), a.span)),
                Some(v) => {
                    this.err(v[0].span, format!("task `{}`: `{key}` takes one value", t.name.name));
                    None
                }
                None => {
                    this.err(t.span, format!("task `{}` is missing `{key}`", t.name.name));
                    None
                }
            }
        };
        let command = single(self, "run");
        if let Some((c, span)) = &command {
            if !TASK_COMMANDS.contains(&c.as_str()) {
                self.err(*span, format!("unknown command `{c}`; expected one of {}", TASK_COMMANDS.join(", ")));
            }
        }
        let algebra = single(self, "algebra");
        if let Some((a, span)) = &algebra {
            match prog.algebra(a) {
                None => self.err(*span, format!("unknown algebra `{a}`")),
                Some(alg) => {
                    for key in ["sigma", "tau", "sigma_prime"] {
                        for v in options.get(key).into_iter().flatten() {
                            if prog.morphism(alg, &v.text()).is_none() {
                                self.err(v.span, format!("unknown map `{}` on `{a}`", v.text()));
                            }
                        }
                    }
                }
            }
        }
        if self.diags.len() > before {
            return None;
        }
        Some(Task {
            name: t.name.name.clone(),
            span: t.span,
            command: command?.0,
            algebra: algebra?.0,
            options,
        })
    }
}

/// Build algebras, maps and tasks, collecting every diagnostic.
pub fn elaborate(file: &SourceFile) -> Result<Program, Vec<Diagnostic>> {
    let mut el = Elab { diags: Vec::new() };
    let mut prog = Program::default();
    let mut seen: HashMap<(&str, &str), Span> = HashMap::new();
    for item in &file.items {
        let (kind, id) = match item {
            Item::Algebra(a) => ("algebra", &a.name),
            Item::Map(m) => ("map", &m.name),
            Item::Task(t) => ("task", &t.name),
        };
        if let Some(first) = seen.insert((kind, id.name.as_str()), id.span) {
            el.err(
                id.span,
                format!("duplicate {kind} `{}` (first declared at {first})", id.name),
            );
            continue;
        }
        match item {
            Item::Algebra(a) => {
                if let Some(alg) = el.algebra(a) {
                    prog.algebras.push(alg);
                }
            }
            Item::Map(m) => {
                if IMPLICIT_MAPS.contains(&m.name.name.as_str()) {
                    el.err(m.name.span, format!("`{}` is predefined on every algebra", m.name.name));
                    continue;
                }
                match prog.algebra(&m.algebra.name).cloned() {
                    None => el.err(m.algebra.span, format!("unknown algebra `{}`", m.algebra.name)),
                    Some(alg) => {
                        if let Some(mm) = el.map(m, &alg) {
                            prog.maps.push(MapDef {
                                name: m.name.name.clone(),
                                algebra: alg.name().to_string(),
                                morphism: mm,
                                span: m.span,
                            });
                        }
                    }
                }
            }
            Item::Task(t) => {
                if let Some(task) = el.task(t, &prog) {
                    prog.tasks.push(task);
                }
            }
        }
    }
    if el.diags.is_empty() {
        Ok(prog)
    } else {
        Err(el.diags)
    }
}

/// Identifier-safe spelling of an algebra name.
pub fn ident_name(name: &str) -> String {
    let mut s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    while s.ends_with('_') {
        s.pop();
    }
    if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit()) {
        s.insert(0, 'A');
    }
    s
}

fn expr_of(v: &[MPoly], names: &[String]) -> ModExpr {
    let mut e = ModExpr::default();
    for (p, n) in v.iter().zip(names) {
        e.push(p.clone(), Ident::new(n.clone(), Span::default()));
    }
    e
}

/// Declaration text for an existing algebra.
pub fn algebra_decl(alg: &Algebra) -> AlgebraDecl {
    let z = Span::default();
    let names = alg.basis().names();
    AlgebraDecl {
        name: Ident::new(ident_name(alg.name()), z),
        basis: names
            .iter()
            .enumerate()
            .map(|(k, n)| BasisEntry {
                name: Ident::new(n.clone(), z),
                parity: alg.basis().parity(k),
            })
            .collect(),
        brackets: alg
            .table()
            .iter()
            .map(|(&(i, j), v)| BracketDecl {
                left: Ident::new(names[i].clone(), z),
                right: Ident::new(names[j].clone(), z),
                rhs: expr_of(v, names),
                span: z,
            })
            .collect(),
        span: z,
    }
}

pub fn map_decl(alg: &Algebra, m: &Morphism) -> MapDecl {
    let z = Span::default();
    let names = alg.basis().names();
    MapDecl {
        name: Ident::new(ident_name(m.name()), z),
        algebra: Ident::new(ident_name(alg.name()), z),
        images: (0..alg.rank())
            .map(|j| (Ident::new(names[j].clone(), z), expr_of(&m.column(j), names)))
            .collect(),
        span: z,
    }
}
