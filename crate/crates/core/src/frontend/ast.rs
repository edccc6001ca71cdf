use num_bigint::BigInt;

use super::Span;
use crate::gmod::Parity;
use crate::poly::MPoly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>, span: Span) -> Self {
        Ident {
            name: name.into(),
            span,
        }
    }
}

/// `Σ pₖ(∂, x) Bₖ` with one term per basis name, in order of first
/// appearance. The empty sum is `0`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModExpr {
    pub terms: Vec<(MPoly, Ident)>,
    pub span: Span,
}

impl ModExpr {
    /// Add `c·name`, merging with an existing term and dropping zeros.
    pub fn push(&mut self, c: MPoly, name: Ident) {
        if let Some(pos) = self.terms.iter().position(|(_, n)| n.name == name.name) {
            let sum = &self.terms[pos].0 + &c;
            if sum.is_zero() {
                self.terms.remove(pos);
            } else {
                self.terms[pos].0 = sum;
            }
        } else if !c.is_zero() {
            self.terms.push((c, name));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisEntry {
    pub name: Ident,
    pub parity: Parity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketDecl {
    pub left: Ident,
    pub right: Ident,
    pub rhs: ModExpr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraDecl {
    pub name: Ident,
    pub basis: Vec<BasisEntry>,
    pub brackets: Vec<BracketDecl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapDecl {
    pub name: Ident,
    pub algebra: Ident,
    pub images: Vec<(Ident, ModExpr)>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomKind {
    Ident(String),
    Int(BigInt),
    Ratio(BigInt, BigInt),
    Str(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub kind: AtomKind,
    pub span: Span,
}

impl Atom {
    /// The atom as plain text, as a command-line flag would carry it.
    pub fn text(&self) -> String {
        match &self.kind {
            AtomKind::Ident(s) | AtomKind::Str(s) => s.clone(),
            AtomKind::Int(n) => n.to_string(),
            AtomKind::Ratio(n, d) => format!("{n}/{d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskEntry {
    pub key: Ident,
    pub values: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskDecl {
    pub name: Ident,
    pub entries: Vec<TaskEntry>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Algebra(AlgebraDecl),
    Map(MapDecl),
    Task(TaskDecl),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceFile {
    pub items: Vec<Item>,
}

impl SourceFile {
    /// Copy with every span reset, for structural comparison.
    pub fn without_spans(&self) -> SourceFile {
        let z = Span::default();
        let id = |i: &Ident| Ident::new(i.name.clone(), z);
        let expr = |e: &ModExpr| ModExpr {
            terms: e.terms.iter().map(|(c, n)| (c.clone(), id(n))).collect(),
            span: z,
        };
        let items = self
            .items
            .iter()
            .map(|item| match item {
                Item::Algebra(a) => Item::Algebra(AlgebraDecl {
                    name: id(&a.name),
                    basis: a
                        .basis
                        .iter()
                        .map(|b| BasisEntry {
                            name: id(&b.name),
                            parity: b.parity,
                        })
                        .collect(),
                    brackets: a
                        .brackets
                        .iter()
                        .map(|b| BracketDecl {
                            left: id(&b.left),
                            right: id(&b.right),
                            rhs: expr(&b.rhs),
                            span: z,
                        })
                        .collect(),
                    span: z,
                }),
                Item::Map(m) => Item::Map(MapDecl {
                    name: id(&m.name),
                    algebra: id(&m.algebra),
                    images: m.images.iter().map(|(n, e)| (id(n), expr(e))).collect(),
                    span: z,
                }),
                Item::Task(t) => Item::Task(TaskDecl {
                    name: id(&t.name),
                    entries: t
                        .entries
                        .iter()
                        .map(|e| TaskEntry {
                            key: id(&e.key),
                            values: e
                                .values
                                .iter()
                                .map(|a| Atom {
                                    kind: a.kind.clone(),
                                    span: z,
                                })
                                .collect(),
                        })
                        .collect(),
                    span: z,
                }),
            })
            .collect();
        SourceFile { items }
    }
}
