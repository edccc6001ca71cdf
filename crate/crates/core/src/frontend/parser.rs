use num_bigint::BigInt;
use num_traits::Zero;

use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::{Diagnostic, Span};
use crate::gmod::Parity;
use crate::poly::{MPoly, Rational, Var};

/// Names that denote `∂` and `λ` and so cannot name basis elements.
pub const RESERVED: [&str; 2] = ["d", "x"];

pub fn parse(src: &str) -> Result<SourceFile, Vec<Diagnostic>> {
    let toks = lex(src).map_err(|d| vec![d])?;
    let mut p = Parser { toks, pos: 0 };
    p.file().map_err(|d| vec![d])
}

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        let t = self.peek();
        Diagnostic::error(t.span, format!("expected {wanted}, found {}", t.tok.describe()))
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if self.peek().tok == tok {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{}`", tok.symbol())))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Ident> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                let span = self.bump().span;
                Ok(Ident::new(s, span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<Span> {
        match &self.peek().tok {
            Tok::Ident(s) if s == kw => Ok(self.bump().span),
            _ => Err(self.unexpected(&format!("`{kw}`"))),
        }
    }

    fn name(&mut self, what: &str) -> PResult<Ident> {
        let id = self.ident(what)?;
        if RESERVED.contains(&id.name.as_str()) {
            return Err(Diagnostic::error(
                id.span,
                format!("`{}` is reserved for a variable and cannot name {what}", id.name),
            ));
        }
        Ok(id)
    }

    fn file(&mut self) -> PResult<SourceFile> {
        let mut items = Vec::new();
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::Eof => break,
                Tok::Ident(k) if k == "algebra" => items.push(Item::Algebra(self.algebra()?)),
                Tok::Ident(k) if k == "map" => items.push(Item::Map(self.map()?)),
                Tok::Ident(k) if k == "task" => items.push(Item::Task(self.task()?)),
                _ => return Err(self.unexpected("`algebra`, `map` or `task`")),
            }
        }
        Ok(SourceFile { items })
    }

    fn algebra(&mut self) -> PResult<AlgebraDecl> {
        let span = self.keyword("algebra")?;
        let name = self.ident("an algebra name")?;
        self.expect(Tok::LBrace)?;
        self.keyword("basis")?;
        let mut basis = Vec::new();
        loop {
            let n = self.name("a basis element")?;
            self.expect(Tok::Colon)?;
            let parity = match &self.peek().tok {
                Tok::Ident(s) if s == "even" => Parity::Even,
                Tok::Ident(s) if s == "odd" => Parity::Odd,
                _ => return Err(self.unexpected("`even` or `odd`")),
            };
            self.bump();
            basis.push(BasisEntry { name: n, parity });
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::Semi)?;
        let mut brackets = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let bspan = self.expect(Tok::LBracket)?;
            let left = self.name("a basis element")?;
            self.expect(Tok::Comma)?;
            let right = self.name("a basis element")?;
            self.expect(Tok::RBracket)?;
            self.expect(Tok::Eq)?;
            let rhs = self.modexpr()?;
            self.expect(Tok::Semi)?;
            brackets.push(BracketDecl {
                left,
                right,
                rhs,
                span: bspan,
            });
        }
        Ok(AlgebraDecl {
            name,
            basis,
            brackets,
            span,
        })
    }

    fn map(&mut self) -> PResult<MapDecl> {
        let span = self.keyword("map")?;
        let name = self.ident("a map name")?;
        self.keyword("on")?;
        let algebra = self.ident("an algebra name")?;
        self.expect(Tok::LBrace)?;
        let mut images = Vec::new();
        loop {
            let src = self.name("a basis element")?;
            self.expect(Tok::Arrow)?;
            let e = self.modexpr()?;
            self.expect(Tok::Semi)?;
            images.push((src, e));
            if self.eat(&Tok::RBrace) {
                break;
            }
        }
        Ok(MapDecl {
            name,
            algebra,
            images,
            span,
        })
    }

    fn task(&mut self) -> PResult<TaskDecl> {
        let span = self.keyword("task")?;
        let name = self.ident("a task name")?;
        self.expect(Tok::LBrace)?;
        let mut entries = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let key = self.ident("a task key")?;
            self.expect(Tok::Eq)?;
            let mut values = vec![self.atom()?];
            while self.eat(&Tok::Comma) {
                values.push(self.atom()?);
            }
            self.expect(Tok::Semi)?;
            entries.push(TaskEntry { key, values });
        }
        Ok(TaskDecl { name, entries, span })
    }

    fn atom(&mut self) -> PResult<Atom> {
        let span = self.peek().span;
        let kind = match self.peek().tok.clone() {
            Tok::Ident(s) => {
                self.bump();
                AtomKind::Ident(s)
            }
            Tok::Str(s) => {
                self.bump();
                AtomKind::Str(s)
            }
            Tok::Int(_) | Tok::Minus => {
                let neg = self.eat(&Tok::Minus);
                let n = match self.bump().tok {
                    Tok::Int(n) => if neg { -n } else { n },
                    _ => return Err(Diagnostic::error(span, "expected an integer after `-`")),
                };
                if self.eat(&Tok::Slash) {
                    let d = self.denominator()?;
                    AtomKind::Ratio(n, d)
                } else {
                    AtomKind::Int(n)
                }
            }
            _ => return Err(self.unexpected("a value")),
        };
        Ok(Atom { kind, span })
    }

    fn denominator(&mut self) -> PResult<BigInt> {
        let span = self.peek().span;
        match self.bump().tok {
            Tok::Int(d) if !d.is_zero() => Ok(d),
            Tok::Int(_) => Err(Diagnostic::error(span, "zero denominator")),
            other => Err(Diagnostic::error(span, format!("expected a denominator, found {}", other.describe()))),
        }
    }

    fn starts_factor(&self) -> bool {
        match self.peek_at(0) {
            Tok::Int(_) | Tok::LParen => true,
            Tok::Ident(s) => RESERVED.contains(&s.as_str()),
            _ => false,
        }
    }

    fn exponent(&mut self) -> PResult<u32> {
        if !self.eat(&Tok::Caret) {
            return Ok(1);
        }
        let span = self.peek().span;
        match self.bump().tok {
            Tok::Int(k) => u32::try_from(k).map_err(|_| Diagnostic::error(span, "exponent too large")),
            other => Err(Diagnostic::error(span, format!("expected an exponent, found {}", other.describe()))),
        }
    }

    fn factor(&mut self) -> PResult<MPoly> {
        let span = self.peek().span;
        let base = match self.bump().tok {
            Tok::Int(n) => {
                if self.eat(&Tok::Slash) {
                    let d = self.denominator()?;
                    MPoly::constant(Rational::new(n, d))
                } else {
                    MPoly::constant(Rational::from_integer(n))
                }
            }
            Tok::Ident(s) if s == "d" => MPoly::var(Var::Partial),
            Tok::Ident(s) if s == "x" => MPoly::var(Var::X0),
            Tok::LParen => {
                let p = self.poly()?;
                self.expect(Tok::RParen)?;
                p
            }
            other => return Err(Diagnostic::error(span, format!("expected a coefficient, found {}", other.describe()))),
        };
        Ok(base.pow(self.exponent()?))
    }

    /// Product of factors, `*` optional between them.
    fn product(&mut self) -> PResult<Option<MPoly>> {
        let mut acc: Option<MPoly> = None;
        loop {
            if acc.is_some() && self.peek_at(0) == &Tok::Star {
                self.bump();
                if !self.starts_factor() {
                    return Err(self.unexpected("a factor after `*`"));
                }
            }
            if !self.starts_factor() {
                return Ok(acc);
            }
            let f = self.factor()?;
            acc = Some(match acc {
                None => f,
                Some(a) => &a * &f,
            });
        }
    }

    fn sign(&mut self) -> Option<i64> {
        if self.eat(&Tok::Plus) {
            Some(1)
        } else if self.eat(&Tok::Minus) {
            Some(-1)
        } else {
            None
        }
    }

    fn poly(&mut self) -> PResult<MPoly> {
        let mut s = self.sign().unwrap_or(1);
        let mut out = MPoly::zero();
        loop {
            let p = self.product()?.ok_or_else(|| self.unexpected("a polynomial term"))?;
            out = &out + &p.scale(&Rational::from_integer(s.into()));
            match self.sign() {
                Some(t) => s = t,
                None => return Ok(out),
            }
        }
    }

    fn modexpr(&mut self) -> PResult<ModExpr> {
        let mut e = ModExpr {
            terms: Vec::new(),
            span: self.peek().span,
        };
        let mut s = self.sign().unwrap_or(1);
        loop {
            let c = self.product()?;
            let sc = Rational::from_integer(s.into());
            match (&self.peek().tok, c) {
                (Tok::Ident(_), c) => {
                    let n = self.name("a basis element")?;
                    e.push(c.unwrap_or_else(MPoly::one).scale(&sc), n);
                }
                (_, Some(c)) if c.is_zero() => {}
                _ => return Err(self.unexpected("a basis element")),
            }
            match self.sign() {
                Some(t) => s = t,
                None => return Ok(e),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::shorthand::*;

    fn single(src: &str) -> AlgebraDecl {
        match parse(src).unwrap().items.remove(0) {
            Item::Algebra(a) => a,
            _ => panic!(),
        }
    }

    #[test]
    fn virasoro_declaration() {
        let a = single("algebra Vir { basis L: even; [L,L] = (d + 2*x) L; }");
        assert_eq!(a.basis.len(), 1);
        assert_eq!(a.brackets[0].rhs.terms[0].0, &d() + &(&c(2) * &x()));
    }

    #[test]
    fn implicit_products_and_merging() {
        let a = single("algebra A { basis a: even, b: even; [a,b] = 3/2 d x^2 a - a + 2 d*x^2 b + 0; }");
        let t = &a.brackets[0].rhs.terms;
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].0, &(&q(3, 2) * &d()) * &x().pow(2) - c(1));
        let z = single("algebra A { basis a: even; [a,a] = a - a; }");
        assert!(z.brackets[0].rhs.terms.is_empty());
    }

    #[test]
    fn empty_file() {
        assert!(parse("  # nothing\n").unwrap().items.is_empty());
    }

    #[test]
    fn errors_carry_spans() {
        let e = parse("algebra A {\n basis d: even; }").unwrap_err();
        assert_eq!(e[0].span, Span::new(2, 8));
        let e = parse("algebra A { basis a: even; [a,a] = 2 ; }").unwrap_err();
        assert_eq!(e[0].span.line, 1);
        let e = parse("task t { k = 1/0; }").unwrap_err();
        assert!(e[0].message.contains("zero denominator"));
    }

    #[test]
    fn task_atoms() {
        let f = parse("task t { run = verify; abg = 1, -2, 3/4; prop = \"P4.7\"; }").unwrap();
        let Item::Task(t) = &f.items[0] else { panic!() };
        assert_eq!(t.entries[1].values[1].kind, AtomKind::Int((-2).into()));
        assert_eq!(t.entries[1].values[2].text(), "3/4");
        assert_eq!(t.entries[2].values[0].text(), "P4.7");
    }
}
