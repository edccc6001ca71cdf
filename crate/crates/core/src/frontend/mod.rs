//! Text format for algebras, maps and tasks.
//!
//! ```text
//! algebra Vir { basis L: even; [L,L] = (d + 2*x) L; }
//! map s on Vir { L -> L; }
//! task t { run = solve; algebra = Vir; kind = der; dp = 2; dl = 2; }
//! ```
//!
//! `d` is the translation operator and `x` the spectral variable.

use std::fmt;

use serde_json::{json, Value};

pub mod ast;
pub mod elaborate;
pub mod lexer;
pub mod parser;
pub mod printer;

pub use ast::SourceFile;
pub use elaborate::{algebra_decl, elaborate, implicit_map, map_decl, MapDef, Program, Task};
pub use parser::parse;
pub use printer::print;

/// 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl Span {
    pub fn new(line: usize, col: usize) -> Self {
        Span { line, col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    pub message: String,
    pub witness: Option<String>,
}

impl Diagnostic {
    pub fn error(span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            span,
            message: message.into(),
            witness: None,
        }
    }

    pub fn with_witness(mut self, w: impl Into<String>) -> Self {
        self.witness = Some(w.into());
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "severity": match self.severity { Severity::Error => "error", Severity::Warning => "warning" },
            "line": self.span.line,
            "column": self.span.col,
            "message": self.message,
            "witness": self.witness,
        })
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev} at {}: {}", self.span, self.message)?;
        if let Some(w) = &self.witness {
            write!(f, " (witness: {w})")?;
        }
        Ok(())
    }
}

/// Parse and elaborate in one step.
pub fn load(src: &str) -> Result<Program, Vec<Diagnostic>> {
    elaborate(&parse(src)?)
}
