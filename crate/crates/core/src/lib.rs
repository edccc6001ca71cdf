//! Symbolic workbench for finite Lie conformal superalgebras over `ℚ[∂]`.

pub mod cend;
pub mod error;
pub mod frontend;
pub mod gmod;
pub mod hilbert;
pub mod lcsa;
pub mod poly;
pub mod solver;
pub mod verify;

pub use cend::{compose, gc_bracket, ConfMap, GeneralizedScalar, GroupSpec, Morphism, Operator, TwoSlotMap, Twist};
pub use error::{Error, Result};
pub use gmod::{Basis, Element, Parity, PolyMatrix};
pub use lcsa::{Algebra, AxiomReport};
pub use poly::{MPoly, Rational, Var};
pub use frontend::{Diagnostic, Program, Span};
pub use hilbert::{HilbertWindow, Rationality, SeriesReport};
pub use solver::{Constraint, DegreeBound, EquationKind, InteriorKind, ScanReport, SolutionSpace};
pub use verify::{Outcome, PropositionId, Status, VerifyParams, VerifyReport};
