//! Vanishing-cycle monodromy for plane curve polynomials `f(x, y) = g(x) + h(y)`.
//!
//! The crate builds the 0-dimensional Dynkin chains of `g` and `h`, the join-cycle
//! grid and the skew-symmetric intersection matrix, and then works with the
//! Picard–Lefschetz action on the fiber homology: orbit spans, Krylov spans,
//! symmetry detection, functional decomposition and the pushforward kernel.
//!
//! Everything that decides a mathematical fact runs on exact rationals. A
//! floating eigen backend exists for large batch sweeps and is always
//! cross-checkable against the exact path.

pub mod dynkin;
pub mod exactlin;
pub mod monodromy;
pub mod pushforward;
pub mod realpoly;
pub mod sweep;

pub use dynkin::{ChainDiagram, IntersectionMatrix, JoinGrid, SignMode};
pub use exactlin::{CycleVector, EigenSupport, IntMatrix, Rat, SubspaceBasis};
pub use monodromy::{ClassificationReport, PLOperator, SymmetryReport, Verdict};
pub use pushforward::PushforwardMatrix;
pub use realpoly::{milnor_number, CriticalData, Decomposition, RealPoly, Role};
pub use sweep::{SweepConfig, SweepReport};
