//! Generalized spectral characterization of graphs.
//!
//! Given a simple graph `G` whose walk matrix `W(G) = [e, Ae, ..., A^{n-1}e]`
//! has rank `n` (controllable) or `n - 1` (almost controllable), this crate
//! decides whether `G` is determined by its generalized spectrum and, if it is
//! not, constructs every generalized cospectral mate.
//!
//! The pipeline is:
//!
//! 1. [`walk`]: build `W(G)` and classify controllability.
//! 2. [`level`]: bound the level of every rational regular orthogonal matrix
//!    relating `G` to a cospectral mate, producing the level bound `L`.
//! 3. [`congruence`]: solve the master congruence system prime by prime,
//!    combine with the Chinese remainder theorem and lift to integral vectors.
//! 4. [`omega`]: build the compatibility graph on those vectors, enumerate its
//!    cliques of order `n` and turn each into a mate.
//!
//! [`pipeline::analyze`] runs all of it for one graph; [`pipeline::batch`]
//! runs it over random graphs.

pub mod congruence;
pub mod fp;
pub mod graph;
pub mod level;
pub mod linalg;
pub mod nt;
pub mod omega;
pub mod pipeline;
pub mod walk;

mod serde_big;

pub use congruence::{ResidueVector, SolutionVector, SolverError};
pub use fp::FpPoly;
pub use graph::{CanonicalLabel, Graph, GraphError};
pub use level::{LevelBound, LevelError};
pub use linalg::{IntMatrix, IntPoly, LinalgError, SmithDecomposition};
pub use omega::{MateReport, OmegaGraph, Verdict, VerdictStatus};
pub use pipeline::{analyze, batch, AnalysisReport, AnalyzeOptions, BatchOptions, BatchSummary};
pub use walk::{Controllability, WalkData};

pub use num_bigint::BigInt;

/// Default complexity cap on Step-1 solution counts and the Step-2 product.
pub const DEFAULT_CAP: u64 = 1 << 16;
