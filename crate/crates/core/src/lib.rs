//! Bivariate copulas with a prescribed amount of asymmetry, and the exact
//! ranges that five measures of concordance can take on them.
//!
//! The crate is organised around a handful of modules:
//!
//! * [`copula`]: the [`Copula`] handle, the reference copulas `W`, `Π`, `M`,
//!   the dihedral transforms and convex mixtures, plus grid validation.
//! * [`checkerboard`]: piecewise-uniform approximations used as a brute-force
//!   integration oracle.
//! * [`asymmetry`]: the maximal asymmetry function `d*` and the sup-norm
//!   asymmetry measure `μ∞` with a Lipschitz certificate.
//! * [`bounds`]: the local Fréchet–Hoeffding bounds for copulas with a fixed
//!   asymmetry `c` at a point `(a, b)`, and their singular supports.
//! * [`concordance`]: the concordance function `Q` in closed form, by exact
//!   segment quadrature and by checkerboard oracle; the five measures.
//! * [`regions`]: attainable (asymmetry, measure) regions, their inverses,
//!   extremal scans over the triangle `Δ_m` and attainability sweeps.
//! * [`verify`]: seeded verification suites shared by the CLI and tests.
//! * [`cli`]: the `copula-concord` command-line front end.

pub mod asymmetry;
pub mod bounds;
pub mod checkerboard;
pub mod cli;
pub mod concordance;
pub mod copula;
mod error;
pub mod quadrature;
pub mod regions;
pub mod sampling;
pub mod verify;

pub use asymmetry::{asymmetry_at, d_star, mu_infinity, AsymmetryResult};
pub use bounds::{BoundParams, Segment, SegmentSupport, Which};
pub use checkerboard::CheckerboardCopula;
pub use concordance::{ConcordanceValue, EvalMode, MeasureKind};
pub use copula::{Copula, CopulaKind, UnitPoint, ValidationReport};
pub use error::{Error, Result};
