//! Gauss cubature rules on the surface of the unit sphere.
//!
//! A fully symmetric rule is specified by *generators* — canonical
//! representatives of octahedral-symmetry orbits — together with one weight
//! per orbit. Constructing a rule of degree `2m+1` means choosing a
//! *structure* (how many generators of each of the seven class types) and
//! solving the nonlinear moment equations that make the rule exact for every
//! monomial of degree up to `2m`.
//!
//! The crate covers the whole workflow:
//!
//! * [`symmetry`] — orbits, canonical generators, and the counting functions
//!   behind the equation bookkeeping;
//! * [`moments`] — exact monomial moments as rational multiples of pi;
//! * [`search`] — consistency constraints, the LP relaxation lower bound,
//!   and exhaustive enumeration of candidate structures;
//! * [`star`] — assembly of the moment system, residuals and Jacobians,
//!   multi-start damped least-squares solving, and rendering;
//! * [`product`] — the classical 2m²-point product rules for comparison;
//! * [`rule`] — the rule data model, naming, serialization, expansion,
//!   integration, verification, and the bundled reference rules of degrees
//!   3 through 17.
//!
//! ```
//! use u3gauss::rule::{builtin, verify};
//!
//! // the 14-point degree-5 reference rule integrates x²y² exactly
//! let rule = builtin("m2").unwrap();
//! let report = verify(&rule.expand(), rule.degree());
//! assert!(report.passes);
//! ```
//!
//! The `u3gauss` binary exposes every step as a subcommand; the `examples/`
//! directory shows the library calls for each workflow.

pub mod cli;
mod linalg;
mod lm;
pub mod moments;
pub mod product;
pub mod rule;
pub mod search;
mod simplex;
pub mod star;
pub mod symmetry;

pub use rule::{CubatureRule, PointRule, VerificationReport};
pub use search::RuleStructure;
pub use star::{SolveConfig, SolveOutcome, StarSystem};
pub use symmetry::{ClassType, Generator, Orbit};
