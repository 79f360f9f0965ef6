//! Perturbative, renormalisation-group and numerical solutions of the
//! particle-capture equation `ẍ + ẋ + εx² = 0`.
//!
//! The exact side works in arbitrary-precision rationals: the separatrix
//! coefficients `B_n`, the series for the critical release point, and their
//! partial sums. The [`oracle`] module integrates the equation directly and
//! serves as an independent check on all of it.

pub mod cli;
pub mod closed_form;
pub mod coefficients;
pub mod critical;
pub mod domb_sykes;
pub mod error;
pub mod oracle;
pub mod rational;
pub mod separatrix;
pub mod series;

pub use closed_form::{Branch, InitialConditions, SolutionConstants};
pub use coefficients::{catalan, sequence_d, CoefficientTable};
pub use critical::CriticalSeries;
pub use error::{Error, Result};
pub use rational::Rational;
pub use separatrix::SeparatrixExpansion;
pub use series::PowerSeries;
