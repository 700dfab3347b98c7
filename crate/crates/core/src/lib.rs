//! Series expansions of the arctangent function.
//!
//! The crate evaluates two equivalent infinite expansions of `arctan(x)`:
//! a complex-pair form built from powers of `1 ± 2i/x`, and a real rational
//! form obtained by separating the real and imaginary parts of those powers
//! with the binomial theorem. It also evaluates the m-th derivative of
//! `arctan` in three equivalent ways and ships an exact (big-rational) layer
//! that checks the underlying identities without rounding.
//!
//! Modules:
//! - [`kernel`]: binomial table, inverse-power decompositions, per-term values.
//! - [`evaluators`]: truncated series and derivative evaluators in `f64`.
//! - [`exact`]: rational and Gaussian-rational arithmetic, identity checks.
//! - [`analysis`]: convergence studies, truncation bound, pi demonstrations.
//! - [`cli`]: the `atanseries` command-line front end.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod evaluators;
pub mod exact;
pub mod kernel;

pub use error::{Error, Result};
pub use evaluators::{arctan_series, Form, SeriesConfig};
