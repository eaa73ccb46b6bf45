//! Monochromatic solutions to diagonal linear–quadratic Diophantine equations.
//!
//! The crate is organised around the equation shape
//!
//! ```text
//! a_1 x_1^2 + ... + a_s x_s^2 = b_1 y_1 + ... + b_t y_t
//! ```
//!
//! and provides
//!
//! - [`equations`]: the algebraic partition-regularity criterion,
//! - [`colourings`]: finite colourings of `[N]` (extremal, congruence, random, lifted),
//! - [`counting`]: exact solution counts by brute force and by exact convolution,
//! - [`harmonic`]: Gauss/Weyl sums, the square majorant, restriction moments,
//!   divisor sums, Fejér kernel and quadratic Bohr sets,
//! - [`search`]: Hindman configurations and the lifting identities built on them.

pub mod arith;
pub mod colourings;
pub mod counting;
pub mod equations;
mod error;
pub mod harmonic;
pub mod search;

pub use colourings::Colouring;
pub use counting::{CountQuery, RepresentationSeries, Term, WeightedSet};
pub use equations::{DiagonalEquation, RegularityVerdict};
pub use error::{Error, Result};
