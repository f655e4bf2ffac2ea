//! Simulation of chordal Loewner curves and SLE traces by composition of
//! elementary slit maps.
//!
//! A driving function sampled on `t_k = k/n` ([`driver`]) is interpolated by
//! `c√t` pieces, each of which produces an explicit tilted-slit map
//! ([`slitmap`]). Composing those maps ([`zipper`]) gives the simulated curve
//! `γⁿ`. An independent numerical integration of the Loewner equations
//! ([`odesolver`]) serves as the reference, and [`diagnostics`] measures
//! convergence and checks the geometric estimates the method relies on.
//!
//! ```
//! use loewner::{driver, zipper::ZipperChain};
//!
//! let d = driver::sample_bm(8.0 / 3.0, 256, 1).unwrap();
//! let curve = ZipperChain::build(&d).simulate(4).unwrap();
//! assert_eq!(curve.len(), 256 * 4 + 1);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod driver;
pub mod error;
pub mod io;
pub mod odesolver;
pub mod slitmap;
pub mod zipper;

pub use driver::{Interpolation, Provenance, SampledDriver};
pub use error::{Error, Result, SolverError};
pub use slitmap::SlitParams;
pub use zipper::{Curve, ZipperChain};
