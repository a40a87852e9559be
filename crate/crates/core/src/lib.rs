//! Numerical laboratory for Berezin-number and Berezin-norm upper bounds
//! built from the Moore-Penrose inverse.
//!
//! * [`linalg`]: dense complex matrices, SVD, pseudoinverse, PSD powers.
//! * [`rkhs`]: finite kernel families and the Berezin functionals.
//! * [`bounds`]: one evaluator per inequality, plus the prior-work references.
//! * [`harness`]: seeded generators, lemma suites, fuzz campaigns and the
//!   golden worked-example suite.
//! * [`cli`]: the `berezin-lab` command line front end.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod rkhs;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use rkhs::{BerezinContext, KernelFamily};
