//! Minimal determinantal representations of bivariate polynomials.
//!
//! For a bivariate polynomial `p` of degree `n <= 5` this crate constructs
//! `n x n` complex matrices `A`, `B`, `C` with
//! `det(xA + yB + zC) = p(x, y, z)` (the homogeneous form of `p`), and uses
//! pairs of such representations to solve systems of two bivariate
//! polynomials through the operator-determinant matrices of a two-parameter
//! eigenvalue problem.
//!
//! ```
//! use detrep::polycore::{AffinePoly, ONE};
//! use detrep::builder::{build, verify, BuildOptions};
//! use detrep::polycore::homogenize;
//!
//! // x^2 + y^2 - 1
//! let mut q = AffinePoly::zero(2);
//! q.set(2, 0, ONE);
//! q.set(0, 2, ONE);
//! q.set(0, 0, -ONE);
//! let p = homogenize(&q).unwrap();
//! let rep = build(&p, &BuildOptions::default()).unwrap();
//! assert!(verify(&p, &rep, 100, 1).unwrap() < 1e-10);
//! ```

pub mod bench;
pub mod builder;
pub mod conics;
pub mod error;
pub mod io;
pub mod lapack;
pub mod polycore;
pub mod reduction;
pub mod rng;
pub mod rootfind;
pub mod twopar;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
