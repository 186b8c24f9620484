//! Doc-test shim for the guide in `book/`.
//!
//! mdBook cannot run the Rust snippets in its chapters as tests, so each
//! chapter is included here as module documentation and `cargo test --doc`
//! picks up every code fence. If a snippet in the book drifts out of sync
//! with the library, the workspace test run fails.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/polynomials.md")]
pub mod polynomials {}

#[doc = include_str!("../../../book/src/building.md")]
pub mod building {}

#[doc = include_str!("../../../book/src/conics.md")]
pub mod conics {}

#[doc = include_str!("../../../book/src/solving.md")]
pub mod solving {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
