//! The guide chapters from `book/` compiled as doc-tests.
//!
//! mdbook cannot run example code against the crate by itself, so each
//! chapter is also attached here as module documentation: `cargo test`
//! compiles and runs every Rust snippet in the book, keeping the guide
//! and the library in sync. Blocks marked `no_run` are compile-checked
//! only (they exercise the slower end-to-end drivers).

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/spectrum.md")]
pub mod spectrum {}

#[doc = include_str!("../../../book/src/harmonics.md")]
pub mod harmonics {}

#[doc = include_str!("../../../book/src/potential.md")]
pub mod potential {}

#[doc = include_str!("../../../book/src/expansion.md")]
pub mod expansion {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../book/src/verification.md")]
pub mod verification {}
