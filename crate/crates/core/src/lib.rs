//! Guarded hybrid knowledge bases: description-logic knowledge bases combined
//! with guarded logic programs under the open answer set semantics.
//!
//! The crate is organized bottom-up: [`logic`] and [`dl`] hold the syntax,
//! [`asp`] and [`dl_engine`] the two semantics, and [`hybrid`] joins them.

pub mod asp;
pub mod dl;
pub mod dl_engine;
pub mod error;
pub mod hybrid;
pub mod logic;
pub mod syntax;

pub use error::{Error, Result};
