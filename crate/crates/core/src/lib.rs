//! Forbidden-triangle classes of complete edge-colored graphs and their
//! prioritised (semi-free) amalgamation.

pub mod amalgam;
pub mod catalogue;
mod cayley;
pub mod color;
pub mod conditions;
pub mod enumerate;
pub mod error;
pub mod format;
pub mod generic;
pub mod independence;
pub mod report;
pub mod search;
pub mod structure;
pub mod triangle;

pub use error::{Error, Result};
