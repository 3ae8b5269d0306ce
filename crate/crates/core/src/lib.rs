//! Versioned enterprise model library.
//!
//! Models travel in an XML exchange format ([`exchange`]), are scored for
//! size and coupling ([`metrics`]), and are stored as entries with variants
//! and versions in a [`vault::Vault`]. Versions move through a release
//! life-cycle ([`lifecycle`]) whose releases trigger change checks on
//! dependent entries; [`discovery`] provides search and the landscape grid
//! and [`access`] decides who may do what.

pub mod access;
pub mod discovery;
pub mod error;
pub mod exchange;
pub mod lifecycle;
pub mod metrics;
pub mod taxonomy;
pub mod vault;

pub use error::{Error, ErrorCode, Result};
