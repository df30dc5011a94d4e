//! Accessible-information bounds, LOCC protocol simulation, measurement
//! optimization and monogamy audits for multiparty quantum ensembles.
//!
//! All information quantities are in bits.

pub mod bounds;
pub mod ensembles;
mod error;
pub mod monogamy;
pub mod optimize;
pub mod protocols;
pub mod qcore;

pub use error::{Error, Result};
