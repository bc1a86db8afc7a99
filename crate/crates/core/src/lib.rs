//! Constellation-diversity physical-layer security toolkit.
//!
//! Sender and intended receiver share a secret permutation of bit values to
//! constellation points ([`constellation::MappingKey`]); an eavesdropper that
//! guesses the modulation but not the mapping decodes near-random bits. The
//! crate provides the keyed modem, an AWGN channel, closed-form and Monte
//! Carlo estimates of the eavesdropper's success, and exact secrecy
//! analytics over the keyspace.

pub mod analytic;
pub mod channel;
pub mod constellation;
pub mod error;
pub mod harness;
pub mod modem;
pub mod rng;
pub mod secrecy;

pub use error::{Error, Result};
