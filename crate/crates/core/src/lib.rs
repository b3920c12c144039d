//! Simulator for two-step quantum key distribution over polarization and
//! frequency doubly entangled photon (DEP) pairs.
//!
//! Alice encodes three key bits per pair by applying Pauli operations to
//! both photons of `Ψ+`. Photon `b` travels first and is checked for
//! eavesdropping, with decoy single photons, a wavelength-converter Bell
//! test, or both. Photon `a` follows, and Bob identifies which of the eight
//! DEP states he holds with a port-resolved σx⊗σx measurement.
//!
//! Every random draw comes from a [`quantum::SeededGenerator`], so a
//! session is a pure function of its [`protocol::ProtocolConfig`].

pub mod channel;
pub mod cli;
pub mod dep;
pub mod device;
pub mod error;
pub mod protocol;
pub mod quantum;
pub mod report;
pub mod verify;

pub use error::{ProtocolError, QuantumError};
