//! Aggregated BLS signature gossip for checkpoint finalization.
//!
//! A large guardian network finalizes checkpoint blocks by gossiping
//! partially aggregated BLS signatures: each node folds the valid aggregates
//! it hears into its own, tracks a per-guardian signer-count vector, and
//! finalizes once more than two thirds of all guardians appear in it. This
//! crate provides the signature schemes (a real BLS12-381 pairing backend
//! and an accounting oracle for large simulations), the per-guardian
//! protocol state machine, a minimal hash-linked chain with leapfrog
//! finalization, a deterministic round-based network simulator with
//! byzantine fault injection, and the connectivity-matrix analysis tools
//! that bound message growth.

pub mod analysis;
pub mod chain;
pub mod crypto;
pub mod netsim;
pub mod protocol;
pub mod uint;
pub mod vector;
