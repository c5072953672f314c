//! Deterministic round-based network simulator.
