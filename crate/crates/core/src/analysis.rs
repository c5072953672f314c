//! Connectivity-matrix analysis.
