//! Locally recoverable evaluation codes built from towers of function fields
//! over GF(2^m): field arithmetic, place enumeration, code construction,
//! minimum-distance estimation, structural checks and rate bounds.

pub mod bounds;
pub mod distance;
pub mod evalcode;
pub mod export;
pub mod galois;
pub mod linalg;
pub mod poly;
pub mod presets;
pub mod structure;
pub mod tower;
