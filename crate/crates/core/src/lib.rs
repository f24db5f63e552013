//! Exact, reproducible constructions from low-dimensional topological
//! dynamics: spacing shifts and their thick-set decompositions,
//! distributional-chaos pair statistics, a mixing extension tower for
//! zero-density shifts, the Gehman dendrite shift model, and an exact
//! rational simulation of a comb dendrite map with a DC1 pair.
//!
//! Everything is computed with exact integers and rationals; no floating
//! point enters any certificate. Infinite objects are rules with explicit
//! horizons, never truncated arrays.

pub mod chaos;
pub mod comb;
pub mod gehman;
pub mod num;
pub mod omega;
pub mod sample;
pub mod spacing;
pub mod tower;
pub mod words;

pub use num::Q;
