//! Exact computation of the maximal index of well-rounded lattices, the
//! index-2 frame and its index-set configurations, and the resulting
//! kissing-number bounds.

pub mod bounds;
pub mod catalog;
pub mod config;
pub mod exactmath;
pub mod invariants;
pub mod lattice;
pub mod search;
