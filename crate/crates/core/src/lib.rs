//! Exact push-forwards of line bundles under finite toric endomorphisms of
//! smooth projective toric varieties, with the Cox ring bookkeeping around
//! them. All arithmetic is over arbitrary-precision integers and rationals.

// Index loops mirror the matrix notation in the numeric kernels.
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod cox;
pub mod divisor;
pub mod endo;
pub mod error;
pub mod fan;
pub mod feasibility;
pub mod lattice;
pub mod pushforward;
pub mod io;
