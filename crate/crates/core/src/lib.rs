#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` rejects NaN on purpose; index loops mirror the matrix algebra
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]
extern crate alloc;

pub mod braid;
pub mod curves;
pub mod diagram;
pub mod homology;
pub mod slice;
pub mod transport;
mod util;

pub use util::UnionFind;
