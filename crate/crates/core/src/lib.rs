//! Singular-value, curvature and flow machinery for area non-increasing maps
//! under graphical mean curvature flow.

// `!(x > 0.0)` is the NaN-rejecting comparison; index loops mirror the tensor formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod audit;
pub mod curvature;
pub mod error;
pub mod flow;
pub mod model;
pub mod oracle;
pub mod profile;

pub use error::{Error, Result};

/// Maps `f` over `0..n`, in parallel when the `parallel` feature is on.
/// Output order always matches the index order.
#[cfg(feature = "parallel")]
pub(crate) fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
