//! Pencils of quadrics `<sum x_k^2, sum lambda_k x_k^2>`, the base locus `X`,
//! the quadratic fibration on its cotangent bundle and the invariants of
//! skew-symmetric maps, computed exactly over `Q(sqrt u, sqrt w)` where possible.

pub mod algebra;
pub mod error;
pub mod fibration;
pub mod io;
pub mod jobs;
pub mod p1bundle;
pub mod pencil;
pub mod rng;
pub mod skew;
pub mod variety;

pub use error::{Error, Result};
