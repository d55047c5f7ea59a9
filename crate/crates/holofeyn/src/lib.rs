pub mod amplitude;
pub mod anomaly;
pub mod corpus;
pub mod error;
pub mod graph;
pub mod polys;
pub mod quadrature;
pub mod schwinger;
pub mod symbolic;
pub mod testform;
pub mod wick;

pub use error::{Error, Result};
pub use graph::{DecoratedGraph, EdgeSubset, LamanVerdict, SignedPermutation};
pub use symbolic::{ExteriorElement, Polynomial, RationalFunction};
