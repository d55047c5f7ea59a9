//! Exact polynomial, rational-function and exterior-algebra arithmetic.

pub mod exterior;
pub mod poly;
pub mod rational;

pub use exterior::{merge_sign, schwinger_generators, ExteriorElement, Generators};
pub use poly::{q, q_frac, q_to_f64, vars, CompiledPoly, Polynomial, Vars, Q};
pub use rational::RationalFunction;
