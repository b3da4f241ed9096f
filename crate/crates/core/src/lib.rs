//! Rate-optimal 3- and 4-real-symbol ML-decodable unitary weight designs for
//! 2^a transmit antennas: construction, mechanical verification of the
//! decodability and diversity conditions, coding-gain computation against
//! rotated-lattice signal sets, and group-wise ML decoding over a
//! quasi-static Rayleigh MIMO channel.

pub mod clifford;
pub mod io;
pub mod linalg;
pub mod rng;
pub mod signal;
pub mod sim;
pub mod uwd;

pub use linalg::{Complex64, ComplexMatrix};
pub use uwd::{Rational, SymbolVector, WeightDesign};
