//! Exact signed-digit numbers and most-significant-digit stability of
//! Fejér monotone iterate sequences.
//!
//! * [`exact`] holds the rational value type used everywhere.
//! * [`sdrep`] defines digit sets and signed-digit numbers.
//! * [`stability`] checks Fejér monotonicity and builds digit traces whose
//!   leading digits never change.
//! * [`solvers`] produces iterate sequences from stationary linear solvers
//!   and Newton's method.
//! * [`cli`] is the `sdstable` command-line front end.

pub mod cli;
pub mod exact;
pub mod sdrep;
pub mod solvers;
pub mod stability;
