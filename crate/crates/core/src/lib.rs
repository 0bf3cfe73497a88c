//! Numerical variational analysis over closed subsets of low-dimensional
//! real space.
//!
//! The crate represents closed sets and set-valued maps symbolically
//! ([`geometry`]), computes normal cones, subdifferentials and coderivatives
//! for the structured class ([`cones`]), runs the Ekeland variational
//! principle exactly on finite metric spaces ([`ekeland`]), sweeps the
//! primal extremality / stationarity / transversality quantifiers
//! ([`extremality`]), constructs and verifies dual separation certificates
//! ([`separation`]), and layers the set-valued optimization model on top
//! ([`setopt`]).
//!
//! Every verdict produced here is resolution-tagged: quantifiers over a
//! continuum are only ever semi-decided on a finite schedule, and the
//! reports say so.

pub mod cones;
pub mod ekeland;
pub mod extremality;
pub mod geometry;
pub mod separation;
pub mod setopt;
pub mod tol;
pub mod vecn;
pub mod verdict;

pub use geometry::{Point, SetExpr, SetValuedMap};
pub use tol::ToleranceConfig;
pub use verdict::{Status, Verdict};
