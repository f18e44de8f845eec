//! Exact analysis of dominant-strategy incentive-compatible mechanisms on
//! finite type spaces.

pub mod certificate;
pub mod extensions;
pub mod fixtures;
pub mod format;
pub mod incentives;
pub mod inextensibility;
pub mod model;
pub mod rational;
pub mod ratlp;
pub mod revenue;

pub use rational::Rational;
