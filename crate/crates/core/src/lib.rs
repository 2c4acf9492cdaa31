//! Simulation and analysis toolkit for quantum game procedures.
//!
//! The crate models measurement-based procedures on small multi-qubit
//! systems (up to five players), the static games they induce once a
//! payoff scenario is attached, and the equilibrium and optimization
//! analyses used to compare quantum strategy spaces against classical
//! play. A catalog of ready-made experiments, a TOML-driven runner, and
//! a claim-verification battery sit on top of the numeric core.

pub mod claims;
pub mod config;
pub mod equilibrium;
mod error;
pub mod ewl;
pub mod qmat;
pub mod report;
pub mod scenario;
pub mod states_gates;

pub use error::{Error, Result};
