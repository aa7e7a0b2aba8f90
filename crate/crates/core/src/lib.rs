//! Kinematics, gaits, stability analysis and a lightweight locomotion
//! simulator for a three-legged robot that balances on a central sphere and
//! carries hybrid rolling/frictional end effectors.

pub mod cli;
pub mod config;
pub mod error;
pub mod export;
pub mod gait;
pub mod kinematics;
pub mod reference;
pub mod sequences;
pub mod sim;
pub mod stability;

pub use error::{Error, Result};
