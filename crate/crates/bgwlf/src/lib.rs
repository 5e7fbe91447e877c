//! Exact laws and Monte-Carlo oracles for Galton-Watson branching processes
//! with linear-fractional offspring laws.

pub mod cli;
pub mod conditioning;
pub mod error;
pub mod lf;
pub mod mechanism;
pub mod numeric;
pub mod population;
pub mod progeny;
pub mod rw;
pub mod series;
pub mod sim;
pub mod srw;
pub mod sterile;
pub mod verdict;
pub mod verify;

pub use error::{Error, Result};
pub use lf::{CriticalityClass, Homography, LfParams};
pub use mechanism::Mechanism;
pub use series::PowerSeries;
