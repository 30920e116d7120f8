//! Plane bipolar orientations, tandem walks and the KMSW bijection.

pub mod bipolar;
pub mod closed_forms;
pub mod error;
pub mod kmsw;
pub mod oracle;
pub mod sampler;
pub mod series;
pub mod steps;
pub mod stochastics;
pub mod verify;

pub use bipolar::{EdgeKind, MarkedBipolarOrientation, Signature, ValidationReport, Violation};
pub use error::{Error, Result};
pub use kmsw::{phi, phi_inverse, rho_on_walks, sigma_on_walks};
pub use steps::{Region, Step, TandemWalk, WalkBoundaryStats, WeightSpec};
