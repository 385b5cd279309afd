pub mod analysis;
pub mod entanglement;
pub mod error;
pub mod manybody;
pub mod milburn;
pub mod numerics;
pub mod pendular;
pub mod scan;
pub mod teleport;

pub use error::{Error, Result};
pub use milburn::DensityMatrix;
pub use numerics::ComplexMatrix;
