pub mod error;
pub mod model;
pub mod matrices;
pub mod exec;
pub mod eigen;
pub mod scattering;
pub mod squeezing;
