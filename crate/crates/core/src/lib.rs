//! Linear-programming bounds and optimality certificates for potential
//! energy of point configurations on spheres and projective spaces.

pub mod certify;
pub mod config;
pub mod descent;
pub mod error;
pub mod euclid1d;
pub mod exactfield;
pub mod interp;
pub mod lpnum;
pub mod orthopoly;
pub mod potential;

pub use error::{Error, Result};
pub use exactfield::{QuadExt, Rational, Scalar};
pub use config::{DistanceDistribution, Geometry, PointConfiguration};
pub use orthopoly::{Kernel, Poly};
pub use potential::Potential;
