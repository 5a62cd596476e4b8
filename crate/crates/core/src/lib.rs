//! Ball polyhedra, r-ball hulls and their intrinsic volumes.
//!
//! * [`geom`] and [`meb`]: points, balls, unit-ball intrinsic volumes and the
//!   minimal enclosing ball (circumradius).
//! * [`arcgon`]: exact planar kernel for intersections of disks, r-duals and
//!   r-ball hulls.
//! * [`ballbody`]: dimension-generic `A^r` queries and Monte-Carlo intrinsic
//!   volumes by Steiner-polynomial fitting.
//! * [`lab`]: checkers for the Blaschke-Santalo-type and volume-product
//!   inequalities and their supporting identities.
//! * [`contraction`]: uniform-contraction generators and Kneser-Poulsen-type
//!   experiment runners.

pub mod arcgon;
pub mod ballbody;
pub mod contraction;
pub mod error;
pub mod geom;
pub mod lab;
pub mod meb;
pub mod rng;
pub mod volumes;

pub use error::{Error, Result};
pub use geom::{Ball, Point, PointSet};
pub use volumes::IntrinsicVolumes;
