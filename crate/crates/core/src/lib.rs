//! Physics-constrained multi-object SIM(3) registration at desk scale.
//!
//! Given a depth map, per-object masks, rough pose/scale estimates, and object
//! meshes, the solver corrects each object's similarity transform so the
//! reconstructed scene fits the depth observations while remaining physically
//! plausible: no object-object penetration, no penetration of the support
//! plane, consistency with observed free space, and at least one contact per
//! object. Objects are solved one at a time in the order given by a DAG
//! approximation of the contact scene graph, with already-solved parents held
//! fixed.
//!
//! The crate is `no_std` + `alloc`: it contains no IO. File formats, the CLI,
//! and scene packages on disk live in the companion `scenefit` crate.
//!
//! # Conventions
//!
//! * A [`Sim3`] pose maps **camera-frame points to the object's local frame**
//!   unless a parameter is explicitly named `object_to_camera`.
//! * The world frame is the camera frame. Depth is positive `z` in front of
//!   the camera; image row 0 is the top of the image.
//! * Signed distances are negative inside a body. The support plane's positive
//!   side contains the camera origin.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod camera;
pub mod cloud;
pub mod constraints;
pub mod error;
pub mod freespace;
pub mod gd;
pub mod graph;
pub mod mesh;
pub mod metrics;
pub mod model;
pub mod objective;
pub mod plane;
pub mod primitives;
pub mod raster;
pub mod rng;
pub mod rollout;
pub mod sampler;
pub mod scene;
pub mod sdf;
pub mod sim3;
pub mod solver;

pub use camera::{backproject, DepthMap, MaskImage, PinholeCamera};
pub use cloud::{KdTree, PointCloud};
pub use error::{Error, Result};
pub use mesh::{Aabb, TriangleMesh};
pub use plane::Plane;
pub use sdf::SdfGrid;
pub use sim3::Sim3;
