//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Errors produced by geometry construction, scoring, and scene generation.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A mesh with no (non-degenerate) triangles where one is required.
    EmptyShape,
    /// Mesh face index out of range or non-finite vertex data.
    InvalidMesh(String),
    /// Invalid similarity-transform components.
    InvalidTransform(String),
    /// A point cloud contained non-finite coordinates.
    NonFinitePoint,
    /// Spatial index or scoring asked to operate on an empty cloud.
    EmptyCloud,
    /// No measured points fall inside the object's mask.
    NoObservedPoints,
    /// Camera intrinsics outside valid ranges.
    InvalidCamera(String),
    /// Image dimensions of depth, mask, and camera disagree.
    DimensionMismatch { expected: (usize, usize), got: (usize, usize) },
    /// RANSAC plane fitting received collinear or insufficient samples.
    DegeneratePlaneInput,
    /// Contact check invoked with an empty neighbor list.
    NoContactCandidates,
    /// Contact-graph text that failed to parse.
    ContactParse { line: usize, message: String },
    /// Graph node index outside `0..=node_count-1`.
    NodeOutOfRange { line: usize, node: usize, node_count: usize },
    /// Self-loop in a contact graph.
    SelfLoop { line: usize, node: usize },
    /// Scene generation placed two primitives so they interpenetrate.
    InfeasiblePlacement { first: usize, second: usize },
    /// Generic invalid configuration value.
    InvalidConfig(String),
    /// Empty input where at least one element is required.
    EmptyInput(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyShape => write!(f, "empty shape"),
            Error::InvalidMesh(m) => write!(f, "invalid mesh: {m}"),
            Error::InvalidTransform(m) => write!(f, "invalid transform: {m}"),
            Error::NonFinitePoint => write!(f, "point cloud contains non-finite coordinates"),
            Error::EmptyCloud => write!(f, "empty point cloud"),
            Error::NoObservedPoints => write!(f, "no observed points for object"),
            Error::InvalidCamera(m) => write!(f, "invalid camera: {m}"),
            Error::DimensionMismatch { expected, got } => write!(
                f,
                "image dimension mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            Error::DegeneratePlaneInput => write!(f, "degenerate plane input"),
            Error::NoContactCandidates => write!(f, "no contact candidates"),
            Error::ContactParse { line, message } => {
                write!(f, "contact file line {line}: {message}")
            }
            Error::NodeOutOfRange { line, node, node_count } => write!(
                f,
                "contact file line {line}: node {node} out of range (graph has {node_count} nodes)"
            ),
            Error::SelfLoop { line, node } => {
                write!(f, "contact file line {line}: self-loop on node {node}")
            }
            Error::InfeasiblePlacement { first, second } => {
                write!(f, "infeasible placement: objects {first} and {second} interpenetrate")
            }
            Error::InvalidConfig(m) => write!(f, "invalid configuration: {m}"),
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
        }
    }
}

impl core::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
