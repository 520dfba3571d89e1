//! Similarity transforms: uniform positive scale, rotation, translation.

use alloc::format;
use alloc::vec::Vec;
use nalgebra::{Matrix3, Point3, UnitQuaternion, Vector3};
use num_traits::Float;

use crate::error::{Error, Result};

/// Tolerance for rotation orthonormality and round-trip identities.
pub const ROTATION_TOL: f64 = 1e-9;

/// A similarity transform `p ↦ s·R·p + t`.
///
/// Solver poses map camera-frame points into the object's local frame; the
/// physical object seen by the camera is the mesh pushed through the inverse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sim3 {
    pub scale: f64,
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl Sim3 {
    /// Builds a transform, validating scale positivity and rotation
    /// orthonormality (`‖RᵀR − I‖_F ≤ 1e-9`, `det R − 1 ≤ 1e-9`).
    pub fn new(scale: f64, rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        let t = Sim3 { scale, rotation, translation };
        t.validate()?;
        Ok(t)
    }

    /// Builds a transform from parts already known to be valid.
    pub fn from_parts(scale: f64, rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        Sim3 { scale, rotation, translation }
    }

    pub fn identity() -> Self {
        Sim3 { scale: 1.0, rotation: Matrix3::identity(), translation: Vector3::zeros() }
    }

    pub fn from_quat(scale: f64, q: &UnitQuaternion<f64>, translation: Vector3<f64>) -> Self {
        Sim3 { scale, rotation: q.to_rotation_matrix().into_inner(), translation }
    }

    /// Checks the type invariants.
    pub fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::InvalidTransform(format!("scale must be positive, got {}", self.scale)));
        }
        if self.rotation.iter().any(|v| !v.is_finite())
            || self.translation.iter().any(|v| !v.is_finite())
        {
            return Err(Error::InvalidTransform("non-finite component".into()));
        }
        let ortho = (self.rotation.transpose() * self.rotation - Matrix3::identity()).norm();
        if ortho > ROTATION_TOL {
            return Err(Error::InvalidTransform(format!("rotation not orthonormal (residual {ortho:.2e})")));
        }
        let det = self.rotation.determinant();
        if (det - 1.0).abs() > ROTATION_TOL {
            return Err(Error::InvalidTransform(format!("rotation determinant {det} != 1")));
        }
        Ok(())
    }

    /// Composition: `(a ∘ b)(x) = a(b(x))`.
    pub fn compose(&self, other: &Sim3) -> Sim3 {
        Sim3 {
            scale: self.scale * other.scale,
            rotation: self.rotation * other.rotation,
            translation: self.scale * (self.rotation * other.translation) + self.translation,
        }
    }

    /// Inverse: `(1/s, Rᵀ, −(1/s)·Rᵀ·t)`.
    pub fn inverse(&self) -> Sim3 {
        let rt = self.rotation.transpose();
        Sim3 {
            scale: 1.0 / self.scale,
            rotation: rt,
            translation: -(rt * self.translation) / self.scale,
        }
    }

    /// Applies the transform to a single point.
    #[inline]
    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.scale * (self.rotation * p.coords) + self.translation)
    }

    /// Applies the transform to every point of a slice.
    pub fn apply_points(&self, points: &[Point3<f64>]) -> Vec<Point3<f64>> {
        points.iter().map(|p| self.apply(p)).collect()
    }

    /// Rotation as a unit quaternion (renormalized).
    pub fn rotation_quat(&self) -> UnitQuaternion<f64> {
        UnitQuaternion::from_matrix(&self.rotation)
    }

    /// Geodesic angle between the two rotations, in radians.
    pub fn rotation_distance(&self, other: &Sim3) -> f64 {
        let rel = self.rotation.transpose() * other.rotation;
        let cos = ((rel.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
        cos.acos()
    }

    /// Componentwise closeness: Frobenius norm on the rotation difference,
    /// Euclidean on translation, relative on scale.
    pub fn is_close(&self, other: &Sim3, rot_tol: f64, trans_tol: f64, scale_rel_tol: f64) -> bool {
        (self.rotation - other.rotation).norm() <= rot_tol
            && (self.translation - other.translation).norm() <= trans_tol
            && (self.scale / other.scale - 1.0).abs() <= scale_rel_tol
    }
}
