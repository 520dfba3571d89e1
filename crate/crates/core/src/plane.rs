//! Support-plane estimation with 3-point RANSAC.

use alloc::vec::Vec;
use nalgebra::{Matrix3, Point3, UnitVector3, Vector3};
use rand::Rng;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::rng::seeded_rng;

/// An infinite plane; the signed distance of `x` is `normalᵀx − offset`.
///
/// The normal is oriented so the camera origin lies on the positive side.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Plane {
    pub normal: Vector3<f64>,
    pub offset: f64,
}

impl Plane {
    pub fn new(normal: Vector3<f64>, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if !n.is_finite() || (n - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(alloc::format!("plane normal must be unit length, got |n| = {n}")));
        }
        Ok(Plane { normal, offset })
    }

    /// Unit-normalizes and orients so the camera origin is positive.
    pub fn from_normal_point(normal: Vector3<f64>, point: &Point3<f64>) -> Result<Self> {
        let n = UnitVector3::try_new(normal, 1e-12).ok_or(Error::DegeneratePlaneInput)?;
        let mut normal = n.into_inner();
        let mut offset = normal.dot(&point.coords);
        if -offset < 0.0 {
            normal = -normal;
            offset = -offset;
        }
        Ok(Plane { normal, offset })
    }

    #[inline]
    pub fn signed_distance(&self, p: &Point3<f64>) -> f64 {
        self.normal.dot(&p.coords) - self.offset
    }

    pub fn inlier_count(&self, cloud: &PointCloud, tol: f64) -> usize {
        cloud.points().iter().filter(|p| self.signed_distance(p).abs() <= tol).count()
    }
}

/// Fits a plane by 3-point RANSAC followed by a least-squares refit on the
/// inliers of the best hypothesis. Deterministic for a given seed.
pub fn fit_plane_ransac(
    points: &PointCloud,
    iterations: usize,
    inlier_tol: f64,
    seed: u64,
) -> Result<Plane> {
    let pts = points.points();
    if pts.len() < 3 {
        return Err(Error::DegeneratePlaneInput);
    }
    let mut rng = seeded_rng(seed);
    let mut best: Option<(usize, Plane)> = None;
    for _ in 0..iterations.max(1) {
        let a = pts[rng.gen_range(0..pts.len())];
        let b = pts[rng.gen_range(0..pts.len())];
        let c = pts[rng.gen_range(0..pts.len())];
        let n = (b - a).cross(&(c - a));
        let scale = (b - a).norm().max((c - a).norm());
        if n.norm() <= 1e-12 * scale * scale {
            continue; // collinear or repeated sample
        }
        let Ok(plane) = Plane::from_normal_point(n, &a) else {
            continue;
        };
        let count = plane.inlier_count(points, inlier_tol);
        if best.as_ref().is_none_or(|(c0, _)| count > *c0) {
            best = Some((count, plane));
        }
    }
    let (_, coarse) = best.ok_or(Error::DegeneratePlaneInput)?;
    let inliers: Vec<Point3<f64>> = pts
        .iter()
        .filter(|p| coarse.signed_distance(p).abs() <= inlier_tol)
        .copied()
        .collect();
    refit_least_squares(&inliers).or(Ok(coarse))
}

/// Least-squares plane through a point set: centroid plus the covariance
/// eigenvector of the smallest eigenvalue.
fn refit_least_squares(points: &[Point3<f64>]) -> Result<Plane> {
    if points.len() < 3 {
        return Err(Error::DegeneratePlaneInput);
    }
    let centroid = points.iter().fold(Vector3::zeros(), |acc, p| acc + p.coords) / points.len() as f64;
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = p.coords - centroid;
        cov += d * d.transpose();
    }
    let eig = cov.symmetric_eigen();
    let mut min_idx = 0;
    for i in 1..3 {
        if eig.eigenvalues[i] < eig.eigenvalues[min_idx] {
            min_idx = i;
        }
    }
    let normal = eig.eigenvectors.column(min_idx).into_owned();
    Plane::from_normal_point(normal, &Point3::from(centroid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn grid_on_plane(z: f64, n: usize) -> Vec<Point3<f64>> {
        let mut pts = Vec::new();
        for i in 0..n {
            for j in 0..n {
                pts.push(Point3::new(i as f64 * 0.01 - 0.15, j as f64 * 0.01 - 0.15, z));
            }
        }
        pts
    }

    #[test]
    fn exact_plane_is_recovered() {
        let cloud = PointCloud::from_points(grid_on_plane(2.0, 32));
        let plane = fit_plane_ransac(&cloud, 100, 0.008, 3).unwrap();
        assert!((plane.normal - Vector3::new(0.0, 0.0, -1.0)).norm() < 1e-6);
        assert!((plane.offset - (-2.0)).abs() < 1e-6);
        assert!(plane.signed_distance(&Point3::origin()) > 0.0);
    }

    #[test]
    fn robust_to_outliers() {
        let mut rng = crate::rng::seeded_rng(4);
        let mut pts = grid_on_plane(2.0, 32);
        let inlier_n = pts.len();
        for _ in 0..inlier_n / 5 {
            pts.push(Point3::new(
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(0.5..1.9),
            ));
        }
        let cloud = PointCloud::from_points(pts);
        let plane = fit_plane_ransac(&cloud, 500, 0.008, 9).unwrap();
        let angle = plane.normal.dot(&Vector3::new(0.0, 0.0, -1.0)).acos();
        assert!(angle.abs() < 1e-3, "normal angle error {angle}");
        assert!((plane.offset - (-2.0)).abs() < 1e-3);
    }

    #[test]
    fn too_few_points_error() {
        let cloud = PointCloud::from_points(alloc::vec![Point3::origin(), Point3::new(1.0, 0.0, 0.0)]);
        assert_eq!(fit_plane_ransac(&cloud, 10, 0.01, 0).unwrap_err(), Error::DegeneratePlaneInput);
    }

    #[test]
    fn collinear_points_error() {
        let pts: Vec<Point3<f64>> = (0..10).map(|i| Point3::new(i as f64, 0.0, 1.0)).collect();
        let cloud = PointCloud::from_points(pts);
        assert_eq!(fit_plane_ransac(&cloud, 50, 0.01, 0).unwrap_err(), Error::DegeneratePlaneInput);
    }

    #[test]
    fn inlier_count_monotone_in_tolerance() {
        let mut rng = crate::rng::seeded_rng(15);
        let mut pts = grid_on_plane(1.0, 16);
        for p in &mut pts {
            *p = Point3::new(p.x, p.y, p.z + rng.gen_range(-0.01..0.01));
        }
        let cloud = PointCloud::from_points(pts);
        let plane = fit_plane_ransac(&cloud, 200, 0.005, 7).unwrap();
        let mut last = 0;
        for k in 1..=10 {
            let count = plane.inlier_count(&cloud, 0.002 * k as f64);
            assert!(count >= last);
            last = count;
        }
    }

    #[test]
    fn determinism() {
        let cloud = PointCloud::from_points(grid_on_plane(1.5, 24));
        let a = fit_plane_ransac(&cloud, 100, 0.01, 42).unwrap();
        let b = fit_plane_ransac(&cloud, 100, 0.01, 42).unwrap();
        assert_eq!(a, b);
    }
}
