//! Triangle meshes, surface sampling, and point-to-triangle distance.

use alloc::format;
use alloc::vec::Vec;
use nalgebra::{Point3, Vector3};
use num_traits::Float;
use rand::Rng;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::rng::seeded_rng;
use crate::sim3::Sim3;

/// Faces with area below this fraction of the largest face are dropped at
/// construction time as degenerate.
const DEGENERATE_AREA_EPS: f64 = 1e-14;

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Point3<f64>,
    pub max: Point3<f64>,
}

impl Aabb {
    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Point3<f64>>) -> Option<Aabb> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        let mut bb = Aabb { min: first, max: first };
        for p in it {
            for a in 0..3 {
                bb.min[a] = bb.min[a].min(p[a]);
                bb.max[a] = bb.max[a].max(p[a]);
            }
        }
        Some(bb)
    }

    pub fn diagonal(&self) -> f64 {
        (self.max - self.min).norm()
    }

    pub fn center(&self) -> Point3<f64> {
        nalgebra::center(&self.min, &self.max)
    }

    pub fn expanded(&self, margin: f64) -> Aabb {
        let m = Vector3::repeat(margin);
        Aabb { min: self.min - m, max: self.max + m }
    }

    pub fn contains(&self, p: &Point3<f64>) -> bool {
        (0..3).all(|a| p[a] >= self.min[a] && p[a] <= self.max[a])
    }

    pub fn intersection(&self, other: &Aabb) -> Option<Aabb> {
        let mut min = self.min;
        let mut max = self.max;
        for a in 0..3 {
            min[a] = min[a].max(other.min[a]);
            max[a] = max[a].min(other.max[a]);
            if min[a] > max[a] {
                return None;
            }
        }
        Some(Aabb { min, max })
    }

    /// Euclidean distance from `p` to the box (0 inside).
    pub fn distance(&self, p: &Point3<f64>) -> f64 {
        let mut d2 = 0.0;
        for a in 0..3 {
            let d = (self.min[a] - p[a]).max(0.0).max(p[a] - self.max[a]);
            d2 += d * d;
        }
        d2.sqrt()
    }
}

/// An indexed triangle mesh in its local frame, coordinates in meters.
#[derive(Clone, Debug)]
pub struct TriangleMesh {
    vertices: Vec<Point3<f64>>,
    faces: Vec<[usize; 3]>,
}

impl TriangleMesh {
    /// Validates indices and coordinates; silently drops zero-area faces.
    pub fn new(vertices: Vec<Point3<f64>>, faces: Vec<[usize; 3]>) -> Result<Self> {
        for (i, v) in vertices.iter().enumerate() {
            if !v.coords.iter().all(|c| c.is_finite()) {
                return Err(Error::InvalidMesh(format!("vertex {i} has non-finite coordinates")));
            }
        }
        let mut kept = Vec::with_capacity(faces.len());
        for (i, f) in faces.iter().enumerate() {
            if f.iter().any(|&idx| idx >= vertices.len()) {
                return Err(Error::InvalidMesh(format!(
                    "face {i} references vertex out of range (mesh has {} vertices)",
                    vertices.len()
                )));
            }
            let area = triangle_area(&vertices[f[0]], &vertices[f[1]], &vertices[f[2]]);
            if area > DEGENERATE_AREA_EPS {
                kept.push(*f);
            }
        }
        Ok(TriangleMesh { vertices, faces: kept })
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn triangle(&self, face: usize) -> [Point3<f64>; 3] {
        let [a, b, c] = self.faces[face];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn face_area(&self, face: usize) -> f64 {
        let [a, b, c] = self.triangle(face);
        triangle_area(&a, &b, &c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.faces.len()).map(|i| self.face_area(i)).sum()
    }

    pub fn bounding_box(&self) -> Result<Aabb> {
        Aabb::from_points(self.vertices.iter()).ok_or(Error::EmptyShape)
    }

    /// Area-weighted centroid of the surface.
    pub fn surface_centroid(&self) -> Result<Point3<f64>> {
        if self.faces.is_empty() {
            return Err(Error::EmptyShape);
        }
        let mut acc = Vector3::zeros();
        let mut total = 0.0;
        for i in 0..self.faces.len() {
            let [a, b, c] = self.triangle(i);
            let w = triangle_area(&a, &b, &c);
            acc += w * (a.coords + b.coords + c.coords) / 3.0;
            total += w;
        }
        Ok(Point3::from(acc / total))
    }

    /// Mesh with every vertex pushed through `t`.
    pub fn transformed(&self, t: &Sim3) -> TriangleMesh {
        TriangleMesh { vertices: t.apply_points(&self.vertices), faces: self.faces.clone() }
    }
}

fn triangle_area(a: &Point3<f64>, b: &Point3<f64>, c: &Point3<f64>) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

/// Samples `count` points area-uniformly on the mesh surface.
///
/// Deterministic for a given `(mesh, count, seed)`; every returned point lies
/// exactly on one of the mesh triangles.
pub fn sample_surface_points(mesh: &TriangleMesh, count: usize, seed: u64) -> Result<PointCloud> {
    if mesh.is_empty() {
        return Err(Error::EmptyShape);
    }
    let mut cumulative = Vec::with_capacity(mesh.faces().len());
    let mut total = 0.0;
    for i in 0..mesh.faces().len() {
        total += mesh.face_area(i);
        cumulative.push(total);
    }
    let mut rng = seeded_rng(seed);
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let target = rng.gen::<f64>() * total;
        let face = match cumulative.binary_search_by(|v| v.partial_cmp(&target).unwrap()) {
            Ok(i) => i,
            Err(i) => i.min(cumulative.len() - 1),
        };
        let [a, b, c] = mesh.triangle(face);
        // Uniform barycentric coordinates via the square-root trick.
        let r1: f64 = rng.gen();
        let r2: f64 = rng.gen();
        let s = r1.sqrt();
        let (u, v, w) = (1.0 - s, s * (1.0 - r2), s * r2);
        points.push(Point3::from(u * a.coords + v * b.coords + w * c.coords));
    }
    Ok(PointCloud::from_points(points))
}

/// Closest point on triangle `(a, b, c)` to `p` (Ericson's region test).
pub fn closest_point_on_triangle(
    p: &Point3<f64>,
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
) -> Point3<f64> {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + v * ab;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + w * ac;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + w * (c - b);
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

/// Barycentric residual of `p` against triangle `(a, b, c)`: distance from
/// `p` to its closest point on the triangle.
pub fn triangle_residual(p: &Point3<f64>, a: &Point3<f64>, b: &Point3<f64>, c: &Point3<f64>) -> f64 {
    (closest_point_on_triangle(p, a, b, c) - p).norm()
}
