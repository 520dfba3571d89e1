//! Software z-buffer depth rasterization.
//!
//! Pixel-center sampling at integer coordinates (matching backprojection),
//! perspective-correct depth, no anti-aliasing, both winding orders accepted.

use nalgebra::Point3;
use num_traits::Float;

use crate::camera::{is_valid_depth, DepthMap, MaskImage, PinholeCamera};
use crate::mesh::TriangleMesh;
use crate::sim3::Sim3;

/// Triangles with any vertex at or behind this camera-frame depth are dropped.
pub const NEAR_CLIP: f64 = 1e-6;

/// Renders a mesh posed by `object_to_camera` into a fresh depth map.
///
/// Each covered pixel holds the minimum camera-frame `z` over covering
/// triangles; uncovered pixels are invalid.
pub fn render_depth(
    mesh: &TriangleMesh,
    object_to_camera: &Sim3,
    camera: &PinholeCamera,
) -> DepthMap {
    let mut depth = DepthMap::new(camera.width, camera.height);
    render_into(mesh, object_to_camera, camera, &mut depth, None, 0);
    depth
}

/// Rasterizes into an existing depth map, optionally writing `label` into the
/// mask wherever this mesh wins the depth test.
pub fn render_into(
    mesh: &TriangleMesh,
    object_to_camera: &Sim3,
    camera: &PinholeCamera,
    depth: &mut DepthMap,
    mut mask: Option<&mut MaskImage>,
    label: u32,
) {
    let verts = object_to_camera.apply_points(mesh.vertices());
    for face in mesh.faces() {
        let tri = [verts[face[0]], verts[face[1]], verts[face[2]]];
        if tri.iter().any(|p| p.z <= NEAR_CLIP) {
            continue;
        }
        raster_triangle(&tri, camera, depth, mask.as_deref_mut(), label);
    }
}

fn raster_triangle(
    tri: &[Point3<f64>; 3],
    camera: &PinholeCamera,
    depth: &mut DepthMap,
    mut mask: Option<&mut MaskImage>,
    label: u32,
) {
    let p: [(f64, f64); 3] = [camera.project(&tri[0]), camera.project(&tri[1]), camera.project(&tri[2])];
    let area = edge(p[0], p[1], p[2]);
    if area == 0.0 {
        return;
    }
    let sign = if area > 0.0 { 1.0 } else { -1.0 };
    let area = area * sign;

    let min_u = p.iter().map(|q| q.0).fold(f64::INFINITY, f64::min);
    let max_u = p.iter().map(|q| q.0).fold(f64::NEG_INFINITY, f64::max);
    let min_v = p.iter().map(|q| q.1).fold(f64::INFINITY, f64::min);
    let max_v = p.iter().map(|q| q.1).fold(f64::NEG_INFINITY, f64::max);
    let u0 = (min_u.ceil().max(0.0)) as usize;
    let v0 = (min_v.ceil().max(0.0)) as usize;
    if min_u >= camera.width as f64 || min_v >= camera.height as f64 || max_u < 0.0 || max_v < 0.0 {
        return;
    }
    let u1 = (max_u.floor()).min(camera.width as f64 - 1.0) as usize;
    let v1 = (max_v.floor()).min(camera.height as f64 - 1.0) as usize;

    let inv_z = [1.0 / tri[0].z, 1.0 / tri[1].z, 1.0 / tri[2].z];
    for v in v0..=v1 {
        for u in u0..=u1 {
            let q = (u as f64, v as f64);
            let w0 = sign * edge(p[1], p[2], q);
            let w1 = sign * edge(p[2], p[0], q);
            let w2 = sign * edge(p[0], p[1], q);
            if w0 < 0.0 || w1 < 0.0 || w2 < 0.0 {
                continue;
            }
            let (l0, l1, l2) = (w0 / area, w1 / area, w2 / area);
            let z = 1.0 / (l0 * inv_z[0] + l1 * inv_z[1] + l2 * inv_z[2]);
            let current = depth.get(u, v);
            if !is_valid_depth(current) || z < current {
                depth.set(u, v, z);
                if let Some(m) = mask.as_deref_mut() {
                    m.set(u, v, label);
                }
            }
        }
    }
}

#[inline]
fn edge(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}
