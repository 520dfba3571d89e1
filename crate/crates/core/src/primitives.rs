//! Watertight primitive meshes used for synthetic scenes and tests.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use nalgebra::Point3;
use num_traits::Float;

use crate::mesh::TriangleMesh;

/// Axis-aligned box centered at the origin with extents `(w, d, h)`.
pub fn box_mesh(w: f64, d: f64, h: f64) -> TriangleMesh {
    let (x, y, z) = (w / 2.0, d / 2.0, h / 2.0);
    let vertices = alloc::vec![
        Point3::new(-x, -y, -z),
        Point3::new(x, -y, -z),
        Point3::new(x, y, -z),
        Point3::new(-x, y, -z),
        Point3::new(-x, -y, z),
        Point3::new(x, -y, z),
        Point3::new(x, y, z),
        Point3::new(-x, y, z),
    ];
    let faces = alloc::vec![
        [0, 2, 1], [0, 3, 2], // bottom
        [4, 5, 6], [4, 6, 7], // top
        [0, 1, 5], [0, 5, 4], // -y
        [2, 3, 7], [2, 7, 6], // +y
        [1, 2, 6], [1, 6, 5], // +x
        [3, 0, 4], [3, 4, 7], // -x
    ];
    TriangleMesh::new(vertices, faces).expect("box mesh is valid")
}

/// Cylinder along the local z-axis, centered at the origin.
pub fn cylinder_mesh(radius: f64, height: f64, segments: usize) -> TriangleMesh {
    let n = segments.max(3);
    let z = height / 2.0;
    let mut vertices = Vec::with_capacity(2 * n + 2);
    for ring_z in [-z, z] {
        for i in 0..n {
            let theta = core::f64::consts::TAU * (i as f64) / (n as f64);
            vertices.push(Point3::new(radius * theta.cos(), radius * theta.sin(), ring_z));
        }
    }
    let bottom_center = vertices.len();
    vertices.push(Point3::new(0.0, 0.0, -z));
    let top_center = vertices.len();
    vertices.push(Point3::new(0.0, 0.0, z));

    let mut faces = Vec::with_capacity(4 * n);
    for i in 0..n {
        let j = (i + 1) % n;
        // Side wall.
        faces.push([i, j, n + j]);
        faces.push([i, n + j, n + i]);
        // Caps.
        faces.push([bottom_center, j, i]);
        faces.push([top_center, n + i, n + j]);
    }
    TriangleMesh::new(vertices, faces).expect("cylinder mesh is valid")
}

/// Icosphere of the given radius, `subdivisions` refinement levels.
pub fn icosphere(radius: f64, subdivisions: usize) -> TriangleMesh {
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let mut vertices = alloc::vec![
        Point3::new(-1.0, phi, 0.0),
        Point3::new(1.0, phi, 0.0),
        Point3::new(-1.0, -phi, 0.0),
        Point3::new(1.0, -phi, 0.0),
        Point3::new(0.0, -1.0, phi),
        Point3::new(0.0, 1.0, phi),
        Point3::new(0.0, -1.0, -phi),
        Point3::new(0.0, 1.0, -phi),
        Point3::new(phi, 0.0, -1.0),
        Point3::new(phi, 0.0, 1.0),
        Point3::new(-phi, 0.0, -1.0),
        Point3::new(-phi, 0.0, 1.0),
    ];
    for v in &mut vertices {
        *v = Point3::from(v.coords.normalize());
    }
    let mut faces: Vec<[usize; 3]> = alloc::vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mids: Vec<usize> = (0..3)
                .map(|k| {
                    let (a, b) = (f[k], f[(k + 1) % 3]);
                    let key = (a.min(b), a.max(b));
                    *midpoint.entry(key).or_insert_with(|| {
                        let m = (vertices[a].coords + vertices[b].coords).normalize();
                        vertices.push(Point3::from(m));
                        vertices.len() - 1
                    })
                })
                .collect();
            next.push([f[0], mids[0], mids[2]]);
            next.push([f[1], mids[1], mids[0]]);
            next.push([f[2], mids[2], mids[1]]);
            next.push([mids[0], mids[1], mids[2]]);
        }
        faces = next;
    }
    for v in &mut vertices {
        *v = Point3::from(v.coords * radius);
    }
    TriangleMesh::new(vertices, faces).expect("icosphere mesh is valid")
}

/// Surface of revolution around the local z-axis.
///
/// The profile is a polyline of `(radius, z)` pairs; both endpoints must lie
/// on the axis (`radius == 0`) so the result is watertight.
pub fn lathe_mesh(profile: &[(f64, f64)], segments: usize) -> TriangleMesh {
    assert!(profile.len() >= 2, "lathe profile needs at least two points");
    assert!(profile[0].0 == 0.0 && profile[profile.len() - 1].0 == 0.0, "lathe profile must start and end on the axis");
    let n = segments.max(3);
    let mut vertices = Vec::new();
    // ring_index[i] = Some(first vertex of ring i) for off-axis profile points,
    // or the single pole vertex index for on-axis points.
    let mut ring_start = Vec::with_capacity(profile.len());
    let mut on_axis = Vec::with_capacity(profile.len());
    for &(r, z) in profile {
        if r == 0.0 {
            ring_start.push(vertices.len());
            on_axis.push(true);
            vertices.push(Point3::new(0.0, 0.0, z));
        } else {
            ring_start.push(vertices.len());
            on_axis.push(false);
            for s in 0..n {
                let theta = core::f64::consts::TAU * (s as f64) / (n as f64);
                vertices.push(Point3::new(r * theta.cos(), r * theta.sin(), z));
            }
        }
    }
    let mut faces = Vec::new();
    for i in 0..profile.len() - 1 {
        let (a0, a_axis) = (ring_start[i], on_axis[i]);
        let (b0, b_axis) = (ring_start[i + 1], on_axis[i + 1]);
        for s in 0..n {
            let t = (s + 1) % n;
            match (a_axis, b_axis) {
                (true, true) => {} // degenerate band on the axis
                (true, false) => faces.push([a0, b0 + s, b0 + t]),
                (false, true) => faces.push([a0 + s, b0, a0 + t]),
                (false, false) => {
                    faces.push([a0 + s, b0 + s, b0 + t]);
                    faces.push([a0 + s, b0 + t, a0 + t]);
                }
            }
        }
    }
    TriangleMesh::new(vertices, faces).expect("lathe mesh is valid")
}

/// A shallow open dish: spherical-cap inner and outer shells joined at a rim.
///
/// `rim_radius` is the outer rim radius, `depth` the interior sagitta, and
/// `thickness` the shell thickness. Locally the dish rests on z = 0 and opens
/// toward +z.
pub fn dish_mesh(rim_radius: f64, depth: f64, thickness: f64, segments: usize) -> TriangleMesh {
    assert!(rim_radius > 0.0 && depth > 0.0 && thickness > 0.0);
    let arc_points = 8;
    // Sphere through the rim circle with sagitta `depth`: radius from the
    // chord-sagitta relation.
    let r_curv = (rim_radius * rim_radius + depth * depth) / (2.0 * depth);
    let mut profile = Vec::new();
    // Outer surface: axis pole (0,0) out and up to the rim.
    profile.push((0.0, 0.0));
    for k in 1..=arc_points {
        let f = k as f64 / arc_points as f64;
        let r = rim_radius * f;
        let z = sphere_cap_height(r_curv, rim_radius, r);
        profile.push((r, z));
    }
    let rim_top = sphere_cap_height(r_curv, rim_radius, rim_radius) + thickness;
    profile.push((rim_radius, rim_top));
    // Inner surface: rim back down to the axis at z = thickness.
    for k in (0..arc_points).rev() {
        let f = k as f64 / arc_points as f64;
        let r = rim_radius * f;
        let z = sphere_cap_height(r_curv, rim_radius, r) + thickness;
        if k == 0 {
            profile.push((0.0, z));
        } else {
            profile.push((r, z));
        }
    }
    lathe_mesh(&profile, segments)
}

/// Height of the lower spherical cap above its pole, at radial distance `r`.
fn sphere_cap_height(r_curv: f64, rim_radius: f64, r: f64) -> f64 {
    debug_assert!(r <= rim_radius + 1e-12);
    r_curv - (r_curv * r_curv - r * r).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::sample_surface_points;

    #[test]
    fn box_has_expected_bounds() {
        let m = box_mesh(0.2, 0.4, 0.6);
        let bb = m.bounding_box().unwrap();
        assert_eq!(bb.min, Point3::new(-0.1, -0.2, -0.3));
        assert_eq!(bb.max, Point3::new(0.1, 0.2, 0.3));
        assert_eq!(m.faces().len(), 12);
    }

    #[test]
    fn sphere_sampling_mean_radius() {
        let m = icosphere(1.0, 3);
        let cloud = sample_surface_points(&m, 10_000, 31).unwrap();
        let mean: f64 = cloud.points().iter().map(|p| p.coords.norm()).sum::<f64>() / 10_000.0;
        assert!((mean - 1.0).abs() < 0.02, "mean radius {mean}");
    }

    #[test]
    fn cylinder_vertices_on_surface() {
        let m = cylinder_mesh(0.05, 0.2, 32);
        for v in m.vertices() {
            let r = (v.x * v.x + v.y * v.y).sqrt();
            assert!(r < 0.05 + 1e-12 && v.z.abs() <= 0.1 + 1e-12);
        }
    }

    #[test]
    fn dish_is_closed_surface() {
        let m = dish_mesh(0.06, 0.015, 0.01, 32);
        // Every edge of a watertight mesh is shared by exactly two faces.
        let mut edge_count: alloc::collections::BTreeMap<(usize, usize), usize> =
            alloc::collections::BTreeMap::new();
        for f in m.faces() {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                *edge_count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        assert!(edge_count.values().all(|&c| c == 2), "dish mesh not closed");
    }
}
