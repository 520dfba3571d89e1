//! Free-space consistency: rendered-versus-observed depth comparison.
//!
//! A pose hypothesis violates free space when it places surface in front of
//! the observed depth along some camera ray, i.e. inside volume the sensor saw
//! through. Violations are measured per pixel as rendered-depth shortfall and
//! aggregated as a capped maximum.

use alloc::vec;
use alloc::vec::Vec;

use crate::camera::{is_valid_depth, DepthMap, PinholeCamera};
use crate::mesh::TriangleMesh;
use crate::raster::render_depth;
use crate::sim3::Sim3;

/// Parameters of the free-space test.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FreeSpaceParams {
    /// Depth slack absorbing sensor noise and self-surface mismatch (m).
    pub margin: f64,
    /// Upper bound on the reported violation (m).
    pub cap: f64,
    /// Pixels within this distance of the rendered silhouette are ignored;
    /// sub-pixel pose error otherwise reads as deep violation wherever the
    /// silhouette slides over an occlusion edge.
    pub edge_margin_px: usize,
}

impl Default for FreeSpaceParams {
    fn default() -> Self {
        FreeSpaceParams { margin: 0.005, cap: 0.01, edge_margin_px: 2 }
    }
}

impl FreeSpaceParams {
    pub fn new(margin: f64, cap: f64) -> Self {
        FreeSpaceParams { margin, cap, ..Default::default() }
    }
}

/// Maximum observed free-space violation of `mesh` under `pose` (camera to
/// object), capped at `params.cap`.
///
/// The object is rendered through the inverse pose; over pixels where both
/// the rendering and the observation are valid (and at least
/// `edge_margin_px` away from the rendered silhouette), the per-pixel
/// violation is `max(0, observed − rendered − margin)`. Rendering behind the
/// observed surface (occlusion) never counts.
pub fn free_space_violation(
    mesh: &TriangleMesh,
    pose: &Sim3,
    camera: &PinholeCamera,
    observed: &DepthMap,
    params: &FreeSpaceParams,
) -> f64 {
    let rendered = render_depth(mesh, &pose.inverse(), camera);
    violation_between(&rendered, observed, params)
}

/// Same test on an already-rendered depth map.
pub fn violation_between(rendered: &DepthMap, observed: &DepthMap, params: &FreeSpaceParams) -> f64 {
    let interior = interior_mask(rendered, params.edge_margin_px);
    let (w, h) = (rendered.width(), rendered.height());
    let mut worst = 0.0f64;
    for v in 0..h {
        for u in 0..w {
            if !interior[v * w + u] {
                continue;
            }
            let d_o = observed.get(u, v);
            if !is_valid_depth(d_o) {
                continue;
            }
            let violation = d_o - rendered.get(u, v) - params.margin;
            if violation > worst {
                worst = violation;
            }
        }
    }
    worst.min(params.cap)
}

/// Validity mask of `rendered` eroded by `margin_px` (Chebyshev metric),
/// computed with two separable min passes.
fn interior_mask(rendered: &DepthMap, margin_px: usize) -> Vec<bool> {
    let (w, h) = (rendered.width(), rendered.height());
    let mut valid: Vec<bool> = (0..w * h)
        .map(|i| is_valid_depth(rendered.data()[i]))
        .collect();
    if margin_px == 0 {
        return valid;
    }
    let r = margin_px as isize;
    let mut tmp = vec![false; w * h];
    for v in 0..h as isize {
        for u in 0..w as isize {
            let mut all = true;
            for du in -r..=r {
                let uu = u + du;
                if uu < 0 || uu >= w as isize || !valid[v as usize * w + uu as usize] {
                    all = false;
                    break;
                }
            }
            tmp[v as usize * w + u as usize] = all;
        }
    }
    for v in 0..h as isize {
        for u in 0..w as isize {
            let mut all = true;
            for dv in -r..=r {
                let vv = v + dv;
                if vv < 0 || vv >= h as isize || !tmp[vv as usize * w + u as usize] {
                    all = false;
                    break;
                }
            }
            valid[v as usize * w + u as usize] = all;
        }
    }
    valid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camera::PinholeCamera;
    use alloc::vec;

    fn camera() -> PinholeCamera {
        PinholeCamera::new(100.0, 100.0, 50.0, 50.0, 101, 101).unwrap()
    }

    fn constant_map(cam: &PinholeCamera, d: f64) -> DepthMap {
        DepthMap::from_data(cam.width, cam.height, vec![d; cam.width * cam.height]).unwrap()
    }

    #[test]
    fn exact_surface_has_no_violation() {
        let cam = camera();
        let observed = constant_map(&cam, 1.0);
        let rendered = constant_map(&cam, 1.0);
        let v = violation_between(&rendered, &observed, &FreeSpaceParams::new(0.0, 0.01));
        assert_eq!(v, 0.0);
    }

    #[test]
    fn deep_violation_caps() {
        let cam = camera();
        let observed = constant_map(&cam, 1.0);
        let rendered = constant_map(&cam, 0.5);
        let v = violation_between(&rendered, &observed, &FreeSpaceParams::new(0.0, 0.01));
        assert_eq!(v, 0.01);
    }

    #[test]
    fn occlusion_is_allowed() {
        let cam = camera();
        let observed = constant_map(&cam, 0.5);
        let rendered = constant_map(&cam, 1.0);
        let v = violation_between(&rendered, &observed, &FreeSpaceParams::new(0.0, 0.01));
        assert_eq!(v, 0.0);
    }

    #[test]
    fn margin_absorbs_small_mismatch() {
        let cam = camera();
        let observed = constant_map(&cam, 1.004);
        let rendered = constant_map(&cam, 1.0);
        let p = FreeSpaceParams { margin: 0.005, cap: 0.01, edge_margin_px: 0 };
        assert_eq!(violation_between(&rendered, &observed, &p), 0.0);
    }

    #[test]
    fn silhouette_band_is_excluded() {
        let cam = camera();
        let observed = constant_map(&cam, 1.0);
        // Rendered patch closer than observed only in a 2px-wide frame of a
        // square region: edge exclusion removes it.
        let mut rendered = DepthMap::new(cam.width, cam.height);
        for v in 30..70 {
            for u in 30..70 {
                let boundary = v < 32 || v >= 68 || u < 32 || u >= 68;
                rendered.set(u, v, if boundary { 0.5 } else { 1.0 });
            }
        }
        let p = FreeSpaceParams { margin: 0.0, cap: 0.01, edge_margin_px: 2 };
        assert_eq!(violation_between(&rendered, &observed, &p), 0.0);
        let p0 = FreeSpaceParams { margin: 0.0, cap: 0.01, edge_margin_px: 0 };
        assert_eq!(violation_between(&rendered, &observed, &p0), 0.01);
    }

    #[test]
    fn mesh_level_round_trip_is_clean() {
        // Render a box as the "observation" and test the same pose: zero.
        let cam = camera();
        let mesh = crate::primitives::box_mesh(0.3, 0.3, 0.2);
        let obj2cam = Sim3::from_parts(
            1.0,
            nalgebra::Matrix3::identity(),
            nalgebra::Vector3::new(0.0, 0.0, 1.0),
        );
        let observed = render_depth(&mesh, &obj2cam, &cam);
        let pose = obj2cam.inverse();
        let v = free_space_violation(&mesh, &pose, &cam, &observed, &FreeSpaceParams::new(0.001, 0.01));
        assert_eq!(v, 0.0);
    }
}
