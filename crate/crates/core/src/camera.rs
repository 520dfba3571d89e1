//! Pinhole camera model, depth maps, label masks, and backprojection.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::Point3;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};

/// Calibrated pinhole intrinsics. Pixel `(u, v)` has `u` along image columns
/// and `v` along rows; row 0 is the top of the image.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PinholeCamera {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
}

impl PinholeCamera {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, width: usize, height: usize) -> Result<Self> {
        if !(fx > 0.0 && fy > 0.0) {
            return Err(Error::InvalidCamera(format!("focal lengths must be positive ({fx}, {fy})")));
        }
        if !(0.0 <= cx && cx < width as f64 && 0.0 <= cy && cy < height as f64) {
            return Err(Error::InvalidCamera(format!(
                "principal point ({cx}, {cy}) outside {width}x{height} image"
            )));
        }
        Ok(PinholeCamera { fx, fy, cx, cy, width, height })
    }

    /// Backprojects pixel `(u, v)` at depth `d` into the camera frame.
    #[inline]
    pub fn unproject(&self, u: f64, v: f64, d: f64) -> Point3<f64> {
        Point3::new(d * (u - self.cx) / self.fx, d * (v - self.cy) / self.fy, d)
    }

    /// Projects a camera-frame point to pixel coordinates (does not clip).
    #[inline]
    pub fn project(&self, p: &Point3<f64>) -> (f64, f64) {
        (self.fx * p.x / p.z + self.cx, self.fy * p.y / p.z + self.cy)
    }
}

/// Depth image in meters. Values that are non-finite or `<= 0` are invalid.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthMap {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl DepthMap {
    /// All-invalid map.
    pub fn new(width: usize, height: usize) -> Self {
        DepthMap { width, height, data: vec![f64::NAN; width * height] }
    }

    pub fn from_data(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                got: (data.len(), 1),
            });
        }
        Ok(DepthMap { width, height, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[v * self.width + u]
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize, value: f64) {
        self.data[v * self.width + u] = value;
    }

    /// True when the stored value is a usable depth.
    #[inline]
    pub fn valid_at(&self, u: usize, v: usize) -> bool {
        is_valid_depth(self.get(u, v))
    }

    /// Number of valid pixels.
    pub fn valid_count(&self) -> usize {
        self.data.iter().filter(|&&d| is_valid_depth(d)).count()
    }

    /// Mean over valid pixels, or `None` when none are valid.
    pub fn mean_valid(&self) -> Option<f64> {
        let mut sum = 0.0;
        let mut n = 0usize;
        for &d in &self.data {
            if is_valid_depth(d) {
                sum += d;
                n += 1;
            }
        }
        if n == 0 {
            None
        } else {
            Some(sum / n as f64)
        }
    }
}

#[inline]
pub fn is_valid_depth(d: f64) -> bool {
    d.is_finite() && d > 0.0
}

/// Per-pixel object labels: 0 is background, `k` is object `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskImage {
    width: usize,
    height: usize,
    labels: Vec<u32>,
}

impl MaskImage {
    pub fn new(width: usize, height: usize) -> Self {
        MaskImage { width, height, labels: vec![0; width * height] }
    }

    pub fn from_labels(width: usize, height: usize, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                got: (labels.len(), 1),
            });
        }
        Ok(MaskImage { width, height, labels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> u32 {
        self.labels[v * self.width + u]
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize, label: u32) {
        self.labels[v * self.width + u] = label;
    }

    /// Erodes every non-zero label by `radius` pixels (Chebyshev metric):
    /// a pixel keeps its label only if the full `(2r+1)²` neighborhood,
    /// clipped to the image, carries the same label.
    pub fn eroded(&self, radius: usize) -> MaskImage {
        if radius == 0 {
            return self.clone();
        }
        let r = radius as isize;
        let mut out = MaskImage::new(self.width, self.height);
        for v in 0..self.height as isize {
            for u in 0..self.width as isize {
                let label = self.get(u as usize, v as usize);
                if label == 0 {
                    continue;
                }
                let mut keep = true;
                'scan: for dv in -r..=r {
                    for du in -r..=r {
                        let (uu, vv) = (u + du, v + dv);
                        if uu < 0 || vv < 0 || uu >= self.width as isize || vv >= self.height as isize {
                            continue;
                        }
                        if self.get(uu as usize, vv as usize) != label {
                            keep = false;
                            break 'scan;
                        }
                    }
                }
                if keep {
                    out.set(u as usize, v as usize, label);
                }
            }
        }
        out
    }
}

/// Backprojects every valid depth pixel carrying `label` into a camera-frame
/// cloud, in row-major pixel order. Zero matching pixels yield an empty cloud.
pub fn backproject(
    depth: &DepthMap,
    camera: &PinholeCamera,
    mask: &MaskImage,
    label: u32,
) -> Result<PointCloud> {
    if depth.width() != camera.width || depth.height() != camera.height {
        return Err(Error::DimensionMismatch {
            expected: (camera.width, camera.height),
            got: (depth.width(), depth.height()),
        });
    }
    if mask.width() != camera.width || mask.height() != camera.height {
        return Err(Error::DimensionMismatch {
            expected: (camera.width, camera.height),
            got: (mask.width(), mask.height()),
        });
    }
    let mut points = Vec::new();
    for v in 0..depth.height() {
        for u in 0..depth.width() {
            if mask.get(u, v) != label {
                continue;
            }
            let d = depth.get(u, v);
            if is_valid_depth(d) {
                points.push(camera.unproject(u as f64, v as f64, d));
            }
        }
    }
    Ok(PointCloud::from_points(points))
}
