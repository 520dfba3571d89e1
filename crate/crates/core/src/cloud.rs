//! Point clouds and an exact nearest-neighbor index.

use alloc::vec::Vec;
use nalgebra::Point3;

use crate::error::{Error, Result};
use crate::sim3::Sim3;

/// A set of 3D points in meters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointCloud {
    points: Vec<Point3<f64>>,
}

impl PointCloud {
    /// Builds a cloud, validating that all coordinates are finite.
    pub fn new(points: Vec<Point3<f64>>) -> Result<Self> {
        if points.iter().any(|p| !p.coords.iter().all(|c| c.is_finite())) {
            return Err(Error::NonFinitePoint);
        }
        Ok(PointCloud { points })
    }

    /// Builds a cloud from points known to be finite.
    pub fn from_points(points: Vec<Point3<f64>>) -> Self {
        PointCloud { points }
    }

    pub fn points(&self) -> &[Point3<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn push(&mut self, p: Point3<f64>) {
        self.points.push(p);
    }

    pub fn extend_from(&mut self, other: &PointCloud) {
        self.points.extend_from_slice(&other.points);
    }

    /// Cloud with every point pushed through `t`.
    pub fn transformed(&self, t: &Sim3) -> PointCloud {
        PointCloud { points: t.apply_points(&self.points) }
    }

    /// Deterministic uniform subsample of at most `count` points.
    ///
    /// The result is a prefix-nested family: subsampling the same cloud with a
    /// smaller `count` and the same seed yields a prefix of the larger sample.
    pub fn subsample(&self, count: usize, seed: u64) -> PointCloud {
        if self.points.len() <= count {
            return self.clone();
        }
        let mut indices: Vec<usize> = (0..self.points.len()).collect();
        let mut rng = crate::rng::seeded_rng(seed);
        // Partial Fisher-Yates: only the first `count` slots are needed.
        for i in 0..count {
            let j = i + (rand::Rng::gen_range(&mut rng, 0..(self.points.len() - i) as u64) as usize);
            indices.swap(i, j);
        }
        PointCloud { points: indices[..count].iter().map(|&i| self.points[i]).collect() }
    }
}

const LEAF_SIZE: usize = 8;

enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

/// Exact nearest-neighbor index over a point cloud.
///
/// Queries return precisely the brute-force minimizer; ties on squared
/// distance break toward the lowest point index.
pub struct KdTree {
    points: Vec<Point3<f64>>,
    /// Original indices, permuted so each leaf owns a contiguous range.
    order: Vec<usize>,
    nodes: Vec<Node>,
    root: usize,
}

impl KdTree {
    /// Builds the index; errors on an empty cloud.
    pub fn build(cloud: &PointCloud) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let points: Vec<Point3<f64>> = cloud.points().to_vec();
        let mut order: Vec<usize> = (0..points.len()).collect();
        let mut nodes = Vec::new();
        let n = points.len();
        let root = build_node(&points, &mut order, 0, n, &mut nodes);
        Ok(KdTree { points, order, nodes, root })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Exact nearest neighbor: `(point index, squared distance)`.
    pub fn nearest(&self, q: &Point3<f64>) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        self.search(self.root, q, &mut best);
        best
    }

    /// Nearest-neighbor distance (Euclidean).
    #[inline]
    pub fn nearest_distance(&self, q: &Point3<f64>) -> f64 {
        num_traits::Float::sqrt(self.nearest(q).1)
    }

    fn search(&self, node: usize, q: &Point3<f64>, best: &mut (usize, f64)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for slot in start..end {
                    let idx = self.order[slot];
                    let d2 = (self.points[idx] - q).norm_squared();
                    if d2 < best.1 || (d2 == best.1 && idx < best.0) {
                        *best = (idx, d2);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let delta = q[axis] - value;
                let (near, far) = if delta <= 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, best);
                // Equal plane distance may still hide an equal-distance point
                // with a lower index, so descend unless strictly farther.
                if delta * delta <= best.1 {
                    self.search(far, q, best);
                }
            }
        }
    }
}

fn build_node(
    points: &[Point3<f64>],
    order: &mut [usize],
    start: usize,
    end: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let count = end - start;
    if count <= LEAF_SIZE {
        nodes.push(Node::Leaf { start, end });
        return nodes.len() - 1;
    }
    // Split on the widest axis at the median.
    let slice = &mut order[start..end];
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for &i in slice.iter() {
        for a in 0..3 {
            lo[a] = lo[a].min(points[i][a]);
            hi[a] = hi[a].max(points[i][a]);
        }
    }
    let mut axis = 0;
    for a in 1..3 {
        if hi[a] - lo[a] > hi[axis] - lo[axis] {
            axis = a;
        }
    }
    let mid = count / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| {
        points[a][axis].partial_cmp(&points[b][axis]).unwrap().then(a.cmp(&b))
    });
    let value = points[slice[mid]][axis];
    if hi[axis] == lo[axis] {
        // All points coincide on every axis wider than this one: no useful
        // split exists, fall back to a (possibly oversized) leaf.
        nodes.push(Node::Leaf { start, end });
        return nodes.len() - 1;
    }
    let node_slot = nodes.len();
    nodes.push(Node::Leaf { start, end }); // placeholder
    let left = build_node(points, order, start, start + mid, nodes);
    let right = build_node(points, order, start + mid, end, nodes);
    nodes[node_slot] = Node::Split { axis, value, left, right };
    node_slot
}
