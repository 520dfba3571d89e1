//! Chamfer data term and its robustified variant.

use alloc::vec::Vec;
use num_traits::Float;

use crate::cloud::{KdTree, PointCloud};
use crate::error::{Error, Result};
use crate::sim3::Sim3;

/// Scoring configuration.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ObjectiveConfig {
    /// Half-saturation distance of the robust kernel, meters.
    pub robust_delta: f64,
    /// When false, batch scoring falls back to the plain squared Chamfer.
    pub use_robust: bool,
}

impl Default for ObjectiveConfig {
    fn default() -> Self {
        ObjectiveConfig { robust_delta: 0.05, use_robust: true }
    }
}

/// Geman-McClure kernel `d² / (d² + δ²)`, monotone in `d ≥ 0`, bounded by 1.
#[inline]
pub fn geman_mcclure(d: f64, delta: f64) -> f64 {
    let d2 = d * d;
    d2 / (d2 + delta * delta)
}

/// Mean squared nearest-neighbor distance of the transformed measured cloud
/// against the model index.
///
/// Measured points are camera-frame; `t` maps them into the model's local
/// frame. Normalized by the measured count so scores are comparable across
/// objects with different observation sizes.
pub fn chamfer(measured: &PointCloud, t: &Sim3, model_index: &KdTree) -> Result<f64> {
    if measured.is_empty() {
        return Err(Error::NoObservedPoints);
    }
    let mut sum = 0.0;
    for p in measured.points() {
        let q = t.apply(p);
        sum += model_index.nearest(&q).1;
    }
    Ok(sum / measured.len() as f64)
}

/// Mean Geman-McClure-robustified Chamfer: the kernel is applied to the
/// Euclidean (not squared) nearest distance, so `robust_delta` stays in
/// meters. Always in `[0, 1)`.
pub fn robust_chamfer(
    measured: &PointCloud,
    t: &Sim3,
    model_index: &KdTree,
    cfg: &ObjectiveConfig,
) -> Result<f64> {
    if measured.is_empty() {
        return Err(Error::NoObservedPoints);
    }
    let mut sum = 0.0;
    for p in measured.points() {
        let q = t.apply(p);
        let d = model_index.nearest(&q).1.sqrt();
        sum += geman_mcclure(d, cfg.robust_delta);
    }
    Ok(sum / measured.len() as f64)
}

/// Scores every candidate transform; element `i` equals
/// `robust_chamfer(measured, candidates[i], ...)` (or the plain Chamfer when
/// `cfg.use_robust` is false), independent of any execution strategy.
pub fn score_batch(
    measured: &PointCloud,
    candidates: &[Sim3],
    model_index: &KdTree,
    cfg: &ObjectiveConfig,
) -> Result<Vec<f64>> {
    if candidates.is_empty() {
        return Err(Error::EmptyInput("candidate list"));
    }
    candidates
        .iter()
        .map(|t| {
            if cfg.use_robust {
                robust_chamfer(measured, t, model_index, cfg)
            } else {
                chamfer(measured, t, model_index)
            }
        })
        .collect()
}

/// Index of the minimum score; ties break to the lowest index.
pub fn argmin_candidate(scores: &[f64]) -> usize {
    assert!(!scores.is_empty(), "argmin over empty score list");
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s < scores[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix3, Point3, Vector3};
    use rand::Rng;

    fn cloud(points: &[[f64; 3]]) -> PointCloud {
        PointCloud::from_points(points.iter().map(|p| Point3::new(p[0], p[1], p[2])).collect())
    }

    #[test]
    fn zero_for_identical_clouds() {
        let model = cloud(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let index = KdTree::build(&model).unwrap();
        assert_eq!(chamfer(&model, &Sim3::identity(), &index).unwrap(), 0.0);
        assert_eq!(
            robust_chamfer(&model, &Sim3::identity(), &index, &ObjectiveConfig::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn closed_form_two_point_case() {
        let measured = cloud(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        let model = cloud(&[[0.0, 0.0, 0.0]]);
        let index = KdTree::build(&model).unwrap();
        assert_eq!(chamfer(&measured, &Sim3::identity(), &index).unwrap(), 0.5);
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = crate::rng::seeded_rng(21);
        for _ in 0..10 {
            let measured = PointCloud::from_points(
                (0..40).map(|_| Point3::new(rng.gen(), rng.gen(), rng.gen())).collect(),
            );
            let model = PointCloud::from_points(
                (0..60).map(|_| Point3::new(rng.gen(), rng.gen(), rng.gen())).collect(),
            );
            let index = KdTree::build(&model).unwrap();
            let t = Sim3::from_quat(
                rng.gen_range(0.5..2.0),
                &nalgebra::UnitQuaternion::from_scaled_axis(Vector3::new(rng.gen(), rng.gen(), rng.gen())),
                Vector3::new(rng.gen(), rng.gen(), rng.gen()),
            );
            let fast = chamfer(&measured, &t, &index).unwrap();
            let mut slow = 0.0;
            for p in measured.points() {
                let q = t.apply(p);
                slow += model
                    .points()
                    .iter()
                    .map(|m| (m - q).norm_squared())
                    .fold(f64::INFINITY, f64::min);
            }
            slow /= measured.len() as f64;
            assert!((fast - slow).abs() <= 1e-12, "fast {fast} slow {slow}");
        }
    }

    #[test]
    fn robust_half_saturation_at_delta() {
        let measured = cloud(&[[0.05, 0.0, 0.0]]);
        let model = cloud(&[[0.0, 0.0, 0.0]]);
        let index = KdTree::build(&model).unwrap();
        let v = robust_chamfer(&measured, &Sim3::identity(), &index, &ObjectiveConfig::default()).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn robust_bounded_below_one() {
        let measured = cloud(&[[100.0, 0.0, 0.0], [0.0, 55.0, 0.0]]);
        let model = cloud(&[[0.0, 0.0, 0.0]]);
        let index = KdTree::build(&model).unwrap();
        let v = robust_chamfer(&measured, &Sim3::identity(), &index, &ObjectiveConfig::default()).unwrap();
        assert!((0.0..1.0).contains(&v));
    }

    #[test]
    fn kernel_monotone_and_bounded() {
        let mut last = -1.0;
        for k in 0..200 {
            let v = geman_mcclure(k as f64 * 0.01, 0.05);
            assert!(v >= last && v < 1.0);
            last = v;
        }
    }

    #[test]
    fn empty_measured_errors() {
        let model = cloud(&[[0.0, 0.0, 0.0]]);
        let index = KdTree::build(&model).unwrap();
        let empty = PointCloud::default();
        assert_eq!(chamfer(&empty, &Sim3::identity(), &index).unwrap_err(), Error::NoObservedPoints);
    }

    #[test]
    fn batch_matches_individual_scoring() {
        let mut rng = crate::rng::seeded_rng(8);
        let measured = PointCloud::from_points(
            (0..30).map(|_| Point3::new(rng.gen(), rng.gen(), rng.gen())).collect(),
        );
        let model = PointCloud::from_points(
            (0..30).map(|_| Point3::new(rng.gen(), rng.gen(), rng.gen())).collect(),
        );
        let index = KdTree::build(&model).unwrap();
        let cfg = ObjectiveConfig::default();
        let candidates: Vec<Sim3> = (0..8)
            .map(|_| {
                Sim3::from_parts(1.0, Matrix3::identity(), Vector3::new(rng.gen(), rng.gen(), rng.gen()))
            })
            .collect();
        let scores = score_batch(&measured, &candidates, &index, &cfg).unwrap();
        for (t, s) in candidates.iter().zip(&scores) {
            assert_eq!(robust_chamfer(&measured, t, &index, &cfg).unwrap(), *s);
        }
        // Identical transforms score identically.
        let dup = alloc::vec![candidates[0]; 5];
        let dup_scores = score_batch(&measured, &dup, &index, &cfg).unwrap();
        assert!(dup_scores.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn permutation_invariance() {
        let mut rng = crate::rng::seeded_rng(90);
        let pts: Vec<Point3<f64>> =
            (0..25).map(|_| Point3::new(rng.gen(), rng.gen(), rng.gen())).collect();
        let mut shuffled = pts.clone();
        shuffled.reverse();
        shuffled.swap(0, 5);
        let model = PointCloud::from_points(
            (0..25).map(|_| Point3::new(rng.gen(), rng.gen(), rng.gen())).collect(),
        );
        let index = KdTree::build(&model).unwrap();
        let cfg = ObjectiveConfig::default();
        let a = robust_chamfer(&PointCloud::from_points(pts), &Sim3::identity(), &index, &cfg).unwrap();
        let b = robust_chamfer(&PointCloud::from_points(shuffled), &Sim3::identity(), &index, &cfg).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn argmin_contract() {
        assert_eq!(argmin_candidate(&[3.0, 1.0, 2.0]), 1);
        assert_eq!(argmin_candidate(&[1.0, 1.0]), 0);
        let mut rng = crate::rng::seeded_rng(2);
        let scores: Vec<f64> = (0..100).map(|_| rng.gen()).collect();
        let expected = scores
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(argmin_candidate(&scores), expected);
    }
}
