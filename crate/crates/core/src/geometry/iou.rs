use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{box_vertices, clip_convex, OrientedBox, Point2};
use crate::Scalar;

/// Exact IoU of two rotated rectangles.
///
/// The result does not depend on argument order: the pair is put in a fixed
/// order before clipping. Overlaps with area below the geometric tolerance
/// count as no overlap.
pub fn rotated_iou<T: Scalar>(b1: &OrientedBox<T>, b2: &OrientedBox<T>) -> T {
    let (a, b) = if b1.field_cmp(b2).is_gt() {
        (b2, b1)
    } else {
        (b1, b2)
    };
    let inter = clip_convex(&box_vertices(a), &box_vertices(b)).area();
    if inter < T::geom_eps() {
        return T::zero();
    }
    let union = a.area() + b.area() - inter;
    (inter / union).max(T::zero()).min(T::one())
}

/// Monte-Carlo IoU estimate with its sampling statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub iou: f64,
    /// `sqrt(p (1 - p) / n_union)` at the estimated `p`.
    pub std_error: f64,
    /// Samples that fell inside at least one box.
    pub union_hits: u64,
    pub samples: u64,
}

/// Estimates IoU by uniform sampling over the bounding rectangle of both boxes.
///
/// Deterministic for a given seed; the generator is owned by the call.
pub fn monte_carlo_iou_estimate<T: Scalar>(
    b1: &OrientedBox<T>,
    b2: &OrientedBox<T>,
    n_samples: u64,
    seed: u64,
) -> McEstimate {
    let n_samples = n_samples.max(1);
    let (p1, p2) = (box_vertices(b1), box_vertices(b2));
    let all = p1.vertices().iter().chain(p2.vertices().iter());
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for v in all {
        let (x, y) = (v.x.to_f64_lossy(), v.y.to_f64_lossy());
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut both, mut either) = (0u64, 0u64);
    for _ in 0..n_samples {
        let x = x0 + (x1 - x0) * rng.gen::<f64>();
        let y = y0 + (y1 - y0) * rng.gen::<f64>();
        let p = Point2::new(T::lit(x), T::lit(y));
        let (in1, in2) = (b1.contains(p), b2.contains(p));
        both += u64::from(in1 && in2);
        either += u64::from(in1 || in2);
    }
    if either == 0 {
        return McEstimate {
            iou: 0.0,
            std_error: 0.0,
            union_hits: 0,
            samples: n_samples,
        };
    }
    let p = both as f64 / either as f64;
    McEstimate {
        iou: p,
        std_error: (p * (1.0 - p) / either as f64).sqrt(),
        union_hits: either,
        samples: n_samples,
    }
}

pub fn monte_carlo_iou<T: Scalar>(
    b1: &OrientedBox<T>,
    b2: &OrientedBox<T>,
    n_samples: u64,
    seed: u64,
) -> f64 {
    monte_carlo_iou_estimate(b1, b2, n_samples, seed).iou
}
