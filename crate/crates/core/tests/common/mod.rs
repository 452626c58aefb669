//! Reference computations that share no code with the library.

#![allow(dead_code)]

use nalgebra::{Matrix2, Rotation2, SymmetricEigen, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `(x, y, w, h, theta)` with theta in radians.
pub type Raw = [f64; 5];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_raw(rng: &mut ChaCha8Rng, centre: f64, lo: f64, hi: f64) -> Raw {
    [
        rng.gen_range(-centre..centre),
        rng.gen_range(-centre..centre),
        rng.gen_range(lo..hi),
        rng.gen_range(lo..hi),
        rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
    ]
}

/// `R diag(w^2/4, h^2/4) R^T`.
pub fn covariance(p: &Raw) -> Matrix2<f64> {
    let r = Rotation2::new(p[4]).into_inner();
    let d = Matrix2::from_diagonal(&Vector2::new(p[2] * p[2] / 4.0, p[3] * p[3] / 4.0));
    r * d * r.transpose()
}

/// Principal square root of a symmetric positive semi-definite matrix by
/// eigendecomposition.
pub fn sqrtm(m: &Matrix2<f64>) -> Matrix2<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    eig.eigenvectors * Matrix2::from_diagonal(&roots) * eig.eigenvectors.transpose()
}

pub fn sigma_root(p: &Raw) -> Matrix2<f64> {
    sqrtm(&covariance(p))
}

/// `tr((S1^(1/2) S2 S1^(1/2))^(1/2))`.
pub fn cross_trace_root(s1: &Matrix2<f64>, s2: &Matrix2<f64>) -> f64 {
    let r1 = sqrtm(s1);
    sqrtm(&(r1 * s2 * r1)).trace()
}

/// Distance between axis-aligned boxes given by centre and x/y extents.
pub fn axis_aligned_distance(c1: [f64; 2], e1: [f64; 2], c2: [f64; 2], e2: [f64; 2]) -> f64 {
    let dc = (c1[0] - c2[0]).powi(2) + (c1[1] - c2[1]).powi(2);
    dc + ((e1[0] - e2[0]).powi(2) + (e1[1] - e2[1]).powi(2)) / 4.0
}

/// Central difference of `f` in coordinate `i`.
pub fn central_difference(f: impl Fn(&Raw) -> f64, p: &Raw, i: usize) -> f64 {
    let h = 1e-6 * p[i].abs().max(1.0);
    let (mut up, mut dn) = (*p, *p);
    up[i] += h;
    dn[i] -= h;
    (f(&up) - f(&dn)) / (2.0 * h)
}

struct Frame {
    cx: f64,
    cy: f64,
    c: f64,
    s: f64,
    hw: f64,
    hh: f64,
}

impl Frame {
    fn new(p: &Raw) -> Self {
        let (s, c) = p[4].sin_cos();
        Self {
            cx: p[0],
            cy: p[1],
            c,
            s,
            hw: p[2] / 2.0,
            hh: p[3] / 2.0,
        }
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        let (dx, dy) = (x - self.cx, y - self.cy);
        (dx * self.c + dy * self.s).abs() <= self.hw
            && (-dx * self.s + dy * self.c).abs() <= self.hh
    }

    fn corners(&self) -> [(f64, f64); 4] {
        let mut out = [(0.0, 0.0); 4];
        for (k, (u, v)) in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)]
            .into_iter()
            .enumerate()
        {
            let (lx, ly) = (u * self.hw, v * self.hh);
            out[k] = (
                self.cx + lx * self.c - ly * self.s,
                self.cy + lx * self.s + ly * self.c,
            );
        }
        out
    }
}

/// Monte-Carlo IoU over the joint bounding rectangle; returns the estimate
/// and its standard error `sqrt(p (1 - p) / n_union)`.
pub fn monte_carlo_iou(a: &Raw, b: &Raw, samples: u64, seed: u64) -> (f64, f64) {
    let (fa, fb) = (Frame::new(a), Frame::new(b));
    let pts: Vec<(f64, f64)> = fa.corners().into_iter().chain(fb.corners()).collect();
    let x0 = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x1 = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let y0 = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let y1 = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let mut r = rng(seed);
    let (mut both, mut either) = (0u64, 0u64);
    for _ in 0..samples {
        let x = x0 + (x1 - x0) * r.gen::<f64>();
        let y = y0 + (y1 - y0) * r.gen::<f64>();
        let (ia, ib) = (fa.contains(x, y), fb.contains(x, y));
        both += (ia && ib) as u64;
        either += (ia || ib) as u64;
    }
    if either == 0 {
        return (0.0, 0.0);
    }
    let p = both as f64 / either as f64;
    (p, (p * (1.0 - p) / either as f64).sqrt())
}
