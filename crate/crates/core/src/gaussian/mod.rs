//! Boxes as 2-D Gaussians and the closed-form Wasserstein distance between them.
//!
//! A box `(x, y, w, h, theta)` maps to mean `(x, y)` and covariance root
//! `R(theta) diag(w/2, h/2) R(theta)^T`. The squared 2-Wasserstein distance of
//! two Gaussians is
//!
//! ```text
//! d^2 = |m1 - m2|^2 + tr(S1 + S2 - 2 (S1^{1/2} S2 S1^{1/2})^{1/2})
//! ```
//!
//! where `S` are covariances. In two dimensions every piece has a closed form.

mod symmat;

pub use symmat::{sqrtm_spd2, SymMat2};

use crate::error::{Error, Result};
use crate::geometry::{BoxParams, OrientedBox, Point2};
use crate::Scalar;

/// Gaussian with mean `mean` and covariance `sigma_root * sigma_root`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian2<T> {
    mean: Point2<T>,
    sigma_root: SymMat2<T>,
}

impl<T: Scalar> Gaussian2<T> {
    pub fn new(mean: Point2<T>, sigma_root: SymMat2<T>) -> Result<Self> {
        if !mean.x.is_finite() || !mean.y.is_finite() || !sigma_root.is_finite() {
            return Err(Error::NonFinite("gaussian parameters"));
        }
        if !sigma_root.is_positive_definite() {
            return Err(Error::NotSpd {
                trace: sigma_root.trace().to_f64_lossy(),
                det: sigma_root.det().to_f64_lossy(),
            });
        }
        Ok(Self { mean, sigma_root })
    }

    /// Gaussian of raw box parameters; any angle and either extent order.
    pub fn from_params(p: &BoxParams<T>) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::NonFinite("box parameters"));
        }
        if p.w <= T::zero() || p.h <= T::zero() {
            return Err(Error::NonPositiveExtent {
                w: p.w.to_f64_lossy(),
                h: p.h.to_f64_lossy(),
            });
        }
        Ok(Self {
            mean: Point2::new(p.x, p.y),
            sigma_root: sigma_root_of(p.w, p.h, p.theta),
        })
    }

    pub fn mean(&self) -> Point2<T> {
        self.mean
    }

    pub fn sigma_root(&self) -> SymMat2<T> {
        self.sigma_root
    }

    pub fn covariance(&self) -> SymMat2<T> {
        self.sigma_root.square()
    }
}

fn sigma_root_of<T: Scalar>(w: T, h: T, theta: T) -> SymMat2<T> {
    let (s, c) = theta.sin_cos();
    let half = T::lit(0.5);
    let (hw, hh) = (w * half, h * half);
    SymMat2::new(
        hw * c * c + hh * s * s,
        (hw - hh) * c * s,
        hw * s * s + hh * c * c,
    )
}

pub fn box_to_gaussian<T: Scalar>(b: &OrientedBox<T>) -> Gaussian2<T> {
    Gaussian2 {
        mean: b.center(),
        sigma_root: sigma_root_of(b.w(), b.h(), b.theta()),
    }
}

/// Squared Gaussian Wasserstein distance.
///
/// Evaluated as `|dm|^2 + ||R1 - R2||_F^2 - ||[R1, R2]||_F^2 / (tr(R1 R2) + tr sqrt(R1 S2 R1))`
/// with `R` the covariance roots. This equals the trace form exactly and is
/// exactly zero for identical inputs and exactly symmetric in its arguments.
/// Rounding residue below zero is clamped.
pub fn gwd_squared<T: Scalar>(g1: &Gaussian2<T>, g2: &Gaussian2<T>) -> T {
    let (dx, dy) = (g1.mean.x - g2.mean.x, g1.mean.y - g2.mean.y);
    let (r1, r2) = (g1.sigma_root, g2.sigma_root);
    let shape = (r1 - r2).frobenius_sq();
    let commutator = r1.commutator_norm_sq(&r2);
    let d2 = if commutator == T::zero() {
        dx * dx + dy * dy + shape
    } else {
        let cross_root = cross_trace_root(&r1, &r2);
        dx * dx + dy * dy + shape - commutator / (r1.frob_dot(&r2) + cross_root)
    };
    d2.max(T::zero())
}

/// `tr((R1 S2 R1)^{1/2})` via `tr(sqrt M)^2 = tr M + 2 sqrt(det M)`.
fn cross_trace_root<T: Scalar>(r1: &SymMat2<T>, r2: &SymMat2<T>) -> T {
    let det_root = (r1.det() * r2.det()).abs();
    (r1.square().frob_dot(&r2.square()) + T::lit(2.0) * det_root).sqrt()
}

/// Eq-5 shortcut for axis-aligned boxes (commuting covariances):
/// `dx^2 + dy^2 + ((w1 - w2)^2 + (h1 - h2)^2) / 4`, with `w`/`h` the extents
/// along x and y.
///
/// Both angles must be multiples of 90 degrees within `1e-9` rad.
pub fn gwd_squared_commutative<T: Scalar>(b1: &OrientedBox<T>, b2: &OrientedBox<T>) -> Result<T> {
    let (ex1, ey1) = axis_extents(b1).ok_or(Error::NotCommutative)?;
    let (ex2, ey2) = axis_extents(b2).ok_or(Error::NotCommutative)?;
    let (dx, dy) = (b1.x() - b2.x(), b1.y() - b2.y());
    let (dw, dh) = (ex1 - ex2, ey1 - ey2);
    Ok(dx * dx + dy * dy + (dw * dw + dh * dh) / T::lit(4.0))
}

fn axis_extents<T: Scalar>(b: &OrientedBox<T>) -> Option<(T, T)> {
    let quarter = T::FRAC_PI_2();
    let k = (b.theta() / quarter).round();
    if (b.theta() - k * quarter).abs() > T::lit(1e-9) {
        return None;
    }
    let odd = k.to_i64().map(|k| k.rem_euclid(2) == 1)?;
    Some(if odd { (b.h(), b.w()) } else { (b.w(), b.h()) })
}

/// Gradient of `d^2` with respect to the first box's raw parameters
/// `(x1, y1, w1, h1, theta1)`.
///
/// Written in the box parameters directly: with `a = w^2/4`, `b = h^2/4` and
/// relative angle `alpha = theta1 - theta2`,
/// `d^2 = dx^2 + dy^2 + (a1 + b1 + a2 + b2) - 2 sqrt(X)` where
/// `X = (a1 a2 + b1 b2) cos^2 alpha + (a1 b2 + b1 a2) sin^2 alpha + w1 h1 w2 h2 / 8`.
/// `X > 0` for positive extents, so the gradient exists everywhere.
pub fn gwd_gradient_params<T: Scalar>(p1: &BoxParams<T>, p2: &BoxParams<T>) -> [T; 5] {
    let quarter = T::lit(0.25);
    let half = T::lit(0.5);
    let eighth = T::lit(0.125);
    let two = T::lit(2.0);
    let (a1, b1) = (p1.w * p1.w * quarter, p1.h * p1.h * quarter);
    let (a2, b2) = (p2.w * p2.w * quarter, p2.h * p2.h * quarter);
    let alpha = p1.theta - p2.theta;
    let (s, c) = alpha.sin_cos();
    let (c2, s2) = (c * c, s * s);
    let x =
        (a1 * a2 + b1 * b2) * c2 + (a1 * b2 + b1 * a2) * s2 + p1.w * p1.h * p2.w * p2.h * eighth;
    let root = x.sqrt();

    let dx_dw = p1.w * half * (a2 * c2 + b2 * s2) + p1.h * p2.w * p2.h * eighth;
    let dx_dh = p1.h * half * (b2 * c2 + a2 * s2) + p1.w * p2.w * p2.h * eighth;
    let dx_dtheta = -(two * alpha).sin() * (a1 - b1) * (a2 - b2);

    [
        two * (p1.x - p2.x),
        two * (p1.y - p2.y),
        p1.w * half - dx_dw / root,
        p1.h * half - dx_dh / root,
        -dx_dtheta / root,
    ]
}

pub fn gwd_gradient<T: Scalar>(b1: &OrientedBox<T>, b2: &OrientedBox<T>) -> [T; 5] {
    gwd_gradient_params(&b1.params(), &b2.params())
}

/// Linear part `A` of the optimal transport map `x -> m2 + A (x - m1)`:
/// `A = R1^{-1} (R1 S2 R1)^{1/2} R1^{-1}`, symmetric.
pub fn transport_map<T: Scalar>(g1: &Gaussian2<T>, g2: &Gaussian2<T>) -> SymMat2<T> {
    let r1 = g1.sigma_root;
    let inner = r1.congruence(&g2.covariance());
    let det_root = (r1.det() * g2.sigma_root.det()).abs();
    let root = symmat::sqrtm_with_det_root(&inner, det_root);
    let r1_inv = r1.inverse().expect("covariance root is positive definite");
    r1_inv.congruence(&root)
}
